#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <unicode/uchar.h>
#include <unicode/unorm2.h>
#include <unicode/ustring.h>
#include <unicode/utf16.h>

namespace votecast::text {

namespace detail {

// Invalid byte sequences are replaced with U+FFFD rather than rejected;
// tweet payloads are not trusted to be clean UTF-8.
inline std::u16string to_utf16(std::string_view s) {
    std::u16string out(s.size() + 1, u'\0');
    UErrorCode status = U_ZERO_ERROR;
    int32_t len = 0;
    u_strFromUTF8WithSub(reinterpret_cast<UChar*>(out.data()),
                         static_cast<int32_t>(out.size()), &len, s.data(),
                         static_cast<int32_t>(s.size()), 0xFFFD, nullptr, &status);
    out.resize(U_SUCCESS(status) ? static_cast<size_t>(len) : 0);
    return out;
}

inline std::string to_utf8(const char16_t* s, int32_t n) {
    std::string out(static_cast<size_t>(n) * 4 + 1, '\0');
    UErrorCode status = U_ZERO_ERROR;
    int32_t len = 0;
    u_strToUTF8(out.data(), static_cast<int32_t>(out.size()), &len,
                reinterpret_cast<const UChar*>(s), n, &status);
    out.resize(U_SUCCESS(status) ? static_cast<size_t>(len) : 0);
    return out;
}

// NFC normalization followed by root-locale lowercasing. Root locale keeps
// the result independent of the host environment.
inline std::u16string nfc_lower(std::string_view s) {
    std::u16string u = to_utf16(s);
    UErrorCode status = U_ZERO_ERROR;
    const UNormalizer2* nfc = unorm2_getNFCInstance(&status);
    if (U_FAILURE(status)) return u;

    std::u16string normed(u.size() + 16, u'\0');
    status = U_ZERO_ERROR;
    int32_t len = unorm2_normalize(nfc, reinterpret_cast<const UChar*>(u.data()),
                                   static_cast<int32_t>(u.size()),
                                   reinterpret_cast<UChar*>(normed.data()),
                                   static_cast<int32_t>(normed.size()), &status);
    if (status == U_BUFFER_OVERFLOW_ERROR) {
        normed.assign(static_cast<size_t>(len), u'\0');
        status = U_ZERO_ERROR;
        len = unorm2_normalize(nfc, reinterpret_cast<const UChar*>(u.data()),
                               static_cast<int32_t>(u.size()),
                               reinterpret_cast<UChar*>(normed.data()),
                               static_cast<int32_t>(normed.size()), &status);
    }
    if (U_FAILURE(status)) return u;
    normed.resize(static_cast<size_t>(len));

    std::u16string lowered(normed.size() + 16, u'\0');
    status = U_ZERO_ERROR;
    len = u_strToLower(reinterpret_cast<UChar*>(lowered.data()),
                       static_cast<int32_t>(lowered.size()),
                       reinterpret_cast<const UChar*>(normed.data()),
                       static_cast<int32_t>(normed.size()), "", &status);
    if (status == U_BUFFER_OVERFLOW_ERROR) {
        lowered.assign(static_cast<size_t>(len), u'\0');
        status = U_ZERO_ERROR;
        len = u_strToLower(reinterpret_cast<UChar*>(lowered.data()),
                           static_cast<int32_t>(lowered.size()),
                           reinterpret_cast<const UChar*>(normed.data()),
                           static_cast<int32_t>(normed.size()), "", &status);
    }
    if (U_FAILURE(status)) return normed;
    lowered.resize(static_cast<size_t>(len));
    return lowered;
}

} // namespace detail

/// Canonical text form used for duplicate keys, lexicon terms and candidate
/// name matching: NFC, lowercased, whitespace runs collapsed to single
/// spaces, leading/trailing whitespace removed.
inline std::string normalize(std::string_view s) {
    std::u16string u = detail::nfc_lower(s);
    std::u16string collapsed;
    collapsed.reserve(u.size());
    bool pending_space = false;
    int32_t i = 0;
    const int32_t n = static_cast<int32_t>(u.size());
    while (i < n) {
        UChar32 cp;
        U16_NEXT(u.data(), i, n, cp);
        if (u_isUWhiteSpace(cp)) {
            if (!collapsed.empty()) pending_space = true;
            continue;
        }
        if (pending_space) {
            collapsed.push_back(u' ');
            pending_space = false;
        }
        char16_t buf[2];
        int32_t blen = 0;
        UBool err = false;
        U16_APPEND(buf, blen, 2, cp, err);
        if (!err) collapsed.append(buf, static_cast<size_t>(blen));
    }
    return detail::to_utf8(collapsed.data(), static_cast<int32_t>(collapsed.size()));
}

/// Lowercase NFC tokens. A token is a maximal run of letters, digits,
/// '#' or '@'; every other character separates tokens.
inline std::vector<std::string> tokenize(std::string_view s) {
    std::u16string u = detail::nfc_lower(s);
    std::vector<std::string> tokens;
    std::u16string current;
    auto flush = [&] {
        if (!current.empty()) {
            tokens.push_back(detail::to_utf8(current.data(),
                                             static_cast<int32_t>(current.size())));
            current.clear();
        }
    };
    int32_t i = 0;
    const int32_t n = static_cast<int32_t>(u.size());
    while (i < n) {
        UChar32 cp;
        U16_NEXT(u.data(), i, n, cp);
        const bool word_char = u_isalnum(cp) || cp == U'#' || cp == U'@';
        if (!word_char) {
            flush();
            continue;
        }
        char16_t buf[2];
        int32_t blen = 0;
        UBool err = false;
        U16_APPEND(buf, blen, 2, cp, err);
        if (!err) current.append(buf, static_cast<size_t>(blen));
    }
    flush();
    return tokens;
}

inline std::string trim(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    size_t e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

} // namespace votecast::text
