#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "votecast/csv.hpp"
#include "votecast/errors.hpp"
#include "votecast/text.hpp"

namespace votecast {

/// One census age band. `pop_share`, `literacy` and `social_media` are
/// fractions; `social_media` is the share of the band's online users who are
/// active on social media, so the social-media population is
/// pop_share * literacy * social_media.
struct AgeBand {
    std::string label;
    int lower = 0;
    std::optional<int> upper; // absent for an open-ended top band
    double population = 0.0;  // thousands of persons, as published
    double pop_share = 0.0;   // recomputed fraction of the table total
    double literacy = 0.0;    // C_i
    double social_media = 0.0; // S_i

    bool open_ended() const { return !upper.has_value(); }
};

struct CensusTable {
    std::vector<AgeBand> bands;
    std::string voting_floor_label;
    std::size_t voting_floor_index = 0;

    std::span<const AgeBand> voting_bands() const {
        return std::span<const AgeBand>(bands).subspan(voting_floor_index);
    }

    const AgeBand* find(std::string_view label) const {
        auto it = std::find_if(bands.begin(), bands.end(),
                               [&](const AgeBand& b) { return b.label == label; });
        return it == bands.end() ? nullptr : &*it;
    }
};

/// Population split of one band into the three mutually exclusive groups
/// used by the projection, each as a fraction of the national population.
struct BandPartition {
    std::string label;
    double offline = 0.0;          // x_i * (1 - C_i)
    double online_nonsocial = 0.0; // x_i * C_i * (1 - S_i)
    double online_social = 0.0;    // x_i * C_i * S_i
};

namespace detail {

// Accepts "20 - 24", "85 & Over", "85+". Spacing is free-form.
inline std::pair<int, std::optional<int>> parse_band_label(const std::string& label,
                                                           const std::string& context) {
    const std::string norm = text::normalize(label);
    auto fail = [&]() -> std::pair<int, std::optional<int>> {
        throw DataError(context + ": unrecognized age band label '" + label + "'");
    };
    auto parse_int = [&](std::string_view sv) {
        int v = 0;
        if (sv.empty()) fail();
        for (char c : sv) {
            if (c < '0' || c > '9') fail();
            v = v * 10 + (c - '0');
        }
        return v;
    };
    if (auto dash = norm.find('-'); dash != std::string::npos) {
        const int lo = parse_int(text::trim(std::string_view(norm).substr(0, dash)));
        const int hi = parse_int(text::trim(std::string_view(norm).substr(dash + 1)));
        if (hi < lo) fail();
        return {lo, hi};
    }
    if (auto amp = norm.find('&'); amp != std::string::npos) {
        const std::string rest = text::trim(std::string_view(norm).substr(amp + 1));
        if (rest != "over" && rest != "above") fail();
        return {parse_int(text::trim(std::string_view(norm).substr(0, amp))), std::nullopt};
    }
    if (!norm.empty() && norm.back() == '+') {
        return {parse_int(text::trim(std::string_view(norm).substr(0, norm.size() - 1))),
                std::nullopt};
    }
    return fail();
}

} // namespace detail

/// Loads a census CSV with columns label, population_thousands, literacy_pct,
/// social_media_pct (header row required, any column order). Population
/// shares are recomputed from the raw thousands rather than trusted from the
/// file. Bands must be sorted ascending and non-overlapping.
inline CensusTable load_census(const std::filesystem::path& path,
                               std::string voting_floor_label = "20 - 24") {
    const auto rows = csv::read_file(path);
    if (rows.empty()) throw DataError(path.string() + ": empty census file");

    const auto& header = rows.front().fields;
    auto column = [&](std::string_view name) -> std::size_t {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (text::normalize(header[i]) == name) return i;
        }
        throw DataError(path.string() + ": missing required column '" + std::string(name) + "'");
    };
    const std::size_t c_label = column("label");
    const std::size_t c_pop = column("population_thousands");
    const std::size_t c_lit = column("literacy_pct");
    const std::size_t c_soc = column("social_media_pct");
    const std::size_t width = std::max({c_label, c_pop, c_lit, c_soc}) + 1;

    CensusTable table;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const std::string where = path.string() + " row " + std::to_string(row.line_no);
        if (row.fields.size() < width) {
            throw DataError(where + ": expected at least " + std::to_string(width) + " columns");
        }
        AgeBand band;
        band.label = row.fields[c_label];
        std::tie(band.lower, band.upper) = detail::parse_band_label(band.label, where);
        band.population = csv::parse_number(row.fields[c_pop], where + " population");
        if (band.population < 0.0 || !std::isfinite(band.population)) {
            throw DataError(where + ": population must be non-negative");
        }
        band.literacy = csv::parse_percent(row.fields[c_lit], where + " literacy");
        band.social_media = csv::parse_percent(row.fields[c_soc], where + " social_media");
        table.bands.push_back(std::move(band));
    }
    if (table.bands.empty()) throw DataError(path.string() + ": census has no bands");

    double total = 0.0;
    for (std::size_t i = 0; i < table.bands.size(); ++i) {
        const AgeBand& b = table.bands[i];
        if (i > 0) {
            const AgeBand& prev = table.bands[i - 1];
            if (prev.open_ended() || b.lower <= *prev.upper) {
                throw DataError(path.string() + ": bands '" + prev.label + "' and '" + b.label +
                                "' overlap or are out of order");
            }
        }
        total += b.population;
    }
    if (total <= 0.0) throw DataError(path.string() + ": total population is zero");
    for (AgeBand& b : table.bands) b.pop_share = b.population / total;

    table.voting_floor_label = std::move(voting_floor_label);
    const AgeBand* floor = table.find(table.voting_floor_label);
    if (floor == nullptr) {
        throw DataError(path.string() + ": voting floor band '" + table.voting_floor_label +
                        "' not present in census");
    }
    table.voting_floor_index = static_cast<std::size_t>(floor - table.bands.data());
    return table;
}

/// Overrides per-band social-media rates from a survey CSV with columns
/// label, social_media_pct. Every survey row must match a census band;
/// census bands absent from the survey keep their current rate.
inline void apply_survey(CensusTable& table, const std::filesystem::path& path) {
    const auto rows = csv::read_file(path);
    if (rows.empty()) throw DataError(path.string() + ": empty survey file");
    const auto& header = rows.front().fields;
    std::size_t c_label = header.size(), c_soc = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string h = text::normalize(header[i]);
        if (h == "label") c_label = i;
        if (h == "social_media_pct") c_soc = i;
    }
    if (c_label >= header.size() || c_soc >= header.size()) {
        throw DataError(path.string() + ": survey needs columns label, social_media_pct");
    }
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const std::string where = path.string() + " row " + std::to_string(row.line_no);
        if (row.fields.size() <= std::max(c_label, c_soc)) {
            throw DataError(where + ": too few columns");
        }
        auto it = std::find_if(table.bands.begin(), table.bands.end(), [&](const AgeBand& b) {
            return b.label == row.fields[c_label];
        });
        if (it == table.bands.end()) {
            throw DataError(where + ": band '" + row.fields[c_label] + "' not in census");
        }
        it->social_media = csv::parse_percent(row.fields[c_soc], where + " social_media");
    }
}

inline BandPartition partition(const AgeBand& band) {
    BandPartition p;
    p.label = band.label;
    p.offline = band.pop_share * (1.0 - band.literacy);
    p.online_nonsocial = band.pop_share * band.literacy * (1.0 - band.social_media);
    p.online_social = band.pop_share * band.literacy * band.social_media;
    return p;
}

/// Fraction of the national population in this band that is not on social
/// media: the offline part plus the online-but-not-social part.
inline double off_twitter_share(const AgeBand& band) {
    const BandPartition p = partition(band);
    return p.offline + p.online_nonsocial;
}

} // namespace votecast
