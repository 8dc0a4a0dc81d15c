#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "votecast/datetime.hpp"
#include "votecast/errors.hpp"
#include "votecast/text.hpp"

namespace votecast {

struct TweetRecord {
    std::string id;
    std::string author;
    Timestamp timestamp{};
    std::string text;
    std::vector<std::string> mentions; // candidate ids, in candidate-spec order
};

struct CandidateSpec {
    std::string id;
    std::string group;
    std::vector<std::string> name_patterns; // matched case-insensitively
};

struct ParseIssue {
    std::size_t line_no = 0;
    std::string message;
};

struct ParseResult {
    std::vector<TweetRecord> records;
    std::vector<ParseIssue> issues;
};

/// Parses line-delimited JSON tweet records with required string fields
/// id, author, timestamp (ISO-8601) and text, plus an optional mentions
/// field (comma-joined candidate ids). Malformed lines are reported as
/// issues and skipped; parsing continues. Input order is preserved.
inline ParseResult parse_tweet_stream(std::istream& in) {
    ParseResult result;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty()) continue;
        try {
            const nlohmann::json j = nlohmann::json::parse(line);
            if (!j.is_object()) throw DataError("record is not an object");
            TweetRecord rec;
            for (const char* field : {"id", "author", "timestamp", "text"}) {
                if (!j.contains(field) || !j.at(field).is_string()) {
                    throw DataError(std::string("missing or non-string field '") + field + "'");
                }
            }
            rec.id = j.at("id").get<std::string>();
            rec.author = j.at("author").get<std::string>();
            rec.text = j.at("text").get<std::string>();
            if (rec.id.empty()) throw DataError("empty id");
            if (rec.author.empty()) throw DataError("empty author");
            rec.timestamp = parse_iso8601(j.at("timestamp").get<std::string>());
            if (j.contains("mentions") && j.at("mentions").is_string()) {
                const std::string joined = j.at("mentions").get<std::string>();
                std::size_t start = 0;
                while (start <= joined.size() && !joined.empty()) {
                    const auto pos = joined.find(',', start);
                    const std::string part =
                        text::trim(std::string_view(joined).substr(start, pos - start));
                    if (!part.empty()) rec.mentions.push_back(part);
                    if (pos == std::string::npos) break;
                    start = pos + 1;
                }
            }
            result.records.push_back(std::move(rec));
        } catch (const std::exception& e) {
            result.issues.push_back({line_no, e.what()});
        }
    }
    return result;
}

inline ParseResult load_tweets(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open tweets file: " + path.string());
    return parse_tweet_stream(in);
}

/// Removes exact id duplicates and, per author, repeated tweets whose text
/// is identical after normalization (NFC, lowercase, whitespace collapse).
/// The earliest occurrence by (timestamp, id) wins. Output is sorted by
/// (timestamp, id).
inline std::vector<TweetRecord> dedup(std::vector<TweetRecord> records) {
    std::sort(records.begin(), records.end(), [](const TweetRecord& a, const TweetRecord& b) {
        if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
        return a.id < b.id;
    });
    std::vector<TweetRecord> kept;
    kept.reserve(records.size());
    std::unordered_set<std::string> seen_ids;
    std::set<std::pair<std::string, std::string>> seen_author_text;
    for (TweetRecord& rec : records) {
        if (!seen_ids.insert(rec.id).second) continue;
        if (!seen_author_text.emplace(rec.author, text::normalize(rec.text)).second) continue;
        kept.push_back(std::move(rec));
    }
    return kept;
}

/// Keeps records with start <= timestamp <= end (boundaries inclusive).
inline std::vector<TweetRecord> filter_window(std::vector<TweetRecord> records, Timestamp start,
                                              Timestamp end) {
    if (start > end) {
        throw ConfigError("window start " + format_iso8601(start) + " is after end " +
                          format_iso8601(end));
    }
    std::erase_if(records, [&](const TweetRecord& rec) {
        return rec.timestamp < start || rec.timestamp > end;
    });
    return records;
}

/// Fills mentions with the ids of every candidate whose name pattern occurs
/// case-insensitively in the text. Pure function of (text, specs).
inline TweetRecord tag_candidates(TweetRecord record, std::span<const CandidateSpec> specs) {
    const std::string haystack = text::normalize(record.text);
    record.mentions.clear();
    for (const CandidateSpec& spec : specs) {
        for (const std::string& pattern : spec.name_patterns) {
            if (haystack.find(text::normalize(pattern)) != std::string::npos) {
                record.mentions.push_back(spec.id);
                break;
            }
        }
    }
    return record;
}

inline std::vector<TweetRecord> tag_all(std::vector<TweetRecord> records,
                                        std::span<const CandidateSpec> specs) {
    for (TweetRecord& rec : records) rec = tag_candidates(std::move(rec), specs);
    return records;
}

/// One JSON record per line, mentions comma-joined, timestamps in canonical
/// UTC form. Field order is fixed so reruns are byte-identical.
inline void write_corpus(std::ostream& out, std::span<const TweetRecord> records) {
    for (const TweetRecord& rec : records) {
        nlohmann::ordered_json j;
        j["id"] = rec.id;
        j["author"] = rec.author;
        j["timestamp"] = format_iso8601(rec.timestamp);
        j["text"] = rec.text;
        std::string joined;
        for (const std::string& m : rec.mentions) {
            if (!joined.empty()) joined += ",";
            joined += m;
        }
        j["mentions"] = joined;
        out << j.dump() << "\n";
    }
}

inline void save_corpus(const std::filesystem::path& path,
                        std::span<const TweetRecord> records) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path.string());
    write_corpus(out, records);
}

} // namespace votecast
