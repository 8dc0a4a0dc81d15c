#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "votecast/corpus.hpp"
#include "votecast/csv.hpp"
#include "votecast/errors.hpp"
#include "votecast/text.hpp"

namespace votecast {

/// Term -> polarity weight table. Terms are stored in canonical form
/// (NFC, lowercase, single-spaced); multiword phrases are keyed by their
/// space-joined token form.
struct Lexicon {
    std::unordered_map<std::string, double> entries;

    void add(std::string_view term, double weight) {
        const std::string key = text::normalize(term);
        if (key.empty()) throw DataError("empty lexicon term");
        if (!std::isfinite(weight)) throw DataError("non-finite weight for term '" + key + "'");
        entries[key] = weight;
    }
};

/// Loads a tab-separated lexicon: term<TAB>weight, UTF-8, '#' comment lines
/// ignored. Terms may contain spaces. A repeated term keeps its last weight.
inline Lexicon load_lexicon(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open lexicon file: " + path.string());
    Lexicon lex;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string trimmed = text::trim(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;
        const std::string where = path.string() + " line " + std::to_string(line_no);
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw DataError(where + ": expected term<TAB>weight");
        }
        const std::string term = text::trim(std::string_view(line).substr(0, tab));
        const std::string weight = text::trim(std::string_view(line).substr(tab + 1));
        if (term.empty()) throw DataError(where + ": empty term");
        lex.add(term, csv::parse_number(weight, where + " weight"));
    }
    return lex;
}

/// Sums the weights of matched lexicon entries over a token stream. Phrases
/// are matched greedily, longest first, left to right; each token is
/// consumed by at most one match.
inline double score_tokens(std::span<const std::string> tokens, const Lexicon& lexicon,
                           int max_phrase_len) {
    if (max_phrase_len < 1) throw ConfigError("max phrase length must be at least 1");
    double score = 0.0;
    std::size_t i = 0;
    while (i < tokens.size()) {
        std::size_t consumed = 0;
        const std::size_t longest =
            std::min<std::size_t>(static_cast<std::size_t>(max_phrase_len), tokens.size() - i);
        for (std::size_t len = longest; len >= 1; --len) {
            std::string phrase;
            for (std::size_t k = 0; k < len; ++k) {
                if (k > 0) phrase += ' ';
                phrase += tokens[i + k];
            }
            const auto it = lexicon.entries.find(phrase);
            if (it != lexicon.entries.end()) {
                score += it->second;
                consumed = len;
                break;
            }
        }
        i += consumed > 0 ? consumed : 1;
    }
    return score;
}

inline double score_text(std::string_view raw, const Lexicon& lexicon, int max_phrase_len) {
    const std::vector<std::string> tokens = text::tokenize(raw);
    return score_tokens(tokens, lexicon, max_phrase_len);
}

struct ScoredTweet {
    std::string id;
    std::vector<std::string> mentions;
    double score = 0.0;
};

struct SentimentTally {
    std::string candidate;
    double value = 0.0; // aggregated sentiment, floored at zero
    long tweet_count = 0;
};

struct GroupSplit {
    std::string group;
    std::vector<std::pair<std::string, double>> splits; // candidate -> share of group
};

/// Accrues each tweet's score to every mentioned candidate. Tweets with no
/// mentions carry no signal and tweets endorsing every candidate carry no
/// discriminating signal; both are dropped. Values are floored at zero.
/// Contributions are summed in record-id order, so the result is identical
/// under any permutation of the input.
inline std::vector<SentimentTally> attribute(std::vector<ScoredTweet> records,
                                             std::span<const CandidateSpec> specs) {
    std::sort(records.begin(), records.end(),
              [](const ScoredTweet& a, const ScoredTweet& b) { return a.id < b.id; });

    std::unordered_map<std::string, std::size_t> index;
    std::vector<SentimentTally> tallies;
    for (const CandidateSpec& spec : specs) {
        index.emplace(spec.id, tallies.size());
        tallies.push_back({spec.id, 0.0, 0});
    }

    std::vector<double> sums(tallies.size(), 0.0);
    std::vector<std::size_t> mentioned;
    for (const ScoredTweet& rec : records) {
        mentioned.clear();
        for (const std::string& candidate : rec.mentions) {
            const auto it = index.find(candidate);
            if (it == index.end()) {
                throw DataError("tweet '" + rec.id + "' mentions unknown candidate '" +
                                candidate + "'");
            }
            if (std::find(mentioned.begin(), mentioned.end(), it->second) == mentioned.end()) {
                mentioned.push_back(it->second);
            }
        }
        if (mentioned.empty() || mentioned.size() == specs.size()) continue;
        for (const std::size_t slot : mentioned) {
            sums[slot] += rec.score;
            ++tallies[slot].tweet_count;
        }
    }
    for (std::size_t i = 0; i < tallies.size(); ++i) {
        tallies[i].value = std::max(sums[i], 0.0);
    }
    return tallies;
}

/// Within each group, a candidate's split is its share of the group's total
/// sentiment value; a group with zero total splits equally.
inline std::vector<GroupSplit> group_split(std::span<const SentimentTally> tallies,
                                           std::span<const CandidateSpec> specs) {
    std::unordered_map<std::string, double> value;
    for (const SentimentTally& t : tallies) value[t.candidate] = t.value;

    std::vector<GroupSplit> groups;
    for (const CandidateSpec& spec : specs) {
        const auto it = value.find(spec.id);
        if (it == value.end()) {
            throw DataError("no sentiment tally for candidate '" + spec.id + "'");
        }
        auto group = std::find_if(groups.begin(), groups.end(),
                                  [&](const GroupSplit& g) { return g.group == spec.group; });
        if (group == groups.end()) {
            groups.push_back({spec.group, {}});
            group = std::prev(groups.end());
        }
        group->splits.emplace_back(spec.id, it->second);
    }
    for (GroupSplit& g : groups) {
        double total = 0.0;
        for (const auto& [candidate, v] : g.splits) total += v;
        for (auto& [candidate, v] : g.splits) {
            v = total > 0.0 ? v / total : 1.0 / static_cast<double>(g.splits.size());
        }
    }
    return groups;
}

/// Raw per-candidate sentiment values accepted in place of a corpus:
/// one CANDIDATE=VALUE per line, '#' comments ignored. Every configured
/// candidate must appear. Values are floored at zero like corpus tallies.
inline std::vector<SentimentTally> load_injection(const std::filesystem::path& path,
                                                  std::span<const CandidateSpec> specs) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open sentiment injection file: " + path.string());
    std::unordered_map<std::string, double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string trimmed = text::trim(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;
        const std::string where = path.string() + " line " + std::to_string(line_no);
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos) throw DataError(where + ": expected CANDIDATE=VALUE");
        const std::string candidate = text::trim(std::string_view(trimmed).substr(0, eq));
        const std::string value = text::trim(std::string_view(trimmed).substr(eq + 1));
        if (!values.emplace(candidate, csv::parse_number(value, where + " value")).second) {
            throw DataError(where + ": duplicate candidate '" + candidate + "'");
        }
    }
    std::vector<SentimentTally> tallies;
    for (const CandidateSpec& spec : specs) {
        const auto it = values.find(spec.id);
        if (it == values.end()) {
            throw DataError(path.string() + ": no value for candidate '" + spec.id + "'");
        }
        tallies.push_back({spec.id, std::max(it->second, 0.0), 0});
        values.erase(it);
    }
    if (!values.empty()) {
        throw DataError(path.string() + ": unknown candidate '" + values.begin()->first + "'");
    }
    return tallies;
}

struct SentimentRecord {
    std::string candidate;
    std::string group;
    double value = 0.0;
    long tweet_count = 0;
    double split = 0.0; // E_c, share of the candidate's group
};

inline std::vector<SentimentRecord> sentiment_records(std::span<const SentimentTally> tallies,
                                                      std::span<const GroupSplit> groups,
                                                      std::span<const CandidateSpec> specs) {
    std::vector<SentimentRecord> records;
    for (const CandidateSpec& spec : specs) {
        SentimentRecord rec;
        rec.candidate = spec.id;
        rec.group = spec.group;
        for (const SentimentTally& t : tallies) {
            if (t.candidate == spec.id) {
                rec.value = t.value;
                rec.tweet_count = t.tweet_count;
            }
        }
        bool found = false;
        for (const GroupSplit& g : groups) {
            for (const auto& [candidate, share] : g.splits) {
                if (candidate == spec.id) {
                    rec.split = share;
                    found = true;
                }
            }
        }
        if (!found) throw DataError("no group split for candidate '" + spec.id + "'");
        records.push_back(std::move(rec));
    }
    return records;
}

inline void write_sentiment_csv(std::ostream& out, std::span<const SentimentRecord> records) {
    out << "candidate,group,value,tweet_count,split\n";
    char buf[64];
    for (const SentimentRecord& rec : records) {
        std::snprintf(buf, sizeof(buf), "%.6f", rec.value);
        out << rec.candidate << "," << rec.group << "," << buf << "," << rec.tweet_count;
        std::snprintf(buf, sizeof(buf), "%.9f", rec.split);
        out << "," << buf << "\n";
    }
}

inline void save_sentiment_csv(const std::filesystem::path& path,
                               std::span<const SentimentRecord> records) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path.string());
    write_sentiment_csv(out, records);
}

inline std::vector<SentimentRecord> load_sentiment_csv(const std::filesystem::path& path) {
    const auto rows = csv::read_file(path);
    if (rows.empty()) throw DataError(path.string() + ": empty sentiment file");
    const auto& header = rows.front().fields;
    if (header.size() < 5 || header[0] != "candidate" || header[1] != "group" ||
        header[2] != "value" || header[3] != "tweet_count" || header[4] != "split") {
        throw DataError(path.string() + ": expected header candidate,group,value,tweet_count,split");
    }
    std::vector<SentimentRecord> records;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const std::string where = path.string() + " row " + std::to_string(row.line_no);
        if (row.fields.size() < 5) throw DataError(where + ": too few columns");
        SentimentRecord rec;
        rec.candidate = row.fields[0];
        rec.group = row.fields[1];
        rec.value = csv::parse_number(row.fields[2], where + " value");
        rec.tweet_count = static_cast<long>(csv::parse_number(row.fields[3], where + " count"));
        rec.split = csv::parse_number(row.fields[4], where + " split");
        if (rec.split < 0.0 || rec.split > 1.0) {
            throw DataError(where + ": split must lie in [0, 1]");
        }
        records.push_back(std::move(rec));
    }
    if (records.empty()) throw DataError(path.string() + ": no sentiment rows");
    return records;
}

} // namespace votecast
