#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "votecast/corpus.hpp"
#include "votecast/datetime.hpp"
#include "votecast/errors.hpp"
#include "votecast/support.hpp"

namespace votecast {

struct WindowConfig {
    Timestamp start{};
    Timestamp end{};
};

struct SolverConfig {
    double target_mean = 0.60;
    SupportFamily family = SupportFamily::geometric;
    double param = 1.0617; // ratio (geometric) or step (arithmetic)
    MeanWeighting weighting = MeanWeighting::off_social_media;
    std::string group; // the group whose per-band share the curve gives
};

struct ConfigPaths {
    std::filesystem::path tweets;
    std::filesystem::path lexicon;
    std::filesystem::path census;
    std::filesystem::path survey;
    std::filesystem::path actuals;
    std::filesystem::path sentiment_injection;
};

struct PipelineConfig {
    std::vector<CandidateSpec> candidates;
    std::optional<WindowConfig> window;
    SolverConfig support;
    std::string voting_floor = "20 - 24";
    int max_phrase_len = 3;
    ConfigPaths files;
    std::filesystem::path base_dir;

    std::vector<std::string> group_ids() const {
        std::vector<std::string> ids;
        for (const CandidateSpec& c : candidates) {
            if (std::find(ids.begin(), ids.end(), c.group) == ids.end()) {
                ids.push_back(c.group);
            }
        }
        return ids;
    }

    std::string other_group() const {
        for (const std::string& g : group_ids()) {
            if (g != support.group) return g;
        }
        throw ConfigError("no opposing group configured");
    }
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, const char* where,
                                std::initializer_list<const char*> known) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find_if(known.begin(), known.end(),
                         [&](const char* k) { return key == k; }) == known.end()) {
            throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
        }
    }
}

inline bool valid_identifier(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) != 0 || c == '_' || c == '-';
    });
}

} // namespace detail

/// Loads and validates the pipeline configuration. Relative file paths are
/// resolved against the config file's directory. Every structural problem is
/// reported as a ConfigError with the offending key.
inline PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const std::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    detail::reject_unknown_keys(j, "config",
                                {"candidates", "window", "support", "voting_floor",
                                 "max_phrase_len", "files"});

    PipelineConfig config;
    config.base_dir = path.has_parent_path() ? path.parent_path() : ".";

    if (!j.contains("candidates") || !j["candidates"].is_array() || j["candidates"].empty()) {
        throw ConfigError("config: 'candidates' must be a non-empty array");
    }
    for (const auto& c : j["candidates"]) {
        if (!c.is_object()) throw ConfigError("config: candidate entries must be objects");
        detail::reject_unknown_keys(c, "candidate", {"id", "group", "name_patterns"});
        CandidateSpec spec;
        if (!c.contains("id") || !c["id"].is_string() ||
            !detail::valid_identifier(c["id"].get<std::string>())) {
            throw ConfigError("config: every candidate needs an alphanumeric 'id'");
        }
        spec.id = c["id"].get<std::string>();
        if (!c.contains("group") || !c["group"].is_string() ||
            !detail::valid_identifier(c["group"].get<std::string>())) {
            throw ConfigError("config: candidate '" + spec.id +
                              "' needs an alphanumeric 'group'");
        }
        spec.group = c["group"].get<std::string>();
        if (!c.contains("name_patterns") || !c["name_patterns"].is_array() ||
            c["name_patterns"].empty()) {
            throw ConfigError("config: candidate '" + spec.id +
                              "' needs a non-empty 'name_patterns' array");
        }
        for (const auto& p : c["name_patterns"]) {
            if (!p.is_string() || p.get<std::string>().empty()) {
                throw ConfigError("config: candidate '" + spec.id +
                                  "' has an empty name pattern");
            }
            spec.name_patterns.push_back(p.get<std::string>());
        }
        for (const CandidateSpec& existing : config.candidates) {
            if (existing.id == spec.id) {
                throw ConfigError("config: duplicate candidate id '" + spec.id + "'");
            }
        }
        config.candidates.push_back(std::move(spec));
    }
    if (config.group_ids().size() != 2) {
        throw ConfigError("config: the party-line model needs exactly two candidate groups, "
                          "found " + std::to_string(config.group_ids().size()));
    }

    if (j.contains("window")) {
        const auto& w = j["window"];
        if (!w.is_object() || !w.contains("start") || !w.contains("end")) {
            throw ConfigError("config: 'window' needs 'start' and 'end'");
        }
        detail::reject_unknown_keys(w, "window", {"start", "end"});
        WindowConfig window;
        try {
            const ParsedInstant start = parse_instant(w["start"].get<std::string>());
            const ParsedInstant end = parse_instant(w["end"].get<std::string>());
            window.start = start.value;
            window.end = end.value;
            // A date-only end means the whole day is inside the window.
            if (end.date_only) {
                window.end += std::chrono::hours{23} + std::chrono::minutes{59} +
                              std::chrono::seconds{59};
            }
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config window: ") + e.what());
        }
        if (window.start > window.end) {
            throw ConfigError("config: window start is after window end");
        }
        config.window = window;
    }

    if (j.contains("support")) {
        const auto& s = j["support"];
        if (!s.is_object()) throw ConfigError("config: 'support' must be an object");
        detail::reject_unknown_keys(
            s, "support", {"target_mean", "family", "ratio", "step", "group", "weighting"});
        if (s.contains("target_mean")) {
            if (!s["target_mean"].is_number()) {
                throw ConfigError("config support: 'target_mean' must be a number");
            }
            config.support.target_mean = s["target_mean"].get<double>();
        }
        if (s.contains("family")) {
            config.support.family = support_family_from_string(s["family"].get<std::string>());
        }
        if (config.support.family == SupportFamily::geometric) {
            if (s.contains("step")) {
                throw ConfigError("config support: 'step' only applies to the arithmetic family");
            }
            if (s.contains("ratio")) config.support.param = s["ratio"].get<double>();
            if (!(config.support.param > 1.0)) {
                throw ConfigError("config support: geometric 'ratio' must exceed 1");
            }
        } else {
            if (s.contains("ratio")) {
                throw ConfigError("config support: 'ratio' only applies to the geometric family");
            }
            if (!s.contains("step")) {
                throw ConfigError("config support: the arithmetic family needs a 'step'");
            }
            config.support.param = s["step"].get<double>();
            if (!(config.support.param > 0.0)) {
                throw ConfigError("config support: arithmetic 'step' must be positive");
            }
        }
        if (s.contains("weighting")) {
            config.support.weighting = weighting_from_string(s["weighting"].get<std::string>());
        }
        if (s.contains("group")) config.support.group = s["group"].get<std::string>();
    }
    if (!(config.support.target_mean > 0.0 && config.support.target_mean < 1.0)) {
        throw ConfigError("config support: 'target_mean' must lie strictly between 0 and 1");
    }
    if (config.support.group.empty()) {
        throw ConfigError("config support: 'group' must name the group the curve estimates");
    }
    {
        const auto groups = config.group_ids();
        if (std::find(groups.begin(), groups.end(), config.support.group) == groups.end()) {
            throw ConfigError("config support: group '" + config.support.group +
                              "' does not match any candidate group");
        }
    }

    if (j.contains("voting_floor")) {
        if (!j["voting_floor"].is_string() || j["voting_floor"].get<std::string>().empty()) {
            throw ConfigError("config: 'voting_floor' must be a band label");
        }
        config.voting_floor = j["voting_floor"].get<std::string>();
    }
    if (j.contains("max_phrase_len")) {
        if (!j["max_phrase_len"].is_number_integer() || j["max_phrase_len"].get<int>() < 1) {
            throw ConfigError("config: 'max_phrase_len' must be a positive integer");
        }
        config.max_phrase_len = j["max_phrase_len"].get<int>();
    }

    if (j.contains("files")) {
        const auto& f = j["files"];
        if (!f.is_object()) throw ConfigError("config: 'files' must be an object");
        detail::reject_unknown_keys(f, "files",
                                    {"tweets", "lexicon", "census", "survey", "actuals",
                                     "sentiment_injection"});
        auto resolve = [&](const char* key) -> std::filesystem::path {
            if (!f.contains(key)) return {};
            if (!f[key].is_string() || f[key].get<std::string>().empty()) {
                throw ConfigError(std::string("config files: '") + key +
                                  "' must be a non-empty path");
            }
            std::filesystem::path p = f[key].get<std::string>();
            return p.is_relative() ? config.base_dir / p : p;
        };
        config.files.tweets = resolve("tweets");
        config.files.lexicon = resolve("lexicon");
        config.files.census = resolve("census");
        config.files.survey = resolve("survey");
        config.files.actuals = resolve("actuals");
        config.files.sentiment_injection = resolve("sentiment_injection");
    }
    return config;
}

} // namespace votecast
