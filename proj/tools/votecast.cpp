// votecast: census-corrected election forecasting from social-media
// sentiment. Subcommands mirror the pipeline stages:
//
//   ingest    raw tweets -> cleaned, deduplicated, tagged corpus
//   score     corpus (or injected values) -> per-candidate sentiment splits
//   estimate  census -> monotone per-band party-support curve
//   predict   census + curve + splits -> vote-share prediction report
//
// Exit codes: 0 success, 1 usage/configuration error, 2 data error.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "votecast/census.hpp"
#include "votecast/config.hpp"
#include "votecast/corpus.hpp"
#include "votecast/errors.hpp"
#include "votecast/projection.hpp"
#include "votecast/sentiment.hpp"
#include "votecast/support.hpp"

namespace {

namespace fs = std::filesystem;
using namespace votecast;

struct CommonOpts {
    std::string config_path;
    std::string out;
    bool verbose = false;
};

void add_common(CLI::App* sub, CommonOpts& opts, const std::string& default_out) {
    sub->add_option("--config", opts.config_path, "pipeline config file (JSON)")
        ->required();
    sub->add_option("--out", opts.out, "output path")
        ->default_val(default_out);
    sub->add_flag("--verbose", opts.verbose, "print progress details to stderr");
}

fs::path pick(const std::string& override_path, const fs::path& configured) {
    if (!override_path.empty()) return override_path;
    return configured;
}

void require_path(const fs::path& p, const char* what) {
    if (p.empty()) {
        throw ConfigError(std::string("no ") + what +
                          " file configured (set it in the config or pass the flag)");
    }
}

void report_issues(const std::vector<ParseIssue>& issues, const fs::path& file) {
    for (const ParseIssue& issue : issues) {
        std::cerr << "warning: " << file.string() << " line " << issue.line_no << ": "
                  << issue.message << "\n";
    }
}

CensusTable load_census_with_survey(const PipelineConfig& config,
                                    const std::string& census_override,
                                    const std::string& survey_override) {
    const fs::path census_path = pick(census_override, config.files.census);
    require_path(census_path, "census");
    CensusTable census = load_census(census_path, config.voting_floor);
    const fs::path survey_path = pick(survey_override, config.files.survey);
    if (!survey_path.empty()) apply_survey(census, survey_path);
    return census;
}

int run_ingest(const CommonOpts& opts, const std::string& tweets_override) {
    const PipelineConfig config = load_config(opts.config_path);
    if (!config.window) {
        throw ConfigError("ingest needs a 'window' in the config");
    }
    const fs::path tweets_path = pick(tweets_override, config.files.tweets);
    require_path(tweets_path, "tweets");

    ParseResult parsed = load_tweets(tweets_path);
    report_issues(parsed.issues, tweets_path);
    const std::size_t n_parsed = parsed.records.size();

    std::vector<TweetRecord> records = dedup(std::move(parsed.records));
    const std::size_t n_deduped = records.size();
    records = filter_window(std::move(records), config.window->start, config.window->end);
    const std::size_t n_windowed = records.size();
    records = tag_all(std::move(records), config.candidates);

    save_corpus(opts.out, records);
    if (opts.verbose) {
        std::cerr << "parsed " << n_parsed << " records (" << parsed.issues.size()
                  << " malformed lines), removed " << (n_parsed - n_deduped)
                  << " duplicates, " << (n_deduped - n_windowed)
                  << " outside the window\n";
    }
    std::cout << "wrote " << records.size() << " records to " << opts.out << "\n";
    return 0;
}

int run_score(const CommonOpts& opts, const std::string& corpus_path,
              const std::string& lexicon_override, const std::string& injection_override) {
    const PipelineConfig config = load_config(opts.config_path);

    std::vector<SentimentTally> tallies;
    const fs::path injection_path = pick(injection_override, config.files.sentiment_injection);
    if (!injection_path.empty()) {
        tallies = load_injection(injection_path, config.candidates);
        if (opts.verbose) {
            std::cerr << "using injected sentiment values from " << injection_path.string()
                      << "; corpus scoring skipped\n";
        }
    } else {
        if (!fs::exists(corpus_path)) {
            throw DataError("no corpus at '" + corpus_path +
                            "' and no sentiment injection configured; run ingest first");
        }
        const fs::path lexicon_path = pick(lexicon_override, config.files.lexicon);
        require_path(lexicon_path, "lexicon");
        const Lexicon lexicon = load_lexicon(lexicon_path);

        ParseResult parsed = load_tweets(corpus_path);
        report_issues(parsed.issues, corpus_path);
        std::vector<ScoredTweet> scored;
        scored.reserve(parsed.records.size());
        for (const TweetRecord& rec : parsed.records) {
            scored.push_back(
                {rec.id, rec.mentions, score_text(rec.text, lexicon, config.max_phrase_len)});
        }
        tallies = attribute(std::move(scored), config.candidates);
    }

    bool all_zero = true;
    for (const SentimentTally& t : tallies) all_zero = all_zero && t.value == 0.0;
    if (all_zero) {
        std::cerr << "warning: every candidate has zero sentiment; splits fall back to "
                     "equal shares within each group\n";
    }

    const std::vector<GroupSplit> splits = group_split(tallies, config.candidates);
    const std::vector<SentimentRecord> records =
        sentiment_records(tallies, splits, config.candidates);
    save_sentiment_csv(opts.out, records);
    std::cout << "wrote sentiment for " << records.size() << " candidates to " << opts.out
              << "\n";
    return 0;
}

int run_estimate(const CommonOpts& opts, const std::string& census_override,
                 const std::string& survey_override) {
    const PipelineConfig config = load_config(opts.config_path);
    const CensusTable census =
        load_census_with_survey(config, census_override, survey_override);
    const SupportCurve curve =
        solve_support(census, config.support.target_mean, config.support.family,
                      config.support.param, config.support.weighting);
    save_support_csv(opts.out, curve);
    if (opts.verbose) {
        std::cerr << "solved " << to_string(curve.family) << " curve, weighted mean "
                  << weighted_mean(curve, census) << "\n";
    }
    std::cout << "wrote support curve for " << curve.points.size() << " bands to " << opts.out
              << "\n";
    return 0;
}

int run_predict(const CommonOpts& opts, const std::string& census_override,
                const std::string& survey_override, const std::string& support_path,
                const std::string& sentiment_path, const std::string& actuals_override) {
    const PipelineConfig config = load_config(opts.config_path);
    const CensusTable census =
        load_census_with_survey(config, census_override, survey_override);
    const SupportCurve curve = load_support_csv(support_path);
    const std::vector<SentimentRecord> sentiment = load_sentiment_csv(sentiment_path);

    std::map<std::string, double> split_by_candidate;
    std::map<std::string, double> group_sums;
    for (const SentimentRecord& rec : sentiment) {
        const auto spec =
            std::find_if(config.candidates.begin(), config.candidates.end(),
                         [&](const CandidateSpec& c) { return c.id == rec.candidate; });
        if (spec == config.candidates.end()) {
            throw DataError(sentiment_path + ": candidate '" + rec.candidate +
                            "' is not in the config");
        }
        if (spec->group != rec.group) {
            throw DataError(sentiment_path + ": candidate '" + rec.candidate +
                            "' has group '" + rec.group + "' but the config says '" +
                            spec->group + "'");
        }
        if (!split_by_candidate.emplace(rec.candidate, rec.split).second) {
            throw DataError(sentiment_path + ": duplicate candidate '" + rec.candidate + "'");
        }
        group_sums[rec.group] += rec.split;
    }
    for (const CandidateSpec& spec : config.candidates) {
        if (split_by_candidate.find(spec.id) == split_by_candidate.end()) {
            throw DataError(sentiment_path + ": no sentiment row for candidate '" + spec.id +
                            "'");
        }
    }
    for (const auto& [group, sum] : group_sums) {
        if (std::abs(sum - 1.0) > 1e-6) {
            throw DataError(sentiment_path + ": splits for group '" + group +
                            "' sum to " + std::to_string(sum) + ", expected 1");
        }
    }

    PredictionReport report =
        project(census, curve, config.support.group, config.candidates, split_by_candidate);

    const fs::path actuals_path = pick(actuals_override, config.files.actuals);
    if (!actuals_path.empty()) {
        report = compare(std::move(report), load_actuals(actuals_path));
    }

    save_prediction_csv(opts.out, report);
    const OffTwitterTable party_table =
        off_twitter_party_table(census, curve, config.support.group, config.other_group());
    std::cout << render_summary(report, &party_table);
    std::cout << "wrote prediction report to " << opts.out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"census-corrected vote-share forecasting from tweet sentiment"};
    app.require_subcommand(1);

    CommonOpts ingest_opts, score_opts, estimate_opts, predict_opts;
    std::string tweets_override, lexicon_override, injection_override;
    std::string census_override, survey_override, actuals_override;
    std::string corpus_path = "corpus_clean.jsonl";
    std::string support_path = "support.csv";
    std::string sentiment_path = "sentiment.csv";
    int rc = 0;

    CLI::App* ingest = app.add_subcommand("ingest", "clean and tag a raw tweet file");
    add_common(ingest, ingest_opts, "corpus_clean.jsonl");
    ingest->add_option("--tweets", tweets_override, "raw tweets file (JSON lines)");
    ingest->callback([&] { rc = run_ingest(ingest_opts, tweets_override); });

    CLI::App* score = app.add_subcommand("score", "score the corpus against the lexicon");
    add_common(score, score_opts, "sentiment.csv");
    score->add_option("--corpus", corpus_path, "cleaned corpus from ingest")
        ->capture_default_str();
    score->add_option("--lexicon", lexicon_override, "lexicon TSV");
    score->add_option("--injection", injection_override,
                      "per-candidate sentiment values used instead of a corpus");
    score->callback(
        [&] { rc = run_score(score_opts, corpus_path, lexicon_override, injection_override); });

    CLI::App* estimate = app.add_subcommand("estimate", "solve the party-support curve");
    add_common(estimate, estimate_opts, "support.csv");
    estimate->add_option("--census", census_override, "census CSV");
    estimate->add_option("--survey", survey_override, "social-media survey CSV");
    estimate->callback(
        [&] { rc = run_estimate(estimate_opts, census_override, survey_override); });

    CLI::App* predict = app.add_subcommand("predict", "project vote shares");
    add_common(predict, predict_opts, "prediction.csv");
    predict->add_option("--census", census_override, "census CSV");
    predict->add_option("--survey", survey_override, "social-media survey CSV");
    predict->add_option("--support", support_path, "support curve from estimate")
        ->capture_default_str();
    predict->add_option("--sentiment", sentiment_path, "sentiment splits from score")
        ->capture_default_str();
    predict->add_option("--actuals", actuals_override, "actual results for comparison");
    predict->callback([&] {
        rc = run_predict(predict_opts, census_override, survey_override, support_path,
                         sentiment_path, actuals_override);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return rc;
}
