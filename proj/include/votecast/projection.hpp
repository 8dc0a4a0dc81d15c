#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "votecast/census.hpp"
#include "votecast/corpus.hpp"
#include "votecast/csv.hpp"
#include "votecast/errors.hpp"
#include "votecast/sentiment.hpp"
#include "votecast/support.hpp"

namespace votecast {

/// Per-band, per-candidate support decomposed into the three population
/// groups. All values are fractions of the national population; the total is
/// their sum and collapses algebraically to pop_share * party_share * split.
struct CandidateSupportCell {
    std::string band;
    std::string candidate;
    double twitter_part = 0.0;           // social-media population
    double nontwitter_online_part = 0.0; // online but not on social media
    double offline_part = 0.0;           // not online
    double total = 0.0;
};

struct CandidateResult {
    std::string candidate;
    double total_pop = 0.0; // T_c, fraction of national population
    double election = 0.0;  // normalized share of the vote
    double actual = std::numeric_limits<double>::quiet_NaN();
    double delta = std::numeric_limits<double>::quiet_NaN(); // predicted - actual
};

struct PredictionReport {
    std::vector<CandidateSupportCell> cells;
    std::vector<CandidateResult> totals;
    bool has_comparison = false;
    double mean_abs_error = std::numeric_limits<double>::quiet_NaN();
};

/// Per-band split of the not-on-social-media population between the two
/// party lines.
struct OffTwitterRow {
    std::string band;
    double share = 0.0; // off-twitter fraction of national population
    double curve_group = 0.0;
    double other_group = 0.0;
};

struct OffTwitterTable {
    std::string curve_group_id;
    std::string other_group_id;
    std::vector<OffTwitterRow> rows;
    double curve_group_total = 0.0;
    double other_group_total = 0.0;
};

namespace detail {

inline double curve_value(const SupportCurve& curve, const std::string& band_label) {
    for (const CurvePoint& pt : curve.points) {
        if (pt.label == band_label) return pt.value;
    }
    throw DataError("band '" + band_label + "' is not covered by the support curve");
}

} // namespace detail

/// Per-band support for one party line. In the two-group case the curve's
/// group carries the curve value and the other group its complement, so the
/// two lines sum to one in every band.
struct PartyLine {
    std::string group;
    std::vector<CurvePoint> band_share;
};

inline std::pair<PartyLine, PartyLine> party_lines(const SupportCurve& curve,
                                                   std::string curve_group,
                                                   std::string other_group) {
    PartyLine first{std::move(curve_group), curve.points};
    PartyLine second{std::move(other_group), {}};
    for (const CurvePoint& pt : curve.points) {
        second.band_share.push_back({pt.label, 1.0 - pt.value});
    }
    return {std::move(first), std::move(second)};
}

/// Support of one candidate within one band, split across the three
/// population groups. The candidate's party-line share is the curve value
/// for its own group and the complement for the other group.
inline CandidateSupportCell component_support(const AgeBand& band, const SupportCurve& curve,
                                              std::string_view curve_group,
                                              const CandidateSpec& candidate, double split) {
    if (!(split >= 0.0 && split <= 1.0)) {
        throw DataError("group split for candidate '" + candidate.id +
                        "' must lie in [0, 1]");
    }
    const double p = detail::curve_value(curve, band.label);
    const double party_share = candidate.group == curve_group ? p : 1.0 - p;
    const BandPartition parts = partition(band);
    const double factor = party_share * split;

    CandidateSupportCell cell;
    cell.band = band.label;
    cell.candidate = candidate.id;
    cell.twitter_part = parts.online_social * factor;
    cell.nontwitter_online_part = parts.online_nonsocial * factor;
    cell.offline_part = parts.offline * factor;
    cell.total = cell.twitter_part + cell.nontwitter_online_part + cell.offline_part;
    return cell;
}

/// Splits each voting band's off-twitter population between the party lines
/// using the support curve, mirroring how the previous election anchored the
/// curve's mean.
inline OffTwitterTable off_twitter_party_table(const CensusTable& census,
                                               const SupportCurve& curve,
                                               std::string curve_group_id,
                                               std::string other_group_id) {
    OffTwitterTable table;
    table.curve_group_id = std::move(curve_group_id);
    table.other_group_id = std::move(other_group_id);
    for (const CurvePoint& pt : curve.points) {
        const AgeBand* band = census.find(pt.label);
        if (band == nullptr) {
            throw DataError("curve band '" + pt.label + "' not present in census");
        }
        OffTwitterRow row;
        row.band = pt.label;
        row.share = off_twitter_share(*band);
        row.curve_group = row.share * pt.value;
        row.other_group = row.share * (1.0 - pt.value);
        table.curve_group_total += row.curve_group;
        table.other_group_total += row.other_group;
        table.rows.push_back(std::move(row));
    }
    return table;
}

namespace detail {

// Single aggregation path: cells are summed in canonical (band, candidate)
// order so any permutation of the input yields bit-identical totals.
inline std::vector<CandidateResult> aggregate_totals(std::vector<CandidateSupportCell>& cells) {
    std::sort(cells.begin(), cells.end(),
              [](const CandidateSupportCell& a, const CandidateSupportCell& b) {
                  if (a.band != b.band) return a.band < b.band;
                  return a.candidate < b.candidate;
              });
    std::vector<CandidateResult> totals;
    for (const CandidateSupportCell& cell : cells) {
        auto it = std::find_if(totals.begin(), totals.end(), [&](const CandidateResult& r) {
            return r.candidate == cell.candidate;
        });
        if (it == totals.end()) {
            totals.push_back({cell.candidate, 0.0, 0.0,
                              std::numeric_limits<double>::quiet_NaN(),
                              std::numeric_limits<double>::quiet_NaN()});
            it = std::prev(totals.end());
        }
        it->total_pop += cell.total;
    }
    std::sort(totals.begin(), totals.end(),
              [](const CandidateResult& a, const CandidateResult& b) {
                  return a.candidate < b.candidate;
              });
    double grand = 0.0;
    for (const CandidateResult& r : totals) grand += r.total_pop;
    if (grand <= 0.0) {
        throw DataError("all candidate totals are zero; election shares are undefined");
    }
    for (CandidateResult& r : totals) r.election = r.total_pop / grand;
    return totals;
}

} // namespace detail

/// Consolidates per-(band, candidate) cells into national totals T_c and
/// normalized election shares. Input order does not matter.
inline PredictionReport total_support(std::vector<CandidateSupportCell> cells) {
    PredictionReport report;
    report.totals = detail::aggregate_totals(cells);
    report.cells = std::move(cells);
    return report;
}

/// Full projection over every voting band and candidate, with cells and
/// totals ordered for presentation (census band order, candidate spec
/// order). Numbers are identical to total_support over the same cells.
inline PredictionReport project(const CensusTable& census, const SupportCurve& curve,
                                const std::string& curve_group,
                                std::span<const CandidateSpec> specs,
                                const std::map<std::string, double>& split_by_candidate) {
    std::vector<std::string> groups;
    for (const CandidateSpec& spec : specs) {
        if (std::find(groups.begin(), groups.end(), spec.group) == groups.end()) {
            groups.push_back(spec.group);
        }
    }
    if (groups.size() > 2) {
        throw DataError("party-line projection supports at most two groups, found " +
                        std::to_string(groups.size()));
    }
    if (std::find(groups.begin(), groups.end(), curve_group) == groups.end()) {
        throw DataError("support-curve group '" + curve_group +
                        "' does not match any candidate group");
    }

    std::vector<CandidateSupportCell> cells;
    for (const AgeBand& band : census.voting_bands()) {
        for (const CandidateSpec& spec : specs) {
            const auto it = split_by_candidate.find(spec.id);
            if (it == split_by_candidate.end()) {
                throw DataError("no group split for candidate '" + spec.id + "'");
            }
            cells.push_back(component_support(band, curve, curve_group, spec, it->second));
        }
    }

    std::vector<CandidateSupportCell> canonical = cells;
    std::vector<CandidateResult> totals = detail::aggregate_totals(canonical);

    PredictionReport report;
    report.cells = std::move(cells);
    for (const CandidateSpec& spec : specs) {
        const auto it = std::find_if(totals.begin(), totals.end(), [&](const CandidateResult& r) {
            return r.candidate == spec.id;
        });
        report.totals.push_back(*it);
    }
    return report;
}

inline PredictionReport project(const CensusTable& census, const SupportCurve& curve,
                                const std::string& curve_group,
                                std::span<const CandidateSpec> specs,
                                std::span<const GroupSplit> splits) {
    std::map<std::string, double> by_candidate;
    for (const GroupSplit& g : splits) {
        for (const auto& [candidate, share] : g.splits) by_candidate[candidate] = share;
    }
    return project(census, curve, curve_group, specs, by_candidate);
}

/// Attaches actual results (fractions) and per-candidate deltas; the mean
/// absolute error is over all candidates. Every candidate must have an
/// actual value.
inline PredictionReport compare(PredictionReport report,
                                const std::map<std::string, double>& actuals) {
    double abs_sum = 0.0;
    for (CandidateResult& r : report.totals) {
        const auto it = actuals.find(r.candidate);
        if (it == actuals.end()) {
            throw DataError("no actual result for candidate '" + r.candidate + "'");
        }
        r.actual = it->second;
        r.delta = r.election - r.actual;
        abs_sum += std::abs(r.delta);
    }
    if (report.totals.empty()) throw DataError("cannot compare an empty report");
    report.has_comparison = true;
    report.mean_abs_error = abs_sum / static_cast<double>(report.totals.size());
    return report;
}

/// Actuals CSV: header candidate,actual_pct; values in percent.
inline std::map<std::string, double> load_actuals(const std::filesystem::path& path) {
    const auto rows = csv::read_file(path);
    if (rows.empty()) throw DataError(path.string() + ": empty actuals file");
    const auto& header = rows.front().fields;
    if (header.size() < 2 || header[0] != "candidate" || header[1] != "actual_pct") {
        throw DataError(path.string() + ": expected header candidate,actual_pct");
    }
    std::map<std::string, double> actuals;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const std::string where = path.string() + " row " + std::to_string(row.line_no);
        if (row.fields.size() < 2) throw DataError(where + ": too few columns");
        if (!actuals.emplace(row.fields[0], csv::parse_percent(row.fields[1], where)).second) {
            throw DataError(where + ": duplicate candidate '" + row.fields[0] + "'");
        }
    }
    return actuals;
}

/// Prediction CSV: one row per (band, candidate) with the three parts and
/// the total, all in percent of national population, followed by footer
/// rows (TOTAL, ELECTION and, with a comparison, ACTUAL/DELTA/MAE).
inline void write_prediction_csv(std::ostream& out, const PredictionReport& report) {
    char buf[128];
    out << "band,candidate,offline_pct,online_nonsocial_pct,online_social_pct,total_pct\n";
    for (const CandidateSupportCell& cell : report.cells) {
        std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f", 100.0 * cell.offline_part,
                      100.0 * cell.nontwitter_online_part, 100.0 * cell.twitter_part,
                      100.0 * cell.total);
        out << cell.band << "," << cell.candidate << "," << buf << "\n";
    }
    for (const CandidateResult& r : report.totals) {
        std::snprintf(buf, sizeof(buf), "%.6f", 100.0 * r.total_pop);
        out << "TOTAL," << r.candidate << ",,,," << buf << "\n";
    }
    for (const CandidateResult& r : report.totals) {
        std::snprintf(buf, sizeof(buf), "%.6f", 100.0 * r.election);
        out << "ELECTION," << r.candidate << ",,,," << buf << "\n";
    }
    if (report.has_comparison) {
        for (const CandidateResult& r : report.totals) {
            std::snprintf(buf, sizeof(buf), "%.6f", 100.0 * r.actual);
            out << "ACTUAL," << r.candidate << ",,,," << buf << "\n";
        }
        for (const CandidateResult& r : report.totals) {
            std::snprintf(buf, sizeof(buf), "%.6f", 100.0 * r.delta);
            out << "DELTA," << r.candidate << ",,,," << buf << "\n";
        }
        std::snprintf(buf, sizeof(buf), "%.6f", 100.0 * report.mean_abs_error);
        out << "MAE,,,,," << buf << "\n";
    }
}

inline void save_prediction_csv(const std::filesystem::path& path,
                                const PredictionReport& report) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path.string());
    write_prediction_csv(out, report);
}

/// Human-readable summary in the style of the published tables: per-band
/// off-twitter/on-twitter/overall support per candidate, national totals,
/// election shares and, when present, the comparison against actuals.
/// Display rounding happens only here.
inline std::string render_summary(const PredictionReport& report,
                                  const OffTwitterTable* party_table = nullptr) {
    std::string out;
    char buf[160];
    std::vector<std::string> candidates;
    for (const CandidateResult& r : report.totals) candidates.push_back(r.candidate);

    auto cell_of = [&](const std::string& band,
                       const std::string& candidate) -> const CandidateSupportCell* {
        for (const CandidateSupportCell& c : report.cells) {
            if (c.band == band && c.candidate == candidate) return &c;
        }
        return nullptr;
    };
    std::vector<std::string> bands;
    for (const CandidateSupportCell& c : report.cells) {
        if (std::find(bands.begin(), bands.end(), c.band) == bands.end()) {
            bands.push_back(c.band);
        }
    }

    out += "Estimated support, % of national population\n\n";
    std::snprintf(buf, sizeof(buf), "%-12s", "Age Group");
    out += buf;
    for (const char* section : {"Offline", "Online", "Overall"}) {
        std::snprintf(buf, sizeof(buf), " | %-*s", static_cast<int>(candidates.size() * 7 - 1),
                      section);
        out += buf;
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += "\n";
    std::snprintf(buf, sizeof(buf), "%-12s", "");
    out += buf;
    for (int s = 0; s < 3; ++s) {
        out += " |";
        for (const std::string& c : candidates) {
            std::snprintf(buf, sizeof(buf), " %6s", c.c_str());
            out += buf;
        }
    }
    out += "\n";
    for (const std::string& band : bands) {
        std::snprintf(buf, sizeof(buf), "%-12s", band.c_str());
        out += buf;
        for (int section = 0; section < 3; ++section) {
            out += " |";
            for (const std::string& candidate : candidates) {
                const CandidateSupportCell* cell = cell_of(band, candidate);
                double v = 0.0;
                if (cell != nullptr) {
                    if (section == 0) v = cell->offline_part + cell->nontwitter_online_part;
                    if (section == 1) v = cell->twitter_part;
                    if (section == 2) v = cell->total;
                }
                std::snprintf(buf, sizeof(buf), " %5.2f%%", 100.0 * v);
                out += buf;
            }
        }
        out += "\n";
    }

    out += "\n";
    std::snprintf(buf, sizeof(buf), "%-14s", "Total Pop %");
    out += buf;
    for (const CandidateResult& r : report.totals) {
        std::snprintf(buf, sizeof(buf), " %s %6.2f%%", r.candidate.c_str(),
                      100.0 * r.total_pop);
        out += buf;
    }
    out += "\n";
    std::snprintf(buf, sizeof(buf), "%-14s", "Election %");
    out += buf;
    for (const CandidateResult& r : report.totals) {
        std::snprintf(buf, sizeof(buf), " %s %6.1f%%", r.candidate.c_str(),
                      100.0 * r.election);
        out += buf;
    }
    out += "\n";

    if (party_table != nullptr) {
        out += "\nOff-twitter population by party line, % of national population\n\n";
        std::snprintf(buf, sizeof(buf), "%-12s %10s %10s\n", "Age Group",
                      party_table->curve_group_id.c_str(), party_table->other_group_id.c_str());
        out += buf;
        for (const OffTwitterRow& row : party_table->rows) {
            std::snprintf(buf, sizeof(buf), "%-12s %9.1f%% %9.1f%%\n", row.band.c_str(),
                          100.0 * row.curve_group, 100.0 * row.other_group);
            out += buf;
        }
        std::snprintf(buf, sizeof(buf), "%-12s %9.1f%% %9.1f%%\n", "Total",
                      100.0 * party_table->curve_group_total,
                      100.0 * party_table->other_group_total);
        out += buf;
    }

    if (report.has_comparison) {
        out += "\nComparison against actual results\n\n";
        std::snprintf(buf, sizeof(buf), "%-8s %10s %10s %10s\n", "", "Predicted", "Actual",
                      "Delta");
        out += buf;
        for (const CandidateResult& r : report.totals) {
            std::snprintf(buf, sizeof(buf), "%-8s %9.2f%% %9.2f%% %+9.2fpp\n",
                          r.candidate.c_str(), 100.0 * r.election, 100.0 * r.actual,
                          100.0 * r.delta);
            out += buf;
        }
        std::snprintf(buf, sizeof(buf), "Mean absolute error: %.2fpp\n",
                      100.0 * report.mean_abs_error);
        out += buf;
    }
    return out;
}

} // namespace votecast
