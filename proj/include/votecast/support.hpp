#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "votecast/census.hpp"
#include "votecast/csv.hpp"
#include "votecast/errors.hpp"

namespace votecast {

enum class SupportFamily { geometric, arithmetic };

/// Weights used for the national mean constraint. `off_social_media`
/// weights each band by its population not active on social media, which is
/// the population whose party split is anchored to the previous election
/// result; `population` uses plain population weights.
enum class MeanWeighting { off_social_media, population };

inline const char* to_string(SupportFamily f) {
    return f == SupportFamily::geometric ? "geometric" : "arithmetic";
}
inline const char* to_string(MeanWeighting w) {
    return w == MeanWeighting::off_social_media ? "off_social_media" : "population";
}

inline SupportFamily support_family_from_string(const std::string& s) {
    if (s == "geometric") return SupportFamily::geometric;
    if (s == "arithmetic") return SupportFamily::arithmetic;
    throw ConfigError("unknown support family '" + s + "' (expected geometric or arithmetic)");
}
inline MeanWeighting weighting_from_string(const std::string& s) {
    if (s == "off_social_media") return MeanWeighting::off_social_media;
    if (s == "population") return MeanWeighting::population;
    throw ConfigError("unknown weighting '" + s +
                      "' (expected off_social_media or population)");
}

struct CurvePoint {
    std::string label;
    double value = 0.0;
};

/// Monotone per-band party-support curve over the voting-age bands,
/// youngest first.
struct SupportCurve {
    std::vector<CurvePoint> points;
    double target_mean = 0.0;
    SupportFamily family = SupportFamily::geometric;
    double family_param = 0.0; // ratio (geometric) or step (arithmetic)
    MeanWeighting weighting = MeanWeighting::off_social_media;
};

struct MonotoneReport {
    bool ok = true;
    std::size_t index = 0; // first offending point (or left point of the pair)
    std::string message;
};

// Strict inequalities carry a small margin so the feasible set stays closed
// for the numeric solver.
inline constexpr double kStrictMargin = 1e-9;
inline constexpr double kMeanTolerance = 1e-12;

/// Checks 0 < P < 1 (within margin) and strict increase across adjacent
/// bands; reports the first violation found.
inline MonotoneReport validate_monotone(const SupportCurve& curve) {
    MonotoneReport report;
    const auto& pts = curve.points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!(pts[i].value >= kStrictMargin && pts[i].value <= 1.0 - kStrictMargin)) {
            report.ok = false;
            report.index = i;
            report.message = "support for band '" + pts[i].label + "' is outside (0, 1)";
            return report;
        }
        if (i > 0 && pts[i].value - pts[i - 1].value < kStrictMargin) {
            report.ok = false;
            report.index = i - 1;
            report.message = "support does not strictly increase from band '" +
                             pts[i - 1].label + "' to '" + pts[i].label + "'";
            return report;
        }
    }
    return report;
}

namespace detail {

inline std::vector<double> mean_weights(const CensusTable& census, MeanWeighting weighting) {
    std::vector<double> w;
    for (const AgeBand& band : census.voting_bands()) {
        w.push_back(weighting == MeanWeighting::population ? band.pop_share
                                                           : off_twitter_share(band));
    }
    return w;
}

// Both families have the form P_i = a * gain_i + shift_i with gain_i > 0,
// so the weighted mean is strictly increasing in the scale a.
struct FamilyShape {
    std::vector<double> gain;
    std::vector<double> shift;
};

inline FamilyShape family_shape(SupportFamily family, double param, std::size_t n) {
    FamilyShape shape;
    shape.gain.resize(n);
    shape.shift.resize(n, 0.0);
    if (family == SupportFamily::geometric) {
        if (!(param > 1.0)) {
            throw InfeasibleError(
                "geometric ratio must exceed 1 for a strictly increasing curve (got " +
                std::to_string(param) + ")");
        }
        double g = 1.0;
        for (std::size_t i = 0; i < n; ++i, g *= param) shape.gain[i] = g;
    } else {
        if (!(param > 0.0)) {
            throw InfeasibleError(
                "arithmetic step must be positive for a strictly increasing curve (got " +
                std::to_string(param) + ")");
        }
        for (std::size_t i = 0; i < n; ++i) {
            shape.gain[i] = 1.0;
            shape.shift[i] = param * static_cast<double>(i);
        }
    }
    return shape;
}

} // namespace detail

/// Weighted mean of arbitrary curve points against census bands, using the
/// given weighting. Every point must name a voting-age census band.
inline double weighted_mean(std::span<const CurvePoint> points, const CensusTable& census,
                            MeanWeighting weighting) {
    double num = 0.0, den = 0.0;
    const auto voting = census.voting_bands();
    for (const CurvePoint& pt : points) {
        const AgeBand* band = nullptr;
        for (const AgeBand& b : voting) {
            if (b.label == pt.label) {
                band = &b;
                break;
            }
        }
        if (band == nullptr) {
            throw DataError("curve band '" + pt.label + "' is not a voting-age census band");
        }
        const double w = weighting == MeanWeighting::population ? band->pop_share
                                                                : off_twitter_share(*band);
        num += w * pt.value;
        den += w;
    }
    if (den <= 0.0) throw DataError("weighted mean is undefined: zero total weight");
    return num / den;
}

inline double weighted_mean(const SupportCurve& curve, const CensusTable& census) {
    return weighted_mean(curve.points, census, curve.weighting);
}

/// Solves for the support curve P_i = scale * gain_i + shift_i over the
/// voting-age bands, with the scale found by bisection so the weighted mean
/// hits `target_mean` to within kMeanTolerance. Throws InfeasibleError when
/// no curve within (0, 1) can reach the target, naming the violated bound.
inline SupportCurve solve_support(const CensusTable& census, double target_mean,
                                  SupportFamily family, double param,
                                  MeanWeighting weighting = MeanWeighting::off_social_media) {
    if (!(target_mean > 0.0 && target_mean < 1.0)) {
        throw ConfigError("target mean must lie strictly between 0 and 1");
    }
    const auto voting = census.voting_bands();
    const std::size_t n = voting.size();
    if (n == 0) throw DataError("census has no voting-age bands");

    const auto shape = detail::family_shape(family, param, n);
    const auto weights = detail::mean_weights(census, weighting);
    const double wsum = [&] {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }();
    if (wsum <= 0.0) throw DataError("census weights sum to zero; cannot anchor the mean");

    auto mean_at = [&](double scale) {
        double num = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            num += weights[i] * (scale * shape.gain[i] + shape.shift[i]);
        }
        return num / wsum;
    };

    // Scale bounds keeping every band inside (margin, 1 - margin). The top
    // band has the largest value in both families, the bottom the smallest.
    const double max_affine = shape.gain[n - 1]; // gain is non-decreasing
    const double scale_hi = (1.0 - kStrictMargin - shape.shift[n - 1]) / max_affine;
    const double scale_lo = kStrictMargin;
    if (scale_hi <= scale_lo) {
        throw InfeasibleError("family parameters force band '" +
                              std::string(voting[n - 1].label) +
                              "' to reach 1 before any feasible curve exists");
    }
    if (mean_at(scale_hi) < target_mean - kMeanTolerance) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "target mean %.6f unreachable: band '%s' hits the upper bound 1 at mean "
                      "%.6f",
                      target_mean, voting[n - 1].label.c_str(), mean_at(scale_hi));
        throw InfeasibleError(buf);
    }
    if (mean_at(scale_lo) > target_mean + kMeanTolerance) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "target mean %.6f unreachable: band '%s' hits the lower bound 0 at mean "
                      "%.6f",
                      target_mean, voting[0].label.c_str(), mean_at(scale_lo));
        throw InfeasibleError(buf);
    }

    double lo = scale_lo, hi = scale_hi;
    double mid = lo;
    for (int iter = 0; iter < 500; ++iter) {
        mid = 0.5 * (lo + hi);
        const double m = mean_at(mid);
        if (std::abs(m - target_mean) <= kMeanTolerance) break;
        if (m < target_mean) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (std::abs(mean_at(mid) - target_mean) > kMeanTolerance) {
        throw DataError("support solver failed to converge to the target mean");
    }

    SupportCurve curve;
    curve.target_mean = target_mean;
    curve.family = family;
    curve.family_param = param;
    curve.weighting = weighting;
    for (std::size_t i = 0; i < n; ++i) {
        curve.points.push_back({voting[i].label, mid * shape.gain[i] + shape.shift[i]});
    }
    const MonotoneReport report = validate_monotone(curve);
    if (!report.ok) throw InfeasibleError(report.message);
    return curve;
}

namespace detail {

// Shortest decimal form that parses back to the same double.
inline std::string round_trip_decimal(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

} // namespace detail

/// Support CSV: '#' metadata lines (family, param, target_mean, weighting)
/// followed by a band,support table with six-decimal support values.
inline void write_support_csv(std::ostream& out, const SupportCurve& curve) {
    char buf[64];
    out << "# family: " << to_string(curve.family) << "\n";
    out << "# param: " << detail::round_trip_decimal(curve.family_param) << "\n";
    out << "# target_mean: " << detail::round_trip_decimal(curve.target_mean) << "\n";
    out << "# weighting: " << to_string(curve.weighting) << "\n";
    out << "band,support\n";
    for (const CurvePoint& pt : curve.points) {
        std::snprintf(buf, sizeof(buf), "%.6f", pt.value);
        out << pt.label << "," << buf << "\n";
    }
}

inline void save_support_csv(const std::filesystem::path& path, const SupportCurve& curve) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path.string());
    write_support_csv(out, curve);
}

inline SupportCurve load_support_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path.string());

    SupportCurve curve;
    bool have_header = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string trimmed = text::trim(line);
        if (trimmed.empty()) continue;
        const std::string where = path.string() + " line " + std::to_string(line_no);
        if (trimmed.front() == '#') {
            const auto colon = trimmed.find(':');
            if (colon == std::string::npos) continue;
            const std::string key = text::trim(std::string_view(trimmed).substr(1, colon - 1));
            const std::string value = text::trim(std::string_view(trimmed).substr(colon + 1));
            if (key == "family") curve.family = support_family_from_string(value);
            if (key == "param") curve.family_param = csv::parse_number(value, where);
            if (key == "target_mean") curve.target_mean = csv::parse_number(value, where);
            if (key == "weighting") curve.weighting = weighting_from_string(value);
            continue;
        }
        const auto comma = trimmed.rfind(',');
        if (comma == std::string::npos) throw DataError(where + ": expected band,support");
        const std::string band = text::trim(std::string_view(trimmed).substr(0, comma));
        const std::string value = text::trim(std::string_view(trimmed).substr(comma + 1));
        if (!have_header) {
            if (band == "band" && value == "support") {
                have_header = true;
                continue;
            }
            throw DataError(where + ": expected header 'band,support'");
        }
        curve.points.push_back({band, csv::parse_number(value, where + " support")});
    }
    if (!have_header || curve.points.empty()) {
        throw DataError(path.string() + ": no support rows found");
    }
    const MonotoneReport report = validate_monotone(curve);
    if (!report.ok) throw DataError(path.string() + ": " + report.message);
    return curve;
}

} // namespace votecast
