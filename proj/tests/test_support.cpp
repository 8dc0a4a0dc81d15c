#include <cmath>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "reference_data.hpp"
#include "testutil.hpp"
#include "votecast/support.hpp"

using namespace votecast;
using Catch::Approx;

namespace {

CensusTable reference_census() {
    CensusTable census = load_census(testutil::data_file("census_sg2010.csv"));
    apply_survey(census, testutil::data_file("survey_social_media_2011.csv"));
    return census;
}

} // namespace

TEST_CASE("solved curve reproduces the published per-band support") {
    const CensusTable census = reference_census();
    const SupportCurve curve =
        solve_support(census, 0.60, SupportFamily::geometric, 1.0617);
    REQUIRE(curve.points.size() == refdata::kBands.size());
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        CHECK(curve.points[i].label == refdata::kBands[i]);
        CHECK(curve.points[i].value == Approx(refdata::kSupport[i]).margin(0.005));
    }
    CHECK(std::abs(weighted_mean(curve, census) - 0.60) <= 1e-9);
    CHECK(validate_monotone(curve).ok);
}

TEST_CASE("published support column is itself geometric") {
    // least-squares fit of log support against the band index
    const std::size_t n = refdata::kSupport.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i);
        const double y = std::log(refdata::kSupport[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope =
        (static_cast<double>(n) * sxy - sx * sy) / (static_cast<double>(n) * sxx - sx * sx);
    const double fitted_ratio = std::exp(slope);
    CHECK(fitted_ratio == Approx(1.0617).margin(0.0005));
    const double endpoint_ratio =
        std::pow(refdata::kSupport.back() / refdata::kSupport.front(), 1.0 / 13.0);
    CHECK(fitted_ratio == Approx(endpoint_ratio).margin(0.0005));
}

TEST_CASE("a single voting band solves to the target mean") {
    const CensusTable census = testutil::make_census(
        {{"20 - 29", 100, 0.9, 0.5}, {"30 - 39", 100, 0.8, 0.2}, {"40 - 49", 100, 0.5, 0.1}},
        "40 - 49");
    for (const SupportFamily family : {SupportFamily::geometric, SupportFamily::arithmetic}) {
        const SupportCurve curve = solve_support(census, 0.37, family, 1.1);
        REQUIRE(curve.points.size() == 1);
        CHECK(std::abs(curve.points[0].value - 0.37) <= 1e-12);
    }
}

TEST_CASE("three-band synthetic solve checks out against a direct weighted sum") {
    const CensusTable census = testutil::make_census(
        {{"20 - 29", 120, 0.9, 0.5}, {"30 - 39", 250, 0.8, 0.2}, {"40 - 49", 90, 0.5, 0.1}},
        "20 - 29");
    const SupportCurve curve =
        solve_support(census, 0.5, SupportFamily::geometric, 1.1);

    // independent oracle: accumulate the weighted mean by hand
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        const AgeBand& band = census.bands[i];
        const double w = band.pop_share * (1.0 - band.literacy * band.social_media);
        num += w * curve.points[i].value;
        den += w;
    }
    CHECK(num / den == Approx(0.5).margin(1e-9));
    CHECK(curve.points[1].value / curve.points[0].value == Approx(1.1).margin(1e-9));
    CHECK(curve.points[2].value / curve.points[1].value == Approx(1.1).margin(1e-9));
}

TEST_CASE("adjacent ratios stay constant across the solved curve") {
    const SupportCurve curve =
        solve_support(reference_census(), 0.60, SupportFamily::geometric, 1.0617);
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        CHECK(curve.points[i].value / curve.points[i - 1].value ==
              Approx(1.0617).margin(1e-9));
    }
}

TEST_CASE("the arithmetic family spaces bands by a constant step") {
    const SupportCurve curve =
        solve_support(reference_census(), 0.60, SupportFamily::arithmetic, 0.03);
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        CHECK(curve.points[i].value - curve.points[i - 1].value == Approx(0.03).margin(1e-9));
    }
    CHECK(std::abs(weighted_mean(curve, reference_census()) - 0.60) <= 1e-9);
}

TEST_CASE("scaling every band population leaves the curve unchanged") {
    const std::vector<testutil::BandSpec> base = {
        {"20 - 29", 120, 0.9, 0.5}, {"30 - 39", 250, 0.8, 0.2}, {"40 - 49", 90, 0.5, 0.1}};
    std::vector<testutil::BandSpec> scaled = base;
    for (auto& b : scaled) b.population *= 1000.0;

    const SupportCurve a = solve_support(testutil::make_census(base, "20 - 29"), 0.5,
                                         SupportFamily::geometric, 1.1);
    const SupportCurve b = solve_support(testutil::make_census(scaled, "20 - 29"), 0.5,
                                         SupportFamily::geometric, 1.1);
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(std::abs(a.points[i].value - b.points[i].value) <= 1e-12);
    }
}

TEST_CASE("solve and weighted_mean round-trip on randomized censuses") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    int solved = 0;
    for (int round = 0; round < 30; ++round) {
        std::vector<testutil::BandSpec> bands;
        const int n = 2 + static_cast<int>(rng() % 9);
        for (int i = 0; i < n; ++i) {
            bands.push_back({std::to_string(20 + 10 * i) + " - " + std::to_string(29 + 10 * i),
                             1.0 + static_cast<double>(rng() % 500), unit(rng), unit(rng)});
        }
        const CensusTable census = testutil::make_census(bands, bands[0].label);
        const double target = 0.3 + 0.3 * unit(rng);
        const double ratio = 1.02 + 0.08 * unit(rng);
        try {
            const SupportCurve curve =
                solve_support(census, target, SupportFamily::geometric, ratio);
            CHECK(validate_monotone(curve).ok);
            CHECK(std::abs(weighted_mean(curve, census) - target) <= 1e-9);
            ++solved;
        } catch (const InfeasibleError&) {
            // steep ratio + high target can push the top band past 1; fine
        }
    }
    CHECK(solved >= 20);
}

TEST_CASE("weighted mean of the published curve lands on the published overall") {
    const CensusTable census = reference_census();
    std::vector<CurvePoint> points;
    for (std::size_t i = 0; i < refdata::kBands.size(); ++i) {
        points.push_back({refdata::kBands[i], refdata::kSupport[i]});
    }
    const double mean = weighted_mean(points, census, MeanWeighting::off_social_media);
    CHECK(mean == Approx(0.60).margin(0.0005));
}

TEST_CASE("weighted mean of a constant curve is that constant") {
    const CensusTable census = reference_census();
    std::vector<CurvePoint> points;
    for (const char* band : refdata::kBands) points.push_back({band, 0.37});
    CHECK(weighted_mean(points, census, MeanWeighting::off_social_media) ==
          Approx(0.37).margin(1e-15));
    CHECK(weighted_mean(points, census, MeanWeighting::population) ==
          Approx(0.37).margin(1e-15));
}

TEST_CASE("weighted mean matches brute-force summation on a random curve") {
    const CensusTable census = testutil::make_census(
        {{"20 - 29", 120, 0.9, 0.5}, {"30 - 39", 250, 0.8, 0.2}, {"40 - 49", 90, 0.5, 0.1}},
        "20 - 29");
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> unit(0.01, 0.99);
    for (int round = 0; round < 100; ++round) {
        std::vector<CurvePoint> points = {{"20 - 29", unit(rng)},
                                          {"30 - 39", unit(rng)},
                                          {"40 - 49", unit(rng)}};
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            num += census.bands[i].pop_share * points[i].value;
            den += census.bands[i].pop_share;
        }
        CHECK(weighted_mean(points, census, MeanWeighting::population) ==
              Approx(num / den).margin(1e-15));
    }
}

TEST_CASE("weighted mean rejects bands the census does not know") {
    const CensusTable census = reference_census();
    std::vector<CurvePoint> points = {{"120 - 124", 0.5}};
    CHECK_THROWS_AS(weighted_mean(points, census, MeanWeighting::population), DataError);
    // below the voting floor is also a mismatch
    points = {{"15 - 19", 0.5}};
    CHECK_THROWS_AS(weighted_mean(points, census, MeanWeighting::population), DataError);
}

TEST_CASE("validate_monotone flags the first offending pair") {
    SupportCurve flat;
    flat.points = {{"20 - 29", 0.5}, {"30 - 39", 0.5}, {"40 - 49", 0.6}};
    const MonotoneReport flat_report = validate_monotone(flat);
    CHECK_FALSE(flat_report.ok);
    CHECK(flat_report.index == 0);

    SupportCurve inverted;
    inverted.points = {{"20 - 29", 0.4}, {"30 - 39", 0.5}, {"40 - 49", 0.45}, {"50 - 59", 0.7}};
    const MonotoneReport report = validate_monotone(inverted);
    CHECK_FALSE(report.ok);
    CHECK(report.index == 1);
    CHECK(report.message.find("30 - 39") != std::string::npos);
    CHECK(report.message.find("40 - 49") != std::string::npos);
}

TEST_CASE("validate_monotone enforces open bounds") {
    SupportCurve curve;
    curve.points = {{"20 - 29", 0.0}, {"30 - 39", 0.5}};
    CHECK_FALSE(validate_monotone(curve).ok);
    curve.points = {{"20 - 29", 0.5}, {"30 - 39", 1.0}};
    CHECK_FALSE(validate_monotone(curve).ok);
    curve.points = {{"20 - 29", 0.5}, {"30 - 39", 0.9}};
    CHECK(validate_monotone(curve).ok);
}

TEST_CASE("unreachable targets raise infeasibility naming the bound") {
    const CensusTable census = reference_census();
    CHECK_THROWS_WITH(solve_support(census, 0.95, SupportFamily::geometric, 1.0617),
                      Catch::Matchers::ContainsSubstring("85 & Over"));
    CHECK_THROWS_AS(solve_support(census, 0.95, SupportFamily::geometric, 1.0617),
                    InfeasibleError);
    // a ratio at or below 1 can never satisfy strict increase
    CHECK_THROWS_AS(solve_support(census, 0.6, SupportFamily::geometric, 1.0),
                    InfeasibleError);
    CHECK_THROWS_AS(solve_support(census, 0.6, SupportFamily::arithmetic, 0.0),
                    InfeasibleError);
    // big arithmetic steps push the top band past 1
    CHECK_THROWS_AS(solve_support(census, 0.6, SupportFamily::arithmetic, 0.2),
                    InfeasibleError);
}

TEST_CASE("target mean must be a proper fraction") {
    const CensusTable census = reference_census();
    CHECK_THROWS_AS(solve_support(census, 0.0, SupportFamily::geometric, 1.1), ConfigError);
    CHECK_THROWS_AS(solve_support(census, 1.0, SupportFamily::geometric, 1.1), ConfigError);
}

TEST_CASE("support curves round-trip through the CSV format") {
    const CensusTable census = reference_census();
    const SupportCurve curve =
        solve_support(census, 0.60, SupportFamily::geometric, 1.0617);

    testutil::TempDir tmp;
    save_support_csv(tmp.file("support.csv"), curve);
    const SupportCurve loaded = load_support_csv(tmp.file("support.csv"));

    CHECK(loaded.family == curve.family);
    CHECK(loaded.family_param == curve.family_param);
    CHECK(loaded.target_mean == curve.target_mean);
    CHECK(loaded.weighting == curve.weighting);
    REQUIRE(loaded.points.size() == curve.points.size());
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        CHECK(loaded.points[i].label == curve.points[i].label);
        CHECK(loaded.points[i].value == Approx(curve.points[i].value).margin(5.1e-7));
    }
}

TEST_CASE("loading rejects a non-monotone support file") {
    testutil::TempDir tmp;
    testutil::write_file(tmp.file("bad.csv"),
                         "# family: geometric\n# param: 1.1\n# target_mean: 0.5\n"
                         "# weighting: population\nband,support\n"
                         "20 - 29,0.600000\n30 - 39,0.500000\n");
    CHECK_THROWS_AS(load_support_csv(tmp.file("bad.csv")), DataError);
}
