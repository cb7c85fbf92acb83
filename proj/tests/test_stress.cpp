#include "fragtk/csv.hpp"
#include "fragtk/errors.hpp"
#include "fragtk/stress.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace fragtk;

namespace {

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
    const auto dir = std::filesystem::temp_directory_path() / "fragtk_stress_tests";
    std::filesystem::create_directories(dir);
    const auto p = dir / name;
    std::ofstream(p) << content;
    return p;
}

} // namespace

TEST_CASE("load_stress_csv parses a small wind file") {
    const auto p = temp_file("small.csv", "timestamp,wind_speed\n0,10\n1,20\n2,30\n");
    const auto s = load_stress_csv(p, {"wind_speed"});
    CHECK(s.size() == 3);
    CHECK(s.feature_count() == 1);
    CHECK(s.values(0, 0) == 10.0);
    CHECK(s.values(2, 0) == 30.0);
    CHECK(s.timestamps == std::vector<std::int64_t>{0, 1, 2});
}

TEST_CASE("load_stress_csv accepts ISO-8601 hour timestamps") {
    const auto p = temp_file("iso.csv",
                             "timestamp,wind_speed\n"
                             "1970-01-01T00:00:00,5\n"
                             "1970-01-01 01:00:00Z,6\n"
                             "1970-01-01T02:00,7\n");
    const auto s = load_stress_csv(p, {"wind_speed"});
    CHECK(s.timestamps == std::vector<std::int64_t>{0, 1, 2});
    // Sub-hour instants violate the hourly grid.
    const auto bad = temp_file("subhour.csv", "timestamp,wind_speed\n1970-01-01T00:30:00,5\n");
    CHECK_THROWS_AS(load_stress_csv(bad, {"wind_speed"}), ValidationError);
}

TEST_CASE("load_stress_csv rejects duplicate or decreasing timestamps") {
    const auto dup = temp_file("dup.csv", "timestamp,wind_speed\n0,10\n0,11\n");
    CHECK_THROWS_AS(load_stress_csv(dup, {"wind_speed"}), ValidationError);
    const auto dec = temp_file("dec.csv", "timestamp,wind_speed\n5,10\n4,11\n");
    CHECK_THROWS_AS(load_stress_csv(dec, {"wind_speed"}), ValidationError);
}

TEST_CASE("load_stress_csv drops missing rows, counts them, errors when empty") {
    const auto p = temp_file("missing.csv", "timestamp,wind_speed\n0,10\n1,\n2,30\n");
    LoadStats stats;
    const auto s = load_stress_csv(p, {"wind_speed"}, &stats);
    CHECK(s.size() == 2);
    CHECK(stats.rows_dropped == 1);

    const auto empty = temp_file("allmissing.csv", "timestamp,wind_speed\n0,\n1,\n");
    CHECK_THROWS_AS(load_stress_csv(empty, {"wind_speed"}), DataError);
}

TEST_CASE("load_stress_csv reports malformed rows with line numbers") {
    const auto p = temp_file("garbled.csv", "timestamp,wind_speed\n0,10\n1,abc\n");
    try {
        load_stress_csv(p, {"wind_speed"});
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find(":3") != std::string::npos);
    }
    const auto hdr = temp_file("badheader.csv", "time,wind\n0,10\n");
    CHECK_THROWS_AS(load_stress_csv(hdr, {"wind_speed"}), ParseError);
    CHECK_THROWS_AS(load_stress_csv("/nonexistent/x.csv", {"wind_speed"}), MissingInputError);
}

TEST_CASE("negative values rejected by validation") {
    const auto p = temp_file("neg.csv", "timestamp,wind_speed\n0,-3\n1,4\n");
    CHECK_THROWS_AS(load_stress_csv(p, {"wind_speed"}), ValidationError);
}

TEST_CASE("ten-year synthetic fixture has 87600 rows and round-trips exactly") {
    StressDistribution d;
    d.features = {"wind_speed"};
    d.marginals = {LogNormalParams{2.0, 0.4}};
    const auto s = synthesize_stress(d, 87600, 123);
    CHECK(s.size() == 87600);

    const auto p = std::filesystem::temp_directory_path() / "fragtk_stress_tests" / "tenyr.csv";
    save_stress_csv(s, p);
    const auto back = load_stress_csv(p, {"wind_speed"});
    CHECK(back.size() == s.size());
    CHECK(back.timestamps == s.timestamps);
    CHECK(back.values == s.values); // %.17g round-trip is bit-exact
}

TEST_CASE("fit_stress_distribution: two-point and degenerate cases") {
    StressSeries s;
    s.features = {"w"};
    s.timestamps = {0, 1};
    s.values.resize(2, 1);
    s.values << 1.0, std::exp(2.0);
    const auto d = fit_stress_distribution(s, "w");
    CHECK(d.marginals[0].log_mean == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(d.marginals[0].log_std == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

    StressSeries c;
    c.features = {"w"};
    c.timestamps = {0, 1, 2};
    c.values.resize(3, 1);
    c.values << M_E, M_E, M_E;
    CHECK_THROWS_AS(fit_stress_distribution(c, "w"), DataError);
}

TEST_CASE("fit_stress_distribution shifts zero readings by half the smallest positive") {
    StressSeries s;
    s.features = {"w"};
    s.timestamps = {0, 1, 2};
    s.values.resize(3, 1);
    s.values << 0.0, 2.0, 8.0;
    const auto d = fit_stress_distribution(s, "w");
    // Shifted values: 1, 3, 9 -> logs 0, log3, log9.
    const double mu = (0.0 + std::log(3.0) + std::log(9.0)) / 3.0;
    CHECK(d.marginals[0].log_mean == doctest::Approx(mu).epsilon(1e-14));
}

TEST_CASE("fit recovers known log-normal parameters within 0.01") {
    StressDistribution d;
    d.features = {"w"};
    d.marginals = {LogNormalParams{3.0, 0.4}};
    const auto s = synthesize_stress(d, 100000, 2024);
    const auto fit = fit_stress_distribution(s, "w");
    CHECK(std::abs(fit.marginals[0].log_mean - 3.0) < 0.01);
    CHECK(std::abs(fit.marginals[0].log_std - 0.4) < 0.01);
}

TEST_CASE("synthesize_stress determinism and preconditions") {
    StressDistribution d;
    d.features = {"w"};
    d.marginals = {LogNormalParams{3.0, 0.4}};
    CHECK_THROWS_AS(synthesize_stress(d, 0, 1), ValidationError);
    const auto a = synthesize_stress(d, 500, 9);
    const auto b = synthesize_stress(d, 500, 9);
    CHECK(a.values == b.values);
    CHECK(synthesize_stress(d, 500, 10).values != a.values);
}

TEST_CASE("one million draws match the log-normal mean identity within 1%") {
    StressDistribution d;
    d.features = {"w"};
    d.marginals = {LogNormalParams{3.0, 0.4}};
    const auto s = synthesize_stress(d, 1000000, 77);
    const double expect = d.marginals[0].mean();
    CHECK(std::abs(s.values.col(0).mean() - expect) / expect < 0.01);
}

TEST_CASE("round trip: fit(synthesize(d)) recovers d within 1% relative") {
    StressDistribution d;
    d.features = {"w"};
    d.marginals = {LogNormalParams{2.0, 0.4}};
    const auto s = synthesize_stress(d, 1000000, 31);
    const auto fit = fit_stress_distribution(s, "w");
    CHECK(std::abs(fit.marginals[0].log_mean - 2.0) / 2.0 < 0.01);
    CHECK(std::abs(fit.marginals[0].log_std - 0.4) / 0.4 < 0.01);
}

TEST_CASE("stress distribution validation checks unit mass and sigma") {
    StressDistribution d;
    d.features = {"w"};
    d.marginals = {LogNormalParams{2.0, -1.0}};
    CHECK_THROWS_AS(d.validate(), ValidationError);
    d.marginals = {LogNormalParams{2.0, 0.5}};
    CHECK_NOTHROW(d.validate());
}

TEST_CASE("select_features reorders columns") {
    StressSeries s;
    s.features = {"a", "b"};
    s.timestamps = {0, 1};
    s.values.resize(2, 2);
    s.values << 1, 10, 2, 20;
    const auto sub = s.select_features({"b"});
    CHECK(sub.feature_count() == 1);
    CHECK(sub.values(1, 0) == 20.0);
    CHECK_THROWS_AS(s.select_features({"zzz"}), ContractError);
}
