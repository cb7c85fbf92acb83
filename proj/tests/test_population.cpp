#include "fragtk/errors.hpp"
#include "fragtk/population.hpp"
#include "fragtk/rng.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <map>

using namespace fragtk;

namespace {

PopulationSpec spec1(double mean, double cov, double beta, long n) {
    PopulationSpec s;
    s.features = {"wind_speed"};
    s.alpha_mean = Eigen::VectorXd::Constant(1, mean);
    s.alpha_cov = Eigen::VectorXd::Constant(1, cov);
    s.beta = Eigen::VectorXd::Constant(1, beta);
    s.n_components = n;
    return s;
}

StressSeries constant_stress(double value, long hours) {
    StressSeries s;
    s.features = {"wind_speed"};
    s.values = Eigen::MatrixXd::Constant(hours, 1, value);
    s.timestamps.resize(static_cast<std::size_t>(hours));
    for (long t = 0; t < hours; ++t) s.timestamps[static_cast<std::size_t>(t)] = t;
    return s;
}

} // namespace

TEST_CASE("cov zero population is exactly degenerate") {
    const auto pop = draw_population(spec1(65.0, 0.0, 0.2, 3), 1);
    CHECK(pop.size() == 3);
    for (long j = 0; j < 3; ++j) CHECK(pop.alphas(j, 0) == 65.0);
    CHECK(pop.homogeneous());
}

TEST_CASE("population moments match the spec at large N") {
    const auto pop = draw_population(spec1(75.0, 0.3, 0.2, 100000), 17);
    const Eigen::ArrayXd a = pop.alphas.col(0).array();
    const double mean = a.mean();
    const double sd = std::sqrt((a - mean).square().sum() / static_cast<double>(a.size() - 1));
    CHECK(std::abs(sd - 22.5) / 22.5 < 0.01);
    CHECK((a > 0.0).all());
}

TEST_CASE("population draw is deterministic per seed") {
    const auto a = draw_population(spec1(65.0, 0.2, 0.2, 50), 5);
    const auto b = draw_population(spec1(65.0, 0.2, 0.2, 50), 5);
    CHECK(a.alphas == b.alphas);
    CHECK(draw_population(spec1(65.0, 0.2, 0.2, 50), 6).alphas != a.alphas);
}

TEST_CASE("stress far below all thresholds produces no failures") {
    const auto pop = draw_population(spec1(65.0, 0.0, 0.2, 1), 3);
    const auto rec = simulate_failures(pop, constant_stress(0.0, 10000), 11);
    CHECK(rec.size() == 10000);
    CHECK(rec.counts.maxCoeff() == 0);
}

TEST_CASE("homogeneous population at the midpoint averages N/2 failures") {
    const auto pop = draw_population(spec1(65.0, 0.0, 0.2, 1000), 2);
    const auto rec = simulate_failures(pop, constant_stress(65.0, 10000), 21);
    double mean = rec.counts.cast<double>().mean();
    CHECK(std::abs(mean - 500.0) / 500.0 < 0.01);
}

TEST_CASE("single component at threshold: counts are small non-negative integers") {
    const auto pop = draw_population(spec1(65.0, 0.0, 0.2, 1), 3);
    const auto rec = simulate_failures(pop, constant_stress(65.0, 20000), 4);
    CHECK(rec.counts.minCoeff() >= 0);
    const double mean = rec.counts.cast<double>().mean();
    CHECK(mean == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("cov zero rates equal system_failure_rate exactly") {
    const auto pop = draw_population(spec1(65.0, 0.0, 0.2, 1000), 2);
    StressSeries s = constant_stress(40.0, 5);
    s.values(1, 0) = 60.0;
    s.values(2, 0) = 65.0;
    s.values(3, 0) = 70.0;
    s.values(4, 0) = 5.0;
    const Eigen::VectorXd lambda = population_failure_rates(pop, s);
    for (Eigen::Index t = 0; t < s.size(); ++t) {
        CHECK(lambda[t] ==
              system_failure_rate(pop.component(0), s.values.row(t).transpose(), 1000));
    }
}

TEST_CASE("heterogeneous rates are exact per-component sums") {
    PopulationSpec sp = spec1(50.0, 0.4, 0.3, 7);
    const auto pop = draw_population(sp, 9);
    const auto s = constant_stress(45.0, 3);
    const Eigen::VectorXd lambda = population_failure_rates(pop, s);
    for (Eigen::Index t = 0; t < 3; ++t) {
        double expect = 0.0;
        for (long j = 0; j < pop.size(); ++j) {
            expect += failure_probability(pop.component(j), s.values.row(t).transpose());
        }
        CHECK(lambda[t] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("aggregation consistency: replicate draws match lambda within 3 MC errors") {
    const auto pop = draw_population(spec1(65.0, 0.1, 0.2, 200), 13);
    const auto s = constant_stress(55.0, 1);
    const double lambda = population_failure_rates(pop, s)[0];
    const long reps = 100000;
    Rng rng(55);
    double sum = 0.0;
    for (long r = 0; r < reps; ++r) sum += static_cast<double>(rng.poisson(lambda));
    const double mean = sum / static_cast<double>(reps);
    const double se = std::sqrt(lambda / static_cast<double>(reps));
    CHECK(std::abs(mean - lambda) < 3.0 * se);
}

TEST_CASE("poisson approximation vs explicit bernoulli simulation (small N, small g)") {
    // N <= 20 components, one timestep, max g <= 0.01: total-variation distance
    // between the empirical per-component Bernoulli sum and Poisson(sum g)
    // stays below 0.05.
    const auto pop = draw_population(spec1(65.0, 0.05, 0.2, 20), 31);
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 30.0); // g <= ~0.007
    Eigen::VectorXd g(pop.size());
    for (long j = 0; j < pop.size(); ++j) g[j] = failure_probability(pop.component(j), x);
    REQUIRE(g.maxCoeff() <= 0.01);
    const double lambda = g.sum();

    Rng rng(77);
    const int reps = 200000;
    std::map<long, double> empirical;
    for (int r = 0; r < reps; ++r) {
        long y = 0;
        for (long j = 0; j < pop.size(); ++j) {
            if (rng.uniform() < g[j]) ++y;
        }
        empirical[y] += 1.0 / reps;
    }
    double tv = 0.0;
    for (long y = 0; y <= 20; ++y) {
        const double emp = empirical.count(y) ? empirical[y] : 0.0;
        tv += std::abs(emp - std::exp(poisson_log_pmf(y, lambda)));
    }
    CHECK(tv / 2.0 <= 0.05);
}

TEST_CASE("failure record round-trips through csv") {
    const auto pop = draw_population(spec1(65.0, 0.0, 0.2, 100), 2);
    const auto rec = simulate_failures(pop, constant_stress(60.0, 50), 3);
    const auto dir = std::filesystem::temp_directory_path() / "fragtk_pop_tests";
    std::filesystem::create_directories(dir);
    save_failure_csv(rec, dir / "rec.csv");
    const auto back = load_failure_csv(dir / "rec.csv");
    CHECK(back.timestamps == rec.timestamps);
    CHECK(back.counts == rec.counts);
}

TEST_CASE("population spec round-trips through json") {
    const auto sp = spec1(65.0, 0.2, 0.2, 123);
    const auto j = sp.to_json();
    CHECK(j.at("cov")[0] == 0.2);
    CHECK(j.at("n_components") == 123);
    const auto back = PopulationSpec::from_json(j);
    CHECK(back.alpha_mean == sp.alpha_mean);
    CHECK(back.n_components == sp.n_components);
}

TEST_CASE("simulation is deterministic and feature mismatch is a contract error") {
    const auto pop = draw_population(spec1(65.0, 0.1, 0.2, 100), 2);
    const auto s = constant_stress(60.0, 100);
    const auto a = simulate_failures(pop, s, 9);
    const auto b = simulate_failures(pop, s, 9);
    CHECK(a.counts == b.counts);

    StressSeries other = s;
    other.features = {"precipitation"};
    CHECK_THROWS_AS(simulate_failures(pop, other, 9), ContractError);
}

TEST_CASE("spec validation rejects bad fields") {
    CHECK_THROWS_AS(spec1(0.0, 0.1, 0.2, 10).validate(), ValidationError);
    CHECK_THROWS_AS(spec1(65.0, -0.1, 0.2, 10).validate(), ValidationError);
    CHECK_THROWS_AS(spec1(65.0, 0.1, 0.2, 0).validate(), ValidationError);
    CHECK_THROWS_AS(spec1(65.0, 0.1, -0.2, 10).validate(), ValidationError);
}
