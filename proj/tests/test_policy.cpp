#include "fragtk/errors.hpp"
#include "fragtk/policy.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>

using namespace fragtk;

namespace {

// Near-degenerate stress distribution pinned at x0.
LogNormalParams point_stress(double x0) { return LogNormalParams{std::log(x0), 1e-12}; }

RiskTarget target(double delta, double eps, long horizon) {
    RiskTarget t;
    t.delta = delta;
    t.epsilon = eps;
    t.horizon_hours = horizon;
    return t;
}

} // namespace

TEST_CASE("risk target validation") {
    CHECK_THROWS_AS(target(-1.0, 0.05, 8760).validate(), ValidationError);
    CHECK_THROWS_AS(target(5.0, 0.0, 8760).validate(), ValidationError);
    CHECK_THROWS_AS(target(5.0, 1.5, 8760).validate(), ValidationError);
    CHECK_NOTHROW(target(5.0, 1.0, 8760).validate()); // vacuous bound allowed
    CHECK_THROWS_AS(target(5.0, 0.05, 0).validate(), ValidationError);
}

TEST_CASE("point-theta point-stress exceedance is a Poisson tail") {
    // One component, annual lambda = 3: alpha chosen so g(x0) = 3/8760.
    const double x0 = 10.0;
    const double g = 3.0 / 8760.0;
    const double alpha = x0 + std::log(1.0 / g - 1.0); // beta = 1
    const double exc = exceedance_probability(AlphaDistribution::point(alpha), 1.0,
                                              point_stress(x0), 1, target(5.0, 0.05, 8760), 200,
                                              42);
    // 1 - e^-3 sum_{k<=5} 3^k/k! = 0.08392
    CHECK(exc == doctest::Approx(0.0839161).epsilon(1e-3));
}

TEST_CASE("all components upgraded gives zero exceedance") {
    const auto dist = AlphaDistribution::normal(65.0, 6.5).with_upgrades_below(1e9);
    const double exc = exceedance_probability(dist, 0.2, point_stress(60.0), 50,
                                              target(0.0, 0.05, 100), 100, 1);
    CHECK(exc == 0.0);
}

TEST_CASE("upgrade_count closed forms") {
    const auto dist = AlphaDistribution::normal(65.0, 6.5);
    CHECK(upgrade_count(dist, 0.0, 10000) == 0);
    // tau at the median: exactly half the fleet.
    CHECK(upgrade_count(dist, 65.0, 1000) == 500);
    // Phi(-1) = 0.158655...
    CHECK(upgrade_count(dist, 58.5, 10000) == 1587);
    CHECK_THROWS_AS(upgrade_count(dist, -1.0, 10), ValidationError);

    // M is nondecreasing in tau with the documented endpoints.
    long prev = 0;
    for (double tau = 0.0; tau <= 100.0; tau += 5.0) {
        const long m = upgrade_count(dist, tau, 10000);
        CHECK(m >= prev);
        prev = m;
    }
    CHECK(upgrade_count(dist, 1e9, 10000) == 10000);
}

TEST_CASE("vacuous epsilon = 1 target needs no upgrades") {
    const auto plan = solve_upgrade_threshold(AlphaDistribution::normal(65.0, 6.5), 0.2,
                                              point_stress(64.0), 100, target(0.0, 1.0, 1000),
                                              0.01, 100, 3);
    CHECK(plan.tau == 0.0);
    CHECK(plan.m_upgrades == 0);
    CHECK(plan.feasible);
}

TEST_CASE("already-safe system needs no upgrades") {
    // Stress pinned far below every threshold: annual lambda ~ 54 << delta.
    const auto plan = solve_upgrade_threshold(AlphaDistribution::normal(65.0, 3.0), 0.2,
                                              point_stress(5.0), 1000, target(100.0, 0.05, 8760),
                                              0.01, 100, 4);
    CHECK(plan.tau == 0.0);
    CHECK(plan.m_upgrades == 0);
    CHECK(plan.feasible);
    CHECK(plan.achieved_exceedance <= 0.05);
}

TEST_CASE("infeasible target is flagged with the bracket top and M = N") {
    // Upgrading to the 99.9th percentile still leaves the rate far above a
    // delta-0 target at epsilon near 0 -- because even the top 0.1% of
    // components fail at the pinned stress with certainty-scale rates.
    const auto plan = solve_upgrade_threshold(AlphaDistribution::normal(20.0, 1.0), 1.0,
                                              point_stress(30.0), 500,
                                              target(0.0, 0.001, 8760), 0.01, 100, 5);
    CHECK_FALSE(plan.feasible);
    CHECK(plan.m_upgrades == 500);
    CHECK(plan.achieved_exceedance > 0.001);
}

TEST_CASE("discrete toy: bisection matches exhaustive subset search") {
    // Fixed component sets of size <= 12 at pinned stress: the minimum number
    // of removed components meeting the target is exact; removing lowest-alpha
    // first is optimal, so enumeration reduces to sorted prefixes -- but we
    // still enumerate all subsets to validate that claim.
    const double x0 = 30.0;
    const double beta = 0.4;
    const long horizon = 2000;
    Rng rng(606);
    for (int trial = 0; trial < 12; ++trial) {
        const long n = 3 + static_cast<long>(rng.uniform() * 10);
        Eigen::VectorXd alphas(n);
        for (long j = 0; j < n; ++j) alphas[j] = 20.0 + 20.0 * rng.uniform();
        const auto dist = AlphaDistribution::fixed_population(alphas);

        // Per-component annual rates at the pinned stress.
        Eigen::VectorXd rate(n);
        for (long j = 0; j < n; ++j) {
            rate[j] = static_cast<double>(horizon) * logistic(beta * (x0 - alphas[j]));
        }
        const double delta = 0.3 * rate.sum();
        const double eps = 0.2;

        // Exhaustive search over upgrade subsets for the smallest one meeting
        // the target.
        long best = n + 1;
        for (long mask = 0; mask < (1L << n); ++mask) {
            double lam = 0.0;
            long count = 0;
            for (long j = 0; j < n; ++j) {
                if (mask & (1L << j)) {
                    ++count; // upgraded
                } else {
                    lam += rate[j];
                }
            }
            if (poisson_tail_above(delta, lam) <= eps) best = std::min(best, count);
        }
        REQUIRE(best <= n);

        const auto plan = solve_upgrade_threshold(dist, beta, point_stress(x0), n,
                                                  target(delta, eps, horizon), 1e-4, 100, 9);
        CHECK(plan.feasible);
        CHECK(plan.m_upgrades == best);
        if (best > 0) {
            // tau sits between the last upgraded and first kept threshold.
            std::vector<double> sorted(alphas.begin(), alphas.end());
            std::sort(sorted.begin(), sorted.end());
            CHECK(plan.tau > sorted[static_cast<std::size_t>(best - 1)]);
            if (best < n) CHECK(plan.tau <= sorted[static_cast<std::size_t>(best)]);
        }
    }
}

TEST_CASE("exceedance monotonicity under common random numbers") {
    const auto dist = AlphaDistribution::normal(60.0, 8.0);
    const LogNormalParams stress{2.0, 0.4};
    const auto t0 = target(50.0, 0.05, 2000);

    double prev = 1.0;
    for (double tau : {0.0, 40.0, 55.0, 65.0, 80.0}) {
        const double e = exceedance_probability(dist.with_upgrades_below(tau), 0.2, stress, 300,
                                                t0, 100, 31);
        CHECK(e <= prev + 1e-12);
        prev = e;
    }

    // Non-decreasing in N.
    double prev_n = 0.0;
    for (long n : {100, 200, 400, 800}) {
        const double e = exceedance_probability(dist, 0.2, stress, n, t0, 100, 31);
        CHECK(e >= prev_n - 1e-12);
        prev_n = e;
    }

    // Non-increasing in delta.
    double prev_d = 1.0;
    for (double delta : {0.0, 10.0, 40.0, 120.0}) {
        const double e = exceedance_probability(dist, 0.2, stress, 300,
                                                target(delta, 0.05, 2000), 100, 31);
        CHECK(e <= prev_d + 1e-12);
        prev_d = e;
    }
}

TEST_CASE("plans are deterministic per seed") {
    const auto dist = AlphaDistribution::normal(60.0, 8.0);
    const LogNormalParams stress{2.0, 0.4};
    const auto t0 = target(30.0, 0.05, 2000);
    const auto a = solve_upgrade_threshold(dist, 0.2, stress, 300, t0, 0.01, 100, 77);
    const auto b = solve_upgrade_threshold(dist, 0.2, stress, 300, t0, 0.01, 100, 77);
    CHECK(a.tau == b.tau);
    CHECK(a.m_upgrades == b.m_upgrades);
    CHECK(a.achieved_exceedance == b.achieved_exceedance);
}

TEST_CASE("compare_policies: identical point sources give identical plans") {
    PopulationSpec spec;
    spec.features = {"wind_speed"};
    spec.alpha_mean = Eigen::VectorXd::Constant(1, 50.0);
    spec.alpha_cov = Eigen::VectorXd::Constant(1, 0.0);
    spec.beta = Eigen::VectorXd::Constant(1, 0.2);
    spec.n_components = 200;

    // Chain whose every draw is the same point; MLE at the same point.
    PosteriorChain chain;
    chain.features = {"wind_speed"};
    chain.burn_in = 0;
    chain.samples = Eigen::MatrixXd::Zero(200, 2);
    chain.samples.col(0).setConstant(50.0);
    chain.samples.col(1).setConstant(0.2);
    chain.accepted.assign(200, 1);
    chain.scale = Eigen::VectorXd::Ones(200);

    FragilityParams mle;
    mle.features = {"wind_speed"};
    mle.alpha = Eigen::VectorXd::Constant(1, 50.0);
    mle.beta = Eigen::VectorXd::Constant(1, 0.2);

    StressDistribution px;
    px.features = {"wind_speed"};
    px.marginals = {LogNormalParams{2.5, 0.3}};

    const auto rows = compare_policies(spec, chain, mle, px, "wind_speed",
                                       target(20.0, 0.05, 2000), 0.01, 100, 55);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].source == "true");
    CHECK(rows[1].source == "bhm");
    CHECK(rows[2].source == "mle");
    for (const auto& r : rows) {
        CHECK(r.plan.m_upgrades == rows[0].plan.m_upgrades);
        CHECK(r.plan.feasible == rows[0].plan.feasible);
        CHECK(r.beta_used == doctest::Approx(0.2).epsilon(1e-12));
    }

    const auto csv = policy_table_csv(rows, spec.n_components);
    CHECK(csv.find("source,beta,tau,M,M_over_N,achieved_prob,feasible,n_components") == 0);

    const auto j = plan_to_json(rows[0].plan, "toy", "true", 55);
    CHECK(j.at("scenario") == "toy");
    CHECK(j.at("source") == "true");
    CHECK(j.at("M").get<long>() == rows[0].plan.m_upgrades);
    CHECK(j.contains("tau"));
    CHECK(j.contains("achieved_prob"));
    CHECK(j.contains("feasible"));
    CHECK(j.contains("seed"));
}

TEST_CASE("alpha distribution cdf/quantile/draw behaviors") {
    Rng rng(8);
    const auto fixed = AlphaDistribution::fixed_population(
        (Eigen::VectorXd(3) << 30.0, 50.0, 40.0).finished());
    CHECK(fixed.cdf_below(45.0) == doctest::Approx(2.0 / 3.0));
    CHECK(fixed.cdf_below(30.0) == 0.0); // strict: equal is not below
    CHECK(fixed.draw_components(3, rng) == (Eigen::VectorXd(3) << 30.0, 40.0, 50.0).finished());
    CHECK_THROWS_AS(fixed.draw_components(5, rng), ContractError);

    const auto emp = AlphaDistribution::empirical(
        (Eigen::VectorXd(4) << 10.0, 20.0, 30.0, 40.0).finished());
    const auto draws = emp.draw_components(1000, rng);
    CHECK(draws.minCoeff() >= 10.0);
    CHECK(draws.maxCoeff() <= 40.0);

    const auto norm = AlphaDistribution::normal(65.0, 6.5);
    CHECK(norm.quantile(0.5) == doctest::Approx(65.0).epsilon(1e-9));
    const auto all = norm.draw_components(5000, rng);
    CHECK(all.minCoeff() > 0.0);

    // stddev 0 collapses to a point mass.
    const auto pt = AlphaDistribution::normal(65.0, 0.0);
    CHECK(pt.cdf_below(65.0) == 0.0);
    CHECK(pt.cdf_below(65.0001) == 1.0);
}
