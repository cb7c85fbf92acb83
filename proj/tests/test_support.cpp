// RNG, scalar distribution math, and multivariate-normal support checks.
#include "fragtk/dists.hpp"
#include "fragtk/errors.hpp"
#include "fragtk/mvnormal.hpp"
#include "fragtk/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace fragtk;

TEST_CASE("rng streams are deterministic and splittable") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());

    // Child streams depend only on (seed, id), not on consumption order.
    Rng parent(7);
    parent.uniform();
    Rng c1 = parent.derive(3);
    Rng c2 = Rng(7).derive(3);
    for (int i = 0; i < 10; ++i) CHECK(c1.uniform() == c2.uniform());
    // Distinct ids give distinct streams.
    CHECK(Rng(7).derive(1).uniform() != Rng(7).derive(2).uniform());
}

TEST_CASE("normal and poisson transforms have the right moments") {
    Rng rng(11);
    const int n = 200000;
    double sum = 0, sum2 = 0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sum2 += z * z;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sum2 / n - 1.0) < 0.02);

    for (double lambda : {0.5, 3.0, 30.0, 1000.0}) {
        double s = 0, s2 = 0;
        const int m = 200000;
        for (int i = 0; i < m; ++i) {
            const double k = static_cast<double>(rng.poisson(lambda));
            s += k;
            s2 += k * k;
        }
        const double mean = s / m;
        const double var = s2 / m - mean * mean;
        const double se_mean = std::sqrt(lambda / m);
        CHECK(std::abs(mean - lambda) < 5 * se_mean + 1e-9);
        CHECK(std::abs(var - lambda) / lambda < 0.05);
    }
    CHECK(Rng(1).poisson(0.0) == 0);
}

TEST_CASE("poisson cdf/pmf identities") {
    // CDF sums the pmf.
    for (double lambda : {0.3, 4.0, 900.0}) {
        double acc = 0;
        for (long k = 0; k <= 20; ++k) acc += std::exp(poisson_log_pmf(k, lambda));
        CHECK(poisson_cdf(20, lambda) == doctest::Approx(acc).epsilon(1e-12));
    }
    CHECK(poisson_cdf(-1, 5.0) == 0.0);
    CHECK(poisson_cdf(3, 0.0) == 1.0);
    // Hand value: P(Y > 5) at lambda = 3.
    CHECK(poisson_tail_above(5.0, 3.0) == doctest::Approx(0.083918).epsilon(1e-4));
}

TEST_CASE("normal quantile inverts the cdf") {
    for (double p : {1e-6, 0.001, 0.05, 0.3, 0.5, 0.9, 0.999, 1.0 - 1e-6}) {
        CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-9));
    }
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("log_sum_exp is stable") {
    std::vector<double> v{-1000.0, -1000.0};
    CHECK(log_sum_exp(v) == doctest::Approx(-1000.0 + std::log(2.0)));
    std::vector<double> big{700.0, 710.0};
    CHECK(log_sum_exp(big) == doctest::Approx(710.0 + std::log1p(std::exp(-10.0))));
}

TEST_CASE("lognormal params: pdf mass and quantiles") {
    LogNormalParams p{3.0, 0.4};
    CHECK(p.integrates_to_one(1e-6));
    CHECK(p.cdf(p.quantile(0.25)) == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(p.mean() == doctest::Approx(std::exp(3.0 + 0.08)));
}

TEST_CASE("mvnormal samples match moments and density is proper") {
    Eigen::VectorXd mean(2);
    mean << 1.0, -2.0;
    Eigen::MatrixXd cov(2, 2);
    cov << 4.0, 1.0, 1.0, 1.0;
    MvNormal mvn(mean, cov);
    CHECK_FALSE(mvn.degenerate());

    Rng rng(5);
    const int n = 100000;
    Eigen::VectorXd s = Eigen::VectorXd::Zero(2);
    Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(2, 2);
    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd x = mvn.sample(rng);
        s += x;
        s2 += x * x.transpose();
    }
    const Eigen::VectorXd m = s / n;
    const Eigen::MatrixXd c = s2 / n - m * m.transpose();
    CHECK((m - mean).norm() < 0.03);
    CHECK((c - cov).norm() < 0.08);

    // Density at the mean for a standard normal: -log(2 pi sqrt(det)).
    const double expect = -std::log(2.0 * M_PI) - 0.5 * std::log(cov.determinant());
    CHECK(mvn.log_density(mean) == doctest::Approx(expect).epsilon(1e-10));

    // Degenerate covariance flagged; negative eigenvalue rejected.
    CHECK(MvNormal(mean, Eigen::MatrixXd::Zero(2, 2)).degenerate());
    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, 2.0, 2.0, 1.0; // eigenvalues 3, -1
    CHECK_THROWS_AS(MvNormal(mean, bad), ValidationError);
}

TEST_CASE("percentile interpolation") {
    std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    CHECK(percentile_sorted(v, 0.0) == 1.0);
    CHECK(percentile_sorted(v, 1.0) == 4.0);
    CHECK(percentile_sorted(v, 0.5) == doctest::Approx(2.5));
}
