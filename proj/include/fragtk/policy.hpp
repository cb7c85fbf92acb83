#pragma once

#include "fragtk/dists.hpp"
#include "fragtk/inference.hpp"
#include "fragtk/population.hpp"
#include "fragtk/rng.hpp"

#include <Eigen/Dense>

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace fragtk {

/// Requirement that P(Y > delta) <= epsilon over one evaluation period.
struct RiskTarget {
    double delta = 0.0;       // damage threshold, failure count
    double epsilon = 0.05;    // probability bound, (0, 1]
    long horizon_hours = 8760;

    void validate() const;
};

struct UpgradePlan {
    double tau = 0.0;                 // truncation threshold, native alpha units
    long m_upgrades = 0;              // component count to upgrade
    double m_over_n = 0.0;
    double achieved_exceedance = 0.0; // at tau
    bool feasible = true;
};

nlohmann::json plan_to_json(const UpgradePlan& plan, const std::string& scenario,
                            const std::string& source, std::uint64_t seed);

/// Distribution of the threshold parameter alpha across components, with an
/// optional upgrade threshold: components with alpha below it are upgraded
/// and contribute zero failure rate.
class AlphaDistribution {
public:
    /// Normal(mean, sd^2) truncated at 0 on sampling.
    static AlphaDistribution normal(double mean, double stddev);
    /// IID resampling from an empirical sample (e.g. posterior alpha draws).
    static AlphaDistribution empirical(Eigen::VectorXd samples);
    /// An explicit component set, reused exactly in every replicate.
    static AlphaDistribution fixed_population(Eigen::VectorXd alphas);
    static AlphaDistribution point(double alpha);

    AlphaDistribution with_upgrades_below(double tau) const;
    double upgrade_threshold() const { return upgrade_threshold_; }

    /// P(alpha < tau), before upgrades.
    double cdf_below(double tau) const;
    double quantile(double p) const;

    /// One replicate's component thresholds (n draws; fixed populations ignore
    /// n beyond a size check and return their exact set).
    Eigen::VectorXd draw_components(long n, Rng& rng) const;

    bool is_fixed() const { return kind_ == Kind::Fixed || kind_ == Kind::Point; }

private:
    enum class Kind { Normal, Empirical, Fixed, Point };
    Kind kind_ = Kind::Point;
    double mean_ = 0.0, sd_ = 0.0, point_ = 0.0;
    Eigen::VectorXd samples_; // sorted for Empirical/Fixed
    double upgrade_threshold_ = 0.0;
};

/// Monte Carlo estimate of P(Y > delta) for annual failures: each replicate
/// draws a year of hourly stress and a component population, accumulates the
/// annual rate of non-upgraded components, and evaluates the Poisson tail.
double exceedance_probability(const AlphaDistribution& theta_dist, double beta,
                              const LogNormalParams& stress_dist, long n_components,
                              const RiskTarget& target, int n_mc, std::uint64_t rng_seed);

/// Bisection on tau over [0, alpha 99.9th percentile] with common random
/// numbers: the smallest tau (within solver_tol) whose exceedance is inside
/// the target. M = ceil(N * P(alpha < tau)). Infeasible targets return the
/// bracket top with M = N and feasible = false.
UpgradePlan solve_upgrade_threshold(const AlphaDistribution& population_dist, double beta,
                                    const LogNormalParams& stress_dist, long n_components,
                                    const RiskTarget& target, double solver_tol, int n_mc,
                                    std::uint64_t rng_seed);

/// M = ceil(N * integral_0^tau P(theta) dtheta)
long upgrade_count(const AlphaDistribution& population_dist, double tau, long n_components);

struct PolicyComparison {
    std::string source; // "true" | "bhm" | "mle"
    double beta_used = 0.0;
    UpgradePlan plan;
};

/// Solve the upgrade threshold under each model's implied alpha distribution:
/// the population spec (true), the posterior alpha mixture (bhm), and the MLE
/// point mass (mle). All three share the same feature and random seed.
std::vector<PolicyComparison> compare_policies(const PopulationSpec& true_spec,
                                               const PosteriorChain& bhm_chain,
                                               const FragilityParams& mle_params,
                                               const StressDistribution& stress_dist,
                                               const std::string& feature, const RiskTarget& target,
                                               double solver_tol, int n_mc,
                                               std::uint64_t rng_seed);

std::string policy_table_csv(const std::vector<PolicyComparison>& rows, long n_components);

} // namespace fragtk
