#pragma once

#include "fragtk/inference.hpp"
#include "fragtk/population.hpp"
#include "fragtk/rng.hpp"
#include "fragtk/stress.hpp"

#include <functional>
#include <span>

namespace fragtk {

enum class ThetaProvenance { TrueModel, Posterior, PointEstimate };

/// P(Y = y) over the truncated support 0..y_max; mass sums to 1 within 1e-9
/// and the truncated tail is below 1e-9.
struct PredictiveDistribution {
    Eigen::VectorXd pmf;
    ThetaProvenance provenance = ThetaProvenance::TrueModel;

    long y_max() const { return static_cast<long>(pmf.size()) - 1; }
    double mass() const { return pmf.sum(); }
    double mean() const;
    double variance() const;
    void validate() const;
};

/// Draws one fragility parameterization per call.
using ThetaSampler = std::function<FragilityParams(Rng&)>;

ThetaSampler theta_sampler(const PopulationSpec& spec);
ThetaSampler theta_sampler(const PosteriorChain& chain);
ThetaSampler theta_sampler(const FragilityParams& point);

/// Mixture-of-Poissons pmf from explicit rate draws (deterministic core).
PredictiveDistribution predictive_from_rates(std::span<const double> lambdas,
                                             ThetaProvenance provenance);

/// Monte Carlo over (x ~ stress distribution, theta ~ source) of the Poisson
/// pmf at lambda = N g_theta(x).
PredictiveDistribution predictive_failure_distribution(const ThetaSampler& source,
                                                       const StressDistribution& stress_dist,
                                                       long n_components, int n_mc,
                                                       std::uint64_t rng_seed,
                                                       ThetaProvenance provenance);

/// KL(p||q) = sum_y p [log p - log q] >= 0 over the unified support. q is
/// smoothed (+1e-12, renormalized) only when it has a zero where p has mass.
double kl_divergence(const PredictiveDistribution& p, const PredictiveDistribution& q);

/// Same accumulation without the nonnegativity clamp (for diagnostics on
/// improper inputs).
double signed_pointwise_divergence(const PredictiveDistribution& p,
                                   const PredictiveDistribution& q);

/// Component-level curve along the stress support; x is a full feature vector.
using CurveFn = std::function<double(const Eigen::VectorXd&)>;

CurveFn fragility_curve(const FragilityParams& params);
/// Posterior-mixture curve: mean of g over `n_theta` thinned posterior draws.
CurveFn fragility_curve(const PosteriorChain& chain, int n_theta, std::uint64_t rng_seed);
/// Population-mixture curve: mean of g over `n_theta` draws from the spec.
CurveFn fragility_curve(const PopulationSpec& spec, int n_theta, std::uint64_t rng_seed);

/// E_x[ g_true(x) (log g_true(x) - log g_fit(x)) ] with x ~ P(x); can be
/// negative because g is not a density in x. Matches the paper's
/// component-level panel rather than a textbook divergence.
double signed_curve_divergence(const CurveFn& g_true, const CurveFn& g_fit,
                               const StressDistribution& stress_dist, int n_mc,
                               std::uint64_t rng_seed);

/// Empirical-series variant: averages over the observed stress rows.
double signed_curve_divergence(const CurveFn& g_true, const CurveFn& g_fit,
                               const StressSeries& series);

} // namespace fragtk
