#include "fragtk/policy.hpp"

#include "fragtk/csv.hpp"
#include "fragtk/errors.hpp"
#include "fragtk/fragility.hpp"
#include "fragtk/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fragtk {

void RiskTarget::validate() const {
    if (!(delta >= 0.0)) throw ValidationError("risk target: delta must be >= 0");
    if (!(epsilon > 0.0 && epsilon <= 1.0)) {
        throw ValidationError("risk target: epsilon must be in (0, 1]");
    }
    if (horizon_hours < 1) throw ValidationError("risk target: horizon must be >= 1 hour");
}

nlohmann::json plan_to_json(const UpgradePlan& plan, const std::string& scenario,
                            const std::string& source, std::uint64_t seed) {
    return nlohmann::json{
        {"scenario", scenario},
        {"source", source},
        {"tau", plan.tau},
        {"M", plan.m_upgrades},
        {"M_over_N", plan.m_over_n},
        {"achieved_prob", plan.achieved_exceedance},
        {"feasible", plan.feasible},
        {"seed", seed},
    };
}

AlphaDistribution AlphaDistribution::normal(double mean, double stddev) {
    if (!(mean > 0.0) || !(stddev >= 0.0)) {
        throw ValidationError("alpha distribution: need mean > 0 and stddev >= 0");
    }
    AlphaDistribution d;
    if (stddev == 0.0) {
        d.kind_ = Kind::Point;
        d.point_ = mean;
        return d;
    }
    d.kind_ = Kind::Normal;
    d.mean_ = mean;
    d.sd_ = stddev;
    return d;
}

AlphaDistribution AlphaDistribution::empirical(Eigen::VectorXd samples) {
    if (samples.size() < 1) throw ValidationError("alpha distribution: empty sample");
    AlphaDistribution d;
    d.kind_ = Kind::Empirical;
    std::sort(samples.begin(), samples.end());
    d.samples_ = std::move(samples);
    return d;
}

AlphaDistribution AlphaDistribution::fixed_population(Eigen::VectorXd alphas) {
    if (alphas.size() < 1) throw ValidationError("alpha distribution: empty population");
    AlphaDistribution d;
    d.kind_ = Kind::Fixed;
    std::sort(alphas.begin(), alphas.end());
    d.samples_ = std::move(alphas);
    return d;
}

AlphaDistribution AlphaDistribution::point(double alpha) {
    AlphaDistribution d;
    d.kind_ = Kind::Point;
    d.point_ = alpha;
    return d;
}

AlphaDistribution AlphaDistribution::with_upgrades_below(double tau) const {
    AlphaDistribution d = *this;
    d.upgrade_threshold_ = tau;
    return d;
}

double AlphaDistribution::cdf_below(double tau) const {
    switch (kind_) {
    case Kind::Point:
        return point_ < tau ? 1.0 : 0.0;
    case Kind::Normal: {
        if (tau <= 0.0) return 0.0;
        const double trunc = normal_cdf(-mean_ / sd_);
        const double raw = normal_cdf((tau - mean_) / sd_) - trunc;
        return std::clamp(raw / (1.0 - trunc), 0.0, 1.0);
    }
    case Kind::Empirical:
    case Kind::Fixed: {
        const auto it = std::lower_bound(samples_.begin(), samples_.end(), tau);
        return static_cast<double>(it - samples_.begin()) / static_cast<double>(samples_.size());
    }
    }
    return 0.0;
}

double AlphaDistribution::quantile(double p) const {
    switch (kind_) {
    case Kind::Point:
        return point_;
    case Kind::Normal:
        return std::max(0.0, mean_ + sd_ * normal_quantile(p));
    case Kind::Empirical:
    case Kind::Fixed:
        return percentile_sorted({samples_.data(), static_cast<std::size_t>(samples_.size())}, p);
    }
    return point_;
}

Eigen::VectorXd AlphaDistribution::draw_components(long n, Rng& rng) const {
    if (n < 1) throw ContractError("draw_components: n must be >= 1");
    switch (kind_) {
    case Kind::Point:
        return Eigen::VectorXd::Constant(n, point_);
    case Kind::Fixed:
        if (n != samples_.size()) {
            throw ContractError("draw_components: fixed population size mismatch");
        }
        return samples_;
    case Kind::Normal: {
        Eigen::VectorXd a(n);
        for (long j = 0; j < n; ++j) {
            double v = mean_ + sd_ * rng.normal();
            while (v <= 0.0) v = mean_ + sd_ * rng.normal();
            a[j] = v;
        }
        return a;
    }
    case Kind::Empirical: {
        Eigen::VectorXd a(n);
        const auto m = static_cast<double>(samples_.size());
        for (long j = 0; j < n; ++j) {
            a[j] = samples_[static_cast<Eigen::Index>(rng.uniform() * m)];
        }
        return a;
    }
    }
    throw ContractError("draw_components: unreachable");
}

namespace {

// Replicate populations and annual per-component rates, shared across every
// tau evaluation of a solve (common random numbers). Per replicate: component
// thresholds sorted ascending and suffix sums of their annual rates, so
// lambda(tau) is one binary search.
class AnnualExceedanceEvaluator {
public:
    AnnualExceedanceEvaluator(const AlphaDistribution& dist, double beta,
                              const LogNormalParams& stress, long n_components,
                              long horizon_hours, int n_replicates, std::uint64_t seed) {
        if (n_replicates < 1) throw ValidationError("exceedance: n_mc must be >= 1");
        if (n_components < 1) throw ValidationError("exceedance: n_components must be >= 1");
        if (!(beta > 0.0)) throw ValidationError("exceedance: beta must be > 0");
        alphas_.reserve(static_cast<std::size_t>(n_replicates));
        suffix_.reserve(static_cast<std::size_t>(n_replicates));
        Rng root(seed);
        // Exact per-component rates for small problems; an interpolated
        // rate table over alpha otherwise.
        const double work = static_cast<double>(n_components) * static_cast<double>(horizon_hours) *
                            static_cast<double>(n_replicates);
        const bool exact = work <= 2e8;
        for (int r = 0; r < n_replicates; ++r) {
            Rng year_rng = root.derive(2 * static_cast<std::uint64_t>(r));
            Rng comp_rng = root.derive(2 * static_cast<std::uint64_t>(r) + 1);
            Eigen::ArrayXd year(horizon_hours);
            for (long t = 0; t < horizon_hours; ++t) {
                year[t] = std::exp(stress.log_mean + stress.log_std * year_rng.normal());
            }
            Eigen::VectorXd a = dist.draw_components(n_components, comp_rng);
            std::sort(a.begin(), a.end());
            Eigen::VectorXd h(a.size());
            if (exact) {
                for (Eigen::Index j = 0; j < a.size(); ++j) {
                    h[j] = ((beta * (year - a[j])).min(kLogisticClamp).max(-kLogisticClamp))
                               .unaryExpr([](double z) { return 1.0 / (1.0 + std::exp(-z)); })
                               .sum();
                }
            } else {
                const Eigen::Index grid_n = 2048;
                const double a_hi = a[a.size() - 1] + 1.0;
                Eigen::VectorXd grid(grid_n), hg(grid_n);
                for (Eigen::Index m = 0; m < grid_n; ++m) {
                    grid[m] = a_hi * static_cast<double>(m) / static_cast<double>(grid_n - 1);
                    hg[m] = ((beta * (year - grid[m])).min(kLogisticClamp).max(-kLogisticClamp))
                                .unaryExpr([](double z) { return 1.0 / (1.0 + std::exp(-z)); })
                                .sum();
                }
                const double step = grid[1] - grid[0];
                for (Eigen::Index j = 0; j < a.size(); ++j) {
                    const double pos = a[j] / step;
                    const auto lo = std::min<Eigen::Index>(static_cast<Eigen::Index>(pos), grid_n - 2);
                    const double w = pos - static_cast<double>(lo);
                    h[j] = hg[lo] * (1.0 - w) + hg[lo + 1] * w;
                }
            }
            Eigen::VectorXd suf(a.size() + 1);
            suf[a.size()] = 0.0;
            for (Eigen::Index j = a.size() - 1; j >= 0; --j) suf[j] = suf[j + 1] + h[j];
            alphas_.push_back(std::move(a));
            suffix_.push_back(std::move(suf));
        }
    }

    double exceedance(double tau, double delta) const {
        double acc = 0.0;
        for (std::size_t r = 0; r < alphas_.size(); ++r) {
            const auto& a = alphas_[r];
            const auto idx = std::lower_bound(a.begin(), a.end(), tau) - a.begin();
            acc += poisson_tail_above(delta, suffix_[r][idx]);
        }
        return acc / static_cast<double>(alphas_.size());
    }

private:
    std::vector<Eigen::VectorXd> alphas_;
    std::vector<Eigen::VectorXd> suffix_;
};

} // namespace

double exceedance_probability(const AlphaDistribution& theta_dist, double beta,
                              const LogNormalParams& stress_dist, long n_components,
                              const RiskTarget& target, int n_mc, std::uint64_t rng_seed) {
    target.validate();
    if (n_mc < 100) throw ValidationError("exceedance_probability: n_mc must be >= 100");
    AnnualExceedanceEvaluator eval(theta_dist, beta, stress_dist, n_components,
                                   target.horizon_hours, n_mc, rng_seed);
    return eval.exceedance(theta_dist.upgrade_threshold(), target.delta);
}

UpgradePlan solve_upgrade_threshold(const AlphaDistribution& population_dist, double beta,
                                    const LogNormalParams& stress_dist, long n_components,
                                    const RiskTarget& target, double solver_tol, int n_mc,
                                    std::uint64_t rng_seed) {
    target.validate();
    if (!(solver_tol > 0.0)) throw ValidationError("solve_upgrade_threshold: tol must be > 0");
    if (n_mc < 100) throw ValidationError("solve_upgrade_threshold: n_mc must be >= 100");
    AnnualExceedanceEvaluator eval(population_dist, beta, stress_dist, n_components,
                                   target.horizon_hours, n_mc, rng_seed);

    UpgradePlan plan;
    const double at_zero = eval.exceedance(0.0, target.delta);
    if (at_zero <= target.epsilon) {
        plan.tau = 0.0;
        plan.m_upgrades = 0;
        plan.m_over_n = 0.0;
        plan.achieved_exceedance = at_zero;
        plan.feasible = true;
        return plan;
    }
    // Bracket top overshoots the 99.9th percentile by one tolerance so that
    // atom-valued distributions (point masses) can reach "all upgraded".
    double hi = population_dist.quantile(0.999) + solver_tol;
    const double at_hi = eval.exceedance(hi, target.delta);
    if (at_hi > target.epsilon) {
        plan.tau = hi;
        plan.m_upgrades = n_components;
        plan.m_over_n = 1.0;
        plan.achieved_exceedance = at_hi;
        plan.feasible = false;
        return plan;
    }
    double lo = 0.0;
    double achieved = at_hi;
    while (hi - lo > solver_tol) {
        const double mid = 0.5 * (lo + hi);
        const double e = eval.exceedance(mid, target.delta);
        if (e <= target.epsilon) {
            hi = mid;
            achieved = e;
        } else {
            lo = mid;
        }
    }
    plan.tau = hi;
    plan.m_upgrades = upgrade_count(population_dist, hi, n_components);
    plan.m_over_n = static_cast<double>(plan.m_upgrades) / static_cast<double>(n_components);
    plan.achieved_exceedance = achieved;
    plan.feasible = true;
    return plan;
}

long upgrade_count(const AlphaDistribution& population_dist, double tau, long n_components) {
    if (!(tau >= 0.0)) throw ValidationError("upgrade_count: tau must be >= 0");
    const double m = static_cast<double>(n_components) * population_dist.cdf_below(tau);
    return static_cast<long>(std::ceil(m - 1e-9));
}

std::vector<PolicyComparison> compare_policies(const PopulationSpec& true_spec,
                                               const PosteriorChain& bhm_chain,
                                               const FragilityParams& mle_params,
                                               const StressDistribution& stress_dist,
                                               const std::string& feature, const RiskTarget& target,
                                               double solver_tol, int n_mc,
                                               std::uint64_t rng_seed) {
    true_spec.validate();
    const auto fi = static_cast<std::size_t>(
        std::find(true_spec.features.begin(), true_spec.features.end(), feature) -
        true_spec.features.begin());
    if (fi >= true_spec.features.size()) throw ContractError("compare_policies: unknown feature");
    const LogNormalParams stress = stress_dist.marginal(feature);
    const long n = true_spec.n_components;

    // Feature columns in the chain/MLE parameterizations.
    const auto chain_fi = static_cast<Eigen::Index>(
        std::find(bhm_chain.features.begin(), bhm_chain.features.end(), feature) -
        bhm_chain.features.begin());
    if (chain_fi >= static_cast<Eigen::Index>(bhm_chain.features.size())) {
        throw ContractError("compare_policies: chain lacks the policy feature");
    }
    const auto mle_fi = static_cast<Eigen::Index>(
        std::find(mle_params.features.begin(), mle_params.features.end(), feature) -
        mle_params.features.begin());
    if (mle_fi >= mle_params.alpha.size()) {
        throw ContractError("compare_policies: MLE params lack the policy feature");
    }

    std::vector<PolicyComparison> rows;
    {
        PolicyComparison row;
        row.source = "true";
        row.beta_used = true_spec.beta[static_cast<Eigen::Index>(fi)];
        const double mean = true_spec.alpha_mean[static_cast<Eigen::Index>(fi)];
        const double sd = true_spec.alpha_cov[static_cast<Eigen::Index>(fi)] * mean;
        row.plan = solve_upgrade_threshold(AlphaDistribution::normal(mean, sd), row.beta_used,
                                           stress, n, target, solver_tol, n_mc, rng_seed);
        rows.push_back(std::move(row));
    }
    {
        PolicyComparison row;
        row.source = "bhm";
        const auto p = static_cast<Eigen::Index>(bhm_chain.features.size());
        row.beta_used = bhm_chain.parameter_draws(p + chain_fi).mean();
        const AlphaDistribution dist =
            AlphaDistribution::empirical(bhm_chain.parameter_draws(chain_fi));
        row.plan = solve_upgrade_threshold(dist, row.beta_used, stress, n, target, solver_tol,
                                           n_mc, rng_seed);
        rows.push_back(std::move(row));
    }
    {
        PolicyComparison row;
        row.source = "mle";
        row.beta_used = mle_params.beta[mle_fi];
        row.plan = solve_upgrade_threshold(AlphaDistribution::point(mle_params.alpha[mle_fi]),
                                           row.beta_used, stress, n, target, solver_tol, n_mc,
                                           rng_seed);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string policy_table_csv(const std::vector<PolicyComparison>& rows, long n_components) {
    std::ostringstream out;
    out << "source,beta,tau,M,M_over_N,achieved_prob,feasible,n_components\n";
    for (const auto& r : rows) {
        out << r.source << ',' << format_double(r.beta_used, 10) << ','
            << format_double(r.plan.tau, 10) << ',' << r.plan.m_upgrades << ','
            << format_double(r.plan.m_over_n, 10) << ','
            << format_double(r.plan.achieved_exceedance, 10) << ','
            << (r.plan.feasible ? 1 : 0) << ',' << n_components << '\n';
    }
    return out.str();
}

} // namespace fragtk
