#include "fragtk/evaluation.hpp"

#include "fragtk/dists.hpp"
#include "fragtk/errors.hpp"
#include "fragtk/rng.hpp"

#include <algorithm>
#include <cmath>

namespace fragtk {

double PredictiveDistribution::mean() const {
    double m = 0.0;
    for (Eigen::Index y = 0; y < pmf.size(); ++y) m += static_cast<double>(y) * pmf[y];
    return m;
}

double PredictiveDistribution::variance() const {
    const double m = mean();
    double v = 0.0;
    for (Eigen::Index y = 0; y < pmf.size(); ++y) {
        const double d = static_cast<double>(y) - m;
        v += d * d * pmf[y];
    }
    return v;
}

void PredictiveDistribution::validate() const {
    if (pmf.size() < 1) throw ValidationError("predictive distribution: empty support");
    if ((pmf.array() < 0.0).any()) throw ValidationError("predictive distribution: negative mass");
    if (std::abs(mass() - 1.0) > 1e-9) {
        throw ValidationError("predictive distribution: mass deviates from 1 beyond 1e-9");
    }
}

ThetaSampler theta_sampler(const PopulationSpec& spec) {
    spec.validate();
    return [spec](Rng& rng) {
        FragilityParams p;
        p.features = spec.features;
        p.beta = spec.beta;
        p.alpha.resize(spec.alpha_mean.size());
        for (Eigen::Index j = 0; j < spec.alpha_mean.size(); ++j) {
            const double sd = spec.alpha_cov[j] * spec.alpha_mean[j];
            if (sd == 0.0) {
                p.alpha[j] = spec.alpha_mean[j];
            } else {
                double a = spec.alpha_mean[j] + sd * rng.normal();
                while (a <= 0.0) a = spec.alpha_mean[j] + sd * rng.normal();
                p.alpha[j] = a;
            }
        }
        return p;
    };
}

ThetaSampler theta_sampler(const PosteriorChain& chain) {
    if (chain.post_burn_in_length() < 1) throw ContractError("theta_sampler: empty chain");
    const Eigen::MatrixXd post = chain.post_burn_in_samples();
    const auto features = chain.features;
    return [post, features](Rng& rng) {
        const auto row = static_cast<Eigen::Index>(rng.uniform() * static_cast<double>(post.rows()));
        const auto p = static_cast<Eigen::Index>(features.size());
        FragilityParams theta;
        theta.features = features;
        theta.alpha = post.row(row).head(p).transpose();
        theta.beta = post.row(row).tail(p).transpose();
        return theta;
    };
}

ThetaSampler theta_sampler(const FragilityParams& point) {
    point.validate();
    return [point](Rng&) { return point; };
}

PredictiveDistribution predictive_from_rates(std::span<const double> lambdas,
                                             ThetaProvenance provenance) {
    if (lambdas.empty()) throw ContractError("predictive_from_rates: no rate draws");
    double lam_max = 0.0;
    for (double l : lambdas) {
        if (!(l >= 0.0)) throw ContractError("predictive_from_rates: negative rate");
        lam_max = std::max(lam_max, l);
    }
    // Generous initial support; trimmed to the 1e-9 tail afterwards.
    const long y_hi = static_cast<long>(std::ceil(lam_max + 12.0 * std::sqrt(lam_max + 1.0) + 50.0));
    Eigen::VectorXd pmf = Eigen::VectorXd::Zero(y_hi + 1);
    const double w = 1.0 / static_cast<double>(lambdas.size());
    for (double lam : lambdas) {
        if (lam == 0.0) {
            pmf[0] += w;
            continue;
        }
        // Window of non-negligible mass around the mode, built by the pmf
        // recurrence p(k+1) = p(k) lam / (k+1) outward from the mode.
        const long mode = static_cast<long>(std::floor(lam));
        const double spread = 10.0 * std::sqrt(lam) + 40.0;
        const long lo = std::max<long>(0, static_cast<long>(std::floor(lam - spread)));
        const long hi = std::min<long>(y_hi, static_cast<long>(std::ceil(lam + spread)));
        const double log_pmf_mode = poisson_log_pmf(mode, lam);
        double p = std::exp(log_pmf_mode);
        for (long k = mode; k >= lo; --k) {
            pmf[k] += w * p;
            p *= static_cast<double>(k) / lam; // p(k-1) = p(k) k / lam
        }
        p = std::exp(log_pmf_mode);
        for (long k = mode + 1; k <= hi; ++k) {
            p *= lam / static_cast<double>(k);
            pmf[k] += w * p;
        }
    }
    // Truncate at the smallest y_max with tail < 1e-9.
    double cum = 0.0;
    long y_max = y_hi;
    for (long y = 0; y <= y_hi; ++y) {
        cum += pmf[y];
        if (1.0 - cum < 1e-9) {
            y_max = y;
            break;
        }
    }
    PredictiveDistribution out;
    out.pmf = pmf.head(y_max + 1);
    out.provenance = provenance;
    out.validate();
    return out;
}

PredictiveDistribution predictive_failure_distribution(const ThetaSampler& source,
                                                       const StressDistribution& stress_dist,
                                                       long n_components, int n_mc,
                                                       std::uint64_t rng_seed,
                                                       ThetaProvenance provenance) {
    if (n_mc < 1000) throw ValidationError("predictive_failure_distribution: n_mc must be >= 1e3");
    if (n_components < 1) throw ContractError("predictive_failure_distribution: n_components >= 1");
    Rng rng(rng_seed);
    const auto p = static_cast<Eigen::Index>(stress_dist.features.size());
    std::vector<double> lambdas(static_cast<std::size_t>(n_mc));
    Eigen::VectorXd x(p);
    for (int i = 0; i < n_mc; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
            const auto& m = stress_dist.marginals[static_cast<std::size_t>(j)];
            x[j] = std::exp(m.log_mean + m.log_std * rng.normal());
        }
        const FragilityParams theta = source(rng);
        if (theta.features != stress_dist.features) {
            throw ContractError("predictive_failure_distribution: theta/stress feature mismatch");
        }
        lambdas[static_cast<std::size_t>(i)] =
            static_cast<double>(n_components) * failure_probability(theta, x);
    }
    return predictive_from_rates(lambdas, provenance);
}

namespace {

// Common support handling: pad the shorter pmf with zeros; smooth q only when
// it has a zero somewhere p carries mass.
struct AlignedPair {
    Eigen::VectorXd p;
    Eigen::VectorXd q;
};

AlignedPair align_and_smooth(const PredictiveDistribution& p, const PredictiveDistribution& q) {
    const Eigen::Index n = std::max(p.pmf.size(), q.pmf.size());
    AlignedPair out;
    out.p = Eigen::VectorXd::Zero(n);
    out.q = Eigen::VectorXd::Zero(n);
    out.p.head(p.pmf.size()) = p.pmf;
    out.q.head(q.pmf.size()) = q.pmf;
    bool needs_smoothing = false;
    for (Eigen::Index y = 0; y < n; ++y) {
        if (out.p[y] > 0.0 && out.q[y] <= 0.0) {
            needs_smoothing = true;
            break;
        }
    }
    if (needs_smoothing) {
        out.q.array() += 1e-12;
        out.q /= out.q.sum();
    }
    return out;
}

double accumulate_divergence(const AlignedPair& a) {
    double d = 0.0;
    for (Eigen::Index y = 0; y < a.p.size(); ++y) {
        if (a.p[y] <= 0.0) continue;
        if (a.q[y] <= 0.0) return std::numeric_limits<double>::infinity();
        d += a.p[y] * (std::log(a.p[y]) - std::log(a.q[y]));
    }
    return d;
}

} // namespace

double kl_divergence(const PredictiveDistribution& p, const PredictiveDistribution& q) {
    const double d = accumulate_divergence(align_and_smooth(p, q));
    // Support truncation leaves both masses within 1e-9 of 1, which can push
    // the sum negative by that order; clamp the artifact, not real negatives.
    if (d < 0.0 && d > -1e-8) return 0.0;
    return d;
}

double signed_pointwise_divergence(const PredictiveDistribution& p,
                                   const PredictiveDistribution& q) {
    return accumulate_divergence(align_and_smooth(p, q));
}

CurveFn fragility_curve(const FragilityParams& params) {
    params.validate();
    return [params](const Eigen::VectorXd& x) { return failure_probability(params, x); };
}

namespace {

CurveFn mixture_curve(std::vector<FragilityParams> thetas) {
    return [thetas = std::move(thetas)](const Eigen::VectorXd& x) {
        double g = 0.0;
        for (const auto& t : thetas) g += failure_probability(t, x);
        return g / static_cast<double>(thetas.size());
    };
}

} // namespace

CurveFn fragility_curve(const PosteriorChain& chain, int n_theta, std::uint64_t rng_seed) {
    if (n_theta < 1) throw ContractError("fragility_curve: n_theta must be >= 1");
    auto sample = theta_sampler(chain);
    Rng rng(rng_seed);
    std::vector<FragilityParams> thetas;
    thetas.reserve(static_cast<std::size_t>(n_theta));
    for (int i = 0; i < n_theta; ++i) thetas.push_back(sample(rng));
    return mixture_curve(std::move(thetas));
}

CurveFn fragility_curve(const PopulationSpec& spec, int n_theta, std::uint64_t rng_seed) {
    if (n_theta < 1) throw ContractError("fragility_curve: n_theta must be >= 1");
    if ((spec.alpha_cov.array() == 0.0).all()) return fragility_curve(spec.mean_params());
    auto sample = theta_sampler(spec);
    Rng rng(rng_seed);
    std::vector<FragilityParams> thetas;
    thetas.reserve(static_cast<std::size_t>(n_theta));
    for (int i = 0; i < n_theta; ++i) thetas.push_back(sample(rng));
    return mixture_curve(std::move(thetas));
}

namespace {

double curve_term(const CurveFn& g_true, const CurveFn& g_fit, const Eigen::VectorXd& x) {
    const double gt = g_true(x);
    const double gf = g_fit(x);
    if (gt <= 0.0) return 0.0;
    return gt * (std::log(gt) - std::log(std::max(gf, 1e-300)));
}

} // namespace

double signed_curve_divergence(const CurveFn& g_true, const CurveFn& g_fit,
                               const StressDistribution& stress_dist, int n_mc,
                               std::uint64_t rng_seed) {
    if (n_mc < 100) throw ValidationError("signed_curve_divergence: n_mc must be >= 100");
    Rng rng(rng_seed);
    const auto p = static_cast<Eigen::Index>(stress_dist.features.size());
    Eigen::VectorXd x(p);
    double acc = 0.0;
    for (int i = 0; i < n_mc; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
            const auto& m = stress_dist.marginals[static_cast<std::size_t>(j)];
            x[j] = std::exp(m.log_mean + m.log_std * rng.normal());
        }
        acc += curve_term(g_true, g_fit, x);
    }
    return acc / static_cast<double>(n_mc);
}

double signed_curve_divergence(const CurveFn& g_true, const CurveFn& g_fit,
                               const StressSeries& series) {
    if (series.size() < 1) throw DataError("signed_curve_divergence: empty series");
    double acc = 0.0;
    for (Eigen::Index t = 0; t < series.size(); ++t) {
        acc += curve_term(g_true, g_fit, series.values.row(t).transpose());
    }
    return acc / static_cast<double>(series.size());
}

} // namespace fragtk
