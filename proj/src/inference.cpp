#include "fragtk/inference.hpp"

#include "fragtk/csv.hpp"
#include "fragtk/dists.hpp"
#include "fragtk/errors.hpp"
#include "fragtk/mvnormal.hpp"
#include "fragtk/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace fragtk {

LogLikelihoodContext::LogLikelihoodContext(StressSeries stress, FailureRecord record,
                                           long n_components)
    : stress_(std::move(stress)), record_(std::move(record)), n_components_(n_components) {
    if (n_components_ < 1) throw ContractError("context: n_components must be >= 1");
    if (stress_.size() != record_.size()) {
        throw ContractError("context: stress and failure record lengths differ");
    }
    if (stress_.timestamps != record_.timestamps) {
        throw ContractError("context: stress and failure record timestamps differ");
    }
    if (stress_.size() > 0) {
        stress_.validate();
        if ((record_.counts.array() < 0).any()) {
            throw ValidationError("context: failure counts must be >= 0");
        }
    }
    for (Eigen::Index t = 0; t < record_.size(); ++t) {
        const int y = record_.counts[t];
        if (y > 0) {
            failure_rows_.push_back(t);
            total_failures_ += y;
        }
        log_factorial_sum_ += std::lgamma(static_cast<double>(y) + 1.0);
    }
    failure_counts_.resize(static_cast<Eigen::Index>(failure_rows_.size()));
    for (std::size_t i = 0; i < failure_rows_.size(); ++i) {
        failure_counts_[static_cast<Eigen::Index>(i)] =
            static_cast<double>(record_.counts[failure_rows_[i]]);
    }
}

LogLikelihoodContext LogLikelihoodContext::with_features(
    const std::vector<std::string>& names) const {
    return LogLikelihoodContext(stress_.select_features(names), record_, n_components_);
}

double log_likelihood(const LogLikelihoodContext& ctx, const FragilityParams& params) {
    if (ctx.size() == 0) return 0.0;
    const Eigen::VectorXd lambda =
        static_cast<double>(ctx.n_components()) *
        failure_probability_series(params, ctx.stress().values);
    double ll = -lambda.sum() - ctx.log_factorial_sum();
    const auto& rows = ctx.failure_rows();
    const auto& counts = ctx.failure_counts();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        ll += counts[static_cast<Eigen::Index>(i)] * std::log(std::max(lambda[rows[i]], 1e-300));
    }
    return ll;
}

Eigen::VectorXd to_working(const FragilityParams& params) {
    const auto p = params.alpha.size();
    Eigen::VectorXd w(2 * p);
    w.head(p) = params.alpha;
    w.tail(p) = params.beta.array().log();
    return w;
}

FragilityParams from_working(const Eigen::VectorXd& w, const std::vector<std::string>& features) {
    const auto p = static_cast<Eigen::Index>(features.size());
    if (w.size() != 2 * p) throw ContractError("from_working: dimension mismatch");
    FragilityParams params;
    params.features = features;
    params.alpha = w.head(p);
    params.beta = w.tail(p).array().exp();
    return params;
}

namespace {

// Working-space box; keeps Nelder-Mead from wandering into useless regimes
// (beta underflow, absurd thresholds) on flat likelihood plateaus.
constexpr double kAlphaBound = 1e4;
const double kLogBetaMin = std::log(1e-6);
const double kLogBetaMax = std::log(1e3);

Eigen::VectorXd clamp_working(Eigen::VectorXd w) {
    const auto p = w.size() / 2;
    for (Eigen::Index i = 0; i < p; ++i) w[i] = std::clamp(w[i], -kAlphaBound, kAlphaBound);
    for (Eigen::Index i = p; i < w.size(); ++i) w[i] = std::clamp(w[i], kLogBetaMin, kLogBetaMax);
    return w;
}

struct NelderMeadResult {
    Eigen::VectorXd x;
    double f = 0.0;
    bool converged = false;
    int iterations = 0;
};

// Standard Nelder-Mead on a minimization objective; terminates when the
// simplex function-value spread drops below ftol.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0, const Eigen::VectorXd& steps,
                             double ftol, int max_iter) {
    const auto d = x0.size();
    std::vector<Eigen::VectorXd> xs(static_cast<std::size_t>(d) + 1, x0);
    std::vector<double> fs(static_cast<std::size_t>(d) + 1);
    for (Eigen::Index i = 0; i < d; ++i) xs[static_cast<std::size_t>(i) + 1][i] += steps[i];
    for (std::size_t i = 0; i < xs.size(); ++i) fs[i] = f(xs[i]);

    std::vector<std::size_t> order(xs.size());
    int iter = 0;
    bool converged = false;
    for (; iter < max_iter; ++iter) {
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[order.size() - 2];
        if (fs[worst] - fs[best] <= ftol) {
            converged = true;
            break;
        }
        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
        for (std::size_t i : order) {
            if (i != worst) centroid += xs[i];
        }
        centroid /= static_cast<double>(d);

        const Eigen::VectorXd reflected = centroid + (centroid - xs[worst]);
        const double fr = f(reflected);
        if (fr < fs[best]) {
            const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - xs[worst]);
            const double fe = f(expanded);
            if (fe < fr) {
                xs[worst] = expanded;
                fs[worst] = fe;
            } else {
                xs[worst] = reflected;
                fs[worst] = fr;
            }
            continue;
        }
        if (fr < fs[second_worst]) {
            xs[worst] = reflected;
            fs[worst] = fr;
            continue;
        }
        const Eigen::VectorXd contracted = centroid + 0.5 * (xs[worst] - centroid);
        const double fc = f(contracted);
        if (fc < fs[worst]) {
            xs[worst] = contracted;
            fs[worst] = fc;
            continue;
        }
        for (std::size_t i : order) {
            if (i == best) continue;
            xs[i] = xs[best] + 0.5 * (xs[i] - xs[best]);
            fs[i] = f(xs[i]);
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < fs.size(); ++i) {
        if (fs[i] < fs[best]) best = i;
    }
    return {xs[best], fs[best], converged, iter};
}

} // namespace

FragilityParams default_mle_init(const LogLikelihoodContext& ctx) {
    if (!ctx.has_failures()) throw DataError("default_mle_init: record carries no failures");
    const auto& rows = ctx.failure_rows();
    const auto p = ctx.stress().feature_count();
    FragilityParams init;
    init.features = ctx.stress().features;
    init.alpha.resize(p);
    init.beta = Eigen::VectorXd::Constant(p, 0.1);
    std::vector<double> col(rows.size());
    for (Eigen::Index j = 0; j < p; ++j) {
        for (std::size_t i = 0; i < rows.size(); ++i) col[i] = ctx.stress().values(rows[i], j);
        std::sort(col.begin(), col.end());
        init.alpha[j] = percentile_sorted(col, 0.95);
    }
    return init;
}

MleResult fit_mle(const LogLikelihoodContext& ctx, const FragilityParams& init) {
    if (!ctx.has_failures()) {
        throw DataError("fit_mle: all failure counts are zero, no information about theta");
    }
    init.validate();
    const auto features = init.features;
    const auto objective = [&](const Eigen::VectorXd& w) {
        return -log_likelihood(ctx, from_working(clamp_working(w), features));
    };
    const Eigen::VectorXd w0 = clamp_working(to_working(init));
    const auto p = w0.size() / 2;
    Eigen::VectorXd steps(w0.size());
    for (Eigen::Index i = 0; i < p; ++i) steps[i] = std::max(0.5, 0.02 * std::abs(w0[i]));
    for (Eigen::Index i = p; i < w0.size(); ++i) steps[i] = 0.35;

    // Stage 1 at the documented tolerance, then a tight-simplex polish.
    auto stage1 = nelder_mead(objective, w0, steps, 1e-9, 10000);
    Eigen::VectorXd polish_steps = Eigen::VectorXd::Constant(w0.size(), 1e-5);
    for (Eigen::Index i = 0; i < w0.size(); ++i) {
        polish_steps[i] = 1e-5 * std::max(1.0, std::abs(stage1.x[i]));
    }
    auto stage2 = nelder_mead(objective, stage1.x, polish_steps, 1e-13, 800);
    const Eigen::VectorXd w_hat = clamp_working(stage2.f < stage1.f ? stage2.x : stage1.x);

    MleResult result;
    result.params = from_working(w_hat, features);
    result.log_lik = log_likelihood(ctx, result.params);
    result.converged = stage1.converged;
    result.iterations = stage1.iterations + stage2.iterations;
    return result;
}

MleResult fit_mle(const LogLikelihoodContext& ctx) { return fit_mle(ctx, default_mle_init(ctx)); }

void EmpiricalPrior::validate() const {
    const auto d = mean.size();
    if (d < 2 || d != 2 * static_cast<Eigen::Index>(features.size())) {
        throw ValidationError("empirical prior: dimension mismatch");
    }
    if (cov.rows() != d || cov.cols() != d) throw ValidationError("empirical prior: cov shape");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (cov + cov.transpose()));
    const double max_eig = es.eigenvalues().maxCoeff();
    if (es.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, max_eig)) {
        throw ValidationError("empirical prior: covariance not PSD");
    }
}

nlohmann::json EmpiricalPrior::to_json() const {
    std::vector<std::vector<double>> c(static_cast<std::size_t>(cov.rows()));
    for (Eigen::Index i = 0; i < cov.rows(); ++i) {
        c[static_cast<std::size_t>(i)] =
            std::vector<double>(cov.row(i).begin(), cov.row(i).end());
    }
    return nlohmann::json{
        {"features", features},
        {"mean", std::vector<double>(mean.begin(), mean.end())},
        {"cov", c},
        {"n_boot", n_boot},
        {"n_failed", n_failed},
    };
}

EmpiricalPrior EmpiricalPrior::from_json(const nlohmann::json& j) {
    EmpiricalPrior p;
    p.features = j.at("features").get<std::vector<std::string>>();
    const auto m = j.at("mean").get<std::vector<double>>();
    p.mean = Eigen::Map<const Eigen::VectorXd>(m.data(), static_cast<Eigen::Index>(m.size()));
    const auto c = j.at("cov").get<std::vector<std::vector<double>>>();
    p.cov.resize(static_cast<Eigen::Index>(c.size()), static_cast<Eigen::Index>(c.size()));
    for (std::size_t i = 0; i < c.size(); ++i) {
        for (std::size_t k = 0; k < c.size(); ++k) p.cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = c[i][k];
    }
    p.n_boot = j.value("n_boot", 0);
    p.n_failed = j.value("n_failed", 0);
    p.validate();
    return p;
}

namespace {

Eigen::MatrixXd clip_psd(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    const Eigen::VectorXd eigs = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * eigs.asDiagonal() * es.eigenvectors().transpose();
}

} // namespace

EmpiricalPrior bootstrap_prior(const LogLikelihoodContext& ctx, int n_boot, int block_hours,
                               std::uint64_t rng_seed) {
    if (n_boot < 10) throw ValidationError("bootstrap_prior: n_boot must be >= 10");
    if (block_hours < 1) throw ValidationError("bootstrap_prior: block_hours must be >= 1");
    const Eigen::Index n = ctx.size();
    if (n < 1) throw DataError("bootstrap_prior: empty context");

    const MleResult full = fit_mle(ctx);
    const auto p = ctx.stress().feature_count();
    Rng rng(rng_seed);

    std::vector<Eigen::VectorXd> draws;
    int failed = 0;
    const Eigen::Index block = std::min<Eigen::Index>(block_hours, n);
    const Eigen::Index max_start = n - block;
    for (int r = 0; r < n_boot; ++r) {
        Rng rep = rng.derive(static_cast<std::uint64_t>(r));
        // Moving-block bootstrap over the timestep index.
        std::vector<Eigen::Index> idx;
        idx.reserve(static_cast<std::size_t>(n));
        while (static_cast<Eigen::Index>(idx.size()) < n) {
            const auto start = static_cast<Eigen::Index>(rep.uniform() * static_cast<double>(max_start + 1));
            for (Eigen::Index k = 0; k < block && static_cast<Eigen::Index>(idx.size()) < n; ++k) {
                idx.push_back(std::min(start + k, n - 1));
            }
        }
        StressSeries rs;
        rs.features = ctx.stress().features;
        rs.values.resize(n, p);
        rs.timestamps.resize(static_cast<std::size_t>(n));
        FailureRecord rr;
        rr.counts.resize(n);
        rr.timestamps.resize(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            rs.values.row(i) = ctx.stress().values.row(idx[static_cast<std::size_t>(i)]);
            rs.timestamps[static_cast<std::size_t>(i)] = i; // replicate hours are exchangeable
            rr.counts[i] = ctx.record().counts[idx[static_cast<std::size_t>(i)]];
            rr.timestamps[static_cast<std::size_t>(i)] = i;
        }
        try {
            LogLikelihoodContext rep_ctx(std::move(rs), std::move(rr), ctx.n_components());
            draws.push_back(to_working(fit_mle(rep_ctx, full.params).params));
        } catch (const DataError&) {
            ++failed;
        }
    }
    if (failed * 2 > n_boot) {
        throw DataError("bootstrap_prior: more than half of the replicate fits failed");
    }

    const auto d = 2 * p;
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    for (const auto& w : draws) mean += w;
    mean /= static_cast<double>(draws.size());
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
    if (draws.size() > 1) {
        for (const auto& w : draws) {
            const Eigen::VectorXd c = w - mean;
            cov += c * c.transpose();
        }
        cov /= static_cast<double>(draws.size() - 1);
        cov = clip_psd(cov);
    }

    EmpiricalPrior prior;
    prior.features = ctx.stress().features;
    prior.mean = mean;
    prior.cov = cov;
    prior.n_boot = n_boot;
    prior.n_failed = failed;
    prior.validate();
    return prior;
}

bool mh_accept(double log_post_proposed, double log_post_current, double log_u) {
    if (log_post_proposed >= log_post_current) return true;
    return log_u < log_post_proposed - log_post_current;
}

double PosteriorChain::acceptance_rate() const {
    if (accepted.empty()) return 0.0;
    double s = 0.0;
    for (auto a : accepted) s += a;
    return s / static_cast<double>(accepted.size());
}

double PosteriorChain::post_burn_in_acceptance_rate() const {
    return trailing_acceptance_rate(steps() - burn_in);
}

double PosteriorChain::trailing_acceptance_rate(long k) const {
    k = std::min<long>(k, steps());
    if (k <= 0) return 0.0;
    double s = 0.0;
    for (long i = steps() - k; i < steps(); ++i) s += accepted[static_cast<std::size_t>(i)];
    return s / static_cast<double>(k);
}

Eigen::MatrixXd PosteriorChain::post_burn_in_samples() const {
    return samples.bottomRows(samples.rows() - burn_in);
}

FragilityParams PosteriorChain::mean_params() const {
    const Eigen::VectorXd m = post_burn_in_samples().colwise().mean();
    const auto p = static_cast<Eigen::Index>(features.size());
    FragilityParams params;
    params.features = features;
    params.alpha = m.head(p);
    params.beta = m.tail(p);
    return params;
}

Eigen::VectorXd PosteriorChain::parameter_draws(Eigen::Index column) const {
    if (column < 0 || column >= samples.cols()) throw ContractError("parameter column out of range");
    return post_burn_in_samples().col(column);
}

PosteriorChain run_metropolis_hastings(const LogLikelihoodContext& ctx,
                                       const EmpiricalPrior& prior, McmcSettings settings,
                                       std::uint64_t rng_seed) {
    if (settings.burn_in < 0 || settings.steps <= settings.burn_in) {
        throw ContractError("mcmc: need steps > burn_in >= 0");
    }
    if (!(settings.target_accept > 0.0 && settings.target_accept < 1.0)) {
        throw ContractError("mcmc: target acceptance rate must be in (0,1)");
    }
    prior.validate();
    if (ctx.size() > 0 && prior.features != ctx.stress().features) {
        throw ContractError("mcmc: prior/context feature mismatch");
    }
    const auto features = prior.features;
    const auto d = prior.mean.size();
    const auto p = d / 2;

    const Eigen::MatrixXd prior_cov = clip_psd(prior.cov);
    const bool degenerate = prior_cov.trace() <= 1e-16;
    Eigen::MatrixXd jump_cov;
    if (degenerate) {
        // Zero-covariance prior: jump std of 1% of parameter magnitude.
        Eigen::VectorXd jump_sd(d);
        for (Eigen::Index i = 0; i < d; ++i) {
            jump_sd[i] = 0.01 * std::max(std::abs(prior.mean[i]), 1e-2);
        }
        jump_cov = jump_sd.array().square().matrix().asDiagonal();
    } else {
        jump_cov = prior_cov;
    }
    const MvNormal proposal(Eigen::VectorXd::Zero(d), jump_cov);
    const MvNormal prior_density(prior.mean, degenerate ? jump_cov : prior_cov);

    const auto log_posterior = [&](const Eigen::VectorXd& w) {
        // Flat prior in the degenerate fallback; MVN prior otherwise.
        const double lp = degenerate ? 0.0 : prior_density.log_density(w);
        return log_likelihood(ctx, from_working(w, features)) + lp;
    };

    Rng rng(rng_seed);
    PosteriorChain chain;
    chain.features = features;
    chain.samples.resize(settings.steps, d);
    chain.accepted.assign(static_cast<std::size_t>(settings.steps), 0);
    chain.scale.resize(settings.steps);
    chain.burn_in = settings.burn_in;
    chain.seed = rng_seed;
    chain.settings = settings;
    chain.degenerate_prior = degenerate;

    Eigen::VectorXd w = prior.mean;
    double lp = log_posterior(w);
    double s = 2.38 / std::sqrt(static_cast<double>(d));

    std::vector<std::uint8_t> window(100, 0);
    long window_count = 0;
    long last_change = -100;
    const double band = 0.05;

    for (long k = 0; k < settings.steps; ++k) {
        const Eigen::VectorXd w_star = w + proposal.sample_scaled(rng, s);
        const double lp_star = log_posterior(w_star);
        const double log_u = std::log(std::max(rng.uniform(), 1e-300));
        const bool acc = mh_accept(lp_star, lp, log_u);
        if (acc) {
            w = w_star;
            lp = lp_star;
        }
        chain.scale[k] = s;
        chain.accepted[static_cast<std::size_t>(k)] = acc ? 1 : 0;
        chain.samples.row(k).head(p) = w.head(p).transpose();
        chain.samples.row(k).tail(p) = w.tail(p).array().exp().transpose();

        window_count += acc - window[static_cast<std::size_t>(k % 100)];
        window[static_cast<std::size_t>(k % 100)] = acc ? 1 : 0;

        if (k < settings.burn_in) {
            if (k + 1 >= 100 && k - last_change >= 100) {
                const double rate = static_cast<double>(window_count) / 100.0;
                if (rate > settings.target_accept + band) {
                    s *= 1.1;
                    last_change = k;
                } else if (rate < settings.target_accept - band) {
                    s *= 0.9;
                    last_change = k;
                }
            }
            if (k + 1 == settings.burn_in) {
                // Freeze at the median scale over the last half of burn-in;
                // smoother than the instantaneous last value.
                const long lo = settings.burn_in / 2;
                std::vector<double> hist(chain.scale.data() + lo,
                                         chain.scale.data() + settings.burn_in);
                std::sort(hist.begin(), hist.end());
                s = hist[hist.size() / 2];
            }
        }
    }
    return chain;
}

std::vector<ParamSummary> posterior_summary(const PosteriorChain& chain) {
    if (chain.post_burn_in_length() < 100) {
        throw ContractError("posterior_summary: need at least 100 post-burn-in samples");
    }
    const Eigen::MatrixXd post = chain.post_burn_in_samples();
    const auto p = static_cast<Eigen::Index>(chain.features.size());
    std::vector<ParamSummary> out;
    for (Eigen::Index c = 0; c < post.cols(); ++c) {
        ParamSummary s;
        s.name = (c < p ? "alpha_" : "beta_") + chain.features[static_cast<std::size_t>(c % p)];
        std::vector<double> v(post.col(c).begin(), post.col(c).end());
        std::sort(v.begin(), v.end());
        const double n = static_cast<double>(v.size());
        s.mean = post.col(c).mean();
        s.stddev = std::sqrt((post.col(c).array() - s.mean).square().sum() / std::max(1.0, n - 1.0));
        s.p5 = percentile_sorted(v, 0.05);
        s.p25 = percentile_sorted(v, 0.25);
        s.p50 = percentile_sorted(v, 0.50);
        s.p75 = percentile_sorted(v, 0.75);
        s.p95 = percentile_sorted(v, 0.95);
        out.push_back(std::move(s));
    }
    return out;
}

void save_chain_csv(const PosteriorChain& chain, const std::filesystem::path& csv_path,
                    const std::filesystem::path& meta_path) {
    const auto p = static_cast<Eigen::Index>(chain.features.size());
    std::ostringstream out;
    out << "step,accepted,scale";
    for (const auto& f : chain.features) out << ",alpha_" << f;
    for (const auto& f : chain.features) out << ",beta_" << f;
    out << '\n';
    for (long k = 0; k < chain.steps(); ++k) {
        out << k << ',' << static_cast<int>(chain.accepted[static_cast<std::size_t>(k)]) << ','
            << format_double(chain.scale[k]);
        for (Eigen::Index c = 0; c < 2 * p; ++c) out << ',' << format_double(chain.samples(k, c));
        out << '\n';
    }
    write_text_file(csv_path, out.str());

    nlohmann::json meta{
        {"features", chain.features},
        {"steps", chain.settings.steps},
        {"burn_in", chain.settings.burn_in},
        {"target_accept", chain.settings.target_accept},
        {"seed", chain.seed},
        {"degenerate_prior", chain.degenerate_prior},
        {"acceptance_rate", chain.acceptance_rate()},
        {"post_burn_in_acceptance_rate", chain.post_burn_in_acceptance_rate()},
    };
    write_text_file(meta_path, meta.dump(2) + "\n");
}

PosteriorChain load_chain_csv(const std::filesystem::path& csv_path,
                              const std::filesystem::path& meta_path) {
    const auto meta = nlohmann::json::parse(read_text_file(meta_path));
    PosteriorChain chain;
    chain.features = meta.at("features").get<std::vector<std::string>>();
    chain.settings.steps = meta.at("steps").get<long>();
    chain.settings.burn_in = meta.at("burn_in").get<long>();
    chain.settings.target_accept = meta.at("target_accept").get<double>();
    chain.seed = meta.at("seed").get<std::uint64_t>();
    chain.degenerate_prior = meta.at("degenerate_prior").get<bool>();
    chain.burn_in = chain.settings.burn_in;

    const auto lines = read_lines(csv_path);
    if (lines.size() < 2) throw ParseError(csv_path.string() + ": empty chain");
    const auto d = static_cast<Eigen::Index>(2 * chain.features.size());
    const long n = static_cast<long>(lines.size()) - 1;
    chain.samples.resize(n, d);
    chain.scale.resize(n);
    chain.accepted.assign(static_cast<std::size_t>(n), 0);
    for (long k = 0; k < n; ++k) {
        const auto cells = split_csv_line(lines[static_cast<std::size_t>(k) + 1]);
        if (static_cast<Eigen::Index>(cells.size()) != 3 + d) {
            throw ParseError(csv_path.string() + ":" + std::to_string(k + 2) + ": bad field count");
        }
        chain.accepted[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(std::stoi(cells[1]));
        chain.scale[k] = std::stod(cells[2]);
        for (Eigen::Index c = 0; c < d; ++c) {
            chain.samples(k, c) = std::stod(cells[static_cast<std::size_t>(3 + c)]);
        }
    }
    return chain;
}

} // namespace fragtk
