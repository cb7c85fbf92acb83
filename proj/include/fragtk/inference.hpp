#pragma once

#include "fragtk/fragility.hpp"
#include "fragtk/population.hpp"
#include "fragtk/stress.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fragtk {

/// Aligned (stress, failure-count) data plus the component count N; owns its
/// inputs and caches what the Poisson log-likelihood reuses on every call.
class LogLikelihoodContext {
public:
    LogLikelihoodContext(StressSeries stress, FailureRecord record, long n_components);

    const StressSeries& stress() const { return stress_; }
    const FailureRecord& record() const { return record_; }
    long n_components() const { return n_components_; }
    Eigen::Index size() const { return record_.size(); }
    bool has_failures() const { return !failure_rows_.empty(); }
    long total_failures() const { return total_failures_; }

    /// Rows with y_t > 0 and their counts, in row order.
    const std::vector<Eigen::Index>& failure_rows() const { return failure_rows_; }
    const Eigen::VectorXd& failure_counts() const { return failure_counts_; }
    /// sum_t log(y_t!)
    double log_factorial_sum() const { return log_factorial_sum_; }

    /// Context on the same record but a feature subset of the stress matrix.
    LogLikelihoodContext with_features(const std::vector<std::string>& names) const;

private:
    StressSeries stress_;
    FailureRecord record_;
    long n_components_ = 0;
    std::vector<Eigen::Index> failure_rows_;
    Eigen::VectorXd failure_counts_;
    double log_factorial_sum_ = 0.0;
    long total_failures_ = 0;
};

/// sum_t [ y_t log(lambda_t) - lambda_t - log(y_t!) ] with lambda_t = N g(x_t),
/// floored at 1e-300 so the result is finite for every valid input.
double log_likelihood(const LogLikelihoodContext& ctx, const FragilityParams& params);

/// Sampler/optimizer working space: w = (alpha_1..alpha_p, log beta_1..log beta_p).
Eigen::VectorXd to_working(const FragilityParams& params);
FragilityParams from_working(const Eigen::VectorXd& w, const std::vector<std::string>& features);

struct MleResult {
    FragilityParams params;
    double log_lik = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// Scale-aware starting point: alpha_0 = 95th percentile of stress on failure
/// hours, beta_0 = 0.1.
FragilityParams default_mle_init(const LogLikelihoodContext& ctx);

/// Nelder-Mead ascent in working space, then a small-simplex polish pass.
/// Throws DataError when the record carries no failures at all.
MleResult fit_mle(const LogLikelihoodContext& ctx, const FragilityParams& init);
MleResult fit_mle(const LogLikelihoodContext& ctx);

/// Moment-matched normal prior over (alpha, log beta) built from MLE fits to
/// block-bootstrap replicates of the timestep index.
struct EmpiricalPrior {
    std::vector<std::string> features;
    Eigen::VectorXd mean;  // 2p
    Eigen::MatrixXd cov;   // 2p x 2p, symmetric PSD (eigenvalues clipped at 0)
    int n_boot = 0;
    int n_failed = 0;

    void validate() const;
    nlohmann::json to_json() const;
    static EmpiricalPrior from_json(const nlohmann::json& j);
};

EmpiricalPrior bootstrap_prior(const LogLikelihoodContext& ctx, int n_boot, int block_hours,
                               std::uint64_t rng_seed);

struct McmcSettings {
    long steps = 50000;
    long burn_in = 10000;
    double target_accept = 0.25;
};

/// Eq.-style acceptance rule: take the proposal when its log-posterior is at
/// least the current one, otherwise when log(u) < difference.
bool mh_accept(double log_post_proposed, double log_post_current, double log_u);

/// Random-walk Metropolis-Hastings output. Samples are stored in natural
/// space (alpha..., beta...), one row per step including burn-in.
struct PosteriorChain {
    std::vector<std::string> features;
    Eigen::MatrixXd samples;        // steps x 2p
    std::vector<std::uint8_t> accepted;
    Eigen::VectorXd scale;          // proposal scale s at each step
    long burn_in = 0;
    std::uint64_t seed = 0;
    McmcSettings settings;
    bool degenerate_prior = false;

    long steps() const { return static_cast<long>(samples.rows()); }
    long post_burn_in_length() const { return steps() - burn_in; }
    double acceptance_rate() const;
    double post_burn_in_acceptance_rate() const;
    /// Acceptance rate over the trailing `k` steps.
    double trailing_acceptance_rate(long k) const;
    Eigen::MatrixXd post_burn_in_samples() const;
    /// Posterior-mean parameters over the post-burn-in samples.
    FragilityParams mean_params() const;
    /// Post-burn-in draws of one parameter column (alphas first, then betas).
    Eigen::VectorXd parameter_draws(Eigen::Index column) const;
};

/// Proposal z ~ MVN(0, s^2 prior.cov); burn-in-only scale adaptation toward
/// the target acceptance rate; s frozen after burn-in. A zero-covariance
/// prior falls back to a diagonal jump of 1% of parameter magnitude and a
/// flat prior density, and is flagged on the chain.
PosteriorChain run_metropolis_hastings(const LogLikelihoodContext& ctx,
                                       const EmpiricalPrior& prior, McmcSettings settings,
                                       std::uint64_t rng_seed);

struct ParamSummary {
    std::string name;
    double mean = 0, stddev = 0, p5 = 0, p25 = 0, p50 = 0, p75 = 0, p95 = 0;
};

/// Post-burn-in summaries; ContractError when fewer than 100 samples remain.
std::vector<ParamSummary> posterior_summary(const PosteriorChain& chain);

void save_chain_csv(const PosteriorChain& chain, const std::filesystem::path& csv_path,
                    const std::filesystem::path& meta_path);
PosteriorChain load_chain_csv(const std::filesystem::path& csv_path,
                              const std::filesystem::path& meta_path);

} // namespace fragtk
