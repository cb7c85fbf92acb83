#pragma once

#include "fragtk/inference.hpp"

#include <memory>
#include <optional>

namespace fragtk {

/// One fitted model structure (feature subset) competing for selection.
struct CandidateModel {
    std::string id;
    std::vector<std::string> features;
    std::shared_ptr<const LogLikelihoodContext> context;
    std::optional<MleResult> fit;

    bool fitted() const { return fit.has_value(); }
    int parameter_count() const { return 2 * static_cast<int>(features.size()); }
    long n_observations() const { return context ? static_cast<long>(context->size()) : 0; }
};

/// Build and fit a candidate on a feature subset of the full context.
CandidateModel fit_candidate(const LogLikelihoodContext& full_ctx, std::string id,
                             const std::vector<std::string>& features);

/// BIC = -2 log(l) + K log(n); pure arithmetic.
double bic_value(double log_lik, int k_params, double n_obs);

/// BIC of a fitted candidate at its maximized likelihood.
double bic_score(const CandidateModel& model);

struct LogMarginal {
    double log_value = 0.0;
    double std_error = 0.0;
    int n_draws = 0;
};

/// log of the prior-sample Monte Carlo average of the likelihood (log-sum-exp),
/// with a delta-method standard error on the log estimate.
LogMarginal marginal_likelihood_mc(const CandidateModel& model, const EmpiricalPrior& prior,
                                   int n_draws, std::uint64_t rng_seed);

struct ScoreRow {
    std::string model_id;
    std::string features_label;
    int k_params = 0;
    long n_obs = 0;
    double log_lik = 0.0;
    double bic = 0.0;
    double delta_bic = 0.0;
    std::optional<double> log_marginal;
};

struct SelectionResult {
    std::size_t winner = 0;     // index into the candidate list as passed
    std::vector<ScoreRow> table; // in input order
    bool tie = false;
};

/// argmin of bic_score; ties resolve to the lowest-K candidate and are flagged.
SelectionResult select_model(const std::vector<CandidateModel>& candidates);

std::string selection_table_csv(const SelectionResult& result);

} // namespace fragtk
