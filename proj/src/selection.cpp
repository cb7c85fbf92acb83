#include "fragtk/selection.hpp"

#include "fragtk/csv.hpp"
#include "fragtk/dists.hpp"
#include "fragtk/errors.hpp"
#include "fragtk/mvnormal.hpp"
#include "fragtk/rng.hpp"

#include <cmath>
#include <sstream>

namespace fragtk {

CandidateModel fit_candidate(const LogLikelihoodContext& full_ctx, std::string id,
                             const std::vector<std::string>& features) {
    CandidateModel m;
    m.id = std::move(id);
    m.features = features;
    m.context = std::make_shared<LogLikelihoodContext>(full_ctx.with_features(features));
    m.fit = fit_mle(*m.context);
    return m;
}

double bic_value(double log_lik, int k_params, double n_obs) {
    return -2.0 * log_lik + static_cast<double>(k_params) * std::log(n_obs);
}

double bic_score(const CandidateModel& model) {
    if (!model.fitted()) throw ContractError("bic_score: candidate '" + model.id + "' not fitted");
    return bic_value(model.fit->log_lik, model.parameter_count(),
                     static_cast<double>(model.n_observations()));
}

LogMarginal marginal_likelihood_mc(const CandidateModel& model, const EmpiricalPrior& prior,
                                   int n_draws, std::uint64_t rng_seed) {
    if (n_draws < 1000) throw ValidationError("marginal_likelihood_mc: n_draws must be >= 1000");
    if (!model.context) throw ContractError("marginal_likelihood_mc: candidate has no data context");
    prior.validate();
    const MvNormal sampler(prior.mean, prior.cov);
    Rng rng(rng_seed);
    std::vector<double> logs(static_cast<std::size_t>(n_draws));
    for (int i = 0; i < n_draws; ++i) {
        const FragilityParams theta = from_working(sampler.sample(rng), model.features);
        logs[static_cast<std::size_t>(i)] = log_likelihood(*model.context, theta);
    }
    const double lse = log_sum_exp(logs);
    if (!std::isfinite(lse)) {
        throw DataError("marginal_likelihood_mc: every prior draw underflowed the likelihood");
    }
    // Delta method on the log of the mean.
    const double m = *std::max_element(logs.begin(), logs.end());
    double sum = 0.0, sum2 = 0.0;
    for (double l : logs) {
        const double a = std::exp(l - m);
        sum += a;
        sum2 += a * a;
    }
    const double n = static_cast<double>(n_draws);
    const double mean_a = sum / n;
    const double var_a = std::max(0.0, sum2 / n - mean_a * mean_a);
    const double se_log = std::sqrt(var_a / n) / mean_a;

    LogMarginal out;
    out.log_value = lse - std::log(n);
    out.std_error = se_log;
    out.n_draws = n_draws;
    return out;
}

SelectionResult select_model(const std::vector<CandidateModel>& candidates) {
    if (candidates.empty()) throw ContractError("select_model: no candidates");
    std::vector<double> bics(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) bics[i] = bic_score(candidates[i]);

    std::size_t winner = 0;
    bool tie = false;
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        const double diff = bics[i] - bics[winner];
        if (std::abs(diff) < 1e-9) {
            tie = true;
            if (candidates[i].parameter_count() < candidates[winner].parameter_count()) winner = i;
        } else if (diff < 0.0) {
            winner = i;
        }
    }

    SelectionResult result;
    result.winner = winner;
    result.tie = tie;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        ScoreRow row;
        row.model_id = candidates[i].id;
        std::ostringstream label;
        for (std::size_t j = 0; j < candidates[i].features.size(); ++j) {
            label << (j ? "+" : "") << candidates[i].features[j];
        }
        row.features_label = label.str();
        row.k_params = candidates[i].parameter_count();
        row.n_obs = candidates[i].n_observations();
        row.log_lik = candidates[i].fit->log_lik;
        row.bic = bics[i];
        row.delta_bic = bics[i] - bics[winner];
        result.table.push_back(std::move(row));
    }
    return result;
}

std::string selection_table_csv(const SelectionResult& result) {
    std::ostringstream out;
    out << "model_id,features,K,n,log_lik,bic,delta_bic,log_marginal\n";
    for (const auto& r : result.table) {
        out << r.model_id << ',' << r.features_label << ',' << r.k_params << ',' << r.n_obs << ','
            << format_double(r.log_lik) << ',' << format_double(r.bic) << ','
            << format_double(r.delta_bic) << ','
            << (r.log_marginal ? format_double(*r.log_marginal) : std::string()) << '\n';
    }
    return out.str();
}

} // namespace fragtk
