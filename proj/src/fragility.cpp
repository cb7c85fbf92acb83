#include "fragtk/fragility.hpp"

#include "fragtk/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

namespace fragtk {

void FragilityParams::validate() const {
    const auto p = alpha.size();
    if (p < 1) throw ValidationError("fragility params need at least one feature");
    if (beta.size() != p || static_cast<Eigen::Index>(features.size()) != p) {
        throw ValidationError("fragility params: feature/alpha/beta size mismatch");
    }
    if (!alpha.allFinite() || !beta.allFinite()) {
        throw ValidationError("fragility params must be finite");
    }
    if ((beta.array() <= 0.0).any()) {
        throw ValidationError("fragility slope beta must be > 0 for every feature");
    }
}

nlohmann::json FragilityParams::to_json() const {
    return nlohmann::json{
        {"features", features},
        {"alpha", std::vector<double>(alpha.begin(), alpha.end())},
        {"beta", std::vector<double>(beta.begin(), beta.end())},
    };
}

FragilityParams FragilityParams::from_json(const nlohmann::json& j) {
    FragilityParams p;
    p.features = j.at("features").get<std::vector<std::string>>();
    const auto a = j.at("alpha").get<std::vector<double>>();
    const auto b = j.at("beta").get<std::vector<double>>();
    p.alpha = Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()));
    p.beta = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
    p.validate();
    return p;
}

double failure_probability(const FragilityParams& params, const Eigen::VectorXd& x) {
    if (x.size() != params.alpha.size()) {
        throw ContractError("failure_probability: stress dimension does not match params");
    }
    if (!x.allFinite()) throw ContractError("failure_probability: stress vector must be finite");
    return logistic(params.beta.dot(x - params.alpha));
}

double system_failure_rate(const FragilityParams& params, const Eigen::VectorXd& x,
                           long n_components) {
    if (n_components < 1) throw ContractError("system_failure_rate: n_components must be >= 1");
    return static_cast<double>(n_components) * failure_probability(params, x);
}

Eigen::VectorXd failure_probability_series(const FragilityParams& params,
                                           const Eigen::MatrixXd& X) {
    if (X.cols() != params.alpha.size()) {
        throw ContractError("failure_probability_series: feature-count mismatch");
    }
    Eigen::ArrayXd z = (X * params.beta).array() - params.beta.dot(params.alpha);
    z = z.min(kLogisticClamp).max(-kLogisticClamp);
    return (1.0 / (1.0 + (-z).exp())).matrix();
}

} // namespace fragtk
