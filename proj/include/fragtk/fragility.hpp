#pragma once

#include <Eigen/Dense>

#include <nlohmann/json_fwd.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace fragtk {

/// Exponent clamp applied before every logistic evaluation; keeps exp() finite
/// while leaving probabilities correct to machine precision in the clamped
/// regime.
inline constexpr double kLogisticClamp = 700.0;

/// 1 / (1 + exp(-z)) with the exponent clamped to +-kLogisticClamp.
inline double logistic(double z) {
    z = std::clamp(z, -kLogisticClamp, kLogisticClamp);
    return 1.0 / (1.0 + std::exp(-z));
}

/// One parameterization of the logistic fragility curve: a threshold alpha
/// (stress level where the failure probability is 0.5) and a slope beta > 0
/// per feature, in the feature's native units.
struct FragilityParams {
    std::vector<std::string> features;
    Eigen::VectorXd alpha;
    Eigen::VectorXd beta;

    Eigen::Index feature_count() const { return alpha.size(); }
    void validate() const;

    nlohmann::json to_json() const;
    static FragilityParams from_json(const nlohmann::json& j);
};

/// g(x) = 1 / (1 + exp(-sum_i beta_i (x_i - alpha_i))); strictly inside (0,1).
double failure_probability(const FragilityParams& params, const Eigen::VectorXd& x);

/// Poisson rate of system-wide failures, lambda = N * g(x).
double system_failure_rate(const FragilityParams& params, const Eigen::VectorXd& x,
                           long n_components);

/// g(x_t) for every row of X (n x p), one shared parameterization.
Eigen::VectorXd failure_probability_series(const FragilityParams& params,
                                           const Eigen::MatrixXd& X);

} // namespace fragtk
