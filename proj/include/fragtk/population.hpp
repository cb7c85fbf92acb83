#pragma once

#include "fragtk/fragility.hpp"
#include "fragtk/stress.hpp"

#include <Eigen/Dense>

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>

namespace fragtk {

/// Ground-truth description of a heterogeneous component population: per
/// feature, alpha ~ Normal(mean, (cov*mean)^2) truncated at 0 and a constant
/// slope beta shared by every component.
struct PopulationSpec {
    std::vector<std::string> features;
    Eigen::VectorXd alpha_mean; // > 0, native units
    Eigen::VectorXd alpha_cov;  // coefficient of variation, >= 0
    Eigen::VectorXd beta;       // > 0
    long n_components = 0;

    /// Shared parameters of the cov = 0 limit (and policy "true" source).
    FragilityParams mean_params() const;
    void validate() const;

    nlohmann::json to_json() const;
    static PopulationSpec from_json(const nlohmann::json& j);
};

/// N sampled components; row j of `alphas` holds component j's thresholds.
struct ComponentPopulation {
    std::vector<std::string> features;
    Eigen::MatrixXd alphas; // N x p
    Eigen::VectorXd beta;   // p, shared

    long size() const { return static_cast<long>(alphas.rows()); }
    FragilityParams component(long j) const;
    bool homogeneous() const;
};

/// Observed system-wide failure counts aligned with a stress series.
struct FailureRecord {
    std::vector<std::int64_t> timestamps;
    Eigen::VectorXi counts;

    Eigen::Index size() const { return counts.size(); }
    void validate() const;
};

ComponentPopulation draw_population(const PopulationSpec& spec, std::uint64_t rng_seed);

/// Per-timestep rate of the heterogeneous population: lambda_t = sum_j g_j(x_t)
/// (exact per-component sums; reduces to N*g(x_t) for a homogeneous population).
Eigen::VectorXd population_failure_rates(const ComponentPopulation& pop,
                                         const StressSeries& stress);

/// y_t ~ Poisson(lambda_t); the per-timestep random streams are split from the
/// seed, so draws are order-independent across timesteps.
FailureRecord simulate_failures(const ComponentPopulation& pop, const StressSeries& stress,
                                std::uint64_t rng_seed);

void save_failure_csv(const FailureRecord& record, const std::filesystem::path& path);
FailureRecord load_failure_csv(const std::filesystem::path& path);

} // namespace fragtk
