#pragma once

#include "fragtk/dists.hpp"
#include "fragtk/inference.hpp"
#include "fragtk/policy.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fragtk {

struct ScenarioSpec {
    std::string id;
    double alpha_mean = 0.0;
    double cov = 0.0;
};

/// Declarative experiment description; every random stream derives from
/// base_seed so a config pins the whole pipeline byte-for-byte.
struct ExperimentConfig {
    std::filesystem::path output_dir;
    std::uint64_t base_seed = 1;
    long n_components = 10000;
    int years = 10;

    std::vector<std::string> stress_features;     // generation order
    std::vector<LogNormalParams> stress_marginals;
    std::string stress_file; // optional CSV; replaces synthesis when set

    double true_beta = 0.2;
    std::vector<std::string> model_features; // truth and fitted-model features
    std::vector<std::vector<std::string>> candidate_models;

    std::vector<double> alpha_means;
    std::vector<double> cov_levels;

    McmcSettings sampler;
    int n_boot = 50;
    int block_hours = 168;

    int eval_n_mc = 20000;
    int marginal_draws = 4000;
    int curve_thetas = 1000;

    double risk_delta_fraction = 0.1;
    double risk_epsilon = 0.05;
    long risk_horizon = 8760;
    int policy_n_mc = 200;
    double policy_tol = 0.01;

    int workers = 1;

    static ExperimentConfig from_json_file(const std::filesystem::path& path);
    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    void validate() const;

    std::vector<ScenarioSpec> grid() const;
    long stress_hours() const { return static_cast<long>(years) * 8760; }
    RiskTarget risk_target() const;

    /// Deterministic stream id for one (purpose, scenario) pair.
    std::uint64_t seed_for(const std::string& purpose, const std::string& scenario_id = "") const;
};

/// Filesystem layout of one scenario cell under the output directory.
struct ScenarioPaths {
    std::filesystem::path dir;
    std::filesystem::path stress;
    std::filesystem::path failures;
    std::filesystem::path population;
    std::filesystem::path manifest;
    std::filesystem::path mle;
    std::filesystem::path prior;
    std::filesystem::path chain;
    std::filesystem::path chain_meta;
    std::filesystem::path summary;
    std::filesystem::path selection;
    std::filesystem::path divergence;
    std::filesystem::path upgrade_table;

    std::filesystem::path upgrade_json(const std::string& source) const;
    static ScenarioPaths in(const std::filesystem::path& outdir, const std::string& scenario_id);
};

struct RunOptions {
    std::string scenario_filter; // empty = all
    bool force = false;
    std::optional<std::uint64_t> seed_override;
    int workers_override = 0; // 0 = config value
};

/// Exit codes: 0 success, 2 validation failure, 3 missing prerequisites.
int cmd_generate(const ExperimentConfig& config, const RunOptions& opt);
int cmd_fit(const ExperimentConfig& config, const RunOptions& opt);
int cmd_select(const ExperimentConfig& config, const RunOptions& opt);
int cmd_evaluate(const ExperimentConfig& config, const RunOptions& opt);
int cmd_upgrade(const ExperimentConfig& config, const RunOptions& opt);
int cmd_report(const ExperimentConfig& config, const RunOptions& opt);
int cmd_run_all(const ExperimentConfig& config, const RunOptions& opt);

} // namespace fragtk
