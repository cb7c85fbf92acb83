#include "fragtk/experiment.hpp"

#include "fragtk/csv.hpp"
#include "fragtk/errors.hpp"
#include "fragtk/evaluation.hpp"
#include "fragtk/selection.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <cstdio>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace fragtk {

namespace {

std::mutex g_print_mutex;

void say(const std::string& line) {
    std::lock_guard<std::mutex> lock(g_print_mutex);
    std::cout << line << "\n";
}

std::string trim_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

bool all_exist(std::initializer_list<std::filesystem::path> paths) {
    for (const auto& p : paths) {
        if (!std::filesystem::exists(p)) return false;
    }
    return true;
}

void require_file(const std::filesystem::path& p) {
    if (!std::filesystem::exists(p)) {
        throw MissingInputError("missing required input: " + p.string());
    }
}

// Run fn(i) over [0, n) on up to `workers` threads; rethrows the first error.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    const int count = std::min<int>(workers, static_cast<int>(n));
    threads.reserve(static_cast<std::size_t>(count));
    for (int t = 0; t < count; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace

ExperimentConfig ExperimentConfig::from_json_file(const std::filesystem::path& path) {
    try {
        return from_json(nlohmann::json::parse(read_text_file(path)));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    try {
        c.output_dir = j.at("output_dir").get<std::string>();
        c.base_seed = j.at("base_seed").get<std::uint64_t>();
        c.n_components = j.at("n_components").get<long>();
        c.years = j.at("years").get<int>();
        for (const auto& f : j.at("stress_features")) {
            c.stress_features.push_back(f.at("name").get<std::string>());
            c.stress_marginals.push_back(
                LogNormalParams{f.at("log_mean").get<double>(), f.at("log_std").get<double>()});
        }
        c.stress_file = j.value("stress_file", std::string());
        c.true_beta = j.at("true_beta").get<double>();
        c.model_features = j.at("model_features").get<std::vector<std::string>>();
        c.candidate_models = j.at("candidate_models").get<std::vector<std::vector<std::string>>>();
        c.alpha_means = j.at("alpha_means").get<std::vector<double>>();
        c.cov_levels = j.at("cov_levels").get<std::vector<double>>();
        const auto& s = j.at("sampler");
        c.sampler.steps = s.at("steps").get<long>();
        c.sampler.burn_in = s.at("burn_in").get<long>();
        c.sampler.target_accept = s.value("target_accept", 0.25);
        const auto& b = j.at("bootstrap");
        c.n_boot = b.at("n_boot").get<int>();
        c.block_hours = b.at("block_hours").get<int>();
        const auto& e = j.at("evaluation");
        c.eval_n_mc = e.at("n_mc").get<int>();
        c.marginal_draws = e.at("marginal_draws").get<int>();
        c.curve_thetas = e.value("curve_thetas", 1000);
        const auto& r = j.at("risk");
        c.risk_delta_fraction = r.at("delta_fraction").get<double>();
        c.risk_epsilon = r.at("epsilon").get<double>();
        c.risk_horizon = r.value("horizon_hours", 8760L);
        c.policy_n_mc = r.at("n_mc").get<int>();
        c.policy_tol = r.at("solver_tol").get<double>();
        c.workers = j.value("workers", 1);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json feats = nlohmann::json::array();
    for (std::size_t i = 0; i < stress_features.size(); ++i) {
        feats.push_back({{"name", stress_features[i]},
                         {"log_mean", stress_marginals[i].log_mean},
                         {"log_std", stress_marginals[i].log_std}});
    }
    return nlohmann::json{
        {"output_dir", output_dir.string()},
        {"base_seed", base_seed},
        {"n_components", n_components},
        {"years", years},
        {"stress_features", feats},
        {"stress_file", stress_file},
        {"true_beta", true_beta},
        {"model_features", model_features},
        {"candidate_models", candidate_models},
        {"alpha_means", alpha_means},
        {"cov_levels", cov_levels},
        {"sampler",
         {{"steps", sampler.steps}, {"burn_in", sampler.burn_in}, {"target_accept", sampler.target_accept}}},
        {"bootstrap", {{"n_boot", n_boot}, {"block_hours", block_hours}}},
        {"evaluation",
         {{"n_mc", eval_n_mc}, {"marginal_draws", marginal_draws}, {"curve_thetas", curve_thetas}}},
        {"risk",
         {{"delta_fraction", risk_delta_fraction},
          {"epsilon", risk_epsilon},
          {"horizon_hours", risk_horizon},
          {"n_mc", policy_n_mc},
          {"solver_tol", policy_tol}}},
        {"workers", workers},
    };
}

void ExperimentConfig::validate() const {
    if (output_dir.empty()) throw ValidationError("config: output_dir is required");
    if (n_components < 1) throw ValidationError("config: n_components must be >= 1");
    if (years < 1 && stress_file.empty()) throw ValidationError("config: years must be >= 1");
    if (stress_features.empty()) throw ValidationError("config: at least one stress feature");
    if (stress_features.size() != stress_marginals.size()) {
        throw ValidationError("config: stress feature/marginal mismatch");
    }
    if (model_features.empty()) throw ValidationError("config: model_features is required");
    for (const auto& f : model_features) {
        if (std::find(stress_features.begin(), stress_features.end(), f) == stress_features.end()) {
            throw ValidationError("config: model feature '" + f + "' not in stress features");
        }
    }
    if (alpha_means.empty() || cov_levels.empty()) {
        throw ValidationError("config: scenario grid must be non-empty");
    }
    for (double a : alpha_means) {
        if (!(a > 0.0)) throw ValidationError("config: alpha means must be > 0");
    }
    for (double v : cov_levels) {
        if (!(v >= 0.0)) throw ValidationError("config: cov levels must be >= 0");
    }
    if (!(true_beta > 0.0)) throw ValidationError("config: true_beta must be > 0");
    if (!(risk_delta_fraction >= 0.0 && risk_delta_fraction <= 1.0)) {
        throw ValidationError("config: risk delta_fraction must be in [0,1]");
    }
    RiskTarget{risk_delta_fraction * static_cast<double>(n_components), risk_epsilon, risk_horizon}
        .validate();
    if (sampler.burn_in < 0 || sampler.steps <= sampler.burn_in) {
        throw ValidationError("config: sampler needs steps > burn_in >= 0");
    }
}

std::vector<ScenarioSpec> ExperimentConfig::grid() const {
    std::vector<ScenarioSpec> cells;
    for (double a : alpha_means) {
        for (double v : cov_levels) {
            ScenarioSpec s;
            s.alpha_mean = a;
            s.cov = v;
            s.id = "a" + trim_number(a) + "_cov" + trim_number(v);
            cells.push_back(std::move(s));
        }
    }
    return cells;
}

RiskTarget ExperimentConfig::risk_target() const {
    return RiskTarget{risk_delta_fraction * static_cast<double>(n_components), risk_epsilon,
                      risk_horizon};
}

std::uint64_t ExperimentConfig::seed_for(const std::string& purpose,
                                         const std::string& scenario_id) const {
    return splitmix64(base_seed ^ fnv1a64(purpose + "|" + scenario_id));
}

std::filesystem::path ScenarioPaths::upgrade_json(const std::string& source) const {
    return dir / ("upgrade_" + source + ".json");
}

ScenarioPaths ScenarioPaths::in(const std::filesystem::path& outdir, const std::string& id) {
    ScenarioPaths p;
    p.dir = outdir / id;
    p.stress = p.dir / "stress.csv";
    p.failures = p.dir / "failures.csv";
    p.population = p.dir / "population.json";
    p.manifest = p.dir / "manifest.json";
    p.mle = p.dir / "mle.json";
    p.prior = p.dir / "prior.json";
    p.chain = p.dir / "chain.csv";
    p.chain_meta = p.dir / "chain_meta.json";
    p.summary = p.dir / "posterior_summary.csv";
    p.selection = p.dir / "selection.csv";
    p.divergence = p.dir / "divergence.csv";
    p.upgrade_table = p.dir / "upgrade_table.csv";
    return p;
}

namespace {

ExperimentConfig effective_config(const ExperimentConfig& config, const RunOptions& opt) {
    ExperimentConfig c = config;
    if (opt.seed_override) c.base_seed = *opt.seed_override;
    if (opt.workers_override > 0) c.workers = opt.workers_override;
    return c;
}

std::vector<ScenarioSpec> selected_grid(const ExperimentConfig& config, const RunOptions& opt) {
    auto cells = config.grid();
    if (opt.scenario_filter.empty()) return cells;
    std::vector<ScenarioSpec> out;
    for (auto& c : cells) {
        if (c.id == opt.scenario_filter) out.push_back(c);
    }
    if (out.empty()) {
        throw ValidationError("unknown scenario id: " + opt.scenario_filter);
    }
    return out;
}

PopulationSpec scenario_population_spec(const ExperimentConfig& config, const ScenarioSpec& cell) {
    PopulationSpec spec;
    spec.features = config.model_features;
    const auto p = static_cast<Eigen::Index>(config.model_features.size());
    spec.alpha_mean = Eigen::VectorXd::Constant(p, cell.alpha_mean);
    spec.alpha_cov = Eigen::VectorXd::Constant(p, cell.cov);
    spec.beta = Eigen::VectorXd::Constant(p, config.true_beta);
    spec.n_components = config.n_components;
    return spec;
}

StressSeries obtain_stress(const ExperimentConfig& config) {
    if (!config.stress_file.empty()) {
        return load_stress_csv(config.stress_file, config.stress_features);
    }
    StressDistribution dist;
    dist.features = config.stress_features;
    dist.marginals = config.stress_marginals;
    return synthesize_stress(dist, config.stress_hours(), config.seed_for("stress"));
}

void write_manifest(const ExperimentConfig& config, const ScenarioSpec& cell,
                    const ScenarioPaths& paths) {
    nlohmann::json files;
    for (const auto& p : {paths.stress, paths.failures, paths.population}) {
        files[p.filename().string()] = {
            {"bytes", std::filesystem::file_size(p)},
            {"fnv1a64", hex64(fnv1a64_file(p))},
        };
    }
    nlohmann::json manifest{
        {"scenario", cell.id},
        {"seeds",
         {{"stress", config.seed_for("stress")},
          {"population", config.seed_for("population", cell.id)},
          {"failures", config.seed_for("failures", cell.id)}}},
        {"files", files},
    };
    write_text_file(paths.manifest, manifest.dump(2) + "\n");
}

void verify_manifest(const ScenarioPaths& paths) {
    if (!std::filesystem::exists(paths.manifest)) return; // nothing to verify against
    const auto manifest = nlohmann::json::parse(read_text_file(paths.manifest));
    for (const auto& [name, entry] : manifest.at("files").items()) {
        const auto p = paths.dir / name;
        require_file(p);
        if (hex64(fnv1a64_file(p)) != entry.at("fnv1a64").get<std::string>()) {
            throw ValidationError("manifest hash mismatch (corrupt file?): " + p.string());
        }
    }
}

nlohmann::json mle_to_json(const MleResult& mle) {
    return nlohmann::json{
        {"params", mle.params.to_json()},
        {"log_lik", mle.log_lik},
        {"converged", mle.converged},
        {"iterations", mle.iterations},
    };
}

MleResult mle_from_json(const nlohmann::json& j) {
    MleResult m;
    m.params = FragilityParams::from_json(j.at("params"));
    m.log_lik = j.at("log_lik").get<double>();
    m.converged = j.at("converged").get<bool>();
    m.iterations = j.at("iterations").get<int>();
    return m;
}

std::string summary_csv(const std::vector<ParamSummary>& rows) {
    std::ostringstream out;
    out << "parameter,mean,std,p5,p25,p50,p75,p95\n";
    for (const auto& s : rows) {
        out << s.name << ',' << format_double(s.mean) << ',' << format_double(s.stddev) << ','
            << format_double(s.p5) << ',' << format_double(s.p25) << ',' << format_double(s.p50)
            << ',' << format_double(s.p75) << ',' << format_double(s.p95) << '\n';
    }
    return out.str();
}

std::map<std::string, ParamSummary> load_summary(const std::filesystem::path& path) {
    std::map<std::string, ParamSummary> out;
    const auto lines = read_lines(path);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto c = split_csv_line(lines[i]);
        ParamSummary s;
        s.name = c.at(0);
        s.mean = std::stod(c.at(1));
        s.stddev = std::stod(c.at(2));
        s.p5 = std::stod(c.at(3));
        s.p25 = std::stod(c.at(4));
        s.p50 = std::stod(c.at(5));
        s.p75 = std::stod(c.at(6));
        s.p95 = std::stod(c.at(7));
        out[s.name] = s;
    }
    return out;
}

struct DivergenceRow {
    std::string metric;
    std::string level;
    double value;
};

std::string divergence_csv(const ScenarioSpec& cell, const std::vector<DivergenceRow>& rows) {
    std::ostringstream out;
    out << "scenario,cov,alpha_mean,metric,level,value\n";
    for (const auto& r : rows) {
        out << cell.id << ',' << trim_number(cell.cov) << ',' << trim_number(cell.alpha_mean) << ','
            << r.metric << ',' << r.level << ',' << format_double(r.value) << '\n';
    }
    return out.str();
}

} // namespace

int cmd_generate(const ExperimentConfig& raw, const RunOptions& opt) {
    const ExperimentConfig config = effective_config(raw, opt);
    const auto cells = selected_grid(config, opt);
    const StressSeries stress = obtain_stress(config);
    parallel_for(cells.size(), config.workers, [&](std::size_t i) {
        const auto& cell = cells[i];
        const auto paths = ScenarioPaths::in(config.output_dir, cell.id);
        if (!opt.force &&
            all_exist({paths.stress, paths.failures, paths.population, paths.manifest})) {
            say("[generate] " + cell.id + ": outputs exist, skipping (use --force to regenerate)");
            return;
        }
        std::filesystem::create_directories(paths.dir);
        const PopulationSpec spec = scenario_population_spec(config, cell);
        const ComponentPopulation pop =
            draw_population(spec, config.seed_for("population", cell.id));
        const FailureRecord record =
            simulate_failures(pop, stress.select_features(config.model_features),
                              config.seed_for("failures", cell.id));
        save_stress_csv(stress, paths.stress);
        save_failure_csv(record, paths.failures);
        nlohmann::json pj = spec.to_json();
        pj["draw_seed"] = config.seed_for("population", cell.id);
        write_text_file(paths.population, pj.dump(2) + "\n");
        write_manifest(config, cell, paths);
        long total = 0;
        for (Eigen::Index t = 0; t < record.size(); ++t) total += record.counts[t];
        say("[generate] " + cell.id + ": " + std::to_string(stress.size()) + " hours, " +
            std::to_string(total) + " failures");
    });
    return 0;
}

namespace {

struct ScenarioData {
    StressSeries stress;
    FailureRecord record;
    PopulationSpec spec;
};

ScenarioData load_scenario_data(const ExperimentConfig& config, const ScenarioPaths& paths) {
    require_file(paths.stress);
    require_file(paths.failures);
    require_file(paths.population);
    verify_manifest(paths);
    ScenarioData d;
    d.stress = load_stress_csv(paths.stress, config.stress_features);
    d.record = load_failure_csv(paths.failures);
    d.spec = PopulationSpec::from_json(nlohmann::json::parse(read_text_file(paths.population)));
    return d;
}

} // namespace

int cmd_fit(const ExperimentConfig& raw, const RunOptions& opt) {
    const ExperimentConfig config = effective_config(raw, opt);
    const auto cells = selected_grid(config, opt);
    parallel_for(cells.size(), config.workers, [&](std::size_t i) {
        const auto& cell = cells[i];
        const auto paths = ScenarioPaths::in(config.output_dir, cell.id);
        if (!opt.force &&
            all_exist({paths.mle, paths.prior, paths.chain, paths.chain_meta, paths.summary})) {
            say("[fit] " + cell.id + ": outputs exist, skipping");
            return;
        }
        const ScenarioData data = load_scenario_data(config, paths);
        LogLikelihoodContext ctx(data.stress.select_features(config.model_features), data.record,
                                 config.n_components);
        const MleResult mle = fit_mle(ctx);
        write_text_file(paths.mle, mle_to_json(mle).dump(2) + "\n");
        const EmpiricalPrior prior =
            bootstrap_prior(ctx, config.n_boot, config.block_hours,
                            config.seed_for("bootstrap", cell.id));
        write_text_file(paths.prior, prior.to_json().dump(2) + "\n");
        const PosteriorChain chain = run_metropolis_hastings(
            ctx, prior, config.sampler, config.seed_for("mcmc", cell.id));
        save_chain_csv(chain, paths.chain, paths.chain_meta);
        write_text_file(paths.summary, summary_csv(posterior_summary(chain)));
        say("[fit] " + cell.id + ": mle alpha=" + trim_number(mle.params.alpha[0]) +
            " accept=" + trim_number(chain.post_burn_in_acceptance_rate()));
    });
    return 0;
}

int cmd_select(const ExperimentConfig& raw, const RunOptions& opt) {
    const ExperimentConfig config = effective_config(raw, opt);
    const auto cells = selected_grid(config, opt);
    parallel_for(cells.size(), config.workers, [&](std::size_t i) {
        const auto& cell = cells[i];
        const auto paths = ScenarioPaths::in(config.output_dir, cell.id);
        if (!opt.force && all_exist({paths.selection})) {
            say("[select] " + cell.id + ": outputs exist, skipping");
            return;
        }
        const ScenarioData data = load_scenario_data(config, paths);
        LogLikelihoodContext full_ctx(data.stress, data.record, config.n_components);
        std::vector<CandidateModel> candidates;
        for (const auto& feats : config.candidate_models) {
            std::string id;
            for (std::size_t k = 0; k < feats.size(); ++k) id += (k ? "+" : "") + feats[k];
            candidates.push_back(fit_candidate(full_ctx, id, feats));
        }
        SelectionResult result = select_model(candidates);
        for (std::size_t k = 0; k < candidates.size(); ++k) {
            const auto& cand = candidates[k];
            const EmpiricalPrior prior =
                bootstrap_prior(*cand.context, config.n_boot, config.block_hours,
                                config.seed_for("select_boot_" + cand.id, cell.id));
            const LogMarginal lm = marginal_likelihood_mc(
                cand, prior, config.marginal_draws, config.seed_for("select_mc_" + cand.id, cell.id));
            result.table[k].log_marginal = lm.log_value;
        }
        write_text_file(paths.selection, selection_table_csv(result));
        say("[select] " + cell.id + ": winner=" + result.table[result.winner].model_id +
            (result.tie ? " (tie, lowest K)" : ""));
    });
    return 0;
}

int cmd_evaluate(const ExperimentConfig& raw, const RunOptions& opt) {
    const ExperimentConfig config = effective_config(raw, opt);
    const auto cells = selected_grid(config, opt);
    parallel_for(cells.size(), config.workers, [&](std::size_t i) {
        const auto& cell = cells[i];
        const auto paths = ScenarioPaths::in(config.output_dir, cell.id);
        if (!opt.force && all_exist({paths.divergence})) {
            say("[evaluate] " + cell.id + ": outputs exist, skipping");
            return;
        }
        const ScenarioData data = load_scenario_data(config, paths);
        require_file(paths.mle);
        require_file(paths.chain);
        const MleResult mle = mle_from_json(nlohmann::json::parse(read_text_file(paths.mle)));
        const PosteriorChain chain = load_chain_csv(paths.chain, paths.chain_meta);

        const StressSeries model_stress = data.stress.select_features(config.model_features);
        const StressDistribution px = fit_stress_distribution(model_stress);
        const long n = config.n_components;

        const auto p_true =
            predictive_failure_distribution(theta_sampler(data.spec), px, n, config.eval_n_mc,
                                            config.seed_for("eval_true", cell.id),
                                            ThetaProvenance::TrueModel);
        const auto q_bhm =
            predictive_failure_distribution(theta_sampler(chain), px, n, config.eval_n_mc,
                                            config.seed_for("eval_bhm", cell.id),
                                            ThetaProvenance::Posterior);
        const auto q_mle =
            predictive_failure_distribution(theta_sampler(mle.params), px, n, config.eval_n_mc,
                                            config.seed_for("eval_mle", cell.id),
                                            ThetaProvenance::PointEstimate);

        const CurveFn g_true =
            fragility_curve(data.spec, config.curve_thetas, config.seed_for("curve_true", cell.id));
        const CurveFn g_bhm =
            fragility_curve(chain, config.curve_thetas, config.seed_for("curve_bhm", cell.id));
        const CurveFn g_mle = fragility_curve(mle.params);

        std::vector<DivergenceRow> rows{
            {"kl_bhm", "system", kl_divergence(p_true, q_bhm)},
            {"kl_mle", "system", kl_divergence(p_true, q_mle)},
            {"signed_bhm", "component",
             signed_curve_divergence(g_true, g_bhm, px, config.eval_n_mc,
                                     config.seed_for("curve_mc", cell.id))},
            {"signed_mle", "component",
             signed_curve_divergence(g_true, g_mle, px, config.eval_n_mc,
                                     config.seed_for("curve_mc", cell.id))},
        };
        write_text_file(paths.divergence, divergence_csv(cell, rows));
        say("[evaluate] " + cell.id + ": kl_bhm=" + trim_number(rows[0].value) +
            " signed_bhm=" + trim_number(rows[2].value));
    });
    return 0;
}

int cmd_upgrade(const ExperimentConfig& raw, const RunOptions& opt) {
    const ExperimentConfig config = effective_config(raw, opt);
    const auto cells = selected_grid(config, opt);
    parallel_for(cells.size(), config.workers, [&](std::size_t i) {
        const auto& cell = cells[i];
        const auto paths = ScenarioPaths::in(config.output_dir, cell.id);
        if (!opt.force && all_exist({paths.upgrade_table})) {
            say("[upgrade] " + cell.id + ": outputs exist, skipping");
            return;
        }
        const ScenarioData data = load_scenario_data(config, paths);
        require_file(paths.mle);
        require_file(paths.chain);
        const MleResult mle = mle_from_json(nlohmann::json::parse(read_text_file(paths.mle)));
        const PosteriorChain chain = load_chain_csv(paths.chain, paths.chain_meta);
        const StressDistribution px =
            fit_stress_distribution(data.stress.select_features(config.model_features));

        const std::uint64_t seed = config.seed_for("policy", cell.id);
        const auto rows =
            compare_policies(data.spec, chain, mle.params, px, config.model_features[0],
                             config.risk_target(), config.policy_tol, config.policy_n_mc, seed);
        write_text_file(paths.upgrade_table, policy_table_csv(rows, config.n_components));
        for (const auto& r : rows) {
            write_text_file(paths.upgrade_json(r.source),
                            plan_to_json(r.plan, cell.id, r.source, seed).dump(2) + "\n");
        }
        std::ostringstream note;
        note << "[upgrade] " << cell.id << ":";
        for (const auto& r : rows) {
            note << ' ' << r.source << "=" << r.plan.m_upgrades
                 << (r.plan.feasible ? "" : "(infeasible)");
        }
        say(note.str());
    });
    return 0;
}

int cmd_report(const ExperimentConfig& raw, const RunOptions& opt) {
    const ExperimentConfig config = effective_config(raw, opt);
    const auto cells = config.grid(); // reports always cover the full grid
    std::vector<std::string> missing;

    std::ostringstream alpha_csv, beta_csv, div_csv, upg_csv, samples_csv, div_long;
    alpha_csv << "scenario,cov,alpha_mean,true_mean,bhm_mean,bhm_std,bhm_p5,bhm_p25,bhm_p50,"
                 "bhm_p75,bhm_p95,mle_alpha\n";
    beta_csv << "scenario,cov,alpha_mean,true_beta,bhm_beta_mean,bhm_beta_std,bhm_beta_p5,"
                "bhm_beta_p95,mle_beta\n";
    div_csv << "scenario,cov,alpha_mean,kl_system_bhm,kl_system_mle,signed_component_bhm,"
               "signed_component_mle\n";
    upg_csv << "scenario,cov,alpha_mean,tau_true,m_true,frac_true,feasible_true,tau_bhm,m_bhm,"
               "frac_bhm,feasible_bhm,tau_mle,m_mle,frac_mle,feasible_mle\n";
    samples_csv << "scenario,source,draw,alpha\n";
    div_long << "scenario,cov,alpha_mean,metric,level,value\n";

    const std::string wind = config.model_features[0];
    for (const auto& cell : cells) {
        const auto paths = ScenarioPaths::in(config.output_dir, cell.id);
        const std::vector<std::filesystem::path> needed{paths.population, paths.mle, paths.summary,
                                                        paths.chain, paths.divergence,
                                                        paths.upgrade_table};
        bool cell_ok = true;
        for (const auto& p : needed) {
            if (!std::filesystem::exists(p)) {
                missing.push_back(cell.id + ": " + p.filename().string());
                cell_ok = false;
            }
        }
        if (!cell_ok) continue;

        const auto pj = nlohmann::json::parse(read_text_file(paths.population));
        const PopulationSpec spec = PopulationSpec::from_json(pj);
        const MleResult mle = mle_from_json(nlohmann::json::parse(read_text_file(paths.mle)));
        const auto summary = load_summary(paths.summary);
        const auto& sa = summary.at("alpha_" + wind);
        const auto& sb = summary.at("beta_" + wind);
        const std::string prefix =
            cell.id + ',' + trim_number(cell.cov) + ',' + trim_number(cell.alpha_mean);

        alpha_csv << prefix << ',' << format_double(spec.alpha_mean[0], 10) << ','
                  << format_double(sa.mean, 10) << ',' << format_double(sa.stddev, 10) << ','
                  << format_double(sa.p5, 10) << ',' << format_double(sa.p25, 10) << ','
                  << format_double(sa.p50, 10) << ',' << format_double(sa.p75, 10) << ','
                  << format_double(sa.p95, 10) << ',' << format_double(mle.params.alpha[0], 10)
                  << '\n';
        beta_csv << prefix << ',' << format_double(spec.beta[0], 10) << ','
                 << format_double(sb.mean, 10) << ',' << format_double(sb.stddev, 10) << ','
                 << format_double(sb.p5, 10) << ',' << format_double(sb.p95, 10) << ','
                 << format_double(mle.params.beta[0], 10) << '\n';

        // Divergence rows: metric -> value
        std::map<std::string, double> div;
        for (const auto& line : read_lines(paths.divergence)) {
            const auto c = split_csv_line(line);
            if (c.size() == 6 && c[0] == cell.id) {
                div[c[3]] = std::stod(c[5]);
                div_long << line << '\n';
            }
        }
        div_csv << prefix << ',' << format_double(div["kl_bhm"], 10) << ','
                << format_double(div["kl_mle"], 10) << ',' << format_double(div["signed_bhm"], 10)
                << ',' << format_double(div["signed_mle"], 10) << '\n';

        // Upgrade rows: source -> (tau, M, frac, feasible)
        std::map<std::string, std::array<std::string, 4>> upg;
        for (const auto& line : read_lines(paths.upgrade_table)) {
            const auto c = split_csv_line(line);
            if (c.size() == 8 && c[0] != "source") upg[c[0]] = {c[2], c[3], c[4], c[6]};
        }
        upg_csv << prefix;
        for (const auto& src : {"true", "bhm", "mle"}) {
            const auto& u = upg.at(src);
            upg_csv << ',' << u[0] << ',' << u[1] << ',' << u[2] << ',' << u[3];
        }
        upg_csv << '\n';

        // Long-format draws for violin plots: thinned posterior, a matched
        // number of true population draws, and the MLE point.
        const PosteriorChain chain = load_chain_csv(paths.chain, paths.chain_meta);
        const Eigen::VectorXd draws = chain.parameter_draws(0);
        const long stride = std::max<long>(1, draws.size() / 400);
        long emitted = 0;
        for (Eigen::Index k = 0; k < draws.size(); k += stride) {
            samples_csv << cell.id << ",bhm," << emitted++ << ',' << format_double(draws[k], 10)
                        << '\n';
        }
        Rng true_rng(pj.value("draw_seed", config.seed_for("population", cell.id)));
        auto sample_theta = theta_sampler(spec);
        for (long k = 0; k < emitted; ++k) {
            samples_csv << cell.id << ",true," << k << ','
                        << format_double(sample_theta(true_rng).alpha[0], 10) << '\n';
        }
        samples_csv << cell.id << ",mle,0," << format_double(mle.params.alpha[0], 10) << '\n';
    }

    std::filesystem::create_directories(config.output_dir);
    write_text_file(config.output_dir / "report_alpha.csv", alpha_csv.str());
    write_text_file(config.output_dir / "report_beta.csv", beta_csv.str());
    write_text_file(config.output_dir / "report_divergence.csv", div_csv.str());
    write_text_file(config.output_dir / "report_upgrades.csv", upg_csv.str());
    write_text_file(config.output_dir / "alpha_samples_long.csv", samples_csv.str());
    write_text_file(config.output_dir / "divergence_long.csv", div_long.str());

    nlohmann::json meta{
        {"config", config.to_json()},
        {"scenarios", nlohmann::json::array()},
        {"missing", missing},
        {"notes",
         {{"signed_component_divergence",
           "signed pointwise reconstruction of the paper's component-level panel; "
           "not a normalized KL divergence and may be negative"}}},
    };
    for (const auto& cell : cells) meta["scenarios"].push_back(cell.id);
    write_text_file(config.output_dir / "run_metadata.json", meta.dump(2) + "\n");

    if (!missing.empty()) {
        for (const auto& m : missing) say("[report] missing: " + m);
        say("[report] incomplete grid: " + std::to_string(missing.size()) + " artifacts missing");
        return 3;
    }
    say("[report] wrote 4 report tables for " + std::to_string(cells.size()) + " scenarios");
    return 0;
}

int cmd_run_all(const ExperimentConfig& config, const RunOptions& opt) {
    if (int rc = cmd_generate(config, opt)) return rc;
    if (int rc = cmd_fit(config, opt)) return rc;
    if (int rc = cmd_select(config, opt)) return rc;
    if (int rc = cmd_evaluate(config, opt)) return rc;
    if (int rc = cmd_upgrade(config, opt)) return rc;
    return cmd_report(config, opt);
}

} // namespace fragtk
