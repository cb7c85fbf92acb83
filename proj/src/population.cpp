#include "fragtk/population.hpp"

#include "fragtk/csv.hpp"
#include "fragtk/errors.hpp"
#include "fragtk/rng.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <sstream>

namespace fragtk {

FragilityParams PopulationSpec::mean_params() const {
    FragilityParams p;
    p.features = features;
    p.alpha = alpha_mean;
    p.beta = beta;
    return p;
}

void PopulationSpec::validate() const {
    const auto p = alpha_mean.size();
    if (p < 1) throw ValidationError("population spec needs at least one feature");
    if (alpha_cov.size() != p || beta.size() != p ||
        static_cast<Eigen::Index>(features.size()) != p) {
        throw ValidationError("population spec: per-feature vector size mismatch");
    }
    if (n_components < 1) throw ValidationError("population spec: n_components must be >= 1");
    if ((alpha_mean.array() <= 0.0).any()) throw ValidationError("population spec: alpha mean must be > 0");
    if ((alpha_cov.array() < 0.0).any()) throw ValidationError("population spec: cov must be >= 0");
    if ((beta.array() <= 0.0).any()) throw ValidationError("population spec: beta must be > 0");
}

nlohmann::json PopulationSpec::to_json() const {
    return nlohmann::json{
        {"features", features},
        {"alpha", std::vector<double>(alpha_mean.begin(), alpha_mean.end())},
        {"beta", std::vector<double>(beta.begin(), beta.end())},
        {"cov", std::vector<double>(alpha_cov.begin(), alpha_cov.end())},
        {"n_components", n_components},
    };
}

PopulationSpec PopulationSpec::from_json(const nlohmann::json& j) {
    PopulationSpec s;
    s.features = j.at("features").get<std::vector<std::string>>();
    const auto a = j.at("alpha").get<std::vector<double>>();
    const auto b = j.at("beta").get<std::vector<double>>();
    const auto c = j.at("cov").get<std::vector<double>>();
    s.alpha_mean = Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()));
    s.beta = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
    s.alpha_cov = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
    s.n_components = j.at("n_components").get<long>();
    s.validate();
    return s;
}

FragilityParams ComponentPopulation::component(long j) const {
    if (j < 0 || j >= size()) throw ContractError("component index out of range");
    FragilityParams p;
    p.features = features;
    p.alpha = alphas.row(j).transpose();
    p.beta = beta;
    return p;
}

bool ComponentPopulation::homogeneous() const {
    for (Eigen::Index j = 1; j < alphas.rows(); ++j) {
        if (alphas.row(j) != alphas.row(0)) return false;
    }
    return true;
}

void FailureRecord::validate() const {
    if (static_cast<Eigen::Index>(timestamps.size()) != counts.size()) {
        throw ValidationError("failure record: timestamp/count length mismatch");
    }
    if (counts.size() == 0) throw DataError("failure record is empty");
    if ((counts.array() < 0).any()) throw ValidationError("failure counts must be >= 0");
}

ComponentPopulation draw_population(const PopulationSpec& spec, std::uint64_t rng_seed) {
    spec.validate();
    Rng rng(rng_seed);
    ComponentPopulation pop;
    pop.features = spec.features;
    pop.beta = spec.beta;
    pop.alphas.resize(spec.n_components, spec.alpha_mean.size());
    for (Eigen::Index j = 0; j < spec.alpha_mean.size(); ++j) {
        const double mean = spec.alpha_mean[j];
        const double sd = spec.alpha_cov[j] * mean;
        for (long i = 0; i < spec.n_components; ++i) {
            if (sd == 0.0) {
                pop.alphas(i, j) = mean;
                continue;
            }
            double a = mean + sd * rng.normal();
            while (a <= 0.0) a = mean + sd * rng.normal(); // truncate at 0 by redraw
            pop.alphas(i, j) = a;
        }
    }
    return pop;
}

Eigen::VectorXd population_failure_rates(const ComponentPopulation& pop,
                                         const StressSeries& stress) {
    if (pop.features != stress.features) {
        throw ContractError("population/stress feature mismatch");
    }
    const Eigen::Index n = stress.size();
    Eigen::VectorXd lambda(n);
    if (pop.homogeneous()) {
        // lambda_t = N * g(x_t), bit-identical to system_failure_rate.
        const Eigen::VectorXd g = failure_probability_series(pop.component(0), stress.values);
        lambda = static_cast<double>(pop.size()) * g;
        return lambda;
    }
    // Exponent for component j at time t: s_t - c_j with s_t = beta.x_t,
    // c_j = beta.alpha_j.
    const Eigen::VectorXd s = stress.values * pop.beta;
    const Eigen::ArrayXd c = (pop.alphas * pop.beta).array();
    Eigen::ArrayXd z(pop.size());
    for (Eigen::Index t = 0; t < n; ++t) {
        z = (s[t] - c).min(kLogisticClamp).max(-kLogisticClamp);
        lambda[t] = (1.0 / (1.0 + (-z).exp())).sum();
    }
    return lambda;
}

FailureRecord simulate_failures(const ComponentPopulation& pop, const StressSeries& stress,
                                std::uint64_t rng_seed) {
    const Eigen::VectorXd lambda = population_failure_rates(pop, stress);
    Rng base(rng_seed);
    FailureRecord rec;
    rec.timestamps = stress.timestamps;
    rec.counts.resize(lambda.size());
    for (Eigen::Index t = 0; t < lambda.size(); ++t) {
        Rng step = base.derive(static_cast<std::uint64_t>(t));
        rec.counts[t] = static_cast<int>(step.poisson(lambda[t]));
    }
    return rec;
}

void save_failure_csv(const FailureRecord& record, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "timestamp,y\n";
    for (Eigen::Index i = 0; i < record.size(); ++i) {
        out << record.timestamps[static_cast<std::size_t>(i)] << ',' << record.counts[i] << '\n';
    }
    write_text_file(path, out.str());
}

FailureRecord load_failure_csv(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw ParseError(path.string() + ": empty file");
    const auto header = split_csv_line(lines[0]);
    if (header.size() != 2 || header[0] != "timestamp" || header[1] != "y") {
        throw ParseError(path.string() + ":1: expected header 'timestamp,y'");
    }
    FailureRecord rec;
    std::vector<int> counts;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (lines[ln].empty()) continue;
        const auto cells = split_csv_line(lines[ln]);
        const std::string where = path.string() + ":" + std::to_string(ln + 1);
        if (cells.size() != 2) throw ParseError(where + ": expected 2 fields");
        try {
            rec.timestamps.push_back(parse_timestamp_hours(cells[0]));
            counts.push_back(std::stoi(cells[1]));
        } catch (const Error&) {
            throw;
        } catch (const std::exception&) {
            throw ParseError(where + ": bad count '" + cells[1] + "'");
        }
    }
    rec.counts = Eigen::Map<const Eigen::VectorXi>(counts.data(), static_cast<Eigen::Index>(counts.size()));
    rec.validate();
    return rec;
}

} // namespace fragtk
