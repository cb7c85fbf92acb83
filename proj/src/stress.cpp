#include "fragtk/stress.hpp"

#include "fragtk/csv.hpp"
#include "fragtk/errors.hpp"
#include "fragtk/rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace fragtk {

Eigen::Index StressSeries::feature_index(const std::string& name) const {
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (features[i] == name) return static_cast<Eigen::Index>(i);
    }
    throw ContractError("unknown stress feature: " + name);
}

Eigen::VectorXd StressSeries::column(const std::string& name) const {
    return values.col(feature_index(name));
}

StressSeries StressSeries::select_features(const std::vector<std::string>& names) const {
    StressSeries out;
    out.timestamps = timestamps;
    out.features = names;
    out.values.resize(values.rows(), static_cast<Eigen::Index>(names.size()));
    for (std::size_t j = 0; j < names.size(); ++j) {
        out.values.col(static_cast<Eigen::Index>(j)) = values.col(feature_index(names[j]));
    }
    return out;
}

void StressSeries::validate() const {
    if (feature_count() < 1) throw ValidationError("stress series needs at least one feature");
    if (static_cast<Eigen::Index>(features.size()) != feature_count()) {
        throw ValidationError("feature-name count does not match value columns");
    }
    std::set<std::string> unique(features.begin(), features.end());
    if (unique.size() != features.size()) throw ValidationError("duplicate feature names");
    if (static_cast<Eigen::Index>(timestamps.size()) != size()) {
        throw ValidationError("timestamp count does not match value rows");
    }
    if (size() == 0) throw DataError("stress series is empty");
    for (std::size_t i = 1; i < timestamps.size(); ++i) {
        if (timestamps[i] <= timestamps[i - 1]) {
            throw ValidationError("timestamps not strictly increasing at row " + std::to_string(i));
        }
    }
    if (!values.allFinite() || (values.array() < 0.0).any()) {
        throw ValidationError("stress values must be finite and >= 0");
    }
}

const LogNormalParams& StressDistribution::marginal(const std::string& name) const {
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (features[i] == name) return marginals[i];
    }
    throw ContractError("unknown stress feature: " + name);
}

void StressDistribution::validate() const {
    if (features.size() != marginals.size() || features.empty()) {
        throw ValidationError("stress distribution feature/marginal mismatch");
    }
    for (const auto& m : marginals) {
        if (!(m.log_std > 0.0) || !std::isfinite(m.log_mean)) {
            throw ValidationError("log-normal marginal requires finite log_mean and log_std > 0");
        }
        if (!m.integrates_to_one(1e-6)) {
            throw ValidationError("log-normal marginal does not integrate to 1");
        }
    }
}

StressSeries load_stress_csv(const std::filesystem::path& path,
                             const std::vector<std::string>& schema,
                             LoadStats* stats) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw ParseError(path.string() + ": empty file");

    const auto header = split_csv_line(lines[0]);
    if (header.empty() || header[0] != "timestamp") {
        throw ParseError(path.string() + ":1: header must start with 'timestamp'");
    }
    if (header.size() != schema.size() + 1 ||
        !std::equal(schema.begin(), schema.end(), header.begin() + 1)) {
        throw ParseError(path.string() + ":1: header does not match expected schema");
    }

    std::vector<std::int64_t> ts;
    std::vector<double> flat;
    std::size_t dropped = 0;
    bool have_last = false;
    std::int64_t last_t = 0;
    const std::size_t p = schema.size();
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (lines[ln].empty()) continue;
        const auto cells = split_csv_line(lines[ln]);
        const std::string where = path.string() + ":" + std::to_string(ln + 1);
        if (cells.size() != p + 1) {
            throw ParseError(where + ": expected " + std::to_string(p + 1) + " fields, got " +
                             std::to_string(cells.size()));
        }
        std::int64_t t;
        try {
            t = parse_timestamp_hours(cells[0]);
        } catch (const ValidationError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(where + ": " + e.what());
        }
        bool missing = false;
        std::vector<double> row(p);
        for (std::size_t j = 0; j < p; ++j) {
            if (cells[j + 1].empty()) {
                missing = true;
                continue;
            }
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(cells[j + 1], &used);
            } catch (const std::exception&) {
                throw ParseError(where + ": not a number: '" + cells[j + 1] + "'");
            }
            if (used != cells[j + 1].size()) {
                throw ParseError(where + ": not a number: '" + cells[j + 1] + "'");
            }
            row[j] = v;
        }
        // Ordering is checked across all parsed rows, dropped or kept.
        if (have_last && t <= last_t) {
            throw ValidationError(where + ": timestamps not strictly increasing");
        }
        have_last = true;
        last_t = t;
        if (missing) {
            ++dropped;
            continue;
        }
        ts.push_back(t);
        flat.insert(flat.end(), row.begin(), row.end());
    }
    if (stats) stats->rows_dropped = dropped;
    if (ts.empty()) throw DataError(path.string() + ": no usable rows after cleaning");

    StressSeries out;
    out.features = schema;
    out.timestamps = std::move(ts);
    out.values.resize(static_cast<Eigen::Index>(out.timestamps.size()),
                      static_cast<Eigen::Index>(p));
    for (Eigen::Index i = 0; i < out.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < out.values.cols(); ++j) {
            out.values(i, j) = flat[static_cast<std::size_t>(i) * p + static_cast<std::size_t>(j)];
        }
    }
    out.validate();
    return out;
}

void save_stress_csv(const StressSeries& series, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "timestamp";
    for (const auto& f : series.features) out << ',' << f;
    out << '\n';
    for (Eigen::Index i = 0; i < series.size(); ++i) {
        out << series.timestamps[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < series.feature_count(); ++j) {
            out << ',' << format_double(series.values(i, j));
        }
        out << '\n';
    }
    write_text_file(path, out.str());
}

namespace {

LogNormalParams fit_marginal(Eigen::VectorXd v, const std::string& name) {
    const Eigen::Index n = v.size();
    if (n < 2) throw DataError("fit_stress_distribution(" + name + "): need at least 2 values");
    double min_pos = std::numeric_limits<double>::infinity();
    bool has_zero = false;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (v[i] < 0.0) throw ValidationError("fit_stress_distribution(" + name + "): negative value");
        if (v[i] == 0.0) has_zero = true;
        else min_pos = std::min(min_pos, v[i]);
    }
    if (has_zero) {
        if (!std::isfinite(min_pos)) {
            throw DataError("fit_stress_distribution(" + name + "): all values are zero");
        }
        v.array() += 0.5 * min_pos; // keep calm hours without losing log support
    }
    // Degenerate when there are fewer than 2 distinct values.
    bool distinct = false;
    for (Eigen::Index i = 1; i < n && !distinct; ++i) distinct = (v[i] != v[0]);
    if (!distinct) throw DataError("fit_stress_distribution(" + name + "): fewer than 2 distinct values");

    const Eigen::ArrayXd logs = v.array().log();
    const double mu = logs.mean();
    const double var = (logs - mu).square().sum() / static_cast<double>(n - 1);
    return LogNormalParams{mu, std::sqrt(var)};
}

} // namespace

StressDistribution fit_stress_distribution(const StressSeries& series, const std::string& feature) {
    StressDistribution out;
    out.features = {feature};
    out.marginals = {fit_marginal(series.column(feature), feature)};
    return out;
}

StressDistribution fit_stress_distribution(const StressSeries& series) {
    StressDistribution out;
    out.features = series.features;
    for (const auto& f : series.features) {
        out.marginals.push_back(fit_marginal(series.column(f), f));
    }
    return out;
}

StressSeries synthesize_stress(const StressDistribution& dist, std::int64_t n_hours,
                               std::uint64_t rng_seed, std::int64_t start_hour) {
    if (n_hours < 1) throw ValidationError("synthesize_stress: n_hours must be >= 1");
    dist.validate();
    const auto p = static_cast<Eigen::Index>(dist.features.size());
    StressSeries out;
    out.features = dist.features;
    out.timestamps.resize(static_cast<std::size_t>(n_hours));
    out.values.resize(static_cast<Eigen::Index>(n_hours), p);
    Rng rng(rng_seed);
    for (std::int64_t t = 0; t < n_hours; ++t) {
        out.timestamps[static_cast<std::size_t>(t)] = start_hour + t;
        for (Eigen::Index j = 0; j < p; ++j) {
            const auto& m = dist.marginals[static_cast<std::size_t>(j)];
            out.values(static_cast<Eigen::Index>(t), j) = std::exp(m.log_mean + m.log_std * rng.normal());
        }
    }
    return out;
}

} // namespace fragtk
