#pragma once

#include "fragtk/dists.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace fragtk {

/// Time-indexed matrix of ambient stress measurements (one column per named
/// feature, e.g. wind speed in m/s, precipitation in mm/h). Timestamps are
/// integer epoch-hours, strictly increasing; rows dropped during loading may
/// leave gaps, the hours are treated as exchangeable draws.
struct StressSeries {
    std::vector<std::int64_t> timestamps;
    std::vector<std::string> features;
    Eigen::MatrixXd values; // n x p, finite and >= 0

    Eigen::Index size() const { return values.rows(); }
    Eigen::Index feature_count() const { return values.cols(); }

    /// Index of a named feature; ContractError when absent.
    Eigen::Index feature_index(const std::string& name) const;

    /// Column of one feature.
    Eigen::VectorXd column(const std::string& name) const;

    /// Sub-series with the given feature columns, in the given order.
    StressSeries select_features(const std::vector<std::string>& names) const;

    /// Enforce the type invariants; throws ValidationError/DataError.
    void validate() const;
};

/// Per-feature independent log-normal stress model P(x).
struct StressDistribution {
    std::vector<std::string> features;
    std::vector<LogNormalParams> marginals;

    const LogNormalParams& marginal(const std::string& name) const;
    void validate() const;
};

struct LoadStats {
    std::size_t rows_dropped = 0;
};

/// Parse a stress CSV with header `timestamp,<feature1>[,<feature2>...]`.
/// The header must match `schema` exactly. Rows with missing (empty) values
/// are dropped and counted; malformed cells raise ParseError with the line
/// number; duplicate or decreasing timestamps raise ValidationError.
StressSeries load_stress_csv(const std::filesystem::path& path,
                             const std::vector<std::string>& schema,
                             LoadStats* stats = nullptr);

/// Serialize in the same format load_stress_csv reads (round-trips exactly).
void save_stress_csv(const StressSeries& series, const std::filesystem::path& path);

/// Moment fit of a log-normal to one feature: mu/sigma are the sample mean
/// and sample standard deviation of the log values. Zero readings shift the
/// whole column by half the smallest positive observation before the log.
StressDistribution fit_stress_distribution(const StressSeries& series, const std::string& feature);

/// Per-feature independent fits for every column of the series.
StressDistribution fit_stress_distribution(const StressSeries& series);

/// IID hourly draws from the distribution; deterministic for a fixed seed.
StressSeries synthesize_stress(const StressDistribution& dist, std::int64_t n_hours,
                               std::uint64_t rng_seed, std::int64_t start_hour = 0);

} // namespace fragtk
