#pragma once

#include <span>
#include <vector>

namespace fragtk {

/// log(sum(exp(v))) guarded against overflow; -inf for an empty span.
double log_sum_exp(std::span<const double> v);

double normal_pdf(double z);
double normal_cdf(double z);
/// Inverse standard normal CDF (Acklam's rational approximation, ~1e-9).
double normal_quantile(double p);

/// log Poisson pmf, lambda floored at 1e-300 so the result stays finite.
double poisson_log_pmf(long k, double lambda);
/// P(Y <= k) for Y ~ Poisson(lambda), summed stably in log space.
double poisson_cdf(long k, double lambda);
/// P(Y > threshold); non-integral thresholds resolve to floor(threshold).
double poisson_tail_above(double threshold, double lambda);

/// Percentile with linear interpolation between order statistics; `sorted`
/// must be ascending, p in [0, 1].
double percentile_sorted(std::span<const double> sorted, double p);

/// Log-normal distribution of a positive scalar, parameterized in log space.
struct LogNormalParams {
    double log_mean = 0.0;
    double log_std = 1.0;

    double pdf(double x) const;
    double cdf(double x) const;
    double quantile(double p) const;
    /// E[X] = exp(mu + sigma^2/2)
    double mean() const;
    /// Numerical unit-mass check on a truncated grid; |integral - 1| <= tol.
    bool integrates_to_one(double tol = 1e-6) const;
};

} // namespace fragtk
