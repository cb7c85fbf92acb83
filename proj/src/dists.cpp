#include "fragtk/dists.hpp"

#include "fragtk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fragtk {

double log_sum_exp(std::span<const double> v) {
    if (v.empty()) return -std::numeric_limits<double>::infinity();
    double m = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(m)) return m; // all -inf (or a stray inf/nan propagates)
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ContractError("normal_quantile: p must be in (0,1)");
    // Acklam 2003 rational approximation with one Halley refinement.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double e = normal_cdf(x) - p;
    double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

double poisson_log_pmf(long k, double lambda) {
    if (k < 0) return -std::numeric_limits<double>::infinity();
    lambda = std::max(lambda, 1e-300);
    if (k == 0) return -lambda;
    return static_cast<double>(k) * std::log(lambda) - lambda - std::lgamma(static_cast<double>(k) + 1.0);
}

double poisson_cdf(long k, double lambda) {
    if (k < 0) return 0.0;
    if (lambda <= 0.0) return 1.0;
    // Log-space term recurrence with a running-max rescale.
    double log_t = -lambda;
    double log_max = log_t;
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(k) + 1);
    terms.push_back(log_t);
    const double log_lambda = std::log(lambda);
    for (long i = 1; i <= k; ++i) {
        log_t += log_lambda - std::log(static_cast<double>(i));
        terms.push_back(log_t);
        log_max = std::max(log_max, log_t);
    }
    double s = 0.0;
    for (double t : terms) s += std::exp(t - log_max);
    double v = std::exp(log_max + std::log(s));
    return std::min(v, 1.0);
}

double poisson_tail_above(double threshold, double lambda) {
    if (threshold < 0.0) return 1.0;
    return 1.0 - poisson_cdf(static_cast<long>(std::floor(threshold)), lambda);
}

double percentile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw ContractError("percentile_sorted: empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw ContractError("percentile_sorted: p must be in [0,1]");
    const double h = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = static_cast<std::size_t>(std::ceil(h));
    const double w = h - static_cast<double>(lo);
    return sorted[lo] * (1.0 - w) + sorted[hi] * w;
}

double LogNormalParams::pdf(double x) const {
    if (x <= 0.0) return 0.0;
    const double z = (std::log(x) - log_mean) / log_std;
    return std::exp(-0.5 * z * z) / (x * log_std * std::sqrt(2.0 * M_PI));
}

double LogNormalParams::cdf(double x) const {
    if (x <= 0.0) return 0.0;
    return normal_cdf((std::log(x) - log_mean) / log_std);
}

double LogNormalParams::quantile(double p) const {
    return std::exp(log_mean + log_std * normal_quantile(p));
}

double LogNormalParams::mean() const {
    return std::exp(log_mean + 0.5 * log_std * log_std);
}

bool LogNormalParams::integrates_to_one(double tol) const {
    // Trapezoid rule on a log-spaced grid spanning all but ~1e-10 of the mass.
    const double lo = std::log(quantile(1e-10));
    const double hi = std::log(quantile(1.0 - 1e-10));
    const int n = 20000;
    const double dl = (hi - lo) / n;
    double integral = 0.0;
    double prev = pdf(std::exp(lo)) * std::exp(lo);
    for (int i = 1; i <= n; ++i) {
        const double lx = lo + dl * i;
        // integrand in log space: pdf(x) * x dlx
        const double cur = pdf(std::exp(lx)) * std::exp(lx);
        integral += 0.5 * (prev + cur) * dl;
        prev = cur;
    }
    return std::abs(integral - 1.0) <= tol;
}

} // namespace fragtk
