#pragma once

#include "fragtk/rng.hpp"

#include <Eigen/Dense>

namespace fragtk {

/// Multivariate normal built from (mean, covariance) via eigendecomposition.
/// Covariance must be symmetric PSD up to -1e-10 relative jitter; negative
/// eigenvalues within that band are clipped to zero. Zero-variance directions
/// are floored only inside log_density so the density stays proper.
class MvNormal {
public:
    MvNormal(Eigen::VectorXd mean, Eigen::MatrixXd cov);

    Eigen::Index dimension() const { return mean_.size(); }
    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::MatrixXd& cov() const { return cov_; }

    /// True when the covariance is numerically zero in every direction.
    bool degenerate() const { return degenerate_; }

    Eigen::VectorXd sample(Rng& rng) const;
    /// x = mean + scale * L z for standard-normal z; `sample` is scale = 1.
    Eigen::VectorXd sample_scaled(Rng& rng, double scale) const;

    double log_density(const Eigen::VectorXd& x) const;

private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd cov_;
    Eigen::MatrixXd basis_;          // eigenvectors
    Eigen::VectorXd eigenvalues_;    // clipped >= 0
    Eigen::MatrixXd transform_;      // basis * diag(sqrt(eigenvalues))
    Eigen::VectorXd density_eigs_;   // floored for log_density
    double log_norm_const_ = 0.0;
    bool degenerate_ = false;
};

} // namespace fragtk
