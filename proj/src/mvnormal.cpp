#include "fragtk/mvnormal.hpp"

#include "fragtk/errors.hpp"

#include <cmath>

namespace fragtk {

MvNormal::MvNormal(Eigen::VectorXd mean, Eigen::MatrixXd cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
    const auto d = mean_.size();
    if (cov_.rows() != d || cov_.cols() != d) {
        throw ContractError("MvNormal: covariance shape does not match mean dimension");
    }
    if (!cov_.isApprox(cov_.transpose(), 1e-10)) {
        throw ValidationError("MvNormal: covariance not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (cov_ + cov_.transpose()));
    if (es.info() != Eigen::Success) throw ValidationError("MvNormal: eigendecomposition failed");
    basis_ = es.eigenvectors();
    eigenvalues_ = es.eigenvalues();

    const double max_eig = eigenvalues_.size() ? eigenvalues_.maxCoeff() : 0.0;
    const double neg_tol = 1e-10 * std::max(1.0, max_eig);
    if (eigenvalues_.minCoeff() < -neg_tol) {
        throw ValidationError("MvNormal: covariance has a negative eigenvalue beyond tolerance");
    }
    eigenvalues_ = eigenvalues_.cwiseMax(0.0);
    degenerate_ = (max_eig <= 1e-14);

    transform_ = basis_ * eigenvalues_.cwiseSqrt().asDiagonal();

    const double floor = std::max(1e-300, 1e-12 * std::max(max_eig, 1e-12));
    density_eigs_ = eigenvalues_.cwiseMax(floor);
    log_norm_const_ = -0.5 * static_cast<double>(d) * std::log(2.0 * M_PI);
    for (Eigen::Index i = 0; i < d; ++i) log_norm_const_ -= 0.5 * std::log(density_eigs_[i]);
}

Eigen::VectorXd MvNormal::sample(Rng& rng) const { return sample_scaled(rng, 1.0); }

Eigen::VectorXd MvNormal::sample_scaled(Rng& rng, double scale) const {
    Eigen::VectorXd z(dimension());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
    return mean_ + scale * (transform_ * z);
}

double MvNormal::log_density(const Eigen::VectorXd& x) const {
    if (x.size() != dimension()) throw ContractError("MvNormal: point dimension mismatch");
    const Eigen::VectorXd proj = basis_.transpose() * (x - mean_);
    double quad = 0.0;
    for (Eigen::Index i = 0; i < proj.size(); ++i) {
        quad += proj[i] * proj[i] / density_eigs_[i];
    }
    return log_norm_const_ - 0.5 * quad;
}

} // namespace fragtk
