// Test-only oracles, independent of the closed forms they check.
//
// The Gaussian MI/CMI oracles plug sample covariances into the Gaussian
// determinant and residual-variance identities rather than estimating
// densities, so their only error is sampling noise.
#pragma once

#include <cmath>

#include <Eigen/Dense>

namespace crlab::testing {

inline Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const Eigen::Index n = a.rows();
    Eigen::MatrixXd joint(n, a.cols() + b.cols());
    joint << a, b;
    const Eigen::RowVectorXd mean = joint.colwise().mean();
    const Eigen::MatrixXd centered = joint.rowwise() - mean;
    return (centered.transpose() * centered) / static_cast<double>(n - 1);
}

// I(A;B) in nats for jointly Gaussian samples:
// 1/2 ln( det(Sigma_A) det(Sigma_B) / det(Sigma_joint) ).
inline double gaussian_mi_mc(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const Eigen::MatrixXd joint = sample_covariance(a, b);
    const Eigen::Index da = a.cols();
    const Eigen::Index db = b.cols();
    const double det_a = joint.topLeftCorner(da, da).determinant();
    const double det_b = joint.bottomRightCorner(db, db).determinant();
    return 0.5 * std::log(det_a * det_b / joint.determinant());
}

// Residual variance of y regressed on the columns of x (with intercept).
inline double residual_variance(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    const Eigen::Index n = x.rows();
    Eigen::MatrixXd design(n, x.cols() + 1);
    design << x, Eigen::VectorXd::Ones(n);
    const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(y);
    const Eigen::VectorXd resid = y - design * beta;
    return resid.squaredNorm() / static_cast<double>(n);
}

// I(U;V | W) = 1/2 ln( Var(V|W) / Var(V|U,W) ) for jointly Gaussian samples,
// via regression residual variances.
inline double gaussian_cmi_mc(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                              const Eigen::MatrixXd& w) {
    const double var_given_w = residual_variance(w, v);
    Eigen::MatrixXd uw(w.rows(), w.cols() + 1);
    uw << u, w;
    const double var_given_uw = residual_variance(uw, v);
    return 0.5 * std::log(var_given_w / var_given_uw);
}

inline double binary_entropy_nats(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
}

}  // namespace crlab::testing
