#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include <Eigen/Core>

#include "crlab/gaussian_scm.hpp"

namespace crlab {

// Multivariate linear additive SCM:
//   X ~ N(0, I_d),
//   T[:, :d_c]  = X[:, :d_c]  + eps   (unit normal),
//   T[:, d_c:]  = X[:, d_c:]  + eps   (unit normal),
//   Y = sum(T[:, :d_c]) + sum(X) + sigma_y * eps_Y.
struct LinearScmConfig {
    int d = 10;
    int d_c = 5;
    double sigma_y = 0.5;  // outcome noise standard deviation

    LinearScmConfig() = default;
    LinearScmConfig(int d_, int d_c_, double sigma_y_) : d(d_), d_c(d_c_), sigma_y(sigma_y_) {
        validate();
    }
    void validate() const;
};

// Sampled (X, T, Y) with the causal column split and the exogenous
// treatment noise recorded, so interventions can re-draw the private
// randomness of T without regenerating X. Immutable after construction.
struct Dataset {
    Eigen::MatrixXd x;            // n x d_x confounder
    Eigen::MatrixXd t;            // n x d_t treatment, columns [0, d_c) causal
    Eigen::VectorXd y;            // n outcome
    Eigen::MatrixXd t_noise;      // n x d_t exogenous draws actually added to t
    Eigen::VectorXd t_noise_std;  // per-column noise standard deviation
    int d_c = 0;

    int n() const { return static_cast<int>(t.rows()); }
    int confounder_dim() const { return static_cast<int>(x.cols()); }
    int treatment_dim() const { return static_cast<int>(t.cols()); }

    // Checks row counts, finiteness, and the column split.
    void validate() const;

    // Header row x0..x{dx-1},t0..t{dt-1},y; one data row per sample.
    void write_csv(std::ostream& out) const;
    void write_csv(const std::string& path) const;
};

// Deterministic per (config, n, seed).
Dataset sample_linear_scm(const LinearScmConfig& config, int n, std::uint64_t seed);

// Scalar SCM of GaussianScmParams laid out as d_x = 1 (the confounder Z),
// d_t = 2 with column 0 = T_C, column 1 = T_nC; deterministic per seed.
Dataset sample_scalar_scm(const GaussianScmParams& params, int n, std::uint64_t seed);

// Soft intervention on the non-causal treatment coordinates: holds X (and
// with it the confounder path into T) fixed and re-draws only the exogenous
// noise of T[:, d_c:]. X, T[:, :d_c] and Y are returned bitwise unchanged.
Dataset intervene_noncausal(const Dataset& data, std::uint64_t seed);

// Stochastic compression channel G = T_C + eps_G, Var(eps_G) = var_g per
// entry. var_g == 0 returns the input bitwise.
Eigen::MatrixXd compress_causal(const Eigen::MatrixXd& tc, double var_g, std::uint64_t seed);

}  // namespace crlab
