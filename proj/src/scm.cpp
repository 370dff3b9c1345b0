#include "crlab/scm.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "crlab/rng.hpp"

namespace crlab {

void LinearScmConfig::validate() const {
    if (d < 1) throw std::invalid_argument("LinearScmConfig: d must be >= 1");
    if (d_c < 1 || d_c > d)
        throw std::invalid_argument("LinearScmConfig: need 1 <= d_c <= d");
    if (!(sigma_y >= 0.0))
        throw std::invalid_argument("LinearScmConfig: sigma_y must be >= 0");
}

void Dataset::validate() const {
    const Eigen::Index rows = t.rows();
    if (x.rows() != rows || y.size() != rows || t_noise.rows() != rows)
        throw std::invalid_argument("Dataset: row count mismatch");
    if (t_noise.cols() != t.cols() || t_noise_std.size() != t.cols())
        throw std::invalid_argument("Dataset: treatment noise shape mismatch");
    if (d_c < 1 || d_c > t.cols())
        throw std::invalid_argument("Dataset: causal split out of range");
    if (!x.allFinite() || !t.allFinite() || !y.allFinite() || !t_noise.allFinite())
        throw std::invalid_argument("Dataset: non-finite entries");
}

namespace {

void write_row(std::ostream& out, const double* vals, int count) {
    char buf[40];
    for (int i = 0; i < count; ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", vals[i]);
        if (i) out << ',';
        out << buf;
    }
    out << '\n';
}

}  // namespace

void Dataset::write_csv(std::ostream& out) const {
    for (int j = 0; j < confounder_dim(); ++j) out << (j ? ",x" : "x") << j;
    for (int j = 0; j < treatment_dim(); ++j) out << ",t" << j;
    out << ",y\n";
    std::vector<double> row(confounder_dim() + treatment_dim() + 1);
    for (int i = 0; i < n(); ++i) {
        int k = 0;
        for (int j = 0; j < confounder_dim(); ++j) row[k++] = x(i, j);
        for (int j = 0; j < treatment_dim(); ++j) row[k++] = t(i, j);
        row[k++] = y(i);
        write_row(out, row.data(), k);
    }
}

void Dataset::write_csv(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("Dataset::write_csv: cannot open " + path);
    write_csv(out);
}

Dataset sample_linear_scm(const LinearScmConfig& config, int n, std::uint64_t seed) {
    config.validate();
    if (n < 1) throw std::invalid_argument("sample_linear_scm: n must be >= 1");

    Dataset ds;
    ds.d_c = config.d_c;
    ds.x.resize(n, config.d);
    ds.t_noise.resize(n, config.d);
    ds.y.resize(n);
    ds.t_noise_std = Eigen::VectorXd::Ones(config.d);

    RngStream rng_x(derive_stream(seed, "linear-scm/x"));
    RngStream rng_t(derive_stream(seed, "linear-scm/t-noise"));
    RngStream rng_y(derive_stream(seed, "linear-scm/y-noise"));

    rng_x.fill_normal(ds.x);
    rng_t.fill_normal(ds.t_noise);
    ds.t = ds.x + ds.t_noise;
    for (int i = 0; i < n; ++i) {
        const double structural =
            ds.t.row(i).head(config.d_c).sum() + ds.x.row(i).sum();
        ds.y(i) = structural + config.sigma_y * rng_y.normal();
    }
    return ds;
}

Dataset sample_scalar_scm(const GaussianScmParams& params, int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_scalar_scm: n must be >= 1");

    const double sd_z = std::sqrt(params.var_z);
    const double sd_c = std::sqrt(params.var_c);
    const double sd_n = std::sqrt(params.var_n);
    const double sd_y = std::sqrt(params.var_y);

    Dataset ds;
    ds.d_c = 1;
    ds.x.resize(n, 1);
    ds.t.resize(n, 2);
    ds.t_noise.resize(n, 2);
    ds.y.resize(n);
    ds.t_noise_std.resize(2);
    ds.t_noise_std << sd_c, sd_n;

    RngStream rng_z(derive_stream(seed, "scalar-scm/z"));
    RngStream rng_t(derive_stream(seed, "scalar-scm/t-noise"));
    RngStream rng_y(derive_stream(seed, "scalar-scm/y-noise"));

    for (int i = 0; i < n; ++i) ds.x(i, 0) = sd_z * rng_z.normal();
    rng_t.fill_normal(ds.t_noise);
    ds.t_noise.col(0) *= sd_c;
    ds.t_noise.col(1) *= sd_n;
    ds.t.col(0) = params.alpha * ds.x.col(0) + ds.t_noise.col(0);
    ds.t.col(1) = params.beta * ds.x.col(0) + ds.t_noise.col(1);
    for (int i = 0; i < n; ++i)
        ds.y(i) = params.rho * ds.t(i, 0) + params.delta * ds.x(i, 0) + sd_y * rng_y.normal();
    return ds;
}

Dataset intervene_noncausal(const Dataset& data, std::uint64_t seed) {
    data.validate();
    Dataset out = data;
    RngStream rng(derive_stream(seed, "intervention/t-noise"));
    const int dt = data.treatment_dim();
    for (int j = data.d_c; j < dt; ++j) {
        // Structural mean of column j given X is t - noise; only the
        // private randomness changes under the intervention.
        for (int i = 0; i < data.n(); ++i) {
            const double mean = data.t(i, j) - data.t_noise(i, j);
            const double fresh = data.t_noise_std(j) * rng.normal();
            out.t(i, j) = mean + fresh;
            out.t_noise(i, j) = fresh;
        }
    }
    return out;
}

Eigen::MatrixXd compress_causal(const Eigen::MatrixXd& tc, double var_g, std::uint64_t seed) {
    if (!(var_g >= 0.0)) throw std::invalid_argument("compress_causal: var_g must be >= 0");
    if (var_g == 0.0) return tc;
    Eigen::MatrixXd out = tc;
    RngStream rng(derive_stream(seed, "compress/g-noise"));
    const double sd = std::sqrt(var_g);
    for (Eigen::Index j = 0; j < out.cols(); ++j)
        for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, j) += sd * rng.normal();
    return out;
}

}  // namespace crlab
