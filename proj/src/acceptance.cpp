#include "crlab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <ostream>
#include <cstdio>
#include <sstream>

#include "crlab/critic.hpp"
#include "crlab/discrete.hpp"
#include "crlab/gaussian_scm.hpp"
#include "crlab/harness.hpp"
#include "crlab/rng.hpp"
#include "crlab/scm.hpp"
#include "crlab/stats.hpp"
#include "crlab/trainer.hpp"

namespace crlab {
namespace {

GaussianScmParams random_params(RngStream& rng, bool nonzero_beta) {
    double beta = rng.uniform(-2.0, 2.0);
    if (nonzero_beta)
        while (std::abs(beta) < 0.1) beta = rng.uniform(-2.0, 2.0);
    return GaussianScmParams(rng.uniform(-2.0, 2.0), beta, rng.uniform(-2.0, 2.0),
                             rng.uniform(-2.0, 2.0), rng.uniform(0.3, 3.0),
                             rng.uniform(0.3, 3.0), rng.uniform(0.3, 3.0),
                             rng.uniform(0.3, 3.0));
}

double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const double denom = std::max({a.norm(), b.norm(), 1e-12});
    return (a - b).norm() / denom;
}

std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// ---- criterion 1: Proposition 1 in closed form --------------------------

CriterionResult check_prop1() {
    CriterionResult res{1, "prop1-closed-form", true, "", 0.0};
    RngStream rng(derive_stream(20260809, "acc/prop1"));
    const double lambdas[] = {0.1, 0.5, 1.0, 2.0};
    double worst = 0.0;
    for (int i = 0; i < 100 && res.pass; ++i) {
        const GaussianScmParams p = random_params(rng, true);
        const double leak = mi_tnc_z_given_tc(p);
        for (double lambda : lambdas) {
            const double gap = j_value(p, RepresentationSpec::causal(), lambda) -
                               j_value(p, RepresentationSpec::naive(), lambda);
            worst = std::max(worst, std::abs(gap - lambda * leak));
            if (std::abs(gap - lambda * leak) > 1e-12 || !(gap > 0.0)) {
                res.pass = false;
                break;
            }
        }
    }
    std::ostringstream os;
    os << "max |gap - lambda*leak| = " << worst << " over 100 params x 4 lambdas";
    res.detail = os.str();
    return res;
}

// ---- criterion 2: lambda_crit against finite differences -----------------

CriterionResult check_lambda_crit() {
    CriterionResult res{2, "lambda-crit-oracle", true, "", 0.0};
    const GaussianScmParams p = GaussianScmParams::all_ones();
    const double analytic = lambda_crit(p);

    // Independent route: the two closed forms evaluated directly, centered
    // finite differences at var_g = 0 with step 1e-5.
    const auto util = [&](double v) {
        const double n = p.rho * p.rho * p.var_c + p.var_y;
        return 0.5 * std::log(n / (n - p.rho * p.rho * p.var_c * p.var_c / (p.var_c + v)));
    };
    const auto pen = [&](double v) {
        return 0.5 * std::log(1.0 + p.alpha * p.alpha * p.var_z / (p.var_c + v));
    };
    const double h = 1e-5;
    const double du = (util(h) - util(-h)) / (2.0 * h);
    const double dp = (pen(h) - pen(-h)) / (2.0 * h);
    const double fd_ratio = std::abs(du) / std::abs(dp);

    res.pass = std::abs(analytic - 2.0) <= 1e-12 && std::abs(fd_ratio - analytic) <= 1e-4;
    std::ostringstream os;
    os << "lambda_crit = " << analytic << ", finite-difference ratio = " << fd_ratio;
    res.detail = os.str();
    return res;
}

// ---- criterion 3: lossless regime ----------------------------------------

CriterionResult check_lossless() {
    CriterionResult res{3, "lossless-regime", true, "", 0.0};
    const GaussianScmParams p = GaussianScmParams::all_ones();
    std::vector<double> grid(30);
    for (int i = 0; i < 30; ++i) grid[i] = std::pow(10.0, -3.0 + 6.0 * i / 29.0);

    const double j_causal_1 = j_value(p, RepresentationSpec::causal(), 1.0);
    bool below = true;
    for (double v : grid)
        below = below && (j_value(p, RepresentationSpec::compressed(v), 1.0) < j_causal_1);

    const double j_causal_5 = j_value(p, RepresentationSpec::causal(), 5.0);
    bool some_above = false;
    for (double v : grid)
        some_above =
            some_above || (j_value(p, RepresentationSpec::compressed(v), 5.0) > j_causal_5);

    res.pass = below && some_above;
    std::ostringstream os;
    os << "lambda=1: causal dominates all 30 grid points -> " << (below ? "yes" : "no")
       << "; lambda=5: compression wins somewhere -> " << (some_above ? "yes" : "no");
    res.detail = os.str();
    return res;
}

// ---- criterion 4: gamma reparameterisation equivalence -------------------

CriterionResult check_gamma_equivalence() {
    CriterionResult res{4, "gamma-equivalence", true, "", 0.0};
    RngStream rng(derive_stream(20260809, "acc/gamma"));
    for (int trial = 0; trial < 20 && res.pass; ++trial) {
        const GaussianScmParams p = random_params(rng, true);
        std::vector<RepresentationSpec> menu{RepresentationSpec::causal(),
                                             RepresentationSpec::naive()};
        const int extra = 2 + static_cast<int>(rng.below(4));
        for (int i = 0; i < extra; ++i)
            menu.push_back(
                RepresentationSpec::compressed(std::pow(10.0, rng.uniform(-3.0, 3.0))));
        const double lambda = std::pow(10.0, rng.uniform(-1.3, 0.6));
        const double gamma = gamma_of_lambda(lambda);

        std::vector<int> by_j(menu.size()), by_l(menu.size());
        std::iota(by_j.begin(), by_j.end(), 0);
        by_l = by_j;
        std::sort(by_j.begin(), by_j.end(), [&](int a, int b) {
            return j_value(p, menu[a], lambda) > j_value(p, menu[b], lambda);
        });
        std::sort(by_l.begin(), by_l.end(), [&](int a, int b) {
            return l_gamma(p, menu[a], gamma) < l_gamma(p, menu[b], gamma);
        });
        if (by_j != by_l) res.pass = false;
    }
    res.detail = "20 random parameter sets and menus ranked identically";
    return res;
}

// ---- criterion 5: predictive purification on discrete joints -------------

CriterionResult check_purification() {
    CriterionResult res{5, "purification-oracle", true, "", 0.0};
    RngStream rng(derive_stream(20260809, "acc/purify"));
    double worst = 0.0;
    for (int trial = 0; trial < 200 && res.pass; ++trial) {
        const int n_gbar = 2 + static_cast<int>(rng.below(3));
        const int n_g = n_gbar + static_cast<int>(rng.below(static_cast<std::uint64_t>(9 - n_gbar)));
        const int n_y = 2 + static_cast<int>(rng.below(7));
        const int n_z = 2 + static_cast<int>(rng.below(7));

        std::vector<int> coarse(n_g);
        for (int g = 0; g < n_g; ++g)
            coarse[g] = g < n_gbar ? g : static_cast<int>(rng.below(n_gbar));

        // q(gbar, y, z): dense positive joint for the coarse variable.
        std::vector<double> q(static_cast<std::size_t>(n_gbar) * n_y * n_z);
        double total = 0.0;
        for (auto& v : q) {
            v = rng.uniform(0.05, 1.0);
            total += v;
        }
        for (auto& v : q) v /= total;

        // w(g | gbar, z): z-dependent split of each coarse cell over its
        // preimage. Y never enters, so I(G;Y|Gbar,Z) = 0 by construction.
        std::vector<double> split(static_cast<std::size_t>(n_g) * n_z);
        for (int gbar = 0; gbar < n_gbar; ++gbar)
            for (int z = 0; z < n_z; ++z) {
                double norm = 0.0;
                for (int g = 0; g < n_g; ++g)
                    if (coarse[g] == gbar) {
                        const double w = rng.uniform(0.05, 1.0);
                        split[static_cast<std::size_t>(g) * n_z + z] = w;
                        norm += w;
                    }
                for (int g = 0; g < n_g; ++g)
                    if (coarse[g] == gbar) split[static_cast<std::size_t>(g) * n_z + z] /= norm;
            }

        std::vector<double> p(static_cast<std::size_t>(n_g) * n_y * n_z);
        for (int g = 0; g < n_g; ++g)
            for (int y = 0; y < n_y; ++y)
                for (int z = 0; z < n_z; ++z)
                    p[(static_cast<std::size_t>(g) * n_y + y) * n_z + z] =
                        q[(static_cast<std::size_t>(coarse[g]) * n_y + y) * n_z + z] *
                        split[static_cast<std::size_t>(g) * n_z + z];

        const DiscreteJoint fine(n_g, n_y, n_z, p);
        const DiscreteJoint coarse_joint(n_gbar, n_y, n_z, q);

        const auto j_of = [](const DiscreteJoint& joint, double lambda) {
            const double util = discrete_mi(joint, MiKind::I_AB_GIVEN_C);
            const double pen = discrete_mi(joint.permuted({0, 2, 1}), MiKind::I_AB);
            return util - lambda * pen;
        };

        // I(G; Z | Gbar) over the (g, z, gbar) joint.
        std::vector<double> gz(static_cast<std::size_t>(n_g) * n_z * n_gbar, 0.0);
        for (int g = 0; g < n_g; ++g)
            for (int y = 0; y < n_y; ++y)
                for (int z = 0; z < n_z; ++z)
                    gz[(static_cast<std::size_t>(g) * n_z + z) * n_gbar + coarse[g]] +=
                        p[(static_cast<std::size_t>(g) * n_y + y) * n_z + z];
        const double residual_leak =
            discrete_mi(DiscreteJoint(n_g, n_z, n_gbar, gz), MiKind::I_AB_GIVEN_C);

        const double lambda = rng.uniform(0.1, 3.0);
        const double gap = j_of(coarse_joint, lambda) - j_of(fine, lambda);
        worst = std::max(worst, std::abs(gap - lambda * residual_leak));
        if (std::abs(gap - lambda * residual_leak) > 1e-10 || gap < -1e-12) res.pass = false;
    }
    std::ostringstream os;
    os << "max |J(coarse)-J(fine) - lambda*I(G;Z|Gbar)| = " << worst << " over 200 joints";
    res.detail = os.str();
    return res;
}

// ---- criterion 6: estimator sandwich --------------------------------------

CriterionResult check_sandwich() {
    CriterionResult res{6, "mi-sandwich", true, "", 0.0};
    MiBenchConfig config;
    config.seed = 20260809;
    const auto rows = run_mi_bench(config);
    std::ostringstream os;
    for (const auto& r : rows) {
        const bool lower_ok = !r.diverged && r.lower <= r.true_mi + 0.1;
        const bool upper_ok = !r.diverged && r.upper >= r.true_mi - 0.15;
        if (!lower_ok || !upper_ok) res.pass = false;
        os << "corr=" << r.corr << " trueMI=" << short_num(r.true_mi)
           << " lower=" << short_num(r.lower) << " upper=" << short_num(r.upper)
           << (lower_ok && upper_ok ? " ok; " : " BAD; ");
    }
    res.detail = os.str();
    return res;
}

// ---- criterion 7: noise sweep replication ---------------------------------

CriterionResult check_noise_sweep(int workers) {
    CriterionResult res{7, "figure3-noise-sweep", true, "", 0.0};
    SweepConfig config;
    config.train.seed = 20260809;
    config.workers = workers;
    const ResultTable table = run_sweep(config);
    if (table.any_failed()) {
        res.pass = false;
        res.detail = "sweep reported failed runs";
        return res;
    }

    std::ostringstream os;
    for (double sigma : config.sigma_y_grid) {
        std::vector<double> base_sens, crl_sens, delta_mae;
        std::vector<std::pair<int, double>> base_mae, crl_mae;
        for (const auto& r : table.rows) {
            if (r.sigma_y != sigma) continue;
            if (r.method == "baseline") {
                base_sens.push_back(r.sensitivity);
                base_mae.push_back({r.seed, r.mae});
            } else {
                crl_sens.push_back(r.sensitivity);
                crl_mae.push_back({r.seed, r.mae});
            }
        }
        for (std::size_t i = 0; i < base_mae.size(); ++i)
            delta_mae.push_back(crl_mae[i].second - base_mae[i].second);

        const double mb = median(base_sens), mc = median(crl_sens);
        const double base_iqr = iqr(base_sens);
        const double dmed = median(delta_mae), diqr = iqr(delta_mae);
        const bool a = mc < 0.2 * mb;
        const bool b = mb > 5.0 * base_iqr;
        const bool c = std::abs(dmed) < diqr;
        if (!(a && b && c)) res.pass = false;
        os << "sigma=" << sigma << ": sens base=" << short_num(mb) << " crl=" << short_num(mc)
           << " (a:" << (a ? "ok" : "FAIL") << ") base med/IQR="
           << short_num(base_iqr > 0 ? mb / base_iqr : 0) << " (b:" << (b ? "ok" : "FAIL")
           << ") dMAE med=" << short_num(dmed) << " IQR=" << short_num(diqr) << " (c:"
           << (c ? "ok" : "FAIL") << "); ";
    }
    res.detail = os.str();
    return res;
}

// ---- criterion 8: diagnostic decay ----------------------------------------

CriterionResult check_diagnostic_decay() {
    CriterionResult res{8, "diagnostic-decay", true, "", 0.0};
    const LinearScmConfig scm{10, 5, 0.5};
    TrainConfig config;
    config.seed = derive_stream(20260809, "acc/decay");
    const Dataset train_data = sample_linear_scm(scm, 1000, derive_stream(config.seed, "train"));
    const Dataset val_data = sample_linear_scm(scm, 1000, derive_stream(config.seed, "val"));
    const RunResult run = train(config, train_data, val_data);

    double peak = -1e300;
    for (int e = config.ramp_start; e <= config.ramp_end && e < config.epochs; ++e)
        peak = std::max(peak, run.trace_lower[e]);
    const int tail_len = std::max(1, config.epochs / 20);
    double tail = 0.0;
    for (int e = config.epochs - tail_len; e < config.epochs; ++e) tail += run.trace_lower[e];
    tail /= tail_len;

    res.pass = tail <= 0.5 * peak;
    std::ostringstream os;
    os << "ramp-window peak = " << short_num(peak) << ", final-5% mean = " << short_num(tail)
       << ", ratio = " << short_num(peak > 0 ? tail / peak : 0);
    res.detail = os.str();
    return res;
}

// ---- criterion 9: gradient checks ------------------------------------------

CriterionResult check_gradients() {
    CriterionResult res{9, "gradient-checks", true, "", 0.0};
    const double step = 1e-5, tol = 1e-4;
    RngStream rng(derive_stream(20260809, "acc/grad"));
    std::ostringstream os;

    // (a) InfoNCE gradients wrt W_g, W_x and the representations.
    {
        const int b = 8, p = 4, q = 4, k = 3;
        BilinearCritic critic = BilinearCritic::random(k, p, q, rng.next_u64());
        Eigen::MatrixXd reps(b, p), conds(b, q);
        rng.fill_normal(reps);
        rng.fill_normal(conds);
        InfoNceGrads grads;
        infonce_loss_grads(critic, reps, conds, grads);

        const auto fd_matrix = [&](Eigen::MatrixXd& target, auto loss_fn) {
            Eigen::MatrixXd fd(target.rows(), target.cols());
            for (Eigen::Index j = 0; j < target.cols(); ++j)
                for (Eigen::Index i = 0; i < target.rows(); ++i) {
                    const double keep = target(i, j);
                    target(i, j) = keep + step;
                    const double up = loss_fn();
                    target(i, j) = keep - step;
                    const double down = loss_fn();
                    target(i, j) = keep;
                    fd(i, j) = (up - down) / (2.0 * step);
                }
            return fd;
        };
        const auto loss_fn = [&]() { return infonce_loss(critic, reps, conds).loss; };
        const double e1 = rel_err(grads.d_w_g, fd_matrix(critic.w_g, loss_fn));
        const double e2 = rel_err(grads.d_w_x, fd_matrix(critic.w_x, loss_fn));
        const double e3 = rel_err(grads.d_reps, fd_matrix(reps, loss_fn));
        os << "infonce rel err (w_g, w_x, reps) = " << e1 << ", " << e2 << ", " << e3 << "; ";
        if (e1 > tol || e2 > tol || e3 > tol) res.pass = false;
    }

    // (b) Combined predictor objective F = MSE - lambda * L_infonce, the
    // quantity whose gradient the trainer applies through grad_reverse.
    for (double lambda : {0.0, 0.5}) {
        const int b = 8, d = 3;
        BilinearCritic critic = BilinearCritic::random(4, d, d, rng.next_u64());
        Eigen::MatrixXd x(b, d), t(b, d);
        Eigen::VectorXd y(b);
        rng.fill_normal(x);
        rng.fill_normal(t);
        for (int i = 0; i < b; ++i) y(i) = rng.normal();
        LinearPredictor model(d, d);
        rng.fill_normal(model.w_x);
        rng.fill_normal(model.w_t);
        model.b = rng.normal();

        const auto objective = [&]() {
            const Eigen::VectorXd resid = model.predict(x, t) - y;
            const Eigen::MatrixXd h = t.array().rowwise() * model.w_t.transpose().array();
            return resid.squaredNorm() / b - lambda * infonce_loss(critic, h, x).loss;
        };
        // Analytic combined gradient, assembled the same way train() does.
        const Eigen::VectorXd resid = model.predict(x, t) - y;
        const Eigen::MatrixXd h = t.array().rowwise() * model.w_t.transpose().array();
        InfoNceGrads grads;
        infonce_loss_grads(critic, h, x, grads);
        Eigen::VectorXd g_wx = 2.0 / b * (x.transpose() * resid);
        Eigen::VectorXd g_wt = 2.0 / b * (t.transpose() * resid);
        const Eigen::VectorXd g_pen =
            (grads.d_reps.array() * t.array()).colwise().sum().transpose();
        g_wt += grad_reverse(g_pen, lambda);
        const double g_b = 2.0 / b * resid.sum();

        Eigen::VectorXd fd_wx(d), fd_wt(d);
        for (int j = 0; j < d; ++j) {
            const double keep = model.w_x(j);
            model.w_x(j) = keep + step;
            const double up = objective();
            model.w_x(j) = keep - step;
            const double down = objective();
            model.w_x(j) = keep;
            fd_wx(j) = (up - down) / (2.0 * step);
        }
        for (int j = 0; j < d; ++j) {
            const double keep = model.w_t(j);
            model.w_t(j) = keep + step;
            const double up = objective();
            model.w_t(j) = keep - step;
            const double down = objective();
            model.w_t(j) = keep;
            fd_wt(j) = (up - down) / (2.0 * step);
        }
        const double keep = model.b;
        model.b = keep + step;
        const double up = objective();
        model.b = keep - step;
        const double down = objective();
        model.b = keep;
        const double fd_b = (up - down) / (2.0 * step);

        const double e1 = rel_err(g_wx, fd_wx);
        const double e2 = rel_err(g_wt, fd_wt);
        const double e3 = std::abs(g_b - fd_b) / std::max({std::abs(g_b), std::abs(fd_b), 1e-12});
        os << "combined(lambda=" << lambda << ") rel err = " << std::max({e1, e2, e3}) << "; ";
        if (e1 > tol || e2 > tol || e3 > tol) res.pass = false;
    }

    // (c) grad_reverse composition on a two-parameter toy.
    {
        Eigen::VectorXd w(2), t(2);
        w << 0.7, -1.3;
        t << 1.1, 0.4;
        const double lambda = 0.5;
        const auto toy_loss = [&]() {
            const double h0 = w(0) * t(0), h1 = w(1) * t(1);
            return std::sin(h0) + 0.5 * h1 * h1 + h0 * h1;
        };
        Eigen::VectorXd d_h(2);
        d_h << std::cos(w(0) * t(0)) + w(1) * t(1), w(1) * t(1) + w(0) * t(0);
        Eigen::VectorXd d_w = d_h.array() * t.array();
        const Eigen::VectorXd reversed = grad_reverse(d_w, lambda);

        Eigen::VectorXd fd(2);
        for (int j = 0; j < 2; ++j) {
            const double keep = w(j);
            w(j) = keep + step;
            const double up = -lambda * toy_loss();
            w(j) = keep - step;
            const double down = -lambda * toy_loss();
            w(j) = keep;
            fd(j) = (up - down) / (2.0 * step);
        }
        const double e = rel_err(reversed, fd);
        os << "reversal composition rel err = " << e;
        if (e > tol) res.pass = false;
    }
    res.detail = os.str();
    return res;
}

// ---- criterion 10: byte-identical repeated invocations ---------------------

CriterionResult check_determinism(const std::string& scratch) {
    CriterionResult res{10, "determinism", true, "", 0.0};

    const auto read_bytes = [](const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };

    SweepConfig sweep;
    sweep.sigma_y_grid = {0.0, 0.5};
    sweep.seeds_per_level = 2;
    sweep.train.epochs = 60;
    sweep.train.ramp_start = 10;
    sweep.train.ramp_end = 30;
    sweep.train.diagnostic_batch = 32;
    sweep.train.critic_dim = 8;
    sweep.train.seed = 7;
    sweep.n_train = 128;
    sweep.n_val = 128;
    sweep.workers = 2;

    const std::string sweep_a = scratch + "/crlab_acc_sweep_a.csv";
    const std::string sweep_b = scratch + "/crlab_acc_sweep_b.csv";
    run_sweep(sweep).write_csv(sweep_a);
    run_sweep(sweep).write_csv(sweep_b);
    const bool sweep_ok = read_bytes(sweep_a) == read_bytes(sweep_b) &&
                          !read_bytes(sweep_a).empty();

    MiBenchConfig bench;
    bench.correlations = {0.0, 0.6};
    bench.steps = 300;
    bench.batch_size = 64;
    bench.eval_batches = 20;
    bench.seed = 11;
    const std::string bench_a = scratch + "/crlab_acc_bench_a.csv";
    const std::string bench_b = scratch + "/crlab_acc_bench_b.csv";
    write_mi_bench_csv(run_mi_bench(bench), bench_a);
    write_mi_bench_csv(run_mi_bench(bench), bench_b);
    const bool bench_ok = read_bytes(bench_a) == read_bytes(bench_b) &&
                          !read_bytes(bench_a).empty();

    res.pass = sweep_ok && bench_ok;
    std::ostringstream os;
    os << "sweep files byte-identical: " << (sweep_ok ? "yes" : "NO")
       << "; mi-bench files byte-identical: " << (bench_ok ? "yes" : "NO");
    res.detail = os.str();
    return res;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            std::ostream& log) {
    using Clock = std::chrono::steady_clock;
    const auto wants = [&](int idx) {
        return options.only.empty() ||
               std::find(options.only.begin(), options.only.end(), idx) != options.only.end();
    };

    std::vector<std::function<CriterionResult()>> checks{
        [] { return check_prop1(); },
        [] { return check_lambda_crit(); },
        [] { return check_lossless(); },
        [] { return check_gamma_equivalence(); },
        [] { return check_purification(); },
        [] { return check_sandwich(); },
        [&] { return check_noise_sweep(options.workers); },
        [] { return check_diagnostic_decay(); },
        [] { return check_gradients(); },
        [&] { return check_determinism(options.scratch_dir); },
    };

    std::vector<CriterionResult> results;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        if (!wants(static_cast<int>(i) + 1)) continue;
        const auto start = Clock::now();
        CriterionResult r = checks[i]();
        r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
        log << (r.pass ? "[PASS] " : "[FAIL] ") << "criterion " << r.index << " ("
            << r.name << ", " << r.seconds << " s): " << r.detail << "\n";
        log.flush();
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace crlab
