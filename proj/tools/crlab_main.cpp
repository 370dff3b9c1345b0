// crlab: causal-disentanglement laboratory CLI.
//
// Subcommands: analytic (closed-form J curves), sweep (noise sweep over the
// linear SCM), mi-bench (estimator calibration on Gaussian pairs), train
// (single run, JSON record), check (acceptance property suite).
//
// Each subcommand takes --config <json>; a command-line flag with the same
// name as a JSON field overrides it. Exit codes: 0 success, 1 partial run
// failures, 2 invalid config or I/O error.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "crlab/acceptance.hpp"
#include "crlab/harness.hpp"
#include "crlab/rng.hpp"

namespace {

using nlohmann::json;

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config " + path);
    json j;
    in >> j;
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    return j;
}

// JSON value applies only when the flag was not passed on the command line.
template <typename T>
void overlay(const json& j, CLI::App* cmd, const std::string& key, T& value) {
    const auto* opt = cmd->get_option_no_throw("--" + key);
    if (opt && opt->count() > 0) return;
    if (j.contains(key)) value = j.at(key).get<T>();
}

void add_train_flags(CLI::App* cmd, crlab::TrainConfig& cfg) {
    cmd->add_option("--learning_rate", cfg.learning_rate, "predictor learning rate");
    cmd->add_option("--batch_size", cfg.batch_size, "minibatch size");
    cmd->add_option("--epochs", cfg.epochs, "training epochs (full passes)");
    cmd->add_option("--lambda_max", cfg.lambda_max, "GRL schedule plateau");
    cmd->add_option("--ramp_start", cfg.ramp_start, "epoch where the cubic ramp starts");
    cmd->add_option("--ramp_end", cfg.ramp_end, "epoch where the ramp reaches lambda_max");
    cmd->add_option("--seed", cfg.seed, "run seed");
    cmd->add_option("--critic_dim", cfg.critic_dim, "critic embedding dimension");
    cmd->add_option("--critic_learning_rate", cfg.critic_learning_rate, "critic learning rate");
    cmd->add_option("--diagnostic_batch", cfg.diagnostic_batch,
                    "validation batch for the MI trace");
}

void overlay_train(const json& j, CLI::App* cmd, crlab::TrainConfig& cfg) {
    overlay(j, cmd, "learning_rate", cfg.learning_rate);
    overlay(j, cmd, "batch_size", cfg.batch_size);
    overlay(j, cmd, "epochs", cfg.epochs);
    overlay(j, cmd, "lambda_max", cfg.lambda_max);
    overlay(j, cmd, "ramp_start", cfg.ramp_start);
    overlay(j, cmd, "ramp_end", cfg.ramp_end);
    overlay(j, cmd, "seed", cfg.seed);
    overlay(j, cmd, "critic_dim", cfg.critic_dim);
    overlay(j, cmd, "critic_learning_rate", cfg.critic_learning_rate);
    overlay(j, cmd, "diagnostic_batch", cfg.diagnostic_batch);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"causal-disentanglement laboratory"};
    app.require_subcommand(1);

    // --- analytic ---------------------------------------------------------
    auto* analytic = app.add_subcommand("analytic", "closed-form J(lambda) curve table");
    std::string analytic_config;
    double alpha = 1, beta = 1, rho = 1, delta = 1, var_z = 1, var_c = 1, var_n = 1, var_y = 1;
    std::vector<double> lambda_grid, var_g_grid;
    std::string analytic_out;
    analytic->add_option("--config", analytic_config, "JSON config");
    analytic->add_option("--alpha", alpha, "Z -> T_C coefficient");
    analytic->add_option("--beta", beta, "Z -> T_nC coefficient");
    analytic->add_option("--rho", rho, "T_C -> Y coefficient");
    analytic->add_option("--delta", delta, "Z -> Y coefficient");
    analytic->add_option("--var_z", var_z, "confounder variance");
    analytic->add_option("--var_c", var_c, "causal treatment noise variance");
    analytic->add_option("--var_n", var_n, "non-causal treatment noise variance");
    analytic->add_option("--var_y", var_y, "outcome noise variance");
    analytic->add_option("--lambda_grid", lambda_grid, "penalty weights");
    analytic->add_option("--var_g_grid", var_g_grid, "compression variances");
    analytic->add_option("--out", analytic_out, "output CSV path");

    // --- sweep --------------------------------------------------------------
    auto* sweep_cmd = app.add_subcommand("sweep", "noise sweep over the linear SCM");
    std::string sweep_config;
    crlab::SweepConfig sweep;
    sweep_cmd->add_option("--config", sweep_config, "JSON config");
    sweep_cmd->add_option("--sigma_y_grid", sweep.sigma_y_grid, "outcome noise levels");
    sweep_cmd->add_option("--seeds_per_level", sweep.seeds_per_level, "seeds per noise level");
    sweep_cmd->add_option("--methods", sweep.methods, "subset of {baseline, crl}");
    sweep_cmd->add_option("--d", sweep.d, "treatment/confounder dimension");
    sweep_cmd->add_option("--d_c", sweep.d_c, "causal dimension");
    sweep_cmd->add_option("--n_train", sweep.n_train, "training samples per run");
    sweep_cmd->add_option("--n_val", sweep.n_val, "validation samples per run");
    sweep_cmd->add_option("--workers", sweep.workers, "parallel jobs");
    sweep_cmd->add_option("--out", sweep.out, "output CSV path");
    add_train_flags(sweep_cmd, sweep.train);

    // --- mi-bench -----------------------------------------------------------
    auto* bench_cmd = app.add_subcommand("mi-bench", "estimator calibration on Gaussian pairs");
    std::string bench_config;
    crlab::MiBenchConfig bench;
    std::string bench_out;
    bench_cmd->add_option("--config", bench_config, "JSON config");
    bench_cmd->add_option("--correlations", bench.correlations, "pair correlations in (-1,1)");
    bench_cmd->add_option("--batch_size", bench.batch_size, "contrastive batch size");
    bench_cmd->add_option("--steps", bench.steps, "critic training steps");
    bench_cmd->add_option("--seed", bench.seed, "seed");
    bench_cmd->add_option("--critic_dim", bench.critic_dim, "critic embedding dimension");
    bench_cmd->add_option("--critic_learning_rate", bench.critic_learning_rate,
                          "critic learning rate");
    bench_cmd->add_option("--eval_batches", bench.eval_batches, "frozen-critic eval batches");
    bench_cmd->add_option("--out", bench_out, "output CSV path");

    // --- train ----------------------------------------------------------------
    auto* train_cmd = app.add_subcommand("train", "single run on a fresh SCM sample");
    std::string train_config;
    crlab::TrainConfig tc;
    double train_sigma_y = 0.5;
    int train_d = 10, train_d_c = 5, train_n = 1000, train_n_val = 1000;
    std::string train_out;
    train_cmd->add_option("--config", train_config, "JSON config");
    train_cmd->add_option("--sigma_y", train_sigma_y, "outcome noise level");
    train_cmd->add_option("--d", train_d, "treatment/confounder dimension");
    train_cmd->add_option("--d_c", train_d_c, "causal dimension");
    train_cmd->add_option("--n_train", train_n, "training samples");
    train_cmd->add_option("--n_val", train_n_val, "validation samples");
    train_cmd->add_option("--out", train_out, "output JSON path");
    add_train_flags(train_cmd, tc);

    // --- check -----------------------------------------------------------------
    auto* check_cmd = app.add_subcommand("check", "run the acceptance property suite");
    crlab::AcceptanceOptions acc;
    acc.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    check_cmd->add_option("--workers", acc.workers, "parallel jobs for the sweep criterion");
    check_cmd->add_option("--scratch", acc.scratch_dir, "scratch directory");
    check_cmd->add_option("--only", acc.only, "criterion indices to run (default all)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*analytic) {
            const json j = load_config(analytic_config);
            overlay(j, analytic, "alpha", alpha);
            overlay(j, analytic, "beta", beta);
            overlay(j, analytic, "rho", rho);
            overlay(j, analytic, "delta", delta);
            overlay(j, analytic, "var_z", var_z);
            overlay(j, analytic, "var_c", var_c);
            overlay(j, analytic, "var_n", var_n);
            overlay(j, analytic, "var_y", var_y);
            overlay(j, analytic, "lambda_grid", lambda_grid);
            overlay(j, analytic, "var_g_grid", var_g_grid);
            overlay(j, analytic, "out", analytic_out);
            if (analytic_out.empty()) throw std::invalid_argument("analytic: --out is required");
            if (lambda_grid.empty()) {
                lambda_grid.resize(51);
                for (int i = 0; i <= 50; ++i) lambda_grid[i] = 0.1 * i;
            }
            if (var_g_grid.empty()) {
                var_g_grid.resize(30);
                for (int i = 0; i < 30; ++i)
                    var_g_grid[i] = std::pow(10.0, -3.0 + 6.0 * i / 29.0);
            }
            const crlab::GaussianScmParams params(alpha, beta, rho, delta, var_z, var_c,
                                                  var_n, var_y);
            if (params.alpha == 0.0)
                std::cerr << "analytic: alpha = 0 is degenerate; lambda_crit column omitted\n";
            crlab::emit_analytic_curves(params, lambda_grid, var_g_grid, analytic_out);
            return 0;
        }

        if (*sweep_cmd) {
            const json j = load_config(sweep_config);
            overlay_train(j.contains("train") ? j.at("train") : json::object(), sweep_cmd,
                          sweep.train);
            overlay(j, sweep_cmd, "sigma_y_grid", sweep.sigma_y_grid);
            overlay(j, sweep_cmd, "seeds_per_level", sweep.seeds_per_level);
            overlay(j, sweep_cmd, "methods", sweep.methods);
            overlay(j, sweep_cmd, "d", sweep.d);
            overlay(j, sweep_cmd, "d_c", sweep.d_c);
            overlay(j, sweep_cmd, "n_train", sweep.n_train);
            overlay(j, sweep_cmd, "n_val", sweep.n_val);
            overlay(j, sweep_cmd, "workers", sweep.workers);
            overlay(j, sweep_cmd, "out", sweep.out);
            if (sweep.out.empty()) throw std::invalid_argument("sweep: --out is required");
            const crlab::ResultTable table = crlab::run_sweep(sweep);
            table.write_csv(sweep.out);
            if (table.any_failed()) {
                std::cerr << "sweep: some runs failed; see error column\n";
                return 1;
            }
            return 0;
        }

        if (*bench_cmd) {
            const json j = load_config(bench_config);
            overlay(j, bench_cmd, "correlations", bench.correlations);
            overlay(j, bench_cmd, "batch_size", bench.batch_size);
            overlay(j, bench_cmd, "steps", bench.steps);
            overlay(j, bench_cmd, "seed", bench.seed);
            overlay(j, bench_cmd, "critic_dim", bench.critic_dim);
            overlay(j, bench_cmd, "critic_learning_rate", bench.critic_learning_rate);
            overlay(j, bench_cmd, "eval_batches", bench.eval_batches);
            overlay(j, bench_cmd, "out", bench_out);
            if (bench_out.empty()) throw std::invalid_argument("mi-bench: --out is required");
            const auto rows = crlab::run_mi_bench(bench);
            crlab::write_mi_bench_csv(rows, bench_out);
            for (const auto& r : rows)
                if (r.diverged) {
                    std::cerr << "mi-bench: divergence at corr " << r.corr << "\n";
                    return 1;
                }
            return 0;
        }

        if (*train_cmd) {
            const json j = load_config(train_config);
            overlay_train(j, train_cmd, tc);
            overlay(j, train_cmd, "sigma_y", train_sigma_y);
            overlay(j, train_cmd, "d", train_d);
            overlay(j, train_cmd, "d_c", train_d_c);
            overlay(j, train_cmd, "n_train", train_n);
            overlay(j, train_cmd, "n_val", train_n_val);
            overlay(j, train_cmd, "out", train_out);
            if (train_out.empty()) throw std::invalid_argument("train: --out is required");
            const crlab::LinearScmConfig scm{train_d, train_d_c, train_sigma_y};
            const crlab::Dataset train_data =
                crlab::sample_linear_scm(scm, train_n, crlab::derive_stream(tc.seed, "train"));
            const crlab::Dataset val_data =
                crlab::sample_linear_scm(scm, train_n_val, crlab::derive_stream(tc.seed, "val"));
            const crlab::RunResult result = crlab::train(tc, train_data, val_data);
            crlab::write_run_result_json(result, train_sigma_y, tc.lambda_max, train_out);
            std::cout << "mae=" << result.mae << " sensitivity=" << result.sensitivity << "\n";
            return 0;
        }

        if (*check_cmd) {
            const auto results = crlab::run_acceptance(acc, std::cout);
            for (const auto& r : results)
                if (!r.pass) return 1;
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
