#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "crlab/gaussian_scm.hpp"
#include "crlab/scm.hpp"
#include "crlab/trainer.hpp"

namespace crlab {

// Noise sweep over the linear SCM: for each (sigma_y, seed, method) a fresh
// train/validation pair is sampled, a model is trained, and validation
// MAE + intervention sensitivity are recorded. baseline and crl share data
// and RNG streams at a given (sigma_y, seed) so ΔMAE can be paired by seed;
// the methods differ only in lambda_max (baseline forces 0).
struct SweepConfig {
    std::vector<double> sigma_y_grid{0.0, 0.25, 0.5, 0.75, 1.0};
    int seeds_per_level = 50;
    std::vector<std::string> methods{"baseline", "crl"};
    TrainConfig train;
    int d = 10;
    int d_c = 5;
    int n_train = 1000;
    int n_val = 1000;
    int workers = 1;
    std::string out;

    void validate() const;
};

struct ResultRow {
    std::string method;
    double sigma_y = 0.0;
    int seed = 0;
    double mae = 0.0;
    double sensitivity = 0.0;
    bool failed = false;
    std::string error;
};

struct AggregateRow {
    std::string method;
    double sigma_y = 0.0;
    std::string metric;  // "mae" or "sensitivity"
    double median = 0.0;
    double iqr = 0.0;
};

struct ResultTable {
    std::vector<ResultRow> rows;
    std::vector<AggregateRow> aggregates;

    bool any_failed() const;
    void write_csv(std::ostream& out) const;
    void write_csv(const std::string& path) const;
};

// Deterministic given the config; jobs may run on `workers` threads, and
// the output is independent of scheduling order (each job's RNG streams
// derive only from (sigma_y, seed)).
ResultTable run_sweep(const SweepConfig& config);

// Recomputes aggregates from the raw rows and rejects the file when they
// disagree. Parse errors carry 1-based line numbers.
ResultTable load_result_table(const std::string& path);

// Aggregates recomputed from rows (failed rows excluded), in the canonical
// order used by run_sweep.
std::vector<AggregateRow> compute_aggregates(const std::vector<ResultRow>& rows);

// J-vs-lambda table for the closed-form Gaussian SCM: one row per
// (lambda, representation) with representations Causal, Naive, and
// CompressedCausal(v) per var_g grid point. A lambda_crit column is
// appended unless alpha == 0 (degenerate; column omitted).
void emit_analytic_curves(const GaussianScmParams& params,
                          const std::vector<double>& lambda_grid,
                          const std::vector<double>& var_g_grid, std::ostream& out);
void emit_analytic_curves(const GaussianScmParams& params,
                          const std::vector<double>& lambda_grid,
                          const std::vector<double>& var_g_grid, const std::string& path);

struct MiBenchConfig {
    std::vector<double> correlations{0.0, 0.5, 0.8, 0.95};
    int batch_size = 256;
    int steps = 10000;
    std::uint64_t seed = 0;
    int critic_dim = 8;
    double critic_learning_rate = 1e-3;
    int eval_batches = 100;

    void validate() const;
};

struct MiBenchRow {
    double corr = 0.0;
    double true_mi = 0.0;   // -0.5 ln(1 - corr^2)
    double lower = 0.0;     // InfoNCE lower bound, averaged over eval batches
    double upper = 0.0;     // NCE-CLUB estimate, averaged over eval batches
    bool diverged = false;
    std::string error;
};

// Trains one critic per correlation on fresh correlated Gaussian pairs and
// evaluates the frozen critic on eval_batches fresh batches.
std::vector<MiBenchRow> run_mi_bench(const MiBenchConfig& config);

void write_mi_bench_csv(const std::vector<MiBenchRow>& rows, std::ostream& out);
void write_mi_bench_csv(const std::vector<MiBenchRow>& rows, const std::string& path);

// Per-run record for the train subcommand (JSON keys: seed, sigma_y,
// lambda_max, mae, sensitivity, trace_lower, trace_upper).
void write_run_result_json(const RunResult& result, double sigma_y, double lambda_max,
                           const std::string& path);

// %.17g formatting used for every floating-point value written to disk;
// round-trips exactly through strtod.
std::string format_double(double v);

}  // namespace crlab
