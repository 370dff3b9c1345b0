#include "crlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "crlab/rng.hpp"
#include "crlab/stats.hpp"

namespace crlab {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void SweepConfig::validate() const {
    if (sigma_y_grid.empty()) throw std::invalid_argument("SweepConfig: empty sigma_y grid");
    for (double s : sigma_y_grid)
        if (!(s >= 0.0)) throw std::invalid_argument("SweepConfig: sigma_y must be >= 0");
    if (seeds_per_level < 1)
        throw std::invalid_argument("SweepConfig: seeds_per_level must be >= 1");
    if (methods.empty()) throw std::invalid_argument("SweepConfig: no methods selected");
    for (const auto& m : methods)
        if (m != "baseline" && m != "crl")
            throw std::invalid_argument("SweepConfig: unknown method '" + m + "'");
    if (n_train < 1 || n_val < 1)
        throw std::invalid_argument("SweepConfig: sample counts must be >= 1");
    if (workers < 1) throw std::invalid_argument("SweepConfig: workers must be >= 1");
    LinearScmConfig(d, d_c, 0.0);  // validates the dimension split
    train.validate();
}

bool ResultTable::any_failed() const {
    for (const auto& r : rows)
        if (r.failed) return true;
    return false;
}

namespace {

std::string quote_csv(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        out += c;
    }
    out += '"';
    return out;
}

constexpr const char* kTableHeader =
    "row,method,sigma_y,seed,mae,sensitivity,metric,median,iqr,error";

}  // namespace

void ResultTable::write_csv(std::ostream& out) const {
    out << kTableHeader << '\n';
    for (const auto& r : rows) {
        out << "raw," << r.method << ',' << format_double(r.sigma_y) << ',' << r.seed << ',';
        if (r.failed)
            out << ",,,,," << quote_csv(r.error);
        else
            out << format_double(r.mae) << ',' << format_double(r.sensitivity) << ",,,,";
        out << '\n';
    }
    for (const auto& a : aggregates) {
        out << "agg," << a.method << ',' << format_double(a.sigma_y) << ",,,," << a.metric
            << ',' << format_double(a.median) << ',' << format_double(a.iqr) << ",\n";
    }
}

void ResultTable::write_csv(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("ResultTable::write_csv: cannot open " + path);
    write_csv(out);
}

std::vector<AggregateRow> compute_aggregates(const std::vector<ResultRow>& rows) {
    // Preserve first-seen order of methods and noise levels.
    std::vector<std::string> methods;
    std::vector<double> levels;
    for (const auto& r : rows) {
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
            methods.push_back(r.method);
        if (std::find(levels.begin(), levels.end(), r.sigma_y) == levels.end())
            levels.push_back(r.sigma_y);
    }
    std::vector<AggregateRow> aggs;
    for (const auto& m : methods)
        for (double s : levels) {
            std::vector<double> maes, sens;
            for (const auto& r : rows) {
                if (r.failed || r.method != m || r.sigma_y != s) continue;
                maes.push_back(r.mae);
                sens.push_back(r.sensitivity);
            }
            if (maes.empty()) continue;
            aggs.push_back({m, s, "mae", median(maes), iqr(maes)});
            aggs.push_back({m, s, "sensitivity", median(sens), iqr(sens)});
        }
    return aggs;
}

ResultTable run_sweep(const SweepConfig& config) {
    config.validate();

    struct Job {
        double sigma_y;
        int seed;
        std::string method;
    };
    std::vector<Job> jobs;
    for (double s : config.sigma_y_grid)
        for (int seed = 0; seed < config.seeds_per_level; ++seed)
            for (const auto& m : config.methods) jobs.push_back({s, seed, m});

    ResultTable table;
    table.rows.resize(jobs.size());

    const std::uint64_t base = derive_stream(config.train.seed, "sweep");
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            const Job& job = jobs[i];
            ResultRow row;
            row.method = job.method;
            row.sigma_y = job.sigma_y;
            row.seed = job.seed;
            try {
                // Streams depend on (sigma_y, seed) only, so baseline and
                // crl at the same point share data and batch order.
                const std::uint64_t key =
                    mix_seed(mix_seed(base, double_bits(job.sigma_y)),
                             static_cast<std::uint64_t>(job.seed));
                const LinearScmConfig scm{config.d, config.d_c, job.sigma_y};
                const Dataset train_data =
                    sample_linear_scm(scm, config.n_train, derive_stream(key, "train-data"));
                const Dataset val_data =
                    sample_linear_scm(scm, config.n_val, derive_stream(key, "val-data"));
                TrainConfig tc = config.train;
                tc.seed = derive_stream(key, "trainer");
                if (job.method == "baseline") tc.lambda_max = 0.0;
                const RunResult res = train(tc, train_data, val_data);
                row.mae = res.mae;
                row.sensitivity = res.sensitivity;
            } catch (const std::exception& e) {
                row.failed = true;
                row.error = e.what();
            }
            table.rows[i] = std::move(row);
        }
    };

    const int worker_count =
        std::min<std::size_t>(config.workers, jobs.size());
    if (worker_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(worker_count);
        for (int i = 0; i < worker_count; ++i) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }

    table.aggregates = compute_aggregates(table.rows);
    return table;
}

namespace {

// Splits one CSV line; only the final (error) field may be quoted.
std::vector<std::string> split_csv(const std::string& line, int lineno) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted)
        throw std::runtime_error("line " + std::to_string(lineno) + ": unterminated quote");
    fields.push_back(cur);
    return fields;
}

double parse_double(const std::string& s, int lineno, const char* what) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || s.empty())
        throw std::runtime_error("line " + std::to_string(lineno) + ": bad " + what + " '" +
                                 s + "'");
    return v;
}

int parse_int(const std::string& s, int lineno, const char* what) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("line " + std::to_string(lineno) + ": bad " + what + " '" +
                                 s + "'");
    }
}

}  // namespace

ResultTable load_result_table(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_result_table: cannot open " + path);
    std::string line;
    int lineno = 0;
    if (!std::getline(in, line))
        throw std::runtime_error("load_result_table: " + path + " is empty");
    ++lineno;
    if (line == std::string(kTableHeader) + "\r") line.pop_back();
    if (line != kTableHeader)
        throw std::runtime_error("line 1: unexpected header '" + line + "'");

    ResultTable table;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split_csv(line, lineno);
        if (f.size() != 10)
            throw std::runtime_error("line " + std::to_string(lineno) + ": expected 10 fields, got " +
                                     std::to_string(f.size()));
        if (f[0] == "raw") {
            ResultRow r;
            r.method = f[1];
            r.sigma_y = parse_double(f[2], lineno, "sigma_y");
            r.seed = parse_int(f[3], lineno, "seed");
            if (f[4].empty() && f[5].empty()) {
                r.failed = true;
                r.error = f[9];
            } else {
                r.mae = parse_double(f[4], lineno, "mae");
                r.sensitivity = parse_double(f[5], lineno, "sensitivity");
            }
            table.rows.push_back(std::move(r));
        } else if (f[0] == "agg") {
            AggregateRow a;
            a.method = f[1];
            a.sigma_y = parse_double(f[2], lineno, "sigma_y");
            a.metric = f[6];
            a.median = parse_double(f[7], lineno, "median");
            a.iqr = parse_double(f[8], lineno, "iqr");
            table.aggregates.push_back(std::move(a));
        } else {
            throw std::runtime_error("line " + std::to_string(lineno) + ": unknown row kind '" +
                                     f[0] + "'");
        }
    }
    if (table.rows.empty())
        throw std::runtime_error("load_result_table: " + path + " contains no raw rows");

    // Self-consistency: stored aggregates must match recomputation exactly.
    const auto expect = compute_aggregates(table.rows);
    if (expect.size() != table.aggregates.size())
        throw std::runtime_error("load_result_table: aggregate row count mismatch");
    for (std::size_t i = 0; i < expect.size(); ++i) {
        const auto& a = table.aggregates[i];
        const auto& e = expect[i];
        if (a.method != e.method || a.sigma_y != e.sigma_y || a.metric != e.metric ||
            a.median != e.median || a.iqr != e.iqr)
            throw std::runtime_error(
                "load_result_table: aggregate row " + std::to_string(i) +
                " inconsistent with raw rows (" + a.method + ", sigma_y=" +
                format_double(a.sigma_y) + ", " + a.metric + ")");
    }
    return table;
}

void emit_analytic_curves(const GaussianScmParams& params,
                          const std::vector<double>& lambda_grid,
                          const std::vector<double>& var_g_grid, std::ostream& out) {
    if (lambda_grid.empty() || var_g_grid.empty())
        throw std::invalid_argument("emit_analytic_curves: empty grid");
    const bool degenerate = params.alpha == 0.0;
    const double crit = degenerate ? 0.0 : lambda_crit(params);

    out << "lambda,representation,var_g,j";
    if (!degenerate) out << ",lambda_crit";
    out << '\n';

    auto row = [&](double lambda, const char* name, double var_g, double j) {
        out << format_double(lambda) << ',' << name << ',' << format_double(var_g) << ','
            << format_double(j);
        if (!degenerate) out << ',' << format_double(crit);
        out << '\n';
    };

    for (double lambda : lambda_grid) {
        row(lambda, "causal", 0.0, j_value(params, RepresentationSpec::causal(), lambda));
        row(lambda, "naive", 0.0, j_value(params, RepresentationSpec::naive(), lambda));
        for (double v : var_g_grid)
            row(lambda, "compressed", v,
                j_value(params, RepresentationSpec::compressed(v), lambda));
    }
}

void emit_analytic_curves(const GaussianScmParams& params,
                          const std::vector<double>& lambda_grid,
                          const std::vector<double>& var_g_grid, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_analytic_curves: cannot open " + path);
    emit_analytic_curves(params, lambda_grid, var_g_grid, out);
}

void MiBenchConfig::validate() const {
    if (correlations.empty()) throw std::invalid_argument("MiBenchConfig: no correlations");
    for (double c : correlations)
        if (!(c > -1.0 && c < 1.0))
            throw std::invalid_argument("MiBenchConfig: correlations must lie in (-1, 1)");
    if (batch_size < 2) throw std::invalid_argument("MiBenchConfig: batch_size must be >= 2");
    if (steps < 1) throw std::invalid_argument("MiBenchConfig: steps must be >= 1");
    if (critic_dim < 1) throw std::invalid_argument("MiBenchConfig: critic_dim must be >= 1");
    if (!(critic_learning_rate > 0.0))
        throw std::invalid_argument("MiBenchConfig: critic_learning_rate must be > 0");
    if (eval_batches < 1)
        throw std::invalid_argument("MiBenchConfig: eval_batches must be >= 1");
}

std::vector<MiBenchRow> run_mi_bench(const MiBenchConfig& config) {
    config.validate();
    std::vector<MiBenchRow> rows;
    rows.reserve(config.correlations.size());
    for (std::size_t idx = 0; idx < config.correlations.size(); ++idx) {
        const double corr = config.correlations[idx];
        MiBenchRow row;
        row.corr = corr;
        row.true_mi = -0.5 * std::log1p(-corr * corr);
        const std::uint64_t key =
            mix_seed(derive_stream(config.seed, "mi-bench"), double_bits(corr));
        const int batch = config.batch_size;
        const BatchSource source = [corr, batch](RngStream& rng, Eigen::MatrixXd& reps,
                                                 Eigen::MatrixXd& conds) {
            reps.resize(batch, 1);
            conds.resize(batch, 1);
            const double residual = std::sqrt(1.0 - corr * corr);
            for (int i = 0; i < batch; ++i) {
                const double x = rng.normal();
                conds(i, 0) = x;
                reps(i, 0) = corr * x + residual * rng.normal();
            }
        };
        try {
            BilinearCritic critic =
                BilinearCritic::random(config.critic_dim, 1, 1, derive_stream(key, "init"));
            critic = train_critic(critic, source, config.steps, config.critic_learning_rate,
                                  derive_stream(key, "train"));
            RngStream eval_rng(derive_stream(key, "eval"));
            Eigen::MatrixXd reps, conds;
            double lower = 0.0, upper = 0.0;
            for (int b = 0; b < config.eval_batches; ++b) {
                source(eval_rng, reps, conds);
                const MiEstimate est = estimate_mi(critic, reps, conds, eval_rng);
                lower += est.lower_bound_nats;
                upper += est.upper_bound_nats;
            }
            row.lower = lower / config.eval_batches;
            row.upper = upper / config.eval_batches;
        } catch (const std::exception& e) {
            row.diverged = true;
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_mi_bench_csv(const std::vector<MiBenchRow>& rows, std::ostream& out) {
    out << "corr,true_mi,lower,upper,status\n";
    for (const auto& r : rows) {
        out << format_double(r.corr) << ',' << format_double(r.true_mi) << ',';
        if (r.diverged)
            out << ",," << quote_csv("diverged: " + r.error);
        else
            out << format_double(r.lower) << ',' << format_double(r.upper) << ",ok";
        out << '\n';
    }
}

void write_mi_bench_csv(const std::vector<MiBenchRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_mi_bench_csv: cannot open " + path);
    write_mi_bench_csv(rows, out);
}

void write_run_result_json(const RunResult& result, double sigma_y, double lambda_max,
                           const std::string& path) {
    nlohmann::json j;
    j["seed"] = result.seed;
    j["sigma_y"] = sigma_y;
    j["lambda_max"] = lambda_max;
    j["mae"] = result.mae;
    j["sensitivity"] = result.sensitivity;
    j["trace_lower"] = result.trace_lower;
    j["trace_upper"] = result.trace_upper;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_run_result_json: cannot open " + path);
    out << j.dump(2) << '\n';
}

}  // namespace crlab
