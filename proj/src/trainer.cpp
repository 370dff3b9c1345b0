#include "crlab/trainer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "crlab/rng.hpp"

namespace crlab {

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0))
        throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
    if (batch_size < 2) throw std::invalid_argument("TrainConfig: batch_size must be >= 2");
    if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
    if (!(lambda_max >= 0.0))
        throw std::invalid_argument("TrainConfig: lambda_max must be >= 0");
    if (ramp_start < 0 || ramp_start > ramp_end || ramp_end > epochs)
        throw std::invalid_argument("TrainConfig: need 0 <= ramp_start <= ramp_end <= epochs");
    if (critic_dim < 1) throw std::invalid_argument("TrainConfig: critic_dim must be >= 1");
    if (!(critic_learning_rate >= 0.0))
        throw std::invalid_argument("TrainConfig: critic_learning_rate must be >= 0");
    if (diagnostic_batch < 2)
        throw std::invalid_argument("TrainConfig: diagnostic_batch must be >= 2");
}

double grl_schedule(int epoch, const TrainConfig& config) {
    if (epoch < 0 || epoch >= config.epochs)
        throw std::invalid_argument("grl_schedule: epoch out of range");
    if (epoch < config.ramp_start) return 0.0;
    if (epoch >= config.ramp_end) return config.lambda_max;
    const double u = static_cast<double>(epoch - config.ramp_start) /
                     static_cast<double>(config.ramp_end - config.ramp_start);
    return config.lambda_max * u * u * u;
}

namespace {

// Takes the first `count` entries of a partial Fisher-Yates pass, giving a
// uniform subset without replacement.
void sample_rows(RngStream& rng, std::vector<int>& pool, int count, std::vector<int>& out) {
    const int n = static_cast<int>(pool.size());
    out.resize(count);
    for (int i = 0; i < count; ++i) {
        const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
        std::swap(pool[i], pool[j]);
        out[i] = pool[i];
    }
}

void gather(const Eigen::MatrixXd& src, const std::vector<int>& rows, Eigen::MatrixXd& dst) {
    dst.resize(static_cast<Eigen::Index>(rows.size()), src.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) dst.row(static_cast<Eigen::Index>(i)) = src.row(rows[i]);
}

}  // namespace

RunResult train(const TrainConfig& config, const Dataset& train_data,
                const Dataset& val_data) {
    config.validate();
    train_data.validate();
    val_data.validate();
    if (train_data.treatment_dim() != val_data.treatment_dim() ||
        train_data.confounder_dim() != val_data.confounder_dim())
        throw std::invalid_argument("train: train/validation dimension mismatch");

    const int n = train_data.n();
    const int d_x = train_data.confounder_dim();
    const int d_t = train_data.treatment_dim();
    const int batch = std::min(config.batch_size, n);
    const int diag_batch = std::min(config.diagnostic_batch, val_data.n());

    LinearPredictor model(d_x, d_t);
    BilinearCritic critic = BilinearCritic::random(
        config.critic_dim, d_t, d_x, derive_stream(config.seed, "trainer/critic-init"));

    RngStream batch_rng(derive_stream(config.seed, "trainer/batches"));
    RngStream diag_rng(derive_stream(config.seed, "trainer/diagnostics"));

    AdamState adam_wx(d_x, 1), adam_wt(d_t, 1), adam_b(1, 1);
    AdamState adam_cg(critic.w_g.rows(), critic.w_g.cols());
    AdamState adam_cx(critic.w_x.rows(), critic.w_x.cols());

    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    std::vector<int> rows;
    std::vector<int> diag_pool(val_data.n());
    for (int i = 0; i < val_data.n(); ++i) diag_pool[i] = i;
    std::vector<int> diag_rows;

    Eigen::MatrixXd xb, tb, h, xv, tv, hv;
    Eigen::VectorXd yb;
    InfoNceGrads grads;

    RunResult result;
    result.seed = config.seed;
    result.trace_lower.resize(config.epochs);
    result.trace_upper.resize(config.epochs);

    Eigen::MatrixXd b_mat(1, 1), gb_mat(1, 1);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const double lambda = grl_schedule(epoch, config);

        // One full shuffled pass over the training set; the final batch
        // may be short but never smaller than 2.
        batch_rng.shuffle(pool);
        for (int start = 0; start < n; start += batch) {
            const int b = std::min(batch, n - start);
            if (b < 2) break;
            rows.assign(pool.begin() + start, pool.begin() + start + b);
            gather(train_data.x, rows, xb);
            gather(train_data.t, rows, tb);
            yb.resize(b);
            for (int i = 0; i < b; ++i) yb(i) = train_data.y(rows[i]);

            // MSE half.
            Eigen::VectorXd resid = model.predict(xb, tb) - yb;
            const double scale = 2.0 / static_cast<double>(b);
            Eigen::VectorXd g_wx = scale * (xb.transpose() * resid);
            Eigen::VectorXd g_wt = scale * (tb.transpose() * resid);
            const double g_b = scale * resid.sum();

            // Penalty half: InfoNCE between h_t = t * w_t and x. The
            // critic descends this loss in its own parameters; the encoder
            // receives the reversed gradient through h_t.
            h = tb.array().rowwise() * model.w_t.transpose().array();
            const InfoNceResult nce = infonce_loss_grads(critic, h, xb, grads);
            if (!std::isfinite(nce.loss))
                throw std::runtime_error("train: non-finite critic loss at epoch " +
                                         std::to_string(epoch));
            Eigen::VectorXd g_pen =
                (grads.d_reps.array() * tb.array()).colwise().sum().transpose();
            g_wt += grad_reverse(g_pen, lambda);

            adam_wx.update(model.w_x, g_wx, config.learning_rate);
            adam_wt.update(model.w_t, g_wt, config.learning_rate);
            b_mat(0, 0) = model.b;
            gb_mat(0, 0) = g_b;
            adam_b.update(b_mat, gb_mat, config.learning_rate);
            model.b = b_mat(0, 0);

            adam_cg.update(critic.w_g, grads.d_w_g, config.critic_learning_rate);
            adam_cx.update(critic.w_x, grads.d_w_x, config.critic_learning_rate);
        }

        if (!model.w_x.allFinite() || !model.w_t.allFinite() || !std::isfinite(model.b) ||
            !critic.w_g.allFinite() || !critic.w_x.allFinite())
            throw std::runtime_error("train: non-finite weights at epoch " +
                                     std::to_string(epoch));

        // Diagnostic trace on a validation batch.
        sample_rows(diag_rng, diag_pool, diag_batch, diag_rows);
        gather(val_data.x, diag_rows, xv);
        gather(val_data.t, diag_rows, tv);
        hv = tv.array().rowwise() * model.w_t.transpose().array();
        const MiEstimate diag = estimate_mi(critic, hv, xv, diag_rng);
        result.trace_lower[epoch] = diag.lower_bound_nats;
        result.trace_upper[epoch] = diag.upper_bound_nats;
    }

    result.predictor = model;
    result.mae = evaluate_mae(model, val_data);
    result.sensitivity =
        intervention_sensitivity(model, val_data, derive_stream(config.seed, "trainer/intervention"));
    return result;
}

double evaluate_mae(const LinearPredictor& model, const Dataset& data) {
    if (model.w_x.size() != data.confounder_dim() || model.w_t.size() != data.treatment_dim())
        throw std::invalid_argument("evaluate_mae: dimension mismatch");
    return (model.predict(data.x, data.t) - data.y).array().abs().mean();
}

double intervention_sensitivity(const LinearPredictor& model, const Dataset& data,
                                std::uint64_t seed) {
    if (model.w_x.size() != data.confounder_dim() || model.w_t.size() != data.treatment_dim())
        throw std::invalid_argument("intervention_sensitivity: dimension mismatch");
    const Dataset intervened = intervene_noncausal(data, seed);
    const Eigen::VectorXd delta = (intervened.t - data.t) * model.w_t;
    return delta.array().abs().mean();
}

}  // namespace crlab
