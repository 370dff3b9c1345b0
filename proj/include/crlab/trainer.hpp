#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "crlab/critic.hpp"
#include "crlab/scm.hpp"

namespace crlab {

// Linear outcome predictor yhat = w_x . x + w_t . t + b. The treatment
// representation fed to the MI critic is the per-coordinate contribution
// h_t = t (elementwise*) w_t.
struct LinearPredictor {
    Eigen::VectorXd w_x;
    Eigen::VectorXd w_t;
    double b = 0.0;

    LinearPredictor() = default;
    LinearPredictor(int d_x, int d_t)
        : w_x(Eigen::VectorXd::Zero(d_x)), w_t(Eigen::VectorXd::Zero(d_t)) {}

    Eigen::VectorXd predict(const Eigen::Ref<const Eigen::MatrixXd>& x,
                            const Eigen::Ref<const Eigen::MatrixXd>& t) const {
        return (x * w_x + t * w_t).array() + b;
    }
};

enum class RampShape { Cubic };

// One epoch = one optimizer step on one sampled minibatch; ramp indices
// count epochs. Defaults follow the synthetic-SCM recipe (lr 3e-4, batch
// 64, 4000 epochs, cubic ramp 0 -> 0.5 over epochs 200-1000).
struct TrainConfig {
    double learning_rate = 3e-4;
    int batch_size = 64;
    int epochs = 4000;
    double lambda_max = 0.5;
    int ramp_start = 200;
    int ramp_end = 1000;
    RampShape ramp_shape = RampShape::Cubic;
    std::uint64_t seed = 0;
    int critic_dim = 10;
    double critic_learning_rate = 1e-3;
    int diagnostic_batch = 128;

    void validate() const;
};

struct RunResult {
    double mae = 0.0;
    double sensitivity = 0.0;
    std::vector<double> trace_lower;  // per-epoch InfoNCE lower bound on I(h_t; X)
    std::vector<double> trace_upper;  // per-epoch NCE-CLUB upper bound
    LinearPredictor predictor;
    std::uint64_t seed = 0;
};

// 0 before ramp_start, lambda_max * ((e - s)/(t - s))^3 inside the ramp,
// lambda_max from ramp_end on; continuous and nondecreasing.
double grl_schedule(int epoch, const TrainConfig& config);

// Minimises MSE(yhat, y) plus, through gradient reversal at
// lambda = grl_schedule(epoch), the InfoNCE loss between h_t and X. The
// critic takes one simultaneous step per epoch on the same batch,
// minimising the same InfoNCE loss in its own parameters. Diagnostics and
// final metrics (MAE, intervention sensitivity) are computed on
// validation data. Deterministic per (config, data). Throws
// std::runtime_error naming the epoch on non-finite loss or weights.
RunResult train(const TrainConfig& config, const Dataset& train_data,
                const Dataset& val_data);

double evaluate_mae(const LinearPredictor& model, const Dataset& data);

// Mean |yhat(T) - yhat(T')| with T' = intervene_noncausal(data, seed).
double intervention_sensitivity(const LinearPredictor& model, const Dataset& data,
                                std::uint64_t seed);

}  // namespace crlab
