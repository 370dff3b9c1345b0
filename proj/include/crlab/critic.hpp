#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Core>

#include "crlab/rng.hpp"

namespace crlab {

// First/second-moment adaptive stochastic gradient state for one tensor.
// beta = (0.9, 0.999), eps = 1e-8.
struct AdamState {
    Eigen::MatrixXd m;
    Eigen::MatrixXd v;
    long step = 0;

    AdamState(Eigen::Index rows, Eigen::Index cols)
        : m(Eigen::MatrixXd::Zero(rows, cols)), v(Eigen::MatrixXd::Zero(rows, cols)) {}

    void update(Eigen::Ref<Eigen::MatrixXd> w, const Eigen::Ref<const Eigen::MatrixXd>& g,
                double lr);
};

// Bilinear critic: two bias-free projections to a shared k-dimensional
// space. score(g, x) = (w_g g) . (w_x x) / tau.
//
// tau default: the raw-score scale of the trained critic is proportional
// to tau (InfoNCE fixes the scaled score), and the NCE-CLUB plug-in reads
// raw scores, so tau controls how conservatively the upper bound sits.
// 1.5 keeps it above the true MI across the calibration range.
struct BilinearCritic {
    static constexpr double kDefaultTau = 1.5;

    Eigen::MatrixXd w_g;  // k x p
    Eigen::MatrixXd w_x;  // k x q
    double tau = kDefaultTau;

    BilinearCritic(Eigen::MatrixXd w_g_, Eigen::MatrixXd w_x_, double tau_ = kDefaultTau);

    // Entries ~ N(0, 1/p) resp. N(0, 1/q); deterministic per seed.
    static BilinearCritic random(int k, int p, int q, std::uint64_t seed,
                                 double tau = kDefaultTau);

    int embed_dim() const { return static_cast<int>(w_g.rows()); }
    int rep_dim() const { return static_cast<int>(w_g.cols()); }
    int cond_dim() const { return static_cast<int>(w_x.cols()); }

    double score(const Eigen::VectorXd& g, const Eigen::VectorXd& x) const {
        return (w_g * g).dot(w_x * x) / tau;
    }
};

struct InfoNceResult {
    double loss = 0.0;         // mean in-batch cross-entropy against the diagonal
    double lower_bound = 0.0;  // ln(B) - loss, never above ln(B)
};

struct InfoNceGrads {
    Eigen::MatrixXd d_w_g;   // dloss/dW_g
    Eigen::MatrixXd d_w_x;   // dloss/dW_x
    Eigen::MatrixXd d_reps;  // dloss/dreps, for the encoder path
};

// Row i of reps pairs with row i of conds; all other rows in the batch act
// as negatives (full B x B score matrix, row-wise softmax). B >= 2.
InfoNceResult infonce_loss(const BilinearCritic& critic,
                           const Eigen::Ref<const Eigen::MatrixXd>& reps,
                           const Eigen::Ref<const Eigen::MatrixXd>& conds);

InfoNceResult infonce_loss_grads(const BilinearCritic& critic,
                                 const Eigen::Ref<const Eigen::MatrixXd>& reps,
                                 const Eigen::Ref<const Eigen::MatrixXd>& conds,
                                 InfoNceGrads& grads);

// Plug-in upper-bound estimate: mean raw bilinear score of joint pairs
// minus mean raw score of product pairs. Raw means the score at tau = 1
// regardless of the critic's tau. Marginal rows must be drawn
// independently; callers typically pass shuffled conditioner rows.
double nce_club_estimate(const BilinearCritic& critic,
                         const Eigen::Ref<const Eigen::MatrixXd>& joint_reps,
                         const Eigen::Ref<const Eigen::MatrixXd>& joint_conds,
                         const Eigen::Ref<const Eigen::MatrixXd>& marginal_reps,
                         const Eigen::Ref<const Eigen::MatrixXd>& marginal_conds);

// Convenience: product pairs formed by permuting the conditioner rows.
double nce_club_estimate(const BilinearCritic& critic,
                         const Eigen::Ref<const Eigen::MatrixXd>& reps,
                         const Eigen::Ref<const Eigen::MatrixXd>& conds, RngStream& rng);

struct MiEstimate {
    double lower_bound_nats = 0.0;  // capped at ln(batch_size)
    double upper_bound_nats = 0.0;
    int batch_size = 0;
};

// Both bounds on one aligned batch; product pairs for the upper bound come
// from shuffling the conditioner rows with `rng`.
MiEstimate estimate_mi(const BilinearCritic& critic,
                       const Eigen::Ref<const Eigen::MatrixXd>& reps,
                       const Eigen::Ref<const Eigen::MatrixXd>& conds, RngStream& rng);

// Emits aligned (representation, conditioner) batches into the given
// matrices; the stream owns all randomness so runs are seed-deterministic.
using BatchSource =
    std::function<void(RngStream&, Eigen::MatrixXd& reps, Eigen::MatrixXd& conds)>;

// Runs `steps` adaptive-gradient updates minimising the InfoNCE loss
// (maximising the lower bound, i.e. discriminating joint from product
// pairs). Throws std::runtime_error with the failing step on non-finite
// loss. lr = 0 leaves the critic bitwise unchanged.
BilinearCritic train_critic(BilinearCritic critic, const BatchSource& source, int steps,
                            double learning_rate, std::uint64_t seed);

// Gradient-reversal backward pass: identity forward, -lambda * g backward.
Eigen::VectorXd grad_reverse(const Eigen::VectorXd& gradient, double lambda);
Eigen::MatrixXd grad_reverse(const Eigen::MatrixXd& gradient, double lambda);

}  // namespace crlab
