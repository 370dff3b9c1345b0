#include "crlab/critic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace crlab {

void AdamState::update(Eigen::Ref<Eigen::MatrixXd> w,
                       const Eigen::Ref<const Eigen::MatrixXd>& g, double lr) {
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    ++step;
    m = beta1 * m + (1.0 - beta1) * g;
    v.array() = beta2 * v.array() + (1.0 - beta2) * g.array().square();
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    w.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
}

BilinearCritic::BilinearCritic(Eigen::MatrixXd w_g_, Eigen::MatrixXd w_x_, double tau_)
    : w_g(std::move(w_g_)), w_x(std::move(w_x_)), tau(tau_) {
    if (w_g.rows() != w_x.rows())
        throw std::invalid_argument("BilinearCritic: projections must share the embed dim");
    if (!(tau > 0.0)) throw std::invalid_argument("BilinearCritic: tau must be > 0");
}

BilinearCritic BilinearCritic::random(int k, int p, int q, std::uint64_t seed, double tau) {
    if (k < 1 || p < 1 || q < 1)
        throw std::invalid_argument("BilinearCritic::random: dims must be >= 1");
    RngStream rng(derive_stream(seed, "critic-init"));
    Eigen::MatrixXd w_g(k, p), w_x(k, q);
    rng.fill_normal(w_g);
    rng.fill_normal(w_x);
    w_g /= std::sqrt(static_cast<double>(p));
    w_x /= std::sqrt(static_cast<double>(q));
    return BilinearCritic(std::move(w_g), std::move(w_x), tau);
}

namespace {

// Per-thread scratch so the training loops do not allocate every step.
struct ScoreContext {
    Eigen::MatrixXd a;       // reps  * w_g^T, B x k
    Eigen::MatrixXd c;       // conds * w_x^T, B x k
    Eigen::MatrixXd s;       // score matrix a c^T / tau; softmax in place
    Eigen::VectorXd rowmax;
    Eigen::VectorXd sums;
    Eigen::VectorXd diag;
    Eigen::MatrixXd d_a;
    Eigen::MatrixXd d_c;
};

ScoreContext& scratch() {
    thread_local ScoreContext ctx;
    return ctx;
}

// Fills ctx.s with exp(S - rowmax) and returns the loss; ctx keeps the
// pieces needed to finish the softmax gradient.
InfoNceResult compute_scores(const BilinearCritic& critic,
                             const Eigen::Ref<const Eigen::MatrixXd>& reps,
                             const Eigen::Ref<const Eigen::MatrixXd>& conds,
                             ScoreContext& ctx) {
    const auto b = reps.rows();
    if (b < 2) throw std::invalid_argument("infonce: batch must contain >= 2 pairs");
    if (conds.rows() != b) throw std::invalid_argument("infonce: row count mismatch");
    if (reps.cols() != critic.w_g.cols() || conds.cols() != critic.w_x.cols())
        throw std::invalid_argument("infonce: input dims do not match critic projections");

    ctx.a.noalias() = reps * critic.w_g.transpose();
    ctx.c.noalias() = conds * critic.w_x.transpose();
    ctx.s.noalias() = ctx.a * ctx.c.transpose();
    ctx.s /= critic.tau;
    ctx.rowmax = ctx.s.rowwise().maxCoeff();
    ctx.diag = ctx.s.diagonal();
    ctx.s.colwise() -= ctx.rowmax;
    ctx.s = ctx.s.array().exp().matrix();
    ctx.sums = ctx.s.rowwise().sum();
    const double loss = (ctx.rowmax.array() + ctx.sums.array().log() - ctx.diag.array()).mean();
    return {loss, std::log(static_cast<double>(b)) - loss};
}

}  // namespace

InfoNceResult infonce_loss(const BilinearCritic& critic,
                           const Eigen::Ref<const Eigen::MatrixXd>& reps,
                           const Eigen::Ref<const Eigen::MatrixXd>& conds) {
    return compute_scores(critic, reps, conds, scratch());
}

InfoNceResult infonce_loss_grads(const BilinearCritic& critic,
                                 const Eigen::Ref<const Eigen::MatrixXd>& reps,
                                 const Eigen::Ref<const Eigen::MatrixXd>& conds,
                                 InfoNceGrads& grads) {
    ScoreContext& ctx = scratch();
    const InfoNceResult res = compute_scores(critic, reps, conds, ctx);
    const auto b = ctx.s.rows();

    // dloss/dS = (softmax(S) - I) / B; ctx.s holds exp(S - rowmax)
    ctx.s.array().colwise() /= (static_cast<double>(b) * ctx.sums).array();
    ctx.s.diagonal().array() -= 1.0 / static_cast<double>(b);

    const double inv_tau = 1.0 / critic.tau;
    ctx.d_a.noalias() = ctx.s * ctx.c;
    ctx.d_a *= inv_tau;
    ctx.d_c.noalias() = ctx.s.transpose() * ctx.a;
    ctx.d_c *= inv_tau;
    grads.d_w_g.noalias() = ctx.d_a.transpose() * reps;
    grads.d_w_x.noalias() = ctx.d_c.transpose() * conds;
    grads.d_reps.noalias() = ctx.d_a * critic.w_g;
    return res;
}

double nce_club_estimate(const BilinearCritic& critic,
                         const Eigen::Ref<const Eigen::MatrixXd>& joint_reps,
                         const Eigen::Ref<const Eigen::MatrixXd>& joint_conds,
                         const Eigen::Ref<const Eigen::MatrixXd>& marginal_reps,
                         const Eigen::Ref<const Eigen::MatrixXd>& marginal_conds) {
    if (joint_reps.rows() != joint_conds.rows() ||
        marginal_reps.rows() != marginal_conds.rows())
        throw std::invalid_argument("nce_club_estimate: row count mismatch");
    if (joint_reps.cols() != critic.w_g.cols() || joint_conds.cols() != critic.w_x.cols() ||
        marginal_reps.cols() != critic.w_g.cols() || marginal_conds.cols() != critic.w_x.cols())
        throw std::invalid_argument("nce_club_estimate: input dims do not match critic");
    const double pos = ((joint_reps * critic.w_g.transpose()).array() *
                        (joint_conds * critic.w_x.transpose()).array())
                           .rowwise()
                           .sum()
                           .mean();
    const double neg = ((marginal_reps * critic.w_g.transpose()).array() *
                        (marginal_conds * critic.w_x.transpose()).array())
                           .rowwise()
                           .sum()
                           .mean();
    return pos - neg;
}

double nce_club_estimate(const BilinearCritic& critic,
                         const Eigen::Ref<const Eigen::MatrixXd>& reps,
                         const Eigen::Ref<const Eigen::MatrixXd>& conds, RngStream& rng) {
    const auto perm = rng.permutation(static_cast<int>(conds.rows()));
    Eigen::MatrixXd shuffled(conds.rows(), conds.cols());
    for (Eigen::Index i = 0; i < conds.rows(); ++i) shuffled.row(i) = conds.row(perm[i]);
    return nce_club_estimate(critic, reps, conds, reps, shuffled);
}

MiEstimate estimate_mi(const BilinearCritic& critic,
                       const Eigen::Ref<const Eigen::MatrixXd>& reps,
                       const Eigen::Ref<const Eigen::MatrixXd>& conds, RngStream& rng) {
    MiEstimate est;
    est.batch_size = static_cast<int>(reps.rows());
    est.lower_bound_nats = infonce_loss(critic, reps, conds).lower_bound;
    est.upper_bound_nats = nce_club_estimate(critic, reps, conds, rng);
    return est;
}

BilinearCritic train_critic(BilinearCritic critic, const BatchSource& source, int steps,
                            double learning_rate, std::uint64_t seed) {
    if (steps < 1) throw std::invalid_argument("train_critic: steps must be >= 1");
    RngStream rng(derive_stream(seed, "critic-train"));
    AdamState adam_g(critic.w_g.rows(), critic.w_g.cols());
    AdamState adam_x(critic.w_x.rows(), critic.w_x.cols());
    Eigen::MatrixXd reps, conds;
    InfoNceGrads grads;
    for (int step = 0; step < steps; ++step) {
        source(rng, reps, conds);
        const InfoNceResult res = infonce_loss_grads(critic, reps, conds, grads);
        if (!std::isfinite(res.loss))
            throw std::runtime_error("train_critic: non-finite loss at step " +
                                     std::to_string(step));
        adam_g.update(critic.w_g, grads.d_w_g, learning_rate);
        adam_x.update(critic.w_x, grads.d_w_x, learning_rate);
    }
    return critic;
}

Eigen::VectorXd grad_reverse(const Eigen::VectorXd& gradient, double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("grad_reverse: lambda must be >= 0");
    return (-lambda) * gradient;
}

Eigen::MatrixXd grad_reverse(const Eigen::MatrixXd& gradient, double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("grad_reverse: lambda must be >= 0");
    return (-lambda) * gradient;
}

}  // namespace crlab
