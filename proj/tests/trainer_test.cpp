#include <doctest.h>

#include <cmath>

#include "crlab/rng.hpp"
#include "crlab/scm.hpp"
#include "crlab/trainer.hpp"

using namespace crlab;

TEST_CASE("grl_schedule endpoints and shape") {
    TrainConfig cfg;
    CHECK(grl_schedule(0, cfg) == 0.0);
    CHECK(grl_schedule(199, cfg) == 0.0);
    CHECK(grl_schedule(1000, cfg) == 0.5);
    CHECK(grl_schedule(3999, cfg) == 0.5);
    CHECK(grl_schedule(600, cfg) == doctest::Approx(0.0625).epsilon(1e-15));

    double prev = -1.0;
    for (int e = 0; e < cfg.epochs; ++e) {
        const double v = grl_schedule(e, cfg);
        CHECK(v >= prev);
        prev = v;
    }
    // continuity across the ramp boundaries
    CHECK(grl_schedule(cfg.ramp_start, cfg) == doctest::Approx(0.0).scale(1).epsilon(1e-12));
    CHECK(grl_schedule(cfg.ramp_end - 1, cfg) ==
          doctest::Approx(cfg.lambda_max).epsilon(5e-3));
    CHECK_THROWS_AS(grl_schedule(-1, cfg), std::invalid_argument);
    CHECK_THROWS_AS(grl_schedule(cfg.epochs, cfg), std::invalid_argument);
}

TEST_CASE("config validation") {
    TrainConfig cfg;
    cfg.ramp_end = cfg.epochs + 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = TrainConfig{};
    cfg.ramp_start = 300;
    cfg.ramp_end = 200;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = TrainConfig{};
    cfg.batch_size = 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("evaluate_mae") {
    const Dataset ds = sample_linear_scm({10, 5, 0.0}, 2000, 70);
    LinearPredictor exact(10, 10);
    exact.w_x.setOnes();
    exact.w_t.head(5).setOnes();
    CHECK(evaluate_mae(exact, ds) == 0.0);

    LinearPredictor zero(10, 10);
    CHECK(evaluate_mae(zero, ds) == doctest::Approx(ds.y.array().abs().mean()).epsilon(1e-12));

    const Dataset noisy = sample_linear_scm({10, 5, 1.0}, 100000, 71);
    CHECK(std::abs(evaluate_mae(exact, noisy) - std::sqrt(2.0 / M_PI)) < 0.02);
}

TEST_CASE("intervention_sensitivity") {
    const Dataset ds = sample_linear_scm({10, 5, 0.5}, 100000, 72);

    LinearPredictor causal_only(10, 10);
    causal_only.w_x.setOnes();
    causal_only.w_t.head(5).setOnes();
    CHECK(intervention_sensitivity(causal_only, ds, 1) == 0.0);

    LinearPredictor leaky(10, 10);
    leaky.w_t.tail(5).setOnes();
    const double sens = intervention_sensitivity(leaky, ds, 1);
    CHECK(std::abs(sens - std::sqrt(20.0 / M_PI)) < 0.05);

    LinearPredictor doubled = leaky;
    doubled.w_t *= 2.0;
    CHECK(intervention_sensitivity(doubled, ds, 1) ==
          doctest::Approx(2.0 * sens).epsilon(1e-12));
}

TEST_CASE("baseline training solves the noiseless system") {
    const LinearScmConfig scm{10, 5, 0.0};
    const Dataset train_data = sample_linear_scm(scm, 1000, 73);
    const Dataset val_data = sample_linear_scm(scm, 1000, 74);
    TrainConfig cfg;
    cfg.lambda_max = 0.0;
    cfg.seed = 75;
    const RunResult run = train(cfg, train_data, val_data);
    CHECK(evaluate_mae(run.predictor, train_data) < 0.05);
    CHECK(run.mae < 0.05);
    CHECK(static_cast<int>(run.trace_lower.size()) == cfg.epochs);
    for (double v : run.trace_lower) CHECK(std::isfinite(v));
    for (double v : run.trace_upper) CHECK(std::isfinite(v));
}

TEST_CASE("baseline absorbs non-causal signal at moderate noise") {
    const LinearScmConfig scm{10, 5, 0.5};
    const Dataset train_data = sample_linear_scm(scm, 1000, 76);
    const Dataset val_data = sample_linear_scm(scm, 1000, 77);
    TrainConfig cfg;
    cfg.lambda_max = 0.0;
    cfg.seed = 78;
    const RunResult run = train(cfg, train_data, val_data);
    CHECK(run.predictor.w_t.tail(5).cwiseAbs().mean() > 0.01);
}

TEST_CASE("adversarial run zeroes the non-causal weights") {
    const LinearScmConfig scm{10, 5, 0.5};
    const Dataset train_data = sample_linear_scm(scm, 1000, 90);
    const Dataset val_data = sample_linear_scm(scm, 1000, 91);
    TrainConfig cfg;
    cfg.seed = 92;
    const RunResult run = train(cfg, train_data, val_data);
    for (int j = 5; j < 10; ++j) CHECK(std::abs(run.predictor.w_t(j)) < 0.02);
    // causal weights stay pinned by the outcome loss
    for (int j = 0; j < 5; ++j) CHECK(run.predictor.w_t(j) > 0.8);
}

TEST_CASE("training is deterministic per (config, data)") {
    const LinearScmConfig scm{6, 3, 0.5};
    const Dataset train_data = sample_linear_scm(scm, 300, 79);
    const Dataset val_data = sample_linear_scm(scm, 300, 80);
    TrainConfig cfg;
    cfg.epochs = 120;
    cfg.ramp_start = 20;
    cfg.ramp_end = 60;
    cfg.seed = 81;
    const RunResult a = train(cfg, train_data, val_data);
    const RunResult b = train(cfg, train_data, val_data);
    CHECK(a.mae == b.mae);
    CHECK(a.sensitivity == b.sensitivity);
    CHECK(a.predictor.w_t == b.predictor.w_t);
    CHECK(a.predictor.w_x == b.predictor.w_x);
    CHECK(a.trace_lower == b.trace_lower);
    CHECK(a.trace_upper == b.trace_upper);
}

TEST_CASE("divergent settings abort with the failing epoch") {
    const LinearScmConfig scm{6, 3, 0.5};
    const Dataset train_data = sample_linear_scm(scm, 300, 82);
    const Dataset val_data = sample_linear_scm(scm, 300, 83);
    TrainConfig cfg;
    cfg.epochs = 50;
    cfg.ramp_start = 0;
    cfg.ramp_end = 0;
    cfg.learning_rate = 1e308;
    cfg.critic_learning_rate = 1e308;
    cfg.seed = 84;
    try {
        train(cfg, train_data, val_data);
        FAIL("expected divergence");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("epoch") != std::string::npos);
    }
}

TEST_CASE("dimension mismatch is rejected") {
    const Dataset a = sample_linear_scm({6, 3, 0.5}, 100, 85);
    const Dataset b = sample_linear_scm({8, 3, 0.5}, 100, 86);
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.ramp_start = 0;
    cfg.ramp_end = 5;
    CHECK_THROWS_AS(train(cfg, a, b), std::invalid_argument);

    LinearPredictor model(6, 6);
    CHECK_THROWS_AS(evaluate_mae(model, b), std::invalid_argument);
    CHECK_THROWS_AS(intervention_sensitivity(model, b, 1), std::invalid_argument);
}
