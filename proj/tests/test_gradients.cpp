#include <doctest.h>

#include "roam/predictor.hpp"

using namespace roam;

namespace {

struct GradCheckSetup {
    ModelParams<double> params;
    std::vector<Tensor<double>> context;
    std::vector<Twist> actions;
    std::vector<Tensor<double>> targets;
    TrainConfig cfg;
    int horizon;
};

GradCheckSetup make_setup(std::uint64_t seed, int side, int horizon) {
    GradCheckSetup s;
    s.params = make_model<double>(seed);
    s.horizon = horizon;
    s.cfg.train_horizon = horizon;
    SplitMix64 rng(seed * 31 + 7);
    auto frame = [&] {
        Tensor<double> t(side, side, 3);
        for (auto& v : t.v) v = rng.uniform();
        return t;
    };
    for (int i = 0; i < 5; ++i) s.context.push_back(frame());
    for (int i = 0; i < 5 + horizon; ++i) {
        s.actions.push_back(Twist{rng.uniform(0.0, 0.1), rng.uniform(-1.8, 1.8)});
    }
    for (int i = 0; i < horizon; ++i) s.targets.push_back(frame());
    return s;
}

double eval_loss(const GradCheckSetup& s, const ModelParams<double>& params) {
    Workspace<double> ws;
    Rollout<double> ro;
    const auto& preds = rollout_forward(params, s.context, s.actions, s.horizon, ro, ws);
    return loss_eval(preds, s.targets, s.cfg).loss;
}

ModelParams<double> analytic_grads(const GradCheckSetup& s) {
    Workspace<double> ws;
    Rollout<double> ro;
    const auto& preds = rollout_forward(s.params, s.context, s.actions, s.horizon, ro, ws);
    std::vector<Tensor<double>> dpreds;
    loss_backward(preds, s.targets, s.cfg, dpreds);
    ModelParams<double> grads = zero_like(s.params);
    rollout_backward(s.params, ro, std::move(dpreds), grads, ws);
    return grads;
}

// Central finite difference on one parameter entry.
double numeric_grad(const GradCheckSetup& s, int block, bool bias, size_t index, double step) {
    ModelParams<double> p = s.params;
    auto& vec = bias ? p.blocks()[size_t(block)]->b : p.blocks()[size_t(block)]->w;
    const double saved = vec[index];
    vec[index] = saved + step;
    const double hi = eval_loss(s, p);
    vec[index] = saved - step;
    const double lo = eval_loss(s, p);
    return (hi - lo) / (2.0 * step);
}

}  // namespace

TEST_SUITE("gradients") {

// Finite-difference agreement across every parameter block (64-bit mode).
TEST_CASE("analytic gradients match central finite differences") {
    const GradCheckSetup s = make_setup(101, 16, 3);
    const ModelParams<double> grads = analytic_grads(s);
    auto grad_blocks = grads.blocks();
    auto param_blocks = s.params.blocks();

    SplitMix64 rng(555);
    const double step = 1e-5;
    int checked = 0;
    double worst = 0.0;
    for (int b = 0; b < ModelParams<double>::kNumBlocks; ++b) {
        const size_t n_w = param_blocks[size_t(b)]->w.size();
        const size_t n_b = param_blocks[size_t(b)]->b.size();
        for (int pick = 0; pick < 7; ++pick) {
            const bool bias = n_b > 0 && pick >= 5;
            const size_t index = bias ? rng.uniform_int(n_b) : rng.uniform_int(n_w);
            const double analytic = bias ? grad_blocks[size_t(b)]->b[index]
                                         : grad_blocks[size_t(b)]->w[index];
            const double numeric = numeric_grad(s, b, bias, index, step);
            const double rel = std::abs(analytic - numeric) / std::max(1e-8, std::abs(numeric));
            worst = std::max(worst, rel);
            CHECK(rel <= 1e-3);
            ++checked;
        }
    }
    CHECK(checked >= 100);
    MESSAGE("checked ", checked, " parameters, worst relative error ", worst);
}

TEST_CASE("descent reduces the gradient norm on a near-identity task") {
    // Duplicate-frame clip: the optimum is close to an identity mapping, so a
    // few optimizer steps must shrink both loss and gradient norm.
    SplitMix64 rng(77);
    Tensor<float> still(16, 16, 3);
    for (auto& v : still.v) v = float(rng.uniform());
    std::vector<Tensor<float>> context(5, still);
    std::vector<Twist> actions(5 + 3, Twist{0.0, 0.0});
    std::vector<Tensor<float>> targets(3, still);

    TrainConfig cfg;
    cfg.train_horizon = 3;
    cfg.weight_decay = 0.0;
    cfg.lr = 2e-3;
    auto params = make_model<float>(303);
    auto state = AdamState<float>::init(params);
    Workspace<float> ws;

    auto grad_norm = [&](const ModelParams<float>& g) {
        double sum = 0.0;
        for (const auto* blk : g.blocks()) {
            for (float w : blk->w) sum += double(w) * double(w);
            for (float b : blk->b) sum += double(b) * double(b);
        }
        return std::sqrt(sum);
    };

    double first_loss = 0.0, first_norm = 0.0, last_loss = 0.0, last_norm = 0.0;
    for (int it = 0; it < 250; ++it) {
        Rollout<float> ro;
        const auto& preds = rollout_forward(params, context, actions, 3, ro, ws);
        std::vector<Tensor<float>> dpreds;
        const LossTerms terms = loss_backward(preds, targets, cfg, dpreds);
        ModelParams<float> grads = zero_like(params);
        rollout_backward(params, ro, std::move(dpreds), grads, ws);
        if (it == 0) {
            first_loss = terms.loss;
            first_norm = grad_norm(grads);
        }
        last_loss = terms.loss;
        last_norm = grad_norm(grads);
        adam_step(params, grads, state, cfg);
    }
    CHECK(last_loss < 0.5 * first_loss);
    CHECK(last_norm < first_norm);
}

TEST_CASE("decoder bias gradient is nonzero for random inputs") {
    const GradCheckSetup s = make_setup(909, 16, 2);
    const ModelParams<double> grads = analytic_grads(s);
    double sum = 0.0;
    for (double b : grads.d3.b) sum += std::abs(b);
    CHECK(sum > 0.0);
    // Every block receives some gradient through the unroll.
    for (const auto* blk : grads.blocks()) {
        double block_sum = 0.0;
        for (double w : blk->w) block_sum += std::abs(w);
        CHECK(block_sum > 0.0);
    }
}

}  // TEST_SUITE
