// Action-conditioned future-frame predictor: a recurrent motion encoder over
// augmented flow maps plus a feed-forward content/decoder path, with
// hand-written reverse-mode gradients through the full multi-step rollout
// (predicted frames feed back into the flow computation).
//
// Frames cross this module's boundary in [0, 1]; internally the content path
// maps frame channels to [-1, 1] and the decoder emits tanh outputs that are
// rescaled back at the boundary. The loss operates in the [-1, 1] convention.
#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "roam/core.hpp"
#include "roam/tensor.hpp"

namespace roam {

inline constexpr int kFrameCh = 3;
inline constexpr int kActionCh = 2;   // (v, omega)
inline constexpr int kAugCh = kFrameCh + kActionCh;
inline constexpr int kHiddenCh = 32;  // recurrent state channels at 1/4 resolution

struct TrainConfig {
    double lr = 1e-4;
    int batch = 8;
    double beta1 = 0.5;
    double beta2 = 0.999;
    double eps = 1e-8;
    double alpha_rec = 1.0;      // reconstruction weight
    double lambda_gdl = 1.0;     // gradient difference weight
    double weight_decay = 1e-4;  // decoupled, times lr
    double p_norm = 2.0;         // reconstruction exponent
    int context = 5;
    int train_horizon = 10;
    int infer_horizon = 20;
    int iterations = 2000;
};

// Learnable parameters. Theta_R = motion downsampling convs + recurrent gate
// kernels; Theta_F = content encoder, fusion ("residue") conv, decoder.
template <class T>
struct ModelParams {
    // content encoder: 5 -> 8 (s1) -> 16 (s2) -> 32 (s2), leaky relu, skips at 8/16
    ConvParam<T> c1, c2, c3;
    // motion encoder downsampling: 5 -> 16 (s2) -> 32 (s2)
    ConvParam<T> m1, m2;
    // convolutional gated recurrent cell at 1/4 resolution, 32 channels
    ConvParam<T> gz_x, gz_h, gr_x, gr_h, gh_x, gh_h;  // *_h blocks carry no bias
    // fusion conv on the 64-channel concat, then decoder back to 3 channels
    ConvParam<T> fuse, d1, d2, d3;

    std::uint64_t init_seed = 0;
    bool action_blind = false;  // ablation: action maps pinned to 0.5

    static constexpr int kNumBlocks = 15;
    static constexpr std::array<const char*, kNumBlocks> kBlockNames = {
        "c1", "c2", "c3", "m1", "m2", "gz_x", "gz_h", "gr_x", "gr_h",
        "gh_x", "gh_h", "fuse", "d1", "d2", "d3"};

    std::array<ConvParam<T>*, kNumBlocks> blocks() {
        return {&c1, &c2, &c3, &m1, &m2, &gz_x, &gz_h, &gr_x, &gr_h,
                &gh_x, &gh_h, &fuse, &d1, &d2, &d3};
    }
    std::array<const ConvParam<T>*, kNumBlocks> blocks() const {
        return {&c1, &c2, &c3, &m1, &m2, &gz_x, &gz_h, &gr_x, &gr_h,
                &gh_x, &gh_h, &fuse, &d1, &d2, &d3};
    }

    size_t param_count() const {
        size_t n = 0;
        for (const auto* b : blocks()) n += b->weight_count();
        return n;
    }
};

// Builds a model with fan-in-scaled Gaussian weights (std = sqrt(2 / fan_in))
// drawn from the seeded portable RNG in fixed block order; biases start zero
// and the recurrent state starts zero.
template <class T>
ModelParams<T> make_model(std::uint64_t seed, bool action_blind = false) {
    ModelParams<T> p;
    p.init_seed = seed;
    p.action_blind = action_blind;
    auto shape = [](ConvParam<T>& cp, int cin, int cout, int stride, bool bias) {
        cp.cin = cin;
        cp.cout = cout;
        cp.stride = stride;
        cp.w.assign(size_t(9) * cin * cout, T(0));
        cp.b.assign(bias ? size_t(cout) : 0, T(0));
    };
    shape(p.c1, kAugCh, 8, 1, true);
    shape(p.c2, 8, 16, 2, true);
    shape(p.c3, 16, 32, 2, true);
    shape(p.m1, kAugCh, 16, 2, true);
    shape(p.m2, 16, 32, 2, true);
    shape(p.gz_x, kHiddenCh, kHiddenCh, 1, true);
    shape(p.gz_h, kHiddenCh, kHiddenCh, 1, false);
    shape(p.gr_x, kHiddenCh, kHiddenCh, 1, true);
    shape(p.gr_h, kHiddenCh, kHiddenCh, 1, false);
    shape(p.gh_x, kHiddenCh, kHiddenCh, 1, true);
    shape(p.gh_h, kHiddenCh, kHiddenCh, 1, false);
    shape(p.fuse, 2 * kHiddenCh, kHiddenCh, 1, true);
    shape(p.d1, kHiddenCh, 16, 1, true);
    shape(p.d2, 16, 8, 1, true);
    shape(p.d3, 8, kFrameCh, 1, true);

    SplitMix64 rng(seed);
    for (auto* b : p.blocks()) {
        const double std_dev = std::sqrt(2.0 / double(9 * b->cin));
        for (T& w : b->w) {
            w = T(std_dev * rng.gaussian());
        }
    }
    return p;
}

/// Same block shapes as `like`, all values zero (gradient / moment buffers).
template <class T>
ModelParams<T> zero_like(const ModelParams<T>& like) {
    ModelParams<T> z = like;
    for (auto* b : z.blocks()) {
        std::fill(b->w.begin(), b->w.end(), T(0));
        std::fill(b->b.begin(), b->b.end(), T(0));
    }
    return z;
}

// ---------------------------------------------------------------------------
// Elementary ops (Frames and flow maps are Tensors in the [0, 1] convention).

/// Elementwise x_t - x_prev.
template <class T>
Tensor<T> flow_map(const Tensor<T>& x_t, const Tensor<T>& x_prev) {
    return sub(x_t, x_prev);
}

// Normalized per-pixel action map: channel 0 = v / v_max, channel 1 =
// (omega + omega_max) / (2 omega_max). Rejects out-of-envelope actions.
// Action-blind mode pins both channels to 0.5.
template <class T>
Tensor<T> action_map(const Twist& a, int h, int w, bool action_blind = false) {
    constexpr double eps = 1e-9;
    if (a.v < -eps || a.v > kMaxForwardSpeed + eps || a.omega < -kMaxTurnRate - eps ||
        a.omega > kMaxTurnRate + eps) {
        throw std::invalid_argument("action_map: action outside actuation envelope");
    }
    Tensor<T> out(h, w, kActionCh);
    const T n_v = action_blind ? T(0.5) : T(a.v / kMaxForwardSpeed);
    const T n_w = action_blind ? T(0.5) : T((a.omega + kMaxTurnRate) / (2.0 * kMaxTurnRate));
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            out.at(y, x, 0) = n_v;
            out.at(y, x, 1) = n_w;
        }
    }
    return out;
}

/// Channel concatenation [x, alpha]; the first channels equal x exactly.
template <class T>
Tensor<T> augment(const Tensor<T>& x, const Tensor<T>& alpha) {
    return concat_channels(x, alpha);
}

// ---------------------------------------------------------------------------
// Forward tapes (stored activations for the manual backward pass).

template <class T>
struct GruTape {
    Tensor<T> h_prev, z, r, rh, hcand, h_new;
};

template <class T>
struct MotionTape {
    Tensor<T> o_hat;            // augmented flow, H x W x 5
    Tensor<T> m1_out, m2_out;   // downsampled activations
    GruTape<T> gru;
};

template <class T>
struct PredictTape {
    Tensor<T> xin;  // augmented frame with frame channels mapped to [-1, 1]
    Tensor<T> c1_out, c2_out, c3_out;
    Tensor<T> cat, fuse_out, up1, d1_out, up2, d2_out;
    Tensor<T> y;    // tanh output
};

template <class T>
const Tensor<T>& gru_forward(const ModelParams<T>& p, const Tensor<T>& x,
                             const Tensor<T>& h_prev, GruTape<T>& tape, Workspace<T>& ws) {
    tape.h_prev = h_prev;
    conv_forward(x, p.gz_x, tape.z, ws);
    conv_forward(h_prev, p.gz_h, tape.z, ws, true);
    sigmoid_inplace(tape.z);
    conv_forward(x, p.gr_x, tape.r, ws);
    conv_forward(h_prev, p.gr_h, tape.r, ws, true);
    sigmoid_inplace(tape.r);
    tape.rh = tape.r;
    for (size_t i = 0; i < tape.rh.v.size(); ++i) tape.rh.v[i] *= h_prev.v[i];
    conv_forward(x, p.gh_x, tape.hcand, ws);
    conv_forward(tape.rh, p.gh_h, tape.hcand, ws, true);
    tanh_inplace(tape.hcand);
    tape.h_new = Tensor<T>(h_prev.h, h_prev.w, h_prev.c);
    for (size_t i = 0; i < tape.h_new.v.size(); ++i) {
        tape.h_new.v[i] = (T(1) - tape.z.v[i]) * h_prev.v[i] + tape.z.v[i] * tape.hcand.v[i];
    }
    return tape.h_new;
}

template <class T>
void gru_backward(const ModelParams<T>& p, const GruTape<T>& tape, const Tensor<T>& x,
                  const Tensor<T>& dh_new, Tensor<T>& dx, Tensor<T>& dh_prev,
                  ModelParams<T>& g, Workspace<T>& ws) {
    const size_t n = dh_new.v.size();
    Tensor<T> dhpre(tape.h_new.h, tape.h_new.w, tape.h_new.c);
    Tensor<T> dzpre = dhpre, drpre = dhpre, drh = dhpre;
    for (size_t i = 0; i < n; ++i) {
        const T dh = dh_new.v[i];
        const T z = tape.z.v[i];
        const T hc = tape.hcand.v[i];
        dh_prev.v[i] += dh * (T(1) - z);
        dzpre.v[i] = dh * (hc - tape.h_prev.v[i]) * z * (T(1) - z);
        dhpre.v[i] = dh * z * (T(1) - hc * hc);
    }
    conv_backward(x, p.gh_x, dhpre, &dx, g.gh_x, ws);
    conv_backward(tape.rh, p.gh_h, dhpre, &drh, g.gh_h, ws);
    for (size_t i = 0; i < n; ++i) {
        const T r = tape.r.v[i];
        dh_prev.v[i] += drh.v[i] * r;
        drpre.v[i] = drh.v[i] * tape.h_prev.v[i] * r * (T(1) - r);
    }
    conv_backward(x, p.gr_x, drpre, &dx, g.gr_x, ws);
    conv_backward(tape.h_prev, p.gr_h, drpre, &dh_prev, g.gr_h, ws);
    conv_backward(x, p.gz_x, dzpre, &dx, g.gz_x, ws);
    conv_backward(tape.h_prev, p.gz_h, dzpre, &dh_prev, g.gz_h, ws);
}

template <class T>
const Tensor<T>& motion_forward(const ModelParams<T>& p, Tensor<T> o_hat,
                                const Tensor<T>& h_prev, MotionTape<T>& tape,
                                Workspace<T>& ws) {
    tape.o_hat = std::move(o_hat);
    conv_forward(tape.o_hat, p.m1, tape.m1_out, ws);
    lrelu_inplace(tape.m1_out);
    conv_forward(tape.m1_out, p.m2, tape.m2_out, ws);
    lrelu_inplace(tape.m2_out);
    return gru_forward(p, tape.m2_out, h_prev, tape.gru, ws);
}

// Returns the gradient w.r.t. o_hat and writes the gradient w.r.t. the
// incoming hidden state into dh_prev (assigned, not accumulated).
template <class T>
Tensor<T> motion_backward(const ModelParams<T>& p, const MotionTape<T>& tape,
                          const Tensor<T>& dh_new, Tensor<T>& dh_prev, ModelParams<T>& g,
                          Workspace<T>& ws) {
    dh_prev = Tensor<T>(dh_new.h, dh_new.w, dh_new.c);
    Tensor<T> dm2(tape.m2_out.h, tape.m2_out.w, tape.m2_out.c);
    gru_backward(p, tape.gru, tape.m2_out, dh_new, dm2, dh_prev, g, ws);
    lrelu_backward_inplace(dm2, tape.m2_out);
    Tensor<T> dm1(tape.m1_out.h, tape.m1_out.w, tape.m1_out.c);
    conv_backward(tape.m1_out, p.m2, dm2, &dm1, g.m2, ws);
    lrelu_backward_inplace(dm1, tape.m1_out);
    Tensor<T> do_hat(tape.o_hat.h, tape.o_hat.w, tape.o_hat.c);
    conv_backward(tape.o_hat, p.m1, dm1, &do_hat, g.m1, ws);
    return do_hat;
}

template <class T>
Tensor<T> predict_forward(const ModelParams<T>& p, const Tensor<T>& x_hat,
                          const Tensor<T>& f_tilde, PredictTape<T>& tape, Workspace<T>& ws) {
    if (x_hat.c != kAugCh) {
        throw std::invalid_argument("predict_forward: expected a 5-channel augmented frame");
    }
    // Frame channels to [-1, 1]; action channels pass through.
    tape.xin = x_hat;
    for (int y = 0; y < x_hat.h; ++y) {
        for (int x = 0; x < x_hat.w; ++x) {
            for (int ch = 0; ch < kFrameCh; ++ch) {
                tape.xin.at(y, x, ch) = T(2) * x_hat.at(y, x, ch) - T(1);
            }
        }
    }
    conv_forward(tape.xin, p.c1, tape.c1_out, ws);
    lrelu_inplace(tape.c1_out);
    conv_forward(tape.c1_out, p.c2, tape.c2_out, ws);
    lrelu_inplace(tape.c2_out);
    conv_forward(tape.c2_out, p.c3, tape.c3_out, ws);
    lrelu_inplace(tape.c3_out);

    tape.cat = concat_channels(tape.c3_out, f_tilde);
    conv_forward(tape.cat, p.fuse, tape.fuse_out, ws);
    lrelu_inplace(tape.fuse_out);

    tape.up1 = upsample2(tape.fuse_out);
    conv_forward(tape.up1, p.d1, tape.d1_out, ws);
    add_inplace(tape.d1_out, tape.c2_out);
    lrelu_inplace(tape.d1_out);
    tape.up2 = upsample2(tape.d1_out);
    conv_forward(tape.up2, p.d2, tape.d2_out, ws);
    add_inplace(tape.d2_out, tape.c1_out);
    lrelu_inplace(tape.d2_out);
    conv_forward(tape.d2_out, p.d3, tape.y, ws);
    tanh_inplace(tape.y);

    Tensor<T> frame(tape.y.h, tape.y.w, kFrameCh);
    for (size_t i = 0; i < frame.v.size(); ++i) {
        frame.v[i] = (tape.y.v[i] + T(1)) * T(0.5);
    }
    return frame;
}

// dframe is the loss gradient w.r.t. the [0, 1] output frame. Returns the
// gradient w.r.t. the input frame channels ([0, 1] convention) and adds the
// f_tilde gradient into df_tilde.
template <class T>
Tensor<T> predict_backward(const ModelParams<T>& p, const PredictTape<T>& tape,
                           const Tensor<T>& dframe, Tensor<T>& df_tilde, ModelParams<T>& g,
                           Workspace<T>& ws) {
    Tensor<T> dy(tape.y.h, tape.y.w, tape.y.c);
    for (size_t i = 0; i < dy.v.size(); ++i) {
        const T yv = tape.y.v[i];
        dy.v[i] = dframe.v[i] * T(0.5) * (T(1) - yv * yv);
    }
    Tensor<T> dd2(tape.d2_out.h, tape.d2_out.w, tape.d2_out.c);
    conv_backward(tape.d2_out, p.d3, dy, &dd2, g.d3, ws);
    lrelu_backward_inplace(dd2, tape.d2_out);

    Tensor<T> dc1 = dd2;  // skip connection share
    Tensor<T> dup2(tape.up2.h, tape.up2.w, tape.up2.c);
    conv_backward(tape.up2, p.d2, dd2, &dup2, g.d2, ws);
    Tensor<T> dd1 = upsample2_backward(dup2);
    lrelu_backward_inplace(dd1, tape.d1_out);

    Tensor<T> dc2 = dd1;  // skip connection share
    Tensor<T> dup1(tape.up1.h, tape.up1.w, tape.up1.c);
    conv_backward(tape.up1, p.d1, dd1, &dup1, g.d1, ws);
    Tensor<T> dfuse = upsample2_backward(dup1);
    lrelu_backward_inplace(dfuse, tape.fuse_out);

    Tensor<T> dcat(tape.cat.h, tape.cat.w, tape.cat.c);
    conv_backward(tape.cat, p.fuse, dfuse, &dcat, g.fuse, ws);
    Tensor<T> dc3(tape.c3_out.h, tape.c3_out.w, tape.c3_out.c);
    split_channels_add(dcat, dc3, df_tilde);
    lrelu_backward_inplace(dc3, tape.c3_out);

    conv_backward(tape.c2_out, p.c3, dc3, &dc2, g.c3, ws);
    lrelu_backward_inplace(dc2, tape.c2_out);
    conv_backward(tape.c1_out, p.c2, dc2, &dc1, g.c2, ws);
    lrelu_backward_inplace(dc1, tape.c1_out);
    Tensor<T> dxin(tape.xin.h, tape.xin.w, tape.xin.c);
    conv_backward(tape.xin, p.c1, dc1, &dxin, g.c1, ws);

    Tensor<T> dframe_in(tape.xin.h, tape.xin.w, kFrameCh);
    for (int y = 0; y < dxin.h; ++y) {
        for (int x = 0; x < dxin.w; ++x) {
            for (int ch = 0; ch < kFrameCh; ++ch) {
                dframe_in.at(y, x, ch) = T(2) * dxin.at(y, x, ch);
            }
        }
    }
    return dframe_in;
}

// ---------------------------------------------------------------------------
// Spec-facing single-step ops (pure wrappers over the tape machinery).

/// One recurrent update; the motion kernel f~ is the new hidden state.
template <class T>
std::pair<Tensor<T>, Tensor<T>> motion_encode(const Tensor<T>& state, const Tensor<T>& o_hat,
                                              const ModelParams<T>& p) {
    Workspace<T> ws;
    MotionTape<T> tape;
    Tensor<T> h = motion_forward(p, o_hat, state, tape, ws);
    return {h, h};
}

template <class T>
Tensor<T> predict_step(const Tensor<T>& x_hat, const Tensor<T>& f_tilde,
                       const ModelParams<T>& p) {
    Workspace<T> ws;
    PredictTape<T> tape;
    return predict_forward(p, x_hat, f_tilde, tape, ws);
}

/// Composed one-step forward F(x_t, o_t, alpha_t | Theta, state).
template <class T>
std::pair<Tensor<T>, Tensor<T>> predict_one(const Tensor<T>& frame, const Tensor<T>& flow,
                                            const Twist& action, const Tensor<T>& state,
                                            const ModelParams<T>& p) {
    const Tensor<T> alpha = action_map<T>(action, frame.h, frame.w, p.action_blind);
    Workspace<T> ws;
    MotionTape<T> mtape;
    const Tensor<T>& h = motion_forward(p, augment(flow, alpha), state, mtape, ws);
    PredictTape<T> ptape;
    Tensor<T> out = predict_forward(p, augment(frame, alpha), h, ptape, ws);
    return {std::move(out), h};
}

// ---------------------------------------------------------------------------
// Multi-step rollout with predicted-frame feedback.

template <class T>
struct Rollout {
    struct Step {
        MotionTape<T> motion;  // absent for the first future step
        bool has_motion = false;
        PredictTape<T> predict;
    };
    Tensor<T> h0;
    std::vector<MotionTape<T>> warm;
    std::vector<Step> steps;
    std::vector<Tensor<T>> preds;  // [0, 1] frames
    int context = 0;
};

// Warm-up feeds the context flow maps o_2..o_C through the motion encoder
// from a zero state; each future step then predicts a frame, recomputes the
// flow from predicted frames, re-augments with the logged action, and
// continues. actions[i] is the action at frame i (actions[0] is unused).
template <class T>
const std::vector<Tensor<T>>& rollout_forward(const ModelParams<T>& p,
                                              const std::vector<Tensor<T>>& context,
                                              const std::vector<Twist>& actions, int horizon,
                                              Rollout<T>& ro, Workspace<T>& ws) {
    const int C = int(context.size());
    if (C < 2) {
        throw std::invalid_argument("rollout: need at least 2 context frames");
    }
    if (horizon < 1) {
        throw std::invalid_argument("rollout: horizon must be >= 1");
    }
    if (int(actions.size()) < C + horizon - 1) {
        throw std::invalid_argument("rollout: insufficient actions for context + horizon");
    }
    const int h = context[0].h, w = context[0].w;
    if (h % 4 != 0 || w % 4 != 0) {
        throw std::invalid_argument("rollout: frame sides must be divisible by 4");
    }
    for (const auto& f : context) check_shape(f, context[0], "rollout context");

    ro.context = C;
    ro.h0 = Tensor<T>(h / 4, w / 4, kHiddenCh);
    ro.warm.clear();
    ro.warm.resize(size_t(C) - 1);
    ro.steps.clear();
    ro.steps.resize(size_t(horizon));
    ro.preds.clear();
    ro.preds.reserve(size_t(horizon));

    const Tensor<T>* hidden = &ro.h0;
    for (int t = 1; t < C; ++t) {
        const Tensor<T> alpha = action_map<T>(actions[size_t(t)], h, w, p.action_blind);
        Tensor<T> o_hat = augment(flow_map(context[size_t(t)], context[size_t(t) - 1]), alpha);
        hidden = &motion_forward(p, std::move(o_hat), *hidden, ro.warm[size_t(t) - 1], ws);
    }
    for (int s = 0; s < horizon; ++s) {
        const int t = C - 1 + s;  // frame index being consumed
        const Tensor<T> alpha = action_map<T>(actions[size_t(t)], h, w, p.action_blind);
        const Tensor<T>& frame_in = s == 0 ? context[size_t(C) - 1] : ro.preds[size_t(s) - 1];
        if (s > 0) {
            const Tensor<T>& frame_prev =
                s == 1 ? context[size_t(C) - 1] : ro.preds[size_t(s) - 2];
            Tensor<T> o_hat = augment(flow_map(frame_in, frame_prev), alpha);
            hidden = &motion_forward(p, std::move(o_hat), *hidden, ro.steps[size_t(s)].motion, ws);
            ro.steps[size_t(s)].has_motion = true;
        }
        ro.preds.push_back(
            predict_forward(p, augment(frame_in, alpha), *hidden, ro.steps[size_t(s)].predict, ws));
    }
    return ro.preds;
}

// Reverse pass over a completed rollout. dpreds holds the loss gradients
// w.r.t. each predicted frame; parameter gradients accumulate into g.
template <class T>
void rollout_backward(const ModelParams<T>& p, const Rollout<T>& ro,
                      std::vector<Tensor<T>> dpreds, ModelParams<T>& g, Workspace<T>& ws) {
    const int horizon = int(ro.steps.size());
    Tensor<T> dh(ro.h0.h, ro.h0.w, ro.h0.c);
    for (int s = horizon - 1; s >= 0; --s) {
        Tensor<T> dframe_in =
            predict_backward(p, ro.steps[size_t(s)].predict, dpreds[size_t(s)], dh, g, ws);
        if (s > 0) {
            add_inplace(dpreds[size_t(s) - 1], dframe_in);
        }
        if (ro.steps[size_t(s)].has_motion) {
            Tensor<T> dh_prev;
            Tensor<T> do_hat = motion_backward(p, ro.steps[size_t(s)].motion, dh, dh_prev, g, ws);
            // Flow o = preds[s-1] - preds[s-2] (context frames get no gradient).
            for (int y = 0; y < do_hat.h; ++y) {
                for (int x = 0; x < do_hat.w; ++x) {
                    for (int ch = 0; ch < kFrameCh; ++ch) {
                        const T dv = do_hat.at(y, x, ch);
                        dpreds[size_t(s) - 1].at(y, x, ch) += dv;
                        if (s >= 2) {
                            dpreds[size_t(s) - 2].at(y, x, ch) -= dv;
                        }
                    }
                }
            }
            dh = std::move(dh_prev);
        }
    }
    for (int t = int(ro.warm.size()) - 1; t >= 0; --t) {
        Tensor<T> dh_prev;
        motion_backward(p, ro.warm[size_t(t)], dh, dh_prev, g, ws);
        dh = std::move(dh_prev);
    }
}

// ---------------------------------------------------------------------------
// Loss: alpha_rec * mean |2(pred - target)|^p + lambda_gdl * GDL, both in the
// [-1, 1] pixel convention with forward spatial differences.

struct LossTerms {
    double loss = 0.0;
    double mse = 0.0;
    double gdl = 0.0;
};

template <class T>
LossTerms loss_eval(const std::vector<Tensor<T>>& preds, const std::vector<Tensor<T>>& targets,
                    const TrainConfig& cfg) {
    if (preds.size() != targets.size() || preds.empty()) {
        throw std::invalid_argument("loss: prediction/target length mismatch");
    }
    const bool quadratic = cfg.p_norm == 2.0;
    double rec_sum = 0.0, gh_sum = 0.0, gv_sum = 0.0;
    size_t rec_n = 0, gh_n = 0, gv_n = 0;
    for (size_t f = 0; f < preds.size(); ++f) {
        const Tensor<T>& pr = preds[f];
        const Tensor<T>& tg = targets[f];
        check_shape(pr, tg, "loss");
        for (size_t i = 0; i < pr.v.size(); ++i) {
            const double d = 2.0 * (double(pr.v[i]) - double(tg.v[i]));
            rec_sum += quadratic ? d * d : std::pow(std::abs(d), cfg.p_norm);
        }
        rec_n += pr.v.size();
        for (int y = 0; y < pr.h; ++y) {
            for (int x = 0; x < pr.w; ++x) {
                for (int ch = 0; ch < pr.c; ++ch) {
                    if (x + 1 < pr.w) {
                        const double gp = 2.0 * (double(pr.at(y, x + 1, ch)) - double(pr.at(y, x, ch)));
                        const double gt = 2.0 * (double(tg.at(y, x + 1, ch)) - double(tg.at(y, x, ch)));
                        gh_sum += std::abs(std::abs(gp) - std::abs(gt));
                        ++gh_n;
                    }
                    if (y + 1 < pr.h) {
                        const double gp = 2.0 * (double(pr.at(y + 1, x, ch)) - double(pr.at(y, x, ch)));
                        const double gt = 2.0 * (double(tg.at(y + 1, x, ch)) - double(tg.at(y, x, ch)));
                        gv_sum += std::abs(std::abs(gp) - std::abs(gt));
                        ++gv_n;
                    }
                }
            }
        }
    }
    LossTerms out;
    out.mse = rec_sum / double(rec_n);
    out.gdl = gh_sum / double(gh_n) + gv_sum / double(gv_n);
    out.loss = cfg.alpha_rec * out.mse + cfg.lambda_gdl * out.gdl;
    return out;
}

namespace detail {
inline double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }
}  // namespace detail

/// Loss gradients w.r.t. each predicted frame (in the [0, 1] convention).
template <class T>
LossTerms loss_backward(const std::vector<Tensor<T>>& preds,
                        const std::vector<Tensor<T>>& targets, const TrainConfig& cfg,
                        std::vector<Tensor<T>>& dpreds) {
    const LossTerms terms = loss_eval(preds, targets, cfg);
    const bool quadratic = cfg.p_norm == 2.0;
    size_t rec_n = 0, gh_n = 0, gv_n = 0;
    for (const auto& pr : preds) {
        rec_n += pr.v.size();
        gh_n += size_t(pr.h) * (pr.w - 1) * pr.c;
        gv_n += size_t(pr.h - 1) * pr.w * pr.c;
    }
    dpreds.clear();
    for (size_t f = 0; f < preds.size(); ++f) {
        const Tensor<T>& pr = preds[f];
        const Tensor<T>& tg = targets[f];
        Tensor<T> dp(pr.h, pr.w, pr.c);
        const double rec_scale = cfg.alpha_rec / double(rec_n);
        for (size_t i = 0; i < pr.v.size(); ++i) {
            const double d = 2.0 * (double(pr.v[i]) - double(tg.v[i]));
            double dd;  // d(|d|^p)/d(d)
            if (quadratic) {
                dd = 2.0 * d;
            } else {
                dd = cfg.p_norm * std::pow(std::abs(d), cfg.p_norm - 1.0) * detail::sign(d);
            }
            dp.v[i] = T(rec_scale * dd * 2.0);  // chain through d = 2(pred - target)
        }
        const double gh_scale = cfg.lambda_gdl / double(gh_n);
        const double gv_scale = cfg.lambda_gdl / double(gv_n);
        for (int y = 0; y < pr.h; ++y) {
            for (int x = 0; x < pr.w; ++x) {
                for (int ch = 0; ch < pr.c; ++ch) {
                    if (x + 1 < pr.w) {
                        const double gp = 2.0 * (double(pr.at(y, x + 1, ch)) - double(pr.at(y, x, ch)));
                        const double gt = 2.0 * (double(tg.at(y, x + 1, ch)) - double(tg.at(y, x, ch)));
                        const double dgp = gh_scale * detail::sign(std::abs(gp) - std::abs(gt)) *
                                           detail::sign(gp) * 2.0;
                        dp.at(y, x + 1, ch) += T(dgp);
                        dp.at(y, x, ch) -= T(dgp);
                    }
                    if (y + 1 < pr.h) {
                        const double gp = 2.0 * (double(pr.at(y + 1, x, ch)) - double(pr.at(y, x, ch)));
                        const double gt = 2.0 * (double(tg.at(y + 1, x, ch)) - double(tg.at(y, x, ch)));
                        const double dgp = gv_scale * detail::sign(std::abs(gp) - std::abs(gt)) *
                                           detail::sign(gp) * 2.0;
                        dp.at(y + 1, x, ch) += T(dgp);
                        dp.at(y, x, ch) -= T(dgp);
                    }
                }
            }
        }
        dpreds.push_back(std::move(dp));
    }
    return terms;
}

// ---------------------------------------------------------------------------
// Adam with decoupled weight decay. Moments stored alongside the parameters;
// arithmetic runs in double so float and resume trajectories stay bit-stable.

template <class T>
struct AdamState {
    ModelParams<T> m, v;
    std::int64_t t = 0;

    static AdamState init(const ModelParams<T>& params) {
        return AdamState{zero_like(params), zero_like(params), 0};
    }
};

template <class T>
void adam_step(ModelParams<T>& params, const ModelParams<T>& grads, AdamState<T>& state,
               const TrainConfig& cfg) {
    state.t += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, double(state.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, double(state.t));
    auto pb = params.blocks();
    auto gb = grads.blocks();
    auto mb = state.m.blocks();
    auto vb = state.v.blocks();
    for (int b = 0; b < ModelParams<T>::kNumBlocks; ++b) {
        auto update = [&](std::vector<T>& w, const std::vector<T>& g, std::vector<T>& m,
                          std::vector<T>& v) {
            for (size_t i = 0; i < w.size(); ++i) {
                const double gi = double(g[i]);
                const double mi = cfg.beta1 * double(m[i]) + (1.0 - cfg.beta1) * gi;
                const double vi = cfg.beta2 * double(v[i]) + (1.0 - cfg.beta2) * gi * gi;
                m[i] = T(mi);
                v[i] = T(vi);
                const double step = cfg.lr * (mi / bc1) / (std::sqrt(vi / bc2) + cfg.eps);
                w[i] = T(double(w[i]) - step - cfg.lr * cfg.weight_decay * double(w[i]));
            }
        };
        update(pb[size_t(b)]->w, gb[size_t(b)]->w, mb[size_t(b)]->w, vb[size_t(b)]->w);
        update(pb[size_t(b)]->b, gb[size_t(b)]->b, mb[size_t(b)]->b, vb[size_t(b)]->b);
    }
}

}  // namespace roam
