// Minimal dense tensor + convolution kernels used by the predictor.
// Everything is templated on the scalar type: float is the production mode,
// double is the 64-bit gradient-check mode.
#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace roam {

/// (H, W, C) raster, row-major with channel fastest.
template <class T>
struct Tensor {
    int h = 0, w = 0, c = 0;
    std::vector<T> v;

    Tensor() = default;
    Tensor(int h_, int w_, int c_) : h(h_), w(w_), c(c_), v(size_t(h_) * w_ * c_, T(0)) {}

    T& at(int y, int x, int ch) { return v[(size_t(y) * w + x) * c + ch]; }
    T at(int y, int x, int ch) const { return v[(size_t(y) * w + x) * c + ch]; }
    size_t size() const { return v.size(); }
    bool same_shape(const Tensor& o) const { return h == o.h && w == o.w && c == o.c; }
    void fill(T value) { std::fill(v.begin(), v.end(), value); }

    friend bool operator==(const Tensor&, const Tensor&) = default;
};

/// 3x3 convolution parameters; weights laid out [ky][kx][cin][cout], cout fastest.
template <class T>
struct ConvParam {
    int kh = 3, kw = 3, cin = 0, cout = 0, stride = 1;
    std::vector<T> w;
    std::vector<T> b;  // empty when the block has no bias

    size_t weight_count() const { return w.size() + b.size(); }
};

/// Reusable scratch buffers for the convolution kernels.
template <class T>
struct Workspace {
    std::vector<T> patches;   // im2col matrix, M x K
    std::vector<T> dpatches;  // gradient of patches
    std::vector<T> wt;        // transposed weights, cout x K
};

template <class T>
inline void check_shape(const Tensor<T>& a, const Tensor<T>& b, const char* what) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument(std::string(what) + ": shape mismatch (" +
                                    std::to_string(a.h) + "x" + std::to_string(a.w) + "x" +
                                    std::to_string(a.c) + " vs " + std::to_string(b.h) + "x" +
                                    std::to_string(b.w) + "x" + std::to_string(b.c) + ")");
    }
}

inline int conv_out_dim(int in, int stride) { return (in - 1) / stride + 1; }

// Zero-padded (pad 1) im2col for 3x3 kernels: row per output pixel, column
// per (ky, kx, cin).
template <class T>
void im2col(const Tensor<T>& in, int stride, std::vector<T>& patches) {
    const int ho = conv_out_dim(in.h, stride);
    const int wo = conv_out_dim(in.w, stride);
    const int K = 9 * in.c;
    patches.assign(size_t(ho) * wo * K, T(0));
    for (int oy = 0; oy < ho; ++oy) {
        for (int ox = 0; ox < wo; ++ox) {
            T* row = patches.data() + (size_t(oy) * wo + ox) * K;
            for (int ky = 0; ky < 3; ++ky) {
                const int iy = oy * stride + ky - 1;
                if (iy < 0 || iy >= in.h) continue;
                for (int kx = 0; kx < 3; ++kx) {
                    const int ix = ox * stride + kx - 1;
                    if (ix < 0 || ix >= in.w) continue;
                    const T* src = in.v.data() + (size_t(iy) * in.w + ix) * in.c;
                    T* dst = row + (ky * 3 + kx) * in.c;
                    for (int ci = 0; ci < in.c; ++ci) {
                        dst[ci] = src[ci];
                    }
                }
            }
        }
    }
}

/// Scatter-add of an im2col-shaped gradient back to input layout.
template <class T>
void col2im_add(const std::vector<T>& dpatches, int h, int w, int c, int stride,
                Tensor<T>& din) {
    const int ho = conv_out_dim(h, stride);
    const int wo = conv_out_dim(w, stride);
    const int K = 9 * c;
    for (int oy = 0; oy < ho; ++oy) {
        for (int ox = 0; ox < wo; ++ox) {
            const T* row = dpatches.data() + (size_t(oy) * wo + ox) * K;
            for (int ky = 0; ky < 3; ++ky) {
                const int iy = oy * stride + ky - 1;
                if (iy < 0 || iy >= h) continue;
                for (int kx = 0; kx < 3; ++kx) {
                    const int ix = ox * stride + kx - 1;
                    if (ix < 0 || ix >= w) continue;
                    T* dst = din.v.data() + (size_t(iy) * w + ix) * c;
                    const T* src = row + (ky * 3 + kx) * c;
                    for (int ci = 0; ci < c; ++ci) {
                        dst[ci] += src[ci];
                    }
                }
            }
        }
    }
}

// C[m x n] += A[m x k] * B[k x n], all row-major. The j-innermost loop keeps
// the hot path stride-1 so the compiler can vectorize it.
template <class T>
void gemm_acc(int m, int n, int k, const T* A, const T* B, T* C) {
    for (int i = 0; i < m; ++i) {
        const T* a_row = A + size_t(i) * k;
        T* c_row = C + size_t(i) * n;
        for (int p = 0; p < k; ++p) {
            const T a = a_row[p];
            if (a == T(0)) continue;
            const T* b_row = B + size_t(p) * n;
            for (int j = 0; j < n; ++j) {
                c_row[j] += a * b_row[j];
            }
        }
    }
}

// out = conv3x3(in) + bias, or += when accumulate is set (bias skipped then).
template <class T>
void conv_forward(const Tensor<T>& in, const ConvParam<T>& cp, Tensor<T>& out,
                  Workspace<T>& ws, bool accumulate = false) {
    assert(in.c == cp.cin);
    const int ho = conv_out_dim(in.h, cp.stride);
    const int wo = conv_out_dim(in.w, cp.stride);
    if (!accumulate) {
        out = Tensor<T>(ho, wo, cp.cout);
        if (!cp.b.empty()) {
            T* dst = out.v.data();
            for (int px = 0; px < ho * wo; ++px, dst += cp.cout) {
                for (int co = 0; co < cp.cout; ++co) {
                    dst[co] = cp.b[size_t(co)];
                }
            }
        }
    } else {
        assert(out.h == ho && out.w == wo && out.c == cp.cout);
    }
    im2col(in, cp.stride, ws.patches);
    gemm_acc(ho * wo, cp.cout, 9 * cp.cin, ws.patches.data(), cp.w.data(), out.v.data());
}

// Accumulates dW/db into dcp and, when din is non-null, adds the input
// gradient into *din (which must already have the input shape).
template <class T>
void conv_backward(const Tensor<T>& in, const ConvParam<T>& cp, const Tensor<T>& dout,
                   Tensor<T>* din, ConvParam<T>& dcp, Workspace<T>& ws) {
    const int ho = dout.h, wo = dout.w;
    const int M = ho * wo;
    const int K = 9 * cp.cin;
    im2col(in, cp.stride, ws.patches);

    // dW[K x cout] += patches^T * dout
    for (int p = 0; p < M; ++p) {
        const T* prow = ws.patches.data() + size_t(p) * K;
        const T* drow = dout.v.data() + size_t(p) * cp.cout;
        for (int kk = 0; kk < K; ++kk) {
            const T a = prow[kk];
            if (a == T(0)) continue;
            T* wrow = dcp.w.data() + size_t(kk) * cp.cout;
            for (int co = 0; co < cp.cout; ++co) {
                wrow[co] += a * drow[co];
            }
        }
    }
    if (!dcp.b.empty()) {
        for (int p = 0; p < M; ++p) {
            const T* drow = dout.v.data() + size_t(p) * cp.cout;
            for (int co = 0; co < cp.cout; ++co) {
                dcp.b[size_t(co)] += drow[co];
            }
        }
    }
    if (din != nullptr) {
        // dpatches = dout * W^T via a pre-transposed weight matrix.
        ws.wt.assign(size_t(cp.cout) * K, T(0));
        for (int kk = 0; kk < K; ++kk) {
            for (int co = 0; co < cp.cout; ++co) {
                ws.wt[size_t(co) * K + kk] = cp.w[size_t(kk) * cp.cout + co];
            }
        }
        ws.dpatches.assign(size_t(M) * K, T(0));
        gemm_acc(M, K, cp.cout, dout.v.data(), ws.wt.data(), ws.dpatches.data());
        col2im_add(ws.dpatches, in.h, in.w, in.c, cp.stride, *din);
    }
}

inline constexpr double kLeakySlope = 0.2;

template <class T>
void lrelu_inplace(Tensor<T>& t) {
    for (T& x : t.v) {
        if (x < T(0)) x *= T(kLeakySlope);
    }
}

/// d(pre) from d(post) using the post-activation sign (slope preserves sign).
template <class T>
void lrelu_backward_inplace(Tensor<T>& grad, const Tensor<T>& post) {
    for (size_t i = 0; i < grad.v.size(); ++i) {
        if (post.v[i] < T(0)) grad.v[i] *= T(kLeakySlope);
    }
}

template <class T>
void sigmoid_inplace(Tensor<T>& t) {
    for (T& x : t.v) {
        x = T(1) / (T(1) + std::exp(-x));
    }
}

template <class T>
void tanh_inplace(Tensor<T>& t) {
    for (T& x : t.v) {
        x = std::tanh(x);
    }
}

/// Nearest-neighbor 2x upsample.
template <class T>
Tensor<T> upsample2(const Tensor<T>& in) {
    Tensor<T> out(in.h * 2, in.w * 2, in.c);
    for (int y = 0; y < out.h; ++y) {
        for (int x = 0; x < out.w; ++x) {
            const T* src = in.v.data() + (size_t(y / 2) * in.w + x / 2) * in.c;
            T* dst = out.v.data() + (size_t(y) * out.w + x) * out.c;
            for (int ci = 0; ci < in.c; ++ci) dst[ci] = src[ci];
        }
    }
    return out;
}

template <class T>
Tensor<T> upsample2_backward(const Tensor<T>& dout) {
    Tensor<T> din(dout.h / 2, dout.w / 2, dout.c);
    for (int y = 0; y < dout.h; ++y) {
        for (int x = 0; x < dout.w; ++x) {
            const T* src = dout.v.data() + (size_t(y) * dout.w + x) * dout.c;
            T* dst = din.v.data() + (size_t(y / 2) * din.w + x / 2) * din.c;
            for (int ci = 0; ci < dout.c; ++ci) dst[ci] += src[ci];
        }
    }
    return din;
}

template <class T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
    if (a.h != b.h || a.w != b.w) {
        throw std::invalid_argument("concat_channels: spatial shape mismatch");
    }
    Tensor<T> out(a.h, a.w, a.c + b.c);
    for (int y = 0; y < a.h; ++y) {
        for (int x = 0; x < a.w; ++x) {
            T* dst = out.v.data() + (size_t(y) * a.w + x) * out.c;
            const T* pa = a.v.data() + (size_t(y) * a.w + x) * a.c;
            const T* pb = b.v.data() + (size_t(y) * b.w + x) * b.c;
            for (int ci = 0; ci < a.c; ++ci) dst[ci] = pa[ci];
            for (int ci = 0; ci < b.c; ++ci) dst[a.c + ci] = pb[ci];
        }
    }
    return out;
}

/// Splits a channel-concat gradient back into (+=) the two sources.
template <class T>
void split_channels_add(const Tensor<T>& dout, Tensor<T>& da, Tensor<T>& db) {
    for (int y = 0; y < dout.h; ++y) {
        for (int x = 0; x < dout.w; ++x) {
            const T* src = dout.v.data() + (size_t(y) * dout.w + x) * dout.c;
            T* pa = da.v.data() + (size_t(y) * da.w + x) * da.c;
            T* pb = db.v.data() + (size_t(y) * db.w + x) * db.c;
            for (int ci = 0; ci < da.c; ++ci) pa[ci] += src[ci];
            for (int ci = 0; ci < db.c; ++ci) pb[ci] += src[da.c + ci];
        }
    }
}

template <class T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
    check_shape(a, b, "sub");
    Tensor<T> out(a.h, a.w, a.c);
    for (size_t i = 0; i < a.v.size(); ++i) {
        out.v[i] = a.v[i] - b.v[i];
    }
    return out;
}

template <class T>
void add_inplace(Tensor<T>& a, const Tensor<T>& b) {
    check_shape(a, b, "add_inplace");
    for (size_t i = 0; i < a.v.size(); ++i) {
        a.v[i] += b.v[i];
    }
}

}  // namespace roam
