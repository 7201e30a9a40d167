#pragma once

#include <cblas.h>

#include "naf/common.hpp"

namespace naf {

namespace detail {

template <class Real>
inline void gemm(bool trans_a, bool trans_b, int m, int n, int k, Real alpha,
                 const Real* a, int lda, const Real* b, int ldb, Real beta, Real* c,
                 int ldc) {
    if constexpr (std::is_same_v<Real, float>)
        cblas_sgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
                    trans_b ? CblasTrans : CblasNoTrans, m, n, k, alpha, a, lda, b, ldb,
                    beta, c, ldc);
    else
        cblas_dgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
                    trans_b ? CblasTrans : CblasNoTrans, m, n, k, alpha, a, lda, b, ldb,
                    beta, c, ldc);
}

}  // namespace detail

// 4-layer attenuation MLP: in -> h -> h -> h -> 1, ReLU between hidden
// layers, sigmoid output, and the raw input concatenated into layer 2's
// input (skip connection). Weights are row-major [out][in].
template <class Real>
struct MlpParams {
    int in_dim = 32;
    int hidden = 32;
    std::vector<Real> w1, b1, w2, b2, w3, b3, w4, b4;

    int l2_in() const { return hidden + in_dim; }

    template <class Fn>
    void for_each_array(Fn&& fn) {
        fn(w1); fn(b1); fn(w2); fn(b2); fn(w3); fn(b3); fn(w4); fn(b4);
    }
    template <class Fn>
    void for_each_array(Fn&& fn) const {
        fn(w1); fn(b1); fn(w2); fn(b2); fn(w3); fn(b3); fn(w4); fn(b4);
    }

    size_t parameter_count() const {
        size_t n = 0;
        for_each_array([&](const std::vector<Real>& a) { n += a.size(); });
        return n;
    }

    static MlpParams zeros(int in_dim, int hidden = 32) {
        MlpParams p;
        p.in_dim = in_dim;
        p.hidden = hidden;
        p.w1.assign(size_t(hidden) * in_dim, Real(0));
        p.b1.assign(hidden, Real(0));
        p.w2.assign(size_t(hidden) * p.l2_in(), Real(0));
        p.b2.assign(hidden, Real(0));
        p.w3.assign(size_t(hidden) * hidden, Real(0));
        p.b3.assign(hidden, Real(0));
        p.w4.assign(hidden, Real(0));
        p.b4.assign(1, Real(0));
        return p;
    }

    // Kaiming-style uniform fan-in init, zero biases, deterministic per seed.
    static MlpParams init(uint64_t seed, int in_dim, int hidden = 32) {
        MlpParams p = zeros(in_dim, hidden);
        uint64_t key = splitmix64(seed ^ 0x6d6c70ull);
        uint64_t counter = 0;
        auto fill = [&](std::vector<Real>& w, int fan_in) {
            Real bound = Real(std::sqrt(6.0 / fan_in));
            for (Real& v : w)
                v = Real((rng_uniform(key, counter++) * 2.0 - 1.0)) * bound;
        };
        fill(p.w1, in_dim);
        fill(p.w2, p.l2_in());
        fill(p.w3, hidden);
        fill(p.w4, hidden);
        return p;
    }
};

// Batched forward/backward workspace. X must be filled with S rows of in_dim
// features before calling mlp_forward_batch; intermediate activations are
// kept for the backward pass.
template <class Real>
struct MlpWork {
    int S = 0;
    std::vector<Real> X, Z1, A1, X2, Z2, A2, Z3, A3, Z4, Mu;
    std::vector<Real> dZ, dA, dX2, dX;

    void resize(int samples, const MlpParams<Real>& p) {
        S = samples;
        size_t s = size_t(samples);
        X.resize(s * p.in_dim);
        Z1.resize(s * p.hidden);
        A1.resize(s * p.hidden);
        X2.resize(s * p.l2_in());
        Z2.resize(s * p.hidden);
        A2.resize(s * p.hidden);
        Z3.resize(s * p.hidden);
        A3.resize(s * p.hidden);
        Z4.resize(s);
        Mu.resize(s);
        dZ.resize(s * p.hidden);
        dA.resize(s * p.hidden);
        dX2.resize(s * p.l2_in());
        dX.resize(s * p.in_dim);
    }
};

namespace detail {

template <class Real>
inline void add_bias_relu(const Real* b, Real* z, Real* a, int S, int n) {
    for (int i = 0; i < S; ++i)
        for (int j = 0; j < n; ++j) {
            Real v = z[size_t(i) * n + j] + b[j];
            z[size_t(i) * n + j] = v;
            a[size_t(i) * n + j] = v > Real(0) ? v : Real(0);
        }
}

}  // namespace detail

template <class Real>
void mlp_forward_batch(const MlpParams<Real>& p, MlpWork<Real>& w) {
    const int S = w.S, h = p.hidden, in = p.in_dim, l2 = p.l2_in();
    if (S == 0) return;
    detail::gemm<Real>(false, true, S, h, in, 1, w.X.data(), in, p.w1.data(), in, 0,
                       w.Z1.data(), h);
    detail::add_bias_relu(p.b1.data(), w.Z1.data(), w.A1.data(), S, h);
    for (int i = 0; i < S; ++i) {
        std::memcpy(&w.X2[size_t(i) * l2], &w.A1[size_t(i) * h], h * sizeof(Real));
        std::memcpy(&w.X2[size_t(i) * l2 + h], &w.X[size_t(i) * in], in * sizeof(Real));
    }
    detail::gemm<Real>(false, true, S, h, l2, 1, w.X2.data(), l2, p.w2.data(), l2, 0,
                       w.Z2.data(), h);
    detail::add_bias_relu(p.b2.data(), w.Z2.data(), w.A2.data(), S, h);
    detail::gemm<Real>(false, true, S, h, h, 1, w.A2.data(), h, p.w3.data(), h, 0,
                       w.Z3.data(), h);
    detail::add_bias_relu(p.b3.data(), w.Z3.data(), w.A3.data(), S, h);
    detail::gemm<Real>(false, true, S, 1, h, 1, w.A3.data(), h, p.w4.data(), h, 0,
                       w.Z4.data(), 1);
    for (int i = 0; i < S; ++i) {
        Real z = w.Z4[i] + p.b4[0];
        w.Z4[i] = z;
        w.Mu[i] = Real(1) / (Real(1) + std::exp(-z));
    }
}

// d_mu has length S; parameter gradients accumulate into `grads`; gradients
// w.r.t. the input features land in w.dX.
template <class Real>
void mlp_backward_batch(const MlpParams<Real>& p, MlpWork<Real>& w, const Real* d_mu,
                        MlpParams<Real>& grads) {
    const int S = w.S, h = p.hidden, in = p.in_dim, l2 = p.l2_in();
    if (S == 0) return;
    std::vector<Real>& dz4 = w.Z4;  // reuse, Z4 no longer needed
    for (int i = 0; i < S; ++i) dz4[i] = d_mu[i] * w.Mu[i] * (Real(1) - w.Mu[i]);
    // layer 4
    detail::gemm<Real>(true, false, 1, h, S, 1, dz4.data(), 1, w.A3.data(), h, 1,
                       grads.w4.data(), h);
    for (int i = 0; i < S; ++i) grads.b4[0] += dz4[i];
    // dA3 = dz4 * w4
    for (int i = 0; i < S; ++i)
        for (int j = 0; j < h; ++j) w.dA[size_t(i) * h + j] = dz4[i] * p.w4[j];
    auto relu_mask = [&](const std::vector<Real>& z) {
        for (size_t i = 0; i < size_t(S) * h; ++i)
            w.dZ[i] = z[i] > Real(0) ? w.dA[i] : Real(0);
    };
    auto colsum = [&](std::vector<Real>& gb) {
        for (int i = 0; i < S; ++i)
            for (int j = 0; j < h; ++j) gb[j] += w.dZ[size_t(i) * h + j];
    };
    // layer 3
    relu_mask(w.Z3);
    detail::gemm<Real>(true, false, h, h, S, 1, w.dZ.data(), h, w.A2.data(), h, 1,
                       grads.w3.data(), h);
    colsum(grads.b3);
    detail::gemm<Real>(false, false, S, h, h, 1, w.dZ.data(), h, p.w3.data(), h, 0,
                       w.dA.data(), h);
    // layer 2
    relu_mask(w.Z2);
    detail::gemm<Real>(true, false, h, l2, S, 1, w.dZ.data(), h, w.X2.data(), l2, 1,
                       grads.w2.data(), l2);
    colsum(grads.b2);
    detail::gemm<Real>(false, false, S, l2, h, 1, w.dZ.data(), h, p.w2.data(), l2, 0,
                       w.dX2.data(), l2);
    // split skip: dA1 and the direct input contribution
    for (int i = 0; i < S; ++i)
        for (int j = 0; j < h; ++j) w.dA[size_t(i) * h + j] = w.dX2[size_t(i) * l2 + j];
    // layer 1
    relu_mask(w.Z1);
    detail::gemm<Real>(true, false, h, in, S, 1, w.dZ.data(), h, w.X.data(), in, 1,
                       grads.w1.data(), in);
    colsum(grads.b1);
    detail::gemm<Real>(false, false, S, in, h, 1, w.dZ.data(), h, p.w1.data(), in, 0,
                       w.dX.data(), in);
    for (int i = 0; i < S; ++i)
        for (int j = 0; j < in; ++j)
            w.dX[size_t(i) * in + j] += w.dX2[size_t(i) * l2 + h + j];
}

// Single-sample convenience wrappers (tests, tiny probes).
template <class Real>
Real mlp_forward(const MlpParams<Real>& p, const Real* features, MlpWork<Real>& w) {
    w.resize(1, p);
    std::memcpy(w.X.data(), features, p.in_dim * sizeof(Real));
    mlp_forward_batch(p, w);
    return w.Mu[0];
}

template <class Real>
void mlp_backward(const MlpParams<Real>& p, MlpWork<Real>& w, Real d_mu,
                  MlpParams<Real>& grads) {
    mlp_backward_batch(p, w, &d_mu, grads);
}

}  // namespace naf
