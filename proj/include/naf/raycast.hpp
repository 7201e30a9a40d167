#pragma once

#include "naf/geometry.hpp"

namespace naf {

enum class LastDelta { close_to_exit, drop_last };

// N sample parameters and spacings along a hit ray. Positions are
// origin + direction * t; deltas are in the same units as t.
struct SampledRay {
    std::vector<double> t;
    std::vector<double> delta;
};

// One uniform sample per equal-length bin. The rng stream is counter-based
// on (key, bin), so jitter is reproducible and thread-count independent.
inline void stratified_sample(const Ray& ray, int n, bool jitter, uint64_t rng_key,
                              SampledRay& out,
                              LastDelta last = LastDelta::close_to_exit) {
    out.t.resize(n);
    out.delta.resize(n);
    double span = ray.t_far - ray.t_near;
    double bin = span / n;
    for (int i = 0; i < n; ++i) {
        double frac = jitter ? rng_uniform(rng_key, uint64_t(i)) : 0.5;
        out.t[i] = ray.t_near + (i + frac) * bin;
    }
    for (int i = 0; i + 1 < n; ++i) out.delta[i] = out.t[i + 1] - out.t[i];
    out.delta[n - 1] =
        last == LastDelta::close_to_exit ? (ray.t_far - out.t[n - 1]) : 0.0;
}

// Beer's law: I = I0 * exp(-sum mu_i * delta_i). Returns I; *optical_depth
// receives the summed exponent for the backward pass.
template <class Real>
Real synthesize_intensity(const Real* mu, const Real* delta, int n, Real i0,
                          Real* optical_depth = nullptr) {
    Real depth = 0;
    for (int i = 0; i < n; ++i) depth += mu[i] * delta[i];
    if (optical_depth) *optical_depth = depth;
    return i0 * std::exp(-depth);
}

// dL/dmu_i = dL_dI * (-delta_i * I_s)
template <class Real>
void synthesize_backward(const Real* delta, int n, Real i_s, Real dl_di,
                         Real* dl_dmu) {
    for (int i = 0; i < n; ++i) dl_dmu[i] = dl_di * (-delta[i] * i_s);
}

}  // namespace naf
