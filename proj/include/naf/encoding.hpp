#pragma once

#include <cassert>
#include <span>

#include "naf/common.hpp"

namespace naf {

// Multiresolution hash encoder. Each level is a virtual voxel grid over the
// unit cube whose corner features live either in a dense array (when the grid
// fits) or in a hashed table of table_size rows.
struct HashEncoderConfig {
    int levels = 16;
    int features_per_level = 2;
    uint32_t table_size = 1u << 19;  // power of two
    int base_resolution = 16;
    double growth_factor = 1.0;
    std::array<uint32_t, 3> primes = {1u, 2654435761u, 805459861u};

    int output_dim() const { return levels * features_per_level; }
    int level_resolution(int level) const {
        // the epsilon keeps exact powers (e.g. growth 2.0) from rounding down
        return int(std::floor(base_resolution * std::pow(growth_factor, level) + 1e-9));
    }
    bool level_dense(int level) const {
        uint64_t n = uint64_t(level_resolution(level)) + 1;
        return n * n * n <= table_size;
    }
    size_t level_rows(int level) const {
        if (!level_dense(level)) return table_size;
        uint64_t n = uint64_t(level_resolution(level)) + 1;
        return size_t(n * n * n);
    }

    void validate() const {
        if (levels < 1 || features_per_level < 1)
            throw ValidationError("hash encoder: levels/features must be >= 1");
        if ((table_size & (table_size - 1)) != 0 || table_size == 0)
            throw ValidationError("hash encoder: table_size must be a power of two");
        if (base_resolution < 1 || !(growth_factor >= 1.0))
            throw ValidationError("hash encoder: invalid resolution schedule");
        for (int l = 1; l < levels; ++l)
            if (level_resolution(l) < level_resolution(l - 1))
                throw ValidationError("hash encoder: resolutions must be non-decreasing");
    }

    // growth chosen so the finest level is ~2x the target volume resolution
    static HashEncoderConfig for_target_resolution(int target) {
        HashEncoderConfig c;
        c.growth_factor =
            std::exp(std::log(2.0 * target / c.base_resolution) / (c.levels - 1));
        c.validate();
        return c;
    }
};

inline uint32_t hash_index(const HashEncoderConfig& cfg, int level, uint32_t cx,
                           uint32_t cy, uint32_t cz) {
    if (cfg.level_dense(level)) {
        uint32_t n = uint32_t(cfg.level_resolution(level)) + 1;
        return (cz * n + cy) * n + cx;
    }
    uint32_t h = (cx * cfg.primes[0]) ^ (cy * cfg.primes[1]) ^ (cz * cfg.primes[2]);
    return h & (cfg.table_size - 1);
}

template <class Real>
struct HashTables {
    HashEncoderConfig config;
    std::vector<std::vector<Real>> levels;  // [level][row * F + f]

    size_t parameter_count() const {
        size_t n = 0;
        for (auto& l : levels) n += l.size();
        return n;
    }

    static HashTables init(const HashEncoderConfig& cfg, uint64_t seed) {
        cfg.validate();
        HashTables t;
        t.config = cfg;
        t.levels.resize(cfg.levels);
        uint64_t key = splitmix64(seed ^ 0x686173686462ull);
        uint64_t counter = 0;
        for (int l = 0; l < cfg.levels; ++l) {
            t.levels[l].resize(t.config.level_rows(l) * cfg.features_per_level);
            for (Real& v : t.levels[l])
                v = Real((rng_uniform(key, counter++) * 2.0 - 1.0) * 1e-4);
        }
        return t;
    }

    std::vector<std::vector<Real>> zero_like() const {
        std::vector<std::vector<Real>> g(levels.size());
        for (size_t l = 0; l < levels.size(); ++l) g[l].assign(levels[l].size(), Real(0));
        return g;
    }
};

namespace detail {

// shared corner/weight enumeration for forward and backward
template <class Real, class Fn>
inline void for_each_corner(const HashEncoderConfig& cfg, const Real* p, Fn&& fn) {
    for (int l = 0; l < cfg.levels; ++l) {
        int n = cfg.level_resolution(l);
        Real fx = std::clamp(p[0], Real(0), Real(1)) * n;
        Real fy = std::clamp(p[1], Real(0), Real(1)) * n;
        Real fz = std::clamp(p[2], Real(0), Real(1)) * n;
        uint32_t ix = std::min(uint32_t(fx), uint32_t(n - 1));
        uint32_t iy = std::min(uint32_t(fy), uint32_t(n - 1));
        uint32_t iz = std::min(uint32_t(fz), uint32_t(n - 1));
        Real wx = fx - ix, wy = fy - iy, wz = fz - iz;
        for (int c = 0; c < 8; ++c) {
            uint32_t cx = ix + (c & 1), cy = iy + ((c >> 1) & 1), cz = iz + ((c >> 2) & 1);
            Real w = ((c & 1) ? wx : 1 - wx) * ((c & 2) ? wy : 1 - wy) *
                     ((c & 4) ? wz : 1 - wz);
            fn(l, hash_index(cfg, l, cx, cy, cz), w);
        }
    }
}

}  // namespace detail

// p in [0,1]^3 (clamped); out has length config.output_dim()
template <class Real>
void encode_hash(const HashTables<Real>& tables, const Real* p, Real* out) {
    const HashEncoderConfig& cfg = tables.config;
    const int F = cfg.features_per_level;
    for (int i = 0; i < cfg.output_dim(); ++i) out[i] = Real(0);
    detail::for_each_corner<Real>(cfg, p, [&](int l, uint32_t row, Real w) {
        const Real* src = tables.levels[l].data() + size_t(row) * F;
        Real* dst = out + size_t(l) * F;
        for (int f = 0; f < F; ++f) dst[f] += w * src[f];
    });
}

// Accumulates dL/dTheta for one sample. grads has the same shape as tables.
template <class Real>
void encode_hash_backward(const HashTables<Real>& tables, const Real* p,
                          const Real* upstream,
                          std::vector<std::vector<Real>>& grads) {
    const HashEncoderConfig& cfg = tables.config;
    const int F = cfg.features_per_level;
    detail::for_each_corner<Real>(cfg, p, [&](int l, uint32_t row, Real w) {
        Real* dst = grads[l].data() + size_t(row) * F;
        const Real* up = upstream + size_t(l) * F;
        for (int f = 0; f < F; ++f) dst[f] += w * up[f];
    });
}

// Fixed sinusoidal encoder: per band k, [sin(2^k pi p), cos(2^k pi p)] per
// axis; output length 6 * bands.
template <class Real>
void encode_frequency(const Real* p, int bands, Real* out) {
    for (int k = 0; k < bands; ++k) {
        Real freq = Real(std::pow(2.0, k) * M_PI);
        for (int axis = 0; axis < 3; ++axis) {
            out[k * 6 + axis] = std::sin(freq * p[axis]);
            out[k * 6 + 3 + axis] = std::cos(freq * p[axis]);
        }
    }
}

}  // namespace naf
