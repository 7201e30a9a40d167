#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

namespace naf {

struct Vec3 {
    double x = 0, y = 0, z = 0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const {
        double n = norm();
        return {x / n, y / n, z / n};
    }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

inline Vec3 rotate_z(const Vec3& v, double angle) {
    double c = std::cos(angle), s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

struct Aabb {
    Vec3 lo, hi;

    Vec3 size() const { return hi - lo; }
    Vec3 center() const { return (lo + hi) * 0.5; }
    double max_side() const {
        Vec3 s = size();
        return std::max(s.x, std::max(s.y, s.z));
    }
    bool contains(const Vec3& p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y &&
               p.z >= lo.z && p.z <= hi.z;
    }
    static Aabb centered_cube(double side) {
        double h = side * 0.5;
        return {{-h, -h, -h}, {h, h, h}};
    }
};

// ---------------------------------------------------------------------------
// Counter-based random streams. Every random draw in the toolkit is a pure
// function of (key, counter), so results do not depend on thread count or
// evaluation order.

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline uint64_t rng_mix(uint64_t key, uint64_t counter) {
    return splitmix64(splitmix64(key) ^ counter * 0xd1342543de82ef95ull);
}

// uniform in [0, 1)
inline double rng_uniform(uint64_t key, uint64_t counter) {
    return double(rng_mix(key, counter) >> 11) * 0x1.0p-53;
}

// standard normal via Box-Muller on two sub-draws
inline double rng_normal(uint64_t key, uint64_t counter) {
    double u1 = double((rng_mix(key, counter * 2) >> 11) + 1) * 0x1.0p-53;
    double u2 = rng_uniform(key, counter * 2 + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Deterministic Fisher-Yates, independent of std library internals.
template <class T>
void rng_shuffle(std::vector<T>& v, uint64_t key) {
    for (size_t i = v.size(); i > 1; --i) {
        size_t j = size_t(rng_uniform(key, i) * double(i));
        if (j >= i) j = i - 1;
        std::swap(v[i - 1], v[j]);
    }
}

// FNV-1a over raw bytes; used to fingerprint geometry in checkpoints.
inline uint64_t fnv1a(const void* data, size_t n, uint64_t h = 0xcbf29ce484222325ull) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

// Errors that map to CLI exit code 2 (usage / validation) versus 1 (compute).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ComputeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace naf
