#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "naf/encoding.hpp"

using namespace naf;

namespace {

// brute-force reimplementation of one level's trilinear feature lookup
template <class Real>
void encode_level_oracle(const HashTables<Real>& tables, int level, const Real* p,
                         Real* out) {
    const HashEncoderConfig& cfg = tables.config;
    int n = cfg.level_resolution(level);
    const int F = cfg.features_per_level;
    double fx = std::clamp(double(p[0]), 0.0, 1.0) * n;
    double fy = std::clamp(double(p[1]), 0.0, 1.0) * n;
    double fz = std::clamp(double(p[2]), 0.0, 1.0) * n;
    int ix = std::min(int(fx), n - 1), iy = std::min(int(fy), n - 1),
        iz = std::min(int(fz), n - 1);
    double wx = fx - ix, wy = fy - iy, wz = fz - iz;
    for (int f = 0; f < F; ++f) out[f] = 0;
    for (int dz = 0; dz <= 1; ++dz)
        for (int dy = 0; dy <= 1; ++dy)
            for (int dx = 0; dx <= 1; ++dx) {
                double w = (dx ? wx : 1 - wx) * (dy ? wy : 1 - wy) * (dz ? wz : 1 - wz);
                uint32_t row = hash_index(cfg, level, ix + dx, iy + dy, iz + dz);
                for (int f = 0; f < F; ++f)
                    out[f] += Real(w) * tables.levels[level][size_t(row) * F + f];
            }
}

}  // namespace

TEST_CASE("hash_index: xor-product example on a hashed level") {
    HashEncoderConfig cfg;  // defaults: T = 2^19, base 16
    cfg.growth_factor = 2.0;
    // level 6 has resolution 1024 -> 1025^3 rows > T, so it is hashed
    REQUIRE_FALSE(cfg.level_dense(6));
    CHECK(hash_index(cfg, 6, 1, 1, 0) == 489904);
    CHECK(hash_index(cfg, 6, 0, 0, 0) == 0);
}

TEST_CASE("hash_index: dense levels use row-major direct indexing") {
    HashEncoderConfig cfg;
    REQUIRE(cfg.level_dense(0));  // 17^3 = 4913 <= 2^19
    CHECK(hash_index(cfg, 0, 0, 0, 0) == 0);
    CHECK(hash_index(cfg, 0, 1, 0, 0) == 1);
    CHECK(hash_index(cfg, 0, 0, 1, 0) == 17);
    CHECK(hash_index(cfg, 0, 0, 0, 1) == 17 * 17);
    CHECK(hash_index(cfg, 0, 16, 16, 16) == 17 * 17 * 17 - 1);
}

TEST_CASE("config: level schedule and validation") {
    HashEncoderConfig cfg = HashEncoderConfig::for_target_resolution(128);
    CHECK(cfg.level_resolution(0) == 16);
    CHECK(cfg.level_resolution(cfg.levels - 1) == 256);
    CHECK(cfg.output_dim() == 32);

    HashEncoderConfig bad;
    bad.table_size = 1000;  // not a power of two
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = HashEncoderConfig{};
    bad.growth_factor = 0.5;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("encode at a grid corner returns the table row verbatim") {
    HashEncoderConfig cfg;
    cfg.levels = 1;
    cfg.base_resolution = 4;
    auto tables = HashTables<double>::init(cfg, 1);
    // p = (0.25, 0.5, 0.75) lies exactly on corner (1,2,3) of the 4^3 grid
    double p[3] = {0.25, 0.5, 0.75};
    double out[2];
    encode_hash(tables, p, out);
    uint32_t row = hash_index(cfg, 0, 1, 2, 3);
    CHECK(out[0] == doctest::Approx(tables.levels[0][row * 2 + 0]));
    CHECK(out[1] == doctest::Approx(tables.levels[0][row * 2 + 1]));
}

TEST_CASE("encode at a cell center is the mean of the 8 corner features") {
    HashEncoderConfig cfg;
    cfg.levels = 1;
    cfg.base_resolution = 4;
    auto tables = HashTables<double>::init(cfg, 2);
    double p[3] = {0.125, 0.125, 0.125};  // center of cell (0,0,0)
    double out[2];
    encode_hash(tables, p, out);
    for (int f = 0; f < 2; ++f) {
        double mean = 0;
        for (int c = 0; c < 8; ++c) {
            uint32_t row = hash_index(cfg, 0, c & 1, (c >> 1) & 1, (c >> 2) & 1);
            mean += tables.levels[0][row * 2 + f];
        }
        mean /= 8;
        CHECK(out[f] == doctest::Approx(mean));
    }
}

TEST_CASE("encode matches a brute-force per-level oracle at random points") {
    HashEncoderConfig cfg = HashEncoderConfig::for_target_resolution(64);
    auto tables = HashTables<double>::init(cfg, 3);
    uint64_t key = 11;
    std::vector<double> out(cfg.output_dim());
    for (int i = 0; i < 200; ++i) {
        double p[3] = {rng_uniform(key, 3 * i), rng_uniform(key, 3 * i + 1),
                       rng_uniform(key, 3 * i + 2)};
        encode_hash(tables, p, out.data());
        for (int l = 0; l < cfg.levels; ++l) {
            double expect[2];
            encode_level_oracle(tables, l, p, expect);
            CHECK(out[l * 2 + 0] == doctest::Approx(expect[0]));
            CHECK(out[l * 2 + 1] == doctest::Approx(expect[1]));
        }
    }
}

TEST_CASE("encoding is continuous across cell boundaries") {
    HashEncoderConfig cfg = HashEncoderConfig::for_target_resolution(32);
    auto tables = HashTables<double>::init(cfg, 4);
    std::vector<double> a(cfg.output_dim()), b(cfg.output_dim());
    double eps = 1e-9;
    // boundary plane of the coarsest level's cell (also a boundary for many)
    double pa[3] = {0.25 - eps, 0.4, 0.6}, pb[3] = {0.25 + eps, 0.4, 0.6};
    encode_hash(tables, pa, a.data());
    encode_hash(tables, pb, b.data());
    for (int i = 0; i < cfg.output_dim(); ++i)
        CHECK(std::abs(a[i] - b[i]) < 1e-6);
}

TEST_CASE("points outside the unit cube clamp to the boundary value") {
    HashEncoderConfig cfg = HashEncoderConfig::for_target_resolution(32);
    auto tables = HashTables<double>::init(cfg, 5);
    std::vector<double> a(cfg.output_dim()), b(cfg.output_dim());
    double inside[3] = {0.0, 1.0, 0.5}, outside[3] = {-0.3, 1.7, 0.5};
    encode_hash(tables, inside, a.data());
    encode_hash(tables, outside, b.data());
    for (int i = 0; i < cfg.output_dim(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("table init is deterministic in the seed and small in magnitude") {
    HashEncoderConfig cfg = HashEncoderConfig::for_target_resolution(64);
    auto a = HashTables<float>::init(cfg, 42);
    auto b = HashTables<float>::init(cfg, 42);
    auto c = HashTables<float>::init(cfg, 43);
    CHECK(a.levels == b.levels);
    CHECK(a.levels != c.levels);
    float lo = 0, hi = 0;
    for (auto& lvl : a.levels)
        for (float v : lvl) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    CHECK(lo >= -1e-4f);
    CHECK(hi <= 1e-4f);
    CHECK(lo < 0);
    CHECK(hi > 0);
}

TEST_CASE("backward: zero upstream leaves gradients at zero") {
    HashEncoderConfig cfg = HashEncoderConfig::for_target_resolution(32);
    auto tables = HashTables<double>::init(cfg, 6);
    auto grads = tables.zero_like();
    std::vector<double> up(cfg.output_dim(), 0.0);
    double p[3] = {0.3, 0.6, 0.9};
    encode_hash_backward(tables, p, up.data(), grads);
    for (auto& lvl : grads)
        for (double g : lvl) CHECK(g == 0.0);
}

TEST_CASE("backward: gradient at a corner point hits exactly one row per level") {
    HashEncoderConfig cfg;
    cfg.levels = 2;
    cfg.base_resolution = 4;
    cfg.growth_factor = 2.0;
    auto tables = HashTables<double>::init(cfg, 7);
    auto grads = tables.zero_like();
    std::vector<double> up(cfg.output_dim(), 1.0);
    double p[3] = {0.5, 0.5, 0.5};  // a corner on both 4^3 and 8^3 grids
    encode_hash_backward(tables, p, up.data(), grads);
    for (size_t l = 0; l < grads.size(); ++l) {
        int nonzero = 0;
        double total = 0;
        for (double g : grads[l]) {
            if (g != 0) ++nonzero;
            total += g;
        }
        CHECK(nonzero == 2);  // both features of the single active row
        CHECK(total == doctest::Approx(2.0));
    }
}

TEST_CASE("backward matches finite differences of the encoding") {
    HashEncoderConfig cfg = HashEncoderConfig::for_target_resolution(48);
    auto tables = HashTables<double>::init(cfg, 8);
    double p[3] = {0.37, 0.52, 0.81};
    std::vector<double> up(cfg.output_dim());
    uint64_t key = 13;
    for (int i = 0; i < cfg.output_dim(); ++i) up[i] = rng_uniform(key, i) * 2 - 1;

    auto grads = tables.zero_like();
    encode_hash_backward(tables, p, up.data(), grads);

    // loss = sum_i up[i] * encode(p)[i]; probe a handful of touched rows
    std::vector<double> out(cfg.output_dim());
    auto loss = [&] {
        encode_hash(tables, p, out.data());
        double s = 0;
        for (int i = 0; i < cfg.output_dim(); ++i) s += up[i] * out[i];
        return s;
    };
    int probed = 0;
    const double h = 1e-6;
    for (int l = 0; l < cfg.levels && probed < 40; ++l)
        for (size_t j = 0; j < grads[l].size() && probed < 40; ++j) {
            if (grads[l][j] == 0) continue;
            double saved = tables.levels[l][j];
            tables.levels[l][j] = saved + h;
            double lp = loss();
            tables.levels[l][j] = saved - h;
            double lm = loss();
            tables.levels[l][j] = saved;
            double fd = (lp - lm) / (2 * h);
            CHECK(grads[l][j] == doctest::Approx(fd).epsilon(1e-3));
            ++probed;
        }
    CHECK(probed >= 30);
}

TEST_CASE("frequency encoder: known values and output length") {
    double p[3] = {0.0, 0.5, 1.0};
    std::vector<double> out(60);
    encode_frequency(p, 10, out.data());
    // band 0: sin(pi p), cos(pi p)
    CHECK(out[0] == doctest::Approx(0.0));                // sin(0)
    CHECK(out[1] == doctest::Approx(1.0));                // sin(pi/2)
    CHECK(out[2] == doctest::Approx(0.0).epsilon(1e-9));  // sin(pi)
    CHECK(out[3] == doctest::Approx(1.0));                // cos(0)
    CHECK(out[4] == doctest::Approx(0.0).epsilon(1e-9));  // cos(pi/2)
    CHECK(out[5] == doctest::Approx(-1.0));               // cos(pi)
    // band 2: sin(4 pi * 0.5) = 0, cos(4 pi * 0.5) = 1
    CHECK(out[2 * 6 + 1] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(out[2 * 6 + 4] == doctest::Approx(1.0));
}

TEST_CASE("property: encoding is bitwise deterministic") {
    HashEncoderConfig cfg = HashEncoderConfig::for_target_resolution(64);
    auto tables = HashTables<float>::init(cfg, 21);
    uint64_t key = 17;
    std::vector<float> a(cfg.output_dim()), b(cfg.output_dim());
    for (int i = 0; i < 150; ++i) {
        float p[3] = {float(rng_uniform(key, 3 * i)), float(rng_uniform(key, 3 * i + 1)),
                      float(rng_uniform(key, 3 * i + 2))};
        encode_hash(tables, p, a.data());
        encode_hash(tables, p, b.data());
        CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0);
    }
}

TEST_CASE("property: per-level interpolation weights sum to one") {
    HashEncoderConfig cfg = HashEncoderConfig::for_target_resolution(64);
    // constant tables: every encode output must equal that constant
    auto tables = HashTables<double>::init(cfg, 0);
    for (auto& lvl : tables.levels)
        for (double& v : lvl) v = 0.625;
    uint64_t key = 19;
    std::vector<double> out(cfg.output_dim());
    for (int i = 0; i < 150; ++i) {
        double p[3] = {rng_uniform(key, 3 * i), rng_uniform(key, 3 * i + 1),
                       rng_uniform(key, 3 * i + 2)};
        encode_hash(tables, p, out.data());
        for (double v : out) CHECK(v == doctest::Approx(0.625));
    }
}
