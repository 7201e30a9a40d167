#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "naf/geometry.hpp"

using namespace naf;

namespace {

// Monte-Carlo containment oracle: a ray hits the box iff some point along it
// lies inside.
bool hits_box_oracle(const Vec3& o, const Vec3& d, const Aabb& box) {
    for (int i = 0; i < 40000; ++i) {
        double t = 1e-3 + 12.0 * i / 40000.0;
        if (box.contains(o + d * t)) return true;
    }
    return false;
}

Vec3 random_unit(uint64_t key, uint64_t i) {
    double z = rng_uniform(key, 3 * i) * 2 - 1;
    double phi = rng_uniform(key, 3 * i + 1) * 2 * M_PI;
    double r = std::sqrt(std::max(0.0, 1 - z * z));
    return {r * std::cos(phi), r * std::sin(phi), z};
}

}  // namespace

TEST_CASE("view angles are equally spaced starting at angle_start") {
    ScanGeometry g = ScanGeometry::desk_default(50);
    auto angles = view_angles(g);
    REQUIRE(angles.size() == 50);
    CHECK(angles[0] == doctest::Approx(0.0));
    for (size_t i = 1; i < angles.size(); ++i)
        CHECK(angles[i] - angles[i - 1] == doctest::Approx(M_PI / 50));
    // last angle stays below angle_end (half-open interval)
    CHECK(angles.back() < g.angle_end);
}

TEST_CASE("single view schedule") {
    ScanGeometry g = ScanGeometry::desk_default(1);
    g.angle_start = 0.7;
    auto angles = view_angles(g);
    REQUIRE(angles.size() == 1);
    CHECK(angles[0] == doctest::Approx(0.7));
}

TEST_CASE("aorta-style schedule spans -103 to 93 degrees") {
    ScanGeometry g = ScanGeometry::desk_default(50);
    g.angle_start = -103.0 * M_PI / 180.0;
    g.angle_end = 93.0 * M_PI / 180.0;
    auto angles = view_angles(g);
    REQUIRE(angles.size() == 50);
    CHECK(angles[0] == doctest::Approx(-103.0 * M_PI / 180.0));
    CHECK(angles.back() < 93.0 * M_PI / 180.0);
    CHECK(angles[1] - angles[0] == doctest::Approx(196.0 * M_PI / 180.0 / 50));
}

TEST_CASE("geometry validation rejects bad parameters") {
    ScanGeometry g = ScanGeometry::desk_default();
    g.dsd = g.dso - 1;
    CHECK_THROWS_AS(g.validate(), ValidationError);
    g = ScanGeometry::desk_default();
    g.volume_extent = Aabb::centered_cube(3000.0);  // outside the dso sphere
    CHECK_THROWS_AS(g.validate(), ValidationError);
}

TEST_CASE("central pixel ray passes through the origin at distance dso") {
    ScanGeometry g = ScanGeometry::desk_default();  // 128^2 detector, odd center n/a
    g.detector_rows = 129;
    g.detector_cols = 129;
    for (double angle : {0.0, 0.9, 2.5}) {
        Ray r = pixel_ray(g, angle, 64, 64);
        REQUIRE(r.hit);
        CHECK(r.origin.norm() == doctest::Approx(g.dso));
        // closest approach to origin is ~0
        double t = -r.origin.dot(r.direction);
        CHECK((r.origin + r.direction * t).norm() == doctest::Approx(0.0).epsilon(1e-9));
    }
}

TEST_CASE("central rays at angle 0 and pi are opposite") {
    ScanGeometry g = ScanGeometry::desk_default();
    g.detector_rows = 129;
    g.detector_cols = 129;
    Ray a = pixel_ray(g, 0.0, 64, 64);
    Ray b = pixel_ray(g, M_PI, 64, 64);
    CHECK(a.direction.x == doctest::Approx(-b.direction.x));
    CHECK(a.direction.y == doctest::Approx(-b.direction.y));
    CHECK(a.direction.z == doctest::Approx(-b.direction.z));
}

TEST_CASE("corner pixel of an oversized detector misses the volume") {
    ScanGeometry g = ScanGeometry::desk_default();
    g.pixel_pitch_u = 20.0;
    g.pixel_pitch_v = 20.0;
    Ray r = pixel_ray(g, 0.3, 0, 0);
    CHECK_FALSE(r.hit);
    // oracle agrees
    CHECK_FALSE(hits_box_oracle(r.origin * (1.0 / 2000.0), r.direction,
                                Aabb::centered_cube(100.0 / 2000.0)));
}

TEST_CASE("slab test: analytic example") {
    auto hit = intersect_aabb({-2, 0, 0}, {1, 0, 0}, Aabb::centered_cube(2.0));
    REQUIRE(hit.has_value());
    CHECK(hit->first == doctest::Approx(1.0));
    CHECK(hit->second == doctest::Approx(3.0));
}

TEST_CASE("slab test: tangent ray counts as miss") {
    // grazes the top face y = 1
    auto hit = intersect_aabb({-2, 1, 0}, {1, 0, 0}, Aabb{{-1, -1, -1}, {1, 1, 1}});
    CHECK_FALSE(hit.has_value());
}

TEST_CASE("slab test: axis-parallel rays have no division blowup") {
    Aabb box{{-1, -1, -1}, {1, 1, 1}};
    auto hit = intersect_aabb({0, 0, -5}, {0, 0, 1}, box);
    REQUIRE(hit.has_value());
    CHECK(hit->first == doctest::Approx(4.0));
    CHECK_FALSE(intersect_aabb({2, 0, -5}, {0, 0, 1}, box).has_value());
}

TEST_CASE("slab test agrees with a Monte-Carlo containment oracle") {
    Aabb box{{-1, -1, -1}, {1, 1, 1}};
    uint64_t key = 42;
    int checked = 0;
    for (int i = 0; i < 300; ++i) {
        Vec3 o{rng_uniform(key, 10 * i) * 6 - 3, rng_uniform(key, 10 * i + 1) * 6 - 3,
               rng_uniform(key, 10 * i + 2) * 6 - 3};
        if (box.contains(o)) continue;
        Vec3 d = random_unit(key ^ 7, i);
        auto hit = intersect_aabb(o, d, box);
        bool forward_hit = hit.has_value() && hit->second > 0;
        bool oracle = hits_box_oracle(o, d, box);
        // the dense-sampling oracle can miss grazing hits; skip near-tangent rays
        if (hit && hit->second - hit->first < 1e-2) continue;
        CHECK(forward_hit == oracle);
        ++checked;
    }
    CHECK(checked > 100);
}

TEST_CASE("property: pixel rays have unit direction") {
    ScanGeometry g = ScanGeometry::desk_default();
    uint64_t key = 7;
    for (int i = 0; i < 200; ++i) {
        double angle = rng_uniform(key, 3 * i) * 2 * M_PI;
        int row = int(rng_uniform(key, 3 * i + 1) * g.detector_rows);
        int col = int(rng_uniform(key, 3 * i + 2) * g.detector_cols);
        Ray r = pixel_ray(g, angle, row, col);
        CHECK(std::abs(r.direction.norm() - 1.0) < 1e-6);
        if (r.hit) CHECK(r.t_near < r.t_far);
    }
}

TEST_CASE("property: rotation equivariance of pixel rays") {
    ScanGeometry g = ScanGeometry::desk_default();
    uint64_t key = 99;
    for (int i = 0; i < 100; ++i) {
        double angle = rng_uniform(key, 4 * i) * 2 * M_PI;
        double delta = rng_uniform(key, 4 * i + 1) * 2 * M_PI;
        int row = int(rng_uniform(key, 4 * i + 2) * g.detector_rows);
        int col = int(rng_uniform(key, 4 * i + 3) * g.detector_cols);
        Ray a = pixel_ray(g, angle + delta, row, col);
        Ray b = pixel_ray(g, angle, row, col);
        Vec3 ro = rotate_z(b.origin, delta), rd = rotate_z(b.direction, delta);
        CHECK((a.origin - ro).norm() < 1e-9 * g.dso);
        CHECK((a.direction - rd).norm() < 1e-9);
    }
}

TEST_CASE("property: hit count is angle-invariant for a centered cube") {
    ScanGeometry g = ScanGeometry::desk_default();
    auto count_hits = [&](double angle) {
        int hits = 0;
        for (int r = 0; r < g.detector_rows; ++r)
            for (int c = 0; c < g.detector_cols; ++c)
                if (pixel_ray(g, angle, r, c).hit) ++hits;
        return hits;
    };
    // a cube's silhouette is invariant only at its own symmetry angles; the
    // count at intermediate angles legitimately grows (wider diagonal profile)
    int base = count_hits(0.0);
    for (double angle : {M_PI / 2, M_PI, 3 * M_PI / 2, 2 * M_PI})
        CHECK(std::abs(count_hits(angle) - base) <= g.detector_rows);
    CHECK(count_hits(M_PI / 4) >= base);
}
