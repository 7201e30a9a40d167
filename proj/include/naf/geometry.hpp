#pragma once

#include <optional>
#include <vector>

#include "naf/common.hpp"

namespace naf {

// Circular-orbit cone-beam scanner with a flat panel centered on the
// source-origin axis. Rotation is about the world z-axis; the angle is the
// source azimuth. All lengths in millimeters.
struct ScanGeometry {
    double dso = 1000.0;  // source to rotation origin
    double dsd = 1500.0;  // source to detector plane
    int detector_rows = 128;
    int detector_cols = 128;
    double pixel_pitch_u = 1.0;  // along the in-plane detector axis
    double pixel_pitch_v = 1.0;  // along world z
    double angle_start = 0.0;
    double angle_end = M_PI;
    int num_views = 50;
    Aabb volume_extent = Aabb::centered_cube(100.0);

    void validate() const;

    // Desk-scale default: the detector over-covers the magnified volume by 10%.
    static ScanGeometry desk_default(int num_views = 50, double extent_mm = 100.0,
                                     int detector = 128);

    uint64_t fingerprint() const;
};

struct Ray {
    Vec3 origin;
    Vec3 direction;  // unit
    double t_near = 0, t_far = 0;
    bool hit = false;
};

std::vector<double> view_angles(const ScanGeometry& geom);

// Slab test. Tangent hits (t_near == t_far) count as misses.
std::optional<std::pair<double, double>> intersect_aabb(const Vec3& origin,
                                                        const Vec3& direction,
                                                        const Aabb& box);

Ray pixel_ray(const ScanGeometry& geom, double angle, int row, int col);

}  // namespace naf
