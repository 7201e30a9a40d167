#include "naf/geometry.hpp"

namespace naf {

void ScanGeometry::validate() const {
    if (!(dso > 0) || !(dsd > dso))
        throw ValidationError("geometry: require dsd > dso > 0");
    if (detector_rows < 1 || detector_cols < 1)
        throw ValidationError("geometry: detector dims must be >= 1");
    if (!(pixel_pitch_u > 0) || !(pixel_pitch_v > 0))
        throw ValidationError("geometry: pixel pitches must be > 0");
    if (num_views < 1) throw ValidationError("geometry: num_views must be >= 1");
    // every voxel must stay between source and detector at all angles
    Vec3 lo = volume_extent.lo, hi = volume_extent.hi;
    double r = 0;
    for (int corner = 0; corner < 8; ++corner) {
        Vec3 p{(corner & 1) ? hi.x : lo.x, (corner & 2) ? hi.y : lo.y,
               (corner & 4) ? hi.z : lo.z};
        r = std::max(r, p.norm());
    }
    if (r >= dso)
        throw ValidationError("geometry: volume_extent not inside the dso sphere");
}

ScanGeometry ScanGeometry::desk_default(int num_views, double extent_mm, int detector) {
    ScanGeometry g;
    g.num_views = num_views;
    g.detector_rows = detector;
    g.detector_cols = detector;
    g.volume_extent = Aabb::centered_cube(extent_mm);
    double magnification = g.dsd / g.dso;
    double half_span = 1.1 * (extent_mm * 0.5) * magnification;
    g.pixel_pitch_u = 2.0 * half_span / detector;
    g.pixel_pitch_v = g.pixel_pitch_u;
    g.validate();
    return g;
}

uint64_t ScanGeometry::fingerprint() const {
    double fields[] = {dso,
                       dsd,
                       double(detector_rows),
                       double(detector_cols),
                       pixel_pitch_u,
                       pixel_pitch_v,
                       angle_start,
                       angle_end,
                       double(num_views),
                       volume_extent.lo.x,
                       volume_extent.lo.y,
                       volume_extent.lo.z,
                       volume_extent.hi.x,
                       volume_extent.hi.y,
                       volume_extent.hi.z};
    return fnv1a(fields, sizeof(fields));
}

std::vector<double> view_angles(const ScanGeometry& geom) {
    std::vector<double> angles(geom.num_views);
    double spacing = (geom.angle_end - geom.angle_start) / geom.num_views;
    for (int i = 0; i < geom.num_views; ++i)
        angles[i] = geom.angle_start + i * spacing;
    return angles;
}

std::optional<std::pair<double, double>> intersect_aabb(const Vec3& origin,
                                                        const Vec3& direction,
                                                        const Aabb& box) {
    double t0 = -std::numeric_limits<double>::infinity();
    double t1 = std::numeric_limits<double>::infinity();
    for (int axis = 0; axis < 3; ++axis) {
        double o = origin[axis], d = direction[axis];
        double lo = box.lo[axis], hi = box.hi[axis];
        if (std::abs(d) < 1e-300) {
            // parallel: outside or grazing the slab boundary is a miss
            if (o <= lo || o >= hi) return std::nullopt;
            continue;
        }
        double ta = (lo - o) / d;
        double tb = (hi - o) / d;
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 >= t1) return std::nullopt;  // tangent counts as miss
    }
    return std::make_pair(t0, t1);
}

Ray pixel_ray(const ScanGeometry& geom, double angle, int row, int col) {
    // view frame: source on +x at dso, detector plane at x = dso - dsd
    double u = (col - (geom.detector_cols - 1) * 0.5) * geom.pixel_pitch_u;
    double v = (row - (geom.detector_rows - 1) * 0.5) * geom.pixel_pitch_v;
    Vec3 source_local{geom.dso, 0, 0};
    Vec3 pixel_local{geom.dso - geom.dsd, u, v};

    Ray ray;
    ray.origin = rotate_z(source_local, angle);
    ray.direction = rotate_z((pixel_local - source_local).normalized(), angle);
    auto span = intersect_aabb(ray.origin, ray.direction, geom.volume_extent);
    if (span && span->second > 0) {
        ray.t_near = std::max(span->first, 0.0);
        ray.t_far = span->second;
        ray.hit = true;
    }
    return ray;
}

}  // namespace naf
