#include "naf/phantom.hpp"

#include <algorithm>

namespace naf {

void ProjectionSet::validate() const {
    geometry.validate();
    size_t expected =
        size_t(geometry.num_views) * geometry.detector_rows * geometry.detector_cols;
    if (images.size() != expected)
        throw ValidationError("projections: image count does not match geometry");
    for (float v : images) {
        if (!std::isfinite(v)) throw ValidationError("projections: non-finite value");
        if (convention == Convention::INTENSITY && (v <= 0.0f || v > 1.0f))
            throw ValidationError("projections: intensity outside (0,1]");
        if (convention == Convention::LINE_INTEGRAL && v < 0.0f)
            throw ValidationError("projections: negative line integral");
    }
}

ProjectionSet ProjectionSet::to_line_integral() const {
    if (convention == Convention::LINE_INTEGRAL) return *this;
    ProjectionSet out = *this;
    out.convention = Convention::LINE_INTEGRAL;
    for (float& v : out.images) v = -std::log(std::max(v, 1e-6f));
    return out;
}

PhantomKind parse_phantom_kind(const std::string& name) {
    if (name == "shepp_logan_3d") return PhantomKind::shepp_logan_3d;
    if (name == "nested_boxes") return PhantomKind::nested_boxes;
    if (name == "uniform_sphere") return PhantomKind::uniform_sphere;
    throw ValidationError("unknown phantom kind: " + name);
}

namespace {

struct Ellipsoid {
    double a, b, c;     // semi-axes (unit-cube coordinates)
    double x0, y0, z0;  // center
    double phi_deg;     // rotation about z
    double value;       // additive intensity
};

// standard ten-ellipsoid 3D Shepp-Logan parameterization
constexpr Ellipsoid kSheppLogan[10] = {
    {0.6900, 0.9200, 0.810, 0.0, 0.0, 0.0, 0.0, 1.0},
    {0.6624, 0.8740, 0.780, 0.0, -0.0184, 0.0, 0.0, -0.8},
    {0.1100, 0.3100, 0.220, 0.22, 0.0, 0.0, -18.0, -0.2},
    {0.1600, 0.4100, 0.280, -0.22, 0.0, 0.0, 18.0, -0.2},
    {0.2100, 0.2500, 0.410, 0.0, 0.35, -0.15, 0.0, 0.1},
    {0.0460, 0.0460, 0.050, 0.0, 0.10, 0.25, 0.0, 0.1},
    {0.0460, 0.0460, 0.050, 0.0, -0.10, 0.25, 0.0, 0.1},
    {0.0460, 0.0230, 0.050, -0.08, -0.605, 0.0, 0.0, 0.1},
    {0.0230, 0.0230, 0.020, 0.0, -0.606, 0.0, 0.0, 0.1},
    {0.0230, 0.0460, 0.020, 0.06, -0.605, 0.0, 0.0, 0.1},
};

double shepp_logan_value(double x, double y, double z) {
    double acc = 0.0;
    for (const Ellipsoid& e : kSheppLogan) {
        double ph = e.phi_deg * M_PI / 180.0;
        double cx = x - e.x0, cy = y - e.y0, cz = z - e.z0;
        double rx = std::cos(ph) * cx + std::sin(ph) * cy;
        double ry = -std::sin(ph) * cx + std::cos(ph) * cy;
        double q = (rx * rx) / (e.a * e.a) + (ry * ry) / (e.b * e.b) +
                   (cz * cz) / (e.c * e.c);
        if (q <= 1.0) acc += e.value;
    }
    return std::clamp(acc, 0.0, 1.0);
}

}  // namespace

Volume make_phantom(PhantomKind kind, int nx, int ny, int nz, const Aabb& extent,
                    const PhantomParams& params) {
    if (kind == PhantomKind::shepp_logan_3d && (nx < 16 || ny < 16 || nz < 16))
        throw ValidationError("shepp_logan_3d requires dims >= 16 per axis");
    Volume vol(nx, ny, nz, extent);
    Vec3 half = extent.size() * 0.5;
    Vec3 center = extent.center();

#pragma omp parallel for collapse(2) schedule(static)
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                Vec3 p = vol.voxel_center(i, j, k);
                // unit-cube coordinates in [-1,1] per axis
                double x = (p.x - center.x) / half.x;
                double y = (p.y - center.y) / half.y;
                double z = (p.z - center.z) / half.z;
                double v = 0.0;
                switch (kind) {
                    case PhantomKind::shepp_logan_3d:
                        v = shepp_logan_value(x, y, z);
                        break;
                    case PhantomKind::uniform_sphere: {
                        double r2 = x * x + y * y + z * z;
                        double rf = params.sphere_radius_frac;
                        v = (r2 <= rf * rf) ? params.sphere_mu : 0.0;
                        break;
                    }
                    case PhantomKind::nested_boxes: {
                        double m = std::max({std::abs(x), std::abs(y), std::abs(z)});
                        v = (m <= 0.3) ? 0.8 : (m <= 0.7 ? 0.4 : 0.0);
                        break;
                    }
                }
                vol.at(i, j, k) = float(v);
            }
    return vol;
}

ProjectionSet project_volume(const Volume& vol, const ScanGeometry& geom,
                             int samples_per_ray) {
    geom.validate();
    if (samples_per_ray < std::max({vol.nx, vol.ny, vol.nz}))
        throw ValidationError("project_volume: samples_per_ray must be >= max(dims)");

    ProjectionSet proj;
    proj.geometry = geom;
    proj.images.assign(
        size_t(geom.num_views) * geom.detector_rows * geom.detector_cols, 1.0f);
    double length_unit = geom.volume_extent.max_side();
    std::vector<double> angles = view_angles(geom);

#pragma omp parallel for collapse(2) schedule(static)
    for (int view = 0; view < geom.num_views; ++view)
        for (int row = 0; row < geom.detector_rows; ++row)
            for (int col = 0; col < geom.detector_cols; ++col) {
                Ray ray = pixel_ray(geom, angles[view], row, col);
                if (!ray.hit) continue;  // stays at I = 1
                double dt = (ray.t_far - ray.t_near) / samples_per_ray;
                double integral = 0.0;
                for (int s = 0; s < samples_per_ray; ++s) {
                    double t = ray.t_near + (s + 0.5) * dt;
                    Vec3 p = ray.origin + ray.direction * t;
                    // closing interval: the last sample only covers half a bin
                    double delta = (s + 1 < samples_per_ray) ? dt : dt * 0.5;
                    integral += vol.sample(p) * delta;
                }
                proj.at(view, row, col) = float(std::exp(-integral / length_unit));
            }
    return proj;
}

ProjectionSet add_noise(const ProjectionSet& proj, double fraction, uint64_t seed) {
    if (fraction < 0) throw ValidationError("add_noise: fraction must be >= 0");
    if (fraction == 0.0) return proj;

    double mean = 0.0;
    for (float v : proj.images) mean += v;
    mean /= double(proj.images.size());
    double sigma = fraction * mean;

    ProjectionSet out = proj;
    out.noise_fraction = fraction;
    out.seed = seed;
    uint64_t key = splitmix64(seed ^ 0x6e6f697365ull);
#pragma omp parallel for schedule(static)
    for (size_t i = 0; i < out.images.size(); ++i) {
        double v = out.images[i] + sigma * rng_normal(key, i);
        out.images[i] = float(std::clamp(v, 1e-6, 1.0));
    }
    return out;
}

}  // namespace naf
