#pragma once

#include "naf/geometry.hpp"
#include "naf/volume.hpp"

namespace naf {

enum class Convention { INTENSITY, LINE_INTEGRAL };

// Stack of detector images, [view][row][col], x-ray intensities normalized
// by I0 = 1. Path lengths are measured in units of the volume extent's
// longest side, so a unit attenuation coefficient across the whole box gives
// an optical depth near 1.
struct ProjectionSet {
    std::vector<float> images;
    ScanGeometry geometry;
    Convention convention = Convention::INTENSITY;
    double noise_fraction = 0.0;
    uint64_t seed = 0;

    size_t index(int view, int row, int col) const {
        return (size_t(view) * geometry.detector_rows + row) * geometry.detector_cols +
               col;
    }
    float& at(int view, int row, int col) { return images[index(view, row, col)]; }
    float at(int view, int row, int col) const { return images[index(view, row, col)]; }

    void validate() const;

    // p = -ln(I / I0); identity if already LINE_INTEGRAL
    ProjectionSet to_line_integral() const;
};

enum class PhantomKind { shepp_logan_3d, nested_boxes, uniform_sphere };

struct PhantomParams {
    double sphere_mu = 0.5;
    double sphere_radius_frac = 0.8;  // of half-extent
};

PhantomKind parse_phantom_kind(const std::string& name);

Volume make_phantom(PhantomKind kind, int nx, int ny, int nz,
                    const Aabb& extent = Aabb::centered_cube(100.0),
                    const PhantomParams& params = {});

// Beer's-law forward projection with midpoint sampling (no jitter).
ProjectionSet project_volume(const Volume& vol, const ScanGeometry& geom,
                             int samples_per_ray);

ProjectionSet add_noise(const ProjectionSet& proj, double fraction, uint64_t seed);

}  // namespace naf
