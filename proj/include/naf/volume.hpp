#pragma once

#include <vector>

#include "naf/common.hpp"

namespace naf {

// Dense scalar grid, x-fastest layout, values are normalized attenuation
// coefficients in [0, 1].
struct Volume {
    std::vector<float> data;
    int nx = 0, ny = 0, nz = 0;
    Aabb extent;

    Volume() = default;
    Volume(int nx_, int ny_, int nz_, const Aabb& ext)
        : data(size_t(nx_) * ny_ * nz_, 0.0f), nx(nx_), ny(ny_), nz(nz_), extent(ext) {}

    size_t index(int i, int j, int k) const {
        return size_t(i) + size_t(nx) * (size_t(j) + size_t(ny) * k);
    }
    float& at(int i, int j, int k) { return data[index(i, j, k)]; }
    float at(int i, int j, int k) const { return data[index(i, j, k)]; }

    Vec3 spacing() const {
        Vec3 s = extent.size();
        return {s.x / nx, s.y / ny, s.z / nz};
    }
    Vec3 voxel_center(int i, int j, int k) const {
        Vec3 sp = spacing();
        return {extent.lo.x + (i + 0.5) * sp.x, extent.lo.y + (j + 0.5) * sp.y,
                extent.lo.z + (k + 0.5) * sp.z};
    }

    // Trilinear lookup at a world point; zero outside the extent.
    double sample(const Vec3& p) const;

    void validate() const;
};

// In-place min-max normalization to [0,1]; a constant volume maps to all zeros.
void normalize_minmax(Volume& vol);

}  // namespace naf
