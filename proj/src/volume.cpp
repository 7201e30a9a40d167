#include "naf/volume.hpp"

#include <algorithm>

namespace naf {

double Volume::sample(const Vec3& p) const {
    Vec3 sp = spacing();
    // continuous voxel coordinates with samples at cell centers
    double fx = (p.x - extent.lo.x) / sp.x - 0.5;
    double fy = (p.y - extent.lo.y) / sp.y - 0.5;
    double fz = (p.z - extent.lo.z) / sp.z - 0.5;
    if (!extent.contains(p)) return 0.0;

    int i0 = int(std::floor(fx)), j0 = int(std::floor(fy)), k0 = int(std::floor(fz));
    double wx = fx - i0, wy = fy - j0, wz = fz - k0;

    double acc = 0.0;
    for (int c = 0; c < 8; ++c) {
        int i = i0 + (c & 1), j = j0 + ((c >> 1) & 1), k = k0 + ((c >> 2) & 1);
        if (i < 0 || j < 0 || k < 0 || i >= nx || j >= ny || k >= nz) continue;
        double w = ((c & 1) ? wx : 1 - wx) * ((c & 2) ? wy : 1 - wy) *
                   ((c & 4) ? wz : 1 - wz);
        acc += w * at(i, j, k);
    }
    return acc;
}

void Volume::validate() const {
    if (nx < 2 || ny < 2 || nz < 2)
        throw ValidationError("volume: dims must be >= 2 on each axis");
    if (data.size() != size_t(nx) * ny * nz)
        throw ValidationError("volume: data size does not match dims");
    for (float v : data)
        if (!std::isfinite(v) || v < 0.0f || v > 1.0f)
            throw ValidationError("volume: values must be finite and in [0,1]");
}

void normalize_minmax(Volume& vol) {
    auto [lo_it, hi_it] = std::minmax_element(vol.data.begin(), vol.data.end());
    float lo = *lo_it, hi = *hi_it;
    if (hi - lo < 1e-12f) {
        std::fill(vol.data.begin(), vol.data.end(), 0.0f);
        return;
    }
    float inv = 1.0f / (hi - lo);
    for (float& v : vol.data) v = (v - lo) * inv;
}

}  // namespace naf
