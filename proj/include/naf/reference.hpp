#pragma once

#include "naf/model.hpp"
#include "naf/phantom.hpp"

namespace naf::ref {

// Plain serial implementations of the parallel kernels, kept as a comparison
// baseline for tests and the kernel benchmark.

ProjectionSet project_volume_serial(const Volume& vol, const ScanGeometry& geom,
                                    int samples_per_ray);

Volume extract_volume_serial(const FieldModel<float>& model, int nx, int ny, int nz,
                             const Aabb& extent);

}  // namespace naf::ref
