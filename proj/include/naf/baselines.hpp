#pragma once

#include "naf/phantom.hpp"

namespace naf {

struct FdkConfig {
    enum class Filter { ram_lak, hann } filter = Filter::hann;
    int padding_factor = 2;  // power of two; FFT length = factor * detector_cols

    void validate() const {
        if (padding_factor < 1 || (padding_factor & (padding_factor - 1)) != 0)
            throw ValidationError("fdk: padding_factor must be a power of two >= 1");
    }
};

struct SartConfig {
    int iterations = 20;  // full sweeps over all views
    double relaxation = 1.0;
    bool positivity = true;
    int samples_per_ray = 0;  // 0: derived from volume dims

    void validate() const {
        if (!(relaxation >= 0) || relaxation >= 2)
            throw ValidationError("sart: relaxation must be in [0,2)");
        if (iterations < 1) throw ValidationError("sart: iterations must be >= 1");
    }
};

// Feldkamp weighted filtered backprojection. Output clamped to >= 0 and
// min-max normalized. `raw` skips clamp/normalization (the linearity path).
Volume fdk_reconstruct(const ProjectionSet& proj, int nx, int ny, int nz,
                       const FdkConfig& config = {}, bool raw = false);

Volume sart_reconstruct(const ProjectionSet& proj, int nx, int ny, int nz,
                        const SartConfig& config = {},
                        const Volume* initial = nullptr);

}  // namespace naf
