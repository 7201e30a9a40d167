#pragma once

#include "naf/volume.hpp"

namespace naf {

struct SsimParams {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01, k2 = 0.03;
    double data_range = 1.0;
};

struct MetricReport {
    double psnr_db = 0;
    double ssim = 0;
    double data_range = 1.0;
    std::string normalization = "minmax";
    std::vector<double> per_slice_psnr;
    std::vector<double> per_slice_ssim;
    int slice_axis = 2;
};

// 10*log10(range^2 / MSE), capped at 99 dB for identical inputs.
double psnr(const Volume& a, const Volume& b, double data_range = 1.0);

// Mean over axial (z) slices of 2D SSIM with a Gaussian window.
double ssim(const Volume& a, const Volume& b, const SsimParams& params = {});

// One PSNR/SSIM value per slice along the chosen axis (0=x, 1=y, 2=z).
void per_slice_curves(const Volume& a, const Volume& b, int axis,
                      std::vector<double>& out_psnr, std::vector<double>& out_ssim,
                      const SsimParams& params = {});

MetricReport evaluate_volumes(const Volume& recon, const Volume& truth,
                              int slice_axis = 2);

}  // namespace naf
