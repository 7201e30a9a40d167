#include "naf/metrics.hpp"

#include <algorithm>

namespace naf {

namespace {

void check_dims(const Volume& a, const Volume& b) {
    if (a.nx != b.nx || a.ny != b.ny || a.nz != b.nz)
        throw ValidationError("metrics: volume shape mismatch");
}

std::vector<double> gaussian_kernel(int window, double sigma) {
    std::vector<double> k(window);
    int r = window / 2;
    double sum = 0;
    for (int i = 0; i < window; ++i) {
        double d = i - r;
        k[i] = std::exp(-d * d / (2 * sigma * sigma));
        sum += k[i];
    }
    for (double& v : k) v /= sum;
    return k;
}

// SSIM over one 2D slice, valid-window centers only.
double ssim_2d(const float* a, const float* b, int w, int h,
               const SsimParams& p) {
    if (w < p.window || h < p.window)
        throw ValidationError("ssim: slice smaller than the window");
    std::vector<double> kern = gaussian_kernel(p.window, p.sigma);
    int r = p.window / 2;
    double c1 = (p.k1 * p.data_range) * (p.k1 * p.data_range);
    double c2 = (p.k2 * p.data_range) * (p.k2 * p.data_range);

    double total = 0;
    long count = 0;
    for (int y = r; y < h - r; ++y)
        for (int x = r; x < w - r; ++x) {
            double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
            for (int dy = -r; dy <= r; ++dy)
                for (int dx = -r; dx <= r; ++dx) {
                    double wgt = kern[dy + r] * kern[dx + r];
                    double va = a[(y + dy) * w + (x + dx)];
                    double vb = b[(y + dy) * w + (x + dx)];
                    ma += wgt * va;
                    mb += wgt * vb;
                    saa += wgt * va * va;
                    sbb += wgt * vb * vb;
                    sab += wgt * va * vb;
                }
            double var_a = saa - ma * ma;
            double var_b = sbb - mb * mb;
            double cov = sab - ma * mb;
            double num = (2 * ma * mb + c1) * (2 * cov + c2);
            double den = (ma * ma + mb * mb + c1) * (var_a + var_b + c2);
            total += num / den;
            ++count;
        }
    return total / double(count);
}

// copy slice `idx` along `axis` into a contiguous 2D image
void extract_slice(const Volume& v, int axis, int idx, std::vector<float>& out,
                   int& w, int& h) {
    switch (axis) {
        case 0: w = v.ny; h = v.nz; break;
        case 1: w = v.nx; h = v.nz; break;
        case 2: w = v.nx; h = v.ny; break;
        default: throw ValidationError("metrics: axis must be 0, 1 or 2");
    }
    out.resize(size_t(w) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            float val;
            if (axis == 0) val = v.at(idx, x, y);
            else if (axis == 1) val = v.at(x, idx, y);
            else val = v.at(x, y, idx);
            out[size_t(y) * w + x] = val;
        }
}

double mse(const float* a, const float* b, size_t n) {
    double acc = 0;
    for (size_t i = 0; i < n; ++i) {
        double d = double(a[i]) - double(b[i]);
        acc += d * d;
    }
    return acc / double(n);
}

double psnr_from_mse(double m, double range) {
    if (m <= 0) return 99.0;
    return std::min(99.0, 10.0 * std::log10(range * range / m));
}

}  // namespace

double psnr(const Volume& a, const Volume& b, double data_range) {
    check_dims(a, b);
    if (!(data_range > 0)) throw ValidationError("psnr: data_range must be > 0");
    return psnr_from_mse(mse(a.data.data(), b.data.data(), a.data.size()), data_range);
}

double ssim(const Volume& a, const Volume& b, const SsimParams& params) {
    check_dims(a, b);
    double total = 0;
#pragma omp parallel for schedule(static) reduction(+ : total)
    for (int k = 0; k < a.nz; ++k) {
        std::vector<float> sa, sb;
        int w, h;
        extract_slice(a, 2, k, sa, w, h);
        extract_slice(b, 2, k, sb, w, h);
        total += ssim_2d(sa.data(), sb.data(), w, h, params);
    }
    return total / a.nz;
}

void per_slice_curves(const Volume& a, const Volume& b, int axis,
                      std::vector<double>& out_psnr, std::vector<double>& out_ssim,
                      const SsimParams& params) {
    check_dims(a, b);
    int count = axis == 0 ? a.nx : (axis == 1 ? a.ny : a.nz);
    out_psnr.resize(count);
    out_ssim.resize(count);
#pragma omp parallel for schedule(static)
    for (int s = 0; s < count; ++s) {
        std::vector<float> sa, sb;
        int w, h;
        extract_slice(a, axis, s, sa, w, h);
        extract_slice(b, axis, s, sb, w, h);
        out_psnr[s] = psnr_from_mse(mse(sa.data(), sb.data(), sa.size()),
                                    params.data_range);
        out_ssim[s] = ssim_2d(sa.data(), sb.data(), w, h, params);
    }
}

MetricReport evaluate_volumes(const Volume& recon, const Volume& truth,
                              int slice_axis) {
    Volume a = recon, b = truth;
    normalize_minmax(a);
    normalize_minmax(b);
    MetricReport rep;
    rep.psnr_db = psnr(a, b, 1.0);
    rep.ssim = ssim(a, b);
    rep.slice_axis = slice_axis;
    per_slice_curves(a, b, slice_axis, rep.per_slice_psnr, rep.per_slice_ssim);
    return rep;
}

}  // namespace naf
