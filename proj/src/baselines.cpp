#include "naf/baselines.hpp"

#include <fftw3.h>
#include <omp.h>

#include <algorithm>

namespace naf {

namespace {

// corner weights of the cell-centered trilinear stencil at world point p
template <class Fn>
inline void for_each_voxel_weight(const Volume& vol, const Vec3& p, Fn&& fn) {
    if (!vol.extent.contains(p)) return;
    Vec3 sp = vol.spacing();
    double fx = (p.x - vol.extent.lo.x) / sp.x - 0.5;
    double fy = (p.y - vol.extent.lo.y) / sp.y - 0.5;
    double fz = (p.z - vol.extent.lo.z) / sp.z - 0.5;
    int i0 = int(std::floor(fx)), j0 = int(std::floor(fy)), k0 = int(std::floor(fz));
    double wx = fx - i0, wy = fy - j0, wz = fz - k0;
    for (int c = 0; c < 8; ++c) {
        int i = i0 + (c & 1), j = j0 + ((c >> 1) & 1), k = k0 + ((c >> 2) & 1);
        if (i < 0 || j < 0 || k < 0 || i >= vol.nx || j >= vol.ny || k >= vol.nz)
            continue;
        double w = ((c & 1) ? wx : 1 - wx) * ((c & 2) ? wy : 1 - wy) *
                   ((c & 4) ? wz : 1 - wz);
        fn(vol.index(i, j, k), w);
    }
}

}  // namespace

Volume fdk_reconstruct(const ProjectionSet& proj, int nx, int ny, int nz,
                       const FdkConfig& config, bool raw) {
    config.validate();
    proj.validate();
    const ScanGeometry& g = proj.geometry;
    if (g.num_views < 2) throw ValidationError("fdk: need at least 2 views");

    ProjectionSet li = proj.to_line_integral();
    const int rows = g.detector_rows, cols = g.detector_cols;
    const double tau = g.pixel_pitch_u;

    // cosine pre-weighting
    for (int view = 0; view < g.num_views; ++view)
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) {
                double u = (c - (cols - 1) * 0.5) * g.pixel_pitch_u;
                double v = (r - (rows - 1) * 0.5) * g.pixel_pitch_v;
                li.at(view, r, c) *=
                    float(g.dsd / std::sqrt(g.dsd * g.dsd + u * u + v * v));
            }

    // frequency response of the band-limited ramp kernel
    const int P = config.padding_factor * cols;
    std::vector<double> kernel(P, 0.0);
    kernel[0] = 1.0 / (4.0 * tau * tau);
    for (int n = 1; n <= P / 2; ++n) {
        if (n % 2 == 1) {
            double v = -1.0 / (M_PI * M_PI * n * n * tau * tau);
            kernel[n] = v;
            kernel[P - n] = v;
        }
    }
    std::vector<fftw_complex> kernel_f(P / 2 + 1), row_f(P / 2 + 1);
    std::vector<double> buf(P);
    fftw_plan fwd = fftw_plan_dft_r2c_1d(P, buf.data(), kernel_f.data(), FFTW_ESTIMATE);
    std::copy(kernel.begin(), kernel.end(), buf.begin());
    fftw_execute(fwd);
    std::vector<double> ramp(P / 2 + 1);
    for (int k = 0; k <= P / 2; ++k) {
        ramp[k] = kernel_f[k][0];
        if (config.filter == FdkConfig::Filter::hann)
            ramp[k] *= 0.5 * (1.0 + std::cos(M_PI * k / double(P / 2)));
    }

    // row-wise filtering via the frequency domain
    fftw_plan fwd_row =
        fftw_plan_dft_r2c_1d(P, buf.data(), row_f.data(), FFTW_ESTIMATE);
    fftw_plan inv_row =
        fftw_plan_dft_c2r_1d(P, row_f.data(), buf.data(), FFTW_ESTIMATE);
    for (int view = 0; view < g.num_views; ++view)
        for (int r = 0; r < rows; ++r) {
            std::fill(buf.begin(), buf.end(), 0.0);
            for (int c = 0; c < cols; ++c) buf[c] = li.at(view, r, c);
            fftw_execute(fwd_row);
            for (int k = 0; k <= P / 2; ++k) {
                row_f[k][0] *= ramp[k] / P;
                row_f[k][1] *= ramp[k] / P;
            }
            fftw_execute(inv_row);
            for (int c = 0; c < cols; ++c) li.at(view, r, c) = float(buf[c] * tau);
        }
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(fwd_row);
    fftw_destroy_plan(inv_row);

    // distance-weighted backprojection
    Volume vol(nx, ny, nz, g.volume_extent);
    std::vector<double> angles = view_angles(g);
    double dbeta = (g.angle_end - g.angle_start) / g.num_views;
#pragma omp parallel for collapse(2) schedule(static)
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                Vec3 p = vol.voxel_center(i, j, k);
                double acc = 0;
                for (int view = 0; view < g.num_views; ++view) {
                    Vec3 s = rotate_z(p, -angles[view]);
                    double bigu = g.dso - s.x;
                    if (bigu <= 1e-6) continue;
                    double u = s.y * g.dsd / bigu;
                    double v = s.z * g.dsd / bigu;
                    double fc = u / g.pixel_pitch_u + (cols - 1) * 0.5;
                    double fr = v / g.pixel_pitch_v + (rows - 1) * 0.5;
                    int c0 = int(std::floor(fc)), r0 = int(std::floor(fr));
                    if (c0 < 0 || r0 < 0 || c0 + 1 >= cols || r0 + 1 >= rows) continue;
                    double wc = fc - c0, wr = fr - r0;
                    double val = (1 - wr) * ((1 - wc) * li.at(view, r0, c0) +
                                             wc * li.at(view, r0, c0 + 1)) +
                                 wr * ((1 - wc) * li.at(view, r0 + 1, c0) +
                                       wc * li.at(view, r0 + 1, c0 + 1));
                    acc += (g.dso * g.dso) / (bigu * bigu) * val;
                }
                vol.at(i, j, k) = float(0.5 * dbeta * acc);
            }

    if (!raw) {
        for (float& v : vol.data) v = std::max(v, 0.0f);
        normalize_minmax(vol);
    }
    return vol;
}

Volume sart_reconstruct(const ProjectionSet& proj, int nx, int ny, int nz,
                        const SartConfig& config, const Volume* initial) {
    config.validate();
    proj.validate();
    const ScanGeometry& g = proj.geometry;
    ProjectionSet li = proj.to_line_integral();
    const int rows = g.detector_rows, cols = g.detector_cols;
    int samples = config.samples_per_ray > 0 ? config.samples_per_ray
                                             : (3 * std::max({nx, ny, nz})) / 2;

    Volume vol = initial ? *initial : Volume(nx, ny, nz, g.volume_extent);
    std::vector<double> angles = view_angles(g);
    double length_unit = g.volume_extent.max_side();

    size_t nvox = vol.data.size();
    int nthreads = omp_get_max_threads();
    std::vector<std::vector<double>> num_buf(nthreads), den_buf(nthreads);
    for (int t = 0; t < nthreads; ++t) {
        num_buf[t].assign(nvox, 0.0);
        den_buf[t].assign(nvox, 0.0);
    }

    double min_residual = std::numeric_limits<double>::max();
    for (int sweep = 0; sweep < config.iterations; ++sweep) {
        double sweep_residual2 = 0;
        for (int view = 0; view < g.num_views; ++view) {
            for (int t = 0; t < nthreads; ++t) {
                std::fill(num_buf[t].begin(), num_buf[t].end(), 0.0);
                std::fill(den_buf[t].begin(), den_buf[t].end(), 0.0);
            }
            double view_residual2 = 0;
#pragma omp parallel reduction(+ : view_residual2)
            {
                int t = omp_get_thread_num();
                std::vector<double>& num = num_buf[t];
                std::vector<double>& den = den_buf[t];
#pragma omp for collapse(2) schedule(static)
                for (int r = 0; r < rows; ++r)
                    for (int c = 0; c < cols; ++c) {
                        Ray ray = pixel_ray(g, angles[view], r, c);
                        if (!ray.hit) continue;
                        double dt = (ray.t_far - ray.t_near) / samples;
                        double delta = dt / length_unit;
                        double pred = 0, length = 0;
                        for (int s = 0; s < samples; ++s) {
                            double tpar = ray.t_near + (s + 0.5) * dt;
                            Vec3 p = ray.origin + ray.direction * tpar;
                            pred += vol.sample(p) * delta;
                            if (vol.extent.contains(p)) length += delta;
                        }
                        if (length <= 0) continue;
                        double residual = li.at(view, r, c) - pred;
                        view_residual2 += residual * residual;
                        double factor = residual / length;
                        for (int s = 0; s < samples; ++s) {
                            double tpar = ray.t_near + (s + 0.5) * dt;
                            Vec3 p = ray.origin + ray.direction * tpar;
                            for_each_voxel_weight(vol, p, [&](size_t idx, double w) {
                                num[idx] += w * delta * factor;
                                den[idx] += w * delta;
                            });
                        }
                    }
            }
#pragma omp parallel for schedule(static)
            for (size_t i = 0; i < nvox; ++i) {
                double n = 0, d = 0;
                for (int t = 0; t < nthreads; ++t) {
                    n += num_buf[t][i];
                    d += den_buf[t][i];
                }
                if (d > 1e-12) {
                    double v = vol.data[i] + config.relaxation * n / d;
                    if (config.positivity) v = std::max(v, 0.0);
                    vol.data[i] = float(v);
                }
            }
            sweep_residual2 += view_residual2;
        }
        double norm = std::sqrt(sweep_residual2);
        min_residual = std::min(min_residual, norm);
        if (norm > 10.0 * min_residual && norm > 1e-12)
            throw ComputeError("sart: divergence detected at sweep " +
                               std::to_string(sweep));
    }
    return vol;
}

}  // namespace naf
