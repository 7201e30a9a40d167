#include "naf/trainer.hpp"

#include <omp.h>

#include <chrono>

#include "naf/metrics.hpp"

extern "C" void openblas_set_num_threads(int);

namespace naf {

namespace {

// BLAS calls happen inside OpenMP regions; keep BLAS itself single-threaded.
struct BlasSetup {
    BlasSetup() { openblas_set_num_threads(1); }
};
const BlasSetup blas_setup;

}  // namespace

double lr_at(int iter, const TrainConfig& cfg) {
    if (cfg.iterations <= 1) return cfg.lr_start;
    double frac = double(iter) / double(cfg.iterations - 1);
    if (cfg.lr_shape == TrainConfig::LrShape::exponential)
        return cfg.lr_start * std::pow(cfg.lr_end / cfg.lr_start, frac);
    // 2-step staircase over thirds, landing exactly on both endpoints
    if (frac < 1.0 / 3.0) return cfg.lr_start;
    if (frac < 2.0 / 3.0) return std::sqrt(cfg.lr_start * cfg.lr_end);
    return cfg.lr_end;
}

std::vector<PoolRay> build_ray_pool(const ProjectionSet& proj) {
    if (proj.convention != Convention::INTENSITY)
        throw ValidationError("train: projections must be in INTENSITY convention");
    const ScanGeometry& g = proj.geometry;
    std::vector<double> angles = view_angles(g);
    std::vector<PoolRay> pool;
    pool.reserve(proj.images.size());
    uint32_t id = 0;
    for (int view = 0; view < g.num_views; ++view)
        for (int row = 0; row < g.detector_rows; ++row)
            for (int col = 0; col < g.detector_cols; ++col, ++id) {
                Ray ray = pixel_ray(g, angles[view], row, col);
                if (!ray.hit) continue;
                pool.push_back({ray, proj.at(view, row, col), id});
            }
    return pool;
}

namespace {

struct ThreadWork {
    MlpWork<float> mlp;
    ModelGrads grads;
    std::vector<float> pts;    // S x 3 normalized positions
    std::vector<float> mu;     // per-sample predictions (copy of work.Mu)
    std::vector<float> d_mu;   // per-sample upstream gradients
    std::vector<float> delta;  // per-sample spacings (normalized units)
    SampledRay sampled;
    double loss = 0;
    long bad_ray = -1;
};

void zero_grads(const FieldModel<float>& model, ModelGrads& g) {
    if (g.mlp.w1.empty()) {
        g.mlp = MlpParams<float>::zeros(model.mlp.in_dim, model.mlp.hidden);
        if (model.encoder == EncoderKind::hash) g.tables = model.tables.zero_like();
    } else {
        g.mlp.for_each_array([](std::vector<float>& a) {
            std::fill(a.begin(), a.end(), 0.0f);
        });
        for (auto& t : g.tables) std::fill(t.begin(), t.end(), 0.0f);
    }
}

void accumulate_grads(ModelGrads& dst, const ModelGrads& src) {
    auto add = [](std::vector<float>& a, const std::vector<float>& b) {
        for (size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    };
    add(dst.mlp.w1, src.mlp.w1); add(dst.mlp.b1, src.mlp.b1);
    add(dst.mlp.w2, src.mlp.w2); add(dst.mlp.b2, src.mlp.b2);
    add(dst.mlp.w3, src.mlp.w3); add(dst.mlp.b3, src.mlp.b3);
    add(dst.mlp.w4, src.mlp.w4); add(dst.mlp.b4, src.mlp.b4);
    for (size_t l = 0; l < dst.tables.size(); ++l) add(dst.tables[l], src.tables[l]);
}

// Process a contiguous run of rays through sample -> encode -> MLP ->
// Beer's-law synthesis, then backpropagate. Grads accumulate into tw.grads.
void process_rays(const FieldModel<float>& model, std::span<const PoolRay> rays,
                  const TrainConfig& cfg, uint64_t epoch, ThreadWork& tw) {
    const int n = cfg.samples_per_ray;
    const double length_unit = model.extent.max_side();
    constexpr int kRaysPerChunk = 256;

    for (size_t begin = 0; begin < rays.size(); begin += kRaysPerChunk) {
        size_t count = std::min(size_t(kRaysPerChunk), rays.size() - begin);
        int S = int(count) * n;
        tw.pts.resize(size_t(S) * 3);
        tw.delta.resize(S);
        tw.d_mu.resize(S);

        for (size_t r = 0; r < count; ++r) {
            const PoolRay& pr = rays[begin + r];
            uint64_t key = rng_mix(cfg.seed ^ (epoch * 0x9e3779b9ull), pr.id);
            stratified_sample(pr.ray, n, cfg.jitter, key, tw.sampled, cfg.last_delta);
            for (int i = 0; i < n; ++i) {
                Vec3 p = pr.ray.origin + pr.ray.direction * tw.sampled.t[i];
                model.normalize(p, &tw.pts[(r * n + i) * 3]);
                tw.delta[r * n + i] = float(tw.sampled.delta[i] / length_unit);
            }
        }

        model.forward_batch(tw.pts.data(), S, tw.mlp);

        for (size_t r = 0; r < count; ++r) {
            const float* mu = tw.mlp.Mu.data() + r * n;
            const float* delta = tw.delta.data() + r * n;
            float i_s = synthesize_intensity(mu, delta, n, 1.0f);
            const PoolRay& pr = rays[begin + r];
            double residual = double(i_s) - double(pr.target);
            if (!std::isfinite(residual)) {
                tw.bad_ray = long(pr.id);
                return;
            }
            tw.loss += residual * residual;
            synthesize_backward(delta, n, i_s, float(2.0 * residual),
                                tw.d_mu.data() + r * n);
        }

        model.backward_batch(tw.pts.data(), S, tw.mlp, tw.d_mu.data(), tw.grads.mlp,
                             model.encoder == EncoderKind::hash ? &tw.grads.tables
                                                                : nullptr);
    }
}

double loss_and_grads_impl(const FieldModel<float>& model,
                           std::span<const PoolRay> batch, const TrainConfig& cfg,
                           uint64_t epoch, ModelGrads& grads,
                           std::vector<ThreadWork>& tws) {
    int nthreads = omp_get_max_threads();
    tws.resize(nthreads);
    size_t chunk = (batch.size() + nthreads - 1) / nthreads;

#pragma omp parallel num_threads(nthreads)
    {
        int t = omp_get_thread_num();
        ThreadWork& tw = tws[t];
        zero_grads(model, tw.grads);
        tw.loss = 0;
        tw.bad_ray = -1;
        size_t lo = std::min(size_t(t) * chunk, batch.size());
        size_t hi = std::min(lo + chunk, batch.size());
        process_rays(model, batch.subspan(lo, hi - lo), cfg, epoch, tw);
    }

    // ordered merge keeps results independent of scheduling
    zero_grads(model, grads);
    double loss = 0;
    for (ThreadWork& tw : tws) {
        if (tw.bad_ray >= 0)
            throw ComputeError("non-finite loss at ray " + std::to_string(tw.bad_ray));
        loss += tw.loss;
        accumulate_grads(grads, tw.grads);
    }
    return loss;
}

template <class ParamFn>
void visit_param_arrays(FieldModel<float>& model, ModelGrads& grads, AdamState& st,
                        ParamFn&& fn) {
    size_t idx = 0;
    auto go = [&](std::vector<float>& p, std::vector<float>& g) {
        if (st.m.size() <= idx) {
            st.m.emplace_back(p.size(), 0.0f);
            st.v.emplace_back(p.size(), 0.0f);
        }
        fn(p, g, st.m[idx], st.v[idx]);
        ++idx;
    };
    for (size_t l = 0; l < grads.tables.size(); ++l)
        go(model.tables.levels[l], grads.tables[l]);
    go(model.mlp.w1, grads.mlp.w1); go(model.mlp.b1, grads.mlp.b1);
    go(model.mlp.w2, grads.mlp.w2); go(model.mlp.b2, grads.mlp.b2);
    go(model.mlp.w3, grads.mlp.w3); go(model.mlp.b3, grads.mlp.b3);
    go(model.mlp.w4, grads.mlp.w4); go(model.mlp.b4, grads.mlp.b4);
}

void adam_step(FieldModel<float>& model, ModelGrads& grads, AdamState& st,
               const TrainConfig& cfg, double lr) {
    st.step += 1;
    double bc1 = 1.0 - std::pow(cfg.beta1, double(st.step));
    double bc2 = 1.0 - std::pow(cfg.beta2, double(st.step));
    float b1 = float(cfg.beta1), b2 = float(cfg.beta2);
    // p -= lr * mhat / (sqrt(vhat) + eps)
    visit_param_arrays(model, grads, st,
                       [&](std::vector<float>& p, std::vector<float>& g,
                           std::vector<float>& m, std::vector<float>& v) {
#pragma omp parallel for schedule(static)
                           for (size_t i = 0; i < p.size(); ++i) {
                               float gi = g[i];
                               m[i] = b1 * m[i] + (1 - b1) * gi;
                               v[i] = b2 * v[i] + (1 - b2) * gi * gi;
                               float mhat = m[i] / float(bc1);
                               float vhat = v[i] / float(bc2);
                               p[i] -= float(lr) * mhat /
                                       (std::sqrt(vhat) + float(cfg.adam_eps));
                           }
                       });
}

}  // namespace

double loss_and_grads(const FieldModel<float>& model, std::span<const PoolRay> batch,
                      const TrainConfig& cfg, uint64_t epoch, ModelGrads& grads) {
    std::vector<ThreadWork> tws;
    return loss_and_grads_impl(model, batch, cfg, epoch, grads, tws);
}

TrainResult train(const ProjectionSet& proj, const TrainConfig& cfg,
                  const Volume* ground_truth,
                  const std::function<void(const TraceRow&)>& on_eval) {
    cfg.validate();
    proj.geometry.validate();

    TrainResult res;
    res.config = cfg;
    res.geometry_fingerprint = proj.geometry.fingerprint();
    res.model = FieldModel<float>::create(cfg.encoder, cfg.hash_config, cfg.freq_bands,
                                          proj.geometry.volume_extent, cfg.seed,
                                          cfg.mlp_hidden);
    if (cfg.iterations == 0) return res;

    std::vector<PoolRay> pool = build_ray_pool(proj);
    if (pool.empty()) throw ComputeError("train: no rays hit the volume extent");

    std::vector<PoolRay> batch(cfg.batch_rays);
    std::vector<ThreadWork> tws;
    ModelGrads grads;
    size_t cursor = pool.size();  // forces a shuffle on first use
    uint64_t epoch = uint64_t(-1);

    auto t0 = std::chrono::steady_clock::now();
    for (int iter = 0; iter < cfg.iterations; ++iter) {
        for (int b = 0; b < cfg.batch_rays; ++b) {
            if (cursor == pool.size()) {
                ++epoch;
                rng_shuffle(pool, rng_mix(cfg.seed ^ 0x73687566ull, epoch));
                cursor = 0;
            }
            batch[b] = pool[cursor++];
        }

        double loss = loss_and_grads_impl(res.model, batch, cfg, epoch, grads, tws);
        if (loss > 1e6)
            throw ComputeError("train: divergence, loss=" + std::to_string(loss) +
                               " at iteration " + std::to_string(iter));
        double lr = lr_at(iter, cfg);
        adam_step(res.model, grads, res.opt, cfg, lr);
        res.iteration = iter + 1;

        if (cfg.eval_cadence > 0 &&
            ((iter + 1) % cfg.eval_cadence == 0 || iter + 1 == cfg.iterations)) {
            TraceRow row;
            row.iter = iter + 1;
            row.loss = loss;
            row.lr = lr;
            row.wall_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
            if (ground_truth) {
                Volume recon = extract_volume(res.model, ground_truth->nx,
                                              ground_truth->ny, ground_truth->nz,
                                              ground_truth->extent);
                Volume truth = *ground_truth;
                normalize_minmax(recon);
                normalize_minmax(truth);
                row.psnr = psnr(recon, truth, 1.0);
            }
            res.trace.push_back(row);
            if (on_eval) on_eval(row);
        }
    }
    return res;
}

Volume extract_volume(const FieldModel<float>& model, int nx, int ny, int nz,
                      const Aabb& extent) {
    Volume vol(nx, ny, nz, extent);
    const int chunk_k = 4;
#pragma omp parallel
    {
        MlpWork<float> work;
        std::vector<float> pts;
#pragma omp for schedule(static)
        for (int k0 = 0; k0 < nz; k0 += chunk_k) {
            int kn = std::min(chunk_k, nz - k0);
            int S = nx * ny * kn;
            pts.resize(size_t(S) * 3);
            int s = 0;
            for (int k = k0; k < k0 + kn; ++k)
                for (int j = 0; j < ny; ++j)
                    for (int i = 0; i < nx; ++i, ++s)
                        model.normalize(vol.voxel_center(i, j, k), &pts[size_t(s) * 3]);
            model.forward_batch(pts.data(), S, work);
            s = 0;
            for (int k = k0; k < k0 + kn; ++k)
                for (int j = 0; j < ny; ++j)
                    for (int i = 0; i < nx; ++i, ++s) vol.at(i, j, k) = work.Mu[s];
        }
    }
    return vol;
}

}  // namespace naf
