#pragma once

#include <functional>
#include <span>

#include "naf/model.hpp"
#include "naf/phantom.hpp"
#include "naf/raycast.hpp"

namespace naf {

struct TrainConfig {
    int batch_rays = 2048;
    int samples_per_ray = 96;
    int iterations = 3000;
    double lr_start = 1e-3;
    double lr_end = 1e-4;
    enum class LrShape { exponential, staircase } lr_shape = LrShape::exponential;
    double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
    uint64_t seed = 0;
    bool jitter = true;
    EncoderKind encoder = EncoderKind::hash;
    int freq_bands = 10;
    int mlp_hidden = 32;
    HashEncoderConfig hash_config;  // growth fixed against the target volume
    int eval_cadence = 100;
    LastDelta last_delta = LastDelta::close_to_exit;

    void validate() const {
        if (batch_rays < 1 || iterations < 0 || samples_per_ray < 2)
            throw ValidationError("train: invalid batch/iterations/samples");
        if (!(lr_start >= lr_end) || !(lr_end > 0))
            throw ValidationError("train: require lr_start >= lr_end > 0");
    }
};

double lr_at(int iter, const TrainConfig& cfg);

// One pooled training ray: geometry-resolved hit ray plus its measured pixel.
struct PoolRay {
    Ray ray;
    float target = 1.0f;
    uint32_t id = 0;  // stable id for jitter streams
};

std::vector<PoolRay> build_ray_pool(const ProjectionSet& proj);

// Adam first/second moments, one flat array per parameter array.
struct AdamState {
    std::vector<std::vector<float>> m, v;
    int64_t step = 0;
};

struct ModelGrads {
    MlpParams<float> mlp;
    std::vector<std::vector<float>> tables;
};

// Sum-of-squared-residual loss over the batch plus gradients for all touched
// parameters. Throws ComputeError (with the ray index) on non-finite loss.
double loss_and_grads(const FieldModel<float>& model, std::span<const PoolRay> batch,
                      const TrainConfig& cfg, uint64_t epoch, ModelGrads& grads);

struct TraceRow {
    int iter = 0;
    double loss = 0, lr = 0;
    double psnr = -1;  // -1 when no ground truth was supplied
    double wall_ms = 0;
};

struct TrainResult {
    FieldModel<float> model;
    AdamState opt;
    int iteration = 0;
    uint64_t geometry_fingerprint = 0;
    TrainConfig config;
    std::vector<TraceRow> trace;
};

TrainResult train(const ProjectionSet& proj, const TrainConfig& cfg,
                  const Volume* ground_truth = nullptr,
                  const std::function<void(const TraceRow&)>& on_eval = nullptr);

Volume extract_volume(const FieldModel<float>& model, int nx, int ny, int nz,
                      const Aabb& extent);

}  // namespace naf
