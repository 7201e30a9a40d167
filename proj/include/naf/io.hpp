#pragma once

#include <filesystem>
#include <map>

#include "naf/baselines.hpp"
#include "naf/metrics.hpp"
#include "naf/trainer.hpp"

namespace naf {

// Raw little-endian float32 payload + JSON sidecar. `path` is the payload
// path; the sidecar lives next to it as <path>.json.
void save_volume(const Volume& vol, const std::filesystem::path& path);
Volume load_volume(const std::filesystem::path& path);

void save_projections(const ProjectionSet& proj, const std::filesystem::path& path);
ProjectionSet load_projections(const std::filesystem::path& path);

// Versioned binary checkpoint: encoder config, tables, MLP, Adam moments,
// iteration counter, geometry fingerprint. Round-trips bit-exactly.
void save_checkpoint(const TrainResult& result, const std::filesystem::path& path);
TrainResult load_checkpoint(const std::filesystem::path& path);

void save_metric_report(const MetricReport& report, const std::filesystem::path& path);
void save_slice_csv(const MetricReport& report, const std::filesystem::path& path);
void save_trace_csv(const std::vector<TraceRow>& trace,
                    const std::filesystem::path& path);

// one 8-bit PGM per slice, min-max windowed; constant slices map to mid-gray
void export_slices(const Volume& vol, int axis, const std::filesystem::path& out_dir);

// ---------------------------------------------------------------------------
// Experiment configuration: INI-style sections of key = value pairs, strict
// parsing (unknown sections/keys rejected with line numbers).

struct PhantomSection {
    PhantomKind kind = PhantomKind::shepp_logan_3d;
    int dims = 64;
    PhantomParams params;
    int projection_samples = 0;  // 0: derived as 2 * dims
};

struct ExperimentConfig {
    ScanGeometry geometry = ScanGeometry::desk_default();
    PhantomSection phantom;
    double noise_fraction = 0.03;
    TrainConfig train;
    FdkConfig fdk;
    SartConfig sart;
    int recon_dims = 0;  // 0: phantom dims
    uint64_t seed = 0;
    std::filesystem::path output_dir = "out";

    static ExperimentConfig defaults();
};

ExperimentConfig load_experiment_config(const std::filesystem::path& path);
void write_manifest(const ExperimentConfig& cfg, const std::filesystem::path& path,
                    const std::map<std::string, std::string>& extra = {});

}  // namespace naf
