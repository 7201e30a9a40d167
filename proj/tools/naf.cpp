#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>

#include "naf/io.hpp"
#include "naf/reference.hpp"

namespace fs = std::filesystem;
using namespace naf;

namespace {

struct GlobalOpts {
    std::string config_path;
    uint64_t seed = 0;
    bool seed_set = false;
    bool strict = false;
    int threads = 0;
};

ExperimentConfig load_config(const GlobalOpts& g) {
    ExperimentConfig cfg = g.config_path.empty()
                               ? ExperimentConfig::defaults()
                               : load_experiment_config(g.config_path);
    if (g.seed_set) {
        cfg.seed = g.seed;
        cfg.train.seed = g.seed;
    }
    return cfg;
}

void apply_threads(const GlobalOpts& g) {
    // strict mode pins the worker count so repeated runs partition work
    // identically; all kernels are deterministic for a fixed count
    if (g.threads > 0) omp_set_num_threads(g.threads);
    else if (g.strict) omp_set_num_threads(omp_get_num_procs());
}

struct SimOutputs {
    Volume truth;
    ProjectionSet noisy;
};

SimOutputs run_simulate(const ExperimentConfig& cfg, const fs::path& out_dir,
                        bool write_files) {
    SimOutputs out;
    out.truth = make_phantom(cfg.phantom.kind, cfg.phantom.dims, cfg.phantom.dims,
                             cfg.phantom.dims, cfg.geometry.volume_extent,
                             cfg.phantom.params);
    ProjectionSet clean =
        project_volume(out.truth, cfg.geometry, cfg.phantom.projection_samples);
    out.noisy = add_noise(clean, cfg.noise_fraction, cfg.seed);
    if (write_files) {
        fs::create_directories(out_dir);
        save_volume(out.truth, out_dir / "ground_truth.raw");
        save_projections(clean, out_dir / "projections_clean.raw");
        save_projections(out.noisy, out_dir / "projections.raw");
        write_manifest(cfg, out_dir / "manifest.json");
    }
    return out;
}

TrainConfig train_config_for(const ExperimentConfig& cfg, EncoderKind encoder) {
    TrainConfig t = cfg.train;
    t.encoder = encoder;
    return t;
}

Volume run_reconstruct(const ExperimentConfig& cfg, const ProjectionSet& proj,
                       const std::string& method, const fs::path& out_dir,
                       const Volume* truth, bool write_files) {
    Volume recon;
    int dims = cfg.recon_dims;
    auto t0 = std::chrono::steady_clock::now();
    if (method == "naf" || method == "naf-frequency") {
        TrainConfig t = train_config_for(
            cfg, method == "naf" ? EncoderKind::hash : EncoderKind::frequency);
        TrainResult result = train(proj, t, truth);
        recon = extract_volume(result.model, dims, dims, dims,
                               proj.geometry.volume_extent);
        if (write_files) {
            fs::create_directories(out_dir);
            save_checkpoint(result, out_dir / "checkpoint.bin");
            save_trace_csv(result.trace, out_dir / "trace.csv");
        }
    } else if (method == "fdk") {
        recon = fdk_reconstruct(proj, dims, dims, dims, cfg.fdk);
    } else if (method == "sart") {
        recon = sart_reconstruct(proj, dims, dims, dims, cfg.sart);
    } else if (method == "asd-pocs") {
        throw ValidationError("method 'asd-pocs' is reserved but not implemented");
    } else {
        throw ValidationError("unknown method: " + method);
    }
    double wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    if (write_files) {
        fs::create_directories(out_dir);
        save_volume(recon, out_dir / ("recon_" + method + ".raw"));
        write_manifest(cfg, out_dir / "run.json",
                       {{"method", method}, {"wall_ms", std::to_string(wall_ms)}});
    }
    return recon;
}

Volume resample_to(const Volume& src, int nx, int ny, int nz) {
    Volume out(nx, ny, nz, src.extent);
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                out.at(i, j, k) = float(src.sample(out.voxel_center(i, j, k)));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"NAF cone-beam CT toolkit: simulate scans, reconstruct volumes "
                 "(neural attenuation field, FDK, SART), and score results"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "experiment config file");
    auto* seed_opt = app.add_option("--seed", g.seed, "override the experiment seed");
    app.add_flag("--strict", g.strict, "bitwise-deterministic mode (pinned threads)");
    app.add_option("--threads", g.threads, "worker thread count");

    // simulate
    auto* sim = app.add_subcommand("simulate", "generate phantom + projections");
    std::string sim_out = "out";
    double sim_noise = -1;
    sim->add_option("--out", sim_out, "output directory");
    sim->add_option("--noise", sim_noise, "noise fraction override");

    // reconstruct
    auto* rec = app.add_subcommand("reconstruct", "reconstruct a volume");
    std::string rec_proj, rec_method = "naf", rec_out = "out", rec_truth;
    rec->add_option("--projections", rec_proj, "projection file (raw + sidecar)")
        ->required();
    rec->add_option("--method", rec_method, "naf | naf-frequency | fdk | sart");
    rec->add_option("--out", rec_out, "output directory");
    rec->add_option("--truth", rec_truth, "ground-truth volume for the metric trace");

    // evaluate
    auto* eva = app.add_subcommand("evaluate", "PSNR/SSIM report");
    std::string eva_recon, eva_truth, eva_out = "out";
    int eva_axis = 2;
    bool eva_resample = false;
    eva->add_option("--recon", eva_recon, "reconstructed volume file")->required();
    eva->add_option("--truth", eva_truth, "ground-truth volume file")->required();
    eva->add_option("--axis", eva_axis, "per-slice axis (0,1,2)");
    eva->add_option("--out", eva_out, "output directory");
    eva->add_flag("--resample", eva_resample, "resample recon to truth dims");

    // sweep-views
    auto* swp = app.add_subcommand("sweep-views", "simulate+reconstruct+evaluate grid");
    std::vector<int> swp_views{10, 25, 50};
    std::vector<std::string> swp_methods{"naf", "sart", "fdk"};
    std::string swp_out = "out/sweep.csv";
    swp->add_option("--views", swp_views, "view counts")->delimiter(',');
    swp->add_option("--methods", swp_methods, "methods")->delimiter(',');
    swp->add_option("--out", swp_out, "output CSV path");

    // export-slices
    auto* exp = app.add_subcommand("export-slices", "write per-slice PGM images");
    std::string exp_vol, exp_out = "out/slices";
    int exp_axis = 2;
    exp->add_option("--volume", exp_vol, "volume file")->required();
    exp->add_option("--axis", exp_axis, "slice axis (0,1,2)");
    exp->add_option("--out", exp_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }
    g.seed_set = seed_opt->count() > 0;

    try {
        apply_threads(g);
        ExperimentConfig cfg = load_config(g);

        if (*sim) {
            if (sim_noise >= 0) cfg.noise_fraction = sim_noise;
            run_simulate(cfg, sim_out, true);
            std::cout << "wrote " << sim_out << "\n";
        } else if (*rec) {
            ProjectionSet proj = load_projections(rec_proj);
            if (cfg.geometry.fingerprint() != proj.geometry.fingerprint() &&
                !g.config_path.empty())
                throw ValidationError(
                    "geometry mismatch between config and projection sidecar");
            cfg.geometry = proj.geometry;
            Volume truth;
            bool have_truth = !rec_truth.empty();
            if (have_truth) truth = load_volume(rec_truth);
            run_reconstruct(cfg, proj, rec_method, rec_out,
                            have_truth ? &truth : nullptr, true);
            std::cout << "wrote " << rec_out << "\n";
        } else if (*eva) {
            Volume recon = load_volume(eva_recon);
            Volume truth = load_volume(eva_truth);
            if (recon.nx != truth.nx || recon.ny != truth.ny || recon.nz != truth.nz) {
                if (!eva_resample)
                    throw ValidationError(
                        "volume dims mismatch (pass --resample to resample)");
                recon = resample_to(recon, truth.nx, truth.ny, truth.nz);
            }
            MetricReport rep = evaluate_volumes(recon, truth, eva_axis);
            fs::create_directories(eva_out);
            save_metric_report(rep, fs::path(eva_out) / "report.json");
            save_slice_csv(rep, fs::path(eva_out) / "per_slice.csv");
            std::cout << "PSNR=" << rep.psnr_db << "dB SSIM=" << rep.ssim << "\n";
        } else if (*swp) {
            if (!fs::path(swp_out).parent_path().empty())
                fs::create_directories(fs::path(swp_out).parent_path());
            std::ofstream csv(swp_out);
            csv << "views,method,psnr,ssim,wall_ms\n";
            for (int views : swp_views) {
                ExperimentConfig c = cfg;
                c.geometry.num_views = views;
                SimOutputs sim_data = run_simulate(c, "", false);
                for (const std::string& method : swp_methods) {
                    auto t0 = std::chrono::steady_clock::now();
                    try {
                        Volume recon = run_reconstruct(c, sim_data.noisy, method, "",
                                                       nullptr, false);
                        double wall = std::chrono::duration<double, std::milli>(
                                          std::chrono::steady_clock::now() - t0)
                                          .count();
                        Volume truth = sim_data.truth;
                        if (recon.nx != truth.nx)
                            truth = resample_to(truth, recon.nx, recon.ny, recon.nz);
                        MetricReport rep = evaluate_volumes(recon, truth);
                        csv << views << "," << method << "," << rep.psnr_db << ","
                            << rep.ssim << "," << wall << "\n";
                    } catch (const std::exception& e) {
                        csv << views << "," << method << ",error,error,\"" << e.what()
                            << "\"\n";
                    }
                    csv.flush();
                }
            }
            std::cout << "wrote " << swp_out << "\n";
        } else if (*exp) {
            Volume vol = load_volume(exp_vol);
            export_slices(vol, exp_axis, exp_out);
            std::cout << "wrote " << exp_out << "\n";
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ComputeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
