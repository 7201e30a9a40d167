#include "naf/io.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian");

namespace naf {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kFormatVersion = 1;

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw ComputeError("cannot write " + path.string());
    f << text;
}

json read_json(const fs::path& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot read " + path.string());
    json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        throw ValidationError("malformed sidecar " + path.string() + ": " + e.what());
    }
    return j;
}

void write_raw(const fs::path& path, const std::vector<float>& data) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ComputeError("cannot write " + path.string());
    f.write(reinterpret_cast<const char*>(data.data()),
            std::streamsize(data.size() * sizeof(float)));
}

std::vector<float> read_raw(const fs::path& path, size_t count) {
    std::ifstream f(path, std::ios::binary | std::ios::ate);
    if (!f) throw ValidationError("cannot read " + path.string());
    if (size_t(f.tellg()) != count * sizeof(float))
        throw ValidationError("raw payload size mismatch in " + path.string());
    f.seekg(0);
    std::vector<float> data(count);
    f.read(reinterpret_cast<char*>(data.data()),
           std::streamsize(count * sizeof(float)));
    return data;
}

json geometry_to_json(const ScanGeometry& g) {
    return json{{"dso", g.dso},
                {"dsd", g.dsd},
                {"detector_rows", g.detector_rows},
                {"detector_cols", g.detector_cols},
                {"pixel_pitch_u", g.pixel_pitch_u},
                {"pixel_pitch_v", g.pixel_pitch_v},
                {"angle_start", g.angle_start},
                {"angle_end", g.angle_end},
                {"num_views", g.num_views},
                {"extent_lo", {g.volume_extent.lo.x, g.volume_extent.lo.y,
                               g.volume_extent.lo.z}},
                {"extent_hi", {g.volume_extent.hi.x, g.volume_extent.hi.y,
                               g.volume_extent.hi.z}}};
}

ScanGeometry geometry_from_json(const json& j) {
    ScanGeometry g;
    try {
        g.dso = j.at("dso");
        g.dsd = j.at("dsd");
        g.detector_rows = j.at("detector_rows");
        g.detector_cols = j.at("detector_cols");
        g.pixel_pitch_u = j.at("pixel_pitch_u");
        g.pixel_pitch_v = j.at("pixel_pitch_v");
        g.angle_start = j.at("angle_start");
        g.angle_end = j.at("angle_end");
        g.num_views = j.at("num_views");
        auto lo = j.at("extent_lo"), hi = j.at("extent_hi");
        g.volume_extent = {{lo[0], lo[1], lo[2]}, {hi[0], hi[1], hi[2]}};
    } catch (const json::exception& e) {
        throw ValidationError(std::string("geometry sidecar: ") + e.what());
    }
    g.validate();
    return g;
}

}  // namespace

void save_volume(const Volume& vol, const fs::path& path) {
    write_raw(path, vol.data);
    json side{{"format_version", kFormatVersion},
              {"dtype", "float32"},
              {"order", "x-fastest"},
              {"dims", {vol.nx, vol.ny, vol.nz}},
              {"extent_lo", {vol.extent.lo.x, vol.extent.lo.y, vol.extent.lo.z}},
              {"extent_hi", {vol.extent.hi.x, vol.extent.hi.y, vol.extent.hi.z}}};
    write_text(path.string() + ".json", side.dump(2) + "\n");
}

Volume load_volume(const fs::path& path) {
    json side = read_json(path.string() + ".json");
    try {
        if (side.at("format_version") != kFormatVersion)
            throw ValidationError("volume sidecar: unsupported format_version");
        if (side.at("dtype") != "float32" || side.at("order") != "x-fastest")
            throw ValidationError("volume sidecar: unsupported dtype/order");
        auto dims = side.at("dims");
        auto lo = side.at("extent_lo"), hi = side.at("extent_hi");
        Volume vol(dims[0], dims[1], dims[2],
                   Aabb{{lo[0], lo[1], lo[2]}, {hi[0], hi[1], hi[2]}});
        vol.data = read_raw(path, vol.data.size());
        return vol;
    } catch (const json::exception& e) {
        throw ValidationError("volume sidecar field: " + std::string(e.what()));
    }
}

void save_projections(const ProjectionSet& proj, const fs::path& path) {
    write_raw(path, proj.images);
    json side{{"format_version", kFormatVersion},
              {"dtype", "float32"},
              {"order", "view-row-col"},
              {"convention", proj.convention == Convention::INTENSITY
                                 ? "INTENSITY"
                                 : "LINE_INTEGRAL"},
              {"noise_fraction", proj.noise_fraction},
              {"noise_model", "additive-gaussian-of-mean-intensity"},
              {"seed", proj.seed},
              {"i0", 1.0},
              {"length_unit_mm", proj.geometry.volume_extent.max_side()},
              {"geometry", geometry_to_json(proj.geometry)}};
    write_text(path.string() + ".json", side.dump(2) + "\n");
}

ProjectionSet load_projections(const fs::path& path) {
    json side = read_json(path.string() + ".json");
    ProjectionSet proj;
    try {
        if (side.at("format_version") != kFormatVersion)
            throw ValidationError("projection sidecar: unsupported format_version");
        proj.geometry = geometry_from_json(side.at("geometry"));
        std::string conv = side.at("convention");
        proj.convention =
            conv == "INTENSITY" ? Convention::INTENSITY : Convention::LINE_INTEGRAL;
        proj.noise_fraction = side.at("noise_fraction");
        proj.seed = side.at("seed");
    } catch (const json::exception& e) {
        throw ValidationError("projection sidecar field: " + std::string(e.what()));
    }
    size_t count = size_t(proj.geometry.num_views) * proj.geometry.detector_rows *
                   proj.geometry.detector_cols;
    proj.images = read_raw(path, count);
    return proj;
}

// ---------------------------------------------------------------------------
// checkpoint

namespace {

template <class T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
void put_vec(std::ostream& os, const std::vector<T>& v) {
    put(os, uint64_t(v.size()));
    os.write(reinterpret_cast<const char*>(v.data()),
             std::streamsize(v.size() * sizeof(T)));
}
template <class T>
T get(std::istream& is) {
    T v;
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw ValidationError("checkpoint: truncated file");
    return v;
}
template <class T>
std::vector<T> get_vec(std::istream& is) {
    uint64_t n = get<uint64_t>(is);
    std::vector<T> v(n);
    is.read(reinterpret_cast<char*>(v.data()), std::streamsize(n * sizeof(T)));
    if (!is) throw ValidationError("checkpoint: truncated file");
    return v;
}

constexpr char kCkptMagic[8] = {'N', 'A', 'F', 'C', 'K', 'P', '0', '1'};

void put_train_config(std::ostream& os, const TrainConfig& c) {
    put(os, int32_t(c.batch_rays));
    put(os, int32_t(c.samples_per_ray));
    put(os, int32_t(c.iterations));
    put(os, c.lr_start);
    put(os, c.lr_end);
    put(os, int32_t(c.lr_shape));
    put(os, c.beta1);
    put(os, c.beta2);
    put(os, c.adam_eps);
    put(os, c.seed);
    put(os, uint8_t(c.jitter));
    put(os, int32_t(c.encoder));
    put(os, int32_t(c.freq_bands));
    put(os, int32_t(c.mlp_hidden));
    put(os, int32_t(c.eval_cadence));
    put(os, int32_t(c.last_delta));
    put(os, int32_t(c.hash_config.levels));
    put(os, int32_t(c.hash_config.features_per_level));
    put(os, c.hash_config.table_size);
    put(os, int32_t(c.hash_config.base_resolution));
    put(os, c.hash_config.growth_factor);
    for (uint32_t p : c.hash_config.primes) put(os, p);
}

TrainConfig get_train_config(std::istream& is) {
    TrainConfig c;
    c.batch_rays = get<int32_t>(is);
    c.samples_per_ray = get<int32_t>(is);
    c.iterations = get<int32_t>(is);
    c.lr_start = get<double>(is);
    c.lr_end = get<double>(is);
    c.lr_shape = TrainConfig::LrShape(get<int32_t>(is));
    c.beta1 = get<double>(is);
    c.beta2 = get<double>(is);
    c.adam_eps = get<double>(is);
    c.seed = get<uint64_t>(is);
    c.jitter = get<uint8_t>(is) != 0;
    c.encoder = EncoderKind(get<int32_t>(is));
    c.freq_bands = get<int32_t>(is);
    c.mlp_hidden = get<int32_t>(is);
    c.eval_cadence = get<int32_t>(is);
    c.last_delta = LastDelta(get<int32_t>(is));
    c.hash_config.levels = get<int32_t>(is);
    c.hash_config.features_per_level = get<int32_t>(is);
    c.hash_config.table_size = get<uint32_t>(is);
    c.hash_config.base_resolution = get<int32_t>(is);
    c.hash_config.growth_factor = get<double>(is);
    for (uint32_t& p : c.hash_config.primes) p = get<uint32_t>(is);
    return c;
}

}  // namespace

void save_checkpoint(const TrainResult& result, const fs::path& path) {
    fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw ComputeError("cannot write " + tmp.string());
        os.write(kCkptMagic, sizeof(kCkptMagic));
        put_train_config(os, result.config);
        const FieldModel<float>& m = result.model;
        put(os, result.geometry_fingerprint);
        put(os, int64_t(result.iteration));
        put(os, m.extent.lo.x); put(os, m.extent.lo.y); put(os, m.extent.lo.z);
        put(os, m.extent.hi.x); put(os, m.extent.hi.y); put(os, m.extent.hi.z);
        put(os, int32_t(m.mlp.in_dim));
        put(os, int32_t(m.mlp.hidden));
        put(os, uint32_t(m.tables.levels.size()));
        for (const auto& t : m.tables.levels) put_vec(os, t);
        m.mlp.for_each_array([&](const std::vector<float>& a) { put_vec(os, a); });
        put(os, result.opt.step);
        put(os, uint32_t(result.opt.m.size()));
        for (const auto& a : result.opt.m) put_vec(os, a);
        for (const auto& a : result.opt.v) put_vec(os, a);
    }
    fs::rename(tmp, path);  // atomic publish
}

TrainResult load_checkpoint(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ValidationError("cannot read " + path.string());
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kCkptMagic, 8) != 0)
        throw ValidationError("checkpoint: bad magic / version in " + path.string());
    TrainResult res;
    res.config = get_train_config(is);
    res.geometry_fingerprint = get<uint64_t>(is);
    res.iteration = int(get<int64_t>(is));
    FieldModel<float>& m = res.model;
    m.encoder = res.config.encoder;
    m.hash_config = res.config.hash_config;
    m.freq_bands = res.config.freq_bands;
    m.extent.lo.x = get<double>(is); m.extent.lo.y = get<double>(is);
    m.extent.lo.z = get<double>(is);
    m.extent.hi.x = get<double>(is); m.extent.hi.y = get<double>(is);
    m.extent.hi.z = get<double>(is);
    int in_dim = get<int32_t>(is);
    int hidden = get<int32_t>(is);
    uint32_t nlevels = get<uint32_t>(is);
    m.tables.config = m.hash_config;
    m.tables.levels.resize(nlevels);
    for (auto& t : m.tables.levels) t = get_vec<float>(is);
    m.mlp = MlpParams<float>::zeros(in_dim, hidden);
    m.mlp.for_each_array([&](std::vector<float>& a) { a = get_vec<float>(is); });
    res.opt.step = get<int64_t>(is);
    uint32_t narr = get<uint32_t>(is);
    res.opt.m.resize(narr);
    res.opt.v.resize(narr);
    for (auto& a : res.opt.m) a = get_vec<float>(is);
    for (auto& a : res.opt.v) a = get_vec<float>(is);
    return res;
}

// ---------------------------------------------------------------------------
// reports

void save_metric_report(const MetricReport& report, const fs::path& path) {
    json j{{"psnr_db", report.psnr_db},
           {"ssim", report.ssim},
           {"data_range", report.data_range},
           {"normalization", report.normalization},
           {"slice_axis", report.slice_axis},
           {"ssim_window", 11},
           {"ssim_sigma", 1.5},
           {"ssim_k1", 0.01},
           {"ssim_k2", 0.03}};
    write_text(path, j.dump(2) + "\n");
}

void save_slice_csv(const MetricReport& report, const fs::path& path) {
    std::ostringstream os;
    os << "slice,psnr_db,ssim\n";
    for (size_t i = 0; i < report.per_slice_psnr.size(); ++i)
        os << i << "," << report.per_slice_psnr[i] << "," << report.per_slice_ssim[i]
           << "\n";
    write_text(path, os.str());
}

void save_trace_csv(const std::vector<TraceRow>& trace, const fs::path& path) {
    std::ostringstream os;
    os << "iter,loss,lr,psnr,wall_ms\n";
    for (const TraceRow& r : trace) {
        os << r.iter << "," << r.loss << "," << r.lr << ",";
        if (r.psnr >= 0) os << r.psnr;
        os << "," << r.wall_ms << "\n";
    }
    write_text(path, os.str());
}

void export_slices(const Volume& vol, int axis, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    int count = axis == 0 ? vol.nx : (axis == 1 ? vol.ny : vol.nz);
    auto [lo_it, hi_it] = std::minmax_element(vol.data.begin(), vol.data.end());
    float lo = *lo_it, hi = *hi_it;
    bool degenerate = (hi - lo) < 1e-12f;

    int width = 0;
    for (int c = count - 1; c > 0; c /= 10) ++width;
    width = std::max(width, 1);

    for (int s = 0; s < count; ++s) {
        int w = axis == 0 ? vol.ny : vol.nx;
        int h = axis == 2 ? vol.ny : vol.nz;
        std::ostringstream name;
        name << "slice_" << std::setw(width) << std::setfill('0') << s << ".pgm";
        std::ofstream f(out_dir / name.str(), std::ios::binary);
        if (!f) throw ComputeError("cannot write slices to " + out_dir.string());
        f << "P5\n" << w << " " << h << "\n255\n";
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                float v;
                if (axis == 0) v = vol.at(s, x, y);
                else if (axis == 1) v = vol.at(x, s, y);
                else v = vol.at(x, y, s);
                int g = degenerate
                            ? 128
                            : std::clamp(int(std::lround((v - lo) / (hi - lo) * 255.0f)),
                                         0, 255);
                f.put(char(g));
            }
    }
}

// ---------------------------------------------------------------------------
// experiment config (strict INI)

namespace {

struct IniEntry {
    std::string value;
    int line = 0;
    bool used = false;
};
using IniSection = std::map<std::string, IniEntry>;
using IniFile = std::map<std::string, IniSection>;

IniFile parse_ini(const fs::path& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot read config " + path.string());
    IniFile ini;
    std::string line, section;
    int lineno = 0;
    auto trim = [](std::string s) {
        size_t a = s.find_first_not_of(" \t\r");
        size_t b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    while (std::getline(f, line)) {
        ++lineno;
        std::string t = trim(line.substr(0, line.find('#')));
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                                      ": malformed section header");
            section = trim(t.substr(1, t.size() - 2));
            ini[section];
            continue;
        }
        size_t eq = t.find('=');
        if (eq == std::string::npos || section.empty())
            throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                                  ": expected 'key = value' inside a section");
        std::string key = trim(t.substr(0, eq));
        if (ini[section].count(key))
            throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                                  ": duplicate key '" + key + "'");
        ini[section][key] = {trim(t.substr(eq + 1)), lineno, false};
    }
    return ini;
}

struct IniReader {
    const fs::path& path;
    IniFile& ini;

    IniSection* section(const std::string& name) {
        auto it = ini.find(name);
        return it == ini.end() ? nullptr : &it->second;
    }

    template <class T, class Parse>
    void read(const std::string& sec, const std::string& key, T& out, Parse&& parse) {
        auto* s = section(sec);
        if (!s) return;
        auto it = s->find(key);
        if (it == s->end()) return;
        it->second.used = true;
        try {
            out = parse(it->second.value);
        } catch (const std::exception& e) {
            throw ValidationError(path.string() + ":" +
                                  std::to_string(it->second.line) + ": bad value for '" +
                                  key + "': " + e.what());
        }
    }

    void read_double(const std::string& s, const std::string& k, double& out) {
        read(s, k, out, [](const std::string& v) { return std::stod(v); });
    }
    void read_int(const std::string& s, const std::string& k, int& out) {
        read(s, k, out, [](const std::string& v) { return std::stoi(v); });
    }
    void read_u64(const std::string& s, const std::string& k, uint64_t& out) {
        read(s, k, out, [](const std::string& v) { return std::stoull(v); });
    }
    void read_bool(const std::string& s, const std::string& k, bool& out) {
        read(s, k, out, [](const std::string& v) {
            if (v == "true" || v == "1") return true;
            if (v == "false" || v == "0") return false;
            throw std::runtime_error("expected true/false");
        });
    }
    void read_string(const std::string& s, const std::string& k, std::string& out) {
        read(s, k, out, [](const std::string& v) { return v; });
    }

    void finish(const std::vector<std::string>& known_sections) {
        for (auto& [sec, entries] : ini) {
            if (std::find(known_sections.begin(), known_sections.end(), sec) ==
                known_sections.end())
                throw ValidationError(path.string() + ": unknown section [" + sec + "]");
            for (auto& [key, entry] : entries)
                if (!entry.used)
                    throw ValidationError(path.string() + ":" +
                                          std::to_string(entry.line) +
                                          ": unknown key '" + key + "' in [" + sec +
                                          "]");
        }
    }
};

}  // namespace

ExperimentConfig ExperimentConfig::defaults() { return ExperimentConfig{}; }

ExperimentConfig load_experiment_config(const fs::path& path) {
    IniFile ini = parse_ini(path);
    IniReader r{path, ini};
    ExperimentConfig cfg;

    double extent_mm = 100.0;
    int detector = 128;
    double angle_start_deg = 0.0, angle_end_deg = 180.0;
    double pitch_u = 0.0, pitch_v = 0.0;
    r.read_double("geometry", "dso", cfg.geometry.dso);
    r.read_double("geometry", "dsd", cfg.geometry.dsd);
    r.read_int("geometry", "detector", detector);
    r.read_int("geometry", "detector_rows", cfg.geometry.detector_rows);
    r.read_int("geometry", "detector_cols", cfg.geometry.detector_cols);
    r.read_double("geometry", "pixel_pitch_u", pitch_u);
    r.read_double("geometry", "pixel_pitch_v", pitch_v);
    r.read_double("geometry", "angle_start_deg", angle_start_deg);
    r.read_double("geometry", "angle_end_deg", angle_end_deg);
    r.read_int("geometry", "num_views", cfg.geometry.num_views);
    r.read_double("geometry", "extent_mm", extent_mm);

    if (auto* s = r.section("geometry"); s && s->count("detector")) {
        cfg.geometry.detector_rows = detector;
        cfg.geometry.detector_cols = detector;
    }
    cfg.geometry.volume_extent = Aabb::centered_cube(extent_mm);
    cfg.geometry.angle_start = angle_start_deg * M_PI / 180.0;
    cfg.geometry.angle_end = angle_end_deg * M_PI / 180.0;
    if (pitch_u <= 0 || pitch_v <= 0) {
        // detector over-covers the magnified volume by 10%
        double half = 1.1 * extent_mm * 0.5 * cfg.geometry.dsd / cfg.geometry.dso;
        if (pitch_u <= 0) pitch_u = 2 * half / cfg.geometry.detector_cols;
        if (pitch_v <= 0) pitch_v = 2 * half / cfg.geometry.detector_rows;
    }
    cfg.geometry.pixel_pitch_u = pitch_u;
    cfg.geometry.pixel_pitch_v = pitch_v;

    std::string kind = "shepp_logan_3d";
    r.read_string("phantom", "kind", kind);
    cfg.phantom.kind = parse_phantom_kind(kind);
    r.read_int("phantom", "dims", cfg.phantom.dims);
    r.read_double("phantom", "sphere_mu", cfg.phantom.params.sphere_mu);
    r.read_double("phantom", "sphere_radius_frac",
                  cfg.phantom.params.sphere_radius_frac);
    r.read_int("phantom", "projection_samples", cfg.phantom.projection_samples);

    r.read_double("noise", "fraction", cfg.noise_fraction);

    TrainConfig& t = cfg.train;
    r.read_int("train", "batch_rays", t.batch_rays);
    r.read_int("train", "samples_per_ray", t.samples_per_ray);
    r.read_int("train", "iterations", t.iterations);
    r.read_double("train", "lr_start", t.lr_start);
    r.read_double("train", "lr_end", t.lr_end);
    std::string shape = "exponential", encoder = "hash", last_delta = "close";
    r.read_string("train", "lr_shape", shape);
    if (shape == "exponential") t.lr_shape = TrainConfig::LrShape::exponential;
    else if (shape == "staircase") t.lr_shape = TrainConfig::LrShape::staircase;
    else throw ValidationError("config: lr_shape must be exponential or staircase");
    r.read_bool("train", "jitter", t.jitter);
    r.read_string("train", "encoder", encoder);
    t.encoder = parse_encoder(encoder);
    r.read_int("train", "freq_bands", t.freq_bands);
    r.read_int("train", "mlp_hidden", t.mlp_hidden);
    r.read_int("train", "eval_cadence", t.eval_cadence);
    r.read_string("train", "last_delta", last_delta);
    if (last_delta == "close") t.last_delta = LastDelta::close_to_exit;
    else if (last_delta == "drop") t.last_delta = LastDelta::drop_last;
    else throw ValidationError("config: last_delta must be close or drop");
    r.read_int("train", "hash_levels", t.hash_config.levels);
    r.read_int("train", "hash_features", t.hash_config.features_per_level);
    int table_log2 = 19;
    r.read_int("train", "hash_table_log2", table_log2);
    t.hash_config.table_size = 1u << table_log2;
    r.read_int("train", "hash_base_resolution", t.hash_config.base_resolution);

    std::string filter = "hann";
    r.read_string("fdk", "filter", filter);
    if (filter == "hann") cfg.fdk.filter = FdkConfig::Filter::hann;
    else if (filter == "ram-lak") cfg.fdk.filter = FdkConfig::Filter::ram_lak;
    else throw ValidationError("config: fdk filter must be hann or ram-lak");
    r.read_int("fdk", "padding_factor", cfg.fdk.padding_factor);

    r.read_int("sart", "iterations", cfg.sart.iterations);
    r.read_double("sart", "relaxation", cfg.sart.relaxation);
    r.read_bool("sart", "positivity", cfg.sart.positivity);
    r.read_int("sart", "samples_per_ray", cfg.sart.samples_per_ray);

    r.read_u64("experiment", "seed", cfg.seed);
    r.read_int("experiment", "recon_dims", cfg.recon_dims);
    std::string out = cfg.output_dir.string();
    r.read_string("experiment", "output_dir", out);
    cfg.output_dir = out;

    r.finish({"geometry", "phantom", "noise", "train", "fdk", "sart", "experiment"});

    // derived defaults
    if (cfg.recon_dims == 0) cfg.recon_dims = cfg.phantom.dims;
    if (cfg.phantom.projection_samples == 0)
        cfg.phantom.projection_samples = 2 * cfg.phantom.dims;
    if (t.samples_per_ray == 0) t.samples_per_ray = (3 * cfg.recon_dims) / 2;
    t.seed = cfg.seed;
    t.hash_config.growth_factor = std::exp(
        std::log(2.0 * cfg.recon_dims / t.hash_config.base_resolution) /
        std::max(1, t.hash_config.levels - 1));

    cfg.geometry.validate();
    t.validate();
    cfg.fdk.validate();
    cfg.sart.validate();
    return cfg;
}

void write_manifest(const ExperimentConfig& cfg, const fs::path& path,
                    const std::map<std::string, std::string>& extra) {
    json j{{"format_version", kFormatVersion},
           {"seed", cfg.seed},
           {"geometry", geometry_to_json(cfg.geometry)},
           {"phantom",
            {{"kind", int(cfg.phantom.kind)},
             {"dims", cfg.phantom.dims},
             {"projection_samples", cfg.phantom.projection_samples}}},
           {"noise_fraction", cfg.noise_fraction},
           {"train",
            {{"batch_rays", cfg.train.batch_rays},
             {"samples_per_ray", cfg.train.samples_per_ray},
             {"iterations", cfg.train.iterations},
             {"lr_start", cfg.train.lr_start},
             {"lr_end", cfg.train.lr_end},
             {"jitter", cfg.train.jitter},
             {"encoder", cfg.train.encoder == EncoderKind::hash ? "hash" : "frequency"},
             {"hash_levels", cfg.train.hash_config.levels},
             {"hash_table_size", cfg.train.hash_config.table_size},
             {"hash_base_resolution", cfg.train.hash_config.base_resolution},
             {"hash_growth", cfg.train.hash_config.growth_factor},
             {"seed", cfg.train.seed}}},
           {"sart",
            {{"iterations", cfg.sart.iterations},
             {"relaxation", cfg.sart.relaxation},
             {"positivity", cfg.sart.positivity}}},
           {"fdk",
            {{"filter", cfg.fdk.filter == FdkConfig::Filter::hann ? "hann" : "ram-lak"},
             {"padding_factor", cfg.fdk.padding_factor}}}};
    for (auto& [k, v] : extra) j[k] = v;
    write_text(path, j.dump(2) + "\n");
}

}  // namespace naf
