#include "cli.hpp"

#include "polsdf/dataset.hpp"
#include "polsdf/evaluation.hpp"
#include "polsdf/marching_cubes.hpp"
#include "polsdf/priors.hpp"
#include "polsdf/synth.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#ifndef POLSDF_VERSION
#define POLSDF_VERSION "unknown"
#endif

namespace polsdf::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kScenes = {"sphere", "torus", "rounded_box"};
const std::vector<std::string> kAblations = {"full", "color-only", "mean", "cov", "rew-mean", "rew-cov"};

// Config problems are usage errors, not data errors.
class UsageError : public Error {
  public:
    using Error::Error;
};

}  // namespace

void RunConfig::validate() const {
    if (dataset.empty()) throw UsageError("no dataset path given");
    if (output.empty()) throw UsageError("no output path given");
    if (mesh_resolution < 2) throw UsageError("mesh_resolution must be at least 2");
    if (checkpoint_interval < 0 || log_interval < 1 || progress_interval < 0)
        throw UsageError("intervals must be positive");
    if (std::find(kAblations.begin(), kAblations.end(), train.ablation) == kAblations.end())
        throw UsageError("unknown ablation: " + train.ablation);
    try {
        train.validate();
    } catch (const Error &e) {
        throw UsageError(e.what());
    }
}

json to_json(const RunConfig &c) {
    const TrainConfig &t = c.train;
    return json{
        {"dataset", c.dataset.string()},
        {"output", c.output.string()},
        {"iterations", t.iterations},
        {"batch_size", t.batch_size},
        {"grid_resolution", t.grid_resolution},
        {"grid_levels", t.grid_levels},
        {"level_fraction", t.level_fraction},
        {"samples", t.sampler.samples},
        {"stratified", t.sampler.stratified},
        {"initial_sharpness", t.initial_sharpness},
        {"lr_grid", t.lr_grid},
        {"lr_sharpness", t.lr_sharpness},
        {"lr_final_fraction", t.lr_final_fraction},
        {"adam_beta1", t.adam_beta1},
        {"adam_beta2", t.adam_beta2},
        {"adam_epsilon", t.adam_epsilon},
        {"weight_cull", t.weight_cull},
        {"seed", t.seed},
        {"threads", t.threads},
        {"chunk_size", t.chunk_size},
        {"ablation", t.ablation},
        {"weights",
         {{"color", t.weights.color},
          {"polar", t.weights.polar},
          {"eigvec", t.weights.eigvec},
          {"eikonal", t.weights.eikonal},
          {"mask", t.weights.mask},
          {"cov_activation_fraction", t.weights.cov_activation_fraction}}},
        {"mesh_resolution", c.mesh_resolution},
        {"checkpoint_interval", c.checkpoint_interval},
        {"log_interval", c.log_interval},
        {"progress_interval", c.progress_interval},
    };
}

RunConfig run_config_from_json(const json &j) {
    if (!j.is_object()) throw UsageError("config must be a JSON object");
    RunConfig c;
    TrainConfig &t = c.train;
    try {
        for (const auto &[key, value] : j.items()) {
            if (key == "dataset") c.dataset = value.get<std::string>();
            else if (key == "output") c.output = value.get<std::string>();
            else if (key == "iterations") t.iterations = value.get<int>();
            else if (key == "batch_size") t.batch_size = value.get<int>();
            else if (key == "grid_resolution") t.grid_resolution = value.get<int>();
            else if (key == "grid_levels") t.grid_levels = value.get<int>();
            else if (key == "level_fraction") t.level_fraction = value.get<double>();
            else if (key == "samples") t.sampler.samples = value.get<int>();
            else if (key == "stratified") t.sampler.stratified = value.get<bool>();
            else if (key == "initial_sharpness") t.initial_sharpness = value.get<double>();
            else if (key == "lr_grid") t.lr_grid = value.get<double>();
            else if (key == "lr_sharpness") t.lr_sharpness = value.get<double>();
            else if (key == "lr_final_fraction") t.lr_final_fraction = value.get<double>();
            else if (key == "adam_beta1") t.adam_beta1 = value.get<double>();
            else if (key == "adam_beta2") t.adam_beta2 = value.get<double>();
            else if (key == "adam_epsilon") t.adam_epsilon = value.get<double>();
            else if (key == "weight_cull") t.weight_cull = value.get<double>();
            else if (key == "seed") t.seed = value.get<uint64_t>();
            else if (key == "threads") t.threads = value.get<int>();
            else if (key == "chunk_size") t.chunk_size = value.get<int>();
            else if (key == "ablation") t.ablation = value.get<std::string>();
            else if (key == "mesh_resolution") c.mesh_resolution = value.get<int>();
            else if (key == "checkpoint_interval") c.checkpoint_interval = value.get<int>();
            else if (key == "log_interval") c.log_interval = value.get<int>();
            else if (key == "progress_interval") c.progress_interval = value.get<int>();
            else if (key == "weights") {
                for (const auto &[wk, wv] : value.items()) {
                    if (wk == "color") t.weights.color = wv.get<double>();
                    else if (wk == "polar") t.weights.polar = wv.get<double>();
                    else if (wk == "eigvec") t.weights.eigvec = wv.get<double>();
                    else if (wk == "eikonal") t.weights.eikonal = wv.get<double>();
                    else if (wk == "mask") t.weights.mask = wv.get<double>();
                    else if (wk == "cov_activation_fraction") t.weights.cov_activation_fraction = wv.get<double>();
                    else throw UsageError("unknown config key: weights." + wk);
                }
            } else {
                throw UsageError("unknown config key: " + key);
            }
        }
    } catch (const json::exception &e) {
        throw UsageError(std::string("bad config value: ") + e.what());
    }
    return c;
}

RunConfig load_run_config(const fs::path &path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception &e) {
        throw UsageError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    RunConfig c = run_config_from_json(j);
    // Relative paths inside a config file are relative to the file.
    const fs::path base = path.parent_path();
    if (!c.dataset.empty() && c.dataset.is_relative()) c.dataset = base / c.dataset;
    if (!c.output.empty() && c.output.is_relative()) c.output = base / c.output;
    return c;
}

std::string config_hash(const json &j) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : j.dump()) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_run_record(const fs::path &path, const std::string &command, const json &config, uint64_t seed,
                      const std::string &status) {
    const json record{
        {"command", command},
        {"status", status},
        {"seed", seed},
        {"config", config},
        {"config_hash", config_hash(config)},
        {"versions",
         {{"polsdf", POLSDF_VERSION},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"compiler", __VERSION__}}},
    };
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << record.dump(2) << '\n';
}

namespace {

// ---------------------------------------------------------------- synth

struct SynthArgs {
    std::string scene = "sphere";
    int views = 20;
    std::string out;
    uint64_t seed = 0;
    int width = 64;
    int height = 64;
    double sigma_psi = -1.0;
    bool stokes = false;
};

int cmd_synth(const SynthArgs &a) {
    SynthScene scene = make_scene(a.scene);
    if (a.sigma_psi >= 0.0) scene.sigma_psi = a.sigma_psi;
    SynthOptions opts;
    opts.width = a.width;
    opts.height = a.height;
    opts.write_stokes = a.stokes;
    synth_dataset(scene, a.views, a.seed, a.out, opts);
    const json config{{"scene", a.scene}, {"views", a.views},      {"width", a.width},
                      {"height", a.height}, {"sigma_psi", scene.sigma_psi}, {"stokes", a.stokes}};
    write_run_record(fs::path(a.out) / "run.json", "synth", config, a.seed, "ok");
    std::printf("synth: scene=%s views=%d size=%dx%d seed=%llu sigma_psi=%g -> %s\n", a.scene.c_str(), a.views,
                a.width, a.height, static_cast<unsigned long long>(a.seed), scene.sigma_psi, a.out.c_str());
    return kOk;
}

// ---------------------------------------------------------- reconstruct

// Keeps rows of an earlier loss.csv that precede `iteration`.
std::vector<std::string> previous_rows(const fs::path &csv, int iteration) {
    std::vector<std::string> rows;
    std::ifstream in(csv);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (std::stoi(line.substr(0, line.find(','))) < iteration) rows.push_back(line);
    }
    return rows;
}

int cmd_reconstruct(const RunConfig &cfg, bool resume) {
    cfg.validate();
    if (!fs::is_directory(cfg.dataset)) throw DataError("dataset directory not found: " + cfg.dataset.string());
    const Dataset data = load_dataset(cfg.dataset);
    fs::create_directories(cfg.output);
    const fs::path ckpt = cfg.output / "checkpoint";
    const fs::path csv_path = cfg.output / "loss.csv";
    const json config = to_json(cfg);

    Trainer trainer(data, cfg.train);
    std::vector<std::string> rows;
    if (resume) {
        trainer.load_checkpoint(ckpt);
        rows = previous_rows(csv_path, trainer.iteration());
        std::fprintf(stderr, "reconstruct: resuming at iteration %d\n", trainer.iteration());
    }

    std::ofstream csv(csv_path, std::ios::trunc);
    if (!csv) throw Error("cannot write " + csv_path.string());
    csv << loss_csv_header() << '\n';
    for (const auto &r : rows) csv << r << '\n';

    const int total = cfg.train.iterations;
    const auto start = std::chrono::steady_clock::now();
    try {
        trainer.run([&](const LossRecord &rec) {
            const bool last = rec.iteration + 1 == total;
            if (rec.iteration % cfg.log_interval == 0 || last) csv << loss_csv_row(rec) << '\n';
            if (cfg.progress_interval > 0 && (rec.iteration % cfg.progress_interval == 0 || last)) {
                const double secs =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                std::fprintf(stderr, "[%5d/%d] total %.5f color %.5f mean %.4f cov %.4f eik %.4f mask %.4f  s=%.1f  %.0fs\n",
                             rec.iteration, total, rec.loss.total, rec.loss.color, rec.loss.mean, rec.loss.cov,
                             rec.loss.eikonal, rec.loss.mask, trainer.field().sharpness(), secs);
            }
            if (cfg.checkpoint_interval > 0 && (rec.iteration + 1) % cfg.checkpoint_interval == 0 && !last) {
                csv.flush();
                trainer.save_checkpoint(ckpt);
            }
        });
    } catch (const NumericalError &) {
        csv.flush();
        trainer.save_checkpoint(ckpt);
        write_run_record(cfg.output / "run.json", "reconstruct", config, cfg.train.seed, "numerical_abort");
        throw;
    }
    csv.close();
    trainer.save_checkpoint(ckpt);

    const Mesh mesh = marching_cubes(sample_grid(trainer.field(), cfg.mesh_resolution));
    if (mesh.empty()) {
        write_run_record(cfg.output / "run.json", "reconstruct", config, cfg.train.seed, "empty_mesh");
        throw NumericalError("reconstructed field has no zero crossing");
    }
    write_ply(cfg.output / "mesh.ply", mesh);
    write_run_record(cfg.output / "run.json", "reconstruct", config, cfg.train.seed, "ok");
    std::printf("reconstruct: %d iterations, mesh %zu vertices %zu faces -> %s\n", total, mesh.vertices.size(),
                mesh.faces.size(), cfg.output.string().c_str());
    return kOk;
}

// -------------------------------------------------------------- polmaps

Image gray(const ScalarMap &m, double scale) {
    Image img(m.width, m.height, 1);
    for (size_t i = 0; i < m.data.size(); ++i) img.data[i] = float(m.data[i] * scale);
    return img;
}

int cmd_polmaps(const fs::path &stokes_dir, const fs::path &out) {
    if (!fs::is_directory(stokes_dir)) throw DataError("stokes directory not found: " + stokes_dir.string());
    std::vector<fs::path> inputs;
    const std::string suffix = ".stokes.pten";
    for (const auto &e : fs::directory_iterator(stokes_dir)) {
        const std::string name = e.path().filename().string();
        if (name.size() > suffix.size() && name.ends_with(suffix)) inputs.push_back(e.path());
    }
    if (inputs.empty()) throw DataError("no *.stokes.pten files in " + stokes_dir.string());
    std::sort(inputs.begin(), inputs.end());
    fs::create_directories(out);

    for (const auto &path : inputs) {
        const std::string name = path.filename().string();
        const std::string stem = name.substr(0, name.size() - suffix.size());
        const PolPriors pri = stokes_to_priors(stokes_from_tensor(load_map(path)));
        const ScalarMap rew = reweight_aop(pri);
        const auto gaussians = extract_prior_gaussians(pri);
        ScalarMap doa_map(pri.width(), pri.height());
        for (size_t i = 0; i < gaussians.data.size(); ++i)
            if (gaussians.data[i].valid) doa_map.data[i] = doa(gaussians.data[i]);

        const fs::path base = out / stem;
        save_map(base.string() + ".aop.pten", scalar_map_to_tensor(pri.aop));
        save_map(base.string() + ".dop.pten", scalar_map_to_tensor(pri.dop));
        save_map(base.string() + ".reweighted_aop.pten", scalar_map_to_tensor(rew));
        save_map(base.string() + ".doa.pten", scalar_map_to_tensor(doa_map));
        save_map(base.string() + ".gaussians.pten", gaussians_to_tensor(gaussians));
        write_png(base.string() + ".aop.png", gray(pri.aop, 1.0 / kPi));
        write_png(base.string() + ".dop.png", gray(pri.dop, 1.0));
        write_png(base.string() + ".reweighted_aop.png", gray(rew, 1.0 / kPi));
        write_png(base.string() + ".doa.png", doa_visualization(gaussians));
    }
    write_run_record(out / "run.json", "polmaps", json{{"stokes", stokes_dir.string()}}, 0, "ok");
    std::printf("polmaps: %zu views -> %s\n", inputs.size(), out.string().c_str());
    return kOk;
}

// ----------------------------------------------------------------- eval

struct EvalArgs {
    std::string mesh;
    std::string gt_mesh;
    std::string scene;
    std::string out;
    size_t samples = 100000;
    uint64_t seed = 0;
};

int cmd_eval(const EvalArgs &a) {
    const Mesh mesh = read_ply(a.mesh);
    if (mesh.empty()) throw DataError("mesh " + a.mesh + " is empty");
    EvalReport report;
    if (!a.scene.empty()) {
        const SynthScene scene = make_scene(a.scene);
        report = evaluate_mesh(mesh, scene.shape, scene.bbox, a.samples, a.seed);
        report.scene = a.scene;
    } else {
        const Mesh gt = read_ply(a.gt_mesh);
        if (gt.empty()) throw DataError("mesh " + a.gt_mesh + " is empty");
        report = evaluate_mesh(mesh, gt, a.samples, a.seed);
        report.scene = fs::path(a.gt_mesh).stem().string();
    }
    append_report_csv(a.out, report);
    const json config{{"mesh", a.mesh}, {"gt_mesh", a.gt_mesh}, {"scene", a.scene}, {"samples", a.samples}};
    write_run_record(a.out + ".run.json", "eval", config, a.seed, "ok");
    std::printf("eval: chamfer %.6g normal error %.4g deg -> %s\n", report.chamfer, report.normal_error_deg,
                a.out.c_str());
    return kOk;
}

// ------------------------------------------------------------- splatvis

struct SplatArgs {
    std::string checkpoint;
    std::string cameras;
    int view = 0;
    std::string out;
    int samples = 64;
};

int cmd_splatvis(const SplatArgs &a) {
    const SdfField field = load_field(a.checkpoint);
    const auto cams = load_cameras(a.cameras);
    if (a.view < 0 || a.view >= int(cams.size())) throw DataError("view index out of range");
    const Camera &cam = cams[a.view];
    SamplerOptions opts;
    opts.samples = a.samples;
    opts.stratified = false;

    Image rgb(cam.width, cam.height, 3);
    ScalarMap aop(cam.width, cam.height);
    PixelMap<Gaussian2> gaussians(cam.width, cam.height);
    for (int y = 0; y < cam.height; ++y) {
        for (int x = 0; x < cam.width; ++x) {
            const PixelRender r = render_pixel(field, cam, {x, y}, opts);
            for (int c = 0; c < 3; ++c) rgb.at(y, x, c) = float(r.color[c]);
            if (r.valid && r.opacity > 0.5) {
                aop(x, y) = r.aop;
                gaussians(x, y) = r.gaussian;
            }
        }
    }
    const fs::path out(a.out);
    fs::create_directories(out);
    write_png(out / "rgb.png", rgb);
    write_png(out / "aop.png", gray(aop, 1.0 / kPi));
    write_png(out / "doa.png", doa_visualization(gaussians));
    save_map(out / "aop.pten", scalar_map_to_tensor(aop));
    save_map(out / "gaussians.pten", gaussians_to_tensor(gaussians));
    const json config{{"checkpoint", a.checkpoint}, {"cameras", a.cameras}, {"view", a.view}, {"samples", a.samples}};
    write_run_record(out / "run.json", "splatvis", config, 0, "ok");
    std::printf("splatvis: view %d (%dx%d) -> %s\n", a.view, cam.width, cam.height, a.out.c_str());
    return kOk;
}

}  // namespace

int run(int argc, const char *const *argv) {
    CLI::App app{"polsdf: polarization-guided SDF reconstruction"};
    app.require_subcommand(1);
    app.set_version_flag("--version", POLSDF_VERSION);

    SynthArgs sa;
    auto *synth = app.add_subcommand("synth", "Render a synthetic polarimetric dataset");
    synth->add_option("--scene", sa.scene, "Scene preset")->check(CLI::IsMember(kScenes));
    synth->add_option("--views", sa.views, "Number of views")->check(CLI::PositiveNumber);
    synth->add_option("--out", sa.out, "Output directory")->required();
    synth->add_option("--seed", sa.seed, "Noise seed");
    synth->add_option("--width", sa.width, "Image width")->check(CLI::PositiveNumber);
    synth->add_option("--height", sa.height, "Image height")->check(CLI::PositiveNumber);
    synth->add_option("--sigma-psi", sa.sigma_psi, "Azimuth noise in radians (scaled by 1 - DoP)")
        ->check(CLI::NonNegativeNumber);
    synth->add_flag("--stokes", sa.stokes, "Also write Stokes tensors");

    std::string config_path, data_dir, out_dir, ablation;
    int iterations = 0, batch = 0, grid = 0, levels = 0, samples = 0, threads = 0, mesh_res = 0, log_interval = 0;
    int checkpoint_interval = 0;
    uint64_t seed = 0;
    bool resume = false;
    auto *rec = app.add_subcommand("reconstruct", "Optimize an SDF against a dataset and extract a mesh");
    rec->add_option("config,--config", config_path, "JSON run config; flags override its values")
        ->check(CLI::ExistingFile);
    auto *o_data = rec->add_option("--data", data_dir, "Dataset directory");
    auto *o_out = rec->add_option("--out", out_dir, "Output directory");
    auto *o_iter = rec->add_option("--iterations", iterations)->check(CLI::PositiveNumber);
    auto *o_batch = rec->add_option("--batch", batch, "Rays per iteration, 0 = all pixels")
                        ->check(CLI::NonNegativeNumber);
    auto *o_grid = rec->add_option("--grid", grid, "Grid vertices per axis")->check(CLI::Range(2, 1024));
    auto *o_levels = rec->add_option("--levels", levels, "Coarse-to-fine grid levels")->check(CLI::PositiveNumber);
    auto *o_samples = rec->add_option("--samples", samples, "Samples per ray")->check(CLI::Range(2, 4096));
    auto *o_seed = rec->add_option("--seed", seed);
    auto *o_ablation = rec->add_option("--ablation", ablation)->check(CLI::IsMember(kAblations));
    auto *o_threads = rec->add_option("--threads", threads, "Worker cap")->check(CLI::PositiveNumber);
    auto *o_mesh = rec->add_option("--mesh-resolution", mesh_res)->check(CLI::Range(2, 2048));
    auto *o_log = rec->add_option("--log-interval", log_interval)->check(CLI::PositiveNumber);
    auto *o_ckpt = rec->add_option("--checkpoint-interval", checkpoint_interval)->check(CLI::NonNegativeNumber);
    rec->add_flag("--resume", resume, "Continue from <out>/checkpoint");

    std::string stokes_dir, pol_out;
    auto *pol = app.add_subcommand("polmaps", "AoP, DoP, reweighted AoP and DoA maps from Stokes tensors");
    pol->add_option("--stokes", stokes_dir, "Directory of *.stokes.pten files")->required();
    pol->add_option("--out", pol_out, "Output directory")->required();

    EvalArgs ea;
    auto *ev = app.add_subcommand("eval", "Chamfer distance and normal error of a mesh");
    ev->add_option("--mesh", ea.mesh, "Reconstructed mesh (PLY)")->required()->check(CLI::ExistingFile);
    auto *o_gt = ev->add_option("--gt-mesh", ea.gt_mesh, "Reference mesh (PLY)")->check(CLI::ExistingFile);
    auto *o_scene = ev->add_option("--scene", ea.scene, "Analytic scene preset")->check(CLI::IsMember(kScenes));
    o_gt->excludes(o_scene);
    ev->add_option("--out", ea.out, "Report CSV (rows are appended)")->required();
    ev->add_option("--samples", ea.samples, "Samples per surface")->check(CLI::PositiveNumber);
    ev->add_option("--seed", ea.seed);

    SplatArgs pa;
    auto *sv = app.add_subcommand("splatvis", "Render splatted normal Gaussians of a trained field");
    sv->add_option("--checkpoint", pa.checkpoint, "Field checkpoint directory")->required();
    sv->add_option("--cameras", pa.cameras, "cameras.txt")->required()->check(CLI::ExistingFile);
    sv->add_option("--view", pa.view, "Camera index")->check(CLI::NonNegativeNumber);
    sv->add_option("--out", pa.out, "Output directory")->required();
    sv->add_option("--samples", pa.samples, "Samples per ray")->check(CLI::Range(2, 4096));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (*synth) return cmd_synth(sa);
        if (*rec) {
            RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
            if (*o_data) cfg.dataset = data_dir;
            if (*o_out) cfg.output = out_dir;
            if (*o_iter) cfg.train.iterations = iterations;
            if (*o_batch) cfg.train.batch_size = batch;
            if (*o_grid) cfg.train.grid_resolution = grid;
            if (*o_levels) cfg.train.grid_levels = levels;
            if (*o_samples) cfg.train.sampler.samples = samples;
            if (*o_seed) cfg.train.seed = seed;
            if (*o_ablation) cfg.train.ablation = ablation;
            if (*o_threads) cfg.train.threads = threads;
            if (*o_mesh) cfg.mesh_resolution = mesh_res;
            if (*o_log) cfg.log_interval = log_interval;
            if (*o_ckpt) cfg.checkpoint_interval = checkpoint_interval;
            return cmd_reconstruct(cfg, resume);
        }
        if (*pol) return cmd_polmaps(stokes_dir, pol_out);
        if (*ev) {
            if (ea.scene.empty() && ea.gt_mesh.empty()) throw UsageError("eval needs --gt-mesh or --scene");
            return cmd_eval(ea);
        }
        if (*sv) return cmd_splatvis(pa);
    } catch (const UsageError &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const NumericalError &e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return kNumericalAbort;
    } catch (const Error &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kDataError;
    } catch (const fs::filesystem_error &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kDataError;
    }
    return kUsage;
}

int run(const std::vector<std::string> &args) {
    std::vector<const char *> argv;
    argv.push_back("polsdf");
    for (const auto &a : args) argv.push_back(a.c_str());
    return run(int(argv.size()), argv.data());
}

}  // namespace polsdf::cli
