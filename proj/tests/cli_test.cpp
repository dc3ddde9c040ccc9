#include "cli.hpp"
#include "polsdf/evaluation.hpp"
#include "polsdf/priors.hpp"
#include "polsdf/synth.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace polsdf;
using polsdf::testing::read_file;
using polsdf::testing::TempDir;
namespace cli = polsdf::cli;

namespace {

std::vector<std::vector<double>> read_csv(const std::filesystem::path &p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

std::vector<std::string> tiny_reconstruct(const std::filesystem::path &data, const std::filesystem::path &out) {
    return {"reconstruct", "--data",       data.string(), "--out", out.string(), "--iterations", "12",
            "--batch",     "64",           "--grid",      "8",     "--levels",   "1",            "--samples",
            "16",          "--mesh-resolution", "24", "--log-interval", "1"};
}

}  // namespace

TEST(CliSynth, WritesViewsAndIsReproducible) {
    TempDir a("cli_a"), b("cli_b");
    for (const auto *dir : {&a, &b})
        ASSERT_EQ(cli::run({"synth", "--scene", "torus", "--views", "20", "--width", "16", "--height", "16", "--out",
                            dir->path().string()}),
                  cli::kOk);
    for (int i = 0; i < 20; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "view_%03d.png", i);
        ASSERT_TRUE(std::filesystem::exists(a / name));
        EXPECT_EQ(read_file(a / name), read_file(b / name));
    }
    EXPECT_EQ(read_file(a / "manifest.txt"), read_file(b / "manifest.txt"));
    EXPECT_TRUE(std::filesystem::exists(a / "run.json"));
}

TEST(CliSynth, UsageErrors) {
    TempDir a("cli_usage");
    EXPECT_EQ(cli::run({"synth", "--scene", "teapot", "--out", a.path().string()}), cli::kUsage);
    EXPECT_EQ(cli::run({"synth", "--scene", "sphere"}), cli::kUsage);
    EXPECT_EQ(cli::run({}), cli::kUsage);
    EXPECT_EQ(cli::run({"frobnicate"}), cli::kUsage);
    EXPECT_EQ(cli::run({"--help"}), cli::kOk);
}

TEST(CliEval, MeshAgainstItselfAndAnalyticScene) {
    TempDir d("cli_eval");
    const Mesh m = marching_cubes(sample_grid(AnalyticSdf::sphere(0.5), Box3(Vec3::Constant(-0.75), Vec3::Constant(0.75)), 32));
    write_ply(d / "m.ply", m);
    const auto csv = (d / "r.csv").string();
    ASSERT_EQ(cli::run({"eval", "--mesh", (d / "m.ply").string(), "--gt-mesh", (d / "m.ply").string(), "--out", csv,
                        "--samples", "5000"}),
              cli::kOk);
    ASSERT_EQ(cli::run({"eval", "--mesh", (d / "m.ply").string(), "--scene", "sphere", "--out", csv, "--samples",
                        "5000"}),
              cli::kOk);
    const auto rows = read_file(csv);
    EXPECT_EQ(rows.rfind("scene,chamfer,normal_error_deg,samples\nm,0,", 0), 0u) << rows;
    const auto self = rows.substr(rows.find('\n') + 1);
    EXPECT_LT(std::stod(self.substr(self.find(',', 2) + 1)), 1e-6) << rows;
    EXPECT_NE(rows.find("\nsphere,"), std::string::npos) << rows;
    EXPECT_TRUE(std::filesystem::exists(csv + ".run.json"));

    EXPECT_EQ(cli::run({"eval", "--mesh", (d / "m.ply").string(), "--out", csv}), cli::kUsage);
    EXPECT_EQ(cli::run({"eval", "--mesh", (d / "none.ply").string(), "--scene", "sphere", "--out", csv}), cli::kUsage);
    write_ply(d / "empty.ply", Mesh{});
    EXPECT_EQ(cli::run({"eval", "--mesh", (d / "empty.ply").string(), "--scene", "sphere", "--out", csv}),
              cli::kDataError);
}

TEST(CliPolmaps, MapsFromSyntheticStokes) {
    TempDir d("cli_pol");
    ASSERT_EQ(cli::run({"synth", "--scene", "sphere", "--views", "2", "--width", "32", "--height", "32", "--stokes",
                        "--out", (d / "data").string()}),
              cli::kOk);
    ASSERT_EQ(cli::run({"polmaps", "--stokes", (d / "data").string(), "--out", (d / "maps").string()}), cli::kOk);
    for (const char *kind : {"aop", "dop", "reweighted_aop", "doa"}) {
        const auto base = d / "maps" / (std::string("view_000.") + kind);
        ASSERT_TRUE(std::filesystem::exists(base.string() + ".png")) << kind;
        const Tensor t = load_map(base.string() + ".pten");
        EXPECT_EQ(t.dims, (std::vector<uint32_t>{32, 32})) << kind;
    }
    // Highlight pixels are brighter in the DoP map than the diffuse ones.
    const Tensor dop = load_map(d / "maps" / "view_000.dop.pten");
    const Tensor truth = load_map(d / "data" / "view_000.rho.pten");
    const SynthScene scene = make_scene("sphere");
    const Camera cam = fibonacci_cameras(scene, 2, 32, 32)[0];
    const SynthView v = synth_view(scene, cam, 0);
    double hi = 0.0, lo = 0.0;
    int nh = 0, nl = 0;
    for (size_t i = 0; i < dop.size(); ++i) {
        if (!(truth[i] > 0.0f)) continue;
        EXPECT_NEAR(dop[i], truth[i], 1e-6);
        if (v.specular_fraction.data[i] > 0.5) hi += dop[i], ++nh;
        else lo += dop[i], ++nl;
    }
    if (nh > 0 && nl > 0) EXPECT_GT(hi / nh, lo / nl);
}

TEST(CliPolmaps, UnpolarizedInputGivesZeroReweightedAop) {
    TempDir d("cli_unpol");
    std::filesystem::create_directories(d / "in");
    StokesImage img(8, 8);
    for (auto &s : img.data) s = {1.0, 0.0, 0.0};
    save_map(d / "in" / "flat.stokes.pten", stokes_to_tensor(img));
    ASSERT_EQ(cli::run({"polmaps", "--stokes", (d / "in").string(), "--out", (d / "out").string()}), cli::kOk);
    const Tensor rew = load_map(d / "out" / "flat.reweighted_aop.pten");
    for (float v : rew.data) EXPECT_EQ(v, 0.0f);

    std::ofstream(d / "in" / "bad.stokes.pten") << "garbage";
    EXPECT_EQ(cli::run({"polmaps", "--stokes", (d / "in").string(), "--out", (d / "out").string()}), cli::kDataError);
    EXPECT_EQ(cli::run({"polmaps", "--stokes", (d / "nowhere").string(), "--out", (d / "out").string()}),
              cli::kDataError);
}

TEST(CliReconstruct, ColorOnlyWritesOutputsWithZeroPolarizationColumns) {
    TempDir d("cli_rec");
    ASSERT_EQ(cli::run({"synth", "--scene", "sphere", "--views", "4", "--width", "16", "--height", "16", "--out",
                        (d / "data").string()}),
              cli::kOk);
    auto args = tiny_reconstruct(d / "data", d / "run");
    args.insert(args.end(), {"--ablation", "color-only"});
    ASSERT_EQ(cli::run(args), cli::kOk);
    for (const char *f : {"loss.csv", "mesh.ply", "run.json", "checkpoint/state.bin", "checkpoint/field.txt"})
        EXPECT_TRUE(std::filesystem::exists(d / "run" / f)) << f;
    const auto rows = read_csv(d / "run" / "loss.csv");
    ASSERT_EQ(rows.size(), 12u);
    for (const auto &r : rows) {
        EXPECT_EQ(r[2], 0.0);
        EXPECT_EQ(r[3], 0.0);
    }
    const auto run = nlohmann::json::parse(read_file(d / "run" / "run.json"));
    EXPECT_EQ(run["status"], "ok");
    EXPECT_EQ(run["config"]["ablation"], "color-only");
    EXPECT_EQ(run["config_hash"], cli::config_hash(run["config"]));
}

TEST(CliReconstruct, SameSeedSameLossAndResumeOfFinishedRunKeepsHistory) {
    TempDir d("cli_det");
    ASSERT_EQ(cli::run({"synth", "--scene", "sphere", "--views", "3", "--width", "16", "--height", "16", "--out",
                        (d / "data").string()}),
              cli::kOk);
    ASSERT_EQ(cli::run(tiny_reconstruct(d / "data", d / "a")), cli::kOk);
    ASSERT_EQ(cli::run(tiny_reconstruct(d / "data", d / "b")), cli::kOk);
    EXPECT_EQ(read_file(d / "a" / "loss.csv"), read_file(d / "b" / "loss.csv"));
    const std::string before = read_file(d / "a" / "loss.csv");
    auto args = tiny_reconstruct(d / "data", d / "a");
    args.push_back("--resume");
    ASSERT_EQ(cli::run(args), cli::kOk);
    EXPECT_EQ(read_file(d / "a" / "loss.csv"), before);
}

TEST(CliReconstruct, ConfigFileWithFlagOverrides) {
    TempDir d("cli_cfg");
    ASSERT_EQ(cli::run({"synth", "--scene", "sphere", "--views", "2", "--width", "12", "--height", "12", "--out",
                        (d / "data").string()}),
              cli::kOk);
    cli::RunConfig cfg;
    cfg.dataset = "data";
    cfg.output = "out";
    cfg.train.iterations = 50;
    cfg.train.grid_resolution = 8;
    cfg.train.grid_levels = 1;
    cfg.train.batch_size = 32;
    cfg.train.sampler.samples = 12;
    cfg.mesh_resolution = 16;
    std::ofstream(d / "run.json.cfg") << cli::to_json(cfg).dump(2);
    ASSERT_EQ(cli::run({"reconstruct", (d / "run.json.cfg").string(), "--iterations", "3"}), cli::kOk);
    EXPECT_EQ(read_csv(d / "out" / "loss.csv").size(), 3u);

    const cli::RunConfig back = cli::run_config_from_json(cli::to_json(cfg));
    EXPECT_EQ(cli::to_json(back), cli::to_json(cfg));

    auto j = cli::to_json(cfg);
    j["colour"] = 1.0;
    std::ofstream(d / "bad.cfg") << j.dump();
    EXPECT_EQ(cli::run({"reconstruct", (d / "bad.cfg").string()}), cli::kUsage);
}

TEST(CliReconstruct, MissingDatasetIsDataError) {
    TempDir d("cli_missing");
    EXPECT_EQ(cli::run({"reconstruct", "--data", (d / "nothing").string(), "--out", (d / "o").string(),
                        "--iterations", "2"}),
              cli::kDataError);
}

TEST(CliSplatvis, RendersMapsFromCheckpoint) {
    TempDir d("cli_splat");
    ASSERT_EQ(cli::run({"synth", "--scene", "sphere", "--views", "2", "--width", "12", "--height", "12", "--out",
                        (d / "data").string()}),
              cli::kOk);
    ASSERT_EQ(cli::run(tiny_reconstruct(d / "data", d / "run")), cli::kOk);
    ASSERT_EQ(cli::run({"splatvis", "--checkpoint", (d / "run" / "checkpoint").string(), "--cameras",
                        (d / "data" / "cameras.txt").string(), "--view", "1", "--out", (d / "vis").string(),
                        "--samples", "16"}),
              cli::kOk);
    for (const char *f : {"rgb.png", "aop.png", "doa.png", "aop.pten", "gaussians.pten"})
        EXPECT_TRUE(std::filesystem::exists(d / "vis" / f)) << f;
    EXPECT_EQ(cli::run({"splatvis", "--checkpoint", (d / "run" / "checkpoint").string(), "--cameras",
                        (d / "data" / "cameras.txt").string(), "--view", "9", "--out", (d / "vis").string()}),
              cli::kDataError);
}
