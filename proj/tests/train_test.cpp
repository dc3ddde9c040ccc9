#include "polsdf/synth.hpp"
#include "polsdf/train.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <limits>

using namespace polsdf;

namespace {

// Small noiseless sphere dataset shared by the tests in this file.
const Dataset &toy_dataset() {
    static const Dataset data = [] {
        const auto dir = std::filesystem::temp_directory_path() / "polsdf_train_test_data";
        std::filesystem::remove_all(dir);
        synth_dataset(make_scene("sphere"), 6, 3, dir, SynthOptions{16, 16, false});
        Dataset d = load_dataset(dir);
        std::filesystem::remove_all(dir);
        return d;
    }();
    return data;
}

TrainConfig toy_config() {
    TrainConfig c;
    c.iterations = 40;
    c.batch_size = 128;
    c.grid_resolution = 12;
    c.grid_levels = 2;
    c.level_fraction = 0.5;
    c.sampler.samples = 24;
    c.seed = 11;
    return c;
}

std::vector<std::string> run_rows(TrainConfig c) {
    Trainer t(toy_dataset(), c);
    std::vector<std::string> rows;
    t.run([&](const LossRecord &r) { rows.push_back(loss_csv_row(r)); });
    return rows;
}

}  // namespace

TEST(TrainConfig, Schedule) {
    TrainConfig c;
    c.iterations = 5000;
    EXPECT_EQ(c.level_resolution(0), 16);
    EXPECT_EQ(c.level_resolution(1), 32);
    EXPECT_EQ(c.level_resolution(2), 64);
    EXPECT_EQ(c.level_start(0), 0);
    EXPECT_EQ(c.level_start(1), 1500);
    EXPECT_EQ(c.level_start(2), 3000);
    EXPECT_EQ(c.level_at(1499), 0);
    EXPECT_EQ(c.level_at(1500), 1);
    EXPECT_EQ(c.level_at(4999), 2);
}

TEST(TrainConfig, Validation) {
    TrainConfig c;
    EXPECT_NO_THROW(c.validate());
    c.iterations = 0;
    EXPECT_THROW(c.validate(), Error);
    c = TrainConfig{};
    c.level_fraction = 0.6;
    EXPECT_THROW(c.validate(), Error);
    c = TrainConfig{};
    c.threads = 0;
    EXPECT_THROW(c.validate(), Error);
    c = TrainConfig{};
    c.ablation = "bogus";
    EXPECT_THROW(Trainer(toy_dataset(), c), Error);
}

TEST(Trainer, ToyFieldLossDecreasesAlmostEveryStep) {
    TrainConfig c;
    c.iterations = 101;  // 101 losses bracket 100 updates
    c.batch_size = 0;     // full batch
    c.grid_resolution = 8;
    c.grid_levels = 1;
    c.sampler.samples = 24;
    c.sampler.stratified = false;
    c.weights.cov_activation_fraction = 0.0;
    c.lr_grid = 2e-3;
    Trainer t(toy_dataset(), c);
    std::vector<double> totals;
    t.run([&](const LossRecord &r) { totals.push_back(r.loss.total); });
    ASSERT_EQ(totals.size(), 101u);
    int decreasing = 0;
    for (size_t i = 1; i < totals.size(); ++i) decreasing += totals[i] < totals[i - 1];
    EXPECT_GE(decreasing, 90);
    EXPECT_LT(totals.back(), totals.front());
}

TEST(Trainer, SameSeedGivesIdenticalHistory) {
    EXPECT_EQ(run_rows(toy_config()), run_rows(toy_config()));
    TrainConfig other = toy_config();
    other.seed = 12;
    EXPECT_NE(run_rows(toy_config()), run_rows(other));
}

TEST(Trainer, ThreadCountDoesNotChangeHistory) {
    TrainConfig c = toy_config();
    c.threads = 3;
    EXPECT_EQ(run_rows(toy_config()), run_rows(c));
}

TEST(Trainer, ResumeReproducesUninterruptedRun) {
    polsdf::testing::TempDir dir("resume");
    const TrainConfig c = toy_config();
    const auto full = run_rows(c);
    std::vector<std::string> rows;
    {
        Trainer t(toy_dataset(), c);
        for (int i = 0; i < 27; ++i) rows.push_back(loss_csv_row(t.step()));  // crosses the level switch at 20
        t.save_checkpoint(dir.path());
    }
    Trainer resumed(toy_dataset(), c);
    resumed.load_checkpoint(dir.path());
    EXPECT_EQ(resumed.iteration(), 27);
    resumed.run([&](const LossRecord &r) { rows.push_back(loss_csv_row(r)); });
    EXPECT_EQ(rows, full);
}

TEST(Trainer, CheckpointFromOtherScheduleIsRejected) {
    polsdf::testing::TempDir dir("ckpt");
    Trainer t(toy_dataset(), toy_config());
    t.step();
    t.save_checkpoint(dir.path());
    TrainConfig c = toy_config();
    c.grid_resolution = 16;
    Trainer other(toy_dataset(), c);
    EXPECT_THROW(other.load_checkpoint(dir.path()), DataError);
}

TEST(Trainer, ColorOnlyAblationHasNoPolarizationTerms) {
    TrainConfig c = toy_config();
    c.ablation = "color-only";
    c.weights.cov_activation_fraction = 0.0;
    Trainer t(toy_dataset(), c);
    EXPECT_EQ(t.weights().polar, 0.0);
    for (int i = 0; i < 5; ++i) {
        const LossRecord r = t.step();
        EXPECT_EQ(r.loss.mean, 0.0);
        EXPECT_EQ(r.loss.cov, 0.0);
        EXPECT_GT(r.loss.color, 0.0);
    }
}

TEST(Trainer, NonFiniteFieldAborts) {
    Trainer t(toy_dataset(), toy_config());
    t.step();
    for (double &v : t.field().values()) v = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(t.step(), NumericalError);
}

TEST(LossCsv, HeaderAndRowFormat) {
    EXPECT_EQ(loss_csv_header(), "iteration,color,mean,cov,eik,mask,total");
    LossRecord r;
    r.iteration = 7;
    r.loss = LossBreakdown{0.5, 0.25, 0.0, 0.1, 1.0, 2.0};
    EXPECT_EQ(loss_csv_row(r), "7,0.5,0.25,0,0.10000000000000001,1,2");
}
