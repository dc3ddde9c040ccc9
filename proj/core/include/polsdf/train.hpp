#pragma once

#include "polsdf/dataset.hpp"
#include "polsdf/loss.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace polsdf {

struct TrainConfig {
    LossWeights weights;
    std::string ablation = "full";
    int iterations = 5000;
    int batch_size = 1024;  // rays per iteration; 0 = every pixel of every view
    int grid_resolution = 64;  // final resolution
    // Coarse-to-fine: level L of `grid_levels` runs at grid_resolution / 2^(levels-1-L)
    // and starts at iteration round(L * level_fraction * iterations).
    int grid_levels = 3;
    double level_fraction = 0.3;
    SamplerOptions sampler;
    double initial_sharpness = 20.0;
    double lr_grid = 5e-3;
    double lr_sharpness = 1.5e-3;
    double lr_final_fraction = 0.05;  // cosine decay floor
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    double weight_cull = 1e-5;
    uint64_t seed = 0;
    int threads = 1;
    int chunk_size = 64;  // rays per gradient buffer; fixes the reduction order

    void validate() const;
    int level_at(int iteration) const;
    int level_start(int level) const;
    int level_resolution(int level) const;
};

struct LossRecord {
    int iteration = 0;
    LossBreakdown loss;
};

// Optimizes a sphere-initialized field against a dataset, refining the grid on a
// fixed schedule (moments restart at each level). Every iteration draws
// its rays from an RNG seeded by (seed, iteration), and per-chunk gradients are
// merged in chunk order, so the loss history is bitwise reproducible for any
// thread count and across checkpoint/resume.
class Trainer {
  public:
    Trainer(const Dataset &data, TrainConfig config);

    // Runs one iteration and returns its loss (measured before the update).
    // Throws NumericalError on a non-finite loss or gradient; the field is left
    // at the last finite state.
    LossRecord step();

    // Runs until `config.iterations`; `on_step` sees every record.
    void run(const std::function<void(const LossRecord &)> &on_step = {});

    int iteration() const { return iteration_; }
    const SdfField &field() const { return field_; }
    SdfField &field() { return field_; }
    const TrainConfig &config() const { return config_; }
    const LossToggles &toggles() const { return toggles_; }
    const LossWeights &weights() const { return weights_; }

    // Writes the field checkpoint plus an exact optimizer state (state.bin).
    void save_checkpoint(const std::filesystem::path &dir) const;
    // Restores the exact parameters, moments and iteration counter.
    void load_checkpoint(const std::filesystem::path &dir);

  private:
    double learning_rate(double base) const;

    const Dataset &data_;
    TrainConfig config_;
    LossWeights weights_;
    LossToggles toggles_;
    SdfField field_;
    std::vector<double> m_, v_;
    int iteration_ = 0;
    int level_ = 0;

    void enter_level(int level, bool resample);

    // Scratch reused across iterations.
    std::vector<double> grad_;
    std::vector<uint8_t> touched_flag_;
    std::vector<uint32_t> touched_;
    std::vector<GradientList> lists_;
};

// loss.csv: iteration,color,mean,cov,eik,mask,total with %.17g values.
std::string loss_csv_header();
std::string loss_csv_row(const LossRecord &r);

}  // namespace polsdf
