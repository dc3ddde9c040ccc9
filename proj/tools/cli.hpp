#pragma once

#include "polsdf/train.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace polsdf::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kNumericalAbort = 3 };

// Everything cmd_reconstruct needs. Loaded from JSON; unknown keys are rejected.
struct RunConfig {
    std::filesystem::path dataset;
    std::filesystem::path output;
    TrainConfig train;
    int mesh_resolution = 128;
    int checkpoint_interval = 0;  // 0: only at the end
    int log_interval = 1;         // loss.csv row stride
    int progress_interval = 250;  // stderr progress stride, 0 disables

    void validate() const;
};

nlohmann::json to_json(const RunConfig &c);
RunConfig run_config_from_json(const nlohmann::json &j);
RunConfig load_run_config(const std::filesystem::path &path);

// FNV-1a over the compact JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json &j);

// Writes run.json with the command, effective config, its hash, seed and versions.
void write_run_record(const std::filesystem::path &path, const std::string &command, const nlohmann::json &config,
                      uint64_t seed, const std::string &status);

// Entry point shared by the binary and the tests. Returns an ExitCode.
int run(int argc, const char *const *argv);
int run(const std::vector<std::string> &args);

}  // namespace polsdf::cli
