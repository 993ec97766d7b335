// Implementations behind the roamsim CLI subcommands.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace roam {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // validation / metric / simulation failure
inline constexpr int kExitUsage = 2;    // bad invocation, missing paths, bad config

struct GenerateOptions {
    std::filesystem::path config;  // empty = defaults
    std::uint64_t seed = 1;
    int sequences = 1;
    int frames = 150;
    std::filesystem::path out;
    bool force = false;
};
int cmd_generate(const GenerateOptions& opt);

int cmd_validate(const std::filesystem::path& dir);

struct TrainOptions {
    std::filesystem::path data;
    std::filesystem::path config;  // empty = defaults
    std::filesystem::path out;     // checkpoint path; loss CSV lands at <out>.loss.csv
    bool ablation = false;
    std::filesystem::path resume;  // empty = fresh start
    int iterations_override = -1;  // -1 = use config
};
int cmd_train(const TrainOptions& opt);

struct PredictOptions {
    std::filesystem::path ckpt;
    std::filesystem::path data;
    std::filesystem::path config;  // empty = defaults
    std::string clip = "all";      // numeric id or "all"
    std::string split = "all";     // train | test | all
    int horizon = 20;
    std::filesystem::path out;
};
int cmd_predict(const PredictOptions& opt);

struct EvaluateOptions {
    std::filesystem::path pred;
    std::filesystem::path gt;
    std::filesystem::path report;   // CSV; text report lands at <report>.txt
    std::filesystem::path montage;  // optional PPM strip of GT vs prediction
};
int cmd_evaluate(const EvaluateOptions& opt);

}  // namespace roam
