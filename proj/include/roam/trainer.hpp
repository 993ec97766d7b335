// Training loop machinery: clip sampling, batched gradient steps with
// deterministic ordered reduction, checkpointing, and loss logging.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "roam/dataset.hpp"
#include "roam/predictor.hpp"

namespace roam {

/// One training sample: context + target frames with their logged actions.
struct TrainSample {
    std::vector<Tensor<float>> frames;  // context + horizon frames, [0, 1]
    std::vector<Twist> actions;         // aligned with frames
};

/// Frames (left camera) and actions of one sequence, ready for sampling.
struct LoadedSequence {
    std::string name;
    std::vector<Tensor<float>> frames;
    std::vector<Twist> actions;
};

LoadedSequence load_sequence_frames(const std::filesystem::path& root, const std::string& name);

// Draws training windows from the standard 50/10 clip segmentation of the
// given sequences: pick a clip, then a window offset inside it.
class ClipSampler {
public:
    ClipSampler(std::vector<LoadedSequence> sequences, int clip_len = 50, int gap = 10);

    /// Number of (sequence, clip) pairs available.
    size_t clip_count() const { return clips_.size(); }

    TrainSample sample_window(SplitMix64& rng, int window_len) const;

    /// Deterministic full window of a specific clip (for evaluation).
    TrainSample clip_window(size_t clip, int window_len, int offset = 0) const;

    const std::vector<LoadedSequence>& sequences() const { return sequences_; }

private:
    std::vector<LoadedSequence> sequences_;
    std::vector<std::pair<int, int>> clips_;  // (sequence index, start frame)
    int clip_len_;
};

/// Converts Frame <-> float tensor at the predictor boundary.
Tensor<float> tensor_from_frame(const Frame& f);
Frame frame_from_tensor(const Tensor<float>& t);

class Trainer {
public:
    Trainer(const TrainConfig& cfg, std::uint64_t seed, bool action_blind);

    // One optimizer step over a batch (rollout -> loss -> backward -> adam).
    // Batch items may run on several threads; per-item gradients are reduced
    // in item order so the result is independent of the thread count.
    LossTerms train_step(const std::vector<TrainSample>& batch);

    /// Draws cfg.batch windows of context + train_horizon frames.
    std::vector<TrainSample> sample_batch(const ClipSampler& sampler);

    TrainConfig cfg;
    ModelParams<float> params;
    AdamState<float> adam;
    std::uint64_t iteration = 0;
    SplitMix64 rng;
};

// Checkpoint container: magic "ACPNETCK", version u32, then named blocks of
// (name_len u32, name, rank u32, dims u32..., f32 little-endian data).
// Parameters, Adam moments, iteration, RNG state, and the ablation flag are
// all stored, so a resumed run continues bit-identically.
void save_checkpoint(const std::filesystem::path& path, const Trainer& trainer);
Trainer load_checkpoint(const std::filesystem::path& path);
/// Reads only the action_blind flag (cheap metadata probe).
bool checkpoint_is_action_blind(const std::filesystem::path& path);

void write_loss_log(const std::filesystem::path& path, const std::vector<LossTerms>& log);

/// Thread budget: ROAMSIM_THREADS env var, 0 or unset = hardware concurrency.
int thread_budget();

}  // namespace roam
