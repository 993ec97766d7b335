// On-disk sequence layout: writer, reader, validator, clip segmentation.
//
// root/seq_NNN/
//   left/000000.ppm ...     binary PPM (P6, maxval 255)
//   right/000000.ppm ...
//   depth/000000.dpt ...    "ROAMDPTH" + u32 width + u32 height + f32 LE payload
//   timestamps.txt           one ns integer per line
//   actions.txt              "<t_ns> <v> <omega>", v/omega to 6 decimals
//   lidar.csv                "<t_ns>,r0,...,r359", "inf" for no-hit
//   odom.txt                 "<t_ns> <x> <y> <yaw> <v> <omega>"
//   imu.txt                  "<t_ns> <yaw_rate> <accel>"
//   meta.txt                 key=value
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "roam/sim.hpp"

namespace roam {

inline constexpr char kDepthMagic[8] = {'R', 'O', 'A', 'M', 'D', 'P', 'T', 'H'};

/// Error with the offending file and a line (text) or byte (binary) offset.
class DatasetError : public std::runtime_error {
public:
    DatasetError(std::filesystem::path path, std::int64_t offset, bool byte_offset,
                 const std::string& message);

    const std::filesystem::path& path() const { return path_; }
    std::int64_t offset() const { return offset_; }

private:
    std::filesystem::path path_;
    std::int64_t offset_;
};

// Writes one sequence directory under root. Refuses to overwrite an existing
// directory unless force is set. Images quantize to 8 bits and actions to 6
// decimals; every other stream round-trips losslessly.
void write_sequence(const SequenceRecord& rec, const std::filesystem::path& root,
                    bool force = false);

/// Inverse of write_sequence up to the stated quantizations.
SequenceRecord read_sequence(const std::filesystem::path& root, const std::string& name);

struct Violation {
    std::string sequence;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    int sequences_checked = 0;

    bool ok() const { return violations.empty(); }
    std::string to_string() const;
};

// Validates every seq_* directory under root: equal stream lengths, strictly
// increasing timestamps with stride kFrameDtNs +- 1 ns, cross-stream
// timestamp equality, action bounds, per-step acceleration bound (with
// 6-decimal quantization slack), and depth/PPM container integrity.
ValidationReport validate(const std::filesystem::path& root);

// Clip starts 0, clip_len+gap, 2(clip_len+gap), ... while start+clip_len fits.
std::vector<int> clip_index(int seq_len, int clip_len = 50, int gap = 10);

// Deterministic seeded shuffle then a proportional split (train rounded down).
std::pair<std::vector<std::string>, std::vector<std::string>>
split_train_test(std::vector<std::string> sequences, std::pair<int, int> ratio,
                 std::uint64_t seed);

/// Sorted names of the seq_* directories under root.
std::vector<std::string> list_sequences(const std::filesystem::path& root);

// Individual file helpers (also used by the predictor CLI for clip output).
void write_ppm(const std::filesystem::path& path, const Frame& frame);
Frame read_ppm(const std::filesystem::path& path);
void write_depth(const std::filesystem::path& path, const DepthMap& depth);
DepthMap read_depth(const std::filesystem::path& path);

}  // namespace roam
