// Planar 2D laser scan by exact ray-segment / ray-disk intersection.
#pragma once

#include <array>
#include <cstdint>

#include "roam/core.hpp"
#include "roam/world.hpp"

namespace roam {

inline constexpr int kScanBeams = 360;

struct LidarConfig {
    double min_range = 0.12;   // m, LDS-01-like
    double max_range = 3.5;    // m
    double noise_sigma = 0.0;  // m, additive Gaussian per beam (0 = exact)
};

/// One sweep. ranges[i] is the return at bearing i degrees counterclockwise
/// from the robot heading; no-hit (or out of [min,max] range) is +inf.
struct Scan {
    std::array<double, kScanBeams> ranges{};
    std::int64_t t_ns = 0;

    friend bool operator==(const Scan&, const Scan&) = default;
};

// Casts a single ray from (x, y) at world angle `angle` against all walls and
// all agent disks at time t; returns the nearest hit distance or +inf.
double cast_range(const World& world, double x, double y, double angle, double t);

// Full 360-beam sweep at 1 degree resolution. Beam directions are derived by
// decomposing yaw into (whole degrees, fractional remainder), which makes an
// integer-degree rotation of the pose an exact circular shift of the ranges.
// If cfg.noise_sigma > 0, `noise_rng` must be non-null.
Scan scan(const World& world, const Pose2& pose, double t, const LidarConfig& cfg = {},
          SplitMix64* noise_rng = nullptr);

}  // namespace roam
