// 15 Hz sense -> plan -> clamp -> step -> record loop.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "roam/avoidance.hpp"
#include "roam/image.hpp"
#include "roam/kinematics.hpp"
#include "roam/lidar.hpp"
#include "roam/render.hpp"
#include "roam/world.hpp"

namespace roam {

struct OdomSample {
    Pose2 pose;
    Twist twist;

    friend bool operator==(const OdomSample&, const OdomSample&) = default;
};

struct ImuSample {
    double yaw_rate = 0.0;       // rad/s
    double forward_accel = 0.0;  // m/s^2

    friend bool operator==(const ImuSample&, const ImuSample&) = default;
};

/// One timestamped, synchronized recording. All streams share length and
/// timestamps; action k is the command applied on [t_k, t_{k+1}).
struct SequenceRecord {
    std::string name;
    std::uint64_t seed = 0;
    CameraConfig camera;
    std::vector<std::int64_t> timestamps;  // ns, t_0 = 0, stride kFrameDtNs
    std::vector<Frame> left;
    std::vector<Frame> right;
    std::vector<DepthMap> depth;
    std::vector<Scan> scans;
    std::vector<Twist> actions;
    std::vector<OdomSample> odom;
    std::vector<ImuSample> imu;

    size_t size() const { return timestamps.size(); }

    friend bool operator==(const SequenceRecord&, const SequenceRecord&) = default;
};

struct SimConfig {
    PlannerConfig planner;
    CameraConfig camera;
    LidarConfig lidar;
    double robot_radius = kRobotRadius;  // m
    double odom_noise_sigma = 0.0;       // m / rad per-axis, 0 = exact
    double imu_noise_sigma = 0.0;        // 0 = exact
};

struct SafetyStats {
    double min_wall_distance = kInf;     // robot center to nearest wall, m
    double min_agent_clearance = kInf;   // surface-to-surface, m
};

// Simulates n_frames starting stationary at `spawn`. Frame 0 records the
// spawn with action (0, 0); every later frame k records the freshly sensed
// scan/render plus the clamped planner command applied on [t_k, t_{k+1}).
// IMU forward acceleration is the action-velocity difference times kFps.
// Aborts (std::runtime_error) if the robot disk ever intersects a wall.
SequenceRecord simulate_sequence(const World& world, const Pose2& spawn, int n_frames,
                                 const SimConfig& cfg, std::uint64_t seed,
                                 const std::string& name = "seq",
                                 SafetyStats* stats = nullptr);

}  // namespace roam
