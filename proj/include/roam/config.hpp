// Flat key=value run configuration shared by all CLI subcommands.
#pragma once

#include <filesystem>
#include <string>

#include "roam/predictor.hpp"
#include "roam/sim.hpp"
#include "roam/world.hpp"

namespace roam {

struct RunConfig {
    WorldParams world;
    PlannerConfig planner;
    CameraConfig camera;
    LidarConfig lidar;
    double robot_radius = kRobotRadius;
    double odom_noise_sigma = 0.0;
    double imu_noise_sigma = 0.0;
    TrainConfig train;
    std::uint64_t seed_train = 1;
    std::uint64_t seed_split = 1;

    SimConfig sim_config() const {
        SimConfig cfg;
        cfg.planner = planner;
        cfg.camera = camera;
        cfg.lidar = lidar;
        cfg.robot_radius = robot_radius;
        cfg.odom_noise_sigma = odom_noise_sigma;
        cfg.imu_noise_sigma = imu_noise_sigma;
        return cfg;
    }
};

// Parses `key=value` lines ('#' starts a comment). Unknown keys are rejected;
// absent keys keep their defaults. See docs/config.md for the key list.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

/// The full key set with current values, in config-file syntax.
std::string run_config_to_string(const RunConfig& cfg);

}  // namespace roam
