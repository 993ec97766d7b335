#include "roam/sim.hpp"

#include <cmath>
#include <stdexcept>

namespace roam {

SequenceRecord simulate_sequence(const World& world, const Pose2& spawn, int n_frames,
                                 const SimConfig& cfg, std::uint64_t seed,
                                 const std::string& name, SafetyStats* stats) {
    if (n_frames < 1) {
        throw std::invalid_argument("simulate_sequence: n_frames must be >= 1");
    }
    SequenceRecord rec;
    rec.name = name;
    rec.seed = seed;
    rec.camera = cfg.camera;
    rec.timestamps.reserve(n_frames);

    SplitMix64 rng(seed);
    SafetyStats local;
    Pose2 pose = spawn;
    Twist prev_action{0.0, 0.0};

    for (int k = 0; k < n_frames; ++k) {
        const std::int64_t t_ns = std::int64_t(k) * kFrameDtNs;
        const double t = double(t_ns) * 1e-9;

        const double wall_d = wall_distance(world, pose.x, pose.y);
        local.min_wall_distance = std::min(local.min_wall_distance, wall_d);
        if (wall_d < cfg.robot_radius) {
            throw std::runtime_error("simulate_sequence: robot disk intersects a wall at frame " +
                                     std::to_string(k) + " (clearance " + std::to_string(wall_d) +
                                     " m < radius " + std::to_string(cfg.robot_radius) + " m)");
        }
        for (const Agent& a : world.agents) {
            const Pose2 ap = agent_pose_at(a, t);
            const double d = std::hypot(ap.x - pose.x, ap.y - pose.y) - a.radius -
                             cfg.robot_radius;
            local.min_agent_clearance = std::min(local.min_agent_clearance, d);
        }

        Scan sc = scan(world, pose, t, cfg.lidar, cfg.lidar.noise_sigma > 0.0 ? &rng : nullptr);
        sc.t_ns = t_ns;

        Twist action{0.0, 0.0};  // stationary start
        if (k > 0) {
            action = clamp_action(plan(sc, prev_action, cfg.planner), prev_action, kFrameDt);
        }

        StereoFrame view = render_ego(world, pose, t, cfg.camera);

        ImuSample imu;
        imu.yaw_rate = action.omega;
        imu.forward_accel = (action.v - prev_action.v) * kFps;
        if (cfg.imu_noise_sigma > 0.0) {
            imu.yaw_rate += cfg.imu_noise_sigma * rng.gaussian();
            imu.forward_accel += cfg.imu_noise_sigma * rng.gaussian();
        }
        OdomSample od{pose, action};
        if (cfg.odom_noise_sigma > 0.0) {
            od.pose.x += cfg.odom_noise_sigma * rng.gaussian();
            od.pose.y += cfg.odom_noise_sigma * rng.gaussian();
            od.pose.yaw = wrap_angle(od.pose.yaw + cfg.odom_noise_sigma * rng.gaussian());
        }

        rec.timestamps.push_back(t_ns);
        rec.left.push_back(std::move(view.left));
        rec.right.push_back(std::move(view.right));
        rec.depth.push_back(std::move(view.depth));
        rec.scans.push_back(sc);
        rec.actions.push_back(action);
        rec.odom.push_back(od);
        rec.imu.push_back(imu);

        pose = step(pose, action, kFrameDt);
        prev_action = action;
    }

    if (stats != nullptr) {
        *stats = local;
    }
    return rec;
}

}  // namespace roam
