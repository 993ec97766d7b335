#include "roam/lidar.hpp"

#include <cmath>
#include <stdexcept>

namespace roam {

double cast_range(const World& world, double x, double y, double angle, double t) {
    const double dx = std::cos(angle);
    const double dy = std::sin(angle);
    double best = kInf;
    for (const Segment& s : world.walls) {
        if (auto hit = ray_segment(x, y, dx, dy, s)) {
            best = std::min(best, *hit);
        }
    }
    for (const Agent& a : world.agents) {
        const Pose2 ap = agent_pose_at(a, t);
        if (auto hit = ray_disk(x, y, dx, dy, ap.x, ap.y, a.radius)) {
            best = std::min(best, *hit);
        }
    }
    return best;
}

Scan scan(const World& world, const Pose2& pose, double t, const LidarConfig& cfg,
          SplitMix64* noise_rng) {
    if (!world.bounds.contains(pose.x, pose.y)) {
        throw std::invalid_argument("scan: pose outside world bounds");
    }
    if (cfg.noise_sigma > 0.0 && noise_rng == nullptr) {
        throw std::invalid_argument("scan: noise_sigma > 0 requires an rng");
    }
    Scan out;
    const long long n = llround(pose.yaw / kDegToRad);
    const double frac = pose.yaw - double(n) * kDegToRad;
    for (int i = 0; i < kScanBeams; ++i) {
        long long idx = (n + i) % kScanBeams;
        if (idx < 0) idx += kScanBeams;
        const double angle = frac + double(idx) * kDegToRad;
        double r = cast_range(world, pose.x, pose.y, angle, t);
        if (cfg.noise_sigma > 0.0 && std::isfinite(r)) {
            r += cfg.noise_sigma * noise_rng->gaussian();
        }
        out.ranges[i] = (r < cfg.min_range || r > cfg.max_range) ? kInf : r;
    }
    return out;
}

}  // namespace roam
