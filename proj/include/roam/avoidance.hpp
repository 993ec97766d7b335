// Collision-cone reactive controller: scan in, commanded twist out.
#pragma once

#include "roam/core.hpp"
#include "roam/lidar.hpp"

namespace roam {

struct PlannerConfig {
    double r_safe = 0.3;      // m, obstacle standoff radius; must exceed robot radius
    double horizon = 1.5;     // m, obstacles beyond this are ignored
    double k_turn = 2.0;      // rad/s commanded per rad of escape bearing
    double v_max = kMaxForwardSpeed;  // m/s
    double stop_range = 0.35; // m, full stop at or below this clearance

    friend bool operator==(const PlannerConfig&, const PlannerConfig&) = default;
};

// Maps a scan to a twist. Finite returns within cfg.horizon become obstacle
// points (d, beta). A point threatens a candidate heading b when
// |beta - b| <= asin(min(1, r_safe / d)); the current heading (b = 0) decides
// whether the robot is threatened at all. Unthreatened: full speed straight.
// Threatened: steer at k_turn times the center bearing of the widest free arc
// within +-90 deg (ties resolved toward the left / positive omega) and scale
// speed by clearance, stopping entirely at stop_range. If no free bearing
// remains, rotate in place to the left. Output already satisfies the
// actuation envelope; clamp_action is still applied downstream for the
// acceleration limit.
Twist plan(const Scan& scan, const Twist& state, const PlannerConfig& cfg);

}  // namespace roam
