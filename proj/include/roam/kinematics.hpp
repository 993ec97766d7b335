// Differential-drive (unicycle) state propagation under the actuation envelope.
#pragma once

#include <algorithm>

#include "roam/core.hpp"

namespace roam {

// Clamps a requested action against the actuation envelope and the forward
// acceleration limit relative to the previously applied action.
// v is clipped to [0, kMaxForwardSpeed] and to previous.v +- kMaxForwardAccel*dt
// (deceleration shares the same bound); omega is clipped to +-kMaxTurnRate with
// no rate limit. Idempotent for any already-clamped value.
inline Twist clamp_action(const Twist& requested, const Twist& previous, double dt) {
    if (!std::isfinite(requested.v) || !std::isfinite(requested.omega) ||
        !std::isfinite(previous.v) || !std::isfinite(previous.omega)) {
        throw std::invalid_argument("clamp_action: non-finite twist");
    }
    if (!(dt > 0.0)) {
        throw std::invalid_argument("clamp_action: dt must be positive");
    }
    const double dv = kMaxForwardAccel * dt;
    double v = std::clamp(requested.v, 0.0, kMaxForwardSpeed);
    v = std::clamp(v, previous.v - dv, previous.v + dv);
    const double omega = std::clamp(requested.omega, -kMaxTurnRate, kMaxTurnRate);
    return Twist{v, omega};
}

// Exact constant-twist arc integration over dt. For |omega| below 1e-6 the
// motion degenerates to a straight-line advance.
inline Pose2 step(const Pose2& pose, const Twist& action, double dt) {
    Pose2 out;
    if (std::abs(action.omega) < 1e-6) {
        out.x = pose.x + action.v * std::cos(pose.yaw) * dt;
        out.y = pose.y + action.v * std::sin(pose.yaw) * dt;
        out.yaw = pose.yaw;
    } else {
        const double yaw1 = pose.yaw + action.omega * dt;
        const double k = action.v / action.omega;
        out.x = pose.x + k * (std::sin(yaw1) - std::sin(pose.yaw));
        out.y = pose.y + k * (std::cos(pose.yaw) - std::cos(yaw1));
        out.yaw = wrap_angle(yaw1);
    }
    return out;
}

}  // namespace roam
