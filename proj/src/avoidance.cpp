#include "roam/avoidance.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace roam {
namespace {

struct ObstaclePoint {
    double d;         // m
    double beta_deg;  // bearing in (-180, 180]
    double cone_deg;  // collision cone half-angle
};

}  // namespace

Twist plan(const Scan& scan, const Twist& /*state*/, const PlannerConfig& cfg) {
    if (!(cfg.stop_range > 0.0) || !(cfg.stop_range < cfg.horizon) || !(cfg.r_safe > 0.0)) {
        throw std::invalid_argument("plan: invalid planner config");
    }

    std::vector<ObstaclePoint> obstacles;
    obstacles.reserve(32);
    for (int i = 0; i < kScanBeams; ++i) {
        const double d = scan.ranges[i];
        if (!std::isfinite(d) || d > cfg.horizon) continue;
        const double beta = i <= 180 ? double(i) : double(i - 360);
        const double cone = std::asin(std::min(1.0, cfg.r_safe / d)) / kDegToRad;
        obstacles.push_back(ObstaclePoint{d, beta, cone});
    }

    bool threatened = false;
    double d_min = kInf;  // nearest point threatening the current heading
    for (const ObstaclePoint& ob : obstacles) {
        if (std::abs(ob.beta_deg) <= ob.cone_deg) {
            threatened = true;
            d_min = std::min(d_min, ob.d);
        }
    }
    if (!threatened) {
        return Twist{cfg.v_max, 0.0};
    }

    // Free bearings within +-90 deg: outside every obstacle's cone.
    constexpr int kHalfArc = 90;
    std::array<bool, 2 * kHalfArc + 1> free{};
    for (int b = -kHalfArc; b <= kHalfArc; ++b) {
        bool ok = true;
        for (const ObstaclePoint& ob : obstacles) {
            if (std::abs(ob.beta_deg - double(b)) <= ob.cone_deg) {
                ok = false;
                break;
            }
        }
        free[size_t(b + kHalfArc)] = ok;
    }

    // Widest run of free bearings; equal widths resolve to the leftmost
    // (largest center bearing) so mirror-symmetric scans rotate left.
    int best_len = 0;
    double best_center = 0.0;
    int run_start = -1;
    for (int b = -kHalfArc; b <= kHalfArc + 1; ++b) {
        const bool f = b <= kHalfArc && free[size_t(b + kHalfArc)];
        if (f && run_start < 0) {
            run_start = b;
        } else if (!f && run_start >= 0) {
            const int len = b - run_start;
            const double center = 0.5 * (run_start + b - 1);
            if (len > best_len || (len == best_len && center > best_center)) {
                best_len = len;
                best_center = center;
            }
            run_start = -1;
        }
    }
    if (best_len == 0) {
        return Twist{0.0, kMaxTurnRate};  // fully blocked: rotate in place, left
    }

    const double escape_rad = best_center * kDegToRad;
    const double omega = std::clamp(cfg.k_turn * escape_rad, -kMaxTurnRate, kMaxTurnRate);
    const double v = cfg.v_max * std::clamp((d_min - cfg.stop_range) / (cfg.horizon - cfg.stop_range),
                                            0.0, 1.0);
    return Twist{v, omega};
}

}  // namespace roam
