// Core value types, constants, and the portable RNG used everywhere.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace roam {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kDegToRad = kPi / 180.0;

// Recording rate and actuation envelope of the simulated platform.
inline constexpr double kFps = 15.0;
inline constexpr double kFrameDt = 1.0 / 15.0;            // s
inline constexpr std::int64_t kFrameDtNs = 66'666'667;    // round(1e9 / 15)
inline constexpr double kMaxForwardSpeed = 0.1;           // m/s
inline constexpr double kMaxTurnRate = 1.8;               // rad/s
inline constexpr double kMaxForwardAccel = 0.2;           // m/s^2
inline constexpr double kRobotRadius = 0.105;             // m, chassis disk

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a <= -kPi) {
        a += 2.0 * kPi;
    } else if (a > kPi) {
        a -= 2.0 * kPi;
    }
    return a;
}

/// Robot configuration: position in meters, yaw wrapped to (-pi, pi].
struct Pose2 {
    double x = 0.0;
    double y = 0.0;
    double yaw = 0.0;

    friend bool operator==(const Pose2&, const Pose2&) = default;
};

/// Control action: forward velocity and turn rate.
struct Twist {
    double v = 0.0;      // m/s
    double omega = 0.0;  // rad/s

    friend bool operator==(const Twist&, const Twist&) = default;
};

// Seedable 64-bit generator with a splitmix-style state transition:
//   state += 0x9E3779B97F4A7C15
//   z = state; z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//   z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31
// Pure integer arithmetic, so identical seeds reproduce identical streams
// on every platform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n), n > 0. Multiply-shift range reduction.
    std::uint64_t uniform_int(std::uint64_t n) {
        return std::uint64_t((static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    /// Standard normal via Box-Muller (portable, unlike std::normal_distribution).
    double gaussian() {
        double u1 = double((next() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        double u2 = double(next() >> 11) * 0x1.0p-53;        // [0, 1)
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    std::uint64_t state() const { return state_; }
    void set_state(std::uint64_t s) { state_ = s; }

private:
    std::uint64_t state_;
};

}  // namespace roam
