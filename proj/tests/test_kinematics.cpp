#include <doctest.h>

#include "roam/kinematics.hpp"

using namespace roam;

namespace {

// Independent oracle for the unicycle step: classic RK4 over many substeps.
Pose2 rk4_step(const Pose2& p0, const Twist& a, double dt, int substeps) {
    double x = p0.x, y = p0.y, yaw = p0.yaw;
    const double h = dt / substeps;
    for (int i = 0; i < substeps; ++i) {
        auto fx = [&](double th) { return a.v * std::cos(th); };
        auto fy = [&](double th) { return a.v * std::sin(th); };
        const double k1x = fx(yaw), k1y = fy(yaw);
        const double k2x = fx(yaw + 0.5 * h * a.omega), k2y = fy(yaw + 0.5 * h * a.omega);
        const double k3x = k2x, k3y = k2y;
        const double k4x = fx(yaw + h * a.omega), k4y = fy(yaw + h * a.omega);
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        yaw += h * a.omega;
    }
    return Pose2{x, y, wrap_angle(yaw)};
}

}  // namespace

TEST_SUITE("kinematics") {

TEST_CASE("clamp_action: acceleration limit from standstill") {
    const Twist out = clamp_action(Twist{0.1, 0.0}, Twist{0.0, 0.0}, 1.0 / 15.0);
    CHECK(out.v == doctest::Approx(0.2 / 15.0).epsilon(1e-12));
    CHECK(out.v == doctest::Approx(0.013333).epsilon(1e-4));
    CHECK(out.omega == 0.0);
}

TEST_CASE("clamp_action: turn rate bound") {
    const Twist out = clamp_action(Twist{0.05, 2.5}, Twist{0.05, 0.0}, 1.0 / 15.0);
    CHECK(out.v == 0.05);
    CHECK(out.omega == 1.8);
}

TEST_CASE("clamp_action: the robot never reverses") {
    const Twist out = clamp_action(Twist{-0.3, 0.0}, Twist{0.0, 0.0}, 1.0 / 15.0);
    CHECK(out.v == 0.0);
    CHECK(out.omega == 0.0);
}

TEST_CASE("clamp_action: idempotent") {
    SplitMix64 rng(5);
    for (int i = 0; i < 200; ++i) {
        const Twist prev{rng.uniform(0.0, 0.1), rng.uniform(-1.8, 1.8)};
        const Twist req{rng.uniform(-0.5, 0.5), rng.uniform(-4.0, 4.0)};
        const Twist once = clamp_action(req, prev, kFrameDt);
        const Twist twice = clamp_action(once, prev, kFrameDt);
        CHECK(once == twice);
    }
}

TEST_CASE("clamp_action: rejects non-finite and bad dt") {
    CHECK_THROWS_AS(clamp_action(Twist{std::nan(""), 0.0}, Twist{}, kFrameDt),
                    std::invalid_argument);
    CHECK_THROWS_AS(clamp_action(Twist{0.1, kInf}, Twist{}, kFrameDt), std::invalid_argument);
    CHECK_THROWS_AS(clamp_action(Twist{0.1, 0.0}, Twist{}, 0.0), std::invalid_argument);
}

TEST_CASE("velocity continuity under arbitrary request sequences") {
    SplitMix64 rng(17);
    Twist prev{0.0, 0.0};
    for (int i = 0; i < 2000; ++i) {
        const Twist req{rng.uniform(-1.0, 1.0), rng.uniform(-5.0, 5.0)};
        const Twist next = clamp_action(req, prev, kFrameDt);
        CHECK(std::abs(next.v - prev.v) <= kMaxForwardAccel * kFrameDt + 1e-12);
        CHECK(next.v >= 0.0);
        CHECK(next.v <= kMaxForwardSpeed);
        CHECK(std::abs(next.omega) <= kMaxTurnRate);
        prev = next;
    }
}

TEST_CASE("step: straight advance") {
    const Pose2 out = step(Pose2{0, 0, 0}, Twist{0.1, 0.0}, 1.0);
    CHECK(out.x == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(out.y == 0.0);
    CHECK(out.yaw == 0.0);
}

TEST_CASE("step: pure rotation") {
    const Pose2 out = step(Pose2{0, 0, 0}, Twist{0.0, 1.8}, 1.0);
    CHECK(out.x == 0.0);
    CHECK(out.y == 0.0);
    CHECK(out.yaw == doctest::Approx(1.8).epsilon(1e-12));
}

TEST_CASE("step: arc against RK4 oracle and frozen values") {
    const Pose2 out = step(Pose2{0, 0, 0}, Twist{0.1, 1.8}, 1.0);
    const Pose2 oracle = rk4_step(Pose2{0, 0, 0}, Twist{0.1, 1.8}, 1.0, 20000);
    CHECK(out.x == doctest::Approx(oracle.x).epsilon(1e-9));
    CHECK(out.y == doctest::Approx(oracle.y).epsilon(1e-9));
    // Closed-form: x = (v/w) sin(w), y = (v/w)(1 - cos(w)).
    CHECK(out.x == doctest::Approx(0.054116).epsilon(1e-4));
    CHECK(out.y == doctest::Approx(0.068174).epsilon(1e-4));
    CHECK(out.yaw == doctest::Approx(1.8));
}

TEST_CASE("step: arc converges to straight step as omega -> 0") {
    const Pose2 p{0.3, -0.2, 0.7};
    const Pose2 arc = step(p, Twist{0.1, 1e-7}, kFrameDt);
    const Pose2 straight = step(p, Twist{0.1, 0.0}, kFrameDt);
    CHECK(std::abs(arc.x - straight.x) < 1e-6);
    CHECK(std::abs(arc.y - straight.y) < 1e-6);
}

TEST_CASE("step: rotational equivariance") {
    SplitMix64 rng(23);
    for (int i = 0; i < 100; ++i) {
        const double theta = rng.uniform(-kPi, kPi);
        const Pose2 p{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-kPi, kPi)};
        const Twist a{rng.uniform(0.0, 0.1), rng.uniform(-1.8, 1.8)};
        const Pose2 stepped = step(p, a, kFrameDt);
        const Pose2 rotated{p.x * std::cos(theta) - p.y * std::sin(theta),
                            p.x * std::sin(theta) + p.y * std::cos(theta),
                            wrap_angle(p.yaw + theta)};
        const Pose2 stepped_rotated = step(rotated, a, kFrameDt);
        const double ex = stepped.x * std::cos(theta) - stepped.y * std::sin(theta);
        const double ey = stepped.x * std::sin(theta) + stepped.y * std::cos(theta);
        CHECK(stepped_rotated.x == doctest::Approx(ex).epsilon(1e-9));
        CHECK(stepped_rotated.y == doctest::Approx(ey).epsilon(1e-9));
        CHECK(std::abs(std::remainder(stepped_rotated.yaw - (stepped.yaw + theta), 2 * kPi)) <
              1e-9);
    }
}

}  // TEST_SUITE
