#include <doctest.h>

#include "roam/sim.hpp"

using namespace roam;

namespace {

SimConfig small_cfg() {
    SimConfig cfg;
    cfg.camera.width = 16;
    cfg.camera.height = 16;
    return cfg;
}

World empty_box() {
    World w;
    w.bounds = Rect{0.0, 0.0, 12.0, 12.0};
    w.walls = {Segment{0, 0, 12, 0}, Segment{12, 0, 12, 12}, Segment{12, 12, 0, 12},
               Segment{0, 12, 0, 0}};
    w.spawn = Pose2{2.0, 6.0, 0.0};
    return w;
}

}  // namespace

TEST_SUITE("sim") {

TEST_CASE("single frame record starts stationary") {
    const World w = empty_box();
    const SequenceRecord rec = simulate_sequence(w, w.spawn, 1, small_cfg(), 1);
    CHECK(rec.size() == 1);
    CHECK(rec.timestamps[0] == 0);
    CHECK(rec.actions[0] == Twist{0.0, 0.0});
    CHECK(rec.imu[0].forward_accel == 0.0);
    CHECK(rec.odom[0].pose == w.spawn);
}

TEST_CASE("velocity ramps to max in exactly eight steps then holds") {
    const World w = empty_box();
    const SequenceRecord rec = simulate_sequence(w, w.spawn, 30, small_cfg(), 1);
    CHECK(rec.actions[0].v == 0.0);
    for (int k = 1; k <= 7; ++k) {
        CHECK(rec.actions[size_t(k)].v == doctest::Approx(k * 0.2 / 15.0).epsilon(1e-12));
        CHECK(rec.actions[size_t(k)].v < kMaxForwardSpeed);
    }
    for (int k = 8; k < 30; ++k) {
        CHECK(rec.actions[size_t(k)].v == kMaxForwardSpeed);
    }
}

TEST_CASE("identical inputs give byte-identical records") {
    WorldParams p;
    p.agent_count = 4;
    const World w = generate_world(33, p);
    const SequenceRecord a = simulate_sequence(w, w.spawn, 40, small_cfg(), 9);
    const SequenceRecord b = simulate_sequence(w, w.spawn, 40, small_cfg(), 9);
    CHECK(a == b);
}

TEST_CASE("streams are synchronized and clamp invariants hold") {
    WorldParams p;
    p.agent_count = 3;
    const World w = generate_world(44, p);
    const SequenceRecord rec = simulate_sequence(w, w.spawn, 80, small_cfg(), 2);
    REQUIRE(rec.size() == 80);
    CHECK(rec.left.size() == 80);
    CHECK(rec.right.size() == 80);
    CHECK(rec.depth.size() == 80);
    CHECK(rec.scans.size() == 80);
    CHECK(rec.actions.size() == 80);
    CHECK(rec.odom.size() == 80);
    CHECK(rec.imu.size() == 80);
    for (size_t k = 0; k < rec.size(); ++k) {
        CHECK(rec.timestamps[k] == std::int64_t(k) * kFrameDtNs);
        CHECK(rec.scans[k].t_ns == rec.timestamps[k]);
        if (k > 0) {
            CHECK(std::abs(rec.actions[k].v - rec.actions[k - 1].v) <=
                  kMaxForwardAccel * kFrameDt + 1e-12);
        }
        CHECK(rec.actions[k].v >= 0.0);
        CHECK(rec.actions[k].v <= kMaxForwardSpeed);
        CHECK(std::abs(rec.actions[k].omega) <= kMaxTurnRate);
        CHECK(rec.imu[k].yaw_rate == rec.actions[k].omega);
        const double prev_v = k == 0 ? 0.0 : rec.actions[k - 1].v;
        CHECK(rec.imu[k].forward_accel ==
              doctest::Approx((rec.actions[k].v - prev_v) * kFps).epsilon(1e-12));
    }
}

TEST_CASE("spawn inside a wall aborts with a diagnostic") {
    const World w = empty_box();
    const Pose2 bad{0.01, 6.0, 0.0};  // robot disk overlaps the x=0 wall
    CHECK_THROWS_AS(simulate_sequence(w, bad, 5, small_cfg(), 1), std::runtime_error);
}

TEST_CASE("n_frames must be positive") {
    const World w = empty_box();
    CHECK_THROWS_AS(simulate_sequence(w, w.spawn, 0, small_cfg(), 1), std::invalid_argument);
}

TEST_CASE("safety stats track wall distance and agent clearance") {
    WorldParams p;
    p.agent_count = 4;
    const World w = generate_world(55, p);
    SafetyStats stats;
    simulate_sequence(w, w.spawn, 40, small_cfg(), 3, "seq", &stats);
    CHECK(stats.min_wall_distance > kRobotRadius);
    CHECK(stats.min_wall_distance < 12.0);
    CHECK(stats.min_agent_clearance < kInf);
}

}  // TEST_SUITE
