#include <doctest.h>

#include <sstream>

#include "roam/lidar.hpp"
#include "roam/world.hpp"

using namespace roam;

TEST_SUITE("world") {

TEST_CASE("identical seed and params reproduce an identical world") {
    const World a = generate_world(7);
    const World b = generate_world(7);
    CHECK(a == b);
    CHECK(scene_to_string(a) == scene_to_string(b));
}

TEST_CASE("agent count zero gives an empty agent list") {
    WorldParams p;
    p.agent_count = 0;
    const World w = generate_world(7, p);
    CHECK(w.agents.empty());
    CHECK(!w.walls.empty());
}

TEST_CASE("different seeds give different wall layouts") {
    const World a = generate_world(7);
    const World b = generate_world(8);
    CHECK(a.walls != b.walls);
}

TEST_CASE("parameter ranges are enforced") {
    WorldParams p;
    p.corridor_count = 0;
    CHECK_THROWS_AS(generate_world(1, p), std::invalid_argument);
    p = WorldParams{};
    p.corridor_count = 9;
    CHECK_THROWS_AS(generate_world(1, p), std::invalid_argument);
    p = WorldParams{};
    p.corridor_width = 1.2;
    CHECK_THROWS_AS(generate_world(1, p), std::invalid_argument);
    p = WorldParams{};
    p.corridor_width = 4.5;
    CHECK_THROWS_AS(generate_world(1, p), std::invalid_argument);
    p = WorldParams{};
    p.agent_count = 11;
    CHECK_THROWS_AS(generate_world(1, p), std::invalid_argument);
}

TEST_CASE("agent waypoints lie inside bounds and spawn is clear") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 11ULL, 99ULL}) {
        WorldParams p;
        p.agent_count = 6;
        p.walk_prob = 0.6;
        const World w = generate_world(seed, p);
        for (const Agent& a : w.agents) {
            CHECK(a.radius > 0.0);
            CHECK(a.speed >= 0.0);
            if (a.behavior == AgentBehavior::kWalk) {
                CHECK(a.waypoints.size() >= 2);
            } else {
                CHECK(a.waypoints.size() == 1);
            }
            for (const auto& wp : a.waypoints) {
                CHECK(w.bounds.contains(wp[0], wp[1]));
            }
        }
        CHECK(wall_distance(w, w.spawn.x, w.spawn.y) >= 0.5);
        for (const Agent& a : w.agents) {
            const Pose2 ap = agent_pose_at(a, 0.0);
            CHECK(std::hypot(ap.x - w.spawn.x, ap.y - w.spawn.y) >= 0.5);
        }
    }
}

TEST_CASE("walls form a closed outer boundary") {
    // Every ray from an interior point must eventually hit a wall.
    const World w = generate_world(5);
    SplitMix64 rng(123);
    for (int i = 0; i < 720; ++i) {
        const double ang = rng.uniform(0.0, 2.0 * kPi);
        const double r = cast_range(w, w.spawn.x, w.spawn.y, ang, 0.0);
        CHECK(std::isfinite(r));
    }
}

TEST_CASE("stand agent stays put") {
    Agent a;
    a.behavior = AgentBehavior::kStand;
    a.waypoints = {{1.0, 2.0}};
    for (double t : {0.0, 0.5, 100.0}) {
        const Pose2 p = agent_pose_at(a, t);
        CHECK(p.x == 1.0);
        CHECK(p.y == 2.0);
        CHECK(p.yaw == 0.0);
    }
}

TEST_CASE("walk agent traverses waypoints cyclically") {
    Agent a;
    a.behavior = AgentBehavior::kWalk;
    a.speed = 1.0;
    a.waypoints = {{0.0, 0.0}, {2.0, 0.0}};
    const Pose2 fwd = agent_pose_at(a, 1.0);
    CHECK(fwd.x == doctest::Approx(1.0));
    CHECK(fwd.y == doctest::Approx(0.0));
    CHECK(fwd.yaw == doctest::Approx(0.0));
    const Pose2 back = agent_pose_at(a, 3.0);  // return leg of the cycle
    CHECK(back.x == doctest::Approx(1.0));
    CHECK(back.y == doctest::Approx(0.0));
    CHECK(back.yaw == doctest::Approx(kPi));
}

TEST_CASE("walk agent position is speed-continuous in t") {
    Agent a;
    a.behavior = AgentBehavior::kWalk;
    a.speed = 0.8;
    a.phase = 0.3;
    a.waypoints = {{0.0, 0.0}, {1.5, 0.0}, {1.5, 1.0}};
    const double dt = 1e-3;
    for (int i = 0; i < 20000; ++i) {
        const double t = i * dt;
        const Pose2 p0 = agent_pose_at(a, t);
        const Pose2 p1 = agent_pose_at(a, t + dt);
        const double moved = std::hypot(p1.x - p0.x, p1.y - p0.y);
        CHECK(moved <= a.speed * dt + 1e-9);
    }
}

TEST_CASE("scene file round trip") {
    WorldParams p;
    p.agent_count = 5;
    p.walk_prob = 0.5;
    const World w = generate_world(21, p);
    const std::string text = scene_to_string(w);
    std::istringstream is(text);
    const World parsed = parse_scene(is);
    CHECK(parsed.walls == w.walls);
    CHECK(parsed.bounds == w.bounds);
    CHECK(parsed.spawn == w.spawn);
    CHECK(parsed.seed == w.seed);
    REQUIRE(parsed.agents.size() == w.agents.size());
    for (size_t i = 0; i < w.agents.size(); ++i) {
        CHECK(parsed.agents[i] == w.agents[i]);
    }
    CHECK(scene_to_string(parsed) == text);
}

TEST_CASE("parse_scene rejects unknown records") {
    std::istringstream is("WALL 0 0 1 0\nBOGUS 1 2 3\n");
    CHECK_THROWS(parse_scene(is));
}

}  // TEST_SUITE
