// Procedural indoor environments: grid-carved corridor layouts with scripted
// human-like agents, fully determined by (seed, params).
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "roam/core.hpp"
#include "roam/geometry.hpp"

namespace roam {

enum class AgentBehavior { kWalk, kStand, kSit };

const char* to_string(AgentBehavior b);
AgentBehavior agent_behavior_from_string(const std::string& s);

struct Agent {
    AgentBehavior behavior = AgentBehavior::kStand;
    double radius = 0.2;   // m, collision disk
    double height = 1.7;   // m, render height (sit agents use 0.6x walk height)
    double speed = 0.0;    // m/s, walk agents only
    double phase = 0.0;    // s, offset into the waypoint cycle
    std::vector<std::array<double, 2>> waypoints;  // (x, y) m
    int color_id = 0;

    friend bool operator==(const Agent&, const Agent&) = default;
};

struct World {
    std::vector<Segment> walls;
    std::vector<Agent> agents;
    Rect bounds;
    std::uint64_t seed = 0;
    Pose2 spawn;  // collision-free robot start, 0.5 m clear of walls and agents

    friend bool operator==(const World&, const World&) = default;
};

struct WorldParams {
    int corridor_count = 3;        // [1, 8]
    double corridor_width = 2.0;   // m, [1.5, 4]
    int agent_count = 4;           // [0, 10]
    double bounds_w = 12.0;        // m, [6, 40]
    double bounds_h = 12.0;        // m, [6, 40]
    double agent_speed_min = 0.2;  // m/s
    double agent_speed_max = 0.45; // m/s
    double agent_radius_min = 0.15;
    double agent_radius_max = 0.22;
    double walk_prob = 1.0;        // probability an agent walks (rest stand/sit)

    friend bool operator==(const WorldParams&, const WorldParams&) = default;
};

// Builds a deterministic world from (seed, params). Corridors are carved into
// a 0.25 m occupancy grid (first one horizontal, later ones branching
// perpendicular at junctions), so the extracted walls always form a closed
// outer boundary. Throws std::invalid_argument for out-of-range params and
// std::runtime_error if no valid robot spawn exists.
World generate_world(std::uint64_t seed, const WorldParams& params = {});

// Pose of an agent at time t >= 0. Walk agents traverse their waypoint loop
// cyclically at constant speed with linear interpolation, yaw facing travel;
// stand/sit agents stay at their single waypoint with yaw 0.
Pose2 agent_pose_at(const Agent& agent, double t);

// Plain-text scene file round trip (one record per line, see docs/formats.md).
void write_scene(std::ostream& os, const World& world);
std::string scene_to_string(const World& world);
World parse_scene(std::istream& is);

/// Distance from a point to the nearest wall segment.
double wall_distance(const World& world, double x, double y);

}  // namespace roam
