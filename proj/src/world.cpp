#include "roam/world.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace roam {
namespace {

constexpr double kCell = 0.25;        // m, carving grid resolution
constexpr int kBorderCells = 2;       // uncarved margin inside the bounds
constexpr double kAgentBaseHeight = 1.7;  // m
constexpr double kSitHeightScale = 0.6;
constexpr double kSpawnClearance = 0.5;   // m

struct CellRect {
    int x0, y0, x1, y1;  // half-open cell ranges [x0,x1) x [y0,y1)
    bool horizontal;
};

void format_double(std::string& out, double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

}  // namespace

const char* to_string(AgentBehavior b) {
    switch (b) {
        case AgentBehavior::kWalk: return "walk";
        case AgentBehavior::kStand: return "stand";
        case AgentBehavior::kSit: return "sit";
    }
    return "stand";
}

AgentBehavior agent_behavior_from_string(const std::string& s) {
    if (s == "walk") return AgentBehavior::kWalk;
    if (s == "stand") return AgentBehavior::kStand;
    if (s == "sit") return AgentBehavior::kSit;
    throw std::invalid_argument("unknown agent behavior: " + s);
}

World generate_world(std::uint64_t seed, const WorldParams& params) {
    if (params.corridor_count < 1 || params.corridor_count > 8) {
        throw std::invalid_argument("corridor_count must be in [1, 8]");
    }
    if (params.corridor_width < 1.5 || params.corridor_width > 4.0) {
        throw std::invalid_argument("corridor_width must be in [1.5, 4] m");
    }
    if (params.agent_count < 0 || params.agent_count > 10) {
        throw std::invalid_argument("agent_count must be in [0, 10]");
    }
    if (params.bounds_w < 6.0 || params.bounds_w > 40.0 ||
        params.bounds_h < 6.0 || params.bounds_h > 40.0) {
        throw std::invalid_argument("bounds must be in [6, 40] m per side");
    }
    if (params.agent_speed_min < 0.0 || params.agent_speed_max < params.agent_speed_min ||
        params.agent_radius_min <= 0.0 || params.agent_radius_max < params.agent_radius_min ||
        params.walk_prob < 0.0 || params.walk_prob > 1.0) {
        throw std::invalid_argument("invalid agent parameter ranges");
    }

    SplitMix64 rng(seed);
    const int nx = int(std::lround(params.bounds_w / kCell));
    const int ny = int(std::lround(params.bounds_h / kCell));
    const int wc = std::clamp(int(std::lround(params.corridor_width / kCell)), 2,
                              std::min(nx, ny) - 2 * kBorderCells - 1);

    std::vector<std::uint8_t> carved(size_t(nx) * ny, 0);
    auto carve = [&](const CellRect& r) {
        for (int y = std::max(r.y0, kBorderCells); y < std::min(r.y1, ny - kBorderCells); ++y) {
            for (int x = std::max(r.x0, kBorderCells); x < std::min(r.x1, nx - kBorderCells); ++x) {
                carved[size_t(y) * nx + x] = 1;
            }
        }
    };

    std::vector<CellRect> rects;
    {
        // First corridor spans horizontally through a random band.
        const int y0 = kBorderCells +
                       int(rng.uniform_int(std::uint64_t(ny - 2 * kBorderCells - wc + 1)));
        CellRect r{kBorderCells, y0, nx - kBorderCells, y0 + wc, true};
        carve(r);
        rects.push_back(r);
    }
    for (int c = 1; c < params.corridor_count; ++c) {
        const CellRect& parent = rects[rng.uniform_int(rects.size())];
        const int min_len = int(std::lround(3.0 / kCell));
        CellRect r{};
        if (parent.horizontal) {
            const int x0 = parent.x0 +
                           int(rng.uniform_int(std::uint64_t(std::max(1, parent.x1 - parent.x0 - wc))));
            const bool down = rng.uniform_int(2) == 0;
            const int len = min_len + int(rng.uniform_int(std::uint64_t(ny)));
            const int y0 = down ? parent.y0 - len : parent.y0;
            r = CellRect{x0, y0, x0 + wc, y0 + len + wc, false};
        } else {
            const int y0 = parent.y0 +
                           int(rng.uniform_int(std::uint64_t(std::max(1, parent.y1 - parent.y0 - wc))));
            const bool left = rng.uniform_int(2) == 0;
            const int len = min_len + int(rng.uniform_int(std::uint64_t(nx)));
            const int x0 = left ? parent.x0 - len : parent.x0;
            r = CellRect{x0, y0, x0 + len + wc, y0 + wc, true};
        }
        carve(r);
        r.x0 = std::clamp(r.x0, kBorderCells, nx - kBorderCells);
        r.x1 = std::clamp(r.x1, kBorderCells, nx - kBorderCells);
        r.y0 = std::clamp(r.y0, kBorderCells, ny - kBorderCells);
        r.y1 = std::clamp(r.y1, kBorderCells, ny - kBorderCells);
        rects.push_back(r);
    }

    World world;
    world.seed = seed;
    world.bounds = Rect{0.0, 0.0, params.bounds_w, params.bounds_h};

    // Extract boundary edges between carved and uncarved cells, merged into
    // maximal collinear runs per (line, side) so each wall face is one segment.
    auto is_carved = [&](int x, int y) {
        if (x < 0 || y < 0 || x >= nx || y >= ny) return false;
        return carved[size_t(y) * nx + x] != 0;
    };
    {
        std::map<std::pair<int, int>, std::vector<int>> vertical;  // (x, side) -> ys
        std::map<std::pair<int, int>, std::vector<int>> horizontal;
        for (int y = 0; y < ny; ++y) {
            for (int x = 0; x <= nx; ++x) {
                const bool l = is_carved(x - 1, y), r = is_carved(x, y);
                if (l != r) vertical[{x, l ? 0 : 1}].push_back(y);
            }
        }
        for (int x = 0; x < nx; ++x) {
            for (int y = 0; y <= ny; ++y) {
                const bool b = is_carved(x, y - 1), t = is_carved(x, y);
                if (b != t) horizontal[{y, b ? 0 : 1}].push_back(x);
            }
        }
        auto merge_runs = [](const std::vector<int>& sorted, auto&& emit) {
            size_t i = 0;
            while (i < sorted.size()) {
                size_t j = i;
                while (j + 1 < sorted.size() && sorted[j + 1] == sorted[j] + 1) ++j;
                emit(sorted[i], sorted[j] + 1);
                i = j + 1;
            }
        };
        for (const auto& [key, ys] : vertical) {
            const double x = key.first * kCell;
            merge_runs(ys, [&](int y0, int y1) {
                world.walls.push_back(Segment{x, y0 * kCell, x, y1 * kCell});
            });
        }
        for (const auto& [key, xs] : horizontal) {
            const double y = key.first * kCell;
            merge_runs(xs, [&](int x0, int x1) {
                world.walls.push_back(Segment{x0 * kCell, y, x1 * kCell, y});
            });
        }
    }

    // Agents: walkers ping-pong along the long axis of one corridor; others
    // stand or sit at a fixed point.
    for (int k = 0; k < params.agent_count; ++k) {
        Agent a;
        a.color_id = k;
        a.radius = rng.uniform(params.agent_radius_min, params.agent_radius_max);
        const double behavior_draw = rng.uniform();
        if (behavior_draw < params.walk_prob) {
            a.behavior = AgentBehavior::kWalk;
        } else {
            a.behavior = rng.uniform_int(2) == 0 ? AgentBehavior::kStand : AgentBehavior::kSit;
        }
        a.height = a.behavior == AgentBehavior::kSit ? kAgentBaseHeight * kSitHeightScale
                                                     : kAgentBaseHeight;
        const CellRect& r = rects[rng.uniform_int(rects.size())];
        const double margin = a.radius + 0.08;
        const double rx0 = r.x0 * kCell + margin, rx1 = r.x1 * kCell - margin;
        const double ry0 = r.y0 * kCell + margin, ry1 = r.y1 * kCell - margin;
        if (rx1 <= rx0 || ry1 <= ry0) {
            a.behavior = AgentBehavior::kStand;
            a.height = kAgentBaseHeight;
            a.waypoints.push_back({(r.x0 + r.x1) * 0.5 * kCell, (r.y0 + r.y1) * 0.5 * kCell});
            a.speed = 0.0;
            world.agents.push_back(a);
            continue;
        }
        if (a.behavior == AgentBehavior::kWalk) {
            a.speed = rng.uniform(params.agent_speed_min, params.agent_speed_max);
            const double lateral = r.horizontal ? rng.uniform(ry0, ry1) : rng.uniform(rx0, rx1);
            const double lo = r.horizontal ? rx0 : ry0;
            const double hi = r.horizontal ? rx1 : ry1;
            const double span = hi - lo;
            const double leg = std::min(2.6, std::max(1.2, span * 0.4));
            const double start = lo + rng.uniform() * std::max(0.0, span - leg);
            const double p0 = start, p1 = std::min(hi, start + leg);
            if (r.horizontal) {
                a.waypoints.push_back({p0, lateral});
                a.waypoints.push_back({p1, lateral});
            } else {
                a.waypoints.push_back({lateral, p0});
                a.waypoints.push_back({lateral, p1});
            }
            const double cycle = 2.0 * (p1 - p0) / std::max(a.speed, 1e-9);
            a.phase = rng.uniform(0.0, cycle);
        } else {
            a.speed = 0.0;
            a.waypoints.push_back({rng.uniform(rx0, rx1), rng.uniform(ry0, ry1)});
        }
        world.agents.push_back(a);
    }

    // Robot spawn: a carved cell center at least kSpawnClearance from every
    // wall and from every agent's t=0 position, picked deterministically.
    std::vector<std::pair<double, double>> candidates;
    std::vector<double> cand_yaw;
    for (const CellRect& r : rects) {
        for (int cy = r.y0; cy < r.y1; ++cy) {
            for (int cx = r.x0; cx < r.x1; ++cx) {
                const double px = (cx + 0.5) * kCell;
                const double py = (cy + 0.5) * kCell;
                if (!is_carved(cx, cy)) continue;
                if (wall_distance(world, px, py) < kSpawnClearance) continue;
                bool clear = true;
                for (const Agent& a : world.agents) {
                    const Pose2 ap = agent_pose_at(a, 0.0);
                    const double dx = ap.x - px, dy = ap.y - py;
                    if (std::sqrt(dx * dx + dy * dy) < kSpawnClearance) {
                        clear = false;
                        break;
                    }
                }
                if (!clear) continue;
                candidates.emplace_back(px, py);
                cand_yaw.push_back(r.horizontal ? 0.0 : kPi / 2.0);
            }
        }
    }
    if (candidates.empty()) {
        throw std::runtime_error("generate_world: no valid robot spawn cell");
    }
    const size_t pick = rng.uniform_int(candidates.size());
    world.spawn = Pose2{candidates[pick].first, candidates[pick].second, cand_yaw[pick]};
    return world;
}

Pose2 agent_pose_at(const Agent& agent, double t) {
    if (t < 0.0) {
        throw std::invalid_argument("agent_pose_at: t must be >= 0");
    }
    if (agent.waypoints.empty()) {
        throw std::invalid_argument("agent_pose_at: agent has no waypoints");
    }
    if (agent.behavior != AgentBehavior::kWalk || agent.waypoints.size() < 2 ||
        agent.speed <= 0.0) {
        return Pose2{agent.waypoints[0][0], agent.waypoints[0][1], 0.0};
    }
    const size_t n = agent.waypoints.size();
    std::vector<double> leg_len(n);
    double cycle = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const auto& a = agent.waypoints[i];
        const auto& b = agent.waypoints[(i + 1) % n];
        leg_len[i] = std::hypot(b[0] - a[0], b[1] - a[1]);
        cycle += leg_len[i];
    }
    if (cycle <= 0.0) {
        return Pose2{agent.waypoints[0][0], agent.waypoints[0][1], 0.0};
    }
    double s = std::fmod(agent.speed * (t + agent.phase), cycle);
    for (size_t i = 0; i < n; ++i) {
        if (s <= leg_len[i] || i == n - 1) {
            const auto& a = agent.waypoints[i];
            const auto& b = agent.waypoints[(i + 1) % n];
            const double u = leg_len[i] > 0.0 ? s / leg_len[i] : 0.0;
            const double yaw = std::atan2(b[1] - a[1], b[0] - a[0]);
            return Pose2{a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1]), yaw};
        }
        s -= leg_len[i];
    }
    return Pose2{agent.waypoints[0][0], agent.waypoints[0][1], 0.0};
}

void write_scene(std::ostream& os, const World& world) {
    std::string line;
    line = "SEED ";
    line += std::to_string(world.seed);
    os << line << '\n';
    line = "BOUNDS ";
    format_double(line, world.bounds.min_x); line += ' ';
    format_double(line, world.bounds.min_y); line += ' ';
    format_double(line, world.bounds.max_x); line += ' ';
    format_double(line, world.bounds.max_y);
    os << line << '\n';
    line = "SPAWN ";
    format_double(line, world.spawn.x); line += ' ';
    format_double(line, world.spawn.y); line += ' ';
    format_double(line, world.spawn.yaw);
    os << line << '\n';
    for (const Segment& w : world.walls) {
        line = "WALL ";
        format_double(line, w.x1); line += ' ';
        format_double(line, w.y1); line += ' ';
        format_double(line, w.x2); line += ' ';
        format_double(line, w.y2);
        os << line << '\n';
    }
    for (const Agent& a : world.agents) {
        line = "AGENT ";
        line += to_string(a.behavior); line += ' ';
        format_double(line, a.radius); line += ' ';
        format_double(line, a.speed); line += ' ';
        format_double(line, a.phase);
        for (const auto& w : a.waypoints) {
            line += ' ';
            format_double(line, w[0]);
            line += ' ';
            format_double(line, w[1]);
        }
        os << line << '\n';
    }
}

std::string scene_to_string(const World& world) {
    std::ostringstream oss;
    write_scene(oss, world);
    return oss.str();
}

World parse_scene(std::istream& is) {
    World world;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "SEED") {
            ls >> world.seed;
        } else if (tag == "BOUNDS") {
            ls >> world.bounds.min_x >> world.bounds.min_y >> world.bounds.max_x >>
                world.bounds.max_y;
        } else if (tag == "SPAWN") {
            ls >> world.spawn.x >> world.spawn.y >> world.spawn.yaw;
        } else if (tag == "WALL") {
            Segment s;
            ls >> s.x1 >> s.y1 >> s.x2 >> s.y2;
            world.walls.push_back(s);
        } else if (tag == "AGENT") {
            Agent a;
            std::string behavior;
            ls >> behavior >> a.radius >> a.speed >> a.phase;
            a.behavior = agent_behavior_from_string(behavior);
            a.height = a.behavior == AgentBehavior::kSit ? kAgentBaseHeight * kSitHeightScale
                                                         : kAgentBaseHeight;
            double x, y;
            while (ls >> x >> y) {
                a.waypoints.push_back({x, y});
            }
            a.color_id = int(world.agents.size());
            world.agents.push_back(a);
        } else {
            throw std::runtime_error("parse_scene: unknown record '" + tag + "' at line " +
                                     std::to_string(line_no));
        }
        if (ls.fail() && !ls.eof()) {
            throw std::runtime_error("parse_scene: malformed record at line " +
                                     std::to_string(line_no));
        }
    }
    return world;
}

double wall_distance(const World& world, double x, double y) {
    double best = kInf;
    for (const Segment& s : world.walls) {
        best = std::min(best, point_segment_distance(x, y, s));
    }
    return best;
}

}  // namespace roam
