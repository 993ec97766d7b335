#include "roam/render.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "roam/geometry.hpp"

namespace roam {
namespace {

constexpr double kWallHeight = 2.2;      // m, floor to ceiling
constexpr double kMaxRenderDist = 20.0;  // m
constexpr double kMinAgentDepth = 0.05;  // m, billboards closer are skipped

constexpr double kWallPalette[8][3] = {
    {0.58, 0.52, 0.46}, {0.46, 0.54, 0.60}, {0.60, 0.46, 0.44}, {0.50, 0.58, 0.46},
    {0.54, 0.48, 0.58}, {0.62, 0.58, 0.44}, {0.44, 0.56, 0.54}, {0.56, 0.44, 0.52},
};
constexpr double kAgentPalette[6][3] = {
    {0.85, 0.25, 0.20}, {0.20, 0.35, 0.85}, {0.20, 0.70, 0.30},
    {0.90, 0.75, 0.20}, {0.75, 0.25, 0.75}, {0.20, 0.70, 0.75},
};
constexpr double kFloorColor[3] = {0.30, 0.28, 0.26};
constexpr double kCeilColor[3] = {0.84, 0.84, 0.88};

struct AgentSprite {
    double z;       // camera-axis depth of center
    double x;       // camera-right offset of center
    double radius;
    double height;
    int color_id;
};

void render_view(const World& world, double cam_x, double cam_y, double yaw, double t,
                 const CameraConfig& cam, Frame& frame, DepthMap* depth) {
    const int w = cam.width;
    const int h = cam.height;
    const double f = (w / 2.0) / std::tan(cam.hfov / 2.0);  // focal length, px
    const double h_c = cam.height_above_floor;
    const double fwd_x = std::cos(yaw), fwd_y = std::sin(yaw);
    const double right_x = std::sin(yaw), right_y = -std::cos(yaw);

    // Agents as billboards, far to near so the strict depth test is stable.
    std::vector<AgentSprite> sprites;
    for (const Agent& a : world.agents) {
        const Pose2 ap = agent_pose_at(a, t);
        const double rel_x = ap.x - cam_x, rel_y = ap.y - cam_y;
        const double z = rel_x * fwd_x + rel_y * fwd_y;
        if (z <= kMinAgentDepth) continue;
        sprites.push_back(AgentSprite{z, rel_x * right_x + rel_y * right_y, a.radius,
                                      a.height, a.color_id});
    }
    std::sort(sprites.begin(), sprites.end(), [](const AgentSprite& a, const AgentSprite& b) {
        return a.z != b.z ? a.z > b.z : a.color_id < b.color_id;
    });

    std::vector<double> zbuf(size_t(w) * h, kInf);
    auto put = [&](int r, int c, const double* color, double z) {
        frame.at(r, c, 0) = color[0];
        frame.at(r, c, 1) = color[1];
        frame.at(r, c, 2) = color[2];
        zbuf[size_t(r) * w + c] = z;
    };

    for (int j = 0; j < w; ++j) {
        const double x_off = (j + 0.5 - w / 2.0) / f;
        const double gamma = std::atan(x_off);
        const double ang = yaw + gamma;
        const double dx = std::cos(ang), dy = std::sin(ang);

        double hit_t = kInf;
        int hit_wall = -1;
        for (size_t k = 0; k < world.walls.size(); ++k) {
            if (auto tt = ray_segment(cam_x, cam_y, dx, dy, world.walls[k])) {
                if (*tt < hit_t) {
                    hit_t = *tt;
                    hit_wall = int(k);
                }
            }
        }
        const double cos_g = std::cos(gamma);
        const double wall_z = hit_t * cos_g;
        const bool has_wall = hit_wall >= 0 && wall_z <= kMaxRenderDist;

        double r_top_f = h / 2.0 - 0.5;  // wall span in fractional row coords
        double r_bot_f = h / 2.0 - 0.5;
        if (has_wall) {
            r_top_f = h / 2.0 - 0.5 - f * (kWallHeight - h_c) / wall_z;
            r_bot_f = h / 2.0 - 0.5 + f * h_c / wall_z;
        }
        for (int r = 0; r < h; ++r) {
            const double y_off = (h / 2.0 - 0.5 - r) / f;  // up positive
            if (has_wall && r >= r_top_f && r <= r_bot_f) {
                put(r, j, kWallPalette[hit_wall % 8], wall_z);
            } else if (y_off > 0.0) {
                const double z = (kWallHeight - h_c) / y_off;
                put(r, j, kCeilColor, z);
            } else if (y_off < 0.0) {
                const double z = h_c / (-y_off);
                put(r, j, kFloorColor, z);
            } else {
                put(r, j, kFloorColor, kInf);  // exactly horizontal, open horizon
            }
        }
    }

    for (const AgentSprite& s : sprites) {
        const double u_c = w / 2.0 - 0.5 + f * (s.x / s.z);
        const double half_w = f * s.radius / s.z;
        const int c0 = std::max(0, int(std::ceil(u_c - half_w)));
        const int c1 = std::min(w - 1, int(std::floor(u_c + half_w)));
        const double rt = h / 2.0 - 0.5 - f * (s.height - h_c) / s.z;
        const double rb = h / 2.0 - 0.5 + f * h_c / s.z;
        const int r0 = std::max(0, int(std::ceil(rt)));
        const int r1 = std::min(h - 1, int(std::floor(rb)));
        const double* color = kAgentPalette[s.color_id % 6];
        for (int r = r0; r <= r1; ++r) {
            for (int c = c0; c <= c1; ++c) {
                if (s.z < zbuf[size_t(r) * w + c]) {
                    put(r, c, color, s.z);
                }
            }
        }
    }

    if (depth != nullptr) {
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                depth->at(r, c) = zbuf[size_t(r) * w + c];
            }
        }
    }
}

}  // namespace

StereoFrame render_ego(const World& world, const Pose2& pose, double t,
                       const CameraConfig& cam) {
    if (cam.width < 8 || cam.height < 8 || !(cam.hfov > 0.0) || !(cam.hfov < kPi) ||
        !(cam.baseline > 0.0)) {
        throw std::invalid_argument("render_ego: invalid camera config");
    }
    if (!world.bounds.contains(pose.x, pose.y)) {
        throw std::invalid_argument("render_ego: pose outside world bounds");
    }
    StereoFrame out;
    out.left = Frame(cam.width, cam.height);
    out.right = Frame(cam.width, cam.height);
    out.depth = DepthMap(cam.width, cam.height);

    render_view(world, pose.x, pose.y, pose.yaw, t, cam, out.left, &out.depth);
    const double right_x = pose.x + cam.baseline * std::sin(pose.yaw);
    const double right_y = pose.y - cam.baseline * std::cos(pose.yaw);
    render_view(world, right_x, right_y, pose.yaw, t, cam, out.right, nullptr);
    return out;
}

}  // namespace roam
