// Column-raycasting software renderer: stereo ego-vision RGB plus dense z-depth.
#pragma once

#include "roam/core.hpp"
#include "roam/image.hpp"
#include "roam/world.hpp"

namespace roam {

struct CameraConfig {
    int width = 64;
    int height = 64;
    double hfov = kPi / 2.0;          // rad
    double baseline = 0.063;          // m, right camera offset along camera-right
    double height_above_floor = 0.15; // m

    friend bool operator==(const CameraConfig&, const CameraConfig&) = default;
};

struct StereoFrame {
    Frame left;
    Frame right;
    DepthMap depth;  // left camera z-depth
};

// Renders the world from the robot pose at time t. Walls fill perspective
// vertical spans with a flat per-segment color, agents are colored billboards
// with behavior-dependent height, floor and ceiling are fixed colors. Depth
// is the left camera's per-pixel z-depth (camera-axis distance) of the
// nearest hit, with analytic floor/ceiling depths outside wall spans.
StereoFrame render_ego(const World& world, const Pose2& pose, double t,
                       const CameraConfig& cam = {});

}  // namespace roam
