// Exact 2D ray casting primitives shared by the LiDAR model and the renderer.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

namespace roam {

struct Segment {
    double x1 = 0.0, y1 = 0.0, x2 = 0.0, y2 = 0.0;

    friend bool operator==(const Segment&, const Segment&) = default;
};

struct Rect {
    double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;

    bool contains(double x, double y) const {
        return x >= min_x && x <= max_x && y >= min_y && y <= max_y;
    }
    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }

    friend bool operator==(const Rect&, const Rect&) = default;
};

// Ray (ox,oy)+t(dx,dy) against segment. Returns the ray parameter t >= 0 of
// the intersection, or nullopt. Parallel (incl. collinear) rays miss.
inline std::optional<double> ray_segment(double ox, double oy, double dx, double dy,
                                         const Segment& s) {
    const double rx = s.x2 - s.x1;
    const double ry = s.y2 - s.y1;
    const double denom = dx * ry - dy * rx;
    if (denom == 0.0) {
        return std::nullopt;
    }
    const double qx = s.x1 - ox;
    const double qy = s.y1 - oy;
    const double t = (qx * ry - qy * rx) / denom;
    const double u = (qx * dy - qy * dx) / denom;
    if (t >= 0.0 && u >= 0.0 && u <= 1.0) {
        return t;
    }
    return std::nullopt;
}

// Ray against a disk boundary of radius r centered at (cx,cy). Returns the
// smallest non-negative ray parameter, or nullopt.
inline std::optional<double> ray_disk(double ox, double oy, double dx, double dy,
                                      double cx, double cy, double r) {
    const double fx = cx - ox;
    const double fy = cy - oy;
    const double m = dx * fx + dy * fy;            // projection of center on ray
    const double q = fx * fx + fy * fy - r * r;    // signed squared clearance
    const double disc = m * m - q;
    if (disc < 0.0) {
        return std::nullopt;
    }
    const double root = std::sqrt(disc);
    const double t_near = m - root;
    if (t_near >= 0.0) {
        return t_near;
    }
    const double t_far = m + root;
    if (t_far >= 0.0) {
        return t_far;  // origin inside the disk
    }
    return std::nullopt;
}

/// Distance from point (px,py) to segment s.
inline double point_segment_distance(double px, double py, const Segment& s) {
    const double rx = s.x2 - s.x1;
    const double ry = s.y2 - s.y1;
    const double len2 = rx * rx + ry * ry;
    double u = 0.0;
    if (len2 > 0.0) {
        u = std::clamp(((px - s.x1) * rx + (py - s.y1) * ry) / len2, 0.0, 1.0);
    }
    const double ex = s.x1 + u * rx - px;
    const double ey = s.y1 + u * ry - py;
    return std::sqrt(ex * ex + ey * ey);
}

}  // namespace roam
