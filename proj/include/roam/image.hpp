// Raster types shared by the renderer, dataset I/O, metrics, and predictor.
#pragma once

#include <cstddef>
#include <vector>

#include "roam/core.hpp"

namespace roam {

/// RGB raster, row-major, channel-fastest, each channel in [0, 1].
struct Frame {
    int width = 0;
    int height = 0;
    std::vector<double> px;  // height * width * 3

    Frame() = default;
    Frame(int w, int h) : width(w), height(h), px(size_t(w) * h * 3, 0.0) {}

    double& at(int row, int col, int ch) { return px[(size_t(row) * width + col) * 3 + ch]; }
    double at(int row, int col, int ch) const { return px[(size_t(row) * width + col) * 3 + ch]; }

    friend bool operator==(const Frame&, const Frame&) = default;
};

/// Single-channel z-depth raster in meters; no-hit is +inf.
struct DepthMap {
    int width = 0;
    int height = 0;
    std::vector<double> z;  // height * width

    DepthMap() = default;
    DepthMap(int w, int h) : width(w), height(h), z(size_t(w) * h, kInf) {}

    double& at(int row, int col) { return z[size_t(row) * width + col]; }
    double at(int row, int col) const { return z[size_t(row) * width + col]; }

    friend bool operator==(const DepthMap&, const DepthMap&) = default;
};

}  // namespace roam
