// Frame-level PSNR and SSIM plus per-horizon aggregation curves.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "roam/image.hpp"

namespace roam {

inline constexpr double kPsnrCap = 100.0;  // dB reported for an exact match

// 10 log10(1 / MSE) over [0, 1] pixels. A zero-error pair reports the cap
// value; *exact is set accordingly when provided.
double psnr(const Frame& a, const Frame& b, bool* exact = nullptr);

// Mean SSIM over all fully-interior 11x11 windows (Gaussian weights,
// sigma 1.5, K1 = 0.01, K2 = 0.03, L = 1) of the channel-mean grayscale
// images. Throws if the frames are smaller than the window.
double ssim(const Frame& a, const Frame& b);

struct MetricCurve {
    std::vector<double> psnr_mean, psnr_std;
    std::vector<double> ssim_mean, ssim_std;

    size_t horizon() const { return psnr_mean.size(); }
};

using Clip = std::vector<Frame>;

// Per-timestep mean and population (denominator n) standard deviation across
// clips. All clips must share the same length.
MetricCurve evaluate(const std::vector<Clip>& pred, const std::vector<Clip>& gt);

/// CSV columns: t,psnr_mean,psnr_std,ssim_mean,ssim_std (t starts at 1).
void write_metric_csv(const std::filesystem::path& path, const MetricCurve& curve);

/// Companion text report with aggregate medians over the horizon.
std::string metric_report(const MetricCurve& curve);

}  // namespace roam
