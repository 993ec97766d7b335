#include "roam/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace roam {
namespace {

constexpr int kWin = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;  // (K1 L)^2
constexpr double kC2 = 0.03 * 0.03;  // (K2 L)^2

const std::array<double, kWin * kWin>& gaussian_window() {
    static const std::array<double, kWin * kWin> win = [] {
        std::array<double, kWin * kWin> w{};
        double sum = 0.0;
        for (int y = 0; y < kWin; ++y) {
            for (int x = 0; x < kWin; ++x) {
                const double dy = y - kWin / 2;
                const double dx = x - kWin / 2;
                w[size_t(y) * kWin + x] = std::exp(-(dx * dx + dy * dy) / (2.0 * kSigma * kSigma));
                sum += w[size_t(y) * kWin + x];
            }
        }
        for (double& v : w) v /= sum;
        return w;
    }();
    return win;
}

std::vector<double> grayscale(const Frame& f) {
    std::vector<double> g(size_t(f.width) * f.height);
    for (int r = 0; r < f.height; ++r) {
        for (int c = 0; c < f.width; ++c) {
            g[size_t(r) * f.width + c] = (f.at(r, c, 0) + f.at(r, c, 1) + f.at(r, c, 2)) / 3.0;
        }
    }
    return g;
}

void check_same_shape(const Frame& a, const Frame& b, const char* what) {
    if (a.width != b.width || a.height != b.height) {
        throw std::invalid_argument(std::string(what) + ": frame shape mismatch");
    }
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double psnr(const Frame& a, const Frame& b, bool* exact) {
    check_same_shape(a, b, "psnr");
    double sum = 0.0;
    for (size_t i = 0; i < a.px.size(); ++i) {
        const double d = a.px[i] - b.px[i];
        sum += d * d;
    }
    const double mse = sum / double(a.px.size());
    if (mse == 0.0) {
        if (exact != nullptr) *exact = true;
        return kPsnrCap;
    }
    if (exact != nullptr) *exact = false;
    return 10.0 * std::log10(1.0 / mse);
}

double ssim(const Frame& a, const Frame& b) {
    check_same_shape(a, b, "ssim");
    if (a.width < kWin || a.height < kWin) {
        throw std::invalid_argument("ssim: frames smaller than the 11x11 window");
    }
    const auto& win = gaussian_window();
    const std::vector<double> ga = grayscale(a);
    const std::vector<double> gb = grayscale(b);
    const int w = a.width, h = a.height;

    double total = 0.0;
    int count = 0;
    for (int y = 0; y + kWin <= h; ++y) {
        for (int x = 0; x + kWin <= w; ++x) {
            double mu_a = 0.0, mu_b = 0.0, aa = 0.0, bb = 0.0, ab = 0.0;
            for (int wy = 0; wy < kWin; ++wy) {
                const double* ra = ga.data() + size_t(y + wy) * w + x;
                const double* rb = gb.data() + size_t(y + wy) * w + x;
                const double* wv = win.data() + size_t(wy) * kWin;
                for (int wx = 0; wx < kWin; ++wx) {
                    const double va = ra[wx], vb = rb[wx], wt = wv[wx];
                    mu_a += wt * va;
                    mu_b += wt * vb;
                    aa += wt * (va * va);
                    bb += wt * (vb * vb);
                    ab += wt * (va * vb);  // grouped so ssim(a, b) == ssim(b, a) exactly
                }
            }
            const double var_a = aa - mu_a * mu_a;
            const double var_b = bb - mu_b * mu_b;
            const double cov = ab - mu_a * mu_b;
            const double num = (2.0 * mu_a * mu_b + kC1) * (2.0 * cov + kC2);
            const double den = (mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2);
            total += num / den;
            ++count;
        }
    }
    return total / double(count);
}

MetricCurve evaluate(const std::vector<Clip>& pred, const std::vector<Clip>& gt) {
    if (pred.empty() || pred.size() != gt.size()) {
        throw std::invalid_argument("evaluate: empty input or clip count mismatch");
    }
    const size_t horizon = pred[0].size();
    for (size_t i = 0; i < pred.size(); ++i) {
        if (pred[i].size() != horizon || gt[i].size() != horizon) {
            throw std::invalid_argument("evaluate: clip length mismatch");
        }
    }
    MetricCurve curve;
    for (size_t t = 0; t < horizon; ++t) {
        double psum = 0.0, ssum = 0.0;
        std::vector<double> ps(pred.size()), ss(pred.size());
        for (size_t i = 0; i < pred.size(); ++i) {
            ps[i] = psnr(pred[i][t], gt[i][t]);
            ss[i] = ssim(pred[i][t], gt[i][t]);
            psum += ps[i];
            ssum += ss[i];
        }
        const double n = double(pred.size());
        const double pmean = psum / n;
        const double smean = ssum / n;
        double pvar = 0.0, svar = 0.0;
        for (size_t i = 0; i < pred.size(); ++i) {
            pvar += (ps[i] - pmean) * (ps[i] - pmean);
            svar += (ss[i] - smean) * (ss[i] - smean);
        }
        curve.psnr_mean.push_back(pmean);
        curve.psnr_std.push_back(std::sqrt(pvar / n));
        curve.ssim_mean.push_back(smean);
        curve.ssim_std.push_back(std::sqrt(svar / n));
    }
    return curve;
}

void write_metric_csv(const std::filesystem::path& path, const MetricCurve& curve) {
    std::ofstream os(path);
    if (!os) {
        throw std::runtime_error("cannot write " + path.string());
    }
    os << "t,psnr_mean,psnr_std,ssim_mean,ssim_std\n";
    char buf[160];
    for (size_t t = 0; t < curve.horizon(); ++t) {
        std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g,%.9g,%.9g\n", t + 1, curve.psnr_mean[t],
                      curve.psnr_std[t], curve.ssim_mean[t], curve.ssim_std[t]);
        os << buf;
    }
}

std::string metric_report(const MetricCurve& curve) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "horizon %zu frames | median PSNR %.4f dB | median SSIM %.6f\n",
                  curve.horizon(), median(curve.psnr_mean), median(curve.ssim_mean));
    return buf;
}

}  // namespace roam
