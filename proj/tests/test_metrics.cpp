#include <doctest.h>

#include <algorithm>
#include <fstream>

#include "roam/metrics.hpp"

using namespace roam;

namespace {

Frame constant_frame(int side, double value) {
    Frame f(side, side);
    std::fill(f.px.begin(), f.px.end(), value);
    return f;
}

Frame random_frame(SplitMix64& rng, int side) {
    Frame f(side, side);
    for (auto& v : f.px) v = rng.uniform();
    return f;
}

// Closed-form SSIM of two constant images, evaluated independently of the
// windowed implementation.
double constant_ssim_oracle(double a, double b) {
    const double c1 = 0.01 * 0.01;
    const double c2 = 0.03 * 0.03;
    return ((2.0 * a * b + c1) * (0.0 + c2)) / ((a * a + b * b + c1) * (0.0 + c2));
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("psnr: cap at equality, constant offset, symmetry") {
    const Frame zero = constant_frame(16, 0.0);
    const Frame half = constant_frame(16, 0.5);
    bool exact = false;
    CHECK(psnr(zero, zero, &exact) == kPsnrCap);
    CHECK(exact);
    CHECK(psnr(zero, half, &exact) == doctest::Approx(10.0 * std::log10(4.0)).epsilon(1e-9));
    CHECK(psnr(zero, half) == doctest::Approx(6.0206).epsilon(2e-5));
    CHECK(!exact);

    SplitMix64 rng(1);
    const Frame a = random_frame(rng, 16);
    const Frame b = random_frame(rng, 16);
    CHECK(psnr(a, b) == psnr(b, a));

    Frame other(8, 8);
    CHECK_THROWS_AS(psnr(a, other), std::invalid_argument);
}

TEST_CASE("ssim: identity, constant pair against the closed form, symmetry") {
    SplitMix64 rng(2);
    const Frame a = random_frame(rng, 24);
    CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));

    const Frame zero = constant_frame(16, 0.0);
    const Frame half = constant_frame(16, 0.5);
    const double oracle = constant_ssim_oracle(0.0, 0.5);
    CHECK(oracle == doctest::Approx(0.00039984).epsilon(1e-4));
    CHECK(ssim(zero, half) == doctest::Approx(oracle).epsilon(1e-6));

    const Frame b = random_frame(rng, 24);
    CHECK(ssim(a, b) == ssim(b, a));

    Frame tiny(8, 8);
    CHECK_THROWS_AS(ssim(tiny, tiny), std::invalid_argument);
}

TEST_CASE("ssim stays in [-1, 1] and equals 1 only at identity") {
    SplitMix64 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        const Frame a = random_frame(rng, 16);
        Frame b = random_frame(rng, 16);
        const double s = ssim(a, b);
        CHECK(s >= -1.0);
        CHECK(s <= 1.0);
        CHECK(s < 1.0 - 1e-12);
    }
}

TEST_CASE("psnr decreases monotonically with noise level") {
    SplitMix64 rng(4);
    const Frame clean = random_frame(rng, 32);
    auto noisy = [&](double sigma, std::uint64_t seed) {
        SplitMix64 nrng(seed);
        Frame f = clean;
        for (auto& v : f.px) {
            v = std::clamp(v + sigma * nrng.gaussian(), 0.0, 1.0);
        }
        return f;
    };
    const double p1 = psnr(clean, noisy(0.01, 9));
    const double p2 = psnr(clean, noisy(0.05, 9));
    const double p3 = psnr(clean, noisy(0.1, 9));
    CHECK(p1 > p2);
    CHECK(p2 > p3);
}

TEST_CASE("evaluate: perfect prediction, CSV rows, permutation invariance") {
    SplitMix64 rng(5);
    std::vector<Clip> gt;
    for (int c = 0; c < 3; ++c) {
        Clip clip;
        for (int t = 0; t < 20; ++t) clip.push_back(random_frame(rng, 16));
        gt.push_back(clip);
    }
    const MetricCurve perfect = evaluate(gt, gt);
    REQUIRE(perfect.horizon() == 20);
    for (size_t t = 0; t < 20; ++t) {
        CHECK(perfect.psnr_mean[t] == kPsnrCap);
        CHECK(perfect.ssim_mean[t] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(perfect.psnr_std[t] == 0.0);
    }

    std::vector<Clip> pred;
    for (const Clip& c : gt) {
        Clip p;
        for (const Frame& f : c) {
            Frame q = f;
            for (auto& v : q.px) v = std::clamp(v + 0.05, 0.0, 1.0);
            p.push_back(q);
        }
        pred.push_back(p);
    }
    const MetricCurve curve = evaluate(pred, gt);
    std::vector<Clip> pred_perm{pred[2], pred[0], pred[1]};
    std::vector<Clip> gt_perm{gt[2], gt[0], gt[1]};
    const MetricCurve perm = evaluate(pred_perm, gt_perm);
    for (size_t t = 0; t < curve.horizon(); ++t) {
        CHECK(curve.psnr_mean[t] == doctest::Approx(perm.psnr_mean[t]).epsilon(1e-12));
        CHECK(curve.ssim_std[t] == doctest::Approx(perm.ssim_std[t]).epsilon(1e-12));
    }

    const auto tmp = std::filesystem::temp_directory_path() / "roam_metric_test.csv";
    write_metric_csv(tmp, curve);
    std::ifstream is(tmp);
    std::string line;
    int rows = 0;
    std::getline(is, line);
    CHECK(line == "t,psnr_mean,psnr_std,ssim_mean,ssim_std");
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 20);
    std::filesystem::remove(tmp);

    CHECK_THROWS_AS(evaluate({}, {}), std::invalid_argument);
}

// Two-clip population standard deviation uses denominator n.
TEST_CASE("evaluate std uses the population convention") {
    SplitMix64 rng(6);
    const Frame base = random_frame(rng, 16);
    Frame off1 = base, off2 = base;
    for (auto& v : off1.px) v = std::clamp(v + 0.1, 0.0, 1.0);
    for (auto& v : off2.px) v = std::clamp(v + 0.2, 0.0, 1.0);
    const std::vector<Clip> pred{{off1}, {off2}};
    const std::vector<Clip> gt{{base}, {base}};
    const MetricCurve curve = evaluate(pred, gt);
    const double p1 = psnr(off1, base);
    const double p2 = psnr(off2, base);
    const double mean = 0.5 * (p1 + p2);
    const double pop_std = std::sqrt(((p1 - mean) * (p1 - mean) + (p2 - mean) * (p2 - mean)) / 2.0);
    CHECK(curve.psnr_std[0] == doctest::Approx(pop_std).epsilon(1e-12));
}

}  // TEST_SUITE
