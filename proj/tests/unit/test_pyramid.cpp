#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ogsdeconv/evalkit.hpp"
#include "ogsdeconv/pyramid.hpp"
#include "ogsdeconv/synthetic.hpp"
#include "oracles.hpp"

using namespace ogsd;

namespace {

SolverConfig desk_config() {
  SolverConfig cfg;
  cfg.iterations = 300;
  cfg.cg_max_iter = 60;
  cfg.kernel_domain = KernelDomain::gradient;
  cfg.lambda1 = 5e-4;
  return cfg;
}

}  // namespace

TEST(Schedule, LevelCount) {
  EXPECT_EQ(pyramid_level_count(3), 1);
  EXPECT_EQ(pyramid_level_count(5), 3);
  EXPECT_EQ(pyramid_level_count(9), 5);
  EXPECT_EQ(pyramid_level_count(27), 8);
  EXPECT_THROW(pyramid_level_count(1), std::invalid_argument);
  for (int k = 3; k < 60; k += 2) {
    const int levels = pyramid_level_count(k);
    EXPECT_LE(k / std::pow(std::numbers::sqrt2, levels - 1), 3.0 + 1e-12);
    if (levels > 1) EXPECT_GT(k / std::pow(std::numbers::sqrt2, levels - 2), 3.0);
  }
}

TEST(Schedule, NearestOdd) {
  EXPECT_EQ(nearest_odd_at_least_3(1.0), 3);
  EXPECT_EQ(nearest_odd_at_least_3(4.9), 5);
  EXPECT_EQ(nearest_odd_at_least_3(6.4), 7);
  EXPECT_EQ(nearest_odd_at_least_3(19.09), 19);
}

TEST(Schedule, ShapeAndLambdaScaling) {
  SolverConfig base;
  for (int k : {3, 5, 9, 15, 27}) {
    const PyramidSchedule s = plan_schedule(255, 200, k, base);
    const int n = static_cast<int>(s.levels.size());
    ASSERT_EQ(n, pyramid_level_count(k));
    EXPECT_EQ(s.levels.front().kernel_size, 3);
    EXPECT_EQ(s.levels.back().kernel_size, k);
    EXPECT_EQ(s.levels.back().height, 255);
    EXPECT_EQ(s.levels.back().width, 200);
    for (int l = 0; l < n; ++l) {
      const auto& pl = s.levels[l];
      const double scale = std::pow(std::numbers::sqrt2, n - 1 - l);
      EXPECT_EQ(pl.height, static_cast<int>(std::lround(255 / scale)));
      EXPECT_EQ(pl.width, static_cast<int>(std::lround(200 / scale)));
      EXPECT_EQ(pl.kernel_size % 2, 1);
      EXPECT_EQ(pl.lambda1, base.lambda1 / std::pow(2.0, n - 1 - l));
      EXPECT_EQ(pl.lambda2, base.lambda2 / std::pow(2.0, n - 1 - l));
      if (l > 0) {
        EXPECT_GT(pl.height, s.levels[l - 1].height);
        EXPECT_GT(pl.width, s.levels[l - 1].width);
        EXPECT_GE(pl.kernel_size, s.levels[l - 1].kernel_size);
      }
    }
  }
}

TEST(Schedule, RejectsBadInput) {
  SolverConfig base;
  EXPECT_THROW(plan_schedule(64, 64, 4, base), std::invalid_argument);
  EXPECT_THROW(plan_schedule(64, 64, 1, base), std::invalid_argument);
  EXPECT_THROW(plan_schedule(8, 64, 9, base), std::invalid_argument);
}

TEST(ResampleImage, IdentityAndConstant) {
  const Image img = oracle::random_image(9, 7, 1);
  EXPECT_EQ(resample_image(img, 9, 7), img);
  const Image c(10, 13, 0.42);
  for (auto [h, w] : {std::pair{7, 9}, {15, 20}, {3, 3}}) {
    const Image out = resample_image(c, h, w);
    for (double v : out.values()) EXPECT_NEAR(v, 0.42, 1e-15);
  }
}

TEST(ResampleImage, RampStaysRamp) {
  Image ramp(4, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) ramp(r, c) = 0.5 * r + 0.25 * c + 1.0;
  const Image out = resample_image(ramp, 3, 3);
  // Sample centers map to (i + 0.5) * 4/3 - 0.5 in source coordinates.
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      const double sr = (r + 0.5) * 4.0 / 3.0 - 0.5;
      const double sc = (c + 0.5) * 4.0 / 3.0 - 0.5;
      EXPECT_NEAR(out(r, c), 0.5 * sr + 0.25 * sc + 1.0, 1e-14);
    }
  for (int r = 0; r < 3; ++r) {
    EXPECT_NEAR(out(r, 1) - out(r, 0), out(r, 2) - out(r, 1), 1e-14);
    EXPECT_NEAR(out(1, r) - out(0, r), out(2, r) - out(1, r), 1e-14);
  }
}

TEST(ResampleImage, SmoothRoundTrip) {
  Image img(64, 64);
  for (int r = 0; r < 64; ++r)
    for (int c = 0; c < 64; ++c)
      img(r, c) = 0.5 + 0.3 * std::sin(2 * std::numbers::pi * r / 32.0) *
                            std::cos(2 * std::numbers::pi * c / 40.0);
  const Image back = resample_image(resample_image(img, 45, 45), 64, 64);
  EXPECT_LT(std::sqrt(squared_norm(back - img) / squared_norm(img)), 0.02);
}

TEST(ResampleKernel, DeltaUpsampleStaysCentered) {
  const Kernel up = resample_kernel(Kernel::delta(3), 5);
  EXPECT_NEAR(up.sum(), 1.0, 1e-12);
  EXPECT_GE(center_mass(up), 0.5);
  for (double v : up.values()) EXPECT_GE(v, 0.0);
}

TEST(ResampleKernel, SameSizeIsProjection) {
  const Kernel k = synthetic::builtin_kernel("motion-curve-9");
  const Kernel same = resample_kernel(k, 9);
  for (std::size_t i = 0; i < k.values().size(); ++i)
    EXPECT_NEAR(same.values()[i], k.values()[i], 1e-15);
  Kernel raw(3, std::vector<double>{-1, 2, 0, 0, 4, 0, 0, 0, 2});
  EXPECT_EQ(resample_kernel(raw, 3), project_kernel(raw, 0.0).kernel);
}

TEST(ResampleKernel, PreservesCentralSymmetry) {
  for (const char* name : {"gaussian-5", "disk-7", "motion-diag-9"}) {
    const Kernel k = synthetic::builtin_kernel(name);
    for (int target : {3, 7, 11}) {
      const Kernel out = resample_kernel(k, target);
      const int r = out.radius();
      for (int a = -r; a <= r; ++a)
        for (int b = -r; b <= r; ++b) EXPECT_NEAR(out.at(a, b), out.at(-a, -b), 1e-14) << name;
    }
  }
}

TEST(Recentering, ShiftAndCentroid) {
  const Kernel k = synthetic::builtin_kernel("gaussian-5");
  Kernel big(9);
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b) big.at(a, b) = k.at(a, b);
  const Kernel moved = shift_kernel(big, 2, -1);
  EXPECT_EQ(moved.at(2, -1), big.at(0, 0));
  EXPECT_EQ(kernel_centroid_offset(moved), (std::pair{2, -1}));
  EXPECT_EQ(kernel_centroid_offset(big), (std::pair{0, 0}));
  EXPECT_EQ(shift_kernel(moved, -2, 1), big);
}

TEST(Multiscale, ZeroIterationsEchoesInput) {
  SolverConfig cfg;
  cfg.iterations = 0;
  const Image y = oracle::random_image(32, 32, 2);
  const auto res = multiscale_blind_deconv(y, 9, cfg);
  EXPECT_EQ(res.x, y);
  EXPECT_EQ(res.h, Kernel::delta(9));
}

TEST(Multiscale, SingleLevelForSmallKernel) {
  SolverConfig cfg;
  cfg.iterations = 15;
  const Image y = synth_blur(synthetic::builtin_image("bars", 32, 32),
                             synthetic::gaussian_kernel(3, 0.6), 0.005, 3);
  MultiscaleOptions opt;
  opt.recenter = false;
  const auto res = multiscale_blind_deconv(y, 3, cfg, opt);
  ASSERT_EQ(res.levels.size(), 1u);
  const SolverState direct = blind_deconv_level(y, Kernel::uniform(3), cfg);
  EXPECT_EQ(res.h, direct.h);
  EXPECT_EQ(res.x, direct.x);
  EXPECT_EQ(res.objective_trace, direct.objective_trace);
}

TEST(Multiscale, LevelReportsFollowSchedule) {
  SolverConfig cfg;
  cfg.iterations = 5;
  const Image y = synth_blur(synthetic::builtin_image("rings"), synthetic::builtin_kernel("disk-7"),
                             0.005, 4);
  int seen = 0;
  MultiscaleOptions opt;
  opt.on_level = [&](const LevelReport& r) {
    EXPECT_EQ(r.level, seen++);
    EXPECT_EQ(r.kernel.size(), r.kernel_size);
  };
  const auto res = multiscale_blind_deconv(y, 7, cfg, opt);
  ASSERT_EQ(static_cast<int>(res.levels.size()), pyramid_level_count(7));
  EXPECT_EQ(seen, pyramid_level_count(7));
  EXPECT_EQ(res.objective_trace.size(), 5u * res.levels.size());
  for (std::size_t l = 0; l < res.levels.size(); ++l) {
    EXPECT_EQ(res.levels[l].height, res.schedule.levels[l].height);
    EXPECT_EQ(res.levels[l].kernel_size, res.schedule.levels[l].kernel_size);
  }
  EXPECT_EQ(res.h.size(), 7);
  EXPECT_NEAR(res.h.sum(), 1.0, 1e-12);
}

TEST(Multiscale, RecoversNineTapKernel) {
  const Kernel truth = synthetic::builtin_kernel("gaussian-9");
  const Image y = synth_blur(synthetic::builtin_image("shapes"), truth, 0.005, 11);
  const auto res = multiscale_blind_deconv(y, 9, desk_config());
  EXPECT_GE(kernel_similarity(res.h, truth), 0.9);
}

TEST(Multiscale, NoBlurInputKeepsCenteredKernel) {
  const Image y = synth_blur(synthetic::builtin_image("blocks"), Kernel::delta(1), 0.005, 12);
  const auto res = multiscale_blind_deconv(y, 5, desk_config());
  EXPECT_GE(center_mass(res.h), 0.8);
  // Noise-free periodic stripes leave the kernel weakly constrained.
  const auto bars = multiscale_blind_deconv(synthetic::builtin_image("bars"), 5, desk_config());
  EXPECT_GE(center_mass(bars.h), 0.8);
}

TEST(Multiscale, LevelInitChoices) {
  EXPECT_EQ(parse_level_init("observation"), LevelInit::observation);
  EXPECT_EQ(parse_level_init(to_string(LevelInit::upsampled)), LevelInit::upsampled);
  EXPECT_THROW(parse_level_init("zero"), std::invalid_argument);

  SolverConfig cfg;
  cfg.iterations = 10;
  const Image y = synth_blur(synthetic::builtin_image("rings"), synthetic::builtin_kernel("disk-5"), 0.005, 13);
  MultiscaleOptions up;
  up.level_init = LevelInit::upsampled;
  const auto a = multiscale_blind_deconv(y, 5, cfg);
  const auto b = multiscale_blind_deconv(y, 5, cfg, up);
  ASSERT_EQ(a.levels.size(), b.levels.size());
  EXPECT_EQ(a.levels.front().final_objective, b.levels.front().final_objective);
  EXPECT_NE(a.objective_trace.back(), b.objective_trace.back());
}
