#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ogsdeconv/image.hpp"

namespace ogsd {

struct EvalRecord {
  std::string image_id;
  std::string kernel_id;
  double ssd = 0.0;
  double ssd_ratio = 1.0;
  double kernel_similarity = 0.0;
  bool degenerate_denominator = false;
};

/// Sum of squared differences over the interior left after removing
/// crop_border pixels from every side. Throws if nothing remains.
double ssd(const Image& a, const Image& b, int crop_border = 0);

struct SsdRatio {
  double value = 1.0;
  bool degenerate = false;  ///< denominator fell below the 1e-20 floor
};

/// ssd(x_blind, x_truth) / ssd(x_gt_kernel, x_truth).
SsdRatio ssd_ratio(const Image& x_blind, const Image& x_gt_kernel, const Image& x_truth,
                   int crop_border = 0);

/// Fraction of ratios <= each edge.
std::vector<double> cumulative_histogram(const std::vector<double>& ratios,
                                         const std::vector<double>& bin_edges);

/// Peak signal-to-noise ratio in dB for unit peak.
double psnr(const Image& estimate, const Image& truth, int crop_border = 0);

/// Default evaluation crop: ceil(k / 2).
int default_crop_border(int kernel_size);

/// Name of the noise generator, recorded in result manifests.
inline constexpr const char* kNoiseGeneratorId = "splitmix64-boxmuller-v1";

/// Counter-based standard normal sample: a pure function of (seed, counter).
double counter_gaussian(std::uint64_t seed, std::uint64_t counter);

/// conv2_same(x, h) + N(0, noise_sigma^2) i.i.d. noise, reproducible from seed.
Image synth_blur(const Image& x, const Kernel& h, double noise_sigma, std::uint64_t seed,
                 BoundaryMode mode = BoundaryMode::circular);

/// Maximum over circular shifts of the cosine similarity between two kernels
/// embedded (zero padded) in a common square canvas. Throws on zero-norm input.
double kernel_similarity(const Kernel& h_est, const Kernel& h_true);

/// Mass within `radius` pixels (Chebyshev) of the kernel center, divided by
/// the total mass.
double center_mass(const Kernel& h, int radius = 1);

}  // namespace ogsd
