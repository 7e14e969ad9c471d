#include "ogsdeconv/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "ogsdeconv/convolution.hpp"

namespace ogsd {

double ssd(const Image& a, const Image& b, int crop_border) {
  if (!a.same_shape(b)) throw std::invalid_argument("ssd: shape mismatch");
  if (crop_border < 0 || 2 * crop_border >= a.height() || 2 * crop_border >= a.width())
    throw std::invalid_argument("ssd: crop leaves an empty interior");
  double total = 0.0;
  for (int r = crop_border; r < a.height() - crop_border; ++r)
    for (int c = crop_border; c < a.width() - crop_border; ++c) {
      const double d = a(r, c) - b(r, c);
      total += d * d;
    }
  return total;
}

SsdRatio ssd_ratio(const Image& x_blind, const Image& x_gt_kernel, const Image& x_truth,
                   int crop_border) {
  constexpr double kFloor = 1e-20;
  const double num = ssd(x_blind, x_truth, crop_border);
  const double den = ssd(x_gt_kernel, x_truth, crop_border);
  if (den < kFloor) {
    // Identical numerator and denominator images still compare as equal.
    if (num == den) return {1.0, true};
    return {num / kFloor, true};
  }
  return {num / den, false};
}

std::vector<double> cumulative_histogram(const std::vector<double>& ratios,
                                         const std::vector<double>& bin_edges) {
  if (ratios.empty()) throw std::invalid_argument("cumulative_histogram: no ratios");
  if (!std::is_sorted(bin_edges.begin(), bin_edges.end()) ||
      std::adjacent_find(bin_edges.begin(), bin_edges.end()) != bin_edges.end())
    throw std::invalid_argument("cumulative_histogram: edges must be increasing");
  std::vector<double> sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  out.reserve(bin_edges.size());
  for (double e : bin_edges) {
    const auto count = std::upper_bound(sorted.begin(), sorted.end(), e) - sorted.begin();
    out.push_back(static_cast<double>(count) / static_cast<double>(sorted.size()));
  }
  return out;
}

double psnr(const Image& estimate, const Image& truth, int crop_border) {
  const int n = (estimate.height() - 2 * crop_border) * (estimate.width() - 2 * crop_border);
  const double mse = ssd(estimate, truth, crop_border) / n;
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return -10.0 * std::log10(mse);
}

int default_crop_border(int kernel_size) { return (kernel_size + 1) / 2; }

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Uniform in (0, 1], 53 random bits.
double unit_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

double counter_gaussian(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t key = splitmix64(seed);
  const double u1 = unit_open(splitmix64(key ^ (2 * counter)));
  const double u2 = unit_open(splitmix64(key ^ (2 * counter + 1)));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Image synth_blur(const Image& x, const Kernel& h, double noise_sigma, std::uint64_t seed,
                 BoundaryMode mode) {
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("noise sigma must be non-negative");
  Image y = conv2_same(x, h, mode);
  if (noise_sigma > 0.0) {
    auto v = y.values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += noise_sigma * counter_gaussian(seed, i);
  }
  return y;
}

double kernel_similarity(const Kernel& h_est, const Kernel& h_true) {
  const int n = std::max(h_est.size(), h_true.size());
  auto embed = [n](const Kernel& k) {
    Image out(n, n);
    const int off = (n - k.size()) / 2;
    for (int r = 0; r < k.size(); ++r)
      for (int c = 0; c < k.size(); ++c) out(r + off, c + off) = k.values()[r * k.size() + c];
    return out;
  };
  const Image a = embed(h_est);
  const Image b = embed(h_true);
  const double na = std::sqrt(squared_norm(a));
  const double nb = std::sqrt(squared_norm(b));
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("kernel_similarity: zero-norm kernel");
  double best = -1.0;
  for (int dr = 0; dr < n; ++dr)
    for (int dc = 0; dc < n; ++dc) best = std::max(best, dot(a, circular_shift(b, dr, dc)));
  return std::clamp(best / (na * nb), -1.0, 1.0);
}

double center_mass(const Kernel& h, int radius) {
  const int r = std::min(radius, h.radius());
  double inner = 0.0;
  for (int a = -r; a <= r; ++a)
    for (int b = -r; b <= r; ++b) inner += h.at(a, b);
  const double total = h.sum();
  if (!(total > 0.0)) throw std::invalid_argument("center_mass: kernel has no mass");
  return inner / total;
}

}  // namespace ogsd
