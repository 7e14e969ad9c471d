#include "ogsdeconv/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace ogsd::synthetic {
namespace {

using Scene = std::function<double(double u, double v)>;  // u: column, v: row, both in [0,1)

Image render(const Scene& scene, int height, int width) {
  constexpr int kSuper = 4;
  Image img(height, width);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) {
      double acc = 0.0;
      for (int sr = 0; sr < kSuper; ++sr)
        for (int sc = 0; sc < kSuper; ++sc)
          acc += scene((c + (sc + 0.5) / kSuper) / width, (r + (sr + 0.5) / kSuper) / height);
      img(r, c) = acc / (kSuper * kSuper);
    }
  return img;
}

bool in_rect(double u, double v, double u0, double v0, double u1, double v1) {
  return u >= u0 && u < u1 && v >= v0 && v < v1;
}

bool in_disk(double u, double v, double cu, double cv, double rad) {
  return (u - cu) * (u - cu) + (v - cv) * (v - cv) < rad * rad;
}

// Barycentric point-in-triangle test.
bool in_triangle(double u, double v, double au, double av, double bu, double bv, double cu,
                 double cv) {
  auto side = [](double pu, double pv, double qu, double qv, double ru, double rv) {
    return (pu - ru) * (qv - rv) - (qu - ru) * (pv - rv);
  };
  const double d1 = side(u, v, au, av, bu, bv);
  const double d2 = side(u, v, bu, bv, cu, cv);
  const double d3 = side(u, v, cu, cv, au, av);
  const bool neg = d1 < 0 || d2 < 0 || d3 < 0;
  const bool pos = d1 > 0 || d2 > 0 || d3 > 0;
  return !(neg && pos);
}

double shapes(double u, double v) {
  if (in_triangle(u, v, 0.18, 0.92, 0.5, 0.55, 0.82, 0.92)) return 0.95;
  if (in_disk(u, v, 0.7, 0.3, 0.18)) return 0.6;
  if (in_rect(u, v, 0.1, 0.1, 0.45, 0.42)) return 0.85;
  if (in_rect(u, v, 0.05, 0.55, 0.22, 0.72)) return 0.4;
  return 0.15;
}

double bars(double u, double v) {
  if (u < 0.5 && v < 0.5) return std::fmod(u, 0.125) < 0.0625 ? 0.9 : 0.2;
  if (u >= 0.5 && v < 0.5) return std::fmod(v, 0.17) < 0.07 ? 0.8 : 0.3;
  if (u < 0.5) return std::fmod(u + v, 0.2) < 0.08 ? 0.75 : 0.1;
  return in_disk(u, v, 0.75, 0.75, 0.16) ? 0.95 : (std::fmod(u - v + 1.0, 0.25) < 0.1 ? 0.5 : 0.25);
}

double rings(double u, double v) {
  const double rad = std::hypot(u - 0.5, v - 0.5);
  if (in_rect(u, v, 0.46, 0.05, 0.54, 0.95) || in_rect(u, v, 0.05, 0.46, 0.95, 0.54)) return 0.05;
  if (rad < 0.45) return std::fmod(rad, 0.12) < 0.06 ? 0.85 : 0.35;
  return (u + 2 * v) < 0.6 ? 0.6 : 0.2;
}

std::uint64_t mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double unit(std::uint64_t& state) {
  state = mix(state);
  return static_cast<double>(state >> 11) * 0x1.0p-53;
}

struct Block {
  double u0, v0, u1, v1, value;
};

const std::vector<Block>& block_layout() {
  static const std::vector<Block> blocks = [] {
    std::vector<Block> out;
    std::uint64_t state = 20240611;
    for (int i = 0; i < 16; ++i) {
      const double u0 = unit(state) * 0.85;
      const double v0 = unit(state) * 0.85;
      const double du = 0.08 + unit(state) * 0.3;
      const double dv = 0.08 + unit(state) * 0.3;
      out.push_back({u0, v0, u0 + du, v0 + dv, 0.1 + 0.85 * unit(state)});
    }
    return out;
  }();
  return blocks;
}

double blocks(double u, double v) {
  double value = 0.5;
  for (const Block& b : block_layout())
    if (in_rect(u, v, b.u0, b.v0, b.u1, b.v1)) value = b.value;
  return value;
}

Kernel normalized(Kernel k) {
  const double s = k.sum();
  for (double& v : k.values()) v /= s;
  return k;
}

}  // namespace

std::vector<std::string> builtin_image_names() { return {"shapes", "bars", "blocks", "rings"}; }

std::vector<std::string> builtin_kernel_names() {
  return {"motion-diag-9", "disk-7",   "gaussian-5", "motion-horizontal-7",
          "motion-vertical-9", "gaussian-9", "disk-5", "motion-curve-9"};
}

Image builtin_image(const std::string& name, int height, int width) {
  if (name == "shapes") return render(shapes, height, width);
  if (name == "bars") return render(bars, height, width);
  if (name == "blocks") return render(blocks, height, width);
  if (name == "rings") return render(rings, height, width);
  throw std::invalid_argument("unknown builtin image: " + name);
}

Kernel motion_kernel(int size, double angle_degrees) {
  Kernel k(size);
  const int r = k.radius();
  const double th = angle_degrees * std::numbers::pi / 180.0;
  const int samples = 16 * size;
  for (int s = 0; s <= samples; ++s) {
    const double t = -r + 2.0 * r * s / samples;
    const double px = t * std::cos(th);
    const double py = -t * std::sin(th);
    const int x0 = static_cast<int>(std::floor(px));
    const int y0 = static_cast<int>(std::floor(py));
    const double fx = px - x0;
    const double fy = py - y0;
    auto deposit = [&](int a, int b, double w) {
      if (a >= -r && a <= r && b >= -r && b <= r) k.at(a, b) += w;
    };
    deposit(y0, x0, (1 - fy) * (1 - fx));
    deposit(y0, x0 + 1, (1 - fy) * fx);
    deposit(y0 + 1, x0, fy * (1 - fx));
    deposit(y0 + 1, x0 + 1, fy * fx);
  }
  return normalized(std::move(k));
}

Kernel disk_kernel(int size, double radius) {
  Kernel k(size);
  const int r = k.radius();
  constexpr int kSuper = 8;
  for (int a = -r; a <= r; ++a)
    for (int b = -r; b <= r; ++b) {
      int hits = 0;
      for (int i = 0; i < kSuper; ++i)
        for (int j = 0; j < kSuper; ++j) {
          const double y = a - 0.5 + (i + 0.5) / kSuper;
          const double x = b - 0.5 + (j + 0.5) / kSuper;
          if (x * x + y * y <= radius * radius) ++hits;
        }
      k.at(a, b) = hits;
    }
  return normalized(std::move(k));
}

Kernel gaussian_kernel(int size, double sigma) {
  Kernel k(size);
  const int r = k.radius();
  for (int a = -r; a <= r; ++a)
    for (int b = -r; b <= r; ++b) k.at(a, b) = std::exp(-(a * a + b * b) / (2 * sigma * sigma));
  return normalized(std::move(k));
}

Kernel builtin_kernel(const std::string& name) {
  if (name == "motion-diag-9") return motion_kernel(9, 45.0);
  if (name == "disk-7") return disk_kernel(7, 3.0);
  if (name == "gaussian-5") return gaussian_kernel(5, 1.0);
  if (name == "motion-horizontal-7") return motion_kernel(7, 0.0);
  if (name == "motion-vertical-9") return motion_kernel(9, 90.0);
  if (name == "gaussian-9") return gaussian_kernel(9, 1.6);
  if (name == "disk-5") return disk_kernel(5, 2.0);
  if (name == "motion-curve-9") {
    Kernel k(9);
    for (int b = -4; b <= 4; ++b) {
      const double y = 0.18 * b * b - 1.5;
      const int y0 = static_cast<int>(std::floor(y));
      const double f = y - y0;
      k.at(std::clamp(y0, -4, 4), b) += 1 - f;
      k.at(std::clamp(y0 + 1, -4, 4), b) += f;
    }
    return normalized(std::move(k));
  }
  throw std::invalid_argument("unknown builtin kernel: " + name);
}

}  // namespace ogsd::synthetic
