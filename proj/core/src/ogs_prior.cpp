#include "ogsdeconv/ogs_prior.hpp"

#include <cmath>
#include <stdexcept>

#include "ogsdeconv/convolution.hpp"

namespace ogsd {
namespace {

// out(i, j) = sum_{a, b in [lo, hi]} in(i + a, j + b), zero outside the grid.
Image box_sum(const Image& in, int lo, int hi) {
  const int h = in.height();
  const int w = in.width();
  Image rows(h, w);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) {
      double acc = 0.0;
      for (int b = lo; b <= hi; ++b)
        if (const int c = j + b; c >= 0 && c < w) acc += in(i, c);
      rows(i, j) = acc;
    }
  Image out(h, w);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) {
      double acc = 0.0;
      for (int a = lo; a <= hi; ++a)
        if (const int r = i + a; r >= 0 && r < h) acc += rows(r, j);
      out(i, j) = acc;
    }
  return out;
}

}  // namespace

GroupGeometry::GroupGeometry(int w) : window(w) {
  if (w < 1) throw std::invalid_argument("group window must be positive");
}

std::vector<double> group_vector(const Image& s, int i, int j, GroupGeometry geo) {
  if (i < 0 || j < 0 || i >= s.height() || j >= s.width())
    throw std::invalid_argument("group center outside the image");
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(geo.window) * geo.window);
  for (int c = j - geo.m1(); c <= j + geo.m2(); ++c)
    for (int r = i - geo.m1(); r <= i + geo.m2(); ++r) {
      const bool inside = r >= 0 && r < s.height() && c >= 0 && c < s.width();
      v.push_back(inside ? s(r, c) : 0.0);
    }
  return v;
}

Image group_energy(const Image& s, GroupGeometry geo) {
  return box_sum(hadamard(s, s), -geo.m1(), geo.m2());
}

double ogs_functional(const Image& s, GroupGeometry geo) {
  if (geo.window == 1) {
    double total = 0.0;
    for (double v : s.values()) total += std::abs(v);
    return total;
  }
  const Image energy = group_energy(s, geo);
  double total = 0.0;
  for (double e : energy.values()) total += std::sqrt(e);
  return total;
}

double ogs_regularizer(const Image& x, const FilterBank& bank, GroupGeometry geo,
                       BoundaryMode mode) {
  double total = 0.0;
  for (const Stencil& f : bank) total += ogs_functional(apply_filter(x, f, mode), geo);
  return total;
}

Image lambda_weights(const Image& u, GroupGeometry geo, double floor) {
  Image inv_norm = group_energy(u, geo);
  for (double& e : inv_norm.values()) e = 1.0 / std::sqrt(e + floor);
  // Pixel l lies in the groups centered at l - a for a in [-m1, m2]^2,
  // i.e. centers at offsets [-m2, m1] from l.
  return box_sum(inv_norm, -geo.m2(), geo.m1());
}

double majorizer_value(const Image& v, const Image& u, GroupGeometry geo, double floor) {
  if (!v.same_shape(u)) throw std::invalid_argument("majorizer_value: shape mismatch");
  const Image ev = group_energy(v, geo);
  const Image eu = group_energy(u, geo);
  const auto evv = ev.values();
  const auto euv = eu.values();
  double total = 0.0;
  for (std::size_t g = 0; g < evv.size(); ++g) {
    const double b = std::sqrt(euv[g] + floor);
    total += evv[g] / b + b;
  }
  return 0.5 * total;
}

}  // namespace ogsd
