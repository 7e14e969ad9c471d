#include "ogsdeconv/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ogsd {

std::string_view to_string(BoundaryMode mode) {
  return mode == BoundaryMode::circular ? "circular" : "symmetric";
}

BoundaryMode parse_boundary_mode(std::string_view text) {
  if (text == "circular") return BoundaryMode::circular;
  if (text == "symmetric") return BoundaryMode::symmetric;
  throw std::invalid_argument("unknown boundary mode: " + std::string(text));
}

int resolve_index(int index, int n, BoundaryMode mode) noexcept {
  if (index >= 0 && index < n) return index;
  if (mode == BoundaryMode::circular) {
    const int m = index % n;
    return m < 0 ? m + n : m;
  }
  const int period = 2 * n;
  int m = index % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

Image::Image(int height, int width, double fill) : height_(height), width_(width) {
  if (height <= 0 || width <= 0)
    throw std::invalid_argument("image dimensions must be positive");
  data_.assign(static_cast<std::size_t>(height) * width, fill);
}

Image::Image(int height, int width, std::vector<double> data)
    : height_(height), width_(width), data_(std::move(data)) {
  if (height <= 0 || width <= 0)
    throw std::invalid_argument("image dimensions must be positive");
  if (data_.size() != static_cast<std::size_t>(height) * width)
    throw std::invalid_argument("image data length does not match height x width");
}

bool Image::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Image& Image::operator+=(const Image& other) {
  if (!same_shape(other)) throw std::invalid_argument("image shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Image& Image::operator-=(const Image& other) {
  if (!same_shape(other)) throw std::invalid_argument("image shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Image& Image::operator*=(double scale) noexcept {
  for (double& v : data_) v *= scale;
  return *this;
}

Image operator+(Image lhs, const Image& rhs) { return lhs += rhs; }
Image operator-(Image lhs, const Image& rhs) { return lhs -= rhs; }
Image operator*(double scale, Image img) { return img *= scale; }

double dot(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("image shape mismatch");
  const auto av = a.values();
  const auto bv = b.values();
  return std::inner_product(av.begin(), av.end(), bv.begin(), 0.0);
}

double squared_norm(const Image& img) { return dot(img, img); }

double sum(const Image& img) {
  const auto v = img.values();
  return std::accumulate(v.begin(), v.end(), 0.0);
}

void axpy(double a, const Image& x, Image& y) {
  if (!x.same_shape(y)) throw std::invalid_argument("image shape mismatch");
  const auto xv = x.values();
  auto yv = y.values();
  for (std::size_t i = 0; i < xv.size(); ++i) yv[i] += a * xv[i];
}

Image hadamard(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("image shape mismatch");
  Image out = a;
  auto ov = out.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] *= bv[i];
  return out;
}

Image circular_shift(const Image& img, int dr, int dc) {
  Image out(img.height(), img.width());
  for (int r = 0; r < img.height(); ++r) {
    const int sr = resolve_index(r - dr, img.height(), BoundaryMode::circular);
    for (int c = 0; c < img.width(); ++c)
      out(r, c) = img(sr, resolve_index(c - dc, img.width(), BoundaryMode::circular));
  }
  return out;
}

Kernel::Kernel(int size, double fill) : size_(size) {
  if (size <= 0 || size % 2 == 0)
    throw std::invalid_argument("kernel size must be a positive odd integer");
  data_.assign(static_cast<std::size_t>(size) * size, fill);
}

Kernel::Kernel(int size, std::vector<double> data) : size_(size), data_(std::move(data)) {
  if (size <= 0 || size % 2 == 0)
    throw std::invalid_argument("kernel size must be a positive odd integer");
  if (data_.size() != static_cast<std::size_t>(size) * size)
    throw std::invalid_argument("kernel data length does not match size x size");
}

Kernel Kernel::delta(int size) {
  Kernel k(size);
  k.at(0, 0) = 1.0;
  return k;
}

Kernel Kernel::uniform(int size) {
  return Kernel(size, 1.0 / (static_cast<double>(size) * size));
}

double Kernel::sum() const noexcept {
  return std::accumulate(data_.begin(), data_.end(), 0.0);
}

Kernel Kernel::flipped() const {
  Kernel out(size_);
  const int r = radius();
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx) out.at(dy, dx) = at(-dy, -dx);
  return out;
}

Image Kernel::as_image() const { return Image(size_, size_, data_); }

Kernel Kernel::from_image(const Image& img) {
  if (img.height() != img.width())
    throw std::invalid_argument("kernel image must be square");
  return Kernel(img.height(), std::vector<double>(img.values().begin(), img.values().end()));
}

}  // namespace ogsd
