#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace ogsd {

/// How convolution-type operators read samples that fall outside the grid.
/// An operator and its adjoint must always be evaluated with the same mode.
enum class BoundaryMode {
  circular,   ///< periodic wrap-around; operators are block-circulant
  symmetric,  ///< half-sample mirror (edge sample repeated)
};

std::string_view to_string(BoundaryMode mode);

/// Parses "circular" / "symmetric"; throws std::invalid_argument otherwise.
BoundaryMode parse_boundary_mode(std::string_view text);

/// Maps an arbitrary (possibly negative or out-of-range) index into [0, n).
int resolve_index(int index, int n, BoundaryMode mode) noexcept;

/// Dense row-major 2-D grid of doubles. Used for latent images,
/// observations, filter responses and per-pixel weight fields alike.
class Image {
 public:
  Image() = default;
  Image(int height, int width, double fill = 0.0);
  Image(int height, int width, std::vector<double> data);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(int row, int col) noexcept {
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }
  double operator()(int row, int col) const noexcept {
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  bool same_shape(const Image& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }
  bool all_finite() const noexcept;

  Image& operator+=(const Image& other);
  Image& operator-=(const Image& other);
  Image& operator*=(double scale) noexcept;

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

Image operator+(Image lhs, const Image& rhs);
Image operator-(Image lhs, const Image& rhs);
Image operator*(double scale, Image img);

double dot(const Image& a, const Image& b);
double squared_norm(const Image& img);
double sum(const Image& img);
/// y += a * x
void axpy(double a, const Image& x, Image& y);
/// Elementwise product.
Image hadamard(const Image& a, const Image& b);
/// Circularly shifts content: out(r, c) = img(r - dr, c - dc).
Image circular_shift(const Image& img, int dr, int dc);

/// Square, odd-sized convolution kernel addressed by offsets from its center.
/// A valid PSF is non-negative and sums to one (see project_kernel); the type
/// itself only enforces the odd size so that stencils and intermediate
/// least-squares solutions can share it.
class Kernel {
 public:
  Kernel() : Kernel(1, 1.0) {}
  explicit Kernel(int size, double fill = 0.0);
  Kernel(int size, std::vector<double> data);

  static Kernel delta(int size);
  static Kernel uniform(int size);

  int size() const noexcept { return size_; }
  int radius() const noexcept { return size_ / 2; }

  /// Tap at offset (dy, dx) from the center, both in [-radius, radius].
  double& at(int dy, int dx) noexcept {
    return data_[static_cast<std::size_t>(dy + radius()) * size_ + dx + radius()];
  }
  double at(int dy, int dx) const noexcept {
    return data_[static_cast<std::size_t>(dy + radius()) * size_ + dx + radius()];
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  double sum() const noexcept;
  /// Flips the kernel about its center (h(-a)).
  Kernel flipped() const;
  /// Kernel as a size x size image (storage order preserved).
  Image as_image() const;
  static Kernel from_image(const Image& img);

  friend bool operator==(const Kernel&, const Kernel&) = default;

 private:
  int size_ = 1;
  std::vector<double> data_;
};

}  // namespace ogsd
