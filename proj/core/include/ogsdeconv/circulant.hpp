#pragma once

#include <memory>

#include "ogsdeconv/image.hpp"

namespace ogsd {

/// Frequency-domain realization of conv2_same / conv2_adjoint under
/// circular boundaries for a fixed image shape. Used inside the iterative
/// solvers where the same H is applied hundreds of times. Const methods are
/// safe to call concurrently.
class CirculantConvolution {
 public:
  CirculantConvolution(const Kernel& ker, int height, int width);
  ~CirculantConvolution();
  CirculantConvolution(CirculantConvolution&&) noexcept;
  CirculantConvolution& operator=(CirculantConvolution&&) noexcept;

  int height() const noexcept;
  int width() const noexcept;

  Image apply(const Image& x) const;          ///< H x
  Image apply_adjoint(const Image& z) const;  ///< H^T z
  Image apply_normal(const Image& x) const;   ///< H^T H x

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Circular cross-correlation c(d) = sum_j a(j) * b(j + d) for every lag d,
/// returned as an image indexed by lag modulo the shape.
Image circular_cross_correlation(const Image& a, const Image& b);

}  // namespace ogsd
