#pragma once

#include <string>
#include <vector>

#include "ogsdeconv/image.hpp"

namespace ogsd {

/// One tap of a sparse stencil: g(p) += weight * x(p + (dy, dx)).
struct Tap {
  int dy = 0;
  int dx = 0;
  double weight = 0.0;
};

/// Small high-pass analysis filter, stored as sparse taps read in
/// correlation orientation.
class Stencil {
 public:
  Stencil(std::string name, std::vector<Tap> taps);

  const std::string& name() const noexcept { return name_; }
  const std::vector<Tap>& taps() const noexcept { return taps_; }
  /// Largest |dy| or |dx| over the taps.
  int reach() const noexcept;
  /// Equivalent convolution kernel: conv2_same(x, as_kernel()) == apply_filter(x, *this).
  Kernel as_kernel() const;

 private:
  std::string name_;
  std::vector<Tap> taps_;
};

/// Ordered set of zero-sum stencils f_1..f_M defining the analysis domain.
class FilterBank {
 public:
  explicit FilterBank(std::vector<Stencil> filters);

  /// First-order differences. count = 2 gives the forward horizontal and
  /// vertical differences; count = 4 adds the backward pair.
  static FilterBank first_differences(int count = 2);

  std::size_t size() const noexcept { return filters_.size(); }
  const Stencil& operator[](std::size_t m) const { return filters_.at(m); }
  auto begin() const noexcept { return filters_.begin(); }
  auto end() const noexcept { return filters_.end(); }

 private:
  std::vector<Stencil> filters_;
};

}  // namespace ogsd
