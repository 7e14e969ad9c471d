#pragma once

#include <vector>

#include "ogsdeconv/filter_bank.hpp"
#include "ogsdeconv/image.hpp"

namespace ogsd {

/// Squared-norm floor used wherever a reciprocal group norm is taken:
/// ||u_g|| is replaced by sqrt(||u_g||^2 + kGroupNormFloor).
inline constexpr double kGroupNormFloor = 1e-12;

/// W x W group centered at (i, j): rows i - m1 .. i + m2, columns likewise.
struct GroupGeometry {
  int window = 3;

  explicit GroupGeometry(int w);
  int m1() const noexcept { return (window - 1) / 2; }
  int m2() const noexcept { return window / 2; }
};

/// Column-stacked W*W group around (i, j); samples outside s are zero.
std::vector<double> group_vector(const Image& s, int i, int j, GroupGeometry geo);

/// Per-center squared group norms ||s_(i,j),W||^2 (zero padded).
Image group_energy(const Image& s, GroupGeometry geo);

/// Overlapping group sparsity functional: sum over all centers of ||s_(i,j),W||_2.
double ogs_functional(const Image& s, GroupGeometry geo);

/// sum_m ogs_functional(F_m x).
double ogs_regularizer(const Image& x, const FilterBank& bank, GroupGeometry geo,
                       BoundaryMode mode);

/// Diagonal of Lambda(u): for every pixel, the sum of floored reciprocal
/// norms of the W^2 groups that contain it.
Image lambda_weights(const Image& u, GroupGeometry geo, double floor = kGroupNormFloor);

/// Majorizer P(v, u) = 1/2 sum_g (||v_g||^2 / b_g + b_g), b_g = sqrt(||u_g||^2 + floor).
/// P(v, u) >= ogs_functional(v) and P(u, u) ~= ogs_functional(u).
double majorizer_value(const Image& v, const Image& u, GroupGeometry geo,
                       double floor = kGroupNormFloor);

}  // namespace ogsd
