#pragma once

#include <vector>

#include "ogsdeconv/filter_bank.hpp"
#include "ogsdeconv/image.hpp"

namespace ogsd {

// Spatial-domain operators. Convention:
//   conv2_same(x, h)(p) = sum_a h(a) * x(p - a),  a in [-r, r]^2
// with out-of-range samples of x resolved by the boundary mode. All of these
// reject kernels/stencils that are wider than the image.

/// H x.
Image conv2_same(const Image& img, const Kernel& ker, BoundaryMode mode);

/// H^T z, the exact adjoint of conv2_same under the same mode.
Image conv2_adjoint(const Image& img, const Kernel& ker, BoundaryMode mode);

/// F x for a single stencil.
Image apply_filter(const Image& x, const Stencil& f, BoundaryMode mode);

/// F^T g for a single stencil.
Image apply_filter_adjoint(const Image& g, const Stencil& f, BoundaryMode mode);

/// [F_1 x, ..., F_M x].
std::vector<Image> apply_filter_bank(const Image& x, const FilterBank& bank, BoundaryMode mode);

/// sum_m F_m^T g_m. Throws if gs.size() != bank.size() or shapes differ.
Image filter_bank_adjoint(const std::vector<Image>& gs, const FilterBank& bank,
                          BoundaryMode mode);

}  // namespace ogsd
