#pragma once

#include <vector>

#include "ogsdeconv/filter_bank.hpp"
#include "ogsdeconv/image.hpp"

namespace ogsd {

/// Gamma hyperprior on the per-coefficient precisions: shape alpha, scale beta.
struct StudentTParams {
  double alpha = 1e-18;
  double beta = 1.0 / 1700.0;

  void validate() const;
};

/// Precision layers gamma_{m,i}, one image per analysis filter.
struct GammaField {
  std::vector<Image> layers;

  static GammaField constant(std::size_t filters, int height, int width, double value = 1.0);
  bool valid_for(std::size_t filters, int height, int width) const noexcept;
};

/// Closed-form precision update gamma = (alpha + 1/2) / (beta + g^2 / 2),
/// applied elementwise to each filter response.
GammaField gamma_update(const std::vector<Image>& g, const StudentTParams& params);

/// Student's-t regularizer
///   psi(x, gamma) = sum_m sum_i gamma_{m,i} g_{m,i}^2
///                 + 2 sum_m sum_i (beta gamma_{m,i} - (alpha + 1/2) log gamma_{m,i})
/// with g_m = F_m x. The log coefficient makes gamma_update the exact
/// minimizer over gamma for fixed x.
double psi_value(const Image& x, const GammaField& gamma, const StudentTParams& params,
                 const FilterBank& bank, BoundaryMode mode);

/// Same as psi_value but taking precomputed responses g_m.
double psi_value_from_responses(const std::vector<Image>& g, const GammaField& gamma,
                                const StudentTParams& params);

}  // namespace ogsd
