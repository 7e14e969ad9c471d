#pragma once

#include <vector>

#include "ogsdeconv/image.hpp"

namespace ogsd {

struct NonblindConfig {
  double lambda = 1e-3;
  double exponent = 0.8;  ///< p in (0, 1]
  int irls_iters = 15;
  double cg_tol = 1e-5;
  int cg_max_iter = 200;
  BoundaryMode boundary = BoundaryMode::circular;
  double irls_epsilon = 1e-6;
  int filter_count = 2;

  void validate() const;
};

struct NonblindResult {
  Image x;
  /// Sparse-prior objective after each IRLS pass (entry 0 is the starting point).
  std::vector<double> objective_trace;
  /// Output of the first pass.
  Image first_pass;
  int cg_nonconverged = 0;
};

/// ||H x - y||^2 + lambda * sum_m sum_i (g_{m,i}^2 + eps)^{p/2}.
double sparse_prior_objective(const Image& x, const Image& y, const Kernel& h,
                              const NonblindConfig& cfg);

/// Hyper-Laplacian deconvolution by iteratively reweighted least squares.
/// Starts from the flat image mean(y). Each pass uses weights
/// w = p (g^2 + eps)^{p/2 - 1} from the previous iterate and solves
/// (H^T H + lambda/2 sum_m F_m^T W_m F_m) x = H^T y by warm-started CG.
NonblindResult irls_deconv_detailed(const Image& y, const Kernel& h, const NonblindConfig& cfg);

Image irls_deconv(const Image& y, const Kernel& h, const NonblindConfig& cfg = {});

}  // namespace ogsd
