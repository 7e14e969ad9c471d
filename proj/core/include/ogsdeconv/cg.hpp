#pragma once

#include <functional>
#include <optional>

#include "ogsdeconv/image.hpp"

namespace ogsd {

/// Symmetric positive definite operator on images.
using LinearOperator = std::function<Image(const Image&)>;

struct CgOptions {
  double tol = 1e-5;     ///< stop when ||A x - b|| <= tol * ||b||
  int max_iter = 100;
  std::optional<Image> initial_guess;
  /// Elementwise inverse diagonal used as a Jacobi preconditioner.
  std::optional<Image> inverse_diagonal;
};

struct CgResult {
  Image x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// (Preconditioned) conjugate gradients. Never throws on non-convergence:
/// the last iterate is returned with converged = false. Starting from an
/// initial guess, every iterate lowers 1/2 x^T A x - b^T x.
CgResult cg_solve(const LinearOperator& apply_a, const Image& b, const CgOptions& options = {});

}  // namespace ogsd
