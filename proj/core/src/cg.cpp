#include "ogsdeconv/cg.hpp"

#include <cmath>
#include <stdexcept>

namespace ogsd {

CgResult cg_solve(const LinearOperator& apply_a, const Image& b, const CgOptions& options) {
  if (!(options.tol > 0.0) || options.max_iter < 0)
    throw std::invalid_argument("cg_solve: tol must be positive and max_iter non-negative");

  CgResult result;
  result.x = options.initial_guess ? *options.initial_guess : Image(b.height(), b.width());
  if (!result.x.same_shape(b)) throw std::invalid_argument("cg_solve: initial guess shape");

  const double b_norm = std::sqrt(squared_norm(b));
  if (b_norm == 0.0) {
    result.x = Image(b.height(), b.width());
    result.converged = true;
    return result;
  }

  Image r = b - apply_a(result.x);
  auto precondition = [&](const Image& v) {
    return options.inverse_diagonal ? hadamard(*options.inverse_diagonal, v) : v;
  };

  double r_norm = std::sqrt(squared_norm(r));
  result.relative_residual = r_norm / b_norm;
  if (result.relative_residual <= options.tol) {
    result.converged = true;
    return result;
  }

  Image z = precondition(r);
  Image p = z;
  double rz = dot(r, z);
  for (int it = 0; it < options.max_iter; ++it) {
    const Image ap = apply_a(p);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) break;  // lost positive definiteness numerically
    const double step = rz / pap;
    axpy(step, p, result.x);
    axpy(-step, ap, r);
    result.iterations = it + 1;
    r_norm = std::sqrt(squared_norm(r));
    result.relative_residual = r_norm / b_norm;
    if (result.relative_residual <= options.tol) {
      result.converged = true;
      break;
    }
    z = precondition(r);
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    p *= beta;
    p += z;
  }
  return result;
}

}  // namespace ogsd
