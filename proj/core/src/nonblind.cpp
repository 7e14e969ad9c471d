#include "ogsdeconv/nonblind.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

#include "ogsdeconv/cg.hpp"
#include "ogsdeconv/circulant.hpp"
#include "ogsdeconv/convolution.hpp"
#include "ogsdeconv/filter_bank.hpp"

namespace ogsd {

void NonblindConfig::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("nonblind lambda must be positive");
  if (!(exponent > 0.0 && exponent <= 1.0))
    throw std::invalid_argument("nonblind exponent must lie in (0, 1]");
  if (irls_iters < 1) throw std::invalid_argument("irls_iters must be positive");
  if (!(cg_tol > 0.0 && cg_tol < 1.0)) throw std::invalid_argument("cg_tol must lie in (0, 1)");
  if (cg_max_iter < 1) throw std::invalid_argument("cg_max_iter must be positive");
  if (!(irls_epsilon > 0.0)) throw std::invalid_argument("irls_epsilon must be positive");
  if (filter_count != 2 && filter_count != 4)
    throw std::invalid_argument("filter count must be 2 or 4");
}

double sparse_prior_objective(const Image& x, const Image& y, const Kernel& h,
                              const NonblindConfig& cfg) {
  const Image r = conv2_same(x, h, cfg.boundary) - y;
  double prior = 0.0;
  for (const Image& g : apply_filter_bank(x, FilterBank::first_differences(cfg.filter_count),
                                          cfg.boundary))
    for (double v : g.values()) prior += std::pow(v * v + cfg.irls_epsilon, 0.5 * cfg.exponent);
  return squared_norm(r) + cfg.lambda * prior;
}

NonblindResult irls_deconv_detailed(const Image& y, const Kernel& h, const NonblindConfig& cfg) {
  cfg.validate();
  if (y.empty() || !y.all_finite()) throw std::invalid_argument("observation must be finite");
  const FilterBank bank = FilterBank::first_differences(cfg.filter_count);
  std::optional<CirculantConvolution> circulant;
  if (cfg.boundary == BoundaryMode::circular) circulant.emplace(h, y.height(), y.width());

  auto normal = [&](const Image& v) {
    return circulant ? circulant->apply_normal(v)
                     : conv2_adjoint(conv2_same(v, h, cfg.boundary), h, cfg.boundary);
  };
  const Image b = circulant ? circulant->apply_adjoint(y) : conv2_adjoint(y, h, cfg.boundary);
  double h_energy = 0.0;
  for (double v : h.values()) h_energy += v * v;

  NonblindResult result;
  // Flat start: the first pass is the uniform-weight quadratic solve, later
  // passes relax the weights on edges.
  result.x = Image(y.height(), y.width(), sum(y) / static_cast<double>(y.size()));
  result.objective_trace.push_back(sparse_prior_objective(result.x, y, h, cfg));
  const double half_power = 0.5 * cfg.exponent - 1.0;

  for (int pass = 0; pass < cfg.irls_iters; ++pass) {
    std::vector<Image> weights;
    for (Image& g : apply_filter_bank(result.x, bank, cfg.boundary)) {
      for (double& v : g.values())
        v = 0.5 * cfg.lambda * cfg.exponent * std::pow(v * v + cfg.irls_epsilon, half_power);
      weights.push_back(std::move(g));
    }

    Image diag(y.height(), y.width(), h_energy);
    for (std::size_t m = 0; m < bank.size(); ++m)
      for (const Tap& t : bank[m].taps())
        for (int r = 0; r < y.height(); ++r)
          for (int c = 0; c < y.width(); ++c)
            diag(r, c) += t.weight * t.weight *
                          weights[m](resolve_index(r - t.dy, y.height(), cfg.boundary),
                                     resolve_index(c - t.dx, y.width(), cfg.boundary));
    for (double& v : diag.values()) v = 1.0 / v;

    CgOptions opts;
    opts.tol = cfg.cg_tol;
    opts.max_iter = cfg.cg_max_iter;
    opts.initial_guess = result.x;
    opts.inverse_diagonal = std::move(diag);
    CgResult cg = cg_solve(
        [&](const Image& v) {
          Image out = normal(v);
          for (std::size_t m = 0; m < bank.size(); ++m)
            out += apply_filter_adjoint(hadamard(weights[m], apply_filter(v, bank[m], cfg.boundary)),
                                        bank[m], cfg.boundary);
          return out;
        },
        b, opts);
    if (!cg.converged) ++result.cg_nonconverged;
    result.x = std::move(cg.x);
    if (pass == 0) result.first_pass = result.x;
    result.objective_trace.push_back(sparse_prior_objective(result.x, y, h, cfg));
  }
  return result;
}

Image irls_deconv(const Image& y, const Kernel& h, const NonblindConfig& cfg) {
  return irls_deconv_detailed(y, h, cfg).x;
}

}  // namespace ogsd
