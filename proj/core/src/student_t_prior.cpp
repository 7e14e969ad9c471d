#include "ogsdeconv/student_t_prior.hpp"

#include <cmath>
#include <stdexcept>

#include "ogsdeconv/convolution.hpp"

namespace ogsd {

void StudentTParams::validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("Student's-t shape alpha must be >= 0");
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("Student's-t scale beta must be > 0");
}

GammaField GammaField::constant(std::size_t filters, int height, int width, double value) {
  GammaField g;
  g.layers.assign(filters, Image(height, width, value));
  return g;
}

bool GammaField::valid_for(std::size_t filters, int height, int width) const noexcept {
  if (layers.size() != filters) return false;
  for (const Image& l : layers) {
    if (l.height() != height || l.width() != width) return false;
    for (double v : l.values())
      if (!(v > 0.0) || !std::isfinite(v)) return false;
  }
  return true;
}

GammaField gamma_update(const std::vector<Image>& g, const StudentTParams& params) {
  params.validate();
  GammaField out;
  out.layers.reserve(g.size());
  const double numer = params.alpha + 0.5;
  for (const Image& gm : g) {
    Image layer(gm.height(), gm.width());
    auto lv = layer.values();
    const auto gv = gm.values();
    for (std::size_t i = 0; i < gv.size(); ++i)
      lv[i] = numer / (params.beta + 0.5 * gv[i] * gv[i]);
    out.layers.push_back(std::move(layer));
  }
  return out;
}

double psi_value_from_responses(const std::vector<Image>& g, const GammaField& gamma,
                                const StudentTParams& params) {
  if (g.size() != gamma.layers.size())
    throw std::invalid_argument("psi_value: gamma layer count differs from filter count");
  const double log_coeff = params.alpha + 0.5;
  double quad = 0.0;
  double hyper = 0.0;
  for (std::size_t m = 0; m < g.size(); ++m) {
    if (!g[m].same_shape(gamma.layers[m]))
      throw std::invalid_argument("psi_value: gamma shape differs from image");
    const auto gv = g[m].values();
    const auto yv = gamma.layers[m].values();
    for (std::size_t i = 0; i < gv.size(); ++i) {
      quad += yv[i] * gv[i] * gv[i];
      hyper += params.beta * yv[i] - log_coeff * std::log(yv[i]);
    }
  }
  return quad + 2.0 * hyper;
}

double psi_value(const Image& x, const GammaField& gamma, const StudentTParams& params,
                 const FilterBank& bank, BoundaryMode mode) {
  return psi_value_from_responses(apply_filter_bank(x, bank, mode), gamma, params);
}

}  // namespace ogsd
