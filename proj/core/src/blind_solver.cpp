#include "ogsdeconv/blind_solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ogsdeconv/circulant.hpp"
#include "ogsdeconv/convolution.hpp"

namespace ogsd {

std::string_view to_string(KernelDomain domain) {
  return domain == KernelDomain::intensity ? "intensity" : "gradient";
}

KernelDomain parse_kernel_domain(std::string_view text) {
  if (text == "intensity") return KernelDomain::intensity;
  if (text == "gradient") return KernelDomain::gradient;
  throw std::invalid_argument("unknown kernel domain: " + std::string(text));
}

void SolverConfig::validate() const {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
  };
  require(lambda1 > 0.0 && std::isfinite(lambda1), "lambda1 must be positive");
  require(lambda2 >= 0.0 && std::isfinite(lambda2), "lambda2 must be non-negative");
  prior.validate();
  require(window >= 1, "group window must be positive");
  require(iterations >= 0, "iterations must be non-negative");
  require(cg_tol > 0.0 && cg_tol < 1.0, "cg_tol must lie in (0, 1)");
  require(cg_max_iter >= 1, "cg_max_iter must be positive");
  require(kernel_threshold >= 0.0 && kernel_threshold < 1.0,
          "kernel_threshold must lie in [0, 1)");
  require(filter_count == 2 || filter_count == 4, "filter count must be 2 or 4");
}

namespace {

double data_term(const Image& hx, const Image& y) {
  double total = 0.0;
  const auto a = hx.values();
  const auto b = y.values();
  for (std::size_t i = 0; i < a.size(); ++i) total += (a[i] - b[i]) * (a[i] - b[i]);
  return total;
}

Image blur(const Image& x, const Kernel& h, BoundaryMode mode) {
  if (mode == BoundaryMode::circular && h.size() > 5)
    return CirculantConvolution(h, x.height(), x.width()).apply(x);
  return conv2_same(x, h, mode);
}

// R given H x; the regularizers only depend on x and gamma.
double objective_with_blur(const Image& hx, const Image& x, const GammaField& gamma,
                           const Image& y, const SolverConfig& cfg, const FilterBank& bank) {
  const auto g = apply_filter_bank(x, bank, cfg.boundary);
  double reg = cfg.lambda1 * psi_value_from_responses(g, gamma, cfg.prior);
  if (cfg.lambda2 > 0.0) {
    const GroupGeometry geo = cfg.geometry();
    double phi = 0.0;
    for (const Image& gm : g) phi += ogs_functional(gm, geo);
    reg += cfg.lambda2 * phi;
  }
  return data_term(hx, y) + reg;
}

}  // namespace

double objective(const Image& x, const Kernel& h, const GammaField& gamma, const Image& y,
                 const SolverConfig& cfg) {
  if (!x.same_shape(y)) throw std::invalid_argument("objective: x and y shapes differ");
  const FilterBank bank = cfg.filter_bank();
  return objective_with_blur(conv2_same(x, h, cfg.boundary), x, gamma, y, cfg, bank);
}

double objective(const SolverState& state, const Image& y, const SolverConfig& cfg) {
  return objective(state.x, state.h, state.gamma, y, cfg);
}

// ---------------------------------------------------------------------------
// x-step

struct XStepSystem::Impl {
  Kernel h;
  BoundaryMode mode;
  FilterBank bank;
  std::vector<Image> filter_weights;  // lambda1 gamma_m + lambda2/2 Lambda_m
  std::optional<CirculantConvolution> circulant;
};

XStepSystem::XStepSystem(const Kernel& h, const GammaField& gamma,
                         const std::vector<Image>& weights, const SolverConfig& cfg, int height,
                         int width)
    : impl_(std::make_unique<Impl>(Impl{h, cfg.boundary, cfg.filter_bank(), {}, std::nullopt})) {
  const std::size_t m_count = impl_->bank.size();
  if (!gamma.valid_for(m_count, height, width))
    throw std::invalid_argument("x_step: gamma field does not match filters/shape");
  if (weights.size() != m_count)
    throw std::invalid_argument("x_step: expected one weight field per filter");
  for (std::size_t m = 0; m < m_count; ++m) {
    if (weights[m].height() != height || weights[m].width() != width)
      throw std::invalid_argument("x_step: weight field shape mismatch");
    Image d = cfg.lambda1 * gamma.layers[m];
    axpy(0.5 * cfg.lambda2, weights[m], d);
    impl_->filter_weights.push_back(std::move(d));
  }
  if (cfg.boundary == BoundaryMode::circular) impl_->circulant.emplace(h, height, width);
}

XStepSystem::~XStepSystem() = default;
XStepSystem::XStepSystem(XStepSystem&&) noexcept = default;
XStepSystem& XStepSystem::operator=(XStepSystem&&) noexcept = default;

Image XStepSystem::apply(const Image& x) const {
  Image out = impl_->circulant
                  ? impl_->circulant->apply_normal(x)
                  : conv2_adjoint(conv2_same(x, impl_->h, impl_->mode), impl_->h, impl_->mode);
  for (std::size_t m = 0; m < impl_->bank.size(); ++m) {
    const Stencil& f = impl_->bank[m];
    out += apply_filter_adjoint(hadamard(impl_->filter_weights[m], apply_filter(x, f, impl_->mode)),
                                f, impl_->mode);
  }
  return out;
}

Image XStepSystem::rhs(const Image& y) const {
  return impl_->circulant ? impl_->circulant->apply_adjoint(y)
                          : conv2_adjoint(y, impl_->h, impl_->mode);
}

Image XStepSystem::diagonal() const {
  const Image& d0 = impl_->filter_weights.front();
  double h_energy = 0.0;
  for (double v : impl_->h.values()) h_energy += v * v;
  Image diag(d0.height(), d0.width(), h_energy);
  for (std::size_t m = 0; m < impl_->bank.size(); ++m) {
    const Image& d = impl_->filter_weights[m];
    for (const Tap& t : impl_->bank[m].taps()) {
      const double w2 = t.weight * t.weight;
      for (int r = 0; r < diag.height(); ++r) {
        const int sr = resolve_index(r - t.dy, diag.height(), impl_->mode);
        for (int c = 0; c < diag.width(); ++c)
          diag(r, c) += w2 * d(sr, resolve_index(c - t.dx, diag.width(), impl_->mode));
      }
    }
  }
  return diag;
}

XStepResult x_step(const Image& y, const Kernel& h, const GammaField& gamma,
                   const std::vector<Image>& weights, const SolverConfig& cfg,
                   const Image* initial) {
  const XStepSystem system(h, gamma, weights, cfg, y.height(), y.width());
  CgOptions opts;
  opts.tol = cfg.cg_tol;
  opts.max_iter = cfg.cg_max_iter;
  if (initial) opts.initial_guess = *initial;
  Image inv_diag = system.diagonal();
  for (double& v : inv_diag.values()) v = v > 0.0 ? 1.0 / v : 1.0;
  opts.inverse_diagonal = std::move(inv_diag);
  const Image b = system.rhs(y);
  CgResult cg = cg_solve([&system](const Image& v) { return system.apply(v); }, b, opts);
  return {std::move(cg.x), cg.iterations, cg.relative_residual, cg.converged,
          std::sqrt(squared_norm(b))};
}

// ---------------------------------------------------------------------------
// h-step

KernelProjection project_kernel(const Kernel& h, double threshold) {
  Kernel out = h;
  double peak = 0.0;
  for (double& v : out.values()) {
    if (!(v > 0.0)) v = 0.0;  // also clears NaN
    peak = std::max(peak, v);
  }
  const double cut = threshold * peak;
  double total = 0.0;
  for (double& v : out.values()) {
    if (v < cut) v = 0.0;
    total += v;
  }
  if (!(total > 0.0) || !std::isfinite(total)) return {Kernel::delta(h.size()), true};
  for (double& v : out.values()) v /= total;
  return {std::move(out), false};
}

namespace {

struct NormalEquations {
  Eigen::MatrixXd gram;
  Eigen::VectorXd rhs;
};

int flat_index(int dy, int dx, int r, int k) { return (dy + r) * k + dx + r; }

// Accumulates X^T X and X^T y for circular convolution from correlations.
void accumulate_circular(const Image& x, const Image& y, int k, NormalEquations& ne) {
  const int r = k / 2;
  const Image auto_corr = circular_cross_correlation(x, x);
  const Image cross = circular_cross_correlation(x, y);
  const int h = x.height();
  const int w = x.width();
  auto lag = [&](const Image& c, int dy, int dx) {
    return c(resolve_index(dy, h, BoundaryMode::circular),
             resolve_index(dx, w, BoundaryMode::circular));
  };
  for (int ay = -r; ay <= r; ++ay)
    for (int ax = -r; ax <= r; ++ax) {
      const int i = flat_index(ay, ax, r, k);
      ne.rhs(i) += lag(cross, ay, ax);
      for (int by = -r; by <= r; ++by)
        for (int bx = -r; bx <= r; ++bx)
          ne.gram(i, flat_index(by, bx, r, k)) += lag(auto_corr, ay - by, ax - bx);
    }
}

// Explicit columns X e_a(i) = x(resolve(i - a)); any boundary mode.
void accumulate_explicit(const Image& x, const Image& y, int k, BoundaryMode mode,
                         NormalEquations& ne) {
  const int r = k / 2;
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd cols(n, k * k);
  for (int ay = -r; ay <= r; ++ay)
    for (int ax = -r; ax <= r; ++ax) {
      const int a = flat_index(ay, ax, r, k);
      for (int i = 0; i < x.height(); ++i) {
        const int sr = resolve_index(i - ay, x.height(), mode);
        for (int j = 0; j < x.width(); ++j)
          cols(i * x.width() + j, a) = x(sr, resolve_index(j - ax, x.width(), mode));
      }
    }
  const Eigen::Map<const Eigen::VectorXd> yv(y.values().data(), n);
  ne.gram.noalias() += cols.transpose() * cols;
  ne.rhs.noalias() += cols.transpose() * yv;
}

}  // namespace

KernelStepResult h_step(const Image& y, const Image& x, int size, const SolverConfig& cfg,
                        const Kernel& previous) {
  if (size < 1 || size % 2 == 0) throw std::invalid_argument("h_step: kernel size must be odd");
  if (size > y.height() || size > y.width())
    throw std::invalid_argument("h_step: kernel larger than image");
  if (!x.same_shape(y)) throw std::invalid_argument("h_step: x and y shapes differ");

  const int k2 = size * size;
  NormalEquations ne{Eigen::MatrixXd::Zero(k2, k2), Eigen::VectorXd::Zero(k2)};
  auto accumulate = [&](const Image& xs, const Image& ys) {
    if (cfg.boundary == BoundaryMode::circular)
      accumulate_circular(xs, ys, size, ne);
    else
      accumulate_explicit(xs, ys, size, cfg.boundary, ne);
  };
  if (cfg.kernel_domain == KernelDomain::intensity) {
    accumulate(x, y);
  } else {
    for (const Stencil& f : cfg.filter_bank())
      accumulate(apply_filter(x, f, cfg.boundary), apply_filter(y, f, cfg.boundary));
  }

  KernelStepResult result{previous, previous, true};
  const double scale = ne.gram.diagonal().maxCoeff();
  if (!(scale > 1e-14 * static_cast<double>(x.size()))) return result;

  const Eigen::LDLT<Eigen::MatrixXd> ldlt(ne.gram);
  if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-13) return result;
  const Eigen::VectorXd sol = ldlt.solve(ne.rhs);
  if (!sol.allFinite()) return result;

  Kernel raw(size, std::vector<double>(sol.data(), sol.data() + k2));
  KernelProjection projected = project_kernel(raw, cfg.kernel_threshold);
  if (projected.degenerate) {
    result.unprojected = std::move(raw);
    return result;
  }
  return {std::move(projected.kernel), std::move(raw), false};
}

// ---------------------------------------------------------------------------
// Algorithm loop

SolverState blind_deconv_level(const Image& y, const Kernel& h0, const SolverConfig& cfg,
                               const std::optional<Image>& x0, const ProgressCallback& progress) {
  cfg.validate();
  if (y.empty() || !y.all_finite()) throw std::invalid_argument("observation must be finite");
  if (h0.size() > y.height() || h0.size() > y.width())
    throw std::invalid_argument("kernel larger than image");
  if (x0 && !x0->same_shape(y)) throw std::invalid_argument("initial x shape differs from y");

  const FilterBank bank = cfg.filter_bank();
  const GroupGeometry geo = cfg.geometry();

  SolverState state;
  state.x = x0 ? *x0 : y;
  state.h = h0;
  state.gamma = GammaField::constant(bank.size(), y.height(), y.width());
  state.initial_objective = objective(state, y, cfg);

  double previous = state.initial_objective;
  for (int l = 0; l < cfg.iterations; ++l) {
    // gamma and Lambda from g = F x at the current iterate
    const auto g = apply_filter_bank(state.x, bank, cfg.boundary);
    std::vector<Image> weights;
    weights.reserve(g.size());
    for (const Image& gm : g) weights.push_back(lambda_weights(gm, geo));
    state.gamma = gamma_update(g, cfg.prior);

    XStepResult xs = x_step(y, state.h, state.gamma, weights, cfg, &state.x);
    if (!xs.converged) ++state.flags.cg_nonconverged;
    state.x = std::move(xs.x);

    // Kernel step on the fresh x.
    const Kernel h_old = state.h;
    KernelStepResult hs = h_step(y, state.x, h_old.size(), cfg, h_old);
    if (hs.degenerate) ++state.flags.kernel_degenerate;
    const Image blur_old = blur(state.x, h_old, cfg.boundary);
    Image blur_new = blur(state.x, hs.kernel, cfg.boundary);
    const double fit_old = data_term(blur_old, y);
    if (data_term(blur_new, y) > fit_old) {
      // The projection overshot: move along the feasible segment old -> new
      // to the data-term minimizer (exact for a quadratic).
      const Image diff = blur_old - blur_new;
      const double denom = squared_norm(diff);
      double t = denom > 0.0 ? dot(blur_old - y, diff) / denom : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      Kernel mixed(h_old.size());
      for (std::size_t i = 0; i < mixed.values().size(); ++i)
        mixed.values()[i] = (1.0 - t) * h_old.values()[i] + t * hs.kernel.values()[i];
      hs.kernel = project_kernel(mixed, 0.0).kernel;
      blur_new = blur(state.x, hs.kernel, cfg.boundary);
      ++state.flags.kernel_line_search;
    }
    state.h = std::move(hs.kernel);

    double change = 0.0;
    for (std::size_t i = 0; i < h_old.values().size(); ++i) {
      const double d = state.h.values()[i] - h_old.values()[i];
      change += d * d;
    }

    const double current = objective_with_blur(blur_new, state.x, state.gamma, y, cfg, bank);
    const double slack = std::max(1e-8 * std::abs(previous),
                                  cfg.cg_tol * xs.rhs_norm * std::sqrt(squared_norm(state.x)));
    state.objective_trace.push_back(current);
    state.descent_slack.push_back(slack);
    state.iteration = l + 1;
    if (progress) progress({state.iteration, current, std::sqrt(change)});
    previous = current;
  }
  return state;
}

}  // namespace ogsd
