#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "ogsdeconv/cg.hpp"
#include "ogsdeconv/filter_bank.hpp"
#include "ogsdeconv/image.hpp"
#include "ogsdeconv/ogs_prior.hpp"
#include "ogsdeconv/student_t_prior.hpp"

namespace ogsd {

/// Which signals the kernel least-squares step fits: raw intensities
/// (X h ~ y) or filter responses (sum_m ||F_m X h - F_m y||^2).
enum class KernelDomain { intensity, gradient };

std::string_view to_string(KernelDomain domain);
KernelDomain parse_kernel_domain(std::string_view text);

struct SolverConfig {
  double lambda1 = 4.5e-5;
  double lambda2 = 5e-6;
  StudentTParams prior;
  int window = 3;
  int iterations = 4500;
  double cg_tol = 1e-5;
  int cg_max_iter = 100;
  BoundaryMode boundary = BoundaryMode::circular;
  /// Kernel entries below this fraction of the maximum are zeroed.
  double kernel_threshold = 0.02;
  int filter_count = 2;
  KernelDomain kernel_domain = KernelDomain::intensity;

  /// Throws std::invalid_argument on any violated range.
  void validate() const;
  FilterBank filter_bank() const { return FilterBank::first_differences(filter_count); }
  GroupGeometry geometry() const { return GroupGeometry(window); }
};

struct SolverFlags {
  int cg_nonconverged = 0;    ///< x-steps that hit cg_max_iter
  int kernel_degenerate = 0;  ///< h-steps that kept the previous kernel
  int kernel_line_search = 0; ///< h-steps whose projection was pulled back toward the old kernel
};

struct SolverState {
  Image x;
  Kernel h;
  GammaField gamma;
  int iteration = 0;
  double initial_objective = 0.0;
  /// R after each complete iteration.
  std::vector<double> objective_trace;
  /// Allowed increase for each trace entry relative to its predecessor.
  std::vector<double> descent_slack;
  SolverFlags flags;
};

struct IterationReport {
  int iteration = 0;
  double objective = 0.0;
  double kernel_change = 0.0;  ///< ||h_new - h_old||_2
};
using ProgressCallback = std::function<void(const IterationReport&)>;

/// R = ||H x - y||^2 + lambda1 psi(x, gamma) + lambda2 phi(x).
double objective(const Image& x, const Kernel& h, const GammaField& gamma, const Image& y,
                 const SolverConfig& cfg);
double objective(const SolverState& state, const Image& y, const SolverConfig& cfg);

/// The x-step system matrix
///   A = H^T H + sum_m F_m^T diag(lambda1 gamma_m + lambda2/2 Lambda_m) F_m
/// applied matrix-free.
class XStepSystem {
 public:
  XStepSystem(const Kernel& h, const GammaField& gamma, const std::vector<Image>& weights,
              const SolverConfig& cfg, int height, int width);
  ~XStepSystem();
  XStepSystem(XStepSystem&&) noexcept;
  XStepSystem& operator=(XStepSystem&&) noexcept;

  Image apply(const Image& x) const;
  Image rhs(const Image& y) const;  ///< H^T y
  Image diagonal() const;           ///< approximate diag(A), exact for circular H

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct XStepResult {
  Image x;
  int cg_iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
  double rhs_norm = 0.0;  ///< ||H^T y||
};

/// Solves the x-step normal equations by preconditioned CG. `weights` are the
/// raw Lambda(g_m) fields (one per filter). `initial` warm-starts CG.
XStepResult x_step(const Image& y, const Kernel& h, const GammaField& gamma,
                   const std::vector<Image>& weights, const SolverConfig& cfg,
                   const Image* initial = nullptr);

struct KernelProjection {
  Kernel kernel;
  bool degenerate = false;
};

/// Clips negatives, zeroes entries below threshold * max, renormalizes to
/// unit sum. An all-zero result becomes a centered delta with the flag set.
KernelProjection project_kernel(const Kernel& h, double threshold);

struct KernelStepResult {
  Kernel kernel;       ///< projected estimate (or `previous` when degenerate)
  Kernel unprojected;  ///< raw least-squares solution
  bool degenerate = false;
};

/// Unconstrained least squares (X^T X)^{-1} X^T y for a size x size kernel,
/// followed by project_kernel. A (near-)singular X^T X keeps `previous`.
KernelStepResult h_step(const Image& y, const Image& x, int size, const SolverConfig& cfg,
                        const Kernel& previous);

/// One pyramid level of the alternating MM scheme: gamma update, x-step,
/// kernel step, repeated cfg.iterations times. Starts from x0 (or y), h0 and
/// gamma = 1.
SolverState blind_deconv_level(const Image& y, const Kernel& h0, const SolverConfig& cfg,
                               const std::optional<Image>& x0 = std::nullopt,
                               const ProgressCallback& progress = {});

}  // namespace ogsd
