#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include "ogsdeconv/blind_solver.hpp"
#include "ogsdeconv/image.hpp"

namespace ogsd {

struct PyramidLevel {
  int height = 0;
  int width = 0;
  int kernel_size = 3;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

/// Coarse-to-fine plan; levels[0] is the coarsest, levels.back() the input scale.
struct PyramidSchedule {
  std::vector<PyramidLevel> levels;
};

/// Scale ratio between successive levels.
inline constexpr double kPyramidRatio = 1.4142135623730951;

/// Number of levels L such that kernel_k / sqrt(2)^(L-1) <= 3.
int pyramid_level_count(int kernel_k);

/// Nearest odd integer to v, never below 3.
int nearest_odd_at_least_3(double v);

PyramidSchedule plan_schedule(int image_h, int image_w, int kernel_k, const SolverConfig& base);

/// Bilinear resampling with pixel-center alignment and clamped edges.
Image resample_image(const Image& img, int new_h, int new_w);

/// Bilinear resampling of the kernel about its center followed by
/// project_kernel(threshold = 0).
Kernel resample_kernel(const Kernel& h, int new_k);

/// Integer circular shift of a kernel (entries leaving the support are dropped).
Kernel shift_kernel(const Kernel& h, int dy, int dx);

/// Rounded offset of the kernel's center of mass from its geometric center.
std::pair<int, int> kernel_centroid_offset(const Kernel& h);

struct LevelReport {
  int level = 0;
  int height = 0;
  int width = 0;
  int kernel_size = 0;
  double final_objective = 0.0;
  SolverFlags flags;
  Kernel kernel;  ///< estimate at the end of the level (after recentering)
};

/// Latent image each level starts from. The kernel is always carried up.
enum class LevelInit {
  observation,  ///< the level's downsampled y, as at the coarsest level
  upsampled,    ///< the previous level's latent, upsampled
};

std::string_view to_string(LevelInit init);
LevelInit parse_level_init(std::string_view text);

struct MultiscaleOptions {
  LevelInit level_init = LevelInit::observation;
  /// Shift each level's kernel so that its centroid sits on the center pixel
  /// (and co-shift the latent image), removing the translation ambiguity.
  bool recenter = true;
  ProgressCallback on_iteration;
  std::function<void(const LevelReport&)> on_level;
};

struct MultiscaleResult {
  Image x;
  Kernel h;
  PyramidSchedule schedule;
  std::vector<LevelReport> levels;
  /// Objective trace of every level, concatenated coarse to fine.
  std::vector<double> objective_trace;
  SolverFlags flags;  ///< summed over levels
};

/// With base.iterations == 0 nothing is estimated: x = y and h is a delta.
MultiscaleResult multiscale_blind_deconv(const Image& y, int kernel_k, const SolverConfig& base,
                                         const MultiscaleOptions& options = {});

}  // namespace ogsd
