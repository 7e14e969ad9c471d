#include "ogsdeconv/pyramid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ogsd {

int pyramid_level_count(int kernel_k) {
  if (kernel_k < 3) throw std::invalid_argument("kernel size must be at least 3");
  const double steps = std::ceil(2.0 * std::log2(kernel_k / 3.0) - 1e-9);
  return std::max(0, static_cast<int>(steps)) + 1;
}

int nearest_odd_at_least_3(double v) {
  const int odd = 2 * static_cast<int>(std::lround((v - 1.0) / 2.0)) + 1;
  return std::max(3, odd);
}

PyramidSchedule plan_schedule(int image_h, int image_w, int kernel_k, const SolverConfig& base) {
  if (kernel_k % 2 == 0) throw std::invalid_argument("kernel size must be odd");
  if (image_h <= 0 || image_w <= 0) throw std::invalid_argument("image dimensions must be positive");
  if (kernel_k > std::min(image_h, image_w))
    throw std::invalid_argument("kernel larger than image");
  const int count = pyramid_level_count(kernel_k);
  PyramidSchedule schedule;
  for (int level = 0; level < count; ++level) {
    const int down = count - 1 - level;
    const double scale = std::pow(kPyramidRatio, down);
    PyramidLevel pl;
    pl.height = down == 0 ? image_h : std::max(3, static_cast<int>(std::lround(image_h / scale)));
    pl.width = down == 0 ? image_w : std::max(3, static_cast<int>(std::lround(image_w / scale)));
    pl.kernel_size = down == 0 ? kernel_k : nearest_odd_at_least_3(kernel_k / scale);
    while (pl.kernel_size > 3 && pl.kernel_size > std::min(pl.height, pl.width)) pl.kernel_size -= 2;
    const double shrink = std::ldexp(1.0, -down);
    pl.lambda1 = base.lambda1 * shrink;
    pl.lambda2 = base.lambda2 * shrink;
    schedule.levels.push_back(pl);
  }
  return schedule;
}

namespace {

double clamp_coord(double v, int n) { return std::clamp(v, 0.0, static_cast<double>(n - 1)); }

double bilinear(const Image& img, double r, double c) {
  r = clamp_coord(r, img.height());
  c = clamp_coord(c, img.width());
  const int r0 = static_cast<int>(std::floor(r));
  const int c0 = static_cast<int>(std::floor(c));
  const int r1 = std::min(r0 + 1, img.height() - 1);
  const int c1 = std::min(c0 + 1, img.width() - 1);
  const double fr = r - r0;
  const double fc = c - c0;
  return (1 - fr) * ((1 - fc) * img(r0, c0) + fc * img(r0, c1)) +
         fr * ((1 - fc) * img(r1, c0) + fc * img(r1, c1));
}

// Bilinear sample of the kernel at a continuous offset; zero outside the support.
double kernel_sample(const Kernel& h, double dy, double dx) {
  const int r = h.radius();
  const int y0 = static_cast<int>(std::floor(dy));
  const int x0 = static_cast<int>(std::floor(dx));
  const double fy = dy - y0;
  const double fx = dx - x0;
  auto tap = [&](int a, int b) {
    return (a < -r || a > r || b < -r || b > r) ? 0.0 : h.at(a, b);
  };
  return (1 - fy) * ((1 - fx) * tap(y0, x0) + fx * tap(y0, x0 + 1)) +
         fy * ((1 - fx) * tap(y0 + 1, x0) + fx * tap(y0 + 1, x0 + 1));
}

Kernel resample_kernel_scaled(const Kernel& h, int new_k, double scale) {
  if (new_k < 1 || new_k % 2 == 0) throw std::invalid_argument("kernel size must be odd");
  if (new_k == h.size() && scale == 1.0) return project_kernel(h, 0.0).kernel;
  Kernel out(new_k);
  const int r = out.radius();
  for (int a = -r; a <= r; ++a)
    for (int b = -r; b <= r; ++b) out.at(a, b) = kernel_sample(h, a / scale, b / scale);
  return project_kernel(out, 0.0).kernel;
}

}  // namespace

Image resample_image(const Image& img, int new_h, int new_w) {
  if (new_h <= 0 || new_w <= 0) throw std::invalid_argument("target dimensions must be positive");
  if (new_h == img.height() && new_w == img.width()) return img;
  Image out(new_h, new_w);
  const double sr = static_cast<double>(img.height()) / new_h;
  const double sc = static_cast<double>(img.width()) / new_w;
  for (int r = 0; r < new_h; ++r)
    for (int c = 0; c < new_w; ++c)
      out(r, c) = bilinear(img, (r + 0.5) * sr - 0.5, (c + 0.5) * sc - 0.5);
  return out;
}

Kernel resample_kernel(const Kernel& h, int new_k) {
  return resample_kernel_scaled(h, new_k, static_cast<double>(new_k) / h.size());
}

Kernel shift_kernel(const Kernel& h, int dy, int dx) {
  Kernel out(h.size());
  const int r = h.radius();
  for (int a = -r; a <= r; ++a)
    for (int b = -r; b <= r; ++b) {
      const int ta = a + dy;
      const int tb = b + dx;
      if (ta >= -r && ta <= r && tb >= -r && tb <= r) out.at(ta, tb) = h.at(a, b);
    }
  return out;
}

std::pair<int, int> kernel_centroid_offset(const Kernel& h) {
  const int r = h.radius();
  double total = 0.0;
  double my = 0.0;
  double mx = 0.0;
  for (int a = -r; a <= r; ++a)
    for (int b = -r; b <= r; ++b) {
      total += h.at(a, b);
      my += a * h.at(a, b);
      mx += b * h.at(a, b);
    }
  if (!(total > 0.0)) return {0, 0};
  return {static_cast<int>(std::lround(my / total)), static_cast<int>(std::lround(mx / total))};
}

std::string_view to_string(LevelInit init) {
  return init == LevelInit::observation ? "observation" : "upsampled";
}

LevelInit parse_level_init(std::string_view text) {
  if (text == "observation") return LevelInit::observation;
  if (text == "upsampled") return LevelInit::upsampled;
  throw std::invalid_argument("level init must be observation or upsampled");
}

MultiscaleResult multiscale_blind_deconv(const Image& y, int kernel_k, const SolverConfig& base,
                                         const MultiscaleOptions& options) {
  base.validate();
  if (y.empty() || !y.all_finite()) throw std::invalid_argument("observation must be finite");

  MultiscaleResult result;
  result.schedule = plan_schedule(y.height(), y.width(), kernel_k, base);
  const auto& levels = result.schedule.levels;
  if (base.iterations == 0) {
    result.x = y;
    result.h = Kernel::delta(kernel_k);
    return result;
  }

  Image x;
  Kernel h = Kernel::uniform(3);
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const PyramidLevel& pl = levels[l];
    const Image y_level = resample_image(y, pl.height, pl.width);
    if (l == 0) {
      x = y_level;
      if (pl.kernel_size != 3) h = Kernel::uniform(pl.kernel_size);
    } else {
      const double scale = static_cast<double>(pl.width) / levels[l - 1].width;
      x = options.level_init == LevelInit::observation ? y_level
                                                       : resample_image(x, pl.height, pl.width);
      h = resample_kernel_scaled(h, pl.kernel_size, scale);
    }

    SolverConfig cfg = base;
    cfg.lambda1 = pl.lambda1;
    cfg.lambda2 = pl.lambda2;
    SolverState state = blind_deconv_level(y_level, h, cfg, x, options.on_iteration);

    x = std::move(state.x);
    h = std::move(state.h);
    if (options.recenter) {
      const auto [dy, dx] = kernel_centroid_offset(h);
      if (dy != 0 || dx != 0) {
        h = project_kernel(shift_kernel(h, -dy, -dx), 0.0).kernel;
        x = circular_shift(x, dy, dx);
      }
    }

    LevelReport report{static_cast<int>(l), pl.height, pl.width, pl.kernel_size,
                       state.objective_trace.empty() ? state.initial_objective
                                                     : state.objective_trace.back(),
                       state.flags, h};
    result.objective_trace.insert(result.objective_trace.end(), state.objective_trace.begin(),
                                  state.objective_trace.end());
    result.flags.cg_nonconverged += state.flags.cg_nonconverged;
    result.flags.kernel_degenerate += state.flags.kernel_degenerate;
    result.flags.kernel_line_search += state.flags.kernel_line_search;
    result.levels.push_back(report);
    if (options.on_level) options.on_level(report);
  }
  result.x = std::move(x);
  result.h = std::move(h);
  return result;
}

}  // namespace ogsd
