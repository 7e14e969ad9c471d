#include "ogsdeconv/circulant.hpp"

#include <fftw3.h>

#include <complex>
#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace ogsd {
namespace {

struct FftwDeleter {
  void operator()(void* p) const noexcept { fftw_free(p); }
};
using RealBuffer = std::unique_ptr<double[], FftwDeleter>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwDeleter>;

RealBuffer make_real(std::size_t n) {
  return RealBuffer(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
}
ComplexBuffer make_complex(std::size_t n) {
  return ComplexBuffer(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
}

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

// Planning is not thread-safe in FFTW; execution with the new-array interface
// is. Plans are cached per shape for the lifetime of the process.
const PlanPair& plans_for(int h, int w) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, PlanPair> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find({h, w});
  if (it != cache.end()) return it->second;
  const std::size_t n = static_cast<std::size_t>(h) * w;
  const std::size_t nc = static_cast<std::size_t>(h) * (w / 2 + 1);
  RealBuffer real = make_real(n);
  ComplexBuffer spec = make_complex(nc);
  PlanPair p;
  p.forward = fftw_plan_dft_r2c_2d(h, w, real.get(), spec.get(), FFTW_ESTIMATE);
  p.inverse = fftw_plan_dft_c2r_2d(h, w, spec.get(), real.get(), FFTW_ESTIMATE);
  if (!p.forward || !p.inverse) throw std::runtime_error("FFTW planning failed");
  return cache.emplace(std::make_pair(h, w), p).first->second;
}

class Spectrum {
 public:
  Spectrum(int h, int w)
      : h_(h), w_(w), nc_(static_cast<std::size_t>(h) * (w / 2 + 1)), data_(make_complex(nc_)) {}

  static Spectrum of(const Image& img) {
    Spectrum s(img.height(), img.width());
    const std::size_t n = img.size();
    RealBuffer real = make_real(n);
    std::copy(img.values().begin(), img.values().end(), real.get());
    fftw_execute_dft_r2c(plans_for(s.h_, s.w_).forward, real.get(), s.data_.get());
    return s;
  }

  Image inverse() const {
    const std::size_t n = static_cast<std::size_t>(h_) * w_;
    ComplexBuffer tmp = make_complex(nc_);
    std::memcpy(tmp.get(), data_.get(), sizeof(fftw_complex) * nc_);
    RealBuffer real = make_real(n);
    fftw_execute_dft_c2r(plans_for(h_, w_).inverse, tmp.get(), real.get());
    Image out(h_, w_);
    const double scale = 1.0 / static_cast<double>(n);
    auto ov = out.values();
    for (std::size_t i = 0; i < n; ++i) ov[i] = real[i] * scale;
    return out;
  }

  std::complex<double> operator[](std::size_t i) const { return {data_[i][0], data_[i][1]}; }
  void set(std::size_t i, std::complex<double> v) {
    data_[i][0] = v.real();
    data_[i][1] = v.imag();
  }
  std::size_t count() const noexcept { return nc_; }

 private:
  int h_;
  int w_;
  std::size_t nc_;
  ComplexBuffer data_;
};

}  // namespace

struct CirculantConvolution::Impl {
  int height;
  int width;
  std::vector<std::complex<double>> transfer;
};

CirculantConvolution::CirculantConvolution(const Kernel& ker, int height, int width)
    : impl_(std::make_unique<Impl>()) {
  if (ker.size() > height || ker.size() > width)
    throw std::invalid_argument("CirculantConvolution: kernel larger than image");
  impl_->height = height;
  impl_->width = width;
  Image embedded(height, width);
  const int r = ker.radius();
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx)
      embedded(resolve_index(dy, height, BoundaryMode::circular),
               resolve_index(dx, width, BoundaryMode::circular)) += ker.at(dy, dx);
  const Spectrum s = Spectrum::of(embedded);
  impl_->transfer.resize(s.count());
  for (std::size_t i = 0; i < s.count(); ++i) impl_->transfer[i] = s[i];
}

CirculantConvolution::~CirculantConvolution() = default;
CirculantConvolution::CirculantConvolution(CirculantConvolution&&) noexcept = default;
CirculantConvolution& CirculantConvolution::operator=(CirculantConvolution&&) noexcept = default;

int CirculantConvolution::height() const noexcept { return impl_->height; }
int CirculantConvolution::width() const noexcept { return impl_->width; }

namespace {

template <typename F>
Image filter_spectrum(const Image& x, int h, int w, F&& multiplier) {
  if (x.height() != h || x.width() != w)
    throw std::invalid_argument("CirculantConvolution: image shape mismatch");
  Spectrum s = Spectrum::of(x);
  for (std::size_t i = 0; i < s.count(); ++i) s.set(i, s[i] * multiplier(i));
  return s.inverse();
}

}  // namespace

Image CirculantConvolution::apply(const Image& x) const {
  return filter_spectrum(x, impl_->height, impl_->width,
                         [this](std::size_t i) { return impl_->transfer[i]; });
}

Image CirculantConvolution::apply_adjoint(const Image& z) const {
  return filter_spectrum(z, impl_->height, impl_->width,
                         [this](std::size_t i) { return std::conj(impl_->transfer[i]); });
}

Image CirculantConvolution::apply_normal(const Image& x) const {
  return filter_spectrum(x, impl_->height, impl_->width, [this](std::size_t i) {
    return std::complex<double>(std::norm(impl_->transfer[i]), 0.0);
  });
}

Image circular_cross_correlation(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("cross-correlation shape mismatch");
  const Spectrum sa = Spectrum::of(a);
  Spectrum sb = Spectrum::of(b);
  for (std::size_t i = 0; i < sb.count(); ++i) sb.set(i, std::conj(sa[i]) * sb[i]);
  return sb.inverse();
}

}  // namespace ogsd
