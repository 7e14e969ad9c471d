#include "ogsdeconv/convolution.hpp"

#include <stdexcept>
#include <string>

namespace ogsd {
namespace {

void check_reach(const Image& img, int reach, const char* what) {
  if (img.empty()) throw std::invalid_argument(std::string(what) + ": empty image");
  if (2 * reach + 1 > img.height() || 2 * reach + 1 > img.width())
    throw std::invalid_argument(std::string(what) + ": kernel larger than image");
}

std::vector<int> column_map(int width, int shift, BoundaryMode mode) {
  std::vector<int> map(width);
  for (int c = 0; c < width; ++c) map[c] = resolve_index(c + shift, width, mode);
  return map;
}

// out(p) += w * in(p + (dy, dx))
void gather_shifted(const Image& in, int dy, int dx, double w, BoundaryMode mode, Image& out) {
  const auto cols = column_map(in.width(), dx, mode);
  for (int r = 0; r < in.height(); ++r) {
    const int sr = resolve_index(r + dy, in.height(), mode);
    for (int c = 0; c < in.width(); ++c) out(r, c) += w * in(sr, cols[c]);
  }
}

// out(p + (dy, dx)) += w * in(p), the adjoint of gather_shifted
void scatter_shifted(const Image& in, int dy, int dx, double w, BoundaryMode mode, Image& out) {
  const auto cols = column_map(in.width(), dx, mode);
  for (int r = 0; r < in.height(); ++r) {
    const int tr = resolve_index(r + dy, in.height(), mode);
    for (int c = 0; c < in.width(); ++c) out(tr, cols[c]) += w * in(r, c);
  }
}

}  // namespace

Image conv2_same(const Image& img, const Kernel& ker, BoundaryMode mode) {
  check_reach(img, ker.radius(), "conv2_same");
  Image out(img.height(), img.width());
  const int r = ker.radius();
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx)
      if (const double w = ker.at(dy, dx); w != 0.0) gather_shifted(img, -dy, -dx, w, mode, out);
  return out;
}

Image conv2_adjoint(const Image& img, const Kernel& ker, BoundaryMode mode) {
  check_reach(img, ker.radius(), "conv2_adjoint");
  Image out(img.height(), img.width());
  const int r = ker.radius();
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx)
      if (const double w = ker.at(dy, dx); w != 0.0) scatter_shifted(img, -dy, -dx, w, mode, out);
  return out;
}

Image apply_filter(const Image& x, const Stencil& f, BoundaryMode mode) {
  check_reach(x, f.reach(), "apply_filter");
  Image out(x.height(), x.width());
  for (const Tap& t : f.taps()) gather_shifted(x, t.dy, t.dx, t.weight, mode, out);
  return out;
}

Image apply_filter_adjoint(const Image& g, const Stencil& f, BoundaryMode mode) {
  check_reach(g, f.reach(), "apply_filter_adjoint");
  Image out(g.height(), g.width());
  for (const Tap& t : f.taps()) scatter_shifted(g, t.dy, t.dx, t.weight, mode, out);
  return out;
}

std::vector<Image> apply_filter_bank(const Image& x, const FilterBank& bank, BoundaryMode mode) {
  std::vector<Image> out;
  out.reserve(bank.size());
  for (const Stencil& f : bank) out.push_back(apply_filter(x, f, mode));
  return out;
}

Image filter_bank_adjoint(const std::vector<Image>& gs, const FilterBank& bank,
                          BoundaryMode mode) {
  if (gs.size() != bank.size())
    throw std::invalid_argument("filter_bank_adjoint: expected one response per filter");
  Image out(gs.front().height(), gs.front().width());
  for (std::size_t m = 0; m < gs.size(); ++m) {
    if (!gs[m].same_shape(gs.front()))
      throw std::invalid_argument("filter_bank_adjoint: response shapes differ");
    out += apply_filter_adjoint(gs[m], bank[m], mode);
  }
  return out;
}

}  // namespace ogsd
