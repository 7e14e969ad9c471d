#include "ogsdeconv/filter_bank.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace ogsd {

Stencil::Stencil(std::string name, std::vector<Tap> taps)
    : name_(std::move(name)), taps_(std::move(taps)) {
  if (taps_.empty()) throw std::invalid_argument("stencil needs at least one tap");
  double total = 0.0;
  double scale = 0.0;
  for (const Tap& t : taps_) {
    total += t.weight;
    scale += std::abs(t.weight);
  }
  if (std::abs(total) > 1e-12 * std::max(1.0, scale))
    throw std::invalid_argument("stencil '" + name_ + "' is not zero-sum");
}

int Stencil::reach() const noexcept {
  int r = 0;
  for (const Tap& t : taps_) r = std::max({r, std::abs(t.dy), std::abs(t.dx)});
  return r;
}

Kernel Stencil::as_kernel() const {
  const int r = std::max(1, reach());
  Kernel k(2 * r + 1);
  // Convolution reads x(p - a), the stencil reads x(p + offset): a = -offset.
  for (const Tap& t : taps_) k.at(-t.dy, -t.dx) += t.weight;
  return k;
}

FilterBank::FilterBank(std::vector<Stencil> filters) : filters_(std::move(filters)) {
  if (filters_.empty()) throw std::invalid_argument("filter bank must hold at least one filter");
}

FilterBank FilterBank::first_differences(int count) {
  std::vector<Stencil> f;
  if (count != 2 && count != 4)
    throw std::invalid_argument("first-difference bank supports 2 or 4 filters");
  f.emplace_back("dx+", std::vector<Tap>{{0, 1, 1.0}, {0, 0, -1.0}});
  f.emplace_back("dy+", std::vector<Tap>{{1, 0, 1.0}, {0, 0, -1.0}});
  if (count == 4) {
    f.emplace_back("dx-", std::vector<Tap>{{0, -1, 1.0}, {0, 0, -1.0}});
    f.emplace_back("dy-", std::vector<Tap>{{-1, 0, 1.0}, {0, 0, -1.0}});
  }
  return FilterBank(std::move(f));
}

}  // namespace ogsd
