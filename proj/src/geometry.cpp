#include "alab/geometry.hpp"

#include "alab/error.hpp"

namespace alab {

Geometry::Geometry(GeometryKind kind, int nu, int L, Boundary bc) : kind_(kind), nu_(nu), L_(L), bc_(bc) {
  if (nu < 1) throw Error("invalid geometry", "nu must be positive");
  if (L < 1) throw Error("invalid geometry", "L must be at least 1");
  const int d = axes();
  extent_.resize(static_cast<std::size_t>(d));
  stride_.resize(static_cast<std::size_t>(d));
  for (int g = 0; g < d; ++g) extent_[static_cast<std::size_t>(g)] = is_half_axis(g) ? L + 1 : 2 * L;
  size_ = 1;
  for (int g = d - 1; g >= 0; --g) {
    stride_[static_cast<std::size_t>(g)] = size_;
    size_ *= static_cast<std::size_t>(extent_[static_cast<std::size_t>(g)]);
  }
}

int Geometry::extent(int g) const { return extent_.at(static_cast<std::size_t>(g)); }
int Geometry::origin(int g) const { return is_half_axis(g) ? 0 : -L_; }
std::size_t Geometry::stride(int g) const { return stride_.at(static_cast<std::size_t>(g)); }

std::vector<int> Geometry::coords(std::size_t index) const {
  std::vector<int> n(static_cast<std::size_t>(axes()));
  coords(index, n);
  return n;
}

void Geometry::coords(std::size_t index, std::span<int> out) const {
  for (int g = 0; g < axes(); ++g) {
    const auto s = stride_[static_cast<std::size_t>(g)];
    out[static_cast<std::size_t>(g)] = static_cast<int>(index / s) + origin(g);
    index %= s;
  }
}

bool Geometry::contains(std::span<const int> n) const {
  if (static_cast<int>(n.size()) != axes()) return false;
  for (int g = 0; g < axes(); ++g) {
    const int i = n[static_cast<std::size_t>(g)] - origin(g);
    if (i < 0 || i >= extent(g)) return false;
  }
  return true;
}

std::size_t Geometry::index(std::span<const int> n) const {
  if (!contains(n)) throw Error("dimension mismatch", "site outside box");
  std::size_t idx = 0;
  for (int g = 0; g < axes(); ++g)
    idx += static_cast<std::size_t>(n[static_cast<std::size_t>(g)] - origin(g)) * stride_[static_cast<std::size_t>(g)];
  return idx;
}

std::size_t Geometry::origin_index() const {
  std::vector<int> zero(static_cast<std::size_t>(axes()), 0);
  return index(zero);
}

}  // namespace alab
