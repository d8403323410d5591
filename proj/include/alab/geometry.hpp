#pragma once

// Finite boxes of Z^d and of the half-space Z_+ x Z^nu.
//
// Full boxes hold sites n_j in [-L, L-1] on every axis (2L sites per axis).
// Half boxes restrict the first axis to 0..L and carry Delta_+ there; the
// remaining nu axes are full. Sites are stored row-major, last axis fastest.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace alab {

enum class GeometryKind { full, half };
enum class Boundary { periodic, dirichlet };

class Geometry {
 public:
  Geometry() = default;
  // nu is the symbol dimension; a half geometry has nu + 1 axes.
  Geometry(GeometryKind kind, int nu, int L, Boundary bc);

  GeometryKind kind() const noexcept { return kind_; }
  Boundary boundary() const noexcept { return bc_; }
  int nu() const noexcept { return nu_; }
  int L() const noexcept { return L_; }
  int axes() const noexcept { return kind_ == GeometryKind::half ? nu_ + 1 : nu_; }

  // Axis g of the box; for half boxes axis 0 is the Delta_+ axis and symbol
  // axis j lives on box axis j + 1.
  int extent(int g) const;
  int origin(int g) const;  // coordinate of box index 0 on axis g
  bool is_half_axis(int g) const noexcept { return kind_ == GeometryKind::half && g == 0; }
  int symbol_axis(int g) const noexcept { return kind_ == GeometryKind::half ? g - 1 : g; }

  std::size_t size() const noexcept { return size_; }
  std::size_t stride(int g) const;

  std::vector<int> coords(std::size_t index) const;
  void coords(std::size_t index, std::span<int> out) const;
  // Throws "dimension mismatch" for coordinates outside the box.
  std::size_t index(std::span<const int> n) const;
  bool contains(std::span<const int> n) const;
  // Index of the lattice origin (0, ..., 0).
  std::size_t origin_index() const;

 private:
  GeometryKind kind_ = GeometryKind::full;
  int nu_ = 1;
  int L_ = 1;
  Boundary bc_ = Boundary::dirichlet;
  std::vector<int> extent_;
  std::vector<std::size_t> stride_;
  std::size_t size_ = 0;
};

}  // namespace alab
