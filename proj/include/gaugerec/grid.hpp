#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace gaugerec {

using cplx = std::complex<double>;

// Small dense types sized for n <= 3 without heap allocation.
using SmallMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;
using SmallVec = Eigen::Matrix<cplx, Eigen::Dynamic, 1, 0, 3, 1>;
using RealMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

using Point = std::array<double, 3>;
using Index3 = std::array<int, 3>;

/// Axis-aligned box of grid indices, inclusive lower and exclusive upper bounds.
struct IndexBox {
  Index3 lo{0, 0, 0};
  Index3 hi{1, 1, 1};
};

/// Uniform rectangular grid over an axis-aligned box in two or three dimensions.
///
/// Nodes are numbered row-major: the last axis varies fastest.
class Grid {
 public:
  Grid() = default;
  Grid(int dim, std::array<double, 3> lo, std::array<double, 3> hi, Index3 shape);

  /// Unit square or cube with `n` nodes per axis.
  static Grid unit(int dim, int n);

  int dim() const noexcept { return dim_; }
  const Index3& shape() const noexcept { return shape_; }
  double lo(int axis) const { return lo_[axis]; }
  double hi(int axis) const { return hi_[axis]; }
  double spacing(int axis) const { return h_[axis]; }
  std::size_t size() const noexcept { return size_; }
  double diameter() const;

  std::size_t stride(int axis) const { return stride_[axis]; }
  std::size_t node(const Index3& idx) const;
  Index3 index(std::size_t node) const;
  Point coord(std::size_t node) const;
  bool is_boundary(std::size_t node) const;
  /// Boundary node numbers in increasing order.
  std::vector<std::size_t> boundary_nodes() const;
  std::vector<std::size_t> interior_nodes() const;
  /// Nodes at physical distance >= margin from every face.
  std::vector<std::size_t> nodes_with_margin(double margin) const;
  /// Face-adjacent neighbours.
  void neighbors(std::size_t node, std::vector<std::size_t>& out) const;

  /// Grid restricted to an index box, keeping physical coordinates.
  Grid subgrid(const IndexBox& box) const;
  IndexBox full_box() const;

  bool operator==(const Grid& other) const;
  bool operator!=(const Grid& other) const { return !(*this == other); }

 private:
  int dim_ = 0;
  std::array<double, 3> lo_{0, 0, 0};
  std::array<double, 3> hi_{0, 0, 0};
  std::array<double, 3> h_{0, 0, 0};
  Index3 shape_{1, 1, 1};
  std::array<std::size_t, 3> stride_{1, 1, 1};
  std::size_t size_ = 0;
};

/// Number of independent entries of a symmetric n x n matrix.
constexpr int sym_size(int n) { return n * (n + 1) / 2; }

/// Position of entry (i, j) in the packed upper-triangle storage.
int sym_index(int n, int i, int j);

/// I_n = n(n+3)/2, the number of internal fields required in dimension n.
constexpr int required_fields(int n) { return n * (n + 3) / 2; }

/// M_n = n(n+1)/2 - 1.
constexpr int m_count(int n) { return n * (n + 1) / 2 - 1; }

}  // namespace gaugerec
