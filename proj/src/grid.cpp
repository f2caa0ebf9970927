#include "gaugerec/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace gaugerec {

Grid::Grid(int dim, std::array<double, 3> lo, std::array<double, 3> hi, Index3 shape)
    : dim_(dim), lo_(lo), hi_(hi), shape_(shape) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("grid dimension must be 2 or 3");
  for (int a = dim; a < 3; ++a) {
    shape_[a] = 1;
    lo_[a] = hi_[a] = 0.0;
  }
  for (int a = 0; a < dim; ++a) {
    if (shape_[a] < 2) throw std::invalid_argument("grid needs at least 2 nodes per axis");
    if (!(hi_[a] > lo_[a])) throw std::invalid_argument("grid extent must be a nonempty interval");
    h_[a] = (hi_[a] - lo_[a]) / (shape_[a] - 1);
  }
  stride_[2] = 1;
  stride_[1] = static_cast<std::size_t>(shape_[2]);
  stride_[0] = stride_[1] * static_cast<std::size_t>(shape_[1]);
  size_ = stride_[0] * static_cast<std::size_t>(shape_[0]);
}

Grid Grid::unit(int dim, int n) {
  return Grid(dim, {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, {n, n, dim == 3 ? n : 1});
}

double Grid::diameter() const {
  double s = 0.0;
  for (int a = 0; a < dim_; ++a) s += (hi_[a] - lo_[a]) * (hi_[a] - lo_[a]);
  return std::sqrt(s);
}

std::size_t Grid::node(const Index3& idx) const {
  return static_cast<std::size_t>(idx[0]) * stride_[0] + static_cast<std::size_t>(idx[1]) * stride_[1] +
         static_cast<std::size_t>(idx[2]);
}

Index3 Grid::index(std::size_t node) const {
  Index3 idx{0, 0, 0};
  idx[0] = static_cast<int>(node / stride_[0]);
  node %= stride_[0];
  idx[1] = static_cast<int>(node / stride_[1]);
  idx[2] = static_cast<int>(node % stride_[1]);
  return idx;
}

Point Grid::coord(std::size_t node) const {
  const Index3 idx = index(node);
  Point p{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) p[a] = lo_[a] + idx[a] * h_[a];
  return p;
}

bool Grid::is_boundary(std::size_t node) const {
  const Index3 idx = index(node);
  for (int a = 0; a < dim_; ++a)
    if (idx[a] == 0 || idx[a] == shape_[a] - 1) return true;
  return false;
}

std::vector<std::size_t> Grid::boundary_nodes() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < size_; ++k)
    if (is_boundary(k)) out.push_back(k);
  return out;
}

std::vector<std::size_t> Grid::interior_nodes() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < size_; ++k)
    if (!is_boundary(k)) out.push_back(k);
  return out;
}

std::vector<std::size_t> Grid::nodes_with_margin(double margin) const {
  std::vector<std::size_t> out;
  const double eps = 1e-9 * diameter();
  for (std::size_t k = 0; k < size_; ++k) {
    const Point x = coord(k);
    bool ok = true;
    for (int a = 0; a < dim_; ++a) ok &= x[a] - lo_[a] >= margin - eps && hi_[a] - x[a] >= margin - eps;
    if (ok) out.push_back(k);
  }
  return out;
}

void Grid::neighbors(std::size_t node, std::vector<std::size_t>& out) const {
  out.clear();
  const Index3 idx = index(node);
  for (int a = 0; a < dim_; ++a) {
    if (idx[a] > 0) out.push_back(node - stride_[a]);
    if (idx[a] < shape_[a] - 1) out.push_back(node + stride_[a]);
  }
}

Grid Grid::subgrid(const IndexBox& box) const {
  std::array<double, 3> lo{0, 0, 0}, hi{0, 0, 0};
  Index3 shape{1, 1, 1};
  for (int a = 0; a < dim_; ++a) {
    if (box.lo[a] < 0 || box.hi[a] > shape_[a] || box.hi[a] - box.lo[a] < 2)
      throw std::invalid_argument("subgrid box out of range");
    lo[a] = lo_[a] + box.lo[a] * h_[a];
    hi[a] = lo_[a] + (box.hi[a] - 1) * h_[a];
    shape[a] = box.hi[a] - box.lo[a];
  }
  return Grid(dim_, lo, hi, shape);
}

IndexBox Grid::full_box() const {
  IndexBox b;
  for (int a = 0; a < 3; ++a) b.hi[a] = shape_[a];
  return b;
}

bool Grid::operator==(const Grid& other) const {
  if (dim_ != other.dim_ || shape_ != other.shape_) return false;
  for (int a = 0; a < dim_; ++a) {
    const double tol = 1e-12 * (std::abs(hi_[a] - lo_[a]) + 1.0);
    if (std::abs(lo_[a] - other.lo_[a]) > tol || std::abs(hi_[a] - other.hi_[a]) > tol) return false;
  }
  return true;
}

int sym_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  // row i of the packed upper triangle starts after sum_{r<i} (n - r) entries
  return i * n - i * (i - 1) / 2 + (j - i);
}

}  // namespace gaugerec
