#pragma once

#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "gaugerec/grid.hpp"

namespace gaugerec {

enum class FieldKind { Scalar, Vector, SymTensor };

std::string_view to_string(FieldKind kind);
FieldKind field_kind_from_string(std::string_view s);

/// Complex field sampled on a grid, stored node-major with a fixed number of components per node.
class Field {
 public:
  const Grid& grid() const noexcept { return grid_; }
  FieldKind kind() const noexcept { return kind_; }
  int components() const noexcept { return ncomp_; }
  std::size_t size() const noexcept { return grid_.size(); }

  std::span<const cplx> data() const noexcept { return values_; }
  std::span<cplx> data() noexcept { return values_; }

  cplx component(std::size_t node, int c) const { return values_[node * ncomp_ + c]; }
  cplx& component(std::size_t node, int c) { return values_[node * ncomp_ + c]; }

  bool all_finite() const;
  /// Largest modulus over all nodes and components.
  double max_abs() const;
  /// Largest imaginary part in modulus.
  double max_imag() const;

 protected:
  Field() = default;
  Field(Grid grid, FieldKind kind, int ncomp);
  Field(Grid grid, FieldKind kind, int ncomp, std::vector<cplx> values);

  Grid grid_;
  FieldKind kind_ = FieldKind::Scalar;
  int ncomp_ = 1;
  std::vector<cplx> values_;
};

class ScalarField : public Field {
 public:
  ScalarField() = default;
  explicit ScalarField(const Grid& grid, cplx fill = 0.0);
  ScalarField(const Grid& grid, std::vector<cplx> values);

  static ScalarField sample(const Grid& grid, const std::function<cplx(const Point&)>& fn);

  cplx operator[](std::size_t node) const { return values_[node]; }
  cplx& operator[](std::size_t node) { return values_[node]; }

  ScalarField map(const std::function<cplx(cplx)>& fn) const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(cplx s);
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(ScalarField a, cplx s);
ScalarField operator*(cplx s, ScalarField a);
/// Pointwise product.
ScalarField hadamard(const ScalarField& a, const ScalarField& b);

class VectorField : public Field {
 public:
  VectorField() = default;
  explicit VectorField(const Grid& grid);
  VectorField(const Grid& grid, std::vector<cplx> values);

  static VectorField sample(const Grid& grid, const std::function<SmallVec(const Point&)>& fn);

  SmallVec at(std::size_t node) const;
  void set(std::size_t node, const SmallVec& v);
  cplx operator()(std::size_t node, int i) const { return component(node, i); }
  cplx& operator()(std::size_t node, int i) { return component(node, i); }
  ScalarField component_field(int i) const;
};

class SymTensorField : public Field {
 public:
  SymTensorField() = default;
  explicit SymTensorField(const Grid& grid);
  SymTensorField(const Grid& grid, std::vector<cplx> values);

  static SymTensorField sample(const Grid& grid, const std::function<SmallMat(const Point&)>& fn);
  /// Constant tensor field; the input is symmetrized.
  static SymTensorField constant(const Grid& grid, const SmallMat& m);

  /// Full symmetric matrix at a node.
  SmallMat at(std::size_t node) const;
  /// Stores the symmetric part of `m`.
  void set(std::size_t node, const SmallMat& m);
  cplx operator()(std::size_t node, int i, int j) const;
  ScalarField entry_field(int i, int j) const;
};

/// Copy of a field restricted to an index box of its grid.
template <class F>
F restrict_to(const F& f, const IndexBox& box);

/// Writes `part` (defined on the box subgrid) back into `whole`.
template <class F>
void embed(F& whole, const F& part, const IndexBox& box);

/// Node numbers of `grid` inside `box`, in subgrid order.
std::vector<std::size_t> box_nodes(const Grid& grid, const IndexBox& box);

}  // namespace gaugerec
