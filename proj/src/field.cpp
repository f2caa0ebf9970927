#include "gaugerec/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gaugerec {

std::string_view to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::Scalar:
      return "scalar";
    case FieldKind::Vector:
      return "vector";
    case FieldKind::SymTensor:
      return "symtensor";
  }
  return "scalar";
}

FieldKind field_kind_from_string(std::string_view s) {
  if (s == "scalar") return FieldKind::Scalar;
  if (s == "vector") return FieldKind::Vector;
  if (s == "symtensor") return FieldKind::SymTensor;
  throw std::invalid_argument("unknown field kind '" + std::string(s) + "'");
}

Field::Field(Grid grid, FieldKind kind, int ncomp)
    : grid_(std::move(grid)), kind_(kind), ncomp_(ncomp), values_(grid_.size() * ncomp, cplx(0.0)) {}

Field::Field(Grid grid, FieldKind kind, int ncomp, std::vector<cplx> values)
    : grid_(std::move(grid)), kind_(kind), ncomp_(ncomp), values_(std::move(values)) {
  if (values_.size() != grid_.size() * static_cast<std::size_t>(ncomp_))
    throw std::invalid_argument("field value count does not match grid");
}

bool Field::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

double Field::max_abs() const {
  double m = 0.0;
  for (cplx z : values_) m = std::max(m, std::abs(z));
  return m;
}

double Field::max_imag() const {
  double m = 0.0;
  for (cplx z : values_) m = std::max(m, std::abs(z.imag()));
  return m;
}

// ---- scalar ----

ScalarField::ScalarField(const Grid& grid, cplx fill) : Field(grid, FieldKind::Scalar, 1) {
  std::fill(values_.begin(), values_.end(), fill);
}

ScalarField::ScalarField(const Grid& grid, std::vector<cplx> values)
    : Field(grid, FieldKind::Scalar, 1, std::move(values)) {}

ScalarField ScalarField::sample(const Grid& grid, const std::function<cplx(const Point&)>& fn) {
  ScalarField f(grid);
  for (std::size_t k = 0; k < grid.size(); ++k) f[k] = fn(grid.coord(k));
  return f;
}

ScalarField ScalarField::map(const std::function<cplx(cplx)>& fn) const {
  ScalarField out(grid_);
  for (std::size_t k = 0; k < size(); ++k) out[k] = fn(values_[k]);
  return out;
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  for (std::size_t k = 0; k < size(); ++k) values_[k] += o[k];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  for (std::size_t k = 0; k < size(); ++k) values_[k] -= o[k];
  return *this;
}

ScalarField& ScalarField::operator*=(cplx s) {
  for (cplx& z : values_) z *= s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(ScalarField a, cplx s) { return a *= s; }
ScalarField operator*(cplx s, ScalarField a) { return a *= s; }

ScalarField hadamard(const ScalarField& a, const ScalarField& b) {
  ScalarField out(a.grid());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] * b[k];
  return out;
}

// ---- vector ----

VectorField::VectorField(const Grid& grid) : Field(grid, FieldKind::Vector, grid.dim()) {}

VectorField::VectorField(const Grid& grid, std::vector<cplx> values)
    : Field(grid, FieldKind::Vector, grid.dim(), std::move(values)) {}

VectorField VectorField::sample(const Grid& grid, const std::function<SmallVec(const Point&)>& fn) {
  VectorField f(grid);
  for (std::size_t k = 0; k < grid.size(); ++k) f.set(k, fn(grid.coord(k)));
  return f;
}

SmallVec VectorField::at(std::size_t node) const {
  SmallVec v(ncomp_);
  for (int i = 0; i < ncomp_; ++i) v(i) = component(node, i);
  return v;
}

void VectorField::set(std::size_t node, const SmallVec& v) {
  for (int i = 0; i < ncomp_; ++i) component(node, i) = v(i);
}

ScalarField VectorField::component_field(int i) const {
  ScalarField out(grid_);
  for (std::size_t k = 0; k < size(); ++k) out[k] = component(k, i);
  return out;
}

// ---- symmetric tensor ----

SymTensorField::SymTensorField(const Grid& grid)
    : Field(grid, FieldKind::SymTensor, sym_size(grid.dim())) {}

SymTensorField::SymTensorField(const Grid& grid, std::vector<cplx> values)
    : Field(grid, FieldKind::SymTensor, sym_size(grid.dim()), std::move(values)) {}

SymTensorField SymTensorField::sample(const Grid& grid, const std::function<SmallMat(const Point&)>& fn) {
  SymTensorField f(grid);
  for (std::size_t k = 0; k < grid.size(); ++k) f.set(k, fn(grid.coord(k)));
  return f;
}

SymTensorField SymTensorField::constant(const Grid& grid, const SmallMat& m) {
  SymTensorField f(grid);
  for (std::size_t k = 0; k < grid.size(); ++k) f.set(k, m);
  return f;
}

SmallMat SymTensorField::at(std::size_t node) const {
  const int n = grid_.dim();
  SmallMat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m(i, j) = m(j, i) = component(node, sym_index(n, i, j));
  return m;
}

void SymTensorField::set(std::size_t node, const SmallMat& m) {
  const int n = grid_.dim();
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      component(node, sym_index(n, i, j)) = i == j ? m(i, i) : 0.5 * (m(i, j) + m(j, i));
}

cplx SymTensorField::operator()(std::size_t node, int i, int j) const {
  return component(node, sym_index(grid_.dim(), i, j));
}

ScalarField SymTensorField::entry_field(int i, int j) const {
  ScalarField out(grid_);
  const int c = sym_index(grid_.dim(), i, j);
  for (std::size_t k = 0; k < size(); ++k) out[k] = component(k, c);
  return out;
}

// ---- restriction ----

std::vector<std::size_t> box_nodes(const Grid& grid, const IndexBox& box) {
  std::vector<std::size_t> out;
  Index3 idx{0, 0, 0};
  const int d = grid.dim();
  const int z_lo = d == 3 ? box.lo[2] : 0, z_hi = d == 3 ? box.hi[2] : 1;
  for (idx[0] = box.lo[0]; idx[0] < box.hi[0]; ++idx[0])
    for (idx[1] = box.lo[1]; idx[1] < box.hi[1]; ++idx[1])
      for (idx[2] = z_lo; idx[2] < z_hi; ++idx[2]) out.push_back(grid.node(idx));
  return out;
}

namespace {

template <class F>
F make_like(const Grid& g);

template <>
ScalarField make_like<ScalarField>(const Grid& g) { return ScalarField(g); }
template <>
VectorField make_like<VectorField>(const Grid& g) { return VectorField(g); }
template <>
SymTensorField make_like<SymTensorField>(const Grid& g) { return SymTensorField(g); }

}  // namespace

template <class F>
F restrict_to(const F& f, const IndexBox& box) {
  F out = make_like<F>(f.grid().subgrid(box));
  const auto nodes = box_nodes(f.grid(), box);
  const int nc = f.components();
  for (std::size_t k = 0; k < nodes.size(); ++k)
    for (int c = 0; c < nc; ++c) out.component(k, c) = f.component(nodes[k], c);
  return out;
}

template <class F>
void embed(F& whole, const F& part, const IndexBox& box) {
  const auto nodes = box_nodes(whole.grid(), box);
  const int nc = whole.components();
  for (std::size_t k = 0; k < nodes.size(); ++k)
    for (int c = 0; c < nc; ++c) whole.component(nodes[k], c) = part.component(k, c);
}

template ScalarField restrict_to(const ScalarField&, const IndexBox&);
template VectorField restrict_to(const VectorField&, const IndexBox&);
template SymTensorField restrict_to(const SymTensorField&, const IndexBox&);
template void embed(ScalarField&, const ScalarField&, const IndexBox&);
template void embed(VectorField&, const VectorField&, const IndexBox&);
template void embed(SymTensorField&, const SymTensorField&, const IndexBox&);

}  // namespace gaugerec
