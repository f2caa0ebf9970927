#include "gaugerec/presets.hpp"

#include <cmath>
#include <numbers>

namespace gaugerec {

namespace {

constexpr double pi = std::numbers::pi;

// Waves for the manufactured near-identity class, indexed by (i, j) with i <= j.
Wave tensor_wave(int i, int j) {
  static const Wave table[3][3] = {
      {{{0.7, 0.5}, {pi, 0.5 * pi, 0.6 * pi}, 0.3},
       {{0.5, 0.7}, {0.8 * pi, 0.7 * pi, 0.3 * pi}, 0.5},
       {{-0.4, 0.6}, {0.6 * pi, 0.3 * pi, 0.9 * pi}, 0.8}},
      {{}, {{0.6, -0.6}, {0.5 * pi, pi, 0.4 * pi}, 1.1}, {{0.3, 0.8}, {0.4 * pi, 0.9 * pi, 0.5 * pi}, 0.2}},
      {{}, {}, {{-0.5, -0.6}, {0.7 * pi, 0.4 * pi, pi}, 0.6}}};
  return table[i][j];
}

Wave vector_wave(int i) {
  static const Wave table[3] = {{{0.8, 0.4}, {0.6 * pi, pi, 0.5 * pi}, 0.2},
                                {{-0.5, 0.7}, {pi, 0.4 * pi, 0.7 * pi}, 0.9},
                                {{0.4, -0.8}, {0.5 * pi, 0.6 * pi, 0.8 * pi}, 1.4}};
  return table[i];
}

const Wave c_wave{{-0.6, 0.7}, {0.7 * pi, 0.9 * pi, 0.6 * pi}, 0.4};

}  // namespace

cplx Wave::value(const Point& x) const { return amp * std::sin(k[0] * x[0] + k[1] * x[1] + k[2] * x[2] + phase); }

SmallVec Wave::gradient(const Point& x, int dim) const {
  const cplx d = amp * std::cos(k[0] * x[0] + k[1] * x[1] + k[2] * x[2] + phase);
  SmallVec g(dim);
  for (int i = 0; i < dim; ++i) g(i) = d * k[i];
  return g;
}

double bump(const Point& x, int dim) {
  double b = 1.0;
  for (int i = 0; i < dim; ++i) b *= std::sin(pi * x[i]);
  return b;
}

SmallVec bump_gradient(const Point& x, int dim) {
  SmallVec g(dim);
  for (int i = 0; i < dim; ++i) {
    double p = pi * std::cos(pi * x[i]);
    for (int j = 0; j < dim; ++j)
      if (j != i) p *= std::sin(pi * x[j]);
    g(i) = p;
  }
  return g;
}

CoefficientSet near_identity_coefficients(const Grid& grid, double amplitude) {
  const int n = grid.dim();
  auto a = SymTensorField::sample(grid, [&](const Point& x) {
    SmallMat m = SmallMat::Identity(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) m(i, j) = m(j, i) = m(i, j) + amplitude * tensor_wave(i, j).value(x);
    return m;
  });
  auto diva = VectorField::sample(grid, [&](const Point& x) {
    SmallVec d = SmallVec::Zero(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d(i) += amplitude * tensor_wave(std::min(i, j), std::max(i, j)).gradient(x, n)(j);
    return d;
  });
  auto b = VectorField::sample(grid, [&](const Point& x) {
    SmallVec v(n);
    for (int i = 0; i < n; ++i) v(i) = amplitude * vector_wave(i).value(x);
    return v;
  });
  auto c = ScalarField::sample(grid, [&](const Point& x) { return amplitude * c_wave.value(x); });
  return {std::move(a), std::move(b), std::move(c), std::move(diva)};
}

CoefficientSet constant_tensor_coefficients(const Grid& grid, const SmallMat& a0) {
  VectorField zero(grid);
  return {SymTensorField::constant(grid, a0), zero, ScalarField(grid), zero};
}

SmallMat demo_anisotropy(int dim) {
  SmallMat s = SmallMat::Zero(dim, dim);
  s(0, 0) = 1.0, s(1, 1) = -0.5, s(0, 1) = s(1, 0) = 0.5;
  if (dim == 3) s(2, 2) = 0.25, s(0, 2) = s(2, 0) = -0.3, s(1, 2) = s(2, 1) = 0.4;
  return s;
}

SmallMat demo_constant_tensor(int dim) {
  SmallMat a = SmallMat::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) a(i, i) = i + 1.0;
  return a + cplx(0.0, 0.1) * demo_anisotropy(dim);
}

CoefficientSet isotropic_c_coefficients(const Grid& grid, ScalarField* gamma_out) {
  const int n = grid.dim();
  auto a = SymTensorField::sample(grid, [&](const Point& x) {
    return SmallMat((1.0 + 0.3 * bump(x, n)) * SmallMat::Identity(n, n));
  });
  auto diva = VectorField::sample(grid, [&](const Point& x) { return SmallVec(0.3 * bump_gradient(x, n)); });
  auto c = ScalarField::sample(grid, [&](const Point& x) {
    return cplx(1.0, 0.5) + cplx(0.5, -0.3) * std::cos(pi * x[0]) * std::cos(0.5 * pi * x[1]);
  });
  if (gamma_out) *gamma_out = ScalarField::sample(grid, [&](const Point& x) { return 1.0 + 0.3 * bump(x, n); });
  return {std::move(a), VectorField(grid), std::move(c), std::move(diva)};
}

void anisotropic_gamma(const Grid& grid, SymTensorField& gamma, VectorField& div_gamma) {
  const int n = grid.dim();
  const SmallMat s = demo_anisotropy(n);
  gamma = SymTensorField::sample(grid, [&](const Point& x) {
    return SmallMat(SmallMat::Identity(n, n) + 0.2 * bump(x, n) * s);
  });
  div_gamma = VectorField::sample(grid, [&](const Point& x) { return SmallVec(0.2 * s * bump_gradient(x, n)); });
}

QpatTruth qpat_demo_truth(const Grid& grid) {
  QpatTruth t;
  anisotropic_gamma(grid, t.gamma, t.div_gamma);
  t.sigma = ScalarField::sample(grid, [&](const Point& x) { return 1.0 + 0.5 * bump(x, grid.dim()); });
  return t;
}

CoefficientSet qpat_forward_coefficients(const QpatTruth& t) {
  return {t.gamma, VectorField(t.gamma.grid()), -1.0 * t.sigma, t.div_gamma};
}

ElastoTruth elasto_demo_truth(const Grid& grid) {
  ElastoTruth t;
  anisotropic_gamma(grid, t.gamma, t.div_gamma);
  t.rho = ScalarField(grid, cplx(1.0, 0.3));
  t.omega = 1.0;
  return t;
}

CoefficientSet elasto_forward_coefficients(const ElastoTruth& t) {
  return {t.gamma, VectorField(t.gamma.grid()), (t.omega * t.omega) * t.rho, t.div_gamma};
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"identity-2d",  "constant-tensor-2d", "constant-tensor-3d",
                                                 "isotropic-c", "qpat-demo",          "elasto-demo"};
  return names;
}

}  // namespace gaugerec
