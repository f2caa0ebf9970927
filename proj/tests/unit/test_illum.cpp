#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "gaugerec/errors.hpp"
#include "gaugerec/illum.hpp"

using namespace gaugerec;

namespace {

using Dense = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;

Dense vectorize(const std::vector<SmallMat>& ms) {
  const int n = static_cast<int>(ms.front().rows());
  Dense out(n * n, static_cast<int>(ms.size()));
  for (std::size_t k = 0; k < ms.size(); ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out(i * n + j, static_cast<int>(k)) = ms[k](i, j);
  return out;
}

// Largest residual when each column of `b` is fitted in the column span of `a`.
double fit_residual(const Dense& a, const Dense& b) {
  const Dense coeff = a.colPivHouseholderQr().solve(b);
  return (a * coeff - b).cwiseAbs().maxCoeff();
}

std::vector<SmallMat> quadratic_parts(const IlluminationSet& s, int n) {
  std::vector<SmallMat> out;
  for (std::size_t j = 1 + n; j < s.polynomials.size(); ++j) out.push_back(s.polynomials[j].Q);
  return out;
}

SmallMat random_elliptic(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  SmallMat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m(i, j) = m(j, i) = cplx(0.3 * U(rng), 0.3 * U(rng));
  m += 2.0 * SmallMat::Identity(n, n);
  return m;
}

SmallVec random_vec(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  SmallVec v(n);
  for (int i = 0; i < n; ++i) v(i) = cplx(U(rng), U(rng));
  return v;
}

}  // namespace

TEST_CASE("harmonic family in two dimensions") {
  const Grid g = Grid::unit(2, 9);
  const IlluminationSet s = harmonic_family(g);
  REQUIRE(s.size() == 5);
  CHECK(s.family == IlluminationFamily::Harmonic);
  const std::vector<std::function<double(const Point&)>> expect = {
      [](const Point&) { return 1.0; }, [](const Point& p) { return p[0]; }, [](const Point& p) { return p[1]; },
      [](const Point& p) { return p[0] * p[1]; }, [](const Point& p) { return 0.5 * (p[0] * p[0] - p[1] * p[1]); }};
  const auto bnodes = g.boundary_nodes();
  for (std::size_t j = 0; j < 5; ++j)
    for (std::size_t b = 0; b < bnodes.size(); ++b)
      CHECK(std::abs(s.traces[j].values[b] - expect[j](g.coord(bnodes[b]))) <= 1e-15);
}

TEST_CASE("harmonic family sizes and harmonicity") {
  for (int n : {2, 3}) {
    const IlluminationSet s = harmonic_family(Grid::unit(n, 9));
    CHECK(static_cast<int>(s.size()) == required_fields(n));
    for (const auto& p : s.polynomials) CHECK(std::abs(p.Q.trace()) == 0.0);
  }
}

TEST_CASE("constant tensor family for the identity spans the harmonic quadratics") {
  const Grid g = Grid::unit(2, 9);
  const IlluminationSet s = constant_tensor_family(g, SmallMat::Identity(2, 2));
  REQUIRE(s.size() == 5);
  const std::vector<SmallMat> qs = quadratic_parts(s, 2);
  SmallMat off = SmallMat::Zero(2, 2), diag = SmallMat::Zero(2, 2);
  off(0, 1) = off(1, 0) = 1.0;
  diag(0, 0) = 1.0, diag(1, 1) = -1.0;
  CHECK(fit_residual(vectorize(qs), vectorize({off, diag})) <= 1e-12);
  CHECK(fit_residual(vectorize({off, diag}), vectorize(qs)) <= 1e-12);
}

TEST_CASE("constant tensor Q matrices are orthogonal to a0") {
  SmallMat a0 = SmallMat::Zero(2, 2);
  a0(0, 0) = 1.0, a0(1, 1) = 2.0;
  for (const auto& q : orthogonal_complement_basis(a0)) CHECK(std::abs((a0 * q).trace()) <= 1e-12);

  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const SmallMat a = random_elliptic(3, rng);
    const std::vector<SmallMat> qs = orthogonal_complement_basis(a);
    REQUIRE(qs.size() == 5);
    for (const auto& q : qs) {
      CHECK(std::abs((a * q).trace()) <= 1e-12);
      CHECK((q - q.transpose()).norm() == 0.0);
    }
    Eigen::JacobiSVD<Dense> svd(vectorize(qs));
    CHECK(svd.singularValues().minCoeff() >= 0.5);
  }
  CHECK_THROWS_AS(orthogonal_complement_basis(SmallMat::Zero(2, 2)), DegenerateTensor);
  CHECK_THROWS_AS(constant_tensor_family(Grid::unit(2, 9), SmallMat::Zero(2, 2)), DegenerateTensor);
}

TEST_CASE("local polynomial family at the identity is the harmonic family") {
  for (int n : {2, 3}) {
    const Grid g = Grid::unit(n, 9);
    const IlluminationSet h = harmonic_family(g);
    const IlluminationSet p =
        local_polynomial_family(g, SmallMat::Identity(n, n), SmallVec::Zero(n), 0.0, Point{0, 0, 0});
    REQUIRE(p.size() == h.size());
    for (int j = 0; j <= n; ++j) {
      CHECK((p.polynomials[j].Q - h.polynomials[j].Q).norm() == 0.0);
      CHECK((p.polynomials[j].rho - h.polynomials[j].rho).norm() == 0.0);
      CHECK(p.polynomials[j].d == h.polynomials[j].d);
    }
    const Dense hq = vectorize(quadratic_parts(h, n)), pq = vectorize(quadratic_parts(p, n));
    CHECK(fit_residual(hq, pq) <= 1e-10);
    CHECK(fit_residual(pq, hq) <= 1e-10);
  }
}

TEST_CASE("local polynomial family with b0 = e1") {
  SmallVec b0 = SmallVec::Zero(2);
  b0(0) = 1.0;
  const IlluminationSet s = local_polynomial_family(Grid::unit(2, 9), SmallMat::Identity(2, 2), b0, 0.0, {0, 0, 0});
  const SmallMat q1 = s.polynomials[1].Q;
  CHECK(std::abs(q1.trace() + 1.0) <= 1e-15);
  CHECK((q1 + 0.5 * SmallMat::Identity(2, 2)).norm() <= 1e-15);
  for (const auto& p : s.polynomials) CHECK(std::abs(p.constraint_residual(SmallMat::Identity(2, 2), b0, 0.0)) <= 1e-15);
}

TEST_CASE("local polynomial constraint holds for random complex constant coefficients") {
  std::mt19937_64 rng(23);
  for (int n : {2, 3})
    for (int trial = 0; trial < 20; ++trial) {
      const SmallMat a0 = random_elliptic(n, rng);
      const SmallVec b0 = random_vec(n, rng);
      const cplx c0 = random_vec(1, rng)(0);
      const Point x0{0.3, 0.6, 0.2};
      const IlluminationSet s = local_polynomial_family(Grid::unit(n, 9), a0, b0, c0, x0);
      REQUIRE(static_cast<int>(s.size()) == required_fields(n));
      for (const auto& p : s.polynomials) CHECK(std::abs(p.constraint_residual(a0, b0, c0)) <= 1e-12);
      // the linear parts still form a basis
      Dense lin(n, n);
      for (int j = 0; j < n; ++j) lin.col(j) = s.polynomials[1 + j].rho;
      CHECK(std::abs(lin.determinant()) >= 0.99);
    }
}

TEST_CASE("cgo exponents are isotropic and the family has the right size") {
  for (int n : {2, 3}) {
    const auto rs = cgo_exponents(n, 8.0, 0.5);
    CHECK(static_cast<int>(rs.size()) == required_fields(n));
    for (const auto& r : rs) CHECK((r.transpose() * r)(0, 0) == cplx(0.0));
    const auto ru = cgo_exponents(n, 5.65685424949238, 0.37);
    for (const auto& r : ru) CHECK((r.transpose() * r)(0, 0) == cplx(0.0));
  }
}

TEST_CASE("cgo traces with unit gamma have modulus exp(Re rho.x)") {
  const Grid g = Grid::unit(2, 11);
  const IlluminationSet s = cgo_family(g, nullptr, 8.0, 0.5);
  REQUIRE(s.size() == 5);
  CHECK(*s.params.k == 8.0);
  const auto bnodes = g.boundary_nodes();
  for (std::size_t t = 0; t < s.size(); ++t)
    for (std::size_t b = 0; b < bnodes.size(); ++b) {
      const Point x = g.coord(bnodes[b]);
      const double re = s.exponents[t](0).real() * (x[0] - 0.5) + s.exponents[t](1).real() * (x[1] - 0.5);
      CHECK(std::abs(std::abs(s.traces[t].values[b]) - std::exp(re)) <= 1e-12 * std::exp(re));
    }

  const ScalarField four(g, 4.0);
  const IlluminationSet h = cgo_family(g, &four, 8.0, 0.5);
  for (std::size_t b = 0; b < bnodes.size(); ++b) CHECK(std::abs(h.traces[2].values[b] - 0.5 * s.traces[2].values[b]) <= 1e-14);
  CHECK(cgo_family(g, nullptr).params.k.value() == doctest::Approx(8.0 / std::sqrt(2.0)));
}

TEST_CASE("illumination sets serialize to JSON and back") {
  std::mt19937_64 rng(4);
  const Grid g = Grid::unit(3, 9);
  const IlluminationSet s = local_polynomial_family(g, random_elliptic(3, rng), random_vec(3, rng), 0.5, {0.5, 0.5, 0.5});
  const IlluminationSet back = illumination_from_json(json::parse(illumination_to_json(s).dump()));
  CHECK(back.family == IlluminationFamily::LocalPolynomial);
  REQUIRE(back.size() == s.size());
  REQUIRE(back.polynomials.size() == s.polynomials.size());
  for (std::size_t t = 0; t < s.size(); ++t) {
    CHECK(back.traces[t].values == s.traces[t].values);
    CHECK(back.traces[t].label == s.traces[t].label);
    CHECK((back.polynomials[t].Q - s.polynomials[t].Q).norm() == 0.0);
  }
  CHECK((*back.params.a0 - *s.params.a0).norm() == 0.0);

  const IlluminationSet c = cgo_family(Grid::unit(2, 9), nullptr);
  const IlluminationSet cb = illumination_from_json(illumination_to_json(c));
  CHECK(cb.exponents.size() == 5);
  CHECK(*cb.params.epsilon == 0.5);
}
