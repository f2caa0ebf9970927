#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gaugerec/calculus.hpp"
#include "gaugerec/errors.hpp"
#include "gaugerec/forward.hpp"

using namespace gaugerec;
using std::numbers::pi;

namespace {

CoefficientSet identity_set(const Grid& g, cplx c = 0.0) {
  return {SymTensorField::constant(g, SmallMat::Identity(g.dim(), g.dim())), VectorField(g), ScalarField(g, c),
          VectorField(g)};
}

double sup_diff(const ScalarField& a, const ScalarField& b) { return (a - b).max_abs(); }

// (gamma Id, 0, 0.5i) with gamma = 1 + 0.3 sin(pi x1) sin(pi x2) and analytic div(a) = grad(gamma).
CoefficientSet isotropic_set(const Grid& g) {
  auto gamma = [](const Point& p) { return 1.0 + 0.3 * std::sin(pi * p[0]) * std::sin(pi * p[1]); };
  CoefficientSet c{SymTensorField::sample(g,
                                          [&](const Point& p) {
                                            return SmallMat(gamma(p) * SmallMat::Identity(2, 2));
                                          }),
                   VectorField(g), ScalarField(g, cplx(0.0, 0.5)), VectorField::sample(g, [](const Point& p) {
                     SmallVec v(2);
                     v << 0.3 * pi * std::cos(pi * p[0]) * std::sin(pi * p[1]),
                         0.3 * pi * std::sin(pi * p[0]) * std::cos(pi * p[1]);
                     return v;
                   })};
  return c;
}

double manufactured_error(int n) {
  const Grid g = Grid::unit(2, n);
  const CoefficientSet cs = isotropic_set(g);
  auto exact = [](const Point& p) { return cplx(std::exp(p[0] + p[1])); };
  // L u* = gamma * 2 u* + grad(gamma).(u*, u*) + c u*
  ScalarField src(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const cplx u = exact(g.coord(k));
    const SmallMat a = cs.a.at(k);
    src[k] = a(0, 0) * 2.0 * u + (cs.diva(k, 0) + cs.diva(k, 1)) * u + cs.c[k] * u;
  }
  const ScalarField u = solve_dirichlet(cs, BoundaryTrace::sample(g, exact, "exp"), {}, &src);
  return sup_diff(u, ScalarField::sample(g, exact));
}

}  // namespace

TEST_CASE("harmonic data are exact discrete solutions of the identity operator") {
  const Grid g = Grid::unit(2, 21);
  const ScalarField u =
      solve_dirichlet(identity_set(g), BoundaryTrace::sample(g, [](const Point& p) { return cplx(p[0]); }, "x1"));
  CHECK(sup_diff(u, ScalarField::sample(g, [](const Point& p) { return cplx(p[0]); })) <= 1e-9);

  const ScalarField one = solve_dirichlet(identity_set(g), BoundaryTrace::sample(g, [](const Point&) { return cplx(1.0); }, "1"));
  CHECK(sup_diff(one, ScalarField(g, 1.0)) <= 1e-9);
}

TEST_CASE("boundary values are imposed exactly") {
  const Grid g = Grid::unit(2, 17);
  const BoundaryTrace f =
      BoundaryTrace::sample(g, [](const Point& p) { return cplx(std::cos(3 * p[0]), p[1] * p[1]); }, "f");
  const ScalarField u = solve_dirichlet(isotropic_set(g), f);
  const auto bnodes = g.boundary_nodes();
  for (std::size_t i = 0; i < bnodes.size(); ++i) CHECK(u[bnodes[i]] == f.values[i]);
}

TEST_CASE("manufactured solution converges at second order") {
  const double e1 = manufactured_error(17), e2 = manufactured_error(33), e3 = manufactured_error(65);
  CHECK(std::log2(e1 / e2) >= 1.8);
  CHECK(std::log2(e2 / e3) >= 1.8);
  CHECK(e3 <= 1e-3);
}

TEST_CASE("assembled residual of the returned solution is small") {
  const Grid g = Grid::unit(2, 33);
  const CoefficientSet cs = isotropic_set(g);
  const DirichletSolver solver(cs);
  const BoundaryTrace f = BoundaryTrace::sample(g, [](const Point& p) { return cplx(p[0] * p[1], 1.0 - p[0]); }, "f");
  const ScalarField u = solver.solve(f);
  CHECK(solver.apply(u).max_abs() <= 1e-8 * (u.max_abs() * 4.0 / (g.spacing(0) * g.spacing(0))));
}

TEST_CASE("iterative solver agrees with the direct factorization") {
  const Grid g = Grid::unit(3, 13);
  CoefficientSet cs = identity_set(g, cplx(-1.0, 0.3));
  const BoundaryTrace f = BoundaryTrace::sample(g, [](const Point& p) { return cplx(p[0] + p[1] * p[2]); }, "f");
  const ScalarField direct = solve_dirichlet(cs, f);
  SolverOptions it;
  it.method = LinearSolverKind::BiCGSTAB;
  it.tolerance = 1e-12;
  const ScalarField iter = solve_dirichlet(cs, f, it);
  CHECK(sup_diff(direct, iter) <= 1e-8);
}

TEST_CASE("interior eigenvalue is reported as a singular system") {
  const Grid g = Grid::unit(2, 17);
  const double h = g.spacing(0);
  // smallest Dirichlet eigenvalue of the five-point Laplacian: Delta u + lambda u = 0
  const double lambda = 2.0 * 2.0 * (1.0 - std::cos(pi * h)) / (h * h);
  const BoundaryTrace f = BoundaryTrace::sample(g, [](const Point& p) { return cplx(1.0 + p[0]); }, "f");
  CHECK_THROWS_AS(solve_dirichlet(identity_set(g, lambda), f), SingularSystem);
}

TEST_CASE("ellipticity violations are reported with nodes") {
  const Grid g = Grid::unit(2, 9);
  CoefficientSet cs = identity_set(g);
  SmallMat bad = SmallMat::Identity(2, 2);
  bad(1, 1) = -0.5;
  cs.a.set(40, bad);
  try {
    DirichletSolver s(cs);
    FAIL("expected EllipticityViolation");
  } catch (const EllipticityViolation& e) {
    REQUIRE(e.nodes().size() == 1);
    CHECK(e.nodes()[0] == 40);
  }
}

TEST_CASE("discrete maximum principle for real coefficients with c <= 0") {
  const Grid g = Grid::unit(2, 25);
  CoefficientSet cs = isotropic_set(g);
  cs.c = ScalarField::sample(g, [](const Point& p) { return cplx(-1.0 - p[0]); });
  const BoundaryTrace f = BoundaryTrace::sample(g, [](const Point& p) { return cplx(std::sin(5 * p[0]) + p[1]); }, "f");
  double lo = 1e300, hi = -1e300;
  for (cplx z : f.values) lo = std::min(lo, z.real()), hi = std::max(hi, z.real());
  const ScalarField u = solve_dirichlet(cs, f);
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK(u[k].real() >= std::min(lo, 0.0) - 1e-12);
    CHECK(u[k].real() <= std::max(hi, 0.0) + 1e-12);
  }
}

TEST_CASE("gauge transform examples") {
  const Grid g = Grid::unit(2, 9);
  const cplx c0(0.3, -0.2);
  const CoefficientSet two = gauge_transform(identity_set(g, c0), ScalarField(g, 2.0));
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK((two.a.at(k) - 2.0 * SmallMat::Identity(2, 2)).norm() == 0.0);
    CHECK(two.b.at(k).norm() == 0.0);
    CHECK(two.c[k] == 2.0 * c0);
  }

  const ScalarField tau = ScalarField::sample(g, [](const Point& p) { return cplx(std::exp(p[0])); });
  const VectorField dtau = VectorField::sample(g, [](const Point& p) {
    SmallVec v(2);
    v << std::exp(p[0]), 0.0;
    return v;
  });
  const CoefficientSet e = gauge_transform(identity_set(g), tau, dtau);
  const CoefficientSet ed = gauge_transform(identity_set(g), tau);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double ex = std::exp(g.coord(k)[0]);
    CHECK(std::abs(e.b(k, 0) + ex) <= 1e-12);
    CHECK(std::abs(e.b(k, 1)) <= 1e-12);
    CHECK(std::abs(ed.b(k, 0) + ex) <= 3.0 * g.spacing(0) * g.spacing(0));
  }

  CHECK_THROWS_AS(gauge_transform(identity_set(g), ScalarField(g, 0.0)), VanishingGauge);
}

TEST_CASE("composed gauge transforms equal the product transform") {
  const Grid g = Grid::unit(2, 11);
  CoefficientSet cs = isotropic_set(g);
  cs.b = VectorField::sample(g, [](const Point& p) {
    SmallVec v(2);
    v << cplx(p[1], 0.1), cplx(0.0, p[0]);
    return v;
  });
  auto t1 = [](const Point& p) { return cplx(1.0 + 0.2 * p[0], 0.1 * p[1]); };
  auto t2 = [](const Point& p) { return std::exp(cplx(0.3 * p[1], 0.2 * p[0])); };
  auto dt1 = [](const Point&) {
    SmallVec v(2);
    v << 0.2, cplx(0.0, 0.1);
    return v;
  };
  auto dt2 = [&](const Point& p) {
    SmallVec v(2);
    v << t2(p) * cplx(0.0, 0.2), t2(p) * 0.3;
    return v;
  };
  const ScalarField s1 = ScalarField::sample(g, t1), s2 = ScalarField::sample(g, t2);
  const CoefficientSet twice =
      gauge_transform(gauge_transform(cs, s1, VectorField::sample(g, dt1)), s2, VectorField::sample(g, dt2));
  const CoefficientSet once = gauge_transform(cs, hadamard(s1, s2), VectorField::sample(g, [&](const Point& p) {
                                                return SmallVec(dt1(p) * t2(p) + t1(p) * dt2(p));
                                              }));
  double err = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    err = std::max(err, (twice.a.at(k) - once.a.at(k)).cwiseAbs().maxCoeff());
    err = std::max(err, (twice.b.at(k) - once.b.at(k)).cwiseAbs().maxCoeff());
    err = std::max(err, (twice.diva.at(k) - once.diva.at(k)).cwiseAbs().maxCoeff());
    err = std::max(err, std::abs(twice.c[k] - once.c[k]));
  }
  CHECK(err <= 1e-12);
}

TEST_CASE("synthesize") {
  const Grid g = Grid::unit(2, 17);
  CHECK(synthesize(identity_set(g), {}).empty());

  std::vector<std::function<cplx(const Point&)>> polys = {
      [](const Point&) { return cplx(1.0); }, [](const Point& p) { return cplx(p[0]); },
      [](const Point& p) { return cplx(p[1]); }, [](const Point& p) { return cplx(p[0] * p[1]); },
      [](const Point& p) { return cplx(0.5 * (p[0] * p[0] - p[1] * p[1])); }};
  std::vector<BoundaryTrace> traces;
  for (const auto& p : polys) traces.push_back(BoundaryTrace::sample(g, p, "poly"));
  const auto u = synthesize(identity_set(g), traces);
  REQUIRE(u.size() == 5);
  for (std::size_t j = 0; j < 5; ++j) CHECK(sup_diff(u[j], ScalarField::sample(g, polys[j])) <= 1e-9);

  // index attached to propagated errors
  const double h = g.spacing(0);
  const double lambda = 4.0 * (1.0 - std::cos(pi * h)) / (h * h);
  try {
    (void)synthesize(identity_set(g, lambda), traces);
    FAIL("expected SingularSystem");
  } catch (const SingularSystem& e) {
    CHECK(std::string(e.what()).find("illumination 0") != std::string::npos);
  }
}

TEST_CASE("solution operator is gauge invariant") {
  auto t = [](const Point& p) { return cplx(1.0 + 0.4 * std::sin(pi * p[0]), 0.1 * p[1]); };
  auto traces = [](const Grid& g) {
    return std::vector<BoundaryTrace>{
        BoundaryTrace::sample(g, [](const Point& p) { return std::exp(cplx(p[0], p[1])); }, "e")};
  };

  SUBCASE("exactly when div(a) is carried through the transform") {
    const Grid g = Grid::unit(2, 33);
    const CoefficientSet cs = isotropic_set(g);
    const CoefficientSet ct = gauge_transform(cs, ScalarField::sample(g, t));
    const ScalarField u = synthesize(cs, traces(g))[0];
    CHECK(sup_diff(u, synthesize(ct, traces(g))[0]) <= 1e-10 * u.max_abs());
  }

  SUBCASE("at second order when div(a) is recomputed from the stencils") {
    auto gap = [&](int n) {
      const Grid g = Grid::unit(2, n);
      const CoefficientSet base = isotropic_set(g);
      const CoefficientSet cs = CoefficientSet::with_discrete_divergence(base.a, base.b, base.c);
      const CoefficientSet tr = gauge_transform(base, ScalarField::sample(g, t));
      const CoefficientSet ct = CoefficientSet::with_discrete_divergence(tr.a, tr.b, tr.c);
      return sup_diff(synthesize(cs, traces(g))[0], synthesize(ct, traces(g))[0]);
    };
    const double g1 = gap(17), g2 = gap(33), g3 = gap(65);
    CHECK(g1 > 1e-8);
    CHECK(std::log2(g1 / g2) >= 1.8);
    CHECK(std::log2(g2 / g3) >= 1.8);
  }
}
