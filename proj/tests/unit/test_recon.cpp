#include <doctest.h>

#include <cmath>

#include "analytic.hpp"
#include "gaugerec/calculus.hpp"
#include "gaugerec/illum.hpp"
#include "gaugerec/presets.hpp"
#include "gaugerec/recon.hpp"

using namespace gaugerec;

namespace {

const double rt2 = std::sqrt(2.0);

SmallMat mat2(cplx a, cplx b, cplx c) {
  SmallMat m(2, 2);
  m << a, b, b, c;
  return m;
}

double max_mat(const SymTensorField& f, const std::function<SmallMat(const Point&)>& expect) {
  double e = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k)
    e = std::max(e, (f.at(k) - expect(f.grid().coord(k))).cwiseAbs().maxCoeff());
  return e;
}

struct Pipeline {
  RatioBundle rb;
  FrameData fr;
  MBundle mb;
  ClassRepresentative rep;
};

Pipeline run(const std::vector<ScalarField>& u, const ReconOptions& opts = {}) {
  Pipeline p;
  p.rb = build_ratios(u, 1e-8);
  p.fr = build_frame(p.rb, opts.cond_max);
  p.mb = build_M(p.rb, p.fr, opts);
  p.rep = reconstruct_class(p.mb, p.rb, p.fr, opts);
  return p;
}

ClassError roundtrip_error(int N, double amplitude = 0.1) {
  const Grid g = Grid::unit(2, N);
  const CoefficientSet C = near_identity_coefficients(g, amplitude);
  const auto u = synthesize(C, harmonic_family(g).traces);
  const Pipeline p = run(u);
  // corners of the square break the smooth-boundary regularity; measure on a fixed inner subdomain
  return compare(p.rep, canonical_truth(C, p.rep.convention, &p.rep.u1), g.nodes_with_margin(1.0 / 16));
}

}  // namespace

TEST_CASE("ratios of harmonic polynomials") {
  const Grid g = Grid::unit(2, 17);
  const auto u = oracle::harmonic_polynomials(g);
  const RatioBundle rb = build_ratios(u, 1e-3);
  REQUIRE(rb.size() == 4);
  for (std::size_t j = 0; j < 4; ++j) CHECK(oracle::sup_diff(rb.v[j], u[j + 1]) == 0.0);

  std::vector<ScalarField> scaled;
  for (const auto& f : u) scaled.push_back(3.0 * f);
  const RatioBundle rs = build_ratios(scaled, 1e-3);
  for (std::size_t j = 0; j < 4; ++j) CHECK(oracle::sup_diff(rs.v[j], rb.v[j]) <= 1e-15);
}

TEST_CASE("vanishing u1 is reported with its nodes") {
  const Grid g = Grid::unit(2, 17);
  auto u = oracle::harmonic_polynomials(g);
  u[0] = ScalarField::sample(g, [](const Point& x) { return x[0] - 0.5; });
  try {
    build_ratios(u, 1e-3);
    FAIL("expected VanishingU1");
  } catch (const VanishingU1& e) {
    REQUIRE(e.nodes().size() == 17);
    for (std::size_t k : e.nodes()) CHECK(std::abs(g.coord(k)[0] - 0.5) <= 1e-12);
  }
}

TEST_CASE("frame of linear ratios is the identity") {
  const Grid g = Grid::unit(2, 17);
  const auto u = oracle::harmonic_polynomials(g);
  const FrameData fr = build_frame(build_ratios(u, 1e-3));
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK((fr.H[k] - SmallMat::Identity(2, 2)).norm() <= 1e-12);
    CHECK(fr.cond[k] == doctest::Approx(1.0).epsilon(1e-12));
  }
  auto dup = u;
  dup[2] = dup[1];
  CHECK_THROWS_AS(build_frame(build_ratios(dup, 1e-3)), FrameDegenerate);
}

TEST_CASE("M matrices for harmonic data on the identity") {
  const Grid g = Grid::unit(2, 65);
  const Pipeline p = run(oracle::harmonic_polynomials(g));
  REQUIRE(p.mb.M.size() == 2);
  double th = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point x = g.coord(k);
    th = std::max(th, std::abs(p.mb.Theta[0](k, 0) + x[1]));
    th = std::max(th, std::abs(p.mb.Theta[0](k, 1) + x[0]));
  }
  CHECK(th <= 1e-8);
  CHECK(max_mat(p.mb.M[0], [](const Point&) { return mat2(0, 1, 0); }) <= 1e-8);
  CHECK(max_mat(p.mb.M[1], [](const Point&) { return mat2(1, 0, -1); }) <= 1e-8);
  CHECK(max_mat(p.mb.M0, [](const Point&) { return mat2(1 / rt2, 0, 1 / rt2); }) <= 1e-8);
  const SmallMat brute = oracle::brute_force_M0({mat2(0, 1, 0), mat2(1, 0, -1)});
  CHECK((brute - mat2(1 / rt2, 0, 1 / rt2)).norm() <= 1e-12);
  for (double v : p.mb.indep) CHECK(v >= 0.5);
}

TEST_CASE("M0 agrees with the brute-force null vector on solver data") {
  const Grid g = Grid::unit(2, 33);
  const auto u = synthesize(near_identity_coefficients(g), harmonic_family(g).traces);
  for (Pairing pairing : {Pairing::Bilinear, Pairing::Conjugated}) {
    ReconOptions opts;
    opts.pairing = pairing;
    const Pipeline p = run(u, opts);
    double e = 0.0;
    for (std::size_t k : g.interior_nodes())
      e = std::max(e, (p.mb.M0.at(k) -
                       oracle::brute_force_M0({p.mb.M[0].at(k), p.mb.M[1].at(k)}, pairing == Pairing::Conjugated))
                          .cwiseAbs()
                          .maxCoeff());
    CHECK(e <= 1e-10);
  }
}

TEST_CASE("theta combinations vanish and M0 is orthogonal to the M matrices") {
  for (int n : {2, 3}) {
    const Grid g = Grid::unit(n, n == 2 ? 33 : 13);
    const auto u = synthesize(near_identity_coefficients(g), harmonic_family(g).traces);
    const Pipeline p = run(u);
    double lin = 0.0, orth = 0.0;
    for (std::size_t m = 0; m < p.mb.M.size(); ++m)
      for (std::size_t k = 0; k < g.size(); ++k) {
        const auto th = p.mb.theta(m, k, p.fr, p.rb.size());
        SmallVec s = SmallVec::Zero(n);
        for (std::size_t j = 0; j < th.size(); ++j) s += th[j] * p.rb.grad_v[j].at(k);
        lin = std::max(lin, s.cwiseAbs().maxCoeff());
        orth = std::max(orth, std::abs((p.mb.M0.at(k) * p.mb.M[m].at(k)).trace()));
      }
    CHECK(lin <= 1e-9);
    CHECK(orth <= 1e-8);
    double unit = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const SmallMat m0 = p.mb.M0.at(k);
      unit = std::max(unit, std::abs((m0 * m0).trace() - 1.0));
      CHECK(m0.trace().real() > 0.0);
    }
    CHECK(unit <= 1e-8);
  }
}

TEST_CASE("constant tensor illuminations give M = Q") {
  for (int n : {2, 3}) {
    const Grid g = Grid::unit(n, n == 2 ? 33 : 11);
    const SmallMat a0 = demo_constant_tensor(n);
    const IlluminationSet s = constant_tensor_family(g, a0);
    const auto u = synthesize(constant_tensor_coefficients(g, a0), s.traces);
    const Pipeline p = run(u);
    const double h = g.spacing(0);
    for (std::size_t m = 0; m < p.mb.M.size(); ++m) {
      const SmallMat Q = s.polynomials[1 + n + m].Q;
      CHECK(max_mat(p.mb.M[m], [&](const Point&) { return Q; }) <= 10 * h * h);
    }
    // the Q are orthogonal to a0, so M0 is the unit-norm multiple of a0
    const SmallMat expect = oracle::canonical_tensor(a0, 1.0);
    CHECK(max_mat(p.rep.a, [&](const Point&) { return expect; }) <= 1e-8);
  }
}

TEST_CASE("reconstruction of the identity from harmonic data") {
  const Grid g = Grid::unit(2, 33);
  const Pipeline p = run(oracle::harmonic_polynomials(g));
  CHECK(max_mat(p.rep.a, [](const Point&) { return mat2(1 / rt2, 0, 1 / rt2); }) <= 1e-8);
  CHECK(p.rep.b_plus_diva.max_abs() <= 1e-8);
  CHECK(p.rep.beta.max_abs() <= 1e-8);
  CHECK(p.rep.c.max_abs() <= 1e-8);
  REQUIRE(p.rep.b);
  CHECK(p.rep.b->max_abs() <= 1e-8);
  for (double r : p.rep.diagnostics.residual) CHECK(r <= 1e-8);
}

TEST_CASE("equation residual is small on solver data") {
  const Grid g = Grid::unit(2, 65);
  const auto u = synthesize(near_identity_coefficients(g), harmonic_family(g).traces);
  const Pipeline p = run(u);
  double r = 0.0;
  for (std::size_t k : g.interior_nodes()) r = std::max(r, p.rep.diagnostics.residual[k]);
  CHECK(r <= 1e-8);
}

TEST_CASE("manufactured near-identity round trip converges") {
  const ClassError e33 = roundtrip_error(33), e65 = roundtrip_error(65), e129 = roundtrip_error(129);
  MESSAGE("relative errors " << e33.relative() << " " << e65.relative() << " " << e129.relative());
  CHECK(e129.relative() <= 0.05);
  CHECK(oracle::order(e33.relative(), e65.relative()) >= 1.5);
  CHECK(oracle::order(e65.relative(), e129.relative()) >= 1.5);
  CHECK(e129.relative_b() <= 0.1);
  CHECK(oracle::order(e65.relative_b(), e129.relative_b()) >= 1.0);
}

TEST_CASE("canonical truth has unit bilinear norm") {
  const Grid g = Grid::unit(2, 17);
  const CoefficientSet C = near_identity_coefficients(g);
  const ScalarField u1 = ScalarField::sample(g, [](const Point& x) { return cplx(1.0 + x[0], 0.2 * x[1]); });
  const ClassRepresentative t = canonical_truth(C, GaugeConvention::U1Normalized, &u1);
  const ClassRepresentative f = canonical_truth(C, GaugeConvention::UnitFrobenius);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const SmallMat sa = u1[k] * u1[k] * t.a.at(k);
    CHECK(std::abs((sa * sa).trace() - 1.0) <= 1e-12);
    CHECK((t.a.at(k) - oracle::canonical_tensor(C.a.at(k), u1[k] * u1[k])).norm() <= 1e-12);
    CHECK((f.a.at(k) - oracle::canonical_tensor(C.a.at(k), 1.0)).norm() <= 1e-12);
  }
}

TEST_CASE("real data give real outputs") {
  const Grid g = Grid::unit(2, 33);
  CoefficientSet C = near_identity_coefficients(g);
  for (auto* f : std::initializer_list<Field*>{&C.a, &C.b, &C.c, &C.diva})
    for (auto& z : f->data()) z = z.real();
  const auto u = synthesize(C, harmonic_family(g).traces);
  for (const auto& f : u) REQUIRE(f.max_imag() == 0.0);
  const Pipeline p = run(u);
  CHECK(p.mb.M0.max_imag() <= 1e-12);
  CHECK(p.rep.a.max_imag() <= 1e-12);
  CHECK(p.rep.b_plus_diva.max_imag() <= 1e-12);
  CHECK(p.rep.c.max_imag() <= 1e-12);
  CHECK(p.rep.b->max_imag() <= 1e-12);

  ReconOptions conj;
  conj.pairing = Pairing::Conjugated;
  const Pipeline q = run(u, conj);
  double d = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) d = std::max(d, (q.rep.a.at(k) - p.rep.a.at(k)).norm());
  CHECK(d <= 1e-12);
}

TEST_CASE("conjugated pairing on complex data") {
  const Grid g = Grid::unit(2, 33);
  const auto u = synthesize(near_identity_coefficients(g), harmonic_family(g).traces);
  ReconOptions conj;
  conj.pairing = Pairing::Conjugated;
  const Pipeline p = run(u, conj);
  double orth = 0.0;
  for (std::size_t m = 0; m < p.mb.M.size(); ++m)
    for (std::size_t k = 0; k < g.size(); ++k)
      orth = std::max(orth, std::abs((p.mb.M0.at(k) * p.mb.M[m].at(k).conjugate()).trace()));
  CHECK(orth <= 1e-8);
  CHECK(std::abs(p.mb.M0.at(0).norm() - 1.0) <= 1e-12);
}

TEST_CASE("gauge-equivalent coefficients give the same representative") {
  const Grid g = Grid::unit(2, 65);
  const CoefficientSet C = near_identity_coefficients(g);
  const double pi = std::acos(-1.0);
  const ScalarField tau = ScalarField::sample(g, [&](const Point& x) { return 1.0 + 0.4 * std::sin(pi * x[0]); });
  const VectorField dtau = VectorField::sample(g, [&](const Point& x) {
    SmallVec v(2);
    v << 0.4 * pi * std::cos(pi * x[0]), 0.0;
    return v;
  });
  const auto traces = harmonic_family(g).traces;
  const Pipeline p = run(synthesize(C, traces));
  const Pipeline q = run(synthesize(gauge_transform(C, tau, dtau), traces));
  const ClassError e = compare(q.rep, p.rep, g.interior_nodes());
  // solver roundoff (~1e-11) amplified by second differences
  CHECK(e.relative() <= 1e-5);
}

TEST_CASE("cgo illuminations give a bounded frame on the identity") {
  const Grid g = Grid::unit(2, 65);
  const IlluminationSet s = cgo_family(g, nullptr);
  const auto u = synthesize(constant_tensor_coefficients(g, SmallMat::Identity(2, 2)), s.traces);
  const RatioBundle rb = build_ratios(u, 1e-8);
  const FrameData fr = evaluate_frame(rb);
  MESSAGE("cgo max cond " << fr.max_cond());
  CHECK(fr.max_cond() <= 1e6);
}

TEST_CASE("dependent M matrices are rejected") {
  const Grid g = Grid::unit(2, 17);
  auto u = oracle::harmonic_polynomials(g);
  u[4] = u[3];
  const RatioBundle rb = build_ratios(u, 1e-3);
  const FrameData fr = build_frame(rb);
  CHECK_THROWS_AS(build_M(rb, fr), MDependent);
}

TEST_CASE("unit Frobenius conversion") {
  const Grid g = Grid::unit(2, 33);
  const auto u = synthesize(near_identity_coefficients(g), harmonic_family(g).traces);
  const Pipeline p = run(u);
  const ClassRepresentative f = to_unit_frobenius(p.rep);
  CHECK(f.convention == GaugeConvention::UnitFrobenius);
  double e = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) e = std::max(e, (f.a.at(k) - p.mb.M0.at(k)).norm());
  CHECK(e <= 1e-12);
}
