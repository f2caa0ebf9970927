#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "analytic.hpp"
#include "gaugerec/illum.hpp"
#include "gaugerec/presets.hpp"
#include "gaugerec/recon.hpp"

using namespace gaugerec;

namespace {

// Harmonic data on the unit square whose first field vanishes on the line x1 = 1/2.
// With z = (x2 + 1/2) + i (x1 - 1/2), the fields Im z^k all have gradients along e1 on that
// line, so only Re z and Re z^2 can restore a frame there.
std::vector<ScalarField> strip_data(const Grid& g, bool extras) {
  auto z = [](const Point& x) { return cplx(x[1] + 0.5, x[0] - 0.5); };
  std::vector<ScalarField> u;
  u.push_back(ScalarField::sample(g, [&](const Point& x) { return z(x).imag(); }));
  u.push_back(ScalarField(g, 1.0));
  for (int k = 2; k <= 4; ++k)
    u.push_back(ScalarField::sample(g, [&](const Point& x) { return std::pow(z(x), k).imag(); }));
  if (extras) {
    u.push_back(ScalarField::sample(g, [&](const Point& x) { return z(x).real(); }));
    u.push_back(ScalarField::sample(g, [&](const Point& x) { return (z(x) * z(x)).real(); }));
  }
  return u;
}

ReconOptions patched(int size, int overlap) {
  ReconOptions o;
  o.patch_shape = {size, size, size};
  o.overlap = overlap;
  return o;
}

}  // namespace

TEST_CASE("patches tile the grid with the requested overlap") {
  const Grid g = Grid::unit(2, 65);
  const auto boxes = make_patches(g, {17, 17, 0}, 4);
  std::vector<int> cover(g.size(), 0);
  for (const auto& b : boxes) {
    for (int a = 0; a < 2; ++a) CHECK(b.hi[a] - b.lo[a] == 17);
    for (std::size_t k : box_nodes(g, b)) ++cover[k];
  }
  CHECK(*std::min_element(cover.begin(), cover.end()) >= 1);
  CHECK(boxes.size() == 25);
  CHECK(make_patches(g, {0, 0, 0}, 4).size() == 1);
  CHECK_THROWS_AS(make_patches(g, {4, 4, 0}, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_patches(g, {17, 17, 0}, 17), std::invalid_argument);

  const Grid g3 = Grid::unit(3, 21);
  const auto b3 = make_patches(g3, {11, 11, 11}, 3);
  CHECK(b3.size() == 27);
}

TEST_CASE("a single whole-grid patch matches the class reconstruction") {
  const Grid g = Grid::unit(2, 33);
  const auto u = synthesize(near_identity_coefficients(g), harmonic_family(g).traces);
  const GlobalReconstruction gr = reconstruct_global(u);
  REQUIRE(gr.map.complete());
  REQUIRE(gr.map.patches.size() == 1);
  CHECK(gr.map.patches[0].u1 == 0);

  const RatioBundle rb = build_ratios(u, 0.0);
  // data index d maps to ratio index d - 1 since u1 is field 0
  std::vector<int> frame, extra;
  for (int d : gr.map.patches[0].frame) frame.push_back(d - 1);
  const FrameData fr = build_frame(rb, 1e6, frame);
  for (int d : gr.map.patches[0].extra) extra.push_back(d - 1);
  const MBundle mb = build_M(rb, fr, {}, extra);
  const ClassRepresentative rep = reconstruct_class(mb, rb, fr);
  const ClassError e = compare(gr.rep, rep);
  CHECK(e.a == 0.0);
  CHECK(e.b_plus_diva == 0.0);
  CHECK(e.c == 0.0);
  CHECK(e.b == 0.0);
}

TEST_CASE("patched reconstruction agrees with the single-patch one away from patch edges") {
  const Grid g = Grid::unit(2, 65);
  const CoefficientSet C = near_identity_coefficients(g);
  const auto u = synthesize(C, harmonic_family(g).traces);
  const GlobalReconstruction whole = reconstruct_global(u);
  const GlobalReconstruction parts = reconstruct_global(u, patched(21, 6));
  REQUIRE(parts.map.complete());
  CHECK(parts.map.patches.size() > 1);
  const auto nodes = g.nodes_with_margin(1.0 / 16);
  const ClassRepresentative truth = canonical_truth(C, parts.rep.convention, &parts.rep.u1);
  const ClassError e = compare(parts.rep, truth, nodes);
  const ClassError w = compare(whole.rep, canonical_truth(C, whole.rep.convention, &whole.rep.u1), nodes);
  MESSAGE("patched " << e.relative() << " whole " << w.relative());
  CHECK(e.relative() <= 1e-3);
}

TEST_CASE("stitching undoes an injected sign flip") {
  const Grid g = Grid::unit(2, 41);
  const auto u = synthesize(near_identity_coefficients(g), harmonic_family(g).traces);
  const auto boxes = make_patches(g, {25, 41, 0}, 9);
  REQUIRE(boxes.size() == 2);
  std::vector<PatchResult> patches;
  for (const auto& box : boxes) {
    std::vector<ScalarField> sub;
    for (const auto& f : u) sub.push_back(restrict_to(f, box));
    const RatioBundle rb = build_ratios(sub, 0.0);
    const FrameData fr = build_frame(rb);
    patches.push_back({box, reconstruct_class(build_M(rb, fr), rb, fr)});
  }
  std::vector<int> s0, s1;
  const ClassRepresentative ref = stitch(g, patches, 9, &s0);
  CHECK(s0 == std::vector<int>{1, 1});
  scale_representative(patches[1].rep, -1.0);
  const ClassRepresentative fixed = stitch(g, patches, 9, &s1);
  CHECK(s1 == std::vector<int>{1, -1});
  const ClassError e = compare(fixed, ref);
  CHECK(e.a <= 1e-14);
  CHECK(e.c <= 1e-14);
  CHECK(e.b <= 1e-12);
}

TEST_CASE("reselection covers a strip where u1 vanishes") {
  const Grid g = Grid::unit(2, 65);
  const ReconOptions opts = patched(17, 4);
  const GlobalReconstruction gr = reconstruct_global(strip_data(g, true), opts);
  CHECK(gr.map.complete());
  // patches crossing the strip must draw on the redundant fields
  for (const auto& p : gr.map.patches) {
    if (!(p.box.lo[0] <= 32 && 32 < p.box.hi[0])) continue;
    std::vector<int> used = p.frame;
    used.insert(used.end(), p.extra.begin(), p.extra.end());
    used.push_back(p.u1);
    CHECK(std::any_of(used.begin(), used.end(), [](int d) { return d >= 5; }));
    CHECK(p.u1 != 0);
  }
  // the reconstruction is a multiple of the identity
  double off = 0.0;
  for (std::size_t k : g.interior_nodes()) {
    const SmallMat a = gr.rep.a.at(k);
    off = std::max(off, std::abs(a(0, 1)) / std::abs(a(0, 0)) + std::abs(a(1, 1) / a(0, 0) - 1.0));
  }
  CHECK(off <= 1e-6);
  CHECK(gr.rep.c.max_abs() <= 1e-6 * gr.rep.a.max_abs());

  bool failed = false;
  try {
    reconstruct_global(strip_data(g, false), opts);
  } catch (const CoverageFailure& e) {
    failed = true;
    std::set<std::size_t> unc(e.nodes().begin(), e.nodes().end());
    for (std::size_t k = 0; k < g.size(); ++k)
      if (std::abs(g.coord(k)[0] - 0.5) <= 1e-12) CHECK(unc.count(k) == 1);
    CHECK(!e.partial().map.complete());
    CHECK(e.partial().map.uncovered == e.nodes());
  }
  CHECK(failed);
}

TEST_CASE("patch map serializes") {
  const Grid g = Grid::unit(2, 33);
  const auto u = synthesize(near_identity_coefficients(g), harmonic_family(g).traces);
  const GlobalReconstruction gr = reconstruct_global(u, patched(17, 4));
  const json j = gr.map.to_json();
  CHECK(j["complete"] == true);
  CHECK(j["patches"].size() == gr.map.patches.size());
  CHECK(j["convention"] == "u1_normalized");
}
