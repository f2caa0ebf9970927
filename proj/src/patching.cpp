#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "gaugerec/calculus.hpp"
#include "gaugerec/recon.hpp"

namespace gaugerec {

namespace {

double ramp(int d, int overlap) {
  if (d >= overlap) return 1.0;
  const double s = std::sin(0.5 * std::numbers::pi * (d + 1.0) / (overlap + 1.0));
  return s * s;
}

// Partition-of-unity weight of a node inside a patch; no ramp on faces lying on the grid boundary.
double patch_weight(const Grid& g, const IndexBox& box, const Index3& idx, int overlap) {
  double w = 1.0;
  for (int a = 0; a < g.dim(); ++a) {
    int d = std::numeric_limits<int>::max();
    if (box.lo[a] > 0) d = idx[a] - box.lo[a];
    if (box.hi[a] < g.shape()[a]) d = std::min(d, box.hi[a] - 1 - idx[a]);
    w *= ramp(d, overlap);
  }
  return w;
}

std::size_t local_node(const Grid& sub, const IndexBox& box, const Index3& idx) {
  Index3 l{0, 0, 0};
  for (int a = 0; a < sub.dim(); ++a) l[a] = idx[a] - box.lo[a];
  return sub.node(l);
}

// Re sum over the overlap of Tr(a_p conj(a_q)).
double overlap_correlation(const Grid& g, const PatchResult& p, const PatchResult& q) {
  IndexBox ov;
  for (int a = 0; a < 3; ++a) {
    ov.lo[a] = std::max(p.box.lo[a], q.box.lo[a]);
    ov.hi[a] = std::min(p.box.hi[a], q.box.hi[a]);
    if (a < g.dim() && ov.lo[a] >= ov.hi[a]) return 0.0;
  }
  double corr = 0.0;
  for (std::size_t k : box_nodes(g, ov)) {
    const Index3 idx = g.index(k);
    const SmallMat ap = p.rep.a.at(local_node(p.rep.grid(), p.box, idx));
    const SmallMat aq = q.rep.a.at(local_node(q.rep.grid(), q.box, idx));
    corr += ap.cwiseProduct(aq.conjugate()).sum().real();
  }
  return corr;
}

bool boxes_overlap(const IndexBox& p, const IndexBox& q, int dim) {
  for (int a = 0; a < dim; ++a)
    if (std::max(p.lo[a], q.lo[a]) >= std::min(p.hi[a], q.hi[a])) return false;
  return true;
}

// Lexicographic n-subsets of `pool`.
void subsets(const std::vector<int>& pool, int n, std::vector<std::vector<int>>& out) {
  std::vector<int> cur;
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (static_cast<int>(cur.size()) == n) {
      out.push_back(cur);
      return;
    }
    for (std::size_t i = start; i < pool.size(); ++i) {
      cur.push_back(pool[i]);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
}

double min_of(const std::vector<double>& v) {
  double m = std::numeric_limits<double>::infinity();
  for (double x : v) m = std::min(m, x);
  return m;
}

struct Candidate {
  int u1 = -1;
  RatioBundle rb;
  FrameData fr;
  std::vector<int> extra;
  std::vector<SymTensorField> M;
  std::vector<VectorField> Theta;
  std::vector<double> indep;
  double score = -1.0;
};

// Greedy selection on one patch. Returns false (with a reason) when no candidate is admissible.
bool select_patch(const std::vector<ScalarField>& sub, const std::vector<double>& maxabs, const ReconOptions& opts,
                  Candidate& best, std::string& reason) {
  const Grid& g = sub.front().grid();
  const int n = g.dim();
  const int I = static_cast<int>(sub.size());
  reason.clear();
  for (int c = 0; c < I; ++c) {
    if (!(maxabs[c] > 0.0)) continue;
    const double floor = opts.u1_floor * maxabs[c];
    double umin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < g.size(); ++k) umin = std::min(umin, std::abs(sub[c][k]));
    if (!(umin >= floor) || umin == 0.0) {
      if (reason.empty()) reason = "u1 below floor";
      continue;
    }
    Candidate cand;
    cand.u1 = c;
    cand.rb = build_ratios(sub, 0.0, static_cast<std::size_t>(c));

    std::vector<int> pool(I - 1);
    for (int r = 0; r < I - 1; ++r) pool[r] = r;
    std::vector<std::vector<int>> frames;
    subsets(pool, n, frames);
    double fbest = -1.0;
    for (const auto& f : frames) {
      FrameData fr = evaluate_frame(cand.rb, f);
      const double s = 1.0 / fr.max_cond();
      if (s > fbest) fbest = s, cand.fr = std::move(fr);
    }
    if (!(cand.fr.max_cond() <= opts.cond_max)) {
      reason = "frame degenerate (cond " + std::to_string(cand.fr.max_cond()) + ")";
      continue;
    }

    std::vector<int> rest;
    for (int r : pool)
      if (std::find(cand.fr.indices.begin(), cand.fr.indices.end(), r) == cand.fr.indices.end()) rest.push_back(r);
    if (static_cast<int>(rest.size()) < m_count(n)) continue;
    std::vector<SymTensorField> allM(I - 1);
    std::vector<VectorField> allTheta(I - 1);
    for (int r : rest) allM[r] = build_single_M(cand.rb, cand.fr, r, &allTheta[r]);
    std::vector<std::vector<int>> msets;
    subsets(rest, m_count(n), msets);
    double ibest = -1.0;
    for (const auto& ms : msets) {
      std::vector<const SymTensorField*> ptrs;
      for (int r : ms) ptrs.push_back(&allM[r]);
      std::vector<double> ind = independence(ptrs);
      const double s = min_of(ind);
      if (s > ibest) ibest = s, cand.extra = ms, cand.indep = std::move(ind);
    }
    if (!(ibest >= opts.indep_min)) {
      reason = "M matrices dependent (indep " + std::to_string(ibest) + ")";
      continue;
    }
    for (int r : cand.extra) cand.M.push_back(std::move(allM[r])), cand.Theta.push_back(std::move(allTheta[r]));

    double score = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < g.size(); ++k)
      score = std::min(score, std::abs(sub[c][k]) / maxabs[c] / cand.fr.cond[k] * cand.indep[k]);
    cand.score = score;
    if (score > best.score) best = std::move(cand);
  }
  return best.u1 >= 0;
}

}  // namespace

std::vector<IndexBox> make_patches(const Grid& g, const Index3& shape, int overlap) {
  std::array<std::vector<std::pair<int, int>>, 3> ranges;
  for (int a = 0; a < 3; ++a) {
    if (a >= g.dim()) {
      ranges[a] = {{0, 1}};
      continue;
    }
    const int N = g.shape()[a];
    const int P = (shape[a] <= 0 || shape[a] >= N) ? N : shape[a];
    if (P < 5) throw std::invalid_argument("patches need at least 5 nodes per axis");
    if (P < N && (overlap < 1 || overlap >= P)) throw std::invalid_argument("overlap must lie in [1, patch size)");
    for (int s = 0;;) {
      ranges[a].push_back({s, s + P});
      if (s + P >= N) break;
      s = std::min(s + P - overlap, N - P);
    }
  }
  std::vector<IndexBox> out;
  for (auto r0 : ranges[0])
    for (auto r1 : ranges[1])
      for (auto r2 : ranges[2]) out.push_back({{r0.first, r1.first, r2.first}, {r0.second, r1.second, r2.second}});
  return out;
}

ClassRepresentative stitch(const Grid& g, std::vector<PatchResult> patches, int overlap, std::vector<int>* signs) {
  if (patches.empty()) throw std::invalid_argument("nothing to stitch");
  const int n = g.dim();
  const std::size_t P = patches.size();
  for (const auto& p : patches)
    if (p.rep.convention != patches.front().rep.convention)
      throw std::invalid_argument("patches use different gauge conventions");

  // sign alignment by breadth-first traversal of the overlap graph
  std::vector<int> sign(P, 0);
  for (std::size_t s = 0; s < P; ++s) {
    if (sign[s] != 0) continue;
    sign[s] = 1;
    std::deque<std::size_t> queue{s};
    while (!queue.empty()) {
      const std::size_t p = queue.front();
      queue.pop_front();
      for (std::size_t q = 0; q < P; ++q) {
        if (sign[q] != 0 || !boxes_overlap(patches[p].box, patches[q].box, n)) continue;
        const double corr = sign[p] * overlap_correlation(g, patches[p], patches[q]);
        sign[q] = corr < 0.0 ? -1 : 1;
        queue.push_back(q);
      }
    }
  }
  for (std::size_t p = 0; p < P; ++p)
    if (sign[p] < 0) scale_representative(patches[p].rep, -1.0);
  if (signs) *signs = sign;

  ClassRepresentative out;
  out.convention = patches.front().rep.convention;
  out.a = SymTensorField(g);
  out.b_plus_diva = VectorField(g);
  out.c = ScalarField(g);
  out.alpha = SymTensorField(g);
  out.beta = VectorField(g);
  out.u1 = ScalarField(g);
  out.diagnostics.cond.assign(g.size(), 0.0);
  out.diagnostics.indep.assign(g.size(), std::numeric_limits<double>::infinity());
  out.diagnostics.residual.assign(g.size(), 0.0);
  std::vector<double> wsum(g.size(), 0.0);

  auto accumulate = [](Field& dst, const Field& src, std::size_t kd, std::size_t ks, double w) {
    for (int c = 0; c < dst.components(); ++c) dst.component(kd, c) += w * src.component(ks, c);
  };
  for (const auto& p : patches) {
    const std::vector<std::size_t> nodes = box_nodes(g, p.box);
    for (std::size_t l = 0; l < nodes.size(); ++l) {
      const std::size_t k = nodes[l];
      const double w = patch_weight(g, p.box, g.index(k), overlap);
      accumulate(out.a, p.rep.a, k, l, w);
      accumulate(out.b_plus_diva, p.rep.b_plus_diva, k, l, w);
      accumulate(out.c, p.rep.c, k, l, w);
      accumulate(out.alpha, p.rep.alpha, k, l, w);
      accumulate(out.beta, p.rep.beta, k, l, w);
      accumulate(out.u1, p.rep.u1, k, l, w);
      wsum[k] += w;
      out.diagnostics.cond[k] = std::max(out.diagnostics.cond[k], p.rep.diagnostics.cond[l]);
      out.diagnostics.indep[k] = std::min(out.diagnostics.indep[k], p.rep.diagnostics.indep[l]);
      out.diagnostics.residual[k] = std::max(out.diagnostics.residual[k], p.rep.diagnostics.residual[l]);
    }
  }
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (wsum[k] > 0.0) {
      const double inv = 1.0 / wsum[k];
      for (Field* f : std::initializer_list<Field*>{&out.a, &out.b_plus_diva, &out.c, &out.alpha, &out.beta, &out.u1})
        for (int c = 0; c < f->components(); ++c) f->component(k, c) *= inv;
    } else {
      out.diagnostics.cond[k] = std::numeric_limits<double>::infinity();
      out.diagnostics.indep[k] = 0.0;
    }
  }
  if (patches.front().rep.b) attach_b(out);
  return out;
}

json PatchMap::to_json() const {
  json ps = json::array();
  for (const auto& p : patches) {
    ps.push_back({{"lo", p.box.lo},
                  {"hi", p.box.hi},
                  {"admissible", p.admissible},
                  {"u1", p.u1},
                  {"frame", p.frame},
                  {"extra", p.extra},
                  {"score", p.score},
                  {"sign", p.sign},
                  {"reason", p.reason}});
  }
  return {{"convention", std::string(gaugerec::to_string(convention))},
          {"patches", ps},
          {"uncovered", uncovered},
          {"complete", complete()}};
}

GlobalReconstruction reconstruct_global(const std::vector<ScalarField>& u_in, const ReconOptions& opts) {
  if (u_in.empty()) throw std::invalid_argument("no data fields");
  const Grid& g = u_in.front().grid();
  const int n = g.dim();
  if (static_cast<int>(u_in.size()) < required_fields(n))
    throw std::invalid_argument("need at least " + std::to_string(required_fields(n)) + " data fields");
  std::vector<ScalarField> u;
  for (const auto& f : u_in) {
    if (f.grid() != g) throw std::invalid_argument("data fields live on different grids");
    u.push_back(opts.mollifier_width > 0.0 ? mollify(f, opts.mollifier_width) : f);
  }
  std::vector<double> maxabs;
  for (const auto& f : u) maxabs.push_back(f.max_abs());

  GlobalReconstruction result;
  std::vector<PatchResult> good;
  std::vector<std::size_t> good_index;
  ReconOptions local = opts;
  local.compute_b = false;
  for (const IndexBox& box : make_patches(g, opts.patch_shape, opts.overlap)) {
    PatchInfo info;
    info.box = box;
    std::vector<ScalarField> sub;
    for (const auto& f : u) sub.push_back(restrict_to(f, box));
    Candidate best;
    if (select_patch(sub, maxabs, opts, best, info.reason)) {
      auto data_index = [&](int r) { return r < best.u1 ? r : r + 1; };
      info.admissible = true;
      info.reason.clear();
      info.u1 = best.u1;
      for (int r : best.fr.indices) info.frame.push_back(data_index(r));
      for (int r : best.extra) info.extra.push_back(data_index(r));
      info.score = best.score;
      MBundle mb;
      mb.indices = best.extra;
      mb.M = std::move(best.M);
      mb.Theta = std::move(best.Theta);
      mb.indep = std::move(best.indep);
      std::vector<const SymTensorField*> ptrs;
      for (const auto& m : mb.M) ptrs.push_back(&m);
      mb.M0 = solve_M0(ptrs, opts.pairing);
      good.push_back({box, reconstruct_class(mb, best.rb, best.fr, local)});
      good_index.push_back(result.map.patches.size());
    }
    result.map.patches.push_back(std::move(info));
  }

  bool same_u1 = true;
  for (std::size_t i = 1; i < good_index.size(); ++i)
    same_u1 = same_u1 && result.map.patches[good_index[i]].u1 == result.map.patches[good_index[0]].u1;
  result.map.convention = same_u1 ? GaugeConvention::U1Normalized : GaugeConvention::UnitFrobenius;
  if (!same_u1)
    for (auto& p : good) p.rep = to_unit_frobenius(p.rep, false);

  std::vector<char> covered(g.size(), 0);
  for (const auto& p : good)
    for (std::size_t k : box_nodes(g, p.box)) covered[k] = 1;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (!covered[k]) result.map.uncovered.push_back(k);

  if (good.empty()) {
    ClassRepresentative& r = result.rep;
    r.convention = result.map.convention;
    r.a = SymTensorField(g);
    r.b_plus_diva = VectorField(g);
    r.c = ScalarField(g);
    r.alpha = SymTensorField(g);
    r.beta = VectorField(g);
    r.u1 = ScalarField(g);
    r.diagnostics.cond.assign(g.size(), std::numeric_limits<double>::infinity());
    r.diagnostics.indep.assign(g.size(), 0.0);
    r.diagnostics.residual.assign(g.size(), 0.0);
  } else {
    std::vector<int> signs;
    result.rep = stitch(g, std::move(good), opts.overlap, &signs);
    for (std::size_t i = 0; i < good_index.size(); ++i) result.map.patches[good_index[i]].sign = signs[i];
    if (opts.compute_b) attach_b(result.rep);
  }
  if (!result.map.complete()) {
    auto partial = std::make_shared<GlobalReconstruction>(std::move(result));
    throw CoverageFailure(partial->map.uncovered, partial);
  }
  return result;
}

}  // namespace gaugerec
