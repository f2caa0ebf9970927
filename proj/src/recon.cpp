#include "gaugerec/recon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "gaugerec/calculus.hpp"

namespace gaugerec {

std::string_view to_string(GaugeConvention c) {
  return c == GaugeConvention::U1Normalized ? "u1_normalized" : "unit_frobenius";
}

namespace {

cplx bilinear(const SmallMat& a, const SmallMat& b) { return a.cwiseProduct(b).sum(); }
cplx dot(const SmallVec& x, const SmallVec& y) { return (x.transpose() * y)(0, 0); }

}  // namespace

RatioBundle build_ratios(const std::vector<ScalarField>& u, double floor, std::size_t u1_index) {
  if (u.empty() || u1_index >= u.size()) throw std::invalid_argument("u1 index out of range");
  const ScalarField& u1 = u[u1_index];
  const Grid& g = u1.grid();
  std::vector<std::size_t> bad;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (!(std::abs(u1[k]) >= floor) || std::abs(u1[k]) == 0.0) bad.push_back(k);
  if (!bad.empty()) throw VanishingU1(std::move(bad));

  RatioBundle rb;
  rb.u1 = u1;
  rb.grad_u1 = gradient(u1);
  rb.hess_u1 = hessian(u1);
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (j == u1_index) continue;
    if (u[j].grid() != g) throw std::invalid_argument("data fields live on different grids");
    ScalarField v(g);
    for (std::size_t k = 0; k < g.size(); ++k) v[k] = u[j][k] / u1[k];
    rb.grad_v.push_back(gradient(v));
    rb.hess_v.push_back(hessian(v));
    rb.v.push_back(std::move(v));
  }
  return rb;
}

RatioBundle ratios_from_quotients(std::vector<ScalarField> v) {
  if (v.empty()) throw std::invalid_argument("no ratio fields");
  const Grid& g = v.front().grid();
  RatioBundle rb;
  rb.u1 = ScalarField(g, 1.0);
  rb.grad_u1 = VectorField(g);
  rb.hess_u1 = SymTensorField(g);
  for (auto& f : v) {
    if (f.grid() != g) throw std::invalid_argument("ratio fields live on different grids");
    rb.grad_v.push_back(gradient(f));
    rb.hess_v.push_back(hessian(f));
    rb.v.push_back(std::move(f));
  }
  return rb;
}

double FrameData::max_cond() const {
  double m = 0.0;
  for (double c : cond) m = std::max(m, c);
  return m;
}

FrameData evaluate_frame(const RatioBundle& rb, std::vector<int> indices) {
  const Grid& g = rb.grid();
  const int n = g.dim();
  if (indices.empty())
    for (int i = 0; i < n; ++i) indices.push_back(i);
  if (static_cast<int>(indices.size()) != n) throw std::invalid_argument("a frame needs exactly n ratios");
  for (int i : indices)
    if (i < 0 || i >= static_cast<int>(rb.size())) throw std::invalid_argument("frame index out of range");

  FrameData fr;
  fr.indices = indices;
  fr.H.resize(g.size());
  fr.Hinv.resize(g.size());
  fr.cond.resize(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    SmallMat H(n, n);
    std::array<SmallVec, 3> grads;
    for (int i = 0; i < n; ++i) grads[i] = rb.grad_v[indices[i]].at(k);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) H(i, j) = H(j, i) = dot(grads[i], grads[j]);
    Eigen::JacobiSVD<SmallMat> svd(H);
    const auto& s = svd.singularValues();
    const double smin = s(n - 1), smax = s(0);
    fr.cond[k] = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    fr.H[k] = H;
    fr.Hinv[k] = smin > 0.0 ? SmallMat(H.inverse()) : SmallMat(SmallMat::Zero(n, n));
  }
  return fr;
}

FrameData build_frame(const RatioBundle& rb, double cond_max, std::vector<int> indices) {
  FrameData fr = evaluate_frame(rb, std::move(indices));
  std::vector<std::size_t> bad;
  for (std::size_t k = 0; k < fr.cond.size(); ++k)
    if (!(fr.cond[k] <= cond_max)) bad.push_back(k);
  if (!bad.empty()) throw FrameDegenerate(std::move(bad));
  return fr;
}

SymTensorField build_single_M(const RatioBundle& rb, const FrameData& fr, int index, VectorField* theta) {
  const Grid& g = rb.grid();
  const int n = g.dim();
  SymTensorField M(g);
  if (theta) *theta = VectorField(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const SmallVec gm = rb.grad_v[index].at(k);
    SmallVec proj(n);
    for (int j = 0; j < n; ++j) proj(j) = dot(gm, rb.grad_v[fr.indices[j]].at(k));
    const SmallVec Th = -(fr.Hinv[k] * proj);
    SmallMat m = rb.hess_v[index].at(k);
    for (int j = 0; j < n; ++j) m += Th(j) * rb.hess_v[fr.indices[j]].at(k);
    M.set(k, m);
    if (theta) theta->set(k, Th);
  }
  return M;
}

std::vector<double> independence(const std::vector<const SymTensorField*>& M) {
  if (M.empty()) throw std::invalid_argument("no M matrices");
  const Grid& g = M.front()->grid();
  const int n = g.dim();
  const int cols = static_cast<int>(M.size()) + 1;
  std::vector<double> out(g.size());
  Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, 9, 6> V(n * n, cols);
  for (std::size_t k = 0; k < g.size(); ++k) {
    for (int c = 0; c < cols; ++c) {
      const SmallMat m = c == 0 ? SmallMat(SmallMat::Identity(n, n)) : M[c - 1]->at(k);
      const double norm = m.norm();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) V(i * n + j, c) = norm > 0.0 ? m(i, j) / norm : cplx(0.0);
    }
    Eigen::JacobiSVD<decltype(V)> svd(V);
    out[k] = svd.singularValues()(cols - 1);
  }
  return out;
}

SymTensorField solve_M0(const std::vector<const SymTensorField*>& M, Pairing pairing) {
  if (M.empty()) throw std::invalid_argument("no M matrices");
  const Grid& g = M.front()->grid();
  const int n = g.dim();
  const int s = sym_size(n);
  if (static_cast<int>(M.size()) != s - 1) throw std::invalid_argument("need n(n+1)/2 - 1 M matrices");
  SymTensorField M0(g);
  Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, 6, 6> A(s, s);
  Eigen::Matrix<cplx, Eigen::Dynamic, 1, 0, 6, 1> rhs = Eigen::Matrix<cplx, Eigen::Dynamic, 1, 0, 6, 1>::Zero(s);
  rhs(s - 1) = 1.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    for (int m = 0; m < s - 1; ++m) {
      const SmallMat Mm = M[m]->at(k);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          const cplx e = pairing == Pairing::Bilinear ? Mm(i, j) : std::conj(Mm(i, j));
          A(m, sym_index(n, i, j)) = (i == j ? 1.0 : 2.0) * e;
        }
    }
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) A(s - 1, sym_index(n, i, j)) = i == j ? 1.0 : 0.0;
    const auto x = A.fullPivLu().solve(rhs).eval();
    SmallMat X(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) X(i, j) = X(j, i) = x(sym_index(n, i, j));
    // Tr(X)=1 with the principal root gives Re Tr(M0) > 0.
    const cplx norm = pairing == Pairing::Bilinear ? std::sqrt(bilinear(X, X)) : cplx(X.norm());
    M0.set(k, X / norm);
  }
  return M0;
}

std::vector<cplx> MBundle::theta(std::size_t m, std::size_t node, const FrameData& fr, std::size_t nratios) const {
  std::vector<cplx> out(nratios, 0.0);
  for (std::size_t j = 0; j < fr.indices.size(); ++j) out[fr.indices[j]] = Theta[m](node, static_cast<int>(j));
  out[indices[m]] = 1.0;
  return out;
}

MBundle build_M(const RatioBundle& rb, const FrameData& fr, const ReconOptions& opts, std::vector<int> indices) {
  const int n = rb.grid().dim();
  if (indices.empty())
    for (int r = 0; r < static_cast<int>(rb.size()); ++r)
      if (std::find(fr.indices.begin(), fr.indices.end(), r) == fr.indices.end()) indices.push_back(r);
  if (static_cast<int>(indices.size()) != m_count(n))
    throw std::invalid_argument("need exactly n(n+1)/2 - 1 M-generating ratios, got " +
                                std::to_string(indices.size()));
  MBundle mb;
  mb.indices = indices;
  for (int r : indices) {
    VectorField th;
    mb.M.push_back(build_single_M(rb, fr, r, &th));
    mb.Theta.push_back(std::move(th));
  }
  std::vector<const SymTensorField*> ptrs;
  for (const auto& m : mb.M) ptrs.push_back(&m);
  mb.indep = independence(ptrs);
  std::vector<std::size_t> bad;
  for (std::size_t k = 0; k < mb.indep.size(); ++k)
    if (!(mb.indep[k] >= opts.indep_min)) bad.push_back(k);
  if (!bad.empty()) throw MDependent(std::move(bad));
  mb.M0 = solve_M0(ptrs, opts.pairing);
  return mb;
}

ClassRepresentative reconstruct_class(const MBundle& mb, const RatioBundle& rb, const FrameData& fr,
                                      const ReconOptions& opts) {
  const Grid& g = rb.grid();
  const int n = g.dim();
  ClassRepresentative rep;
  rep.a = SymTensorField(g);
  rep.b_plus_diva = VectorField(g);
  rep.c = ScalarField(g);
  rep.alpha = mb.M0;
  rep.beta = VectorField(g);
  rep.u1 = rb.u1;
  rep.convention = GaugeConvention::U1Normalized;
  rep.diagnostics.cond = fr.cond;
  rep.diagnostics.indep = mb.indep;
  rep.diagnostics.residual.assign(g.size(), 0.0);

  std::vector<int> used = fr.indices;
  used.insert(used.end(), mb.indices.begin(), mb.indices.end());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const SmallMat alpha = mb.M0.at(k);
    SmallVec proj(n);
    for (int j = 0; j < n; ++j) proj(j) = bilinear(alpha, rb.hess_v[fr.indices[j]].at(k));
    const SmallVec w = fr.Hinv[k] * proj;
    SmallVec beta = SmallVec::Zero(n);
    for (int i = 0; i < n; ++i) beta -= w(i) * rb.grad_v[fr.indices[i]].at(k);

    const cplx u1 = rb.u1[k];
    const cplx u1sq = u1 * u1;
    const SmallVec du1 = rb.grad_u1.at(k);
    const SmallMat a = alpha / u1sq;
    const SmallVec B = (beta - a * (2.0 * u1 * du1)) / u1sq;
    const cplx c = -(dot(B, du1) + bilinear(a, rb.hess_u1.at(k))) / u1;

    rep.beta.set(k, beta);
    rep.a.set(k, a);
    rep.b_plus_diva.set(k, B);
    rep.c[k] = c;
    double res = 0.0;
    for (int r : used)
      res = std::max(res, std::abs(bilinear(alpha, rb.hess_v[r].at(k)) + dot(beta, rb.grad_v[r].at(k))));
    rep.diagnostics.residual[k] = res;
  }
  if (opts.compute_b) attach_b(rep);
  return rep;
}

void attach_b(ClassRepresentative& rep) {
  const VectorField div = divergence_tensor(rep.a);
  VectorField b(rep.grid());
  for (std::size_t i = 0; i < b.data().size(); ++i) b.data()[i] = rep.b_plus_diva.data()[i] - div.data()[i];
  rep.b = std::move(b);
}

ClassRepresentative to_unit_frobenius(const ClassRepresentative& rep, bool compute_b) {
  if (rep.convention == GaugeConvention::UnitFrobenius) return rep;
  ClassRepresentative out = rep;
  const Grid& g = rep.grid();
  for (std::size_t k = 0; k < g.size(); ++k) {
    const cplx s = rep.u1[k] * rep.u1[k];
    out.a.set(k, s * rep.a.at(k));
    out.b_plus_diva.set(k, s * rep.b_plus_diva.at(k));
    out.c[k] = s * rep.c[k];
  }
  out.convention = GaugeConvention::UnitFrobenius;
  out.b.reset();
  if (compute_b) attach_b(out);
  return out;
}

void scale_representative(ClassRepresentative& rep, cplx s) {
  for (auto& z : rep.a.data()) z *= s;
  for (auto& z : rep.b_plus_diva.data()) z *= s;
  for (auto& z : rep.c.data()) z *= s;
  for (auto& z : rep.alpha.data()) z *= s;
  for (auto& z : rep.beta.data()) z *= s;
  if (rep.b)
    for (auto& z : rep.b->data()) z *= s;
}

ClassRepresentative canonical_truth(const CoefficientSet& truth, GaugeConvention convention, const ScalarField* u1) {
  const Grid& g = truth.grid();
  if (convention == GaugeConvention::U1Normalized && !u1)
    throw std::invalid_argument("u1-normalized truth needs u1");
  ScalarField tau(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const cplx s = u1 ? (*u1)[k] * (*u1)[k] : cplx(1.0);
    const SmallMat sa = s * truth.a.at(k);
    cplx t = 1.0 / std::sqrt(bilinear(sa, sa));
    if ((t * sa.trace()).real() < 0.0) t = -t;
    tau[k] = t;
  }
  const VectorField dtau = gradient(tau);
  ClassRepresentative rep;
  rep.convention = convention;
  rep.a = SymTensorField(g);
  rep.b_plus_diva = VectorField(g);
  rep.c = ScalarField(g);
  rep.b = VectorField(g);
  rep.u1 = u1 ? *u1 : ScalarField(g, 1.0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const SmallMat a = truth.a.at(k);
    rep.a.set(k, tau[k] * a);
    rep.b_plus_diva.set(k, tau[k] * (truth.b.at(k) + truth.diva.at(k)));
    rep.c[k] = tau[k] * truth.c[k];
    rep.b->set(k, tau[k] * truth.b.at(k) - a * dtau.at(k));
  }
  return rep;
}

json ClassError::to_json() const {
  return {{"a", a},        {"b_plus_diva", b_plus_diva}, {"c", c},
          {"b", b},        {"scale", scale},             {"relative", relative()},
          {"relative_b", relative_b()}};
}

ClassError compare(const ClassRepresentative& rep, const ClassRepresentative& truth,
                   const std::vector<std::size_t>& nodes) {
  const Grid& g = rep.grid();
  if (truth.grid() != g) throw std::invalid_argument("representatives live on different grids");
  std::vector<std::size_t> all;
  const std::vector<std::size_t>* sel = &nodes;
  if (nodes.empty()) {
    all.resize(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) all[k] = k;
    sel = &all;
  }
  ClassError e;
  auto upd = [](double& m, double v) { m = std::max(m, v); };
  for (std::size_t k : *sel) {
    upd(e.a, (rep.a.at(k) - truth.a.at(k)).cwiseAbs().maxCoeff());
    upd(e.b_plus_diva, (rep.b_plus_diva.at(k) - truth.b_plus_diva.at(k)).cwiseAbs().maxCoeff());
    upd(e.c, std::abs(rep.c[k] - truth.c[k]));
    if (rep.b && truth.b) upd(e.b, (rep.b->at(k) - truth.b->at(k)).cwiseAbs().maxCoeff());
    upd(e.scale, truth.a.at(k).cwiseAbs().maxCoeff());
    upd(e.scale, truth.b_plus_diva.at(k).cwiseAbs().maxCoeff());
    upd(e.scale, std::abs(truth.c[k]));
  }
  return e;
}

}  // namespace gaugerec
