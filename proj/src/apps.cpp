#include "gaugerec/apps.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/SparseLU>

#include "gaugerec/calculus.hpp"

namespace gaugerec {

namespace {

using SpMat = Eigen::SparseMatrix<cplx>;

// Coefficients of div(D grad .) at interior node k, as (node, weight) pairs.
void stencil(const SymTensorField& D, std::size_t k, std::vector<std::pair<std::size_t, cplx>>& out) {
  const Grid& g = D.grid();
  const int n = g.dim();
  out.clear();
  const SmallMat Dk = D.at(k);
  for (int a = 0; a < n; ++a) {
    const std::size_t s = g.stride(a);
    const double h2 = g.spacing(a) * g.spacing(a);
    const cplx fp = 0.5 * (Dk(a, a) + D(k + s, a, a)) / h2;
    const cplx fm = 0.5 * (Dk(a, a) + D(k - s, a, a)) / h2;
    out.push_back({k + s, fp});
    out.push_back({k - s, fm});
    out.push_back({k, -(fp + fm)});
    for (int b = 0; b < n; ++b) {
      if (b == a) continue;
      const std::size_t t = g.stride(b);
      const double w = 1.0 / (4.0 * g.spacing(a) * g.spacing(b));
      const cplx dp = D(k + s, a, b) * w, dm = D(k - s, a, b) * w;
      out.push_back({k + s + t, dp});
      out.push_back({k + s - t, -dp});
      out.push_back({k - s + t, -dm});
      out.push_back({k - s - t, dm});
    }
  }
}

void check_h1(const ScalarField& H1) {
  const double tol = 1e-12 * H1.max_abs();
  std::vector<std::size_t> bad;
  for (std::size_t k = 0; k < H1.size(); ++k)
    if (!(H1[k].real() > 0.0) || std::abs(H1[k].imag()) > tol) bad.push_back(k);
  if (!bad.empty()) throw NonPositiveH1(std::move(bad));
}

std::vector<std::size_t> evaluation_nodes(const Grid& g) {
  std::vector<std::size_t> nodes = g.nodes_with_margin(1.0 / 16);
  return nodes.empty() ? g.interior_nodes() : nodes;
}

json engine_report(const GlobalReconstruction& gr, const TauRecovery& tau) {
  double cond = 0.0, indep = 1e300;
  for (double c : gr.rep.diagnostics.cond) cond = std::max(cond, c);
  for (double v : gr.rep.diagnostics.indep) indep = std::min(indep, v);
  return {{"convention", std::string(to_string(gr.rep.convention))},
          {"patches", gr.map.patches.size()},
          {"complete", gr.map.complete()},
          {"cond_max", cond},
          {"indep_min", indep},
          {"curl_residual", tau.curl_residual},
          {"anchor_mismatch", tau.anchor_mismatch}};
}

}  // namespace

std::vector<SmallMat> boundary_tensor(const SymTensorField& f) {
  std::vector<SmallMat> out;
  for (std::size_t k : f.grid().boundary_nodes()) out.push_back(f.at(k));
  return out;
}

TauAnchor tensor_anchor(const SymTensorField& rep_a, const std::vector<SmallMat>& target) {
  TauAnchor a;
  a.nodes = rep_a.grid().boundary_nodes();
  if (target.size() != a.nodes.size()) throw std::invalid_argument("boundary tensor count does not match the grid");
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    const SmallMat r = rep_a.at(a.nodes[i]);
    a.values.push_back(r.conjugate().cwiseProduct(target[i]).sum() / r.squaredNorm());
  }
  return a;
}

ScalarField apply_divergence_form(const SymTensorField& D, const ScalarField& w) {
  const Grid& g = D.grid();
  ScalarField out(g);
  std::vector<std::pair<std::size_t, cplx>> st;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.is_boundary(k)) continue;
    stencil(D, k, st);
    cplx s = 0.0;
    for (const auto& [q, c] : st) s += c * w[q];
    out[k] = s;
  }
  return out;
}

ScalarField solve_divergence_form(const SymTensorField& D, const ScalarField& source, const BoundaryTrace& trace) {
  const Grid& g = D.grid();
  const auto bnodes = g.boundary_nodes();
  if (trace.values.size() != bnodes.size()) throw std::invalid_argument("trace does not match the grid");
  std::vector<Eigen::Triplet<cplx>> trip;
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(g.size()));
  std::vector<std::pair<std::size_t, cplx>> st;
  for (std::size_t i = 0; i < bnodes.size(); ++i) {
    trip.emplace_back(static_cast<int>(bnodes[i]), static_cast<int>(bnodes[i]), 1.0);
    rhs(static_cast<Eigen::Index>(bnodes[i])) = trace.values[i];
  }
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.is_boundary(k)) continue;
    stencil(D, k, st);
    // row equilibration by the diagonal keeps the solve invariant under scaling of D
    cplx diag = 0.0;
    for (const auto& [q, c] : st)
      if (q == k) diag += c;
    for (const auto& [q, c] : st) trip.emplace_back(static_cast<int>(k), static_cast<int>(q), -c / diag);
    rhs(static_cast<Eigen::Index>(k)) = source[k] / diag;
  }
  SpMat A(static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(g.size()));
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw SingularSystem("divergence-form system is singular");
  const Eigen::VectorXcd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) throw SingularSystem("divergence-form solve failed");
  ScalarField w(g);
  for (std::size_t k = 0; k < g.size(); ++k) w[k] = x(static_cast<Eigen::Index>(k));
  return w;
}

QpatResult qpat_reconstruct(const QpatData& d, const AppOptions& opts) {
  if (d.H.empty()) throw std::invalid_argument("no QPAT data");
  const ScalarField& H1 = d.H.front();
  const Grid& g = H1.grid();
  check_h1(H1);
  if (d.f1.values.size() != g.boundary_nodes().size()) throw std::invalid_argument("f1 does not match the grid");
  for (cplx f : d.f1.values)
    if (!(f.real() > 0.0)) throw std::invalid_argument("f1 must be positive on the boundary");

  // ratios H_j / H_1 = u_j / u_1 solve div(gamma u1^2 grad v) = 0
  std::vector<ScalarField> ratios{ScalarField(g, 1.0)};
  for (std::size_t j = 1; j < d.H.size(); ++j) {
    ScalarField v(g);
    for (std::size_t k = 0; k < g.size(); ++k) v[k] = d.H[j][k] / H1[k];
    ratios.push_back(std::move(v));
  }
  QpatResult r;
  r.engine = reconstruct_global(ratios, opts.recon);
  const ClassRepresentative& rep = r.engine.rep;

  std::vector<SmallMat> Db = d.gamma_boundary;
  for (std::size_t i = 0; i < Db.size(); ++i) Db[i] *= d.f1.values[i] * d.f1.values[i];
  r.tau = recover_tau_b_zero(rep, tensor_anchor(rep.a, Db), opts.transport);

  r.D = SymTensorField(g);
  for (std::size_t k = 0; k < g.size(); ++k) r.D.set(k, r.tau.tau[k] * rep.a.at(k));
  BoundaryTrace wb = d.f1;
  for (auto& v : wb.values) v = 1.0 / v;
  r.w = solve_divergence_form(r.D, H1, wb);
  r.gamma = SymTensorField(g);
  r.sigma = hadamard(H1, r.w);
  for (std::size_t k = 0; k < g.size(); ++k) r.gamma.set(k, r.D.at(k) * (r.w[k] * r.w[k]));

  r.report = engine_report(r.engine, r.tau);
  if (!d.sigma_boundary.empty()) {
    double mis = 0.0;
    const auto bn = g.boundary_nodes();
    for (std::size_t i = 0; i < bn.size(); ++i)
      mis = std::max(mis, std::abs(r.sigma[bn[i]] - d.sigma_boundary[i]) / std::abs(d.sigma_boundary[i]));
    r.report["sigma_boundary_mismatch"] = mis;
  }
  r.report["equation_residual"] = qpat_residual(d, r.gamma, r.sigma);
  return r;
}

ElastoResult elasto_reconstruct(const ElastoData& d, const AppOptions& opts) {
  if (!(d.omega > 0.0)) throw std::invalid_argument("omega must be positive");
  if (d.H.empty()) throw std::invalid_argument("no elastography data");
  const Grid& g = d.H.front().grid();
  ElastoResult r;
  r.engine = reconstruct_global(d.H, opts.recon);
  const ClassRepresentative& rep = r.engine.rep;
  r.tau = recover_tau_b_zero(rep, tensor_anchor(rep.a, d.gamma_boundary), opts.transport);
  r.gamma = SymTensorField(g);
  r.rho = ScalarField(g);
  const double w2 = d.omega * d.omega;
  for (std::size_t k = 0; k < g.size(); ++k) {
    r.gamma.set(k, r.tau.tau[k] * rep.a.at(k));
    r.rho[k] = r.tau.tau[k] * rep.c[k] / w2;
  }
  r.report = engine_report(r.engine, r.tau);
  r.report["omega"] = d.omega;
  r.report["equation_residual"] = elasto_residual(d, r.gamma, r.rho);
  return r;
}

double qpat_residual(const QpatData& d, const SymTensorField& gamma, const ScalarField& sigma) {
  const Grid& g = gamma.grid();
  double res = 0.0;
  for (const auto& H : d.H) {
    ScalarField u(g);
    for (std::size_t k = 0; k < g.size(); ++k) u[k] = H[k] / sigma[k];
    const ScalarField Lu = apply_divergence_form(gamma, u);
    for (std::size_t k : evaluation_nodes(g)) res = std::max(res, std::abs(Lu[k] - sigma[k] * u[k]));
  }
  return res;
}

double elasto_residual(const ElastoData& d, const SymTensorField& gamma, const ScalarField& rho) {
  const Grid& g = gamma.grid();
  const double w2 = d.omega * d.omega;
  double res = 0.0;
  for (const auto& u : d.H) {
    const ScalarField Lu = apply_divergence_form(gamma, u);
    for (std::size_t k : evaluation_nodes(g)) res = std::max(res, std::abs(Lu[k] + w2 * rho[k] * u[k]));
  }
  return res;
}

}  // namespace gaugerec
