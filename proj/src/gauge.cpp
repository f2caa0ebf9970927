#include "gaugerec/gauge.hpp"

#include <cmath>
#include <deque>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include <Eigen/LU>
#include <Eigen/SparseCholesky>

#include "gaugerec/calculus.hpp"

namespace gaugerec {

namespace {

constexpr double pi = std::numbers::pi;

// p-th root of `s` continued from node 0 (principal branch, times `start`) by nearest-root choice.
ScalarField continued_root(const Grid& g, const std::vector<cplx>& s, int p, cplx start) {
  ScalarField tau(g);
  std::vector<char> seen(g.size(), 0);
  std::vector<std::size_t> ambiguous, nbr;
  const double tol = pi / (2.0 * p);
  tau[0] = start * std::pow(s[0], 1.0 / p);
  seen[0] = 1;
  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    const std::size_t k = queue.front();
    queue.pop_front();
    g.neighbors(k, nbr);
    for (std::size_t q : nbr) {
      if (seen[q]) continue;
      const cplx r = std::pow(s[q], 1.0 / p);
      double best = 1e300;
      cplx pick = r;
      for (int m = 0; m < p; ++m) {
        const cplx cand = r * std::polar(1.0, 2.0 * pi * m / p);
        const double ang = std::abs(std::arg(cand / tau[k]));
        if (ang < best) best = ang, pick = cand;
      }
      if (best > tol) ambiguous.push_back(q);
      tau[q] = pick;
      seen[q] = 1;
      queue.push_back(q);
    }
  }
  // the tree continuation must also agree across every other edge
  for (std::size_t k = 0; k < g.size(); ++k) {
    g.neighbors(k, nbr);
    for (std::size_t q : nbr)
      if (q > k && std::abs(std::arg(tau[q] / tau[k])) > tol) ambiguous.push_back(q);
  }
  if (!ambiguous.empty()) throw BranchAmbiguity(std::move(ambiguous));
  return tau;
}

GaugeSplit split_with(const SymTensorField& a, double floor, SplitConvention conv) {
  const Grid& g = a.grid();
  const int n = g.dim();
  std::vector<cplx> s(g.size());
  std::vector<std::size_t> bad;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const SmallMat m = a.at(k);
    s[k] = conv == SplitConvention::Determinant ? m.determinant() : (m * m).trace();
    if (!(std::abs(s[k]) >= floor)) bad.push_back(k);
  }
  if (!bad.empty()) {
    if (conv == SplitConvention::Determinant) throw VanishingDeterminant(std::move(bad));
    throw VanishingGauge(std::move(bad));
  }
  const int p = conv == SplitConvention::Determinant ? n : 2;
  cplx start = 1.0;
  if (conv == SplitConvention::Pairing && (a.at(0).trace() / std::pow(s[0], 0.5)).real() < 0.0) start = -1.0;
  GaugeSplit out;
  out.convention = conv;
  out.tau = continued_root(g, s, p, start);
  out.unit = SymTensorField(g);
  for (std::size_t k = 0; k < g.size(); ++k) out.unit.set(k, a.at(k) / out.tau[k]);
  return out;
}

VectorField solve_pointwise(const SymTensorField& a0, const VectorField& b0) {
  const Grid& g = a0.grid();
  if (b0.grid() != g) throw std::invalid_argument("a0 and b0 live on different grids");
  VectorField out(g);
  for (std::size_t k = 0; k < g.size(); ++k) out.set(k, a0.at(k).fullPivLu().solve(b0.at(k)));
  return out;
}

double curl_residual(const VectorField& v, double margin) {
  const Grid& g = v.grid();
  std::vector<std::size_t> nodes = g.nodes_with_margin(margin);
  if (nodes.empty()) nodes = g.interior_nodes();
  std::vector<double> curl(g.size(), 0.0);
  if (g.dim() == 2) {
    const ScalarField c = curl_2d(v);
    for (std::size_t k = 0; k < g.size(); ++k) curl[k] = std::abs(c[k]);
  } else {
    const VectorField c = curl_3d(v);
    for (std::size_t k = 0; k < g.size(); ++k) curl[k] = c.at(k).norm();
  }
  double num = 0.0, grad = 0.0;
  for (int i = 0; i < g.dim(); ++i) {
    const VectorField d = gradient(v.component_field(i));
    for (std::size_t k : nodes) grad = std::max(grad, d.at(k).cwiseAbs().maxCoeff());
  }
  for (std::size_t k : nodes) num = std::max(num, curl[k]);
  const double diam = g.diameter();
  return num / (grad + 1.0 / (diam * diam));
}

BoundaryTrace boundary_values(const Grid& g, const TauAnchor& anchor, const char* who) {
  std::unordered_map<std::size_t, cplx> lookup;
  for (std::size_t i = 0; i < anchor.nodes.size(); ++i) lookup[anchor.nodes[i]] = anchor.values[i];
  BoundaryTrace t;
  t.grid = g;
  t.label = "tau";
  std::vector<std::size_t> zero;
  for (std::size_t k : g.boundary_nodes()) {
    auto it = lookup.find(k);
    if (it == lookup.end()) throw std::invalid_argument(std::string(who) + " needs tau on every boundary node");
    if (it->second == cplx(0.0)) zero.push_back(k);
    t.values.push_back(it->second);
  }
  if (!zero.empty()) throw VanishingGauge(std::move(zero));
  return t;
}

// ln of boundary values with the imaginary part unwrapped along boundary adjacency.
BoundaryTrace unwrapped_log(const Grid& g, const BoundaryTrace& t) {
  const auto bnodes = g.boundary_nodes();
  std::unordered_map<std::size_t, std::size_t> pos;
  for (std::size_t i = 0; i < bnodes.size(); ++i) pos[bnodes[i]] = i;
  BoundaryTrace out = t;
  std::vector<char> seen(bnodes.size(), 0);
  std::vector<std::size_t> nbr;
  for (std::size_t s = 0; s < bnodes.size(); ++s) {
    if (seen[s]) continue;
    out.values[s] = std::log(t.values[s]);
    seen[s] = 1;
    std::deque<std::size_t> queue{s};
    while (!queue.empty()) {
      const std::size_t i = queue.front();
      queue.pop_front();
      g.neighbors(bnodes[i], nbr);
      for (std::size_t q : nbr) {
        auto it = pos.find(q);
        if (it == pos.end() || seen[it->second]) continue;
        const std::size_t j = it->second;
        cplx l = std::log(t.values[j]);
        l.imag(l.imag() + 2.0 * pi * std::round((out.values[i].imag() - l.imag()) / (2.0 * pi)));
        out.values[j] = l;
        seen[j] = 1;
        queue.push_back(j);
      }
    }
  }
  return out;
}

const VectorField& require_b(const ClassRepresentative& rep, VectorField& storage) {
  if (rep.b) return *rep.b;
  storage = rep.b_plus_diva;
  const VectorField div = divergence_tensor(rep.a);
  for (std::size_t i = 0; i < storage.data().size(); ++i) storage.data()[i] -= div.data()[i];
  return storage;
}

}  // namespace

std::string_view to_string(SplitConvention c) {
  return c == SplitConvention::Determinant ? "determinant" : "pairing";
}

GaugeSplit split_det(const SymTensorField& a, double floor) {
  return split_with(a, floor, SplitConvention::Determinant);
}

GaugeSplit split_pairing(const SymTensorField& a, double floor) { return split_with(a, floor, SplitConvention::Pairing); }

GaugeSplit convert_split(const GaugeSplit& s, SplitConvention to) {
  if (s.convention == to) return s;
  GaugeSplit inner = split_with(s.unit, 0.0, to);
  inner.tau = hadamard(inner.tau, s.tau);
  return inner;
}

TauAnchor TauAnchor::boundary(const ScalarField& tau) {
  TauAnchor a;
  a.nodes = tau.grid().boundary_nodes();
  for (std::size_t k : a.nodes) a.values.push_back(tau[k]);
  return a;
}

TauAnchor TauAnchor::boundary(const Grid& grid, cplx value) {
  TauAnchor a;
  a.nodes = grid.boundary_nodes();
  a.values.assign(a.nodes.size(), value);
  return a;
}

TauAnchor TauAnchor::point(std::size_t node, cplx value) { return {{node}, {value}}; }

ScalarField least_squares_potential(const VectorField& g) {
  const Grid& grid = g.grid();
  const int n = grid.dim();
  const std::size_t N = grid.size();
  // unknowns are phi at nodes 1..N-1; phi(0) = 0
  using SpMat = Eigen::SparseMatrix<double>;
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(N));
  std::vector<double> diag(N, 0.0);
  for (std::size_t k = 0; k < N; ++k) {
    const Index3 idx = grid.index(k);
    for (int a = 0; a < n; ++a) {
      if (idx[a] + 1 >= grid.shape()[a]) continue;
      const std::size_t q = k + grid.stride(a);
      const cplx d = 0.5 * grid.spacing(a) * (g(k, a) + g(q, a));
      // (phi_q - phi_k - d)^2
      diag[k] += 1.0, diag[q] += 1.0;
      trip.emplace_back(static_cast<int>(k), static_cast<int>(q), -1.0);
      trip.emplace_back(static_cast<int>(q), static_cast<int>(k), -1.0);
      rhs(static_cast<Eigen::Index>(q)) += d;
      rhs(static_cast<Eigen::Index>(k)) -= d;
    }
  }
  for (std::size_t k = 0; k < N; ++k) trip.emplace_back(static_cast<int>(k), static_cast<int>(k), diag[k]);
  SpMat L(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  L.setFromTriplets(trip.begin(), trip.end());
  const Eigen::Index M = static_cast<Eigen::Index>(N) - 1;
  const SpMat Lr = L.bottomRightCorner(M, M);
  Eigen::SimplicialLDLT<SpMat> ldlt(Lr);
  if (ldlt.info() != Eigen::Success) throw SingularSystem("potential system factorization failed");
  const Eigen::VectorXd re = ldlt.solve(Eigen::VectorXd(rhs.tail(M).real()));
  const Eigen::VectorXd im = ldlt.solve(Eigen::VectorXd(rhs.tail(M).imag()));
  ScalarField phi(grid);
  for (Eigen::Index i = 0; i < M; ++i) phi[static_cast<std::size_t>(i + 1)] = cplx(re(i), im(i));
  return phi;
}

TauRecovery integrate_gauge(const VectorField& g, const TauAnchor& anchor, const TransportOptions& opts) {
  if (anchor.nodes.empty() || anchor.nodes.size() != anchor.values.size())
    throw std::invalid_argument("tau anchor needs matching nodes and values");
  TauRecovery r;
  r.curl_residual = curl_residual(g, opts.margin);
  if (!(r.curl_residual <= opts.curl_threshold)) throw NonIntegrableField(r.curl_residual, opts.curl_threshold);
  r.phi = least_squares_potential(g);
  const ScalarField e = r.phi.map([](cplx z) { return std::exp(z); });
  cplx num = 0.0;
  double den = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < anchor.nodes.size(); ++i) {
    const cplx ek = e[anchor.nodes[i]];
    num += std::conj(ek) * anchor.values[i];
    den += std::norm(ek);
    ref += std::norm(anchor.values[i]);
  }
  const cplx kappa = num / den;
  if (kappa == cplx(0.0)) throw VanishingGauge(anchor.nodes);
  r.tau = kappa * e;
  double mis = 0.0;
  for (std::size_t i = 0; i < anchor.nodes.size(); ++i) mis += std::norm(r.tau[anchor.nodes[i]] - anchor.values[i]);
  r.anchor_mismatch = std::sqrt(mis / ref);
  return r;
}

TauRecovery recover_tau_b_zero(const SymTensorField& a0, const VectorField& b0, const TauAnchor& anchor,
                               const TransportOptions& opts) {
  return integrate_gauge(solve_pointwise(a0, b0), anchor, opts);
}

TauRecovery recover_tau_b_zero(const ClassRepresentative& rep, const TauAnchor& anchor, const TransportOptions& opts) {
  VectorField tmp;
  return recover_tau_b_zero(rep.a, require_b(rep, tmp), anchor, opts);
}

ScalarField recover_tau_known_phi(const SymTensorField& a0, const VectorField& b0, const ScalarField& Phi,
                                  const TauAnchor& boundary) {
  const Grid& g = a0.grid();
  const BoundaryTrace lt = unwrapped_log(g, boundary_values(g, boundary, "known-phi recovery"));
  const ScalarField src = divergence(solve_pointwise(a0, b0)) - Phi;
  const int n = g.dim();
  const CoefficientSet lap{SymTensorField::constant(g, SmallMat::Identity(n, n)), VectorField(g), ScalarField(g),
                          VectorField(g)};
  const ScalarField psi = solve_dirichlet(lap, lt, {}, &src);
  return psi.map([](cplx z) { return std::exp(z); });
}

ScalarField recover_tau_known_phi(const ClassRepresentative& rep, const ScalarField& Phi, const TauAnchor& boundary) {
  VectorField tmp;
  return recover_tau_known_phi(rep.a, require_b(rep, tmp), Phi, boundary);
}

ScalarField recover_tau_divfree_b(const SymTensorField& a0, const VectorField& b0, const TauAnchor& boundary,
                                  double tol) {
  if (a0.max_imag() > tol || b0.max_imag() > tol)
    throw ComplexCoefficients("divergence-free gauge recovery needs real a0 and b0");
  const Grid& g = a0.grid();
  const BoundaryTrace t = boundary_values(g, boundary, "divergence-free recovery");
  VectorField minus_b = b0;
  for (auto& z : minus_b.data()) z = -z;
  const ScalarField c = -1.0 * divergence(b0);
  const CoefficientSet coeffs{a0, std::move(minus_b), c, divergence_tensor(a0)};
  SolverOptions so;
  so.alpha0 = 1e-6;
  return solve_dirichlet(coeffs, t, so);
}

ScalarField recover_tau_divfree_b(const ClassRepresentative& rep, const TauAnchor& boundary, double tol) {
  VectorField tmp;
  return recover_tau_divfree_b(rep.a, require_b(rep, tmp), boundary, tol);
}

CoefficientSet apply_gauge(const ClassRepresentative& rep, const ScalarField& tau) {
  VectorField tmp;
  const VectorField& b = require_b(rep, tmp);
  VectorField diva = rep.b_plus_diva;
  for (std::size_t i = 0; i < diva.data().size(); ++i) diva.data()[i] -= b.data()[i];
  return gauge_transform({rep.a, b, rep.c, std::move(diva)}, tau);
}

}  // namespace gaugerec
