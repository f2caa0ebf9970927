#include "gaugerec/forward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include "gaugerec/calculus.hpp"
#include "gaugerec/errors.hpp"

namespace gaugerec {

using SpMat = Eigen::SparseMatrix<cplx>;
using DenseVec = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;

bool CoefficientSet::is_real(double tol) const {
  return a.max_imag() <= tol && b.max_imag() <= tol && c.max_imag() <= tol && diva.max_imag() <= tol;
}

CoefficientSet CoefficientSet::with_discrete_divergence(SymTensorField a, VectorField b, ScalarField c) {
  VectorField diva = divergence_tensor(a);
  return {std::move(a), std::move(b), std::move(c), std::move(diva)};
}

EllipticityBounds ellipticity_bounds(const SymTensorField& a) {
  EllipticityBounds out{std::numeric_limits<double>::infinity(), 0.0};
  const int n = a.grid().dim();
  for (std::size_t k = 0; k < a.size(); ++k) {
    const RealMat re = a.at(k).real();
    Eigen::SelfAdjointEigenSolver<RealMat> es(re, Eigen::EigenvaluesOnly);
    out.min_eig = std::min(out.min_eig, es.eigenvalues()(0));
    out.max_eig = std::max(out.max_eig, es.eigenvalues()(n - 1));
  }
  return out;
}

void check_ellipticity(const SymTensorField& a, double alpha0) {
  std::vector<std::size_t> bad;
  const int n = a.grid().dim();
  for (std::size_t k = 0; k < a.size(); ++k) {
    const RealMat re = a.at(k).real();
    Eigen::SelfAdjointEigenSolver<RealMat> es(re, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues()(0), hi = es.eigenvalues()(n - 1);
    if (!(lo >= alpha0) || !(hi <= 1.0 / alpha0)) bad.push_back(k);
  }
  if (!bad.empty()) throw EllipticityViolation(std::move(bad));
}

BoundaryTrace BoundaryTrace::sample(const Grid& grid, const std::function<cplx(const Point&)>& fn,
                                    std::string label) {
  BoundaryTrace t{grid, {}, std::move(label)};
  for (std::size_t k : grid.boundary_nodes()) t.values.push_back(fn(grid.coord(k)));
  return t;
}

BoundaryTrace BoundaryTrace::of(const ScalarField& f, std::string label) {
  BoundaryTrace t{f.grid(), {}, std::move(label)};
  for (std::size_t k : f.grid().boundary_nodes()) t.values.push_back(f[k]);
  return t;
}

bool BoundaryTrace::all_finite() const {
  return std::all_of(values.begin(), values.end(),
                     [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

// ---------------------------------------------------------------------------

struct DirichletSolver::Impl {
  Grid grid;
  SolverOptions opts;
  SpMat matrix;
  std::vector<std::size_t> boundary;
  std::vector<char> is_boundary;
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  Eigen::BiCGSTAB<SpMat, Eigen::IncompleteLUT<cplx>> iterative;
};

namespace {

SpMat assemble(const CoefficientSet& coeffs, const std::vector<char>& is_boundary) {
  const Grid& g = coeffs.grid();
  const int n = g.dim();
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(g.size() * (n == 2 ? 9 : 19));
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto row = static_cast<int>(k);
    if (is_boundary[k]) {
      trip.emplace_back(row, row, 1.0);
      continue;
    }
    const SmallMat a = coeffs.a.at(k);
    cplx diag = coeffs.c[k];
    for (int i = 0; i < n; ++i) {
      const double h = g.spacing(i);
      const auto s = static_cast<long>(g.stride(i));
      const cplx first = coeffs.diva(k, i) + coeffs.b(k, i);
      const cplx w2 = a(i, i) / (h * h);
      diag -= 2.0 * w2;
      trip.emplace_back(row, static_cast<int>(k + s), w2 + first / (2.0 * h));
      trip.emplace_back(row, static_cast<int>(k - s), w2 - first / (2.0 * h));
      for (int j = i + 1; j < n; ++j) {
        // 2 a_ij d_i d_j u with the four-corner stencil
        const auto t = static_cast<long>(g.stride(j));
        const cplx w = 2.0 * a(i, j) / (4.0 * h * g.spacing(j));
        trip.emplace_back(row, static_cast<int>(k + s + t), w);
        trip.emplace_back(row, static_cast<int>(k - s - t), w);
        trip.emplace_back(row, static_cast<int>(k + s - t), -w);
        trip.emplace_back(row, static_cast<int>(k - s + t), -w);
      }
    }
    trip.emplace_back(row, row, diag);
  }
  const auto N = static_cast<int>(g.size());
  SpMat m(N, N);
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return m;
}

double inf_norm(const DenseVec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

DirichletSolver::DirichletSolver(const CoefficientSet& coeffs, SolverOptions opts) : impl_(std::make_unique<Impl>()) {
  const Grid& g = coeffs.grid();
  if (coeffs.b.grid() != g || coeffs.c.grid() != g || coeffs.diva.grid() != g)
    throw std::invalid_argument("coefficient fields live on different grids");
  for (int a = 0; a < g.dim(); ++a)
    if (g.shape()[a] < 3) throw std::invalid_argument("grid too small for the Dirichlet solver");
  check_ellipticity(coeffs.a, opts.alpha0);
  if (!coeffs.a.all_finite() || !coeffs.b.all_finite() || !coeffs.c.all_finite() || !coeffs.diva.all_finite())
    throw std::invalid_argument("coefficients must be finite");

  impl_->grid = g;
  impl_->opts = opts;
  impl_->boundary = g.boundary_nodes();
  impl_->is_boundary.assign(g.size(), 0);
  for (std::size_t k : impl_->boundary) impl_->is_boundary[k] = 1;
  impl_->matrix = assemble(coeffs, impl_->is_boundary);

  if (opts.method == LinearSolverKind::SparseLU) {
    impl_->lu.analyzePattern(impl_->matrix);
    impl_->lu.factorize(impl_->matrix);
    if (impl_->lu.info() != Eigen::Success)
      throw SingularSystem("sparse LU factorization failed: " + impl_->lu.lastErrorMessage());
  } else {
    impl_->iterative.setTolerance(opts.tolerance);
    impl_->iterative.setMaxIterations(opts.max_iterations);
    impl_->iterative.preconditioner().setDroptol(1e-6);
    impl_->iterative.preconditioner().setFillfactor(20);
    impl_->iterative.compute(impl_->matrix);
    if (impl_->iterative.info() != Eigen::Success) throw SingularSystem("ILUT preconditioner construction failed");
  }
}

DirichletSolver::~DirichletSolver() = default;
DirichletSolver::DirichletSolver(DirichletSolver&&) noexcept = default;
DirichletSolver& DirichletSolver::operator=(DirichletSolver&&) noexcept = default;

ScalarField DirichletSolver::solve(const BoundaryTrace& f, const ScalarField* source) const {
  const Impl& s = *impl_;
  if (f.grid != s.grid || f.values.size() != s.boundary.size())
    throw std::invalid_argument("boundary trace does not match the solver grid");
  if (!f.all_finite()) throw std::invalid_argument("boundary trace '" + f.label + "' is not finite");
  const auto N = static_cast<Eigen::Index>(s.grid.size());
  DenseVec rhs = DenseVec::Zero(N);
  if (source) {
    if (source->grid() != s.grid) throw std::invalid_argument("source does not match the solver grid");
    for (std::size_t k = 0; k < s.grid.size(); ++k)
      if (!s.is_boundary[k]) rhs(static_cast<Eigen::Index>(k)) = (*source)[k];
  }
  for (std::size_t b = 0; b < s.boundary.size(); ++b) rhs(static_cast<Eigen::Index>(s.boundary[b])) = f.values[b];

  DenseVec u;
  if (s.opts.method == LinearSolverKind::SparseLU) {
    u = s.lu.solve(rhs);
    if (s.lu.info() != Eigen::Success) throw SingularSystem("sparse LU solve failed");
  } else {
    u = s.iterative.solve(rhs);
    if (s.iterative.info() != Eigen::Success)
      throw SingularSystem("BiCGSTAB did not converge (error " + std::to_string(s.iterative.error()) + ")");
  }

  const double data = inf_norm(rhs);
  const double size = inf_norm(u);
  if (!std::isfinite(size) || size > s.opts.growth_limit * std::max(data, 1e-300))
    throw SingularSystem("solution growth " + std::to_string(size / std::max(data, 1e-300)) +
                         " indicates a (near) singular operator");
  const DenseVec r = s.matrix * u - rhs;
  double row_scale = 0.0;
  for (int k = 0; k < s.matrix.outerSize(); ++k)
    for (SpMat::InnerIterator it(s.matrix, k); it; ++it) row_scale = std::max(row_scale, std::abs(it.value()));
  const double rel = inf_norm(r) / (row_scale * size + data + 1e-300);
  const double allowed = s.opts.method == LinearSolverKind::SparseLU ? s.opts.tolerance : std::max(s.opts.tolerance, 1e-8);
  if (!(rel <= allowed))
    throw SingularSystem("residual " + std::to_string(rel) + " above tolerance");

  ScalarField out(s.grid);
  for (std::size_t k = 0; k < s.grid.size(); ++k) out[k] = u(static_cast<Eigen::Index>(k));
  for (std::size_t b = 0; b < s.boundary.size(); ++b) out[s.boundary[b]] = f.values[b];
  return out;
}

ScalarField DirichletSolver::apply(const ScalarField& u) const {
  const Impl& s = *impl_;
  DenseVec x(static_cast<Eigen::Index>(u.size()));
  for (std::size_t k = 0; k < u.size(); ++k) x(static_cast<Eigen::Index>(k)) = u[k];
  const DenseVec y = s.matrix * x;
  ScalarField out(s.grid);
  for (std::size_t k = 0; k < u.size(); ++k)
    if (!s.is_boundary[k]) out[k] = y(static_cast<Eigen::Index>(k));
  return out;
}

ScalarField solve_dirichlet(const CoefficientSet& coeffs, const BoundaryTrace& f, const SolverOptions& opts,
                            const ScalarField* source) {
  return DirichletSolver(coeffs, opts).solve(f, source);
}

CoefficientSet gauge_transform(const CoefficientSet& coeffs, const ScalarField& tau, double floor) {
  return gauge_transform(coeffs, tau, gradient(tau), floor);
}

CoefficientSet gauge_transform(const CoefficientSet& coeffs, const ScalarField& tau, const VectorField& grad_tau,
                               double floor) {
  const Grid& g = coeffs.grid();
  std::vector<std::size_t> bad;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (!(std::abs(tau[k]) >= floor)) bad.push_back(k);
  if (!bad.empty()) throw VanishingGauge(std::move(bad));
  CoefficientSet out{SymTensorField(g), VectorField(g), ScalarField(g), VectorField(g)};
  for (std::size_t k = 0; k < g.size(); ++k) {
    const SmallMat a = coeffs.a.at(k);
    const SmallVec agrad = a * grad_tau.at(k);
    out.a.set(k, tau[k] * a);
    out.b.set(k, tau[k] * coeffs.b.at(k) - agrad);
    out.c[k] = tau[k] * coeffs.c[k];
    out.diva.set(k, tau[k] * coeffs.diva.at(k) + agrad);
  }
  return out;
}

std::vector<ScalarField> synthesize(const CoefficientSet& coeffs, const std::vector<BoundaryTrace>& traces,
                                    const SolverOptions& opts) {
  std::vector<ScalarField> out;
  if (traces.empty()) return out;
  DirichletSolver solver(coeffs, opts);
  out.reserve(traces.size());
  for (std::size_t j = 0; j < traces.size(); ++j) {
    try {
      out.push_back(solver.solve(traces[j]));
    } catch (const SingularSystem& e) {
      throw SingularSystem("illumination " + std::to_string(j) + " ('" + traces[j].label + "'): " + e.what());
    }
  }
  return out;
}

}  // namespace gaugerec
