#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gaugerec/field.hpp"

namespace gaugerec {

/// One element (a, b, c) of a gauge class, with the divergence of `a` carried alongside
/// (analytic for manufactured coefficients, discrete otherwise).
struct CoefficientSet {
  SymTensorField a;
  VectorField b;
  ScalarField c;
  VectorField diva;

  const Grid& grid() const { return a.grid(); }
  bool is_real(double tol = 0.0) const;

  /// Builds the set with div(a) from the discrete stencils.
  static CoefficientSet with_discrete_divergence(SymTensorField a, VectorField b, ScalarField c);
};

/// Smallest and largest eigenvalue of Re(a) over all nodes.
struct EllipticityBounds {
  double min_eig = 0.0;
  double max_eig = 0.0;
};

EllipticityBounds ellipticity_bounds(const SymTensorField& a);

/// Throws EllipticityViolation unless alpha0 <= eig(Re a) <= 1/alpha0 at every node.
void check_ellipticity(const SymTensorField& a, double alpha0);

/// Dirichlet data on the boundary nodes of a grid (in `Grid::boundary_nodes` order).
struct BoundaryTrace {
  Grid grid;
  std::vector<cplx> values;
  std::string label;

  static BoundaryTrace sample(const Grid& grid, const std::function<cplx(const Point&)>& fn, std::string label);
  /// Boundary restriction of a full-grid field.
  static BoundaryTrace of(const ScalarField& f, std::string label);
  bool all_finite() const;
};

enum class LinearSolverKind { SparseLU, BiCGSTAB };

struct SolverOptions {
  LinearSolverKind method = LinearSolverKind::SparseLU;
  /// Relative residual bound at interior nodes.
  double tolerance = 1e-10;
  double alpha0 = 1e-3;
  int max_iterations = 20000;
  /// A solution larger than growth_limit times the data is reported as SingularSystem.
  double growth_limit = 1e10;
};

/// Factorised non-divergence-form operator a:D^2 u + (div a + b).D u + c u on a grid.
/// One instance may be solved against many boundary traces; a single instance must not be
/// used from several threads at once.
class DirichletSolver {
 public:
  DirichletSolver(const CoefficientSet& coeffs, SolverOptions opts = {});
  ~DirichletSolver();
  DirichletSolver(DirichletSolver&&) noexcept;
  DirichletSolver& operator=(DirichletSolver&&) noexcept;

  /// Solves L u = source in the interior, u = f on the boundary. `source` defaults to zero.
  ScalarField solve(const BoundaryTrace& f, const ScalarField* source = nullptr) const;

  /// Applies the assembled interior operator to `u` (zero on boundary nodes).
  ScalarField apply(const ScalarField& u) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

ScalarField solve_dirichlet(const CoefficientSet& coeffs, const BoundaryTrace& f, const SolverOptions& opts = {},
                            const ScalarField* source = nullptr);

/// (a, b, c) -> (tau a, tau b - a grad(tau), tau c) with div(tau a) = tau div(a) + a grad(tau).
/// Uses the discrete gradient of tau.
CoefficientSet gauge_transform(const CoefficientSet& coeffs, const ScalarField& tau, double floor = 1e-12);
/// Same transform with a caller-supplied gradient of tau (e.g. analytic).
CoefficientSet gauge_transform(const CoefficientSet& coeffs, const ScalarField& tau, const VectorField& grad_tau,
                               double floor = 1e-12);

/// u_j = S_C f_j for every trace, sharing one factorisation.
std::vector<ScalarField> synthesize(const CoefficientSet& coeffs, const std::vector<BoundaryTrace>& traces,
                                    const SolverOptions& opts = {});

}  // namespace gaugerec
