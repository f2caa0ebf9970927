#pragma once

#include <vector>

#include "gaugerec/forward.hpp"
#include "gaugerec/recon.hpp"

namespace gaugerec {

/// Determinant: det(M_unit) = 1. Pairing: Tr(M_unit M_unit) = 1.
enum class SplitConvention { Determinant, Pairing };

std::string_view to_string(SplitConvention c);

/// a = tau * M_unit at every node.
struct GaugeSplit {
  ScalarField tau;
  SymTensorField unit;
  SplitConvention convention = SplitConvention::Determinant;
};

/// tau = det(a)^(1/n), principal branch at node 0 and continued to neighbours by choosing the
/// nearest root. Throws VanishingDeterminant where |det| < floor and BranchAmbiguity where the
/// continuation jumps by more than a quarter of the root spacing.
GaugeSplit split_det(const SymTensorField& a, double floor = 1e-12);

/// tau = Tr(a a)^(1/2) continued the same way, with Re Tr(M_unit) > 0 at node 0.
GaugeSplit split_pairing(const SymTensorField& a, double floor = 1e-12);

/// Re-expresses a split in the other convention; tau * M_unit is unchanged.
GaugeSplit convert_split(const GaugeSplit& s, SplitConvention to);

/// Known values of the gauge factor, typically on boundary nodes.
struct TauAnchor {
  std::vector<std::size_t> nodes;
  std::vector<cplx> values;

  /// Values of `tau` on the boundary of its grid.
  static TauAnchor boundary(const ScalarField& tau);
  /// Constant value on the boundary.
  static TauAnchor boundary(const Grid& grid, cplx value);
  static TauAnchor point(std::size_t node, cplx value);
};

struct TauRecovery {
  ScalarField tau;
  /// ln tau up to the anchor constant.
  ScalarField phi;
  /// sup |curl g| / (sup |grad g| + 1/diam^2) over the evaluation region.
  double curl_residual = 0.0;
  /// Relative least-squares misfit between tau and the anchor values.
  double anchor_mismatch = 0.0;
};

struct TransportOptions {
  /// Maximal admissible curl residual.
  double curl_threshold = 0.05;
  /// Distance from the boundary excluded from the curl residual.
  double margin = 1.0 / 8;
};

/// Least-squares potential of g on grid edges: phi(k') - phi(k) ~ h (g(k) + g(k'))/2.
/// The normal equations are a graph Laplacian with natural (Neumann) boundary rows.
ScalarField least_squares_potential(const VectorField& g);

/// Solves grad ln tau = g and calibrates exp(phi) against the anchor by least squares.
/// Throws NonIntegrableField when the curl residual exceeds the threshold.
TauRecovery integrate_gauge(const VectorField& g, const TauAnchor& anchor, const TransportOptions& opts = {});

/// Transport route for classes containing a member with b = 0: grad ln tau = a0^{-1} b0.
TauRecovery recover_tau_b_zero(const SymTensorField& a0, const VectorField& b0, const TauAnchor& anchor,
                               const TransportOptions& opts = {});
TauRecovery recover_tau_b_zero(const ClassRepresentative& rep, const TauAnchor& anchor,
                               const TransportOptions& opts = {});

/// -Laplacian(ln tau) = Phi - div(a0^{-1} b0) with Dirichlet data ln tau on the boundary.
/// Throws VanishingGauge when a boundary value vanishes.
ScalarField recover_tau_known_phi(const SymTensorField& a0, const VectorField& b0, const ScalarField& Phi,
                                  const TauAnchor& boundary);
ScalarField recover_tau_known_phi(const ClassRepresentative& rep, const ScalarField& Phi, const TauAnchor& boundary);

/// Real classes whose gauged b is divergence free: div(a0 grad tau) - div(tau b0) = 0 with
/// Dirichlet data. Throws ComplexCoefficients when a0 or b0 has an imaginary part above `tol`.
ScalarField recover_tau_divfree_b(const SymTensorField& a0, const VectorField& b0, const TauAnchor& boundary,
                                  double tol = 1e-10);
ScalarField recover_tau_divfree_b(const ClassRepresentative& rep, const TauAnchor& boundary, double tol = 1e-10);

/// Class member (tau a, tau b - a grad tau, tau c) of a representative, with discrete grad tau.
CoefficientSet apply_gauge(const ClassRepresentative& rep, const ScalarField& tau);

}  // namespace gaugerec
