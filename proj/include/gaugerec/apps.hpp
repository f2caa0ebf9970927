#pragma once

#include <vector>

#include "gaugerec/gauge.hpp"
#include "gaugerec/recon.hpp"

namespace gaugerec {

/// Photo-acoustic data H_j = sigma u_j (Grueneisen factor 1) with the boundary quantities the
/// pipeline needs. Boundary vectors follow Grid::boundary_nodes order.
struct QpatData {
  std::vector<ScalarField> H;
  BoundaryTrace f1;
  std::vector<SmallMat> gamma_boundary;
  /// Optional; only used for a consistency diagnostic.
  std::vector<cplx> sigma_boundary;
};

/// Elastography displacements H_j = u_j of div(gamma grad u) + omega^2 rho u = 0.
struct ElastoData {
  std::vector<ScalarField> H;
  double omega = 1.0;
  std::vector<SmallMat> gamma_boundary;
};

struct AppOptions {
  ReconOptions recon;
  TransportOptions transport;
};

struct QpatResult {
  SymTensorField gamma;
  ScalarField sigma;
  /// w = 1/u1
  ScalarField w;
  /// D = gamma u1^2
  SymTensorField D;
  GlobalReconstruction engine;
  TauRecovery tau;
  json report;
};

struct ElastoResult {
  SymTensorField gamma;
  ScalarField rho;
  GlobalReconstruction engine;
  TauRecovery tau;
  json report;
};

/// Boundary values of a tensor field in Grid::boundary_nodes order.
std::vector<SmallMat> boundary_tensor(const SymTensorField& f);

/// Least-squares factor per boundary node: t = <rep, target> / |rep|^2 (Frobenius, Hermitian).
TauAnchor tensor_anchor(const SymTensorField& rep_a, const std::vector<SmallMat>& target);

/// Solves -div(D grad w) = source with w = trace on the boundary, using a conservative
/// stencil built from nodal values of D (face averages on the diagonal, centred cross terms).
ScalarField solve_divergence_form(const SymTensorField& D, const ScalarField& source, const BoundaryTrace& trace);

/// Interior residual of div(D grad w) with the same stencil.
ScalarField apply_divergence_form(const SymTensorField& D, const ScalarField& w);

/// Throws NonPositiveH1 when H1 is not real and positive at every node.
QpatResult qpat_reconstruct(const QpatData& d, const AppOptions& opts = {});

ElastoResult elasto_reconstruct(const ElastoData& d, const AppOptions& opts = {});

/// max over j of sup_interior |div(gamma grad u_j) + c u_j| with u_j recovered from the data.
double qpat_residual(const QpatData& d, const SymTensorField& gamma, const ScalarField& sigma);
double elasto_residual(const ElastoData& d, const SymTensorField& gamma, const ScalarField& rho);

}  // namespace gaugerec
