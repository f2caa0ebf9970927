#pragma once

#include <string>
#include <vector>

#include "gaugerec/forward.hpp"

namespace gaugerec {

/// amp * sin(k.x + phase)
struct Wave {
  cplx amp;
  Point k;
  double phase = 0.0;

  cplx value(const Point& x) const;
  /// Gradient in the first `dim` coordinates.
  SmallVec gradient(const Point& x, int dim) const;
};

/// prod_i sin(pi x_i): vanishes on the boundary of the unit box.
double bump(const Point& x, int dim);
SmallVec bump_gradient(const Point& x, int dim);

/// Smooth complex (a, b, c) with |a - Id|, |b|, |c| bounded by `amplitude`; div a is analytic.
CoefficientSet near_identity_coefficients(const Grid& grid, double amplitude = 0.1);

/// (a0, 0, 0).
CoefficientSet constant_tensor_coefficients(const Grid& grid, const SmallMat& a0);

/// diag(1, 2[, 3]) + 0.1 i S with S a fixed real symmetric matrix.
SmallMat demo_constant_tensor(int dim);

/// (gamma Id, 0, c) with gamma = 1 + 0.3 bump and a smooth complex c.
CoefficientSet isotropic_c_coefficients(const Grid& grid, ScalarField* gamma = nullptr);

/// Fixed real symmetric direction used by the anisotropic demos.
SmallMat demo_anisotropy(int dim);

/// gamma = Id + 0.2 S bump (real), with analytic divergence.
void anisotropic_gamma(const Grid& grid, SymTensorField& gamma, VectorField& div_gamma);

struct QpatTruth {
  SymTensorField gamma;
  VectorField div_gamma;
  ScalarField sigma;
};

/// gamma = Id + 0.2 S bump, sigma = 1 + 0.5 bump.
QpatTruth qpat_demo_truth(const Grid& grid);

/// Diffusion form div(gamma grad u) - sigma u = 0, written as (gamma, 0, -sigma).
CoefficientSet qpat_forward_coefficients(const QpatTruth& t);

struct ElastoTruth {
  SymTensorField gamma;
  VectorField div_gamma;
  ScalarField rho;
  double omega = 1.0;
};

/// Real anisotropic gamma, rho = 1 + 0.3i, omega = 1.
ElastoTruth elasto_demo_truth(const Grid& grid);

/// div(gamma grad u) + omega^2 rho u = 0, written as (gamma, 0, omega^2 rho).
CoefficientSet elasto_forward_coefficients(const ElastoTruth& t);

/// Names accepted by the harness.
const std::vector<std::string>& preset_names();

}  // namespace gaugerec
