#pragma once

#include "gaugerec/field.hpp"

namespace gaugerec {

/// First partial derivative along one axis: second-order central differences in the
/// interior, second-order one-sided three-point stencils on the boundary.
ScalarField partial(const ScalarField& f, int axis);

/// Second partial derivative along one axis: three-point central stencil in the interior,
/// four-point one-sided stencil (exact for cubics) on the boundary.
ScalarField second_partial(const ScalarField& f, int axis);

VectorField gradient(const ScalarField& f);

/// Discrete Hessian. Mixed partials are the average of the two composition orders, so the
/// result is symmetric by construction. Requires at least 5 nodes per axis.
SymTensorField hessian(const ScalarField& f);

/// Row-wise divergence (div a)_i = sum_j d_j a_ij.
VectorField divergence_tensor(const SymTensorField& a);

ScalarField divergence(const VectorField& v);

/// Curl of a vector field; one component in 2D, three in 3D (returned as a VectorField in 3D,
/// and as the single z-component stored in a ScalarField in 2D via `curl_2d`).
ScalarField curl_2d(const VectorField& v);
VectorField curl_3d(const VectorField& v);

/// Discrete surrogate of a W^{m,inf} norm.
struct DiscreteNorm {
  int order = 0;
  double value = 0.0;
};

/// Max over nodes of the modulus of the field and every discrete partial derivative of order
/// <= m, taken componentwise. Requires m <= 3.
DiscreteNorm sup_norm(const Field& f, int order);

/// Separable Gaussian smoothing with standard deviation width*h per axis, truncated at four
/// standard deviations and renormalised where the kernel leaves the grid. width == 0 is the identity.
ScalarField mollify(const ScalarField& f, double width);

}  // namespace gaugerec
