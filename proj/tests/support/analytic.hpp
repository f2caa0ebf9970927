#pragma once

#include <vector>

#include "gaugerec/forward.hpp"
#include "gaugerec/recon.hpp"

namespace oracle {

using gaugerec::cplx;
using gaugerec::Grid;
using gaugerec::ScalarField;
using gaugerec::SmallMat;
using gaugerec::VectorField;

/// Null vector of the pairing constraints found by SVD over the full n x n matrix space
/// (symmetry imposed as extra equations), scaled so that Tr(X X) = 1 and Re Tr X > 0.
SmallMat brute_force_M0(const std::vector<SmallMat>& M, bool conjugated = false);

/// Potential of g by trapezoidal integration along x1 on the first grid line, then along x2
/// (and x3). Zero at node 0.
ScalarField line_integral_potential(const VectorField& g);

/// tau a with tau = 1/sqrt(sum_ij (s a)_ij (s a)_ji), sign making Re Tr(tau s a) > 0.
SmallMat canonical_tensor(const SmallMat& a, cplx s);

/// Harmonic polynomials 1, x_j, x_i x_j, (x_i^2 - x_{i+1}^2)/2 sampled on the grid.
std::vector<ScalarField> harmonic_polynomials(const Grid& grid);

/// Sup over `nodes` of |f - g|.
double sup_diff(const ScalarField& f, const ScalarField& g, const std::vector<std::size_t>& nodes = {});

/// log2(e_coarse / e_fine)
double order(double coarse, double fine);

}  // namespace oracle
