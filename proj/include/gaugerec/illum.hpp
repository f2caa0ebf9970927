#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gaugerec/archive.hpp"
#include "gaugerec/forward.hpp"

namespace gaugerec {

enum class IlluminationFamily { Harmonic, ConstantTensor, LocalPolynomial, CgoExponential, Custom };

std::string_view to_string(IlluminationFamily f);
IlluminationFamily illumination_family_from_string(std::string_view s);

/// p(x) = 1/2 Q y.y + rho.y + d with y = x - center.
struct QuadraticPolynomial {
  SmallMat Q;
  SmallVec rho;
  cplx d = 0.0;
  Point center{0, 0, 0};

  cplx operator()(const Point& x) const;
  SmallVec gradient(const Point& x) const;
  /// a0:Q + b0.rho + c0 d, zero when p solves the constant-coefficient equation.
  cplx constraint_residual(const SmallMat& a0, const SmallVec& b0, cplx c0) const;
  ScalarField sample(const Grid& grid) const;
};

struct IlluminationParams {
  std::optional<SmallMat> a0;
  std::optional<SmallVec> b0;
  std::optional<cplx> c0;
  std::optional<double> k;
  std::optional<double> epsilon;
  std::optional<Point> center;
};

struct IlluminationSet {
  std::vector<BoundaryTrace> traces;
  IlluminationFamily family = IlluminationFamily::Custom;
  IlluminationParams params;
  /// Generating polynomials (polynomial families only), one per trace.
  std::vector<QuadraticPolynomial> polynomials;
  /// Exponent vectors (CGO family only), one per trace.
  std::vector<SmallVec> exponents;

  std::size_t size() const { return traces.size(); }
};

/// Traces of 1, x_j, x_i x_j (i<j), (x_i^2 - x_{i+1}^2)/2.
IlluminationSet harmonic_family(const Grid& grid);

/// Basis of the symmetric matrices Q with Tr(a0 Q) = 0: Gram-Schmidt under Tr(A^* B) seeded with
/// conj(a0), then the off-diagonal and diagonal unit matrices. Throws DegenerateTensor if a0 ~ 0.
std::vector<SmallMat> orthogonal_complement_basis(const SmallMat& a0);

IlluminationSet constant_tensor_family(const Grid& grid, const SmallMat& a0);

/// Quadratics solving a0:D^2 p + b0.Dp + c0 p = 0 exactly, centred at `center`.
IlluminationSet local_polynomial_family(const Grid& grid, const SmallMat& a0, const SmallVec& b0, cplx c0,
                                        const Point& center);

/// Exponent vectors in family order: eps^2 rho_12, eps conj(rho_12), eps rho_{j-1,j} (j >= 2),
/// rho_ij (i < j), conj(rho_{j,j+1}). rho_ij = k (e_i + i e_j).
std::vector<SmallVec> cgo_exponents(int dim, double k, double epsilon);

/// Traces of gamma^{-1/2} exp(rho.(x - x_c)) with x_c the centre of the grid box. `gamma` may be null
/// (gamma = 1); only its boundary values are read. k <= 0 selects the default 8 / diam.
IlluminationSet cgo_family(const Grid& grid, const ScalarField* gamma, double k = 0.0, double epsilon = 0.5);

double default_cgo_k(const Grid& grid);

json illumination_to_json(const IlluminationSet& s);
IlluminationSet illumination_from_json(const json& j);

}  // namespace gaugerec
