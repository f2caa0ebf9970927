#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "gaugerec/archive.hpp"
#include "gaugerec/errors.hpp"
#include "gaugerec/forward.hpp"

namespace gaugerec {

/// Pairing used for the orthogonality system defining M0: Tr(AB) or Tr(A conj(B)).
enum class Pairing { Bilinear, Conjugated };

/// U1Normalized: a = M0 / u1^2 for the selected u1. UnitFrobenius: a = M0, i.e. Tr(a a) = 1.
enum class GaugeConvention { U1Normalized, UnitFrobenius };

std::string_view to_string(GaugeConvention c);

struct ReconOptions {
  /// Admissibility floor on |u1|, relative to max |u1| over the whole grid.
  double u1_floor = 1e-3;
  double cond_max = 1e6;
  double indep_min = 1e-8;
  Pairing pairing = Pairing::Bilinear;
  /// Gaussian pre-smoothing of the data in grid spacings; 0 disables it.
  double mollifier_width = 0.0;
  /// Also recover b alone (one more discrete derivative).
  bool compute_b = true;
  /// Patch size in nodes per axis; 0 means the whole axis.
  Index3 patch_shape{0, 0, 0};
  /// Nodes shared by neighbouring patches.
  int overlap = 4;
};

/// v_j = u_{j+1} / u_1 and their derivatives. u_1 itself is kept for the final recovery.
struct RatioBundle {
  ScalarField u1;
  VectorField grad_u1;
  SymTensorField hess_u1;
  std::vector<ScalarField> v;
  std::vector<VectorField> grad_v;
  std::vector<SymTensorField> hess_v;

  const Grid& grid() const { return u1.grid(); }
  std::size_t size() const { return v.size(); }
};

/// Ratios of every field to u[u1_index] (which is skipped). Throws VanishingU1 where |u1| < floor.
RatioBundle build_ratios(const std::vector<ScalarField>& u, double floor, std::size_t u1_index = 0);

/// Bundle for data that already are ratios (u1 = 1).
RatioBundle ratios_from_quotients(std::vector<ScalarField> v);

/// H_ij = grad v_i . grad v_j (no conjugation) for the ratios listed in `indices`.
struct FrameData {
  std::vector<int> indices;
  std::vector<SmallMat> H;
  std::vector<SmallMat> Hinv;
  std::vector<double> cond;

  double max_cond() const;
};

/// Frame diagnostics without admissibility checks. Empty `indices` selects the first n ratios.
FrameData evaluate_frame(const RatioBundle& rb, std::vector<int> indices = {});
/// Throws FrameDegenerate listing the nodes where cond > cond_max.
FrameData build_frame(const RatioBundle& rb, double cond_max = 1e6, std::vector<int> indices = {});

struct MBundle {
  /// Ratio index generating each M^m.
  std::vector<int> indices;
  /// Theta[m](node, k): coefficient of grad v_{frame[k]} in -grad v_{indices[m]}.
  std::vector<VectorField> Theta;
  std::vector<SymTensorField> M;
  SymTensorField M0;
  /// Smallest singular value of {Id, M^1, ...} (each scaled to unit Frobenius norm).
  std::vector<double> indep;

  /// Extended coefficients over all ratios: Theta on the frame, 1 at indices[m], 0 elsewhere.
  std::vector<cplx> theta(std::size_t m, std::size_t node, const FrameData& fr, std::size_t nratios) const;
};

/// M^m for one ratio index, with its Theta coefficients.
SymTensorField build_single_M(const RatioBundle& rb, const FrameData& fr, int index, VectorField* theta = nullptr);

/// Pointwise smallest singular value of the normalized family {Id, M^m}.
std::vector<double> independence(const std::vector<const SymTensorField*>& M);

/// Solves the pairing system for M0 given the M^m (no admissibility check).
SymTensorField solve_M0(const std::vector<const SymTensorField*>& M, Pairing pairing);

/// Empty `indices` uses every ratio outside the frame, in order. Throws MDependent where
/// indep < opts.indep_min.
MBundle build_M(const RatioBundle& rb, const FrameData& fr, const ReconOptions& opts = {},
                std::vector<int> indices = {});

struct ReconDiagnostics {
  std::vector<double> cond;
  std::vector<double> indep;
  /// max_j |alpha : D^2 v_j + beta . grad v_j| over the ratios used.
  std::vector<double> residual;
};

/// Gauge-class representative (a, b + div a, c), plus b alone when requested.
struct ClassRepresentative {
  SymTensorField a;
  VectorField b_plus_diva;
  ScalarField c;
  std::optional<VectorField> b;
  SymTensorField alpha;
  VectorField beta;
  ScalarField u1;
  GaugeConvention convention = GaugeConvention::U1Normalized;
  ReconDiagnostics diagnostics;

  const Grid& grid() const { return a.grid(); }
};

ClassRepresentative reconstruct_class(const MBundle& mb, const RatioBundle& rb, const FrameData& fr,
                                      const ReconOptions& opts = {});

/// b = (b + div a) - discrete div a.
void attach_b(ClassRepresentative& rep);

/// Multiplies (a, b + div a, c) by u1^2 so that a = M0.
ClassRepresentative to_unit_frobenius(const ClassRepresentative& rep, bool compute_b = true);

/// Multiplies the representative by a gauge factor. b is recomputed when present.
void scale_representative(ClassRepresentative& rep, cplx s);

/// True coefficients mapped into the representative's gauge: tau = 1/sqrt(Tr((s a)^2)) with
/// s = u1^2 (U1Normalized) or 1, sign chosen so that Re Tr(tau s a) > 0. b uses the discrete grad tau.
ClassRepresentative canonical_truth(const CoefficientSet& truth, GaugeConvention convention,
                                    const ScalarField* u1 = nullptr);

struct ClassError {
  double a = 0.0;
  double b_plus_diva = 0.0;
  double c = 0.0;
  double b = 0.0;
  /// sup norm of the true triple (a, b + div a, c)
  double scale = 0.0;

  double relative() const { return std::max({a, b_plus_diva, c}) / scale; }
  double relative_b() const { return b / scale; }
  json to_json() const;
};

/// Sup-norm errors over `nodes` (all nodes when empty).
ClassError compare(const ClassRepresentative& rep, const ClassRepresentative& truth,
                   const std::vector<std::size_t>& nodes = {});

// ---------------------------------------------------------------------------
// Patch-wise reconstruction

struct PatchInfo {
  IndexBox box;
  bool admissible = false;
  /// Data indices of the selected u1, frame and M-generating fields.
  int u1 = -1;
  std::vector<int> frame;
  std::vector<int> extra;
  double score = 0.0;
  int sign = 1;
  std::string reason;
};

struct PatchMap {
  std::vector<PatchInfo> patches;
  std::vector<std::size_t> uncovered;
  GaugeConvention convention = GaugeConvention::U1Normalized;

  bool complete() const { return uncovered.empty(); }
  json to_json() const;
};

struct GlobalReconstruction {
  ClassRepresentative rep;
  PatchMap map;
};

/// Some nodes are not covered by an admissible patch. Carries the partial reconstruction.
class CoverageFailure : public AdmissibilityError {
 public:
  CoverageFailure(std::vector<std::size_t> nodes, std::shared_ptr<const GlobalReconstruction> partial)
      : AdmissibilityError("no admissible patch covers part of the grid", std::move(nodes)),
        partial_(std::move(partial)) {}
  const GlobalReconstruction& partial() const { return *partial_; }

 private:
  std::shared_ptr<const GlobalReconstruction> partial_;
};

/// Overlapping index boxes tiling the grid.
std::vector<IndexBox> make_patches(const Grid& grid, const Index3& shape, int overlap);

struct PatchResult {
  IndexBox box;
  ClassRepresentative rep;
};

/// Aligns the M0 sign of each patch with its already-aligned neighbours (largest overlap
/// correlation), then blends with partition-of-unity weights. Returns the sign applied to each patch.
ClassRepresentative stitch(const Grid& grid, std::vector<PatchResult> patches, int overlap,
                           std::vector<int>* signs = nullptr);

/// Selects, per patch, the u1 candidate, frame and M-generating fields maximizing
/// min(|u1| margin * 1/cond * indep), reconstructs, aligns and stitches.
/// Throws CoverageFailure when some node has no admissible patch.
GlobalReconstruction reconstruct_global(const std::vector<ScalarField>& u, const ReconOptions& opts = {});

}  // namespace gaugerec
