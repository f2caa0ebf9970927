#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gaugerec/apps.hpp"
#include "gaugerec/illum.hpp"

namespace gaugerec {

enum class RunMode { Synthesize, Reconstruct, Roundtrip, Qpat, Elasto, Stability };

std::string_view to_string(RunMode m);
RunMode run_mode_from_string(std::string_view s);

struct ExperimentConfig {
  RunMode mode = RunMode::Roundtrip;
  std::string preset = "identity-2d";
  /// Deviation of the identity-2d preset from (Id, 0, 0).
  double amplitude = 0.1;
  /// File-based coefficients (archive paths for a, b, c); overrides the preset when set.
  std::optional<std::filesystem::path> coeff_a, coeff_b, coeff_c;
  /// harmonic | constant_tensor | local_polynomial | cgo_exponential; empty picks the preset's family.
  std::string illumination;
  double cgo_k = 0.0;
  double cgo_epsilon = 0.5;
  /// Retry CGO on a 3x3 (k, eps) grid when the defaults are not admissible.
  bool cgo_fallback = true;
  std::vector<Index3> grids;
  std::vector<double> noise{0.0};
  /// Noise draws per (grid, noise) cell.
  int repeats = 1;
  ReconOptions recon;
  TransportOptions transport;
  /// Inner subdomain used for error norms, as a distance from the faces.
  double margin = 1.0 / 16;
  std::uint64_t seed = 0;
  int threads = 0;
  bool real_data = false;
  double omega = 1.0;
  /// Field archives read by the reconstruct mode.
  std::vector<std::filesystem::path> inputs;
  /// Echo of the parsed document.
  json source;
};

/// Validates and fills defaults. Relative paths are resolved against `base`.
/// Throws ConfigError with a JSON-pointer-like path to the offending field.
ExperimentConfig parse_config(const json& j, const std::filesystem::path& base = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// f + delta * sup|f| * g with g standard complex Gaussian per node (real when `real`).
ScalarField add_noise(const ScalarField& f, double delta, std::uint64_t seed, bool real = false);

/// Seed of an independent stream identified by the given coordinates.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> coords);

/// Least-squares slope of log(y) against log(x); NaN when fewer than two positive points.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Discrete W^{m,infinity} seminorm-inclusive norm over `nodes`: max of the modulus of every
/// component and its centred partial derivatives of order <= m (m in {0, 1}).
double sup_norm_on(const Field& f, int order, const std::vector<std::size_t>& nodes);

/// 64-bit FNV-1a of a file's bytes, as 16 hex digits.
std::string fnv1a_file(const std::filesystem::path& path);

/// Result of one harness run. `admissibility_failed` maps to CLI exit code 2.
struct RunResult {
  json report;
  bool admissibility_failed = false;
  std::vector<std::filesystem::path> outputs;
};

/// Executes the configured mode. When `out` is set, writes the report, any archives and a
/// manifest there. Deterministic given (config, seed) regardless of the thread count.
RunResult run(const ExperimentConfig& cfg, const std::optional<std::filesystem::path>& out = std::nullopt);

/// Preset coefficients on a grid. `gamma` receives the isotropic factor when the preset has one.
CoefficientSet preset_coefficients(const std::string& name, const Grid& grid, ScalarField* gamma = nullptr);
int preset_dimension(const std::string& name);

}  // namespace gaugerec
