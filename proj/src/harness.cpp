#include "gaugerec/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <iomanip>
#include <limits>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "gaugerec/calculus.hpp"
#include "gaugerec/presets.hpp"

#ifndef GAUGEREC_VERSION
#define GAUGEREC_VERSION "unknown"
#endif

namespace gaugerec {

namespace fs = std::filesystem;

std::string_view to_string(RunMode m) {
  switch (m) {
    case RunMode::Synthesize: return "synthesize";
    case RunMode::Reconstruct: return "reconstruct";
    case RunMode::Roundtrip: return "roundtrip";
    case RunMode::Qpat: return "qpat";
    case RunMode::Elasto: return "elasto";
    case RunMode::Stability: return "stability";
  }
  return "roundtrip";
}

RunMode run_mode_from_string(std::string_view s) {
  for (auto m : {RunMode::Synthesize, RunMode::Reconstruct, RunMode::Roundtrip, RunMode::Qpat, RunMode::Elasto,
                 RunMode::Stability})
    if (to_string(m) == s) return m;
  throw std::invalid_argument("unknown mode '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "/" : path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string at(const std::string& key) const { return path_ + "/" + key; }
  const json& raw(const std::string& key) const { return j_.at(key); }

  void only(std::initializer_list<const char*> keys) const {
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j_.items())
      if (!allowed.count(k)) throw ConfigError(at(k), "unknown key");
  }

  double number(const std::string& key, double def, double lo = -std::numeric_limits<double>::infinity(),
                bool lo_strict = false) const {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(at(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x) || x < lo || (lo_strict && x == lo))
      throw ConfigError(at(key), "value out of range");
    return x;
  }

  long long integer(const std::string& key, long long def, long long lo) const {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(at(key), "expected an integer");
    const long long x = v.get<long long>();
    if (x < lo) throw ConfigError(at(key), "value out of range");
    return x;
  }

  std::string string(const std::string& key, const std::string& def) const {
    if (!has(key)) return def;
    if (!j_.at(key).is_string()) throw ConfigError(at(key), "expected a string");
    return j_.at(key).get<std::string>();
  }

  bool boolean(const std::string& key, bool def) const {
    if (!has(key)) return def;
    if (!j_.at(key).is_boolean()) throw ConfigError(at(key), "expected a boolean");
    return j_.at(key).get<bool>();
  }

 private:
  const json& j_;
  std::string path_;
};

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path q(p);
  return q.is_absolute() || base.empty() ? q : base / q;
}

Index3 parse_shape(const json& v, int dim, const std::string& path) {
  Index3 s{1, 1, 1};
  if (v.is_number_integer()) {
    for (int a = 0; a < dim; ++a) s[a] = v.get<int>();
  } else if (v.is_array() && static_cast<int>(v.size()) == dim) {
    for (int a = 0; a < dim; ++a) {
      if (!v[a].is_number_integer()) throw ConfigError(path + "/" + std::to_string(a), "expected an integer");
      s[a] = v[a].get<int>();
    }
  } else {
    throw ConfigError(path, "expected an integer or an array of " + std::to_string(dim) + " integers");
  }
  for (int a = 0; a < dim; ++a)
    if (s[a] < 5) throw ConfigError(path, "grids need at least 5 nodes per axis");
  return s;
}

}  // namespace

int preset_dimension(const std::string& name) { return name == "constant-tensor-3d" ? 3 : 2; }

CoefficientSet preset_coefficients(const std::string& name, const Grid& grid, ScalarField* gamma) {
  if (name == "identity-2d") return near_identity_coefficients(grid, 0.1);
  if (name == "constant-tensor-2d" || name == "constant-tensor-3d")
    return constant_tensor_coefficients(grid, demo_constant_tensor(grid.dim()));
  if (name == "isotropic-c") return isotropic_c_coefficients(grid, gamma);
  if (name == "qpat-demo") return qpat_forward_coefficients(qpat_demo_truth(grid));
  if (name == "elasto-demo") return elasto_forward_coefficients(elasto_demo_truth(grid));
  throw std::invalid_argument("unknown preset '" + name + "'");
}

ExperimentConfig parse_config(const json& j, const fs::path& base) {
  const Reader r(j, "");
  r.only({"mode", "preset", "amplitude", "coefficients", "illumination", "grids", "noise", "repeats",
          "mollifier_width", "thresholds", "pairing", "patch", "margin", "seed", "threads", "real_data", "omega",
          "inputs"});
  ExperimentConfig c;
  c.source = j;
  try {
    c.mode = run_mode_from_string(r.string("mode", "roundtrip"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(r.at("mode"), e.what());
  }

  const std::string default_preset =
      c.mode == RunMode::Qpat ? "qpat-demo" : c.mode == RunMode::Elasto ? "elasto-demo" : "identity-2d";
  c.preset = r.string("preset", default_preset);
  const auto& names = preset_names();
  if (std::find(names.begin(), names.end(), c.preset) == names.end())
    throw ConfigError(r.at("preset"), "unknown preset '" + c.preset + "'");
  if (c.mode == RunMode::Qpat && c.preset != "qpat-demo")
    throw ConfigError(r.at("preset"), "qpat mode runs the qpat-demo preset");
  if (c.mode == RunMode::Elasto && c.preset != "elasto-demo")
    throw ConfigError(r.at("preset"), "elasto mode runs the elasto-demo preset");
  c.amplitude = r.number("amplitude", 0.1, 0.0);

  int dim = preset_dimension(c.preset);
  if (r.has("coefficients")) {
    const Reader cr(r.raw("coefficients"), "/coefficients");
    cr.only({"a", "b", "c"});
    for (const char* k : {"a", "b", "c"})
      if (!cr.has(k)) throw ConfigError(cr.at(k), "missing archive path");
    c.coeff_a = resolve(base, cr.string("a", ""));
    c.coeff_b = resolve(base, cr.string("b", ""));
    c.coeff_c = resolve(base, cr.string("c", ""));
    if (r.has("grids")) throw ConfigError(r.at("grids"), "file-based coefficients fix the grid");
  }

  if (r.has("illumination")) {
    const Reader ir(r.raw("illumination"), "/illumination");
    ir.only({"family", "k", "epsilon", "fallback"});
    c.illumination = ir.string("family", "");
    if (!c.illumination.empty()) {
      try {
        const auto f = illumination_family_from_string(c.illumination);
        if (f == IlluminationFamily::Custom) throw std::invalid_argument("custom traces are not generated");
      } catch (const std::invalid_argument& e) {
        throw ConfigError(ir.at("family"), e.what());
      }
    }
    c.cgo_k = ir.number("k", 0.0, 0.0);
    c.cgo_epsilon = ir.number("epsilon", 0.5, 0.0, true);
    c.cgo_fallback = ir.boolean("fallback", true);
  }

  if (r.has("grids")) {
    const json& g = r.raw("grids");
    if (!g.is_array() || g.empty()) throw ConfigError(r.at("grids"), "expected a non-empty array");
    for (std::size_t i = 0; i < g.size(); ++i)
      c.grids.push_back(parse_shape(g[i], dim, r.at("grids") + "/" + std::to_string(i)));
  } else if (!c.coeff_a) {
    if (dim == 3)
      c.grids = {{11, 11, 11}, {21, 21, 21}};
    else
      c.grids = {{33, 33, 1}, {65, 65, 1}, {129, 129, 1}};
  }
  const bool ladder = c.mode == RunMode::Roundtrip || c.mode == RunMode::Stability || c.mode == RunMode::Qpat ||
                      c.mode == RunMode::Elasto;
  if (ladder)
    for (std::size_t i = 1; i < c.grids.size(); ++i)
      for (int a = 0; a < dim; ++a)
        if (c.grids[i][a] - 1 != 2 * (c.grids[i - 1][a] - 1))
          throw ConfigError(r.at("grids") + "/" + std::to_string(i), "grids must be dyadically nested");

  if (r.has("noise")) {
    const json& n = r.raw("noise");
    if (!n.is_array() || n.empty()) throw ConfigError(r.at("noise"), "expected a non-empty array");
    c.noise.clear();
    for (std::size_t i = 0; i < n.size(); ++i) {
      if (!n[i].is_number() || n[i].get<double>() < 0.0)
        throw ConfigError(r.at("noise") + "/" + std::to_string(i), "expected a non-negative number");
      c.noise.push_back(n[i].get<double>());
    }
  }
  c.repeats = static_cast<int>(r.integer("repeats", 1, 1));
  c.recon.mollifier_width = r.number("mollifier_width", 0.0, 0.0);

  if (r.has("thresholds")) {
    const Reader tr(r.raw("thresholds"), "/thresholds");
    tr.only({"u1_floor", "cond_max", "indep_min", "curl_threshold", "curl_margin"});
    c.recon.u1_floor = tr.number("u1_floor", c.recon.u1_floor, 0.0);
    c.recon.cond_max = tr.number("cond_max", c.recon.cond_max, 1.0);
    c.recon.indep_min = tr.number("indep_min", c.recon.indep_min, 0.0);
    c.transport.curl_threshold = tr.number("curl_threshold", c.transport.curl_threshold, 0.0, true);
    c.transport.margin = tr.number("curl_margin", c.transport.margin, 0.0);
  }
  const std::string pairing = r.string("pairing", "bilinear");
  if (pairing == "bilinear")
    c.recon.pairing = Pairing::Bilinear;
  else if (pairing == "conjugated")
    c.recon.pairing = Pairing::Conjugated;
  else
    throw ConfigError(r.at("pairing"), "expected 'bilinear' or 'conjugated'");

  if (r.has("patch")) {
    const Reader pr(r.raw("patch"), "/patch");
    pr.only({"shape", "overlap"});
    if (pr.has("shape")) c.recon.patch_shape = parse_shape(pr.raw("shape"), dim, pr.at("shape"));
    c.recon.overlap = static_cast<int>(pr.integer("overlap", c.recon.overlap, 1));
  }
  c.margin = r.number("margin", c.margin, 0.0);
  if (c.margin >= 0.5) throw ConfigError(r.at("margin"), "margin leaves no interior");
  if (r.has("seed")) {
    const json& s = r.raw("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      throw ConfigError(r.at("seed"), "expected a non-negative integer");
    c.seed = s.get<std::uint64_t>();
  }
  c.threads = static_cast<int>(r.integer("threads", 0, 0));
  c.real_data = r.boolean("real_data", false);
  c.omega = r.number("omega", 1.0, 0.0, true);

  if (r.has("inputs")) {
    const json& in = r.raw("inputs");
    if (!in.is_array()) throw ConfigError(r.at("inputs"), "expected an array of paths");
    for (std::size_t i = 0; i < in.size(); ++i) {
      if (!in[i].is_string()) throw ConfigError(r.at("inputs") + "/" + std::to_string(i), "expected a path");
      c.inputs.push_back(resolve(base, in[i].get<std::string>()));
    }
  }
  if (c.mode == RunMode::Reconstruct && c.inputs.empty())
    throw ConfigError(r.at("inputs"), "reconstruct mode needs field archives");

  if (c.real_data) {
    const bool cgo = c.illumination == "cgo_exponential" || (c.illumination.empty() && c.preset == "isotropic-c");
    if (cgo) throw ConfigError(r.at("real_data"), "CGO traces are complex");
  }
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  json j;
  try {
    j = read_json(path);
  } catch (const std::exception& e) {
    throw ConfigError("/", std::string("cannot read config: ") + e.what());
  }
  return parse_config(j, path.parent_path());
}

// ---------------------------------------------------------------------------
// Numerics shared by the modes

ScalarField add_noise(const ScalarField& f, double delta, std::uint64_t seed, bool real) {
  if (delta < 0.0) throw std::invalid_argument("noise level must be non-negative");
  ScalarField out = f;
  if (delta == 0.0) return out;
  std::mt19937_64 rng(seed);
  const double s = delta * f.max_abs();
  if (real) {
    std::normal_distribution<double> n(0.0, 1.0);
    for (auto& z : out.data()) z += s * n(rng);
  } else {
    // standard complex Gaussian: E|g|^2 = 1
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    for (auto& z : out.data()) {
      const double re = n(rng);
      z += s * cplx(re, n(rng));
    }
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> coords) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  for (std::uint64_t c : coords) {
    words.push_back(static_cast<std::uint32_t>(c));
    words.push_back(static_cast<std::uint32_t>(c >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i)
    if (x[i] > 0.0 && y[i] > 0.0) lx.push_back(std::log(x[i])), ly.push_back(std::log(y[i]));
  if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
  mx /= static_cast<double>(lx.size());
  my /= static_cast<double>(lx.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) sxy += (lx[i] - mx) * (ly[i] - my), sxx += (lx[i] - mx) * (lx[i] - mx);
  return sxy / sxx;
}

double sup_norm_on(const Field& f, int order, const std::vector<std::size_t>& nodes) {
  if (order < 0 || order > 1) throw std::invalid_argument("sup_norm_on supports orders 0 and 1");
  const Grid& g = f.grid();
  double m = 0.0;
  for (std::size_t k : nodes)
    for (int c = 0; c < f.components(); ++c) m = std::max(m, std::abs(f.component(k, c)));
  if (order == 0) return m;
  for (int c = 0; c < f.components(); ++c) {
    ScalarField comp(g);
    for (std::size_t k = 0; k < g.size(); ++k) comp[k] = f.component(k, c);
    for (int a = 0; a < g.dim(); ++a) {
      const ScalarField d = partial(comp, a);
      for (std::size_t k : nodes) m = std::max(m, std::abs(d[k]));
    }
  }
  return m;
}

std::string fnv1a_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 14];
  while (is) {
    is.read(buf, sizeof buf);
    for (std::streamsize i = 0; i < is.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

// ---------------------------------------------------------------------------
// Runs

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <class F>
F minus(const F& x, const F& y) {
  std::vector<cplx> v(x.data().begin(), x.data().end());
  const auto yd = y.data();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= yd[i];
  return F(x.grid(), std::move(v));
}

template <class F>
F real_part(const F& x) {
  std::vector<cplx> v(x.data().begin(), x.data().end());
  for (auto& z : v) z = z.real();
  return F(x.grid(), std::move(v));
}

json shape_json(const Grid& g) {
  json s = json::array();
  for (int a = 0; a < g.dim(); ++a) s.push_back(g.shape()[a]);
  return s;
}

std::string shape_tag(const Grid& g) {
  std::string t;
  for (int a = 0; a < g.dim(); ++a) t += (a ? "x" : "") + std::to_string(g.shape()[a]);
  return t;
}

/// Sup errors of (a, b + div a, c) and b in W^{order,inf} over `nodes`, relative to the truth triple.
json class_errors(const ClassRepresentative& rep, const ClassRepresentative& truth,
                  const std::vector<std::size_t>& nodes, int order) {
  const double scale = std::max({sup_norm_on(truth.a, order, nodes), sup_norm_on(truth.b_plus_diva, order, nodes),
                                 sup_norm_on(truth.c, order, nodes)});
  const double ea = sup_norm_on(minus(rep.a, truth.a), order, nodes);
  const double ebd = sup_norm_on(minus(rep.b_plus_diva, truth.b_plus_diva), order, nodes);
  const double ec = sup_norm_on(minus(rep.c, truth.c), order, nodes);
  json e{{"order", order},
         {"convention", std::string(to_string(rep.convention))},
         {"a", ea},
         {"b_plus_diva", ebd},
         {"c", ec},
         {"scale", scale},
         {"relative", std::max({ea, ebd, ec}) / scale}};
  if (rep.b && truth.b) {
    const double eb = sup_norm_on(minus(*rep.b, *truth.b), order, nodes);
    e["b"] = eb;
    e["relative_b"] = eb / scale;
  }
  return e;
}

double relative_on(const Field& f, const Field& ref, int order, const std::vector<std::size_t>& nodes) {
  std::vector<cplx> d(f.data().begin(), f.data().end());
  const auto r = ref.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] -= r[i];
  double num = 0.0;
  if (f.kind() == FieldKind::Scalar)
    num = sup_norm_on(ScalarField(f.grid(), std::move(d)), order, nodes);
  else if (f.kind() == FieldKind::Vector)
    num = sup_norm_on(VectorField(f.grid(), std::move(d)), order, nodes);
  else
    num = sup_norm_on(SymTensorField(f.grid(), std::move(d)), order, nodes);
  return num / sup_norm_on(ref, order, nodes);
}

json admissibility_json(const GlobalReconstruction& gr) {
  double cond = 0.0, indep = std::numeric_limits<double>::infinity();
  for (double c : gr.rep.diagnostics.cond) cond = std::max(cond, c);
  for (double v : gr.rep.diagnostics.indep) indep = std::min(indep, v);
  return {{"patches", gr.map.patches.size()},
          {"complete", gr.map.complete()},
          {"uncovered", gr.map.uncovered.size()},
          {"cond_max", cond},
          {"indep_min", std::isfinite(indep) ? indep : 0.0}};
}

double max_imag_rep(const ClassRepresentative& rep) {
  double m = std::max({rep.a.max_imag(), rep.b_plus_diva.max_imag(), rep.c.max_imag(), rep.alpha.max_imag(),
                       rep.beta.max_imag()});
  if (rep.b) m = std::max(m, rep.b->max_imag());
  return m;
}

/// Runs `fn(i)` for i in [0, n) on up to `threads` workers (0: hardware concurrency).
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  std::size_t t = threads > 0 ? static_cast<std::size_t>(threads) : std::max(1u, std::thread::hardware_concurrency());
  t = std::min(t, n);
  if (t <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> workers;
  for (std::size_t w = 0; w < t; ++w)
    workers.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    }));
  // get() rethrows the first worker failure after all workers finished
  std::exception_ptr first;
  for (auto& w : workers) {
    try {
      w.get();
    } catch (...) {
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
}

/// Coefficients, illuminations and clean data on one grid.
struct Problem {
  Grid grid;
  CoefficientSet coeffs;
  ScalarField gamma;
  bool has_gamma = false;
  IlluminationSet illum;
  std::vector<ScalarField> u;
  json illum_report;
};

std::string natural_family(const std::string& preset) {
  if (preset == "isotropic-c") return "cgo_exponential";
  if (preset == "constant-tensor-2d" || preset == "constant-tensor-3d") return "constant_tensor";
  return "harmonic";
}

CoefficientSet load_coefficients(const ExperimentConfig& cfg) {
  SymTensorField a = read_symtensor_archive(*cfg.coeff_a);
  VectorField b = read_vector_archive(*cfg.coeff_b);
  ScalarField c = read_scalar_archive(*cfg.coeff_c);
  if (b.grid() != a.grid() || c.grid() != a.grid())
    throw ConfigError("/coefficients", "coefficient archives live on different grids");
  return CoefficientSet::with_discrete_divergence(std::move(a), std::move(b), std::move(c));
}

std::size_t centre_node(const Grid& g) {
  Index3 idx{0, 0, 0};
  for (int a = 0; a < g.dim(); ++a) idx[a] = g.shape()[a] / 2;
  return g.node(idx);
}

IlluminationSet make_illumination(const std::string& family, const Problem& p, double k, double eps) {
  const Grid& g = p.grid;
  const std::size_t k0 = centre_node(g);
  switch (illumination_family_from_string(family)) {
    case IlluminationFamily::Harmonic: return harmonic_family(g);
    case IlluminationFamily::ConstantTensor: return constant_tensor_family(g, p.coeffs.a.at(k0));
    case IlluminationFamily::LocalPolynomial:
      return local_polynomial_family(g, p.coeffs.a.at(k0), p.coeffs.b.at(k0), p.coeffs.c[k0], g.coord(k0));
    case IlluminationFamily::CgoExponential: return cgo_family(g, p.has_gamma ? &p.gamma : nullptr, k, eps);
    case IlluminationFamily::Custom: break;
  }
  throw std::invalid_argument("family '" + family + "' cannot be generated");
}

Problem make_problem(const ExperimentConfig& cfg, const Index3* shape) {
  Problem p;
  if (cfg.coeff_a) {
    p.coeffs = load_coefficients(cfg);
    p.grid = p.coeffs.grid();
  } else {
    const int dim = preset_dimension(cfg.preset);
    p.grid = Grid(dim, {0, 0, 0}, {1, 1, 1}, *shape);
    if (cfg.preset == "identity-2d")
      p.coeffs = near_identity_coefficients(p.grid, cfg.amplitude);
    else
      p.coeffs = preset_coefficients(cfg.preset, p.grid, &p.gamma);
    p.has_gamma = cfg.preset == "isotropic-c";
  }
  if (cfg.real_data)
    p.coeffs = CoefficientSet{real_part(p.coeffs.a), real_part(p.coeffs.b), real_part(p.coeffs.c),
                              real_part(p.coeffs.diva)};

  const std::string family = cfg.illumination.empty() ? natural_family(cfg.preset) : cfg.illumination;
  const bool cgo = family == "cgo_exponential";
  const double k0 = cfg.cgo_k > 0.0 ? cfg.cgo_k : default_cgo_k(p.grid);

  auto attempt = [&](double k, double eps) {
    p.illum = make_illumination(family, p, k, eps);
    p.u = synthesize(p.coeffs, p.illum.traces);
  };
  attempt(k0, cfg.cgo_epsilon);
  p.illum_report = {{"family", std::string(to_string(p.illum.family))}, {"fields", p.illum.size()}};
  if (cgo) {
    p.illum_report["k"] = k0;
    p.illum_report["epsilon"] = cfg.cgo_epsilon;
  }
  if (cgo && cfg.cgo_fallback) {
    // admissibility of the clean data decides whether the (k, eps) search is needed
    json search = json::array();
    auto admissible = [&]() {
      try {
        reconstruct_global(p.u, cfg.recon);
        return true;
      } catch (const AdmissibilityError&) {
        return false;
      }
    };
    bool ok = admissible();
    search.push_back({{"k", k0}, {"epsilon", cfg.cgo_epsilon}, {"admissible", ok}});
    for (double km : {0.5, 1.0, 2.0}) {
      for (double eps : {0.25, 0.5, 0.75}) {
        if (ok) break;
        if (km == 1.0 && eps == cfg.cgo_epsilon) continue;
        attempt(km * k0, eps);
        ok = admissible();
        search.push_back({{"k", km * k0}, {"epsilon", eps}, {"admissible", ok}});
        if (ok) p.illum_report["k"] = km * k0, p.illum_report["epsilon"] = eps;
      }
    }
    p.illum_report["search"] = search;
    p.illum_report["admissible"] = ok;
  }
  return p;
}

std::vector<ScalarField> noisy_fields(const std::vector<ScalarField>& u, double delta, std::uint64_t seed,
                                      std::size_t gi, std::size_t ni, int rep, bool real) {
  std::vector<ScalarField> out;
  for (std::size_t j = 0; j < u.size(); ++j)
    out.push_back(add_noise(u[j], delta, derive_seed(seed, {gi, ni, static_cast<std::uint64_t>(rep), j}), real));
  return out;
}

struct Cell {
  std::size_t grid_index = 0;
  std::size_t noise_index = 0;
  int repeat = 0;
};

std::vector<Cell> make_cells(const ExperimentConfig& cfg, std::size_t ngrids) {
  std::vector<Cell> cells;
  for (std::size_t g = 0; g < ngrids; ++g)
    for (std::size_t n = 0; n < cfg.noise.size(); ++n)
      for (int r = 0; r < (cfg.noise[n] > 0.0 ? cfg.repeats : 1); ++r) cells.push_back({g, n, r});
  return cells;
}

std::vector<std::size_t> eval_nodes(const Grid& g, double margin) {
  auto n = g.nodes_with_margin(margin);
  return n.empty() ? g.interior_nodes() : n;
}

struct CellResult {
  json entry;
  double seconds = 0.0;
  bool admissibility_failed = false;
  std::optional<ClassRepresentative> unit_rep;
};

CellResult roundtrip_cell(const ExperimentConfig& cfg, const Problem& p, const Cell& c) {
  const auto t0 = Clock::now();
  CellResult out;
  const double delta = cfg.noise[c.noise_index];
  json& e = out.entry;
  e = {{"grid", shape_json(p.grid)}, {"noise", delta}, {"repeat", c.repeat}};
  if (delta > 0.0)
    e["seed"] = derive_seed(cfg.seed, {c.grid_index, c.noise_index, static_cast<std::uint64_t>(c.repeat), 0});
  const auto u = noisy_fields(p.u, delta, cfg.seed, c.grid_index, c.noise_index, c.repeat, cfg.real_data);
  GlobalReconstruction gr;
  try {
    gr = reconstruct_global(u, cfg.recon);
  } catch (const CoverageFailure& f) {
    out.admissibility_failed = true;
    e["status"] = "admissibility_failure";
    e["error"] = f.what();
    e["admissibility"] = admissibility_json(f.partial());
    out.seconds = seconds_since(t0);
    return out;
  } catch (const AdmissibilityError& f) {
    out.admissibility_failed = true;
    e["status"] = "admissibility_failure";
    e["error"] = f.what();
    e["offending_nodes"] = f.nodes().size();
    out.seconds = seconds_since(t0);
    return out;
  }
  e["status"] = "ok";
  e["admissibility"] = admissibility_json(gr);
  const ClassRepresentative& rep = gr.rep;
  const ClassRepresentative truth = canonical_truth(p.coeffs, rep.convention, &rep.u1);
  const auto nodes = eval_nodes(p.grid, cfg.margin);
  e["margin"] = cfg.margin;
  e["errors"] = {{"W0", class_errors(rep, truth, nodes, 0)}, {"W1", class_errors(rep, truth, nodes, 1)}};
  e["errors_all_interior"] = class_errors(rep, truth, p.grid.interior_nodes(), 0);

  const ClassRepresentative unit = to_unit_frobenius(rep, false);
  const ClassRepresentative unit_truth = canonical_truth(p.coeffs, GaugeConvention::UnitFrobenius);
  e["M0_error"] = {{"order", 0},
                   {"convention", std::string(to_string(GaugeConvention::UnitFrobenius))},
                   {"relative", relative_on(unit.a, unit_truth.a, 0, nodes)}};
  out.unit_rep = unit;
  if (cfg.real_data) e["max_imag"] = max_imag_rep(rep);

  if (p.coeffs.b.max_abs() == 0.0) {
    // classes with a zero-drift member: recover the gauge factor by transport
    json t{{"convention", std::string(to_string(rep.convention))}};
    try {
      const TauRecovery tr =
          recover_tau_b_zero(rep, tensor_anchor(rep.a, boundary_tensor(p.coeffs.a)), cfg.transport);
      ScalarField tau_true(p.grid);
      for (std::size_t k = 0; k < p.grid.size(); ++k) tau_true[k] = p.coeffs.a.at(k).trace() / truth.a.at(k).trace();
      t["W0"] = relative_on(tr.tau, tau_true, 0, nodes);
      t["W1"] = relative_on(tr.tau, tau_true, 1, nodes);
      t["curl_residual"] = tr.curl_residual;
      t["anchor_mismatch"] = tr.anchor_mismatch;
      t["status"] = "ok";
    } catch (const NonIntegrableField& f) {
      t["status"] = "non_integrable";
      t["curl_residual"] = f.curl_residual();
    }
    e["tau"] = t;
  }
  out.seconds = seconds_since(t0);
  return out;
}

double rel_error(const json& cell) {
  return cell.contains("errors") ? cell["errors"]["W0"]["relative"].get<double>()
                                 : std::numeric_limits<double>::quiet_NaN();
}

void write_text(const fs::path& path, const std::string& s, std::vector<fs::path>& outputs) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << s;
  outputs.push_back(path);
}

void write_field(const fs::path& path, const Field& f, std::vector<fs::path>& outputs) {
  write_archive(path, f);
  outputs.push_back(path);
}

void write_representative(const fs::path& dir, const GlobalReconstruction& gr, std::vector<fs::path>& outputs) {
  fs::create_directories(dir);
  write_field(dir / "rep_a.json", gr.rep.a, outputs);
  write_field(dir / "rep_b_plus_diva.json", gr.rep.b_plus_diva, outputs);
  write_field(dir / "rep_c.json", gr.rep.c, outputs);
  if (gr.rep.b) write_field(dir / "rep_b.json", *gr.rep.b, outputs);
  write_json(dir / "patch_map.json", gr.map.to_json());
  outputs.push_back(dir / "patch_map.json");
  std::ostringstream csv;
  csv << "node,cond,indep,residual\n" << std::setprecision(15);
  const auto& d = gr.rep.diagnostics;
  for (std::size_t k = 0; k < gr.rep.grid().size(); ++k)
    csv << k << ',' << (k < d.cond.size() ? d.cond[k] : 0.0) << ',' << (k < d.indep.size() ? d.indep[k] : 0.0)
        << ',' << (k < d.residual.size() ? d.residual[k] : 0.0) << '\n';
  write_text(dir / "diagnostics.csv", csv.str(), outputs);
}

// ---- modes ----

RunResult run_synthesize(const ExperimentConfig& cfg, const std::optional<fs::path>& out) {
  RunResult res;
  const std::size_t ng = cfg.coeff_a ? 1 : cfg.grids.size();
  std::vector<Problem> problems(ng);
  parallel_for(ng, cfg.threads, [&](std::size_t i) { problems[i] = make_problem(cfg, cfg.coeff_a ? nullptr : &cfg.grids[i]); });
  json grids = json::array();
  for (std::size_t i = 0; i < ng; ++i) {
    const Problem& p = problems[i];
    json entry{{"grid", shape_json(p.grid)}, {"illumination", p.illum_report}, {"files", json::array()}};
    if (out) {
      const fs::path dir = *out / ("grid_" + shape_tag(p.grid));
      fs::create_directories(dir);
      write_field(dir / "a.json", p.coeffs.a, res.outputs);
      write_field(dir / "b.json", p.coeffs.b, res.outputs);
      write_field(dir / "c.json", p.coeffs.c, res.outputs);
      write_field(dir / "diva.json", p.coeffs.diva, res.outputs);
      write_json(dir / "illumination.json", illumination_to_json(p.illum));
      res.outputs.push_back(dir / "illumination.json");
      for (std::size_t ni = 0; ni < cfg.noise.size(); ++ni) {
        const double delta = cfg.noise[ni];
        const auto u = noisy_fields(p.u, delta, cfg.seed, i, ni, 0, cfg.real_data);
        for (std::size_t j = 0; j < u.size(); ++j) {
          std::string name = "u" + std::to_string(j + 1);
          if (delta > 0.0) name += "_noise" + std::to_string(ni);
          write_field(dir / (name + ".json"), u[j], res.outputs);
          entry["files"].push_back((fs::path("grid_" + shape_tag(p.grid)) / (name + ".json")).string());
        }
      }
    }
    grids.push_back(entry);
  }
  res.report = {{"grids", grids}, {"noise", cfg.noise}};
  return res;
}

RunResult run_reconstruct(const ExperimentConfig& cfg, const std::optional<fs::path>& out) {
  RunResult res;
  std::vector<ScalarField> u;
  for (const auto& path : cfg.inputs) u.push_back(read_scalar_archive(path));
  for (std::size_t j = 1; j < u.size(); ++j)
    if (u[j].grid() != u[0].grid()) throw ConfigError("/inputs/" + std::to_string(j), "archive grid differs from the first");
  const auto t0 = Clock::now();
  json r{{"fields", u.size()}, {"grid", shape_json(u.front().grid())}};
  try {
    const GlobalReconstruction gr = reconstruct_global(u, cfg.recon);
    r["status"] = "ok";
    r["convention"] = std::string(to_string(gr.rep.convention));
    r["admissibility"] = admissibility_json(gr);
    if (out) write_representative(*out, gr, res.outputs);
  } catch (const CoverageFailure& f) {
    res.admissibility_failed = true;
    r["status"] = "admissibility_failure";
    r["error"] = f.what();
    r["uncovered_nodes"] = f.nodes();
    r["admissibility"] = admissibility_json(f.partial());
    if (out) write_representative(*out, f.partial(), res.outputs);
  } catch (const AdmissibilityError& f) {
    res.admissibility_failed = true;
    r["status"] = "admissibility_failure";
    r["error"] = f.what();
    r["offending_nodes"] = f.nodes();
  }
  res.report = r;
  res.report["timings"] = {{"total_s", seconds_since(t0)}};
  return res;
}

json convergence_orders(const std::vector<json>& cells, const std::vector<Grid>& grids, const char* key) {
  json orders = json::array();
  for (std::size_t i = 1; i < grids.size(); ++i) {
    const json* a = nullptr;
    const json* b = nullptr;
    for (const auto& c : cells) {
      if (c["noise"].get<double>() != 0.0 || c["status"] != "ok") continue;
      if (c["grid"] == shape_json(grids[i - 1])) a = &c;
      if (c["grid"] == shape_json(grids[i])) b = &c;
    }
    if (!a || !b) continue;
    const double ea = (*a)["errors"]["W0"].value(key, 0.0), eb = (*b)["errors"]["W0"].value(key, 0.0);
    const double ratio = grids[i - 1].spacing(0) / grids[i].spacing(0);
    orders.push_back({{"from", shape_json(grids[i - 1])},
                      {"to", shape_json(grids[i])},
                      {"quantity", key},
                      {"convention", (*b)["errors"]["W0"]["convention"]},
                      {"order", std::log(ea / eb) / std::log(ratio)}});
  }
  return orders;
}

RunResult run_roundtrip(const ExperimentConfig& cfg, bool stability, const std::optional<fs::path>& out) {
  RunResult res;
  ExperimentConfig c = cfg;
  if (stability && std::find(c.noise.begin(), c.noise.end(), 0.0) == c.noise.end()) c.noise.insert(c.noise.begin(), 0.0);
  const std::size_t ng = c.coeff_a ? 1 : c.grids.size();
  const auto t0 = Clock::now();
  std::vector<Problem> problems(ng);
  parallel_for(ng, c.threads, [&](std::size_t i) { problems[i] = make_problem(c, c.coeff_a ? nullptr : &c.grids[i]); });
  const double t_setup = seconds_since(t0);

  const std::vector<Cell> cells = make_cells(c, ng);
  std::vector<CellResult> results(cells.size());
  parallel_for(cells.size(), c.threads,
               [&](std::size_t i) { results[i] = roundtrip_cell(c, problems[cells[i].grid_index], cells[i]); });

  json entries = json::array();
  json timings{{"setup_s", t_setup}, {"cells_s", json::array()}};
  std::vector<json> plain;
  std::vector<Grid> grids;
  for (const auto& p : problems) grids.push_back(p.grid);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    CellResult& r = results[i];
    res.admissibility_failed |= r.admissibility_failed;
    if (stability && r.unit_rep && c.noise[cells[i].noise_index] > 0.0) {
      // deviation from the noiseless reconstruction on the same grid
      for (std::size_t q = 0; q < cells.size(); ++q)
        if (cells[q].grid_index == cells[i].grid_index && c.noise[cells[q].noise_index] == 0.0 && results[q].unit_rep) {
          const auto nodes = eval_nodes(problems[cells[i].grid_index].grid, c.margin);
          r.entry["deviation"] = class_errors(*r.unit_rep, *results[q].unit_rep, nodes, 0);
        }
    }
    timings["cells_s"].push_back(r.seconds);
    plain.push_back(r.entry);
    entries.push_back(r.entry);
  }

  json illum = json::array();
  for (const auto& p : problems) illum.push_back({{"grid", shape_json(p.grid)}, {"illumination", p.illum_report}});
  res.report = {{"cells", entries}, {"illumination", illum}, {"timings", timings}};
  json orders = convergence_orders(plain, grids, "relative");
  for (auto& o : convergence_orders(plain, grids, "relative_b")) orders.push_back(o);
  res.report["orders"] = orders;

  if (stability) {
    json sweep = json::array();
    for (std::size_t gi = 0; gi < ng; ++gi) {
      std::vector<double> x, err, dev;
      for (std::size_t ni = 0; ni < c.noise.size(); ++ni) {
        if (c.noise[ni] == 0.0) continue;
        double se = 0.0, sd = 0.0;
        int count = 0;
        for (std::size_t i = 0; i < cells.size(); ++i) {
          if (cells[i].grid_index != gi || cells[i].noise_index != ni || plain[i]["status"] != "ok") continue;
          se += rel_error(plain[i]);
          sd += plain[i].contains("deviation") ? plain[i]["deviation"]["relative"].get<double>() : 0.0;
          ++count;
        }
        if (count == 0) continue;
        x.push_back(c.noise[ni]);
        err.push_back(se / count);
        dev.push_back(sd / count);
      }
      sweep.push_back({{"grid", shape_json(problems[gi].grid)},
                       {"mollifier_width", c.recon.mollifier_width},
                       {"noise", x},
                       {"error", err},
                       {"deviation", dev},
                       {"convention", std::string(to_string(GaugeConvention::U1Normalized))},
                       {"deviation_convention", std::string(to_string(GaugeConvention::UnitFrobenius))},
                       {"slope", loglog_slope(x, err)},
                       {"slope_deviation", loglog_slope(x, dev)}});
    }
    res.report["stability"] = sweep;
  }

  if (out) {
    std::ostringstream csv;
    csv << "grid,noise,repeat,status,convention,rel_W0,rel_W1,rel_b_W0,rel_all_interior,m0_W0,tau_W0,tau_W1,deviation\n"
        << std::setprecision(15);
    for (const auto& e : plain) {
      std::string tag;
      for (const auto& s : e["grid"]) tag += (tag.empty() ? "" : "x") + std::to_string(s.get<int>());
      csv << tag << ',' << e["noise"].get<double>() << ',' << e["repeat"].get<int>() << ','
          << e["status"].get<std::string>();
      if (e["status"] == "ok") {
        const json& w0 = e["errors"]["W0"];
        csv << ',' << w0["convention"].get<std::string>() << ',' << w0["relative"].get<double>() << ','
            << e["errors"]["W1"]["relative"].get<double>() << ',' << w0.value("relative_b", 0.0) << ','
            << e["errors_all_interior"]["relative"].get<double>() << ',' << e["M0_error"]["relative"].get<double>();
        if (e.contains("tau") && e["tau"]["status"] == "ok")
          csv << ',' << e["tau"]["W0"].get<double>() << ',' << e["tau"]["W1"].get<double>();
        else
          csv << ",,";
        csv << ',' << (e.contains("deviation") ? e["deviation"]["relative"].get<double>() : 0.0);
      } else {
        csv << ",,,,,,,,,";
      }
      csv << '\n';
    }
    fs::create_directories(*out);
    write_text(*out / (stability ? "stability.csv" : "errors.csv"), csv.str(), res.outputs);
  }
  return res;
}

RunResult run_application(const ExperimentConfig& cfg, bool qpat, const std::optional<fs::path>& out) {
  RunResult res;
  const std::size_t ng = cfg.grids.size();
  const std::vector<Cell> cells = make_cells(cfg, ng);
  std::vector<json> entries(cells.size());
  std::vector<double> secs(cells.size());
  std::vector<char> failed(cells.size(), 0);
  const AppOptions opts{cfg.recon, cfg.transport};

  struct AppProblem {
    Grid grid;
    QpatTruth qt;
    ElastoTruth et;
    QpatData qd;
    ElastoData ed;
  };
  std::vector<AppProblem> problems(ng);
  parallel_for(ng, cfg.threads, [&](std::size_t i) {
    AppProblem& p = problems[i];
    p.grid = Grid(2, {0, 0, 0}, {1, 1, 1}, cfg.grids[i]);
    const IlluminationSet il = harmonic_family(p.grid);
    if (qpat) {
      p.qt = qpat_demo_truth(p.grid);
      for (const auto& u : synthesize(qpat_forward_coefficients(p.qt), il.traces)) p.qd.H.push_back(hadamard(p.qt.sigma, u));
      p.qd.f1 = il.traces[0];
      p.qd.gamma_boundary = boundary_tensor(p.qt.gamma);
      for (std::size_t k : p.grid.boundary_nodes()) p.qd.sigma_boundary.push_back(p.qt.sigma[k]);
    } else {
      p.et = elasto_demo_truth(p.grid);
      p.et.omega = cfg.omega;
      p.ed = {synthesize(elasto_forward_coefficients(p.et), il.traces), cfg.omega, boundary_tensor(p.et.gamma)};
    }
  });

  std::optional<QpatResult> keep_q;
  std::optional<ElastoResult> keep_e;
  std::mutex keep_mutex;
  parallel_for(cells.size(), cfg.threads, [&](std::size_t i) {
    const auto t0 = Clock::now();
    const Cell& c = cells[i];
    const AppProblem& p = problems[c.grid_index];
    const double delta = cfg.noise[c.noise_index];
    const auto nodes = eval_nodes(p.grid, cfg.margin);
    json e{{"grid", shape_json(p.grid)}, {"noise", delta}, {"repeat", c.repeat}, {"margin", cfg.margin}};
    const std::string conv = "physical";
    try {
      if (qpat) {
        QpatData d = p.qd;
        // absorbed energy is real, so the noise is too
        d.H = noisy_fields(p.qd.H, delta, cfg.seed, c.grid_index, c.noise_index, c.repeat, true);
        const QpatResult r = qpat_reconstruct(d, opts);
        e["errors"] = {{"convention", conv},
                       {"gamma_W0", relative_on(r.gamma, p.qt.gamma, 0, nodes)},
                       {"gamma_W1", relative_on(r.gamma, p.qt.gamma, 1, nodes)},
                       {"sigma_W0", relative_on(r.sigma, p.qt.sigma, 0, nodes)},
                       {"sigma_W1", relative_on(r.sigma, p.qt.sigma, 1, nodes)}};
        e["report"] = r.report;
        if (c.grid_index + 1 == ng && c.noise_index == 0 && c.repeat == 0) {
          std::lock_guard lock(keep_mutex);
          keep_q = r;
        }
      } else {
        ElastoData d = p.ed;
        d.H = noisy_fields(p.ed.H, delta, cfg.seed, c.grid_index, c.noise_index, c.repeat, cfg.real_data);
        const ElastoResult r = elasto_reconstruct(d, opts);
        ScalarField imr(p.grid), imt(p.grid);
        for (std::size_t k = 0; k < p.grid.size(); ++k) imr[k] = r.rho[k].imag(), imt[k] = p.et.rho[k].imag();
        e["errors"] = {{"convention", conv},
                       {"gamma_W0", relative_on(r.gamma, p.et.gamma, 0, nodes)},
                       {"gamma_W1", relative_on(r.gamma, p.et.gamma, 1, nodes)},
                       {"rho_W0", relative_on(r.rho, p.et.rho, 0, nodes)},
                       {"im_rho_W0", relative_on(imr, imt, 0, nodes)}};
        e["report"] = r.report;
        if (c.grid_index + 1 == ng && c.noise_index == 0 && c.repeat == 0) {
          std::lock_guard lock(keep_mutex);
          keep_e = r;
        }
      }
      e["status"] = "ok";
    } catch (const AdmissibilityError& f) {
      failed[i] = 1;
      e["status"] = "admissibility_failure";
      e["error"] = f.what();
    }
    entries[i] = e;
    secs[i] = seconds_since(t0);
  });

  json cells_json = json::array();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    res.admissibility_failed |= failed[i] != 0;
    cells_json.push_back(entries[i]);
  }
  res.report = {{"cells", cells_json}, {"timings", {{"cells_s", secs}}}};

  if (out) {
    fs::create_directories(*out);
    if (keep_q) {
      write_field(*out / "gamma.json", keep_q->gamma, res.outputs);
      write_field(*out / "sigma.json", keep_q->sigma, res.outputs);
      write_field(*out / "tau.json", keep_q->tau.tau, res.outputs);
    }
    if (keep_e) {
      write_field(*out / "gamma.json", keep_e->gamma, res.outputs);
      write_field(*out / "rho.json", keep_e->rho, res.outputs);
      write_field(*out / "tau.json", keep_e->tau.tau, res.outputs);
    }
  }
  return res;
}

json versions() {
  return {{"gaugerec", GAUGEREC_VERSION},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"compiler", __VERSION__}};
}

}  // namespace

RunResult run(const ExperimentConfig& cfg, const std::optional<fs::path>& out) {
  RunResult res;
  switch (cfg.mode) {
    case RunMode::Synthesize: res = run_synthesize(cfg, out); break;
    case RunMode::Reconstruct: res = run_reconstruct(cfg, out); break;
    case RunMode::Roundtrip: res = run_roundtrip(cfg, false, out); break;
    case RunMode::Stability: res = run_roundtrip(cfg, true, out); break;
    case RunMode::Qpat: res = run_application(cfg, true, out); break;
    case RunMode::Elasto: res = run_application(cfg, false, out); break;
  }
  res.report["mode"] = std::string(to_string(cfg.mode));
  res.report["preset"] = cfg.coeff_a ? "file" : cfg.preset;
  res.report["seed"] = cfg.seed;
  res.report["status"] = res.admissibility_failed ? "admissibility_failure" : "ok";

  if (out) {
    fs::create_directories(*out);
    write_json(*out / "report.json", res.report);
    res.outputs.push_back(*out / "report.json");
    json inputs = json::array();
    std::vector<fs::path> in = cfg.inputs;
    for (const auto& p : {cfg.coeff_a, cfg.coeff_b, cfg.coeff_c})
      if (p) in.push_back(*p);
    for (const auto& p : in) inputs.push_back({{"path", p.string()}, {"fnv1a64", fnv1a_file(p)}});
    json outputs = json::array();
    for (const auto& p : res.outputs)
      outputs.push_back({{"path", fs::relative(p, *out).string()}, {"fnv1a64", fnv1a_file(p)}});
    const json manifest{{"config", cfg.source},
                        {"mode", std::string(to_string(cfg.mode))},
                        {"seed", cfg.seed},
                        {"threads", cfg.threads},
                        {"versions", versions()},
                        {"inputs", inputs},
                        {"outputs", outputs}};
    write_json(*out / "manifest.json", manifest);
    res.outputs.push_back(*out / "manifest.json");
  }
  return res;
}

}  // namespace gaugerec
