#include "gaugerec/illum.hpp"

#include <cmath>
#include <stdexcept>

#include "gaugerec/errors.hpp"

namespace gaugerec {

std::string_view to_string(IlluminationFamily f) {
  switch (f) {
    case IlluminationFamily::Harmonic: return "harmonic";
    case IlluminationFamily::ConstantTensor: return "constant_tensor";
    case IlluminationFamily::LocalPolynomial: return "local_polynomial";
    case IlluminationFamily::CgoExponential: return "cgo_exponential";
    case IlluminationFamily::Custom: return "custom";
  }
  return "custom";
}

IlluminationFamily illumination_family_from_string(std::string_view s) {
  for (auto f : {IlluminationFamily::Harmonic, IlluminationFamily::ConstantTensor, IlluminationFamily::LocalPolynomial,
                 IlluminationFamily::CgoExponential, IlluminationFamily::Custom})
    if (to_string(f) == s) return f;
  throw std::invalid_argument("unknown illumination family '" + std::string(s) + "'");
}

namespace {

SmallVec shifted(const Point& x, const Point& c, int n) {
  SmallVec y(n);
  for (int i = 0; i < n; ++i) y(i) = x[i] - c[i];
  return y;
}

cplx pair(const SmallMat& a, const SmallMat& b) { return a.cwiseProduct(b).sum(); }        // Tr(A B), A symmetric
cplx hpair(const SmallMat& a, const SmallMat& b) { return a.conjugate().cwiseProduct(b).sum(); }  // Tr(A^* B)

QuadraticPolynomial make_poly(int n, const Point& center) {
  return {SmallMat::Zero(n, n), SmallVec::Zero(n), 0.0, center};
}

IlluminationSet from_polynomials(const Grid& grid, IlluminationFamily fam, std::vector<QuadraticPolynomial> polys,
                                 const std::vector<std::string>& labels) {
  IlluminationSet s;
  s.family = fam;
  for (std::size_t j = 0; j < polys.size(); ++j) {
    const QuadraticPolynomial& p = polys[j];
    s.traces.push_back(BoundaryTrace::sample(grid, [&p](const Point& x) { return p(x); }, labels[j]));
  }
  s.polynomials = std::move(polys);
  return s;
}

// Orthonormal real rotation whose first two rows span Re b0 and Im b0.
RealMat rotation_for(const SmallVec& b0) {
  const int n = static_cast<int>(b0.size());
  std::vector<Eigen::Vector3d> cand;
  Eigen::Vector3d re = Eigen::Vector3d::Zero(), im = Eigen::Vector3d::Zero();
  for (int i = 0; i < n; ++i) re(i) = b0(i).real(), im(i) = b0(i).imag();
  cand = {re, im, Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(), Eigen::Vector3d::UnitZ()};
  std::vector<Eigen::Vector3d> rows;
  const double scale = std::max(b0.norm(), 1.0);
  for (Eigen::Vector3d v : cand) {
    for (const auto& r : rows) v -= r.dot(v) * r;
    for (const auto& r : rows) v -= r.dot(v) * r;
    if (v.norm() > 1e-10 * scale) rows.push_back(v.normalized());
    if (static_cast<int>(rows.size()) == n) break;
  }
  RealMat R(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) R(i, k) = rows[i](k);
  return R;
}

}  // namespace

cplx QuadraticPolynomial::operator()(const Point& x) const {
  const SmallVec y = shifted(x, center, static_cast<int>(rho.size()));
  return 0.5 * (y.transpose() * Q * y)(0, 0) + (rho.transpose() * y)(0, 0) + d;
}

SmallVec QuadraticPolynomial::gradient(const Point& x) const {
  return Q * shifted(x, center, static_cast<int>(rho.size())) + rho;
}

cplx QuadraticPolynomial::constraint_residual(const SmallMat& a0, const SmallVec& b0, cplx c0) const {
  return pair(a0, Q) + (b0.transpose() * rho)(0, 0) + c0 * d;
}

ScalarField QuadraticPolynomial::sample(const Grid& grid) const {
  return ScalarField::sample(grid, [this](const Point& x) { return (*this)(x); });
}

IlluminationSet harmonic_family(const Grid& grid) {
  const int n = grid.dim();
  std::vector<QuadraticPolynomial> polys;
  std::vector<std::string> labels;
  const Point origin{0, 0, 0};
  auto p = make_poly(n, origin);
  p.d = 1.0;
  polys.push_back(p), labels.push_back("1");
  for (int j = 0; j < n; ++j) {
    p = make_poly(n, origin);
    p.rho(j) = 1.0;
    polys.push_back(p), labels.push_back("x" + std::to_string(j + 1));
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      p = make_poly(n, origin);
      p.Q(i, j) = p.Q(j, i) = 1.0;
      polys.push_back(p), labels.push_back("x" + std::to_string(i + 1) + "x" + std::to_string(j + 1));
    }
  for (int i = 0; i + 1 < n; ++i) {
    p = make_poly(n, origin);
    p.Q(i, i) = 1.0, p.Q(i + 1, i + 1) = -1.0;
    polys.push_back(p),
        labels.push_back("(x" + std::to_string(i + 1) + "^2-x" + std::to_string(i + 2) + "^2)/2");
  }
  return from_polynomials(grid, IlluminationFamily::Harmonic, std::move(polys), labels);
}

std::vector<SmallMat> orthogonal_complement_basis(const SmallMat& a0) {
  const int n = static_cast<int>(a0.rows());
  const double norm = std::sqrt(std::abs(hpair(a0, a0)));
  if (!(norm > 1e-12)) throw DegenerateTensor("a0 : conj(a0) vanishes");
  std::vector<SmallMat> seeds{SmallMat(a0.conjugate())};
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      SmallMat e = SmallMat::Zero(n, n);
      e(i, j) = e(j, i) = 1.0 / std::sqrt(2.0);
      seeds.push_back(e);
    }
  for (int i = 0; i < n; ++i) {
    SmallMat e = SmallMat::Zero(n, n);
    e(i, i) = 1.0;
    seeds.push_back(e);
  }
  std::vector<SmallMat> basis;
  for (SmallMat v : seeds) {
    const double before = std::sqrt(std::abs(hpair(v, v)));
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) v -= hpair(q, v) * q;
    const double after = std::sqrt(std::abs(hpair(v, v)));
    if (after > 1e-8 * before) basis.push_back(v / after);
  }
  basis.erase(basis.begin());
  if (static_cast<int>(basis.size()) != m_count(n)) throw DegenerateTensor("orthogonal complement has wrong dimension");
  return basis;
}

IlluminationSet constant_tensor_family(const Grid& grid, const SmallMat& a0) {
  const int n = grid.dim();
  if (a0.rows() != n || a0.cols() != n) throw std::invalid_argument("a0 has the wrong size");
  const std::vector<SmallMat> qs = orthogonal_complement_basis(a0);
  IlluminationSet h = harmonic_family(grid);
  std::vector<QuadraticPolynomial> polys(h.polynomials.begin(), h.polynomials.begin() + 1 + n);
  std::vector<std::string> labels;
  for (int j = 0; j <= n; ++j) labels.push_back(h.traces[j].label);
  for (std::size_t m = 0; m < qs.size(); ++m) {
    auto p = make_poly(n, {0, 0, 0});
    p.Q = qs[m];
    polys.push_back(p);
    labels.push_back("Q" + std::to_string(m + 1));
  }
  IlluminationSet s = from_polynomials(grid, IlluminationFamily::ConstantTensor, std::move(polys), labels);
  s.params.a0 = a0;
  return s;
}

IlluminationSet local_polynomial_family(const Grid& grid, const SmallMat& a0, const SmallVec& b0, cplx c0,
                                        const Point& center) {
  const int n = grid.dim();
  if (a0.rows() != n || b0.size() != n) throw std::invalid_argument("a0/b0 have the wrong size");
  const cplx aa = pair(a0, a0.conjugate());
  if (!(std::abs(aa) > 1e-12)) throw DegenerateTensor("a0 : conj(a0) vanishes");
  const SmallMat astar = a0.conjugate();

  std::vector<QuadraticPolynomial> polys;
  std::vector<std::string> labels;
  auto p = make_poly(n, center);
  p.d = 1.0;
  p.Q = -c0 * astar / aa;
  polys.push_back(p), labels.push_back("p0");

  // Rotate so b0 lies in span(e1, e2); only then do the first two linear members need a correction.
  const RealMat R = n == 3 ? rotation_for(b0) : RealMat(RealMat::Identity(n, n));
  const SmallMat Rc = R.cast<cplx>();
  const SmallMat a_rot = Rc * a0 * Rc.transpose();
  const SmallVec b_rot = Rc * b0;
  const cplx aa_rot = pair(a_rot, a_rot.conjugate());
  for (int j = 0; j < n; ++j) {
    SmallMat Qr = SmallMat::Zero(n, n);
    if (j < 2) Qr = -b_rot(j) * a_rot.conjugate() / aa_rot;
    SmallVec er = SmallVec::Zero(n);
    er(j) = 1.0;
    p = make_poly(n, center);
    p.Q = Rc.transpose() * Qr * Rc;
    p.rho = Rc.transpose() * er;
    polys.push_back(p), labels.push_back("p" + std::to_string(j + 1));
  }
  const std::vector<SmallMat> qs = orthogonal_complement_basis(a0);
  for (std::size_t m = 0; m < qs.size(); ++m) {
    p = make_poly(n, center);
    p.Q = qs[m];
    polys.push_back(p), labels.push_back("p" + std::to_string(n + 1 + m));
  }
  IlluminationSet s = from_polynomials(grid, IlluminationFamily::LocalPolynomial, std::move(polys), labels);
  s.params.a0 = a0;
  s.params.b0 = b0;
  s.params.c0 = c0;
  s.params.center = center;
  return s;
}

std::vector<SmallVec> cgo_exponents(int n, double k, double eps) {
  auto rho = [&](int i, int j) {
    SmallVec r = SmallVec::Zero(n);
    r(i) += k;
    r(j) += cplx(0.0, k);
    return r;
  };
  std::vector<SmallVec> out;
  out.push_back(eps * eps * rho(0, 1));
  out.push_back(eps * rho(0, 1).conjugate());
  for (int j = 1; j < n; ++j) out.push_back(eps * rho(j - 1, j));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) out.push_back(rho(i, j));
  for (int j = 0; j + 1 < n; ++j) out.push_back(rho(j, j + 1).conjugate());
  return out;
}

double default_cgo_k(const Grid& grid) { return 8.0 / grid.diameter(); }

IlluminationSet cgo_family(const Grid& grid, const ScalarField* gamma, double k, double eps) {
  if (k <= 0.0) k = default_cgo_k(grid);
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("cgo epsilon must lie in (0, 1)");
  if (gamma && gamma->grid() != grid) throw std::invalid_argument("gamma lives on another grid");
  const int n = grid.dim();
  Point c{0, 0, 0};
  for (int a = 0; a < n; ++a) c[a] = 0.5 * (grid.lo(a) + grid.hi(a));
  IlluminationSet s;
  s.family = IlluminationFamily::CgoExponential;
  s.exponents = cgo_exponents(n, k, eps);
  s.params.k = k;
  s.params.epsilon = eps;
  s.params.center = c;
  const auto bnodes = grid.boundary_nodes();
  for (std::size_t t = 0; t < s.exponents.size(); ++t) {
    const SmallVec& r = s.exponents[t];
    BoundaryTrace tr{grid, {}, "cgo" + std::to_string(t + 1)};
    for (std::size_t b : bnodes) {
      const Point x = grid.coord(b);
      cplx phase = 0.0;
      for (int i = 0; i < n; ++i) phase += r(i) * (x[i] - c[i]);
      const cplx g = gamma ? (*gamma)[b] : cplx(1.0);
      tr.values.push_back(std::exp(phase) / std::sqrt(g));
    }
    s.traces.push_back(std::move(tr));
  }
  return s;
}

json illumination_to_json(const IlluminationSet& s) {
  json params = json::object();
  if (s.params.a0) params["a0"] = matrix_to_json(*s.params.a0);
  if (s.params.b0) params["b0"] = vector_to_json(*s.params.b0);
  if (s.params.c0) params["c0"] = complex_to_json(*s.params.c0);
  if (s.params.k) params["k"] = *s.params.k;
  if (s.params.epsilon) params["epsilon"] = *s.params.epsilon;
  if (s.params.center) params["center"] = *s.params.center;
  json traces = json::array();
  for (std::size_t t = 0; t < s.traces.size(); ++t) {
    json values = json::array();
    for (cplx z : s.traces[t].values) values.push_back(complex_to_json(z));
    json tr = {{"label", s.traces[t].label}, {"values", values}};
    if (t < s.polynomials.size()) {
      const auto& p = s.polynomials[t];
      tr["polynomial"] = {{"Q", matrix_to_json(p.Q)}, {"rho", vector_to_json(p.rho)}, {"d", complex_to_json(p.d)},
                          {"center", p.center}};
    }
    if (t < s.exponents.size()) tr["exponent"] = vector_to_json(s.exponents[t]);
    traces.push_back(tr);
  }
  json out = {{"family", std::string(to_string(s.family))}, {"params", params}, {"traces", traces}};
  if (!s.traces.empty()) out["grid"] = grid_to_json(s.traces.front().grid);
  return out;
}

IlluminationSet illumination_from_json(const json& j) {
  IlluminationSet s;
  s.family = illumination_family_from_string(j.at("family").get<std::string>());
  const json& p = j.value("params", json::object());
  if (p.contains("a0")) s.params.a0 = matrix_from_json(p["a0"]);
  if (p.contains("b0")) s.params.b0 = vector_from_json_value(p["b0"]);
  if (p.contains("c0")) s.params.c0 = complex_from_json(p["c0"]);
  if (p.contains("k")) s.params.k = p["k"].get<double>();
  if (p.contains("epsilon")) s.params.epsilon = p["epsilon"].get<double>();
  if (p.contains("center")) s.params.center = p["center"].get<Point>();
  if (j.at("traces").empty()) return s;
  const Grid g = grid_from_json(j.at("grid"));
  const std::size_t nb = g.boundary_nodes().size();
  for (const auto& tr : j.at("traces")) {
    BoundaryTrace t{g, {}, tr.value("label", "")};
    for (const auto& z : tr.at("values")) t.values.push_back(complex_from_json(z));
    if (t.values.size() != nb) throw std::invalid_argument("trace '" + t.label + "' has the wrong length");
    s.traces.push_back(std::move(t));
    if (tr.contains("polynomial")) {
      const auto& q = tr["polynomial"];
      s.polynomials.push_back({matrix_from_json(q.at("Q")), vector_from_json_value(q.at("rho")),
                               complex_from_json(q.at("d")), q.at("center").get<Point>()});
    }
    if (tr.contains("exponent")) s.exponents.push_back(vector_from_json_value(tr["exponent"]));
  }
  return s;
}

}  // namespace gaugerec
