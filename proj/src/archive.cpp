#include "gaugerec/archive.hpp"

#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace gaugerec {

json grid_to_json(const Grid& g) {
  json extent = json::array();
  json shape = json::array();
  for (int a = 0; a < g.dim(); ++a) {
    extent.push_back({g.lo(a), g.hi(a)});
    shape.push_back(g.shape()[a]);
  }
  return {{"dim", g.dim()}, {"extent", extent}, {"shape", shape}};
}

Grid grid_from_json(const json& j) {
  const int dim = j.at("dim").get<int>();
  std::array<double, 3> lo{0, 0, 0}, hi{1, 1, 1};
  Index3 shape{1, 1, 1};
  const auto& shp = j.at("shape");
  if (static_cast<int>(shp.size()) != dim) throw std::invalid_argument("grid shape length must equal dim");
  for (int a = 0; a < dim; ++a) {
    shape[a] = shp.at(a).get<int>();
    if (j.contains("extent")) {
      lo[a] = j["extent"].at(a).at(0).get<double>();
      hi[a] = j["extent"].at(a).at(1).get<double>();
    }
  }
  return Grid(dim, lo, hi, shape);
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

json matrix_to_json(const SmallMat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    rows.push_back(row);
  }
  return rows;
}

SmallMat matrix_from_json(const json& j) {
  const int n = static_cast<int>(j.size());
  SmallMat m(n, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(j.at(i).size()) != n) throw std::invalid_argument("matrix must be square");
    for (int k = 0; k < n; ++k) m(i, k) = complex_from_json(j.at(i).at(k));
  }
  return m;
}

json vector_to_json(const SmallVec& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

SmallVec vector_from_json_value(const json& j) {
  SmallVec v(static_cast<int>(j.size()));
  for (int i = 0; i < v.size(); ++i) v(i) = complex_from_json(j.at(i));
  return v;
}

json field_to_json(const Field& f) {
  json values = json::array();
  for (cplx z : f.data()) values.push_back(complex_to_json(z));
  return {{"grid", grid_to_json(f.grid())}, {"kind", std::string(to_string(f.kind()))}, {"values", values}};
}

namespace {

std::vector<cplx> values_of(const json& j, FieldKind expected) {
  const FieldKind kind = field_kind_from_string(j.at("kind").get<std::string>());
  if (kind != expected)
    throw std::invalid_argument("field archive holds a " + j.at("kind").get<std::string>() + " field");
  std::vector<cplx> out;
  const auto& vals = j.at("values");
  out.reserve(vals.size());
  for (const auto& z : vals) out.push_back(complex_from_json(z));
  return out;
}

}  // namespace

ScalarField scalar_from_json(const json& j) {
  return ScalarField(grid_from_json(j.at("grid")), values_of(j, FieldKind::Scalar));
}

VectorField vector_from_json(const json& j) {
  return VectorField(grid_from_json(j.at("grid")), values_of(j, FieldKind::Vector));
}

SymTensorField symtensor_from_json(const json& j) {
  return SymTensorField(grid_from_json(j.at("grid")), values_of(j, FieldKind::SymTensor));
}

void write_json(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << j.dump(1) << '\n';
}

json read_json(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return json::parse(is);
}

void write_archive(const std::filesystem::path& path, const Field& f) { write_json(path, field_to_json(f)); }

ScalarField read_scalar_archive(const std::filesystem::path& path) { return scalar_from_json(read_json(path)); }
VectorField read_vector_archive(const std::filesystem::path& path) { return vector_from_json(read_json(path)); }
SymTensorField read_symtensor_archive(const std::filesystem::path& path) {
  return symtensor_from_json(read_json(path));
}

void write_csv(const std::filesystem::path& path, const Field& f, const std::string& name) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  const Grid& g = f.grid();
  static const char* axes[] = {"x1", "x2", "x3"};
  os << "node";
  for (int a = 0; a < g.dim(); ++a) os << ',' << axes[a];
  for (int c = 0; c < f.components(); ++c) os << ',' << name << c << "_re," << name << c << "_im";
  os << '\n' << std::setprecision(17);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point p = g.coord(k);
    os << k;
    for (int a = 0; a < g.dim(); ++a) os << ',' << p[a];
    for (int c = 0; c < f.components(); ++c) os << ',' << f.component(k, c).real() << ',' << f.component(k, c).imag();
    os << '\n';
  }
}

}  // namespace gaugerec
