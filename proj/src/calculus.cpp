#include "gaugerec/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gaugerec {

namespace {

// Applies `kernel(line, len, out)` along every grid line parallel to `axis`.
template <class Kernel>
ScalarField along_axis(const ScalarField& f, int axis, Kernel&& kernel) {
  const Grid& g = f.grid();
  const int len = g.shape()[axis];
  const std::size_t stride = g.stride(axis);
  ScalarField out(g);
  std::vector<cplx> line(len), res(len);
  for (std::size_t start = 0; start < g.size(); ++start) {
    if (g.index(start)[axis] != 0) continue;
    for (int i = 0; i < len; ++i) line[i] = f[start + i * stride];
    kernel(line, len, res);
    for (int i = 0; i < len; ++i) out[start + i * stride] = res[i];
  }
  return out;
}

}  // namespace

ScalarField partial(const ScalarField& f, int axis) {
  const double h = f.grid().spacing(axis);
  if (f.grid().shape()[axis] < 3) throw std::invalid_argument("gradient needs at least 3 nodes per axis");
  const double inv2h = 1.0 / (2.0 * h);
  return along_axis(f, axis, [inv2h](const std::vector<cplx>& u, int n, std::vector<cplx>& d) {
    d[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) * inv2h;
    for (int i = 1; i < n - 1; ++i) d[i] = (u[i + 1] - u[i - 1]) * inv2h;
    d[n - 1] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) * inv2h;
  });
}

ScalarField second_partial(const ScalarField& f, int axis) {
  const double h = f.grid().spacing(axis);
  if (f.grid().shape()[axis] < 4) throw std::invalid_argument("second derivative needs at least 4 nodes per axis");
  const double invh2 = 1.0 / (h * h);
  return along_axis(f, axis, [invh2](const std::vector<cplx>& u, int n, std::vector<cplx>& d) {
    d[0] = (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) * invh2;
    for (int i = 1; i < n - 1; ++i) d[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * invh2;
    d[n - 1] = (2.0 * u[n - 1] - 5.0 * u[n - 2] + 4.0 * u[n - 3] - u[n - 4]) * invh2;
  });
}

VectorField gradient(const ScalarField& f) {
  const Grid& g = f.grid();
  VectorField out(g);
  for (int a = 0; a < g.dim(); ++a) {
    const ScalarField d = partial(f, a);
    for (std::size_t k = 0; k < g.size(); ++k) out(k, a) = d[k];
  }
  return out;
}

SymTensorField hessian(const ScalarField& f) {
  const Grid& g = f.grid();
  const int n = g.dim();
  for (int a = 0; a < n; ++a)
    if (g.shape()[a] < 5) throw std::invalid_argument("hessian needs at least 5 nodes per axis");
  SymTensorField out(g);
  std::vector<ScalarField> first;
  first.reserve(n);
  for (int a = 0; a < n; ++a) first.push_back(partial(f, a));
  for (int i = 0; i < n; ++i) {
    const ScalarField dii = second_partial(f, i);
    const int ci = sym_index(n, i, i);
    for (std::size_t k = 0; k < g.size(); ++k) out.component(k, ci) = dii[k];
    for (int j = i + 1; j < n; ++j) {
      const ScalarField dij = partial(first[i], j);
      const ScalarField dji = partial(first[j], i);
      const int c = sym_index(n, i, j);
      for (std::size_t k = 0; k < g.size(); ++k) out.component(k, c) = 0.5 * (dij[k] + dji[k]);
    }
  }
  return out;
}

VectorField divergence_tensor(const SymTensorField& a) {
  const Grid& g = a.grid();
  const int n = g.dim();
  VectorField out(g);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const ScalarField d = partial(a.entry_field(i, j), j);
      for (std::size_t k = 0; k < g.size(); ++k) out(k, i) += d[k];
    }
  }
  return out;
}

ScalarField divergence(const VectorField& v) {
  const Grid& g = v.grid();
  ScalarField out(g);
  for (int i = 0; i < g.dim(); ++i) out += partial(v.component_field(i), i);
  return out;
}

ScalarField curl_2d(const VectorField& v) {
  if (v.grid().dim() != 2) throw std::invalid_argument("curl_2d requires a 2D grid");
  return partial(v.component_field(1), 0) - partial(v.component_field(0), 1);
}

VectorField curl_3d(const VectorField& v) {
  const Grid& g = v.grid();
  if (g.dim() != 3) throw std::invalid_argument("curl_3d requires a 3D grid");
  VectorField out(g);
  for (int c = 0; c < 3; ++c) {
    const int p = (c + 1) % 3, q = (c + 2) % 3;
    const ScalarField r = partial(v.component_field(q), p) - partial(v.component_field(p), q);
    for (std::size_t k = 0; k < g.size(); ++k) out(k, c) = r[k];
  }
  return out;
}

DiscreteNorm sup_norm(const Field& f, int order) {
  if (order < 0 || order > 3) throw std::invalid_argument("sup_norm order must be in [0, 3]");
  const Grid& g = f.grid();
  const int n = g.dim();
  double best = 0.0;
  auto track = [&best](const ScalarField& s) { best = std::max(best, s.max_abs()); };
  for (int c = 0; c < f.components(); ++c) {
    ScalarField comp(g);
    for (std::size_t k = 0; k < g.size(); ++k) comp[k] = f.component(k, c);
    track(comp);
    if (order == 0) continue;
    std::vector<ScalarField> d1;
    for (int a = 0; a < n; ++a) {
      d1.push_back(partial(comp, a));
      track(d1.back());
    }
    if (order == 1) continue;
    std::vector<ScalarField> d2;
    for (int a = 0; a < n; ++a) {
      d2.push_back(second_partial(comp, a));
      for (int b = a + 1; b < n; ++b) d2.push_back(partial(d1[a], b));
    }
    for (const auto& s : d2) track(s);
    if (order == 2) continue;
    for (const auto& s : d2)
      for (int a = 0; a < n; ++a) track(partial(s, a));
  }
  return {order, best};
}

ScalarField mollify(const ScalarField& f, double width) {
  if (width < 0.0) throw std::invalid_argument("mollifier width must be nonnegative");
  if (width == 0.0) return f;
  const int radius = static_cast<int>(std::ceil(4.0 * width));
  std::vector<double> w(2 * radius + 1);
  for (int k = -radius; k <= radius; ++k) w[k + radius] = std::exp(-0.5 * (k / width) * (k / width));
  ScalarField out = f;
  for (int a = 0; a < f.grid().dim(); ++a) {
    out = along_axis(out, a, [&w, radius](const std::vector<cplx>& u, int n, std::vector<cplx>& d) {
      for (int i = 0; i < n; ++i) {
        cplx acc = 0.0;
        double norm = 0.0;
        const int lo = std::max(0, i - radius), hi = std::min(n - 1, i + radius);
        for (int j = lo; j <= hi; ++j) {
          acc += w[j - i + radius] * u[j];
          norm += w[j - i + radius];
        }
        d[i] = acc / norm;
      }
    });
  }
  return out;
}

}  // namespace gaugerec
