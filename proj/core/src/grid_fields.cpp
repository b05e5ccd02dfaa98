#include "nilflow/grid_fields.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nilflow {

Grid::Grid(int n_points, double circle_length) : n(n_points), length(circle_length) {
  if (n_points < 16) throw std::invalid_argument("grid needs at least 16 points");
  if (!(circle_length > 0.0)) throw std::invalid_argument("circle length must be positive");
}

Mat3 connection_matrix(const LieStructure& L, const Vec3& a, const Mat3& twist) {
  return ad_matrix(L, a) + twist;
}

std::vector<Mat3> connection_field(const VectorField& a, const LieStructure& L, const Mat3& twist) {
  std::vector<Mat3> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = connection_matrix(L, a[i], twist);
  return out;
}

SymMatrixField covariant_deriv_G(const SymMatrixField& G, const VectorField& a, const LieStructure& L,
                                 const Grid& grid, const Mat3& twist) {
  require_length(G, grid, "covariant_deriv_G");
  require_length(a, grid, "covariant_deriv_G");
  SymMatrixField out = deriv(G, grid);
  for (std::size_t i = 0; i < G.size(); ++i)
    out[i] += fiber_connection_term(G[i], connection_matrix(L, a[i], twist));
  return out;
}

void require_positive(const ScalarField& g, const char* what) {
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!(g[i] > 0.0) || !std::isfinite(g[i]))
      throw DomainError(std::string(what) + ": base metric is not positive at grid point " + std::to_string(i));
}

ScalarField christoffel(const ScalarField& g, const Grid& grid) {
  require_positive(g, "christoffel");
  ScalarField dg = deriv(g, grid);
  for (std::size_t i = 0; i < g.size(); ++i) dg[i] = 0.5 * dg[i] / g[i];
  return dg;
}

ScalarField laplace_beltrami(const ScalarField& f, const ScalarField& g, const Grid& grid) {
  require_length(f, grid, "laplace_beltrami");
  require_length(g, grid, "laplace_beltrami");
  require_positive(g, "laplace_beltrami");
  ScalarField flux = deriv(f, grid);
  for (std::size_t i = 0; i < f.size(); ++i) flux[i] /= std::sqrt(g[i]);
  ScalarField out = deriv(flux, grid);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] /= std::sqrt(g[i]);
  return out;
}

double integrate(const ScalarField& f, const ScalarField& g, const Grid& grid) {
  require_length(f, grid, "integrate");
  require_length(g, grid, "integrate");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * std::sqrt(g[i]);
  return s * grid.dx();
}

double sup_norm(const ScalarField& f) {
  double s = 0.0;
  for (double v : f) s = std::max(s, std::abs(v));
  return s;
}

double mean(const ScalarField& f) {
  if (f.empty()) return 0.0;
  double s = 0.0;
  for (double v : f) s += v;
  return s / static_cast<double>(f.size());
}

}  // namespace nilflow
