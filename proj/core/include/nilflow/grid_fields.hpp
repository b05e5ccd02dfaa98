#pragma once

#include "nilflow/nil_algebra.hpp"
#include "nilflow/types.hpp"

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace nilflow {

/// Uniform periodic grid on a circle of coordinate length `length`.
struct Grid {
  int n = 64;
  double length = 6.283185307179586;

  Grid() = default;
  Grid(int n_points, double circle_length);

  double dx() const { return length / n; }
  double x(int i) const { return i * dx(); }
  std::size_t size() const { return static_cast<std::size_t>(n); }
};

class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline std::size_t wrap(std::ptrdiff_t i, std::size_t n) {
  const auto m = static_cast<std::ptrdiff_t>(n);
  return static_cast<std::size_t>(((i % m) + m) % m);
}

template <class T>
void require_length(const std::vector<T>& f, const Grid& grid, const char* what) {
  if (f.size() != grid.size()) throw GridMismatch(std::string(what) + ": field length does not match grid");
}

/// Fourth-order centered periodic first derivative.
template <class T>
std::vector<T> deriv(const std::vector<T>& f, const Grid& grid) {
  require_length(f, grid, "deriv");
  const std::size_t n = f.size();
  const double s = 1.0 / (12.0 * grid.dx());
  std::vector<T> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ip1 = wrap(static_cast<std::ptrdiff_t>(i) + 1, n);
    const auto ip2 = wrap(static_cast<std::ptrdiff_t>(i) + 2, n);
    const auto im1 = wrap(static_cast<std::ptrdiff_t>(i) - 1, n);
    const auto im2 = wrap(static_cast<std::ptrdiff_t>(i) - 2, n);
    out[i] = (8.0 * (f[ip1] - f[im1]) - (f[ip2] - f[im2])) * s;
  }
  return out;
}

/// Fourth-order centered periodic second derivative (compact five-point stencil).
template <class T>
std::vector<T> second_deriv(const std::vector<T>& f, const Grid& grid) {
  require_length(f, grid, "second_deriv");
  const std::size_t n = f.size();
  const double s = 1.0 / (12.0 * grid.dx() * grid.dx());
  std::vector<T> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ip1 = wrap(static_cast<std::ptrdiff_t>(i) + 1, n);
    const auto ip2 = wrap(static_cast<std::ptrdiff_t>(i) + 2, n);
    const auto im1 = wrap(static_cast<std::ptrdiff_t>(i) - 1, n);
    const auto im2 = wrap(static_cast<std::ptrdiff_t>(i) - 2, n);
    out[i] = (16.0 * (f[ip1] + f[im1]) - (f[ip2] + f[im2]) - 30.0 * f[i]) * s;
  }
  return out;
}

/// Connection matrix of D on the adjoint bundle in the global frame:
/// D_x e_i = sum_p omega(p, i) e_p with omega = ad_a + twist.
/// `twist` is a constant outer derivation encoding the bundle monodromy
/// (zero for a trivial adjoint bundle).
Mat3 connection_matrix(const LieStructure& L, const Vec3& a, const Mat3& twist);

std::vector<Mat3> connection_field(const VectorField& a, const LieStructure& L, const Mat3& twist);

/// Zeroth-order part of D_x on a fiber (0,2)-tensor: -omega^T S - S omega.
inline Mat3 fiber_connection_term(const Mat3& S, const Mat3& omega) {
  return -(omega.transpose() * S) - S * omega;
}

/// Zeroth-order part of D_x on a fiber 1-form: -omega^T v.
inline Vec3 fiber_connection_term(const Vec3& v, const Mat3& omega) { return -(omega.transpose() * v); }

inline double fiber_connection_term(double, const Mat3&) { return 0.0; }

/// (D_x G)_{ij} = d_x G_{ij} - (ad_a)^p_i G_{pj} - (ad_a)^p_j G_{ip} (plus the twist when given).
SymMatrixField covariant_deriv_G(const SymMatrixField& G, const VectorField& a, const LieStructure& L,
                                 const Grid& grid, const Mat3& twist = Mat3::Zero());

/// Christoffel symbol of g dx^2 in the coordinate x: Gamma = g'/(2g).
ScalarField christoffel(const ScalarField& g, const Grid& grid);

/// Covariant derivative of a tensor with `base_slots` covariant base (dx) slots
/// and fiber slots given by the value type (double: none, Vec3: one, Mat3: two).
template <class T>
std::vector<T> covariant_deriv_tensor(const std::vector<T>& t, int base_slots, const VectorField& a,
                                      const ScalarField& g, const LieStructure& L, const Grid& grid,
                                      const Mat3& twist = Mat3::Zero()) {
  require_length(t, grid, "covariant_deriv_tensor");
  require_length(a, grid, "covariant_deriv_tensor");
  require_length(g, grid, "covariant_deriv_tensor");
  std::vector<T> out = deriv(t, grid);
  const ScalarField gamma = christoffel(g, grid);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Mat3 omega = connection_matrix(L, a[i], twist);
    out[i] = out[i] + fiber_connection_term(t[i], omega) - (base_slots * gamma[i]) * t[i];
  }
  return out;
}

void require_positive(const ScalarField& g, const char* what);

/// Laplace-Beltrami operator of g dx^2, in conservative form
/// g^{-1/2} d_x (g^{-1/2} d_x f).
ScalarField laplace_beltrami(const ScalarField& f, const ScalarField& g, const Grid& grid);

/// Riemann sum of f dV_g = f sqrt(g) dx, accumulated in index order.
double integrate(const ScalarField& f, const ScalarField& g, const Grid& grid);

double sup_norm(const ScalarField& f);
double mean(const ScalarField& f);

}  // namespace nilflow
