#include "nilflow/flow_state.hpp"

#include <cmath>
#include <string>

namespace nilflow {

FlowState flat_state(const Grid& grid, const LieStructure& L, double h0) {
  FlowState s;
  s.grid = grid;
  s.L = L;
  s.G.assign(grid.size(), Mat3::Identity());
  s.g.assign(grid.size(), 1.0);
  s.a.assign(grid.size(), Vec3::Zero());
  s.m.assign(grid.size(), Mat3::Zero());
  s.h0 = h0;
  return s;
}

Mat3 diagonal_twist(double kappa) {
  Mat3 K = Mat3::Zero();
  K(0, 0) = kappa;
  K(1, 1) = -kappa;
  return K;
}

void validate(const FlowState& s) {
  const std::size_t n = s.grid.size();
  if (s.G.size() != n || s.g.size() != n || s.a.size() != n || s.m.size() != n)
    throw GridMismatch("state fields do not match the grid size");
  if (s.h0_field && s.h0_field->size() != n) throw GridMismatch("h0 field does not match the grid size");
  if (!std::isfinite(s.t) || s.t < 0.0) throw DomainError("state time must be finite and nonnegative");
  if (!is_derivation(s.L, s.twist, 1e-10)) throw DomainError("twist is not a derivation of the bracket");
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_spd(s.G[i]))
      throw DomainError("fiber metric lost positive definiteness at grid point " + std::to_string(i) +
                        " (t = " + std::to_string(s.t) + ")");
    if (!(s.g[i] > 0.0) || !std::isfinite(s.g[i]))
      throw DomainError("base metric lost positivity at grid point " + std::to_string(i) +
                        " (t = " + std::to_string(s.t) + ")");
    if (!s.a[i].allFinite() || !s.m[i].allFinite()) throw DomainError("non-finite field value at grid point " + std::to_string(i));
    if ((s.m[i] + s.m[i].transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + s.m[i].cwiseAbs().maxCoeff()))
      throw DomainError("mixed torsion is not antisymmetric at grid point " + std::to_string(i));
  }
}

FlowKinematics kinematics(const FlowState& s) {
  const std::size_t n = s.size();
  FlowKinematics k;
  k.omega = connection_field(s.a, s.L, s.twist);
  k.Gi.resize(n);
  for (std::size_t i = 0; i < n; ++i) k.Gi[i] = s.G[i].inverse();

  SymMatrixField connG(n);
  for (std::size_t i = 0; i < n; ++i) connG[i] = fiber_connection_term(s.G[i], k.omega[i]);
  k.DG = deriv(s.G, s.grid);
  for (std::size_t i = 0; i < n; ++i) k.DG[i] += connG[i];

  // d_x(D_x G) uses the compact second-difference stencil on G itself.
  k.DDG = second_deriv(s.G, s.grid);
  const SymMatrixField dconn = deriv(connG, s.grid);
  for (std::size_t i = 0; i < n; ++i) k.DDG[i] += dconn[i] + fiber_connection_term(k.DG[i], k.omega[i]);

  k.Gamma = christoffel(s.g, s.grid);
  k.dm = deriv(s.m, s.grid);
  k.DxH.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    k.DxH[i] = k.dm[i] - k.Gamma[i] * s.m[i] + fiber_connection_term(s.m[i], k.omega[i]);
  return k;
}

}  // namespace nilflow
