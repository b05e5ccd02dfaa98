#pragma once

#include "nilflow/grid_fields.hpp"
#include "nilflow/nil_algebra.hpp"
#include "nilflow/types.hpp"

#include <optional>
#include <string>

namespace nilflow {

/// Reduced flow data on the periodic grid.
///
/// G is the fiber metric in the global frame, g = g(d_x, d_x), a the
/// connection coefficients, h0 = H(e1, e2, e3) and m_ij = H(d_x, e_i, e_j).
struct FlowState {
  double t = 0.0;
  Grid grid;
  LieStructure L = LieStructure::heisenberg();
  /// Constant derivation describing the adjoint-bundle monodromy; zero for
  /// the trivial bundle.
  Mat3 twist = Mat3::Zero();
  SymMatrixField G;
  ScalarField g;
  VectorField a;
  double h0 = 0.0;
  AntisymMatrixField m;
  /// Debug mode: h0 carried as a grid field and evolved by the full formula.
  std::optional<ScalarField> h0_field;

  std::size_t size() const { return grid.size(); }
  double h0_at(std::size_t i) const { return h0_field ? (*h0_field)[i] : h0; }
};

/// Flat homogeneous state: G = I, g = 1, a = 0, m = 0.
FlowState flat_state(const Grid& grid, const LieStructure& L, double h0 = 0.0);

/// Throws DomainError naming the first violated invariant.
void validate(const FlowState& s);

/// Twist matrix kappa * diag(1, -1, 0): an outer derivation of the Heisenberg
/// algebra (and of the abelian one).
Mat3 diagonal_twist(double kappa);

/// Derivative data shared by the right-hand sides and the diagnostics.
struct FlowKinematics {
  std::vector<Mat3> omega;  // connection matrix ad_a + twist
  SymMatrixField Gi;        // G^{-1}
  SymMatrixField DG;        // D_x G
  SymMatrixField DDG;       // D_x(D_x G), fiber connection only
  ScalarField Gamma;        // g'/(2g)
  AntisymMatrixField dm;    // d_x m
  AntisymMatrixField DxH;   // (D_x H)(d_x, d_x, e_i, e_j)
};

FlowKinematics kinematics(const FlowState& s);

}  // namespace nilflow
