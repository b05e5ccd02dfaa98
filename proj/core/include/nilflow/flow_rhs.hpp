#pragma once

#include "nilflow/flow_state.hpp"

namespace nilflow {

/// Sign choices left open by the reduced equations. The defaults are the
/// ones under which all scalar evolution identities converge; the others are
/// kept for the consistency harness.
struct FlowConventions {
  int connection_sign = -1;        // d_t a = connection_sign * X
  int mixed_base_sign = +1;        // B(e_i, d_x) = sign * 1/2 G^{kk'}G^{ll'}C^p_{kl}G_{pi}m_{k'l'}
  int frame_correction_sign = +1;  // d_t m_ij = dB_ij - sign * h0 eps_{kij} (X)^k
};

struct BField {
  AntisymMatrixField vv;  // B(e_i, e_j)
  VectorField vb;         // B(e_i, d_x)
};

/// Time derivatives of every evolved field.
struct FlowRates {
  SymMatrixField G;
  ScalarField g;
  VectorField a;
  double h0 = 0.0;
  AntisymMatrixField m;
  std::optional<ScalarField> h0_field;
};

SymMatrixField rhs_G(const FlowState& s, const FlowKinematics& k);
SymMatrixField rhs_G(const FlowState& s);

ScalarField rhs_g(const FlowState& s, const FlowKinematics& k);
ScalarField rhs_g(const FlowState& s);

/// X^p = G^{pk}[G^{ij}C^q_{ik}(D_xG)_{qj} + 1/2 G^{ii'}G^{jj'}m_{ij}h0 eps_{ki'j'}],
/// the connection-coefficient velocity before the sign convention is applied.
VectorField connection_velocity(const FlowState& s, const FlowKinematics& k);

VectorField rhs_a(const FlowState& s, const FlowKinematics& k, const FlowConventions& conv = {});
VectorField rhs_a(const FlowState& s, const FlowConventions& conv = {});

BField compute_B(const FlowState& s, const FlowKinematics& k, const FlowConventions& conv = {});
BField compute_B(const FlowState& s, const FlowConventions& conv = {});

struct TorsionRates {
  double dh0 = 0.0;
  AntisymMatrixField dm;
  std::optional<ScalarField> dh0_field;
};

TorsionRates rhs_H(const FlowState& s, const FlowKinematics& k, const FlowConventions& conv = {});
TorsionRates rhs_H(const FlowState& s, const FlowConventions& conv = {});

FlowRates rhs(const FlowState& s, const FlowConventions& conv = {});

/// Pointwise contraction G^{ik}G^{jl}A_{ij}B_{kl}.
inline double contract(const Mat3& Gi, const Mat3& A, const Mat3& B) {
  return (Gi * A.transpose() * Gi * B).trace();
}

}  // namespace nilflow
