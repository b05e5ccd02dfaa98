#pragma once

#include "nilflow/flow_state.hpp"

#include <array>
#include <string>
#include <vector>

namespace nilflow {

/// Components in the unit frame of (fiber + base, G + g). E holds the
/// G-orthonormal frame as columns, with E.col(2) the unit center.
struct UnitFrame {
  Mat3 E;
  Mat3 Einv;
  Mat3 K;   // D_v G
  Mat3 Lh;  // (D_v D G)_v
  Mat3 M;   // H(v, ., .)
  Mat3 N;   // (D_v H)(v, ., .)
  std::array<Mat3, 3> C;  // bracket constants in the unit frame
  double hh = 0.0;        // H(eta1, eta2, eta3)
};

/// G-orthonormal frame obtained by Gram-Schmidt starting from e3, then e1, e2.
Mat3 unit_frame_basis(const Mat3& G);

std::vector<UnitFrame> unit_frames(const FlowState& s, const FlowKinematics& k);

struct PointScalars {
  double bracket_sq = 0.0;
  double hg_sq = 0.0;
  double dg_sq = 0.0;
  double trh2 = 0.0;
  double q_sum = 0.0;
  double trace_dg = 0.0;
  double s_a = 0.0;
  double s_b = 0.0;
  double d2 = 0.0;
};

PointScalars point_scalars(const UnitFrame& u);

/// Pieces of S_A and S_B, exposed for the consistency harness and tests.
struct DefectTerms {
  double T_sq = 0.0;   // |T|^2
  double y_sq = 0.0;   // |H(v, ., .)[., .]|^2
  double P_sq = 0.0;   // |D D G - DG DG + H H|^2 along v
  double R_sq = 0.0;   // |D H + H * DG|^2 along v
  double w_sq = 0.0;   // |G([., .], .) contracted with DG|^2
  double wh_sq = 0.0;  // |w + H-vertical contraction|^2
  double center_sq = 0.0;  // (tr DG - 2 DG(zeta, zeta))^2
  double mixed_sq = 0.0;   // DG(eta1, zeta)^2 + DG(eta2, zeta)^2
};

DefectTerms defect_terms(const UnitFrame& u);

struct ScalarFields {
  ScalarField bracket_sq, hg_sq, dg_sq, trh2, q_sum, trace_dg, s_a, s_b, d2;
};

ScalarFields scalar_fields(const FlowState& s);
ScalarFields scalar_fields(const FlowState& s, const FlowKinematics& k);

ScalarField S_A(const FlowState& s);
ScalarField S_B(const FlowState& s);

/// tau * int (|DG|^2 + tr_g H^2 + 2/tau) dV_g / sqrt(tau).
double energy_I(const FlowState& s, double tau);
double energy_I(const ScalarField& q_sum, const ScalarField& g, const Grid& grid, double tau);

double volume(const FlowState& s);
double diameter(const FlowState& s);

/// q = -1/2 g^{-1} G^{ij}(D_xG)_{ij}, coordinate component.
ScalarField gauge_vector(const FlowState& s);

struct SupMean {
  double sup = 0.0;
  double mean = 0.0;
};

struct DiagnosticsRecord {
  double t = 0.0;
  SupMean bracket_sq, hg_sq, dg_sq, trh2, q_sum, trace_dg, s_a, s_b, d2;
  double energy_I = 0.0;  // NaN at t = 0
  double volume = 0.0;
  double diameter = 0.0;
  double monitor_bracket = 0.0;  // t sup |[,]|^2
  double monitor_hg = 0.0;       // t sup |H^G|^2
  double monitor_q = 0.0;        // t sup (|DG|^2 + tr_g H^2)
  double monitor_d2 = 0.0;       // t^2 sup d2
};

DiagnosticsRecord diagnostics_record(const FlowState& s);

/// Column names of the diagnostics part of a series row, in order.
const std::vector<std::string>& record_columns();
std::vector<double> record_values(const DiagnosticsRecord& r);

}  // namespace nilflow
