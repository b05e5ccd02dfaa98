#pragma once

#include "nilflow/evolve.hpp"

#include <Eigen/Dense>
#include <vector>

namespace nilflow {

/// Parabolic rescaling of a single state: the state at time s*t becomes the
/// state at time t with G, g, h0, m divided by s and a unchanged.
FlowState rescale(const FlowState& st, double s);
FlowRates rescale(const FlowRates& r, double s);
DiagnosticsRecord rescale(const DiagnosticsRecord& r, double s);

/// Rescaled trajectory, restricted to snapshots with t in [s*t_lo, s*t_hi]
/// (the full trajectory when the window is omitted).
Trajectory rescale(const Trajectory& traj, double s);
Trajectory rescale(const Trajectory& traj, double s, double t_lo, double t_hi);

/// Cubic Hermite interpolation between stored snapshots.
FlowState state_at(const Trajectory& traj, double t);

inline constexpr double kFamilyRate = 1.5;

struct FamilyRates {
  double dPhi = 0.0;
  double dPsi = 0.0;
  double rate_g0 = 0.0;  // d/dt log of the block orthogonal to the center
  double rate_z = 0.0;   // d/dt log of the center block
};

/// Phi = |[,]|^2, Psi = |H^G|^2.
FamilyRates family_ode_rhs(double Phi, double Psi);

struct FamilyClosedForm {
  double Phi = 0.0;
  double factor_g0 = 1.0;
  double factor_z = 1.0;
};

/// H^G = 0 solution normalised to the block data at t = 1.
FamilyClosedForm family_closed_form(double t, double C);

struct CanonicalFamilyParams {
  double C = 0.0;
  double psi0 = 0.0;  // |H^G|^2 at t = 1
  Eigen::Matrix2d block = Eigen::Matrix2d::Identity();  // block orthogonal to the center at t = 1
  double g1 = 1.0;    // base metric at t = 1
  double c = 1.0;     // bracket scale; 0 gives the abelian family
};

struct FamilyPoint {
  double t = 0.0;
  double Phi = 0.0;
  double Psi = 0.0;
  Mat3 G = Mat3::Identity();
  double g = 0.0;
  double h0 = 0.0;
};

/// Center entry of the fiber metric at t = 1, chosen so that |[,]|^2 = 1/(a + C).
double family_center_entry(const CanonicalFamilyParams& p);
double family_h0(const CanonicalFamilyParams& p);

/// Solves the family system with an embedded Fehlberg 7(8) pair at local
/// tolerance 1e-12, independently of the flow integrator.
std::vector<FamilyPoint> integrate_family(const CanonicalFamilyParams& p, const std::vector<double>& times);

/// Grid state of the family member at time t. The block must be diagonal; the
/// connection is flat and the monodromy twist is sqrt(g1)/2 so that |DG|^2 = 2/t.
FlowState family_state(const CanonicalFamilyParams& p, double t, const Grid& grid);

struct BlowdownResidual {
  double scale = 1.0;
  double t_lo = 0.5;
  double t_hi = 2.0;
  double q_deviation = 0.0;     // sup |t Q - 2|
  double trace_dg = 0.0;        // sup |DG(.,.)|
  double mixed_torsion = 0.0;   // sup t tr_g H^2
  double energy_defect = 0.0;   // sup_t t int S_B dV / sqrt(t)
  double off_block = 0.0;       // sup |DG(eta_a, zeta)|
  double connection_rate = 0.0; // sup |d_t a|
  double C_fit = 0.0;           // in rescaled units
  double C_fit_error = 0.0;     // rms fit residual
  double C_original = 0.0;      // C_fit * scale

  std::vector<double> components() const {
    return {q_deviation, trace_dg, mixed_torsion, energy_defect, off_block, connection_rate};
  }
  static const std::vector<std::string>& component_names();
};

/// Least-squares C in t Phi(t) = t / (a t + C) over the given samples.
double fit_family_C(const std::vector<double>& t, const std::vector<double>& t_phi, double* rms = nullptr);

BlowdownResidual blowdown_residual(const Trajectory& traj, double s, double t_lo = 0.5, double t_hi = 2.0,
                                   int samples = 31);
std::vector<BlowdownResidual> compare_to_family(const Trajectory& traj, const std::vector<double>& scales,
                                                double t_lo = 0.5, double t_hi = 2.0, int samples = 31);

struct RigidityReport {
  double trace_dg = 0.0;
  double mixed_torsion = 0.0;
  double second_order = 0.0;  // sup |D D G - DG DG|
  double bracket_spread = 0.0;
  double dg_spread = 0.0;
  double hg_spread = 0.0;
  double center_dg = 0.0;     // sup |DG restricted to or touching the center|
  double block_relation = 0.0;  // sup |(D DG) - 1/2 |DG|^2 G| on the block
  double connection_rate = 0.0;

  double max() const;
};

RigidityReport rigidity_report(const FlowState& s);

}  // namespace nilflow
