#pragma once

#include "nilflow/canonical_limits.hpp"
#include "nilflow/initial_data.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace nilflow {

enum class Quantity { bracket, hg, dg, trh2, sum };

std::string_view to_string(Quantity q);
const std::vector<Quantity>& all_quantities();

/// The scalar whose evolution identity is checked.
double quantity_value(const PointScalars& p, Quantity q);

/// Right-hand side of the evolution identity for the quantity, without the
/// Laplacian term.
double identity_reaction(const UnitFrame& u, Quantity q);

/// Pointwise residual at `cur`: centered difference of the quantity between
/// `prev` and `next` minus (Laplacian + reaction terms) evaluated at `cur`.
ScalarField identity_residual(const FlowState& prev, const FlowState& cur, const FlowState& next, Quantity q);

struct LadderRung {
  int n = 0;
  double dx = 0.0;
  double delta = 0.0;
  double residual = 0.0;  // max over sampled times of the sup-norm residual
  std::vector<double> per_time;
};

struct ConsistencyReport {
  Quantity quantity = Quantity::sum;
  std::vector<double> times;
  std::vector<LadderRung> ladder;
  double order = 0.0;         // fitted in delta
  double extrapolated = 0.0;  // |r_fine - (r_mid - r_fine)/(ratio^p - 1)|
  double threshold = 0.0;     // pass threshold on the extrapolated residual
  double min_order = 2.0;
  bool passed = false;
};

/// Single-trajectory check at the given times; every sampled time must have a
/// snapshot on each side at equal spacing.
ConsistencyReport consistency_check(const Trajectory& traj, Quantity q, const std::vector<double>& times);

struct LadderSpec {
  LieStructure L = LieStructure::heisenberg();
  double length = 6.283185307179586;
  InitialDataParams init;
  std::vector<int> grid_sizes{64, 128, 256};
  double delta0 = 0.03;
  double refine_ratio = 4.0;  // delta shrinks by this factor per rung
  std::vector<double> times{0.21, 0.30, 0.39};
  double cfl_sigma = 0.2;
  double threshold = 1e-6;
  double min_order = 2.0;
  FlowConventions conventions;
};

/// Fits log r against log delta by least squares.
double fit_order(const std::vector<double>& delta, const std::vector<double>& r);
double extrapolate_residual(double r_mid, double r_fine, double ratio, double order);

/// Runs one fixed-step evolution per rung and checks all five identities.
std::vector<ConsistencyReport> run_ladder(const LadderSpec& spec);

struct OraclePoint {
  double t = 0.0;
  Mat3 G = Mat3::Identity();
  double g = 1.0;
  double Phi = 0.0;  // |[,]|^2
  double Psi = 0.0;  // |H^G|^2
};

/// High-order ODE solve of the x-independent reduction (a = 0, m = 0), using
/// explicit index sums rather than the flow's matrix expressions.
std::vector<OraclePoint> homogeneous_oracle(const LieStructure& L, const Mat3& G0, double g0, double h0, double t0,
                                            const std::vector<double>& times);
std::vector<OraclePoint> homogeneous_oracle(const FlowState& s, const std::vector<double>& times);

/// Phi(t) = 1/((3/2)(t - t0) + 1/Phi0) for H = 0.
double riccati_closed_form(double t, double t0, double Phi0);

struct AuditFlag {
  double t = 0.0;
  std::string monitor;
  double value = 0.0;
};

struct AuditReport {
  bool hypothesis_holds = true;
  std::vector<AuditFlag> flags;
  bool decreasing_above_threshold = true;
  bool d2_bounded = true;
  double max_monitor_bracket = 0.0;
  double max_monitor_hg = 0.0;
  double max_monitor_q = 0.0;
  double max_monitor_d2 = 0.0;
  bool g_nondecreasing = true;
  bool growth_cap_holds = true;

  bool clean() const { return flags.empty() && d2_bounded && g_nondecreasing && growth_cap_holds; }
};

AuditReport maximum_principle_audit(const Trajectory& traj, double tol = 1e-3, double growth_tol = 1e-6);

}  // namespace nilflow
