#include "nilflow/verify_harness.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace nilflow;
using namespace testing_support;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

FlowState homogeneous(const Mat3& G, double h0, double t) {
  FlowState s = flat_state(Grid(16, kTwoPi), LieStructure::heisenberg(1.0), h0);
  s.G.assign(s.size(), G);
  s.t = t;
  return s;
}

// Residual at t from oracle states at t - d, t, t + d.
double oracle_residual(const Mat3& G0, double h0, double t, double d, Quantity q) {
  const auto pts = homogeneous_oracle(LieStructure::heisenberg(1.0), G0, 1.0, h0, 0.0, {t - d, t, t + d});
  return sup_norm(identity_residual(homogeneous(pts[0].G, h0, t - d), homogeneous(pts[1].G, h0, t),
                                    homogeneous(pts[2].G, h0, t + d), q));
}

}  // namespace

TEST(IdentityResidual, StationaryFlatIsZero) {
  FlowState s = flat_state(Grid(32, kTwoPi), LieStructure::abelian());
  FlowState a = s, b = s, c = s;
  a.t = 0.1, b.t = 0.2, c.t = 0.3;
  for (Quantity q : all_quantities())
    for (double r : identity_residual(a, b, c, q)) EXPECT_EQ(r, 0.0) << to_string(q);
  EXPECT_THROW(identity_residual(c, b, a, Quantity::sum), std::invalid_argument);
}

TEST(IdentityResidual, HomogeneousOrderTwoInDelta) {
  const Mat3 G0 = Vec3(1.4, 0.7, 1.1).asDiagonal();
  for (Quantity q : {Quantity::bracket, Quantity::hg}) {
    const double r1 = oracle_residual(G0, 0.6, 0.5, 0.02, q);
    const double r2 = oracle_residual(G0, 0.6, 0.5, 0.01, q);
    EXPECT_LT(r1, 1e-3) << to_string(q);
    EXPECT_NEAR(std::log2(r1 / r2), 2.0, 0.05) << to_string(q);
  }
  EXPECT_EQ(oracle_residual(G0, 0.6, 0.5, 0.02, Quantity::sum), 0.0);
}

TEST(IdentityResidual, GenericRunConvergesInDelta) {
  const FlowState s0 = generic_state(128, 2, 0.4, 0.1);
  auto residual = [&](double delta, Quantity q) {
    StepController ctrl;
    ctrl.fixed_dt = delta / std::ceil(delta / cfl_limit(s0, ctrl.cfl_sigma));
    EvolveOptions o;
    o.snapshot_cadence = delta;
    o.diagnostics_cadence = 0.3;
    const Trajectory tr = evolve(s0, 0.3, ctrl, o);
    const ConsistencyReport rep = consistency_check(tr, q, {0.24});
    EXPECT_NEAR(rep.ladder.at(0).delta, delta, 1e-15);
    return rep.ladder.at(0).residual;
  };
  for (Quantity q : all_quantities()) {
    const double r1 = residual(0.02, q), r2 = residual(0.01, q);
    EXPECT_NEAR(std::log2(r1 / r2), 2.0, 0.1) << to_string(q);
  }
}

TEST(ConsistencyCheck, RejectsCoarseCadence) {
  const FlowState s0 = generic_state(16, 3);
  EvolveOptions o;
  o.snapshot_cadence = 0.1;
  const Trajectory two = evolve(s0, 0.1, StepController{}, o);
  EXPECT_THROW(consistency_check(two, Quantity::sum, {0.05}), std::invalid_argument);
  const Trajectory tr = evolve(s0, 0.3, StepController{}, o);
  EXPECT_THROW(consistency_check(tr, Quantity::sum, {0.15}), std::invalid_argument);
  EXPECT_THROW(consistency_check(tr, Quantity::sum, {0.0}), std::invalid_argument);
  EXPECT_NO_THROW(consistency_check(tr, Quantity::sum, {0.1, 0.2}));
}

TEST(OrderFit, ExactPowerLaws) {
  EXPECT_NEAR(fit_order({0.1, 0.05, 0.025}, {3e-2, 7.5e-3, 1.875e-3}), 2.0, 1e-12);
  EXPECT_NEAR(fit_order({1.0, 0.25}, {1.0, 0.125}), 1.5, 1e-12);
  EXPECT_THROW(fit_order({1.0}, {1.0}), std::invalid_argument);
  EXPECT_THROW(fit_order({1.0, 0.5}, {1.0}), std::invalid_argument);
}

TEST(OrderFit, Extrapolation) {
  // r = A d^2 + r_inf with ratio 4
  const double A = 1e-3, r_inf = 2e-7;
  EXPECT_NEAR(extrapolate_residual(A * 16 + r_inf, A + r_inf, 4.0, 2.0), r_inf, 1e-15);
  EXPECT_EQ(extrapolate_residual(1.0, 0.5, 4.0, 0.0), 0.5);
}

TEST(HomogeneousOracle, HeisenbergRiccati) {
  const auto pts = homogeneous_oracle(LieStructure::heisenberg(1.0), Mat3::Identity(), 1.0, 0.0, 0.0, {0.0, 1.0, 3.0});
  EXPECT_NEAR(pts[1].Phi, 0.5, 1e-12);
  for (const OraclePoint& p : pts) {
    EXPECT_NEAR(p.Phi, riccati_closed_form(p.t, 0.0, 2.0), 1e-12);
    EXPECT_NEAR(p.G(2, 2), std::cbrt(1.0 / (3.0 * p.t + 1.0)), 1e-12);
    EXPECT_NEAR(p.G(0, 0), std::cbrt(3.0 * p.t + 1.0), 1e-11);
    EXPECT_NEAR(std::abs(p.G(0, 1)) + std::abs(p.G(0, 2)) + std::abs(p.G(1, 2)), 0.0, 1e-14);
  }
}

TEST(HomogeneousOracle, AbelianIsConstant) {
  const Mat3 G = Vec3(2.0, 0.5, 1.5).asDiagonal();
  const auto pts = homogeneous_oracle(LieStructure::abelian(), G, 1.0, 0.0, 0.0, {0.5, 4.0});
  for (const OraclePoint& p : pts) EXPECT_EQ(p.G, G);
}

TEST(HomogeneousOracle, AgreesWithFlowIntegrator) {
  const FlowState s0 = homogeneous(Vec3(1.2, 0.9, 0.8).asDiagonal(), 0.7, 0.0);
  EvolveOptions o;
  o.snapshot_cadence = 0.25;
  const Trajectory tr = evolve(s0, 1.0, StepController{}, o);
  const auto pts = homogeneous_oracle(s0, {1.0});
  EXPECT_NEAR(max_abs_diff(tr.states.back().G[7], pts[0].G), 0.0, 1e-7);
  EXPECT_NEAR(bracket_norm_sq(s0.L, tr.states.back().G[3]), pts[0].Phi, 1e-7);
  EXPECT_NEAR(hg_norm_sq(s0.L, tr.states.back().G[3], s0.h0), pts[0].Psi, 1e-7);
}

TEST(HomogeneousOracle, RejectsUnsuitableInputs) {
  EXPECT_THROW(homogeneous_oracle(generic_state(16, 1), {1.0}), std::invalid_argument);
  FlowState tw = homogeneous(Mat3::Identity(), 0.0, 0.0);
  tw.twist = Vec3(0.2, -0.2, 0.0).asDiagonal();
  EXPECT_THROW(homogeneous_oracle(tw, {1.0}), std::invalid_argument);
  EXPECT_THROW(homogeneous_oracle(homogeneous(Mat3::Identity(), 0.0, 1.0), {0.5}), std::invalid_argument);
  EXPECT_THROW(homogeneous_oracle(LieStructure::heisenberg(), -Mat3::Identity(), 1.0, 0.0, 0.0, {1.0}), DomainError);
}

TEST(Audit, SharpFamilyMemberIsClean) {
  CanonicalFamilyParams p;
  p.C = 0.0;
  p.block = Eigen::Vector2d(1.0, 2.0).asDiagonal();
  const FlowState s0 = family_state(p, 0.5, Grid(16, kTwoPi));
  EvolveOptions o;
  o.snapshot_cadence = 0.25;
  o.diagnostics_cadence = 0.25;
  const Trajectory tr = evolve(s0, 3.0, StepController{}, o);
  const AuditReport rep = maximum_principle_audit(tr);
  EXPECT_TRUE(rep.hypothesis_holds);
  EXPECT_TRUE(rep.clean());
  EXPECT_NEAR(rep.max_monitor_bracket, 2.0 / 3.0, 1e-8);
  EXPECT_NEAR(rep.max_monitor_q, 2.0, 1e-8);
}

TEST(Audit, AdversarialStartIsNotFlagged) {
  // t0 = 1 with t|[,]|^2 = 2 above the 2/3 threshold: no hypothesis, no flags,
  // and the monitor decreases.
  const FlowState s0 = homogeneous(Mat3::Identity(), 0.0, 1.0);
  EvolveOptions o;
  o.snapshot_cadence = 0.5;
  o.diagnostics_cadence = 0.5;
  const Trajectory tr = evolve(s0, 4.0, StepController{}, o);
  const AuditReport rep = maximum_principle_audit(tr);
  EXPECT_FALSE(rep.hypothesis_holds);
  EXPECT_TRUE(rep.flags.empty());
  EXPECT_TRUE(rep.decreasing_above_threshold);
  EXPECT_NEAR(rep.max_monitor_bracket, 2.0, 1e-12);
}

TEST(Audit, GenericShortRunIsClean) {
  const FlowState s0 = generic_state(32, 4, 0.5, 0.2);
  EvolveOptions o;
  o.snapshot_cadence = 0.05;
  o.diagnostics_cadence = 0.05;
  const Trajectory tr = evolve(s0, 0.5, StepController{}, o);
  const AuditReport rep = maximum_principle_audit(tr);
  EXPECT_TRUE(rep.hypothesis_holds);
  // d2 is still growing from zero this early, so only the monotone checks apply
  EXPECT_TRUE(rep.flags.empty());
  EXPECT_TRUE(rep.g_nondecreasing);
  EXPECT_TRUE(rep.growth_cap_holds);
  EXPECT_LE(rep.max_monitor_bracket, 2.0 / 3.0);
}
