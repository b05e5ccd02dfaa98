#include "nilflow/canonical_limits.hpp"
#include "nilflow/flow_rhs.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace nilflow;
using namespace testing_support;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Classical fourth-order Runge-Kutta on (Phi, Psi, log block, log center),
// written out independently of the library's family solver.
std::array<double, 4> rk4_family(double phi, double psi, double t0, double t1, int steps) {
  auto f = [](const std::array<double, 4>& y) {
    return std::array<double, 4>{-1.5 * y[0] * y[0] - y[1] * y[0] / 6.0, -0.5 * y[1] * y[1] - 0.5 * y[1] * y[0],
                                 0.5 * y[0] + y[1] / 6.0, -0.5 * y[0] + y[1] / 6.0};
  };
  std::array<double, 4> y{phi, psi, 0.0, 0.0};
  const double h = (t1 - t0) / steps;
  for (int n = 0; n < steps; ++n) {
    const auto k1 = f(y);
    std::array<double, 4> y2, y3, y4;
    for (int i = 0; i < 4; ++i) y2[i] = y[i] + 0.5 * h * k1[i];
    const auto k2 = f(y2);
    for (int i = 0; i < 4; ++i) y3[i] = y[i] + 0.5 * h * k2[i];
    const auto k3 = f(y3);
    for (int i = 0; i < 4; ++i) y4[i] = y[i] + h * k3[i];
    const auto k4 = f(y4);
    for (int i = 0; i < 4; ++i) y[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  return y;
}

CanonicalFamilyParams params(double C, double psi0) {
  CanonicalFamilyParams p;
  p.C = C;
  p.psi0 = psi0;
  p.block = Eigen::Vector2d(1.3, 0.8).asDiagonal();
  p.g1 = 2.0;
  return p;
}

Trajectory short_run(const FlowState& s0, double t_end, double cadence) {
  EvolveOptions o;
  o.snapshot_cadence = cadence;
  o.diagnostics_cadence = cadence;
  return evolve(s0, t_end, StepController{}, o);
}

}  // namespace

TEST(Rescale, IdentityAtUnitScale) {
  const FlowState s = generic_state(32, 1);
  const FlowState r = rescale(s, 1.0);
  EXPECT_EQ(r.G, s.G);
  EXPECT_EQ(r.g, s.g);
  EXPECT_EQ(r.a, s.a);
  EXPECT_EQ(r.m, s.m);
  EXPECT_EQ(r.h0, s.h0);
  EXPECT_THROW(rescale(s, 0.0), std::invalid_argument);
}

TEST(Rescale, Composes) {
  FlowState s = generic_state(32, 2);
  s.t = 3.0;
  const FlowState a = rescale(rescale(s, 2.0), 5.0);
  const FlowState b = rescale(s, 10.0);
  EXPECT_NEAR(a.t, b.t, 1e-15);
  EXPECT_NEAR(a.h0, b.h0, 1e-16);
  for (std::size_t x = 0; x < s.size(); ++x) {
    EXPECT_NEAR(max_abs_diff(a.G[x], b.G[x]), 0.0, 1e-15);
    EXPECT_NEAR(a.g[x], b.g[x], 1e-15);
    EXPECT_EQ(a.a[x], b.a[x]);
  }
}

TEST(Rescale, MonitorsAndEnergyAreInvariant) {
  FlowState s = generic_state(64, 3, 0.7, 0.2);
  s.t = 4.0;
  const DiagnosticsRecord r0 = diagnostics_record(s);
  for (double f : {0.5, 2.0, 10.0}) {
    const FlowState k = rescale(s, f);
    const DiagnosticsRecord r1 = diagnostics_record(k);
    EXPECT_NEAR(r1.monitor_q, r0.monitor_q, 1e-12 * r0.monitor_q);
    EXPECT_NEAR(r1.monitor_bracket, r0.monitor_bracket, 1e-12 * r0.monitor_bracket);
    EXPECT_NEAR(r1.monitor_hg, r0.monitor_hg, 1e-12 * r0.monitor_hg);
    EXPECT_NEAR(energy_I(k, k.t), energy_I(s, s.t), 1e-12 * energy_I(s, s.t));
    // record rescaling agrees with recomputation on the rescaled state
    const DiagnosticsRecord r2 = rescale(r0, f);
    const std::vector<double> a = record_values(r1), b = record_values(r2);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-11 * (1.0 + std::abs(a[i]))) << record_columns()[i];
  }
}

TEST(Rescale, TrajectoryWindow) {
  const FlowState s0 = generic_state(16, 4);
  const Trajectory tr = short_run(s0, 0.4, 0.05);
  const Trajectory w = rescale(tr, 2.0, 0.05, 0.2);
  EXPECT_EQ(w.states.size(), 7u);
  EXPECT_NEAR(w.states.front().t, 0.05, 1e-15);
  EXPECT_NEAR(w.states.back().t, 0.2, 1e-15);
  EXPECT_THROW(rescale(tr, 2.0, 0.05, 0.3), std::invalid_argument);
  EXPECT_EQ(rescale(tr, 3.0).states.size(), tr.states.size());
}

TEST(StateAt, HermiteInterpolation) {
  const FlowState s0 = generic_state(16, 5, 0.3);
  const Trajectory ref = short_run(s0, 0.1, 0.005);
  auto midpoint_error = [&](double h, double t) {
    const Trajectory tr = short_run(s0, 0.1, h);
    const FlowState mid = state_at(tr, t);
    const FlowState& exact = ref.states[static_cast<std::size_t>(std::lround(t / 0.005))];
    double err = 0.0;
    for (std::size_t x = 0; x < s0.size(); ++x) err = std::max(err, max_abs_diff(mid.G[x], exact.G[x]));
    return err;
  };
  const Trajectory coarse = short_run(s0, 0.1, 0.02);
  EXPECT_EQ(state_at(coarse, 0.04).G, coarse.states[2].G);
  const double e1 = midpoint_error(0.02, 0.05), e2 = midpoint_error(0.01, 0.055);
  EXPECT_LT(e1, 1e-5);
  EXPECT_GT(e1 / e2, 6.0);
  EXPECT_THROW(state_at(coarse, 0.2), std::invalid_argument);
}

TEST(FamilyOde, Examples) {
  const FamilyRates z = family_ode_rhs(0.0, 0.0);
  EXPECT_EQ(z.dPhi, 0.0);
  EXPECT_EQ(z.dPsi, 0.0);
  EXPECT_EQ(z.rate_g0, 0.0);
  EXPECT_EQ(z.rate_z, 0.0);
  EXPECT_DOUBLE_EQ(family_ode_rhs(2.0, 0.0).dPhi, -6.0);
  const FamilyRates r = family_ode_rhs(2.0, 6.0);
  EXPECT_DOUBLE_EQ(r.dPhi, -8.0);
  EXPECT_DOUBLE_EQ(r.dPsi, -24.0);
  EXPECT_THROW(family_ode_rhs(-1.0, 0.0), std::domain_error);
  EXPECT_THROW(family_ode_rhs(1.0, -1e-3), std::domain_error);
}

TEST(FamilyClosedForm, Examples) {
  for (double t : {0.1, 1.0, 3.0, 50.0}) EXPECT_NEAR(t * family_closed_form(t, 0.0).Phi, 2.0 / 3.0, 1e-15);
  for (double C : {0.0, 0.4, 7.0}) {
    const FamilyClosedForm f = family_closed_form(1.0, C);
    EXPECT_NEAR(f.factor_g0, 1.0, 1e-15);
    EXPECT_NEAR(f.factor_z, 1.0, 1e-15);
  }
  EXPECT_THROW(family_closed_form(0.0, 1.0), std::invalid_argument);
}

TEST(FamilyClosedForm, SatisfiesOde) {
  for (double C : {0.0, 0.3, 2.0})
    for (double t : {0.5, 1.0, 4.0}) {
      const FamilyClosedForm f = family_closed_form(t, C);
      const double u = 1.5 * t + C;
      const double dPhi = -1.5 / (u * u);  // analytic derivative of 1/u
      EXPECT_NEAR(dPhi, family_ode_rhs(f.Phi, 0.0).dPhi, 1e-12);
      const double h = 1e-5;
      const double dlog_g0 = (std::log(family_closed_form(t + h, C).factor_g0) -
                              std::log(family_closed_form(t - h, C).factor_g0)) / (2 * h);
      const double dlog_z = (std::log(family_closed_form(t + h, C).factor_z) -
                             std::log(family_closed_form(t - h, C).factor_z)) / (2 * h);
      EXPECT_NEAR(dlog_g0, family_ode_rhs(f.Phi, 0.0).rate_g0, 1e-9);
      EXPECT_NEAR(dlog_z, family_ode_rhs(f.Phi, 0.0).rate_z, 1e-9);
    }
}

TEST(IntegrateFamily, MatchesClosedFormWithoutVerticalTorsion) {
  const CanonicalFamilyParams p = params(0.6, 0.0);
  const std::vector<double> ts{0.3, 0.5, 1.0, 2.0, 8.0};
  const auto pts = integrate_family(p, ts);
  const double z1 = family_center_entry(p);
  for (const FamilyPoint& fp : pts) {
    const FamilyClosedForm f = family_closed_form(fp.t, p.C);
    EXPECT_NEAR(fp.Phi, f.Phi, 1e-10);
    EXPECT_NEAR(fp.G(0, 0), 1.3 * f.factor_g0, 1e-10);
    EXPECT_NEAR(fp.G(1, 1), 0.8 * f.factor_g0, 1e-10);
    EXPECT_NEAR(fp.G(2, 2), z1 * f.factor_z, 1e-10);
    EXPECT_NEAR(fp.g, 2.0 * fp.t, 1e-15);
    EXPECT_NEAR(bracket_norm_sq(LieStructure::heisenberg(1.0), fp.G), fp.Phi, 1e-10);
  }
}

TEST(IntegrateFamily, MatchesIndependentRungeKutta) {
  const CanonicalFamilyParams p = params(0.2, 1.5);
  const auto pts = integrate_family(p, {0.5, 3.0});
  const double phi1 = 1.0 / (1.5 + p.C);
  const auto lo = rk4_family(phi1, p.psi0, 1.0, 0.5, 4000);
  const auto hi = rk4_family(phi1, p.psi0, 1.0, 3.0, 8000);
  EXPECT_NEAR(pts[0].Phi, lo[0], 1e-10);
  EXPECT_NEAR(pts[0].Psi, lo[1], 1e-10);
  EXPECT_NEAR(pts[1].Phi, hi[0], 1e-10);
  EXPECT_NEAR(pts[1].Psi, hi[1], 1e-10);
  EXPECT_NEAR(pts[1].G(0, 0), 1.3 * std::exp(hi[2]), 1e-9);
  EXPECT_NEAR(pts[1].G(2, 2), family_center_entry(p) * std::exp(hi[3]), 1e-9);
  // Psi is |H^G|^2 of the synthesized metric
  for (const FamilyPoint& fp : pts)
    EXPECT_NEAR(hg_norm_sq(LieStructure::heisenberg(1.0), fp.G, fp.h0), fp.Psi, 1e-9);
}

TEST(IntegrateFamily, AbelianIsStatic) {
  CanonicalFamilyParams p = params(0.0, 0.0);
  p.c = 0.0;
  const auto pts = integrate_family(p, {0.5, 1.0, 5.0});
  for (const FamilyPoint& fp : pts) {
    EXPECT_NEAR(max_abs_diff(fp.G, pts[1].G), 0.0, 1e-14);
    EXPECT_NEAR(fp.g, fp.t * p.g1, 1e-15);
  }
}

TEST(IntegrateFamily, SharpConstantAsymptotics) {
  const CanonicalFamilyParams p = params(0.9, 0.0);
  const std::vector<double> ts{0.5, 1.0, 10.0, 100.0, 1e4};
  const auto pts = integrate_family(p, ts);
  for (const FamilyPoint& fp : pts) EXPECT_LE(fp.t * fp.Phi, 2.0 / 3.0);
  EXPECT_NEAR(pts.back().t * pts.back().Phi, 2.0 / 3.0, 1e-4);
}

TEST(IntegrateFamily, RejectsBadParameters) {
  EXPECT_THROW(integrate_family(params(-1.0, 0.0), {1.0}), std::invalid_argument);
  EXPECT_THROW(integrate_family(params(0.0, -1.0), {1.0}), std::invalid_argument);
  EXPECT_THROW(integrate_family(params(0.0, 0.0), {0.0}), std::invalid_argument);
  CanonicalFamilyParams p = params(0.0, 0.0);
  p.block(0, 1) = p.block(1, 0) = 0.1;
  EXPECT_THROW(family_state(p, 1.0, Grid(16, 1.0)), std::invalid_argument);
}

TEST(FamilyState, FlowReproducesFamilyRates) {
  for (double psi0 : {0.0, 0.8})
    for (double t : {0.5, 1.0, 2.5}) {
      const CanonicalFamilyParams p = params(0.4, psi0);
      const FlowState s = family_state(p, t, Grid(16, kTwoPi));
      const FamilyPoint fp = integrate_family(p, {t}).front();
      const FamilyRates fr = family_ode_rhs(fp.Phi, fp.Psi);
      const FlowRates r = rhs(s);
      const Mat3 expected = s.G[0] * Vec3(fr.rate_g0, fr.rate_g0, fr.rate_z).asDiagonal();
      const ScalarFields f = scalar_fields(s);
      for (std::size_t x = 0; x < s.size(); ++x) {
        EXPECT_NEAR(max_abs_diff(r.G[x], expected), 0.0, 1e-10);
        EXPECT_NEAR(r.g[x], p.g1, 1e-10);
        EXPECT_NEAR(r.a[x].norm(), 0.0, 1e-12);
        EXPECT_NEAR(r.m[x].cwiseAbs().maxCoeff(), 0.0, 1e-12);
        EXPECT_NEAR(f.dg_sq[x], 2.0 / t, 1e-10);
        EXPECT_NEAR(f.bracket_sq[x], fp.Phi, 1e-10);
        EXPECT_NEAR(f.hg_sq[x], fp.Psi, 1e-10);
        EXPECT_NEAR(f.s_b[x], 0.0, 1e-10);
      }
    }
}

TEST(Rigidity, FamilyMemberAndFlat) {
  const FlowState s = family_state(params(0.3, 0.5), 1.7, Grid(32, kTwoPi));
  EXPECT_LE(rigidity_report(s).max(), 1e-8);
  const FlowState flat = flat_state(Grid(16, kTwoPi), LieStructure::abelian());
  EXPECT_EQ(rigidity_report(flat).max(), 0.0);
}

TEST(Rigidity, GenericMatchesDirectRecomputation) {
  const FlowState s = generic_state(64, 6, 0.4, 0.1);
  const RigidityReport r = rigidity_report(s);
  const ScalarFields f = scalar_fields(s);
  double br_lo = 1e9, br_hi = 0, tr = 0, mt = 0;
  for (std::size_t x = 0; x < s.size(); ++x) {
    const double b = bracket_norm_sq(s.L, s.G[x]);
    br_lo = std::min(br_lo, b);
    br_hi = std::max(br_hi, b);
    tr = std::max(tr, f.trace_dg[x]);
    mt = std::max(mt, f.trh2[x]);
  }
  EXPECT_GT(r.trace_dg, 0.0);
  EXPECT_GT(r.second_order, 0.0);
  EXPECT_GT(r.connection_rate, 0.0);
  EXPECT_NEAR(r.trace_dg, tr, 1e-13);
  EXPECT_NEAR(r.mixed_torsion, mt, 1e-13);
  EXPECT_NEAR(r.bracket_spread, br_hi - br_lo, 1e-11);
  double rate = 0.0;
  for (const Vec3& v : rhs_a(s)) rate = std::max(rate, v.norm());
  EXPECT_NEAR(r.connection_rate, rate, 1e-14);
}

TEST(FitC, RecoversExactData) {
  std::vector<double> t, y;
  for (int j = 0; j < 11; ++j) {
    t.push_back(1.5 + 0.05 * j);
    y.push_back(t.back() / (1.5 * t.back() + 0.37));
  }
  double rms = 1.0;
  EXPECT_NEAR(fit_family_C(t, y, &rms), 0.37, 1e-12);
  EXPECT_LT(rms, 1e-14);
  EXPECT_THROW(fit_family_C({}, {}), std::invalid_argument);
}

TEST(CompareToFamily, FamilyTrajectoryHasSmallResiduals) {
  const CanonicalFamilyParams p = params(0.5, 0.0);
  const FlowState s0 = family_state(p, 0.5, Grid(16, kTwoPi));
  const Trajectory tr = short_run(s0, 4.0, 0.05);
  const auto res = compare_to_family(tr, {2.0, 1.0});
  ASSERT_EQ(res.size(), 2u);
  EXPECT_EQ(res[0].scale, 1.0);
  for (const BlowdownResidual& r : res) {
    EXPECT_LT(r.q_deviation, 1e-8);
    EXPECT_LT(r.trace_dg, 1e-8);
    EXPECT_LT(r.mixed_torsion, 1e-8);
    EXPECT_LT(r.energy_defect, 1e-8);
    EXPECT_LT(r.off_block, 1e-8);
    EXPECT_LT(r.connection_rate, 1e-8);
    EXPECT_NEAR(r.C_original, p.C, 1e-6);
  }
  EXPECT_THROW(blowdown_residual(tr, 4.0), std::invalid_argument);
}

TEST(CompareToFamily, FlatAbelianReportsOnlyCollapsedDeviation) {
  const FlowState s0 = flat_state(Grid(16, kTwoPi), LieStructure::abelian());
  FlowState s = s0;
  s.t = 0.25;
  const Trajectory tr = short_run(s, 2.0, 0.25);
  const BlowdownResidual r = blowdown_residual(tr, 1.0);
  EXPECT_NEAR(r.q_deviation, 2.0, 1e-12);
  EXPECT_EQ(r.trace_dg, 0.0);
  EXPECT_EQ(r.mixed_torsion, 0.0);
  EXPECT_EQ(r.energy_defect, 0.0);
  EXPECT_EQ(r.off_block, 0.0);
  EXPECT_EQ(r.connection_rate, 0.0);
}
