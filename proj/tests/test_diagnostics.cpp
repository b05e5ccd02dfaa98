#include "nilflow/diagnostics.hpp"
#include "nilflow/flow_rhs.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace nilflow;
using namespace testing_support;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

FlowState homogeneous(const LieStructure& L, const Mat3& G, double h0, int n = 16) {
  FlowState s = flat_state(Grid(n, kTwoPi), L, h0);
  s.G.assign(s.size(), G);
  return s;
}

FlowState scaled(const FlowState& s, double f) {
  FlowState out = s;
  for (auto& G : out.G) G *= f;
  for (auto& g : out.g) g *= f;
  for (auto& m : out.m) m *= f;
  out.h0 *= f;
  return out;
}

}  // namespace

TEST(ScalarFields, FlatAbelianIsZero) {
  const FlowState s = flat_state(Grid(32, kTwoPi), LieStructure::abelian());
  const ScalarFields f = scalar_fields(s);
  for (const ScalarField* v : {&f.bracket_sq, &f.hg_sq, &f.dg_sq, &f.trh2, &f.q_sum, &f.trace_dg, &f.s_a, &f.s_b, &f.d2})
    for (double x : *v) EXPECT_EQ(x, 0.0);
}

TEST(ScalarFields, HomogeneousHeisenberg) {
  const FlowState s = homogeneous(LieStructure::heisenberg(1.0), Mat3::Identity(), 1.0);
  const ScalarFields f = scalar_fields(s);
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_NEAR(f.bracket_sq[i], 2.0, 1e-14);
    EXPECT_NEAR(f.hg_sq[i], 6.0, 1e-14);
    EXPECT_EQ(f.dg_sq[i], 0.0);
    EXPECT_EQ(f.trh2[i], 0.0);
  }
}

TEST(ScalarFields, DiagonalPerturbationSeries) {
  const double e = 0.01;
  FlowState s = flat_state(Grid(256, kTwoPi), LieStructure::heisenberg(1.0));
  for (int i = 0; i < 256; ++i) {
    const double v = e * std::sin(s.grid.x(i));
    s.G[i] = Vec3(std::exp(v), std::exp(-v), 1.0).asDiagonal();
  }
  const ScalarFields f = scalar_fields(s);
  for (int i = 0; i < 256; ++i) {
    const double c = std::cos(s.grid.x(i));
    EXPECT_NEAR(f.dg_sq[i], 2 * e * e * c * c, 10 * e * e * e * e);
    EXPECT_LT(f.trace_dg[i], 10 * e * e);
  }
}

TEST(ScalarFields, MatchCoordinateFormulas) {
  const FlowState s = generic_state(64, 3, 0.6, 0.2);
  const FlowKinematics k = kinematics(s);
  const ScalarFields f = scalar_fields(s, k);
  for (std::size_t x = 0; x < s.size(); ++x) {
    const Mat3 Gi = s.G[x].inverse();
    EXPECT_NEAR(f.dg_sq[x], contract(Gi, k.DG[x], k.DG[x]) / s.g[x], 1e-11);
    EXPECT_NEAR(f.trh2[x], contract(Gi, s.m[x], s.m[x]) / s.g[x], 1e-11);
    EXPECT_NEAR(f.trace_dg[x], std::abs((Gi * k.DG[x]).trace()) / std::sqrt(s.g[x]), 1e-12);
    EXPECT_NEAR(f.bracket_sq[x], bracket_norm_sq(s.L, s.G[x]), 1e-11);
    EXPECT_NEAR(f.hg_sq[x], hg_norm_sq(s.L, s.G[x], s.h0), 1e-11);
    EXPECT_NEAR(f.q_sum[x], f.dg_sq[x] + f.trh2[x], 1e-14);
  }
}

TEST(UnitFrame, OrthonormalWithCenterLast) {
  const FlowState s = generic_state(32, 4);
  const auto frames = unit_frames(s, kinematics(s));
  for (std::size_t x = 0; x < s.size(); ++x) {
    const Mat3& E = frames[x].E;
    EXPECT_NEAR(max_abs_diff(E.transpose() * s.G[x] * E, Mat3::Identity()), 0.0, 1e-13);
    EXPECT_NEAR((E.col(2) - unit_center(s.G[x])).norm(), 0.0, 1e-14);
    // structure constants transform as a (1,2)-tensor
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const Vec3 br = s.L.bracket(E.col(a), E.col(b));
        Vec3 framed;
        for (int c = 0; c < 3; ++c) framed(c) = frames[x].C[c](a, b);
        EXPECT_NEAR((E * framed - br).norm(), 0.0, 1e-12);
      }
  }
}

TEST(ScalarFields, TorsionContractionIdentity) {
  // sum_i H^2(eta_i, eta_i) = |H^G|^2 + 2 H^2(v, v), with H^2 built from the
  // four-dimensional tensor in coordinates (x, e1, e2, e3).
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const FlowState s = generic_state(32, seed, 0.9);
    const ScalarFields f = scalar_fields(s);
    for (std::size_t x = 0; x < s.size(); ++x) {
      double H[4][4][4] = {};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          for (int k = 0; k < 3; ++k) H[i + 1][j + 1][k + 1] = s.h0 * levi_civita(i, j, k);
          H[0][i + 1][j + 1] = s.m[x](i, j);
          H[i + 1][0][j + 1] = -s.m[x](i, j);
          H[i + 1][j + 1][0] = s.m[x](i, j);
        }
      Eigen::Matrix4d ginv = Eigen::Matrix4d::Zero();
      ginv(0, 0) = 1.0 / s.g[x];
      ginv.bottomRightCorner<3, 3>() = s.G[x].inverse();
      Eigen::Matrix4d H2 = Eigen::Matrix4d::Zero();
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          for (int c = 0; c < 4; ++c)
            for (int d = 0; d < 4; ++d)
              for (int e = 0; e < 4; ++e)
                for (int h = 0; h < 4; ++h) H2(a, b) += H[a][c][d] * H[b][e][h] * ginv(c, e) * ginv(d, h);
      const double fiber_trace = (ginv.bottomRightCorner<3, 3>() * H2.bottomRightCorner<3, 3>()).trace();
      const double vv = H2(0, 0) / s.g[x];
      EXPECT_NEAR(fiber_trace, f.hg_sq[x] + 2.0 * vv, 1e-12 * (1.0 + fiber_trace));
      EXPECT_NEAR(vv, f.trh2[x], 1e-12 * (1.0 + vv));
    }
  }
}

TEST(DefectDensities, Examples) {
  FlowState s = homogeneous(LieStructure::heisenberg(1.0), Vec3(2, 1, 0.5).asDiagonal(), 0.0);
  for (double v : S_A(s)) EXPECT_NEAR(v, 0.0, 1e-15);

  const FlowState hom = homogeneous(LieStructure::heisenberg(1.0), Mat3::Identity(), 1.0);
  for (double v : S_A(hom)) EXPECT_NEAR(v, 2.0, 1e-13);

  FlowState ab = generic_state(32, 2, 0.8);
  ab.L = LieStructure::abelian();
  for (double v : S_A(ab)) EXPECT_NEAR(v, 0.0, 1e-15);

  for (double v : S_B(flat_state(Grid(16, kTwoPi), LieStructure::abelian()))) EXPECT_EQ(v, 0.0);
}

TEST(DefectDensities, NonnegativeOnRandomStates) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const FlowState s = generic_state(32, seed, 0.2 * static_cast<double>(seed % 5), 0.1 * (seed % 3));
    const ScalarFields f = scalar_fields(s);
    for (std::size_t x = 0; x < s.size(); ++x) {
      EXPECT_GE(f.s_a[x], 0.0);
      EXPECT_GE(f.s_b[x], 0.0);
      EXPECT_GE(f.d2[x], 0.0);
    }
  }
}

TEST(DefectDensities, CenterReadingIsMixedBlock) {
  // With trace-free DG the center term reduces to twice the mixed block:
  // (tr K - 2K_zz)^2 = 4 K_zz^2, and S_B uses (K_1z^2 + K_2z^2) separately.
  const FlowState s = generic_state(32, 5);
  const auto frames = unit_frames(s, kinematics(s));
  for (const UnitFrame& u : frames) {
    const DefectTerms d = defect_terms(u);
    EXPECT_NEAR(d.mixed_sq, u.K(0, 2) * u.K(0, 2) + u.K(1, 2) * u.K(1, 2), 1e-14);
    const double tz = u.K.trace() - 2.0 * u.K(2, 2);
    EXPECT_NEAR(d.center_sq, tz * tz, 1e-13);
  }
}

TEST(Energy, FlatValueAndLowerBound) {
  const FlowState flat = flat_state(Grid(64, kTwoPi), LieStructure::abelian());
  EXPECT_NEAR(energy_I(flat, 4.0), kTwoPi, 1e-12);
  const FlowState s = generic_state(64, 6);
  for (double tau : {0.1, 1.0, 7.0}) EXPECT_GE(energy_I(s, tau), 2.0 * volume(s) / std::sqrt(tau));
  EXPECT_THROW(energy_I(s, 0.0), std::invalid_argument);
  EXPECT_THROW(energy_I(s, -1.0), std::invalid_argument);
}

TEST(Energy, ScaleInvariance) {
  const FlowState s = generic_state(64, 7, 0.5, 0.2);
  const double tau = 1.3;
  const double I0 = energy_I(s, tau);
  for (double f : {0.5, 2.0, 10.0}) EXPECT_NEAR(energy_I(scaled(s, f), f * tau), I0, 1e-12 * I0);
}

TEST(Diameter, Examples) {
  FlowState s = flat_state(Grid(32, kTwoPi), LieStructure::heisenberg());
  EXPECT_NEAR(diameter(s), std::numbers::pi, 1e-13);
  s.g.assign(32, 4.0);
  EXPECT_NEAR(diameter(s), kTwoPi, 1e-13);
}

TEST(GaugeVector, Examples) {
  const FlowState hom = homogeneous(LieStructure::heisenberg(1.0), Vec3(2, 1, 3).asDiagonal(), 0.5);
  for (double q : gauge_vector(hom)) EXPECT_EQ(q, 0.0);

  FlowState unimod = generic_state(256, 3, 0.5, 0.3);
  for (int i = 0; i < 256; ++i) {
    const double v = 0.02 * std::sin(unimod.grid.x(i));
    unimod.G[i] = Vec3(std::exp(v), std::exp(-v), 1.0).asDiagonal();
  }
  for (double q : gauge_vector(unimod)) EXPECT_NEAR(q, 0.0, 1e-10);

  const double e = 0.01;
  FlowState s = flat_state(Grid(128, kTwoPi), LieStructure::heisenberg(1.0));
  for (int i = 0; i < 128; ++i) s.G[i](0, 0) = std::exp(e * std::sin(s.grid.x(i)));
  const ScalarField q = gauge_vector(s);
  for (int i = 0; i < 128; ++i) EXPECT_NEAR(q[i], -0.5 * e * std::cos(s.grid.x(i)), 1e-9);
}

TEST(Record, ColumnsAndMonitors) {
  FlowState s = generic_state(32, 8);
  EXPECT_TRUE(std::isnan(diagnostics_record(s).energy_I));
  s.t = 0.7;
  const DiagnosticsRecord r = diagnostics_record(s);
  EXPECT_EQ(record_columns().size(), record_values(r).size());
  EXPECT_EQ(record_columns().front(), "t");
  const ScalarFields f = scalar_fields(s);
  EXPECT_EQ(r.monitor_bracket, 0.7 * *std::max_element(f.bracket_sq.begin(), f.bracket_sq.end()));
  EXPECT_EQ(r.monitor_q, 0.7 * *std::max_element(f.q_sum.begin(), f.q_sum.end()));
  EXPECT_EQ(r.monitor_d2, 0.7 * 0.7 * *std::max_element(f.d2.begin(), f.d2.end()));
  EXPECT_NEAR(r.energy_I, energy_I(s, 0.7), 1e-13);
  EXPECT_EQ(r.diameter, diameter(s));
}

TEST(Record, ScalingUnderBlowdown) {
  // (G, g, h0, m) -> (G, g, h0, m)/s scales curvature-type norms by s.
  FlowState s = generic_state(64, 9, 0.7, 0.2);
  s.t = 2.0;
  const DiagnosticsRecord r = diagnostics_record(s);
  for (double f : {0.5, 4.0}) {
    const DiagnosticsRecord q = diagnostics_record(scaled(s, 1.0 / f));
    EXPECT_NEAR(q.bracket_sq.sup, f * r.bracket_sq.sup, 1e-12 * f * r.bracket_sq.sup);
    EXPECT_NEAR(q.q_sum.sup, f * r.q_sum.sup, 1e-12 * f * r.q_sum.sup);
    EXPECT_NEAR(q.trace_dg.sup, std::sqrt(f) * r.trace_dg.sup, 1e-12 * r.trace_dg.sup * std::sqrt(f));
    EXPECT_NEAR(q.s_b.sup, f * f * r.s_b.sup, 1e-11 * f * f * r.s_b.sup);
    EXPECT_NEAR(q.d2.sup, f * f * r.d2.sup, 1e-11 * f * f * r.d2.sup);
    EXPECT_NEAR(q.volume, r.volume / std::sqrt(f), 1e-12 * r.volume);
  }
}
