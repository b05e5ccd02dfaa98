#include "nilflow/diagnostics.hpp"

#include "nilflow/flow_rhs.hpp"
#include "nilflow/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nilflow {

Mat3 unit_frame_basis(const Mat3& G) {
  require_spd(G, "unit_frame_basis");
  auto ip = [&G](const Vec3& u, const Vec3& v) { return u.dot(G * v); };
  Vec3 z = Vec3::UnitZ();
  z /= std::sqrt(ip(z, z));
  Vec3 u1 = Vec3::UnitX();
  u1 -= ip(u1, z) * z;
  u1 /= std::sqrt(ip(u1, u1));
  Vec3 u2 = Vec3::UnitY();
  u2 -= ip(u2, z) * z + ip(u2, u1) * u1;
  u2 /= std::sqrt(ip(u2, u2));
  Mat3 E;
  E.col(0) = u1;
  E.col(1) = u2;
  E.col(2) = z;
  return E;
}

std::vector<UnitFrame> unit_frames(const FlowState& s, const FlowKinematics& k) {
  const std::size_t n = s.size();
  std::vector<UnitFrame> out(n);
  parallel_for(n, [&](std::size_t x) {
    UnitFrame& u = out[x];
    u.E = unit_frame_basis(s.G[x]);
    u.Einv = u.E.inverse();
    const double sg = std::sqrt(s.g[x]);
    const Mat3 Et = u.E.transpose();
    u.K = Et * k.DG[x] * u.E / sg;
    u.Lh = Et * (k.DDG[x] - k.Gamma[x] * k.DG[x]) * u.E / s.g[x];
    u.M = Et * s.m[x] * u.E / sg;
    u.N = Et * k.DxH[x] * u.E / s.g[x];
    std::array<Mat3, 3> framed;
    for (int c = 0; c < 3; ++c) framed[c] = Et * s.L.constants[c] * u.E;
    for (int kk = 0; kk < 3; ++kk) {
      u.C[kk] = Mat3::Zero();
      for (int c = 0; c < 3; ++c) u.C[kk] += u.Einv(kk, c) * framed[c];
    }
    u.hh = s.h0_at(x) / std::sqrt(s.G[x].determinant());
  });
  return out;
}

namespace {

Vec3 eps_contract(const Mat3& A) { return Vec3(A(1, 2) - A(2, 1), A(2, 0) - A(0, 2), A(0, 1) - A(1, 0)); }

double bracket_sq_of(const UnitFrame& u) {
  double b = 0.0;
  for (const auto& c : u.C) b += c.squaredNorm();
  return b;
}

}  // namespace

DefectTerms defect_terms(const UnitFrame& u) {
  DefectTerms d;
  const Mat3& K = u.K;
  const Mat3& M = u.M;
  double T = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        double v = 0.0;
        for (int e = 0; e < 3; ++e)
          v += K(e, a) * u.C[e](b, c) - K(b, e) * u.C[a](e, c) + K(c, e) * u.C[a](e, b);
        T += v * v;
      }
  d.T_sq = T;
  Vec3 y, w;
  for (int c = 0; c < 3; ++c) y(c) = M.cwiseProduct(u.C[c]).sum();
  for (int b = 0; b < 3; ++b) {
    double v = 0.0;
    for (int c = 0; c < 3; ++c)
      for (int a = 0; a < 3; ++a) v += u.C[c](a, b) * K(c, a);
    w(b) = v;
  }
  const Vec3 h2v = u.hh * eps_contract(M);
  d.y_sq = y.squaredNorm();
  d.w_sq = w.squaredNorm();
  d.wh_sq = (w + h2v).squaredNorm();
  const Mat3 P = u.Lh - K * K.transpose() + M * M.transpose();
  const Mat3 MK = M.transpose() * K;
  const Mat3 R = u.N + MK - MK.transpose();
  d.P_sq = P.squaredNorm();
  d.R_sq = R.squaredNorm();
  const double trK = K.trace();
  d.center_sq = (trK - 2.0 * K(2, 2)) * (trK - 2.0 * K(2, 2));
  d.mixed_sq = K(0, 2) * K(0, 2) + K(1, 2) * K(1, 2);
  return d;
}

PointScalars point_scalars(const UnitFrame& u) {
  PointScalars p;
  p.bracket_sq = bracket_sq_of(u);
  p.hg_sq = 6.0 * u.hh * u.hh;
  p.dg_sq = u.K.squaredNorm();
  p.trh2 = u.M.squaredNorm();
  p.q_sum = p.dg_sq + p.trh2;
  const double trK = u.K.trace();
  p.trace_dg = std::abs(trK);
  const DefectTerms d = defect_terms(u);
  p.s_a = d.T_sq + d.y_sq + p.hg_sq * p.bracket_sq / 6.0;
  p.s_b = 2.0 * d.P_sq + 2.0 * d.R_sq + p.bracket_sq * d.center_sq + 2.0 * p.bracket_sq * d.mixed_sq +
          2.0 * d.w_sq + 2.0 * d.wh_sq + 2.0 * d.y_sq + p.hg_sq * trK * trK / 3.0;
  p.d2 = u.Lh.squaredNorm() + 3.0 * u.N.squaredNorm();
  return p;
}

ScalarFields scalar_fields(const FlowState& s, const FlowKinematics& k) {
  const auto frames = unit_frames(s, k);
  const std::size_t n = s.size();
  ScalarFields f;
  for (auto* v : {&f.bracket_sq, &f.hg_sq, &f.dg_sq, &f.trh2, &f.q_sum, &f.trace_dg, &f.s_a, &f.s_b, &f.d2})
    v->resize(n);
  for (std::size_t x = 0; x < n; ++x) {
    const PointScalars p = point_scalars(frames[x]);
    f.bracket_sq[x] = p.bracket_sq;
    f.hg_sq[x] = p.hg_sq;
    f.dg_sq[x] = p.dg_sq;
    f.trh2[x] = p.trh2;
    f.q_sum[x] = p.q_sum;
    f.trace_dg[x] = p.trace_dg;
    f.s_a[x] = p.s_a;
    f.s_b[x] = p.s_b;
    f.d2[x] = p.d2;
  }
  return f;
}

ScalarFields scalar_fields(const FlowState& s) { return scalar_fields(s, kinematics(s)); }

ScalarField S_A(const FlowState& s) { return scalar_fields(s).s_a; }
ScalarField S_B(const FlowState& s) { return scalar_fields(s).s_b; }

double energy_I(const ScalarField& q_sum, const ScalarField& g, const Grid& grid, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("energy_I needs tau > 0");
  ScalarField f(q_sum.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = tau * q_sum[i] + 2.0;
  return integrate(f, g, grid) / std::sqrt(tau);
}

double energy_I(const FlowState& s, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("energy_I needs tau > 0");
  return energy_I(scalar_fields(s).q_sum, s.g, s.grid, tau);
}

double volume(const FlowState& s) { return integrate(ScalarField(s.size(), 1.0), s.g, s.grid); }

double diameter(const FlowState& s) { return 0.5 * volume(s); }

ScalarField gauge_vector(const FlowState& s) {
  const FlowKinematics k = kinematics(s);
  ScalarField q(s.size());
  for (std::size_t x = 0; x < q.size(); ++x) q[x] = -0.5 * (k.Gi[x] * k.DG[x]).trace() / s.g[x];
  return q;
}

namespace {

SupMean sup_mean(const ScalarField& f) {
  SupMean r;
  r.sup = f.empty() ? 0.0 : *std::max_element(f.begin(), f.end());
  r.mean = mean(f);
  return r;
}

}  // namespace

DiagnosticsRecord diagnostics_record(const FlowState& s) {
  const ScalarFields f = scalar_fields(s);
  DiagnosticsRecord r;
  r.t = s.t;
  r.bracket_sq = sup_mean(f.bracket_sq);
  r.hg_sq = sup_mean(f.hg_sq);
  r.dg_sq = sup_mean(f.dg_sq);
  r.trh2 = sup_mean(f.trh2);
  r.q_sum = sup_mean(f.q_sum);
  r.trace_dg = sup_mean(f.trace_dg);
  r.s_a = sup_mean(f.s_a);
  r.s_b = sup_mean(f.s_b);
  r.d2 = sup_mean(f.d2);
  r.energy_I = s.t > 0.0 ? energy_I(f.q_sum, s.g, s.grid, s.t) : std::numeric_limits<double>::quiet_NaN();
  r.volume = volume(s);
  r.diameter = 0.5 * r.volume;
  r.monitor_bracket = s.t * r.bracket_sq.sup;
  r.monitor_hg = s.t * r.hg_sq.sup;
  r.monitor_q = s.t * r.q_sum.sup;
  r.monitor_d2 = s.t * s.t * r.d2.sup;
  return r;
}

const std::vector<std::string>& record_columns() {
  static const std::vector<std::string> cols = {
      "t",
      "bracket_sq_sup", "bracket_sq_mean", "hg_sq_sup", "hg_sq_mean", "dg_sq_sup", "dg_sq_mean",
      "trh2_sup", "trh2_mean", "q_sum_sup", "q_sum_mean", "trace_dg_sup", "trace_dg_mean",
      "s_a_sup", "s_a_mean", "s_b_sup", "s_b_mean", "d2_sup", "d2_mean",
      "energy_I", "volume", "diameter",
      "monitor_bracket", "monitor_hg", "monitor_q", "monitor_d2"};
  return cols;
}

std::vector<double> record_values(const DiagnosticsRecord& r) {
  return {r.t,
          r.bracket_sq.sup, r.bracket_sq.mean, r.hg_sq.sup, r.hg_sq.mean, r.dg_sq.sup, r.dg_sq.mean,
          r.trh2.sup, r.trh2.mean, r.q_sum.sup, r.q_sum.mean, r.trace_dg.sup, r.trace_dg.mean,
          r.s_a.sup, r.s_a.mean, r.s_b.sup, r.s_b.mean, r.d2.sup, r.d2.mean,
          r.energy_I, r.volume, r.diameter,
          r.monitor_bracket, r.monitor_hg, r.monitor_q, r.monitor_d2};
}

}  // namespace nilflow
