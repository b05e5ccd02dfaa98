#include "nilflow/canonical_limits.hpp"

#include "nilflow/flow_rhs.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace nilflow {

FlowState rescale(const FlowState& st, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("rescale needs s > 0");
  FlowState out = st;
  out.t = st.t / s;
  for (auto& G : out.G) G /= s;
  for (auto& g : out.g) g /= s;
  for (auto& m : out.m) m /= s;
  out.h0 = st.h0 / s;
  if (out.h0_field)
    for (auto& h : *out.h0_field) h /= s;
  return out;
}

FlowRates rescale(const FlowRates& r, double s) {
  FlowRates out = r;
  for (auto& a : out.a) a *= s;
  return out;
}

DiagnosticsRecord rescale(const DiagnosticsRecord& r, double s) {
  DiagnosticsRecord o = r;
  const double rs = std::sqrt(s);
  auto mul = [](SupMean& v, double f) { v.sup *= f; v.mean *= f; };
  o.t = r.t / s;
  mul(o.bracket_sq, s);
  mul(o.hg_sq, s);
  mul(o.dg_sq, s);
  mul(o.trh2, s);
  mul(o.q_sum, s);
  mul(o.trace_dg, rs);
  mul(o.s_a, s * s);
  mul(o.s_b, s * s);
  mul(o.d2, s * s);
  o.volume = r.volume / rs;
  o.diameter = r.diameter / rs;
  return o;
}

Trajectory rescale(const Trajectory& traj, double s) {
  Trajectory out;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    out.states.push_back(rescale(traj.states[i], s));
    out.rates.push_back(rescale(traj.rates[i], s));
  }
  for (const auto& r : traj.diagnostics) out.diagnostics.push_back(rescale(r, s));
  return out;
}

Trajectory rescale(const Trajectory& traj, double s, double t_lo, double t_hi) {
  if (traj.states.empty() || s * t_lo < traj.t_begin() * (1.0 - 1e-12) || s * t_hi > traj.t_end() * (1.0 + 1e-12))
    throw std::invalid_argument("trajectory does not cover the rescaling window");
  Trajectory out;
  const double lo = s * t_lo * (1.0 - 1e-12), hi = s * t_hi * (1.0 + 1e-12);
  for (std::size_t i = 0; i < traj.states.size(); ++i)
    if (traj.states[i].t >= lo && traj.states[i].t <= hi) {
      out.states.push_back(rescale(traj.states[i], s));
      out.rates.push_back(rescale(traj.rates[i], s));
    }
  for (const auto& r : traj.diagnostics)
    if (r.t >= lo && r.t <= hi) out.diagnostics.push_back(rescale(r, s));
  return out;
}

FlowState state_at(const Trajectory& traj, double t) {
  const auto& st = traj.states;
  if (st.empty()) throw std::invalid_argument("empty trajectory");
  const double span = std::max(1.0, std::abs(traj.t_end()));
  if (t < st.front().t - 1e-12 * span || t > st.back().t + 1e-12 * span)
    throw std::invalid_argument("time outside the trajectory");
  auto it = std::upper_bound(st.begin(), st.end(), t, [](double v, const FlowState& s) { return v < s.t; });
  std::size_t i1 = static_cast<std::size_t>(it - st.begin());
  if (i1 == 0) return st.front();
  if (i1 >= st.size()) return st.back();
  const std::size_t i0 = i1 - 1;
  if (t == st[i0].t) return st[i0];
  const double h = st[i1].t - st[i0].t;
  const double u = (t - st[i0].t) / h;
  const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
  const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
  const Eigen::VectorXd y = h00 * pack(st[i0]) + h10 * h * pack(traj.rates[i0], st[i0]) + h01 * pack(st[i1]) +
                            h11 * h * pack(traj.rates[i1], st[i1]);
  FlowState out = st[i0];
  out.t = t;
  unpack(y, out);
  return out;
}

FamilyRates family_ode_rhs(double Phi, double Psi) {
  if (Phi < 0.0 || Psi < 0.0) throw std::domain_error("family rates need nonnegative Phi and Psi");
  FamilyRates r;
  r.dPhi = -kFamilyRate * Phi * Phi - Psi * Phi / 6.0;
  r.dPsi = -0.5 * Psi * Psi - 0.5 * Psi * Phi;
  r.rate_g0 = 0.5 * Phi + Psi / 6.0;
  r.rate_z = -0.5 * Phi + Psi / 6.0;
  return r;
}

FamilyClosedForm family_closed_form(double t, double C) {
  if (!(t > 0.0)) throw std::invalid_argument("closed form needs t > 0");
  FamilyClosedForm f;
  const double u = kFamilyRate * t + C;
  f.Phi = 1.0 / u;
  f.factor_g0 = std::cbrt(u / (kFamilyRate + C));
  f.factor_z = 1.0 / f.factor_g0;
  return f;
}

double family_center_entry(const CanonicalFamilyParams& p) {
  if (p.c == 0.0) return 1.0;
  const double phi1 = 1.0 / (kFamilyRate + p.C);
  return phi1 * p.block.determinant() / (2.0 * p.c * p.c);
}

double family_h0(const CanonicalFamilyParams& p) {
  const double det = p.block.determinant() * family_center_entry(p);
  return std::sqrt(p.psi0 * det / 6.0);
}

std::vector<FamilyPoint> integrate_family(const CanonicalFamilyParams& p, const std::vector<double>& times) {
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, 4>;  // Phi, Psi, log block factor, log center factor
  if (p.C < 0.0 || p.psi0 < 0.0 || !(p.g1 > 0.0)) throw std::invalid_argument("invalid family parameters");
  if (p.block.determinant() <= 0.0 || p.block(0, 0) <= 0.0) throw std::invalid_argument("family block must be SPD");

  const double z1 = family_center_entry(p);
  const double phi1 = p.c == 0.0 ? 0.0 : 1.0 / (kFamilyRate + p.C);
  const double h0 = family_h0(p);
  auto sys = [](const State& x, State& dx, double) {
    const FamilyRates r = family_ode_rhs(std::max(0.0, x[0]), std::max(0.0, x[1]));
    dx = {r.dPhi, r.dPsi, r.rate_g0, r.rate_z};
  };

  std::vector<FamilyPoint> out;
  for (double t : times) {
    if (!(t > 0.0)) throw std::invalid_argument("family times must be positive");
    State x{phi1, p.psi0, 0.0, 0.0};
    if (t != 1.0) {
      auto stepper = ode::make_controlled<ode::runge_kutta_fehlberg78<State>>(1e-12, 1e-12);
      const double dt0 = t > 1.0 ? 1e-3 : -1e-3;
      ode::integrate_adaptive(stepper, sys, x, 1.0, t, dt0);
    }
    FamilyPoint fp;
    fp.t = t;
    fp.Phi = x[0];
    fp.Psi = x[1];
    fp.G = Mat3::Zero();
    fp.G.topLeftCorner<2, 2>() = std::exp(x[2]) * p.block;
    fp.G(2, 2) = std::exp(x[3]) * z1;
    fp.g = t * p.g1;
    fp.h0 = h0;
    out.push_back(fp);
  }
  return out;
}

FlowState family_state(const CanonicalFamilyParams& p, double t, const Grid& grid) {
  if (p.block(0, 1) != 0.0 || p.block(1, 0) != 0.0)
    throw std::invalid_argument("family_state needs a diagonal block (aligned with the twist)");
  const FamilyPoint fp = integrate_family(p, {t}).front();
  const LieStructure L = p.c == 0.0 ? LieStructure::abelian() : LieStructure::heisenberg(p.c);
  FlowState s = flat_state(grid, L, fp.h0);
  s.t = t;
  s.twist = diagonal_twist(0.5 * std::sqrt(p.g1));
  for (auto& G : s.G) G = fp.G;
  for (auto& g : s.g) g = fp.g;
  return s;
}

const std::vector<std::string>& BlowdownResidual::component_names() {
  static const std::vector<std::string> names = {"q_deviation", "trace_dg", "mixed_torsion",
                                                 "energy_defect", "off_block", "connection_rate"};
  return names;
}

double fit_family_C(const std::vector<double>& t, const std::vector<double>& t_phi, double* rms) {
  if (t.size() != t_phi.size() || t.empty()) throw std::invalid_argument("fit needs matching nonempty samples");
  double C = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) C += t[j] / t_phi[j] - kFamilyRate * t[j];
  C /= static_cast<double>(t.size());
  for (int it = 0; it < 50; ++it) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) {
      const double u = kFamilyRate * t[j] + C;
      const double r = t_phi[j] - t[j] / u;
      const double J = t[j] / (u * u);  // d(model)/dC = -J, so dr/dC = J
      num += J * r;
      den += J * J;
    }
    if (den == 0.0) break;
    const double step = -num / den;
    C += step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(C))) break;
  }
  if (rms) {
    double s = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) {
      const double r = t_phi[j] - t[j] / (kFamilyRate * t[j] + C);
      s += r * r;
    }
    *rms = std::sqrt(s / static_cast<double>(t.size()));
  }
  return C;
}

BlowdownResidual blowdown_residual(const Trajectory& traj, double s, double t_lo, double t_hi, int samples) {
  if (samples < 4 || !(t_hi > t_lo) || !(t_lo > 0.0)) throw std::invalid_argument("invalid blowdown window");
  if (traj.states.empty() || s * t_lo < traj.t_begin() * (1.0 - 1e-12) || s * t_hi > traj.t_end() * (1.0 + 1e-12))
    throw std::invalid_argument("insufficient trajectory for scale " + std::to_string(s));
  BlowdownResidual r;
  r.scale = s;
  r.t_lo = t_lo;
  r.t_hi = t_hi;
  std::vector<double> tail_t, tail_y;
  const double tail_start = t_hi - (t_hi - t_lo) / 3.0;
  for (int j = 0; j < samples; ++j) {
    const double t = t_lo + (t_hi - t_lo) * j / (samples - 1);
    const FlowState st = rescale(state_at(traj, std::min(s * t, traj.t_end())), s);
    const FlowKinematics k = kinematics(st);
    const auto frames = unit_frames(st, k);
    const VectorField adot = rhs_a(st, k);
    ScalarField sb(st.size()), br(st.size());
    for (std::size_t x = 0; x < st.size(); ++x) {
      const PointScalars p = point_scalars(frames[x]);
      r.q_deviation = std::max(r.q_deviation, std::abs(t * p.q_sum - 2.0));
      r.trace_dg = std::max(r.trace_dg, p.trace_dg);
      r.mixed_torsion = std::max(r.mixed_torsion, t * p.trh2);
      const Mat3& K = frames[x].K;
      r.off_block = std::max(r.off_block, std::sqrt(K(0, 2) * K(0, 2) + K(1, 2) * K(1, 2)));
      r.connection_rate = std::max(r.connection_rate, adot[x].norm());
      sb[x] = p.s_b;
      br[x] = p.bracket_sq;
    }
    r.energy_defect = std::max(r.energy_defect, t * integrate(sb, st.g, st.grid) / std::sqrt(t));
    if (t >= tail_start - 1e-12) {
      tail_t.push_back(t);
      tail_y.push_back(t * mean(br));
    }
  }
  r.C_fit = fit_family_C(tail_t, tail_y, &r.C_fit_error);
  r.C_original = r.C_fit * s;
  return r;
}

std::vector<BlowdownResidual> compare_to_family(const Trajectory& traj, const std::vector<double>& scales,
                                                double t_lo, double t_hi, int samples) {
  std::vector<double> sorted = scales;
  std::sort(sorted.begin(), sorted.end());
  std::vector<BlowdownResidual> out;
  for (double s : sorted) out.push_back(blowdown_residual(traj, s, t_lo, t_hi, samples));
  return out;
}

double RigidityReport::max() const {
  return std::max({trace_dg, mixed_torsion, second_order, bracket_spread, dg_spread, hg_spread, center_dg,
                   block_relation, connection_rate});
}

RigidityReport rigidity_report(const FlowState& s) {
  const FlowKinematics k = kinematics(s);
  const auto frames = unit_frames(s, k);
  const VectorField adot = rhs_a(s, k);
  RigidityReport r;
  double br_lo = 1e300, br_hi = -1e300, dg_lo = 1e300, dg_hi = -1e300, hg_lo = 1e300, hg_hi = -1e300;
  for (std::size_t x = 0; x < s.size(); ++x) {
    const UnitFrame& u = frames[x];
    const PointScalars p = point_scalars(u);
    r.trace_dg = std::max(r.trace_dg, p.trace_dg);
    r.mixed_torsion = std::max(r.mixed_torsion, p.trh2);
    r.second_order = std::max(r.second_order, (u.Lh - u.K * u.K).norm());
    br_lo = std::min(br_lo, p.bracket_sq), br_hi = std::max(br_hi, p.bracket_sq);
    dg_lo = std::min(dg_lo, p.dg_sq), dg_hi = std::max(dg_hi, p.dg_sq);
    hg_lo = std::min(hg_lo, p.hg_sq), hg_hi = std::max(hg_hi, p.hg_sq);
    r.center_dg = std::max(r.center_dg, u.K.col(2).norm());
    const Eigen::Matrix2d blk = u.Lh.topLeftCorner<2, 2>() - 0.5 * p.dg_sq * Eigen::Matrix2d::Identity();
    r.block_relation = std::max(r.block_relation, blk.norm());
    r.connection_rate = std::max(r.connection_rate, adot[x].norm());
  }
  r.bracket_spread = br_hi - br_lo;
  r.dg_spread = dg_hi - dg_lo;
  r.hg_spread = hg_hi - hg_lo;
  return r;
}

}  // namespace nilflow
