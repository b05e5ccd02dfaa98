#include "nilflow/verify_harness.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nilflow {

std::string_view to_string(Quantity q) {
  switch (q) {
    case Quantity::bracket: return "bracket";
    case Quantity::hg: return "hg";
    case Quantity::dg: return "dg";
    case Quantity::trh2: return "trh2";
    case Quantity::sum: return "sum";
  }
  return "?";
}

const std::vector<Quantity>& all_quantities() {
  static const std::vector<Quantity> qs = {Quantity::bracket, Quantity::hg, Quantity::dg, Quantity::trh2,
                                           Quantity::sum};
  return qs;
}

double quantity_value(const PointScalars& p, Quantity q) {
  switch (q) {
    case Quantity::bracket: return p.bracket_sq;
    case Quantity::hg: return p.hg_sq;
    case Quantity::dg: return p.dg_sq;
    case Quantity::trh2: return p.trh2;
    case Quantity::sum: return p.q_sum;
  }
  return 0.0;
}

namespace {

struct Contractions {
  double MMK = 0.0;   // M_ab M_cd K_ac K_bd
  double MMKK = 0.0;  // M_ab M_cb K_ad K_cd
  double NMK = 0.0;   // N_ab M_cb K_ac
  double MML = 0.0;   // M_ab M_cb L_ac
  double M4 = 0.0;    // M_ab M_cb M_ad M_cd
  double hw = 0.0;    // h2v . w
  double hh = 0.0;    // |h2v|^2
};

Contractions contractions(const UnitFrame& u) {
  const Mat3 &K = u.K, &M = u.M, &N = u.N, &L = u.Lh;
  Contractions c;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int cc = 0; cc < 3; ++cc) {
        c.NMK += N(a, b) * M(cc, b) * K(a, cc);
        c.MML += M(a, b) * M(cc, b) * L(a, cc);
        for (int d = 0; d < 3; ++d) {
          c.MMK += M(a, b) * M(cc, d) * K(a, cc) * K(b, d);
          c.MMKK += M(a, b) * M(cc, b) * K(a, d) * K(cc, d);
          c.M4 += M(a, b) * M(cc, b) * M(a, d) * M(cc, d);
        }
      }
  Vec3 w = Vec3::Zero();
  for (int b = 0; b < 3; ++b)
    for (int cc = 0; cc < 3; ++cc)
      for (int a = 0; a < 3; ++a) w(b) += u.C[cc](a, b) * K(cc, a);
  const Vec3 h2v = u.hh * Vec3(M(1, 2) - M(2, 1), M(2, 0) - M(0, 2), M(0, 1) - M(1, 0));
  c.hw = h2v.dot(w);
  c.hh = h2v.squaredNorm();
  return c;
}

}  // namespace

double identity_reaction(const UnitFrame& u, Quantity q) {
  const PointScalars p = point_scalars(u);
  const double br = p.bracket_sq, hg = p.hg_sq, dg = p.dg_sq, th = p.trh2;
  const double trK = u.K.trace();
  switch (q) {
    case Quantity::bracket: return -1.5 * br * br - p.s_a;
    case Quantity::hg: return -0.5 * hg * hg - hg * (0.5 * br + trK * trK + th);
    case Quantity::sum: return -0.5 * p.q_sum * p.q_sum - p.s_b;
    case Quantity::dg: {
      const DefectTerms d = defect_terms(u);
      const Contractions c = contractions(u);
      const Mat3 P0 = u.Lh - u.K * u.K.transpose();
      return -0.5 * dg * dg - 2.0 * P0.squaredNorm() - br * d.center_sq - 2.0 * br * d.mixed_sq - 4.0 * d.w_sq -
             2.0 * c.hw - 0.5 * dg * th - 2.0 * c.MMK - 2.0 * c.MMKK - hg * trK * trK / 3.0 + 4.0 * c.NMK;
    }
    case Quantity::trh2: {
      const DefectTerms d = defect_terms(u);
      const Contractions c = contractions(u);
      return -2.0 * u.N.squaredNorm() + 4.0 * c.NMK - 4.0 * c.MML + 2.0 * c.MMKK - 2.0 * c.MMK - 0.5 * th * dg -
             2.0 * c.hw - 2.0 * d.y_sq - 2.0 * c.M4 - 2.0 * c.hh - 0.5 * th * th;
    }
  }
  return 0.0;
}

namespace {

ScalarField quantity_field(const FlowState& s, Quantity q) {
  const auto frames = unit_frames(s, kinematics(s));
  ScalarField f(s.size());
  for (std::size_t x = 0; x < f.size(); ++x) f[x] = quantity_value(point_scalars(frames[x]), q);
  return f;
}

}  // namespace

ScalarField identity_residual(const FlowState& prev, const FlowState& cur, const FlowState& next, Quantity q) {
  const double span = next.t - prev.t;
  if (!(span > 0.0)) throw std::invalid_argument("identity_residual needs increasing times");
  const ScalarField fp = quantity_field(prev, q);
  const ScalarField fn = quantity_field(next, q);
  const auto frames = unit_frames(cur, kinematics(cur));
  ScalarField f(cur.size()), react(cur.size());
  for (std::size_t x = 0; x < f.size(); ++x) {
    f[x] = quantity_value(point_scalars(frames[x]), q);
    react[x] = identity_reaction(frames[x], q);
  }
  const ScalarField lap = laplace_beltrami(f, cur.g, cur.grid);
  ScalarField r(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) r[x] = (fn[x] - fp[x]) / span - (lap[x] + react[x]);
  return r;
}

ConsistencyReport consistency_check(const Trajectory& traj, Quantity q, const std::vector<double>& times) {
  const auto& st = traj.states;
  if (st.size() < 3) throw std::invalid_argument("cadence too coarse: need at least three snapshots");
  ConsistencyReport rep;
  rep.quantity = q;
  rep.times = times;
  LadderRung rung;
  rung.n = st.front().grid.n;
  rung.dx = st.front().grid.dx();
  rung.delta = st[1].t - st[0].t;
  for (double t : times) {
    std::size_t j = 0;
    double best = 1e300;
    for (std::size_t i = 0; i < st.size(); ++i)
      if (std::abs(st[i].t - t) < best) best = std::abs(st[i].t - t), j = i;
    if (best > 1e-9 * std::max(1.0, std::abs(t)) || j == 0 || j + 1 >= st.size())
      throw std::invalid_argument("cadence too coarse: no centered snapshots around t = " + std::to_string(t));
    const double dl = st[j].t - st[j - 1].t, dr = st[j + 1].t - st[j].t;
    if (std::abs(dl - dr) > 1e-9 * std::max(dl, dr))
      throw std::invalid_argument("snapshots are not equally spaced around t = " + std::to_string(t));
    rung.delta = dl;
    rung.per_time.push_back(sup_norm(identity_residual(st[j - 1], st[j], st[j + 1], q)));
  }
  rung.residual = rung.per_time.empty() ? 0.0 : *std::max_element(rung.per_time.begin(), rung.per_time.end());
  rep.ladder.push_back(rung);
  rep.extrapolated = rung.residual;
  return rep;
}

double fit_order(const std::vector<double>& delta, const std::vector<double>& r) {
  if (delta.size() != r.size() || delta.size() < 2) throw std::invalid_argument("order fit needs two or more rungs");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(delta.size());
  for (std::size_t i = 0; i < delta.size(); ++i) {
    const double x = std::log(delta[i]);
    const double y = std::log(std::max(r[i], 1e-300));
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double extrapolate_residual(double r_mid, double r_fine, double ratio, double order) {
  const double f = std::pow(ratio, order) - 1.0;
  if (!(f > 0.0)) return r_fine;
  return std::abs(r_fine - (r_mid - r_fine) / f);
}

std::vector<ConsistencyReport> run_ladder(const LadderSpec& spec) {
  if (spec.grid_sizes.size() < 2) throw std::invalid_argument("ladder needs at least two rungs");
  const double t_max = *std::max_element(spec.times.begin(), spec.times.end());
  std::vector<ConsistencyReport> reports;
  for (Quantity q : all_quantities()) {
    ConsistencyReport r;
    r.quantity = q;
    r.times = spec.times;
    r.threshold = spec.threshold;
    r.min_order = spec.min_order;
    reports.push_back(r);
  }
  double delta = spec.delta0;
  for (int n : spec.grid_sizes) {
    const Grid grid(n, spec.length);
    FlowState s0 = random_state(grid, spec.L, spec.init);
    // Samples sit on the snapshot lattice t0 + j delta.
    const auto last = static_cast<long>(std::llround((t_max - s0.t) / delta)) + 1;
    const double t_end = s0.t + static_cast<double>(last) * delta;
    StepController ctrl;
    ctrl.cfl_sigma = spec.cfl_sigma;
    const double cap = cfl_limit(s0, spec.cfl_sigma);
    ctrl.fixed_dt = delta / std::ceil(delta / cap);
    EvolveOptions opts;
    opts.snapshot_cadence = delta;
    opts.diagnostics_cadence = t_end - s0.t;
    const Trajectory traj = evolve(s0, t_end, ctrl, opts, spec.conventions);
    for (auto& rep : reports) {
      ConsistencyReport one = consistency_check(traj, rep.quantity, spec.times);
      rep.ladder.push_back(one.ladder.front());
    }
    delta /= spec.refine_ratio;
  }
  for (auto& rep : reports) {
    std::vector<double> d, res;
    for (const auto& rung : rep.ladder) d.push_back(rung.delta), res.push_back(rung.residual);
    rep.order = fit_order(d, res);
    const std::size_t m = res.size();
    rep.extrapolated = extrapolate_residual(res[m - 2], res[m - 1], spec.refine_ratio, rep.order);
    rep.passed = rep.order >= spec.min_order && rep.extrapolated <= spec.threshold;
  }
  return reports;
}

namespace {

// Index-by-index evaluation of the homogeneous fiber-metric velocity.
Mat3 homogeneous_rate(const LieStructure& L, const Mat3& G, double h0) {
  const Mat3 Gi = G.inverse();
  Mat3 r = Mat3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double v = 0.0;
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q) v += Gi(k, l) * L(p, k, i) * L(q, l, j) * G(p, q);
      for (int k = 0; k < 3; ++k)
        for (int kp = 0; kp < 3; ++kp)
          for (int l = 0; l < 3; ++l)
            for (int lp = 0; lp < 3; ++lp) {
              const double gg = Gi(k, kp) * Gi(l, lp);
              for (int p = 0; p < 3; ++p)
                for (int q = 0; q < 3; ++q) v -= 0.5 * gg * L(p, k, l) * L(q, kp, lp) * G(p, i) * G(q, j);
              v += 0.5 * gg * h0 * h0 * levi_civita(i, k, l) * levi_civita(j, kp, lp);
            }
      r(i, j) = v;
    }
  return r;
}

}  // namespace

double riccati_closed_form(double t, double t0, double Phi0) { return 1.0 / (1.5 * (t - t0) + 1.0 / Phi0); }

std::vector<OraclePoint> homogeneous_oracle(const LieStructure& L, const Mat3& G0, double g0, double h0, double t0,
                                            const std::vector<double>& times) {
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, 6>;
  require_spd(G0, "homogeneous_oracle");
  if (!(g0 > 0.0)) throw DomainError("homogeneous_oracle: base metric must be positive");
  auto to_mat = [](const State& x) {
    Mat3 G;
    G << x[0], x[1], x[2], x[1], x[3], x[4], x[2], x[4], x[5];
    return G;
  };
  auto sys = [&](const State& x, State& dx, double) {
    const Mat3 r = homogeneous_rate(L, to_mat(x), h0);
    dx = {r(0, 0), r(0, 1), r(0, 2), r(1, 1), r(1, 2), r(2, 2)};
  };
  std::vector<OraclePoint> out;
  State x{G0(0, 0), G0(0, 1), G0(0, 2), G0(1, 1), G0(1, 2), G0(2, 2)};
  double t = t0;
  auto stepper = ode::make_controlled<ode::runge_kutta_fehlberg78<State>>(1e-13, 1e-13);
  std::vector<double> sorted = times;
  std::sort(sorted.begin(), sorted.end());
  for (double tt : sorted) {
    if (tt < t0) throw std::invalid_argument("oracle times must not precede t0");
    if (tt > t) ode::integrate_adaptive(stepper, sys, x, t, tt, 1e-3);
    t = tt;
    OraclePoint p;
    p.t = tt;
    p.G = to_mat(x);
    p.g = g0;
    p.Phi = bracket_norm_sq(L, p.G);
    p.Psi = hg_norm_sq(L, p.G, h0);
    out.push_back(p);
  }
  return out;
}

std::vector<OraclePoint> homogeneous_oracle(const FlowState& s, const std::vector<double>& times) {
  for (std::size_t x = 0; x < s.size(); ++x) {
    if ((s.G[x] - s.G[0]).cwiseAbs().maxCoeff() > 0.0 || s.g[x] != s.g[0] || s.a[x].cwiseAbs().maxCoeff() > 0.0 ||
        s.m[x].cwiseAbs().maxCoeff() > 0.0)
      throw std::invalid_argument("homogeneous_oracle: inhomogeneous input");
  }
  if (s.twist.cwiseAbs().maxCoeff() > 0.0) throw std::invalid_argument("homogeneous_oracle: twisted input");
  return homogeneous_oracle(s.L, s.G[0], s.g[0], s.h0, s.t, times);
}

AuditReport maximum_principle_audit(const Trajectory& traj, double tol, double growth_tol) {
  AuditReport rep;
  const auto& d = traj.diagnostics;
  if (d.empty()) return rep;
  const double thr_b = 2.0 / 3.0, thr_h = 2.0, thr_q = 2.0;
  const auto& first = d.front();
  rep.hypothesis_holds = first.t == 0.0 || (first.monitor_bracket <= thr_b + tol && first.monitor_hg <= thr_h + tol &&
                                            first.monitor_q <= thr_q + tol);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto& r = d[i];
    rep.max_monitor_bracket = std::max(rep.max_monitor_bracket, r.monitor_bracket);
    rep.max_monitor_hg = std::max(rep.max_monitor_hg, r.monitor_hg);
    rep.max_monitor_q = std::max(rep.max_monitor_q, r.monitor_q);
    rep.max_monitor_d2 = std::max(rep.max_monitor_d2, r.monitor_d2);
    const std::array<std::pair<const char*, std::pair<double, double>>, 3> mons = {{
        {"t_bracket_sq", {r.monitor_bracket, thr_b}},
        {"t_hg_sq", {r.monitor_hg, thr_h}},
        {"t_q_sum", {r.monitor_q, thr_q}},
    }};
    for (const auto& [name, vt] : mons) {
      if (vt.first > vt.second + tol) {
        if (rep.hypothesis_holds) rep.flags.push_back({r.t, name, vt.first});
      }
    }
    if (i > 0) {
      const auto& p = d[i - 1];
      const std::array<std::array<double, 3>, 3> pairs = {{{p.monitor_bracket, r.monitor_bracket, thr_b},
                                                            {p.monitor_hg, r.monitor_hg, thr_h},
                                                            {p.monitor_q, r.monitor_q, thr_q}}};
      for (const auto& v : pairs)
        if (v[0] > v[2] && v[1] > v[0] * (1.0 + 1e-12)) rep.decreasing_above_threshold = false;
    }
  }
  // Bounded unless t^2 sup d2 grows at every record of the second half.
  const double t_mid = 0.5 * (d.front().t + d.back().t);
  int pairs = 0, growing = 0;
  for (std::size_t i = 1; i < d.size(); ++i)
    if (d[i - 1].t >= t_mid) {
      ++pairs;
      if (d[i].monitor_d2 > d[i - 1].monitor_d2) ++growing;
    }
  rep.d2_bounded = pairs < 2 || growing < pairs;

  const auto& st = traj.states;
  for (std::size_t i = 1; i < st.size(); ++i) {
    const FlowState &a = st[i - 1], &b = st[i];
    const bool cap_applies = a.t > 0.0 && a.t * sup_norm(scalar_fields(a).q_sum) <= thr_q;
    for (std::size_t x = 0; x < a.size(); ++x) {
      if (b.g[x] < a.g[x] * (1.0 - 1e-12)) rep.g_nondecreasing = false;
      if (cap_applies && b.g[x] > (b.t / a.t) * (1.0 + growth_tol) * a.g[x]) rep.growth_cap_holds = false;
    }
  }
  return rep;
}

}  // namespace nilflow
