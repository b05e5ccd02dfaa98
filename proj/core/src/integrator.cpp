#include "nilflow/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nilflow {

namespace {

int stride(const FlowState& s) { return s.h0_field ? 14 : 13; }

}  // namespace

Eigen::VectorXd pack(const FlowState& s) {
  const int w = stride(s);
  Eigen::VectorXd y(static_cast<Eigen::Index>(s.size()) * w);
  for (std::size_t x = 0; x < s.size(); ++x) {
    double* p = y.data() + x * w;
    const Mat3& G = s.G[x];
    p[0] = G(0, 0); p[1] = G(0, 1); p[2] = G(0, 2); p[3] = G(1, 1); p[4] = G(1, 2); p[5] = G(2, 2);
    p[6] = s.g[x];
    p[7] = s.a[x](0); p[8] = s.a[x](1); p[9] = s.a[x](2);
    p[10] = s.m[x](0, 1); p[11] = s.m[x](0, 2); p[12] = s.m[x](1, 2);
    if (s.h0_field) p[13] = (*s.h0_field)[x];
  }
  return y;
}

Eigen::VectorXd pack(const FlowRates& r, const FlowState& like) {
  FlowState tmp;
  tmp.grid = like.grid;
  tmp.G = r.G;
  tmp.g = r.g;
  tmp.a = r.a;
  tmp.m = r.m;
  if (like.h0_field) tmp.h0_field = r.h0_field ? *r.h0_field : ScalarField(like.size(), 0.0);
  return pack(tmp);
}

void unpack(const Eigen::VectorXd& y, FlowState& s) {
  const int w = stride(s);
  for (std::size_t x = 0; x < s.size(); ++x) {
    const double* p = y.data() + x * w;
    s.G[x] << p[0], p[1], p[2], p[1], p[3], p[4], p[2], p[4], p[5];
    s.g[x] = p[6];
    s.a[x] = Vec3(p[7], p[8], p[9]);
    s.m[x] << 0.0, p[10], p[11], -p[10], 0.0, p[12], -p[11], -p[12], 0.0;
    if (s.h0_field) (*s.h0_field)[x] = p[13];
  }
}

double cfl_limit(const FlowState& s, double cfl_sigma) {
  const double gmin = *std::min_element(s.g.begin(), s.g.end());
  return cfl_sigma * s.grid.dx() * s.grid.dx() * gmin;
}

Integrator::Integrator(StepController ctrl, FlowConventions conv) : ctrl_(ctrl), conv_(conv) {}

Eigen::VectorXd Integrator::eval(const FlowState& like, const Eigen::VectorXd& y, double t, FlowRates* keep) {
  FlowState stage = like;
  stage.t = t;
  unpack(y, stage);
  FlowRates r = rhs(stage, conv_);
  Eigen::VectorXd k = pack(r, stage);
  if (keep) *keep = std::move(r);
  return k;
}

void Integrator::prime(const FlowState& s) {
  try {
    validate(s);
    k1_ = eval(s, pack(s), s.t, &rates_);
  } catch (const DomainError& e) {
    throw IntegrationError(e.what(), s);
  }
  primed_ = true;
}

double Integrator::advance(FlowState& s, double t_stop) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  if (!(t_stop > s.t)) throw std::invalid_argument("advance needs t_stop after the current time");
  if (!primed_) prime(s);

  const double cap = std::min(ctrl_.dt_max, cfl_limit(s, ctrl_.cfl_sigma));
  const bool fixed = ctrl_.fixed_dt > 0.0;
  if (fixed && ctrl_.fixed_dt > cap * (1.0 + 1e-12))
    throw IntegrationError("fixed step exceeds the diffusion limit", s);
  double dt = fixed ? ctrl_.fixed_dt : (dt_next_ > 0.0 ? std::min(dt_next_, cap) : cap);

  const Eigen::VectorXd y = pack(s);
  for (;;) {
    double h = dt;
    // Land exactly on t_stop when it is within reach.
    if (s.t + h >= t_stop - 1e-12 * std::max(1.0, std::abs(t_stop))) h = t_stop - s.t;
    if (h < ctrl_.dt_min) {
      if (t_stop - s.t < ctrl_.dt_min) {
        h = t_stop - s.t;
      } else {
        throw IntegrationError("step size fell below dt_min at t = " + std::to_string(s.t), s);
      }
    }
    try {
      const double t = s.t;
      const Eigen::VectorXd& k1 = k1_;
      const Eigen::VectorXd k2 = eval(s, y + h * a21 * k1, t + c2 * h, nullptr);
      const Eigen::VectorXd k3 = eval(s, y + h * (a31 * k1 + a32 * k2), t + c3 * h, nullptr);
      const Eigen::VectorXd k4 = eval(s, y + h * (a41 * k1 + a42 * k2 + a43 * k3), t + c4 * h, nullptr);
      const Eigen::VectorXd k5 =
          eval(s, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), t + c5 * h, nullptr);
      const Eigen::VectorXd k6 =
          eval(s, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), t + h, nullptr);
      const Eigen::VectorXd y1 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      FlowRates r7;
      const Eigen::VectorXd k7 = eval(s, y1, t + h, &r7);

      const Eigen::VectorXd err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      double en = 0.0;
      for (Eigen::Index i = 0; i < err.size(); ++i)
        en = std::max(en, std::abs(err(i)) / (ctrl_.error_tol * (1.0 + std::max(std::abs(y(i)), std::abs(y1(i))))));
      last_error_ = en;

      if (!fixed && !(en <= 1.0)) {
        ++rejected_;
        const double f = std::isfinite(en) ? std::max(0.2, 0.9 * std::pow(en, -0.2)) : 0.2;
        dt = h * f;
        if (dt < ctrl_.dt_min) throw IntegrationError("step size fell below dt_min at t = " + std::to_string(t), s);
        continue;
      }

      FlowState next = s;
      next.t = (h == t_stop - t) ? t_stop : t + h;
      unpack(y1, next);
      try {
        validate(next);
      } catch (const DomainError& e) {
        throw IntegrationError(e.what(), s);
      }
      s = std::move(next);
      k1_ = k7;
      rates_ = std::move(r7);
      ++accepted_;
      if (!fixed) {
        const double f = en > 0.0 ? std::min(5.0, std::max(0.2, 0.9 * std::pow(en, -0.2))) : 5.0;
        // A step shortened to hit t_stop should not shrink the next one.
        dt_next_ = h < dt ? std::max(dt, h * f) : h * f;
      }
      return h;
    } catch (const DomainError& e) {
      if (fixed) throw IntegrationError(e.what(), s);
      ++rejected_;
      dt = 0.25 * h;
      if (dt < ctrl_.dt_min) throw IntegrationError(e.what(), s);
    }
  }
}

FlowState step(const FlowState& s, const StepController& ctrl, const FlowConventions& conv) {
  Integrator it(ctrl, conv);
  FlowState out = s;
  const double h = ctrl.fixed_dt > 0.0 ? ctrl.fixed_dt : std::min(ctrl.dt_max, cfl_limit(s, ctrl.cfl_sigma));
  it.advance(out, s.t + h);
  return out;
}

}  // namespace nilflow
