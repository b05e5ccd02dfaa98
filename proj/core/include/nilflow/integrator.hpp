#pragma once

#include "nilflow/flow_rhs.hpp"

#include <Eigen/Dense>
#include <stdexcept>

namespace nilflow {

struct StepController {
  double cfl_sigma = 0.2;
  double dt_min = 1e-12;
  double dt_max = 1.0;
  double error_tol = 1e-8;
  /// When positive, every step uses this size (clipped to output times) and
  /// no error control is applied.
  double fixed_dt = 0.0;
};

/// Raised when a step cannot be completed; carries the last valid state.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, FlowState last_valid)
      : std::runtime_error(what), state(std::move(last_valid)) {}
  FlowState state;
};

/// Flat packing of the evolved fields: per grid point G11 G12 G13 G22 G23 G33,
/// g, a1 a2 a3, m12 m13 m23 and, in full-H mode, h0.
Eigen::VectorXd pack(const FlowState& s);
Eigen::VectorXd pack(const FlowRates& r, const FlowState& like);
void unpack(const Eigen::VectorXd& y, FlowState& s);

/// Largest step allowed by the diffusion limit, cfl_sigma * dx^2 * min g.
double cfl_limit(const FlowState& s, double cfl_sigma);

/// Dormand-Prince 5(4) with first-same-as-last reuse of the final stage.
class Integrator {
 public:
  explicit Integrator(StepController ctrl = {}, FlowConventions conv = {});

  /// Takes one accepted step from s, never past t_stop. Returns the step size.
  double advance(FlowState& s, double t_stop);

  /// Rates at the current state (valid after advance or prime).
  const FlowRates& rates() const { return rates_; }
  void prime(const FlowState& s);

  int accepted() const { return accepted_; }
  int rejected() const { return rejected_; }
  double last_error() const { return last_error_; }
  const StepController& controller() const { return ctrl_; }
  const FlowConventions& conventions() const { return conv_; }

 private:
  Eigen::VectorXd eval(const FlowState& like, const Eigen::VectorXd& y, double t, FlowRates* keep);

  StepController ctrl_;
  FlowConventions conv_;
  FlowRates rates_;
  Eigen::VectorXd k1_;
  bool primed_ = false;
  double dt_next_ = 0.0;
  int accepted_ = 0;
  int rejected_ = 0;
  double last_error_ = 0.0;
};

/// One step of at most ctrl.dt_max (or ctrl.fixed_dt).
FlowState step(const FlowState& s, const StepController& ctrl, const FlowConventions& conv = {});

}  // namespace nilflow
