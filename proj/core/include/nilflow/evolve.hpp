#pragma once

#include "nilflow/diagnostics.hpp"
#include "nilflow/integrator.hpp"

#include <functional>
#include <vector>

namespace nilflow {

/// Snapshots with their time derivatives, plus the diagnostics series.
struct Trajectory {
  std::vector<FlowState> states;
  std::vector<FlowRates> rates;
  std::vector<DiagnosticsRecord> diagnostics;

  double t_begin() const { return states.front().t; }
  double t_end() const { return states.back().t; }
};

struct EvolveOptions {
  double snapshot_cadence = 0.1;
  double diagnostics_cadence = 0.1;
  bool keep_states = true;
  /// Called after every accepted step with the new state and the step size.
  std::function<void(const FlowState&, double)> on_step;
  /// Called at each diagnostics time.
  std::function<void(const DiagnosticsRecord&)> on_record;
};

/// Times t0 + j k for j = 0 .. ceil((t_end - t0)/k) - 1, then t_end.
std::vector<double> cadence_times(double t0, double t_end, double k);

Trajectory evolve(const FlowState& s0, double t_end, const StepController& ctrl, const EvolveOptions& opts = {},
                  const FlowConventions& conv = {});

}  // namespace nilflow
