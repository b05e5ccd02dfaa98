#include "nilflow/evolve.hpp"

#include <algorithm>
#include <cmath>

namespace nilflow {

std::vector<double> cadence_times(double t0, double t_end, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("cadence must be positive");
  if (t_end < t0) throw std::invalid_argument("t_end precedes t0");
  std::vector<double> out{t0};
  if (t_end == t0) return out;
  const double ratio = (t_end - t0) / k;
  const auto count = static_cast<long>(std::ceil(ratio - 1e-9 * std::max(1.0, ratio)));
  for (long j = 1; j < count; ++j) out.push_back(t0 + static_cast<double>(j) * k);
  out.push_back(t_end);
  return out;
}

Trajectory evolve(const FlowState& s0, double t_end, const StepController& ctrl, const EvolveOptions& opts,
                  const FlowConventions& conv) {
  if (t_end < s0.t) throw std::invalid_argument("evolve needs t_end >= initial time");
  const std::vector<double> snaps = cadence_times(s0.t, t_end, opts.snapshot_cadence);
  const std::vector<double> diags = cadence_times(s0.t, t_end, opts.diagnostics_cadence);
  std::vector<double> events;
  std::merge(snaps.begin(), snaps.end(), diags.begin(), diags.end(), std::back_inserter(events));
  events.erase(std::unique(events.begin(), events.end()), events.end());

  Trajectory traj;
  Integrator integ(ctrl, conv);
  FlowState s = s0;
  integ.prime(s);

  std::size_t si = 0, di = 0;
  auto record = [&](const FlowState& st) {
    if (si < snaps.size() && snaps[si] == st.t) {
      if (opts.keep_states || si == 0 || si + 1 == snaps.size()) {
        traj.states.push_back(st);
        traj.rates.push_back(integ.rates());
      }
      ++si;
    }
    if (di < diags.size() && diags[di] == st.t) {
      traj.diagnostics.push_back(diagnostics_record(st));
      if (opts.on_record) opts.on_record(traj.diagnostics.back());
      ++di;
    }
  };
  record(s);
  for (std::size_t e = 1; e < events.size(); ++e) {
    while (s.t < events[e]) {
      const double h = integ.advance(s, events[e]);
      if (opts.on_step) opts.on_step(s, h);
    }
    record(s);
  }
  return traj;
}

}  // namespace nilflow
