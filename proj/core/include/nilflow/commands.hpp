#pragma once

#include "nilflow/canonical_limits.hpp"
#include "nilflow/config.hpp"
#include "nilflow/initial_data.hpp"
#include "nilflow/integrator.hpp"

#include <ostream>
#include <vector>

namespace nilflow {

InitialDataParams initial_params(const RunConfig& cfg);
FlowState initial_state(const RunConfig& cfg);
StepController step_controller(const RunConfig& cfg);

/// Evolves the configured data and writes series.csv, snapshots/ and
/// report.json under cfg.output_dir. Returns 0 iff no invariant was flagged.
int run_command(const RunConfig& cfg, std::ostream& log);

/// Consistency ladder for all five identities; writes verify.jsonl and
/// report.json. Returns 0 iff every identity passes.
int verify_command(const RunConfig& cfg, std::ostream& log);

struct BlowdownVerdict {
  bool monotone = false;          // every component decreases along the ladder
  double c_relative_change = 0.0; // between the two largest scales, original units
  bool c_stable = false;          // c_relative_change <= c_tolerance
};

BlowdownVerdict judge_blowdown(const std::vector<BlowdownResidual>& res, double c_tolerance = 0.05);

/// Evolves to twice the largest scale and compares the rescalings with the
/// canonical family; writes blowdown.csv, blowdown.jsonl, series.csv and
/// report.json.
int blowdown_command(const RunConfig& cfg, const std::vector<double>& scales, std::ostream& log);

struct FamilyRequest {
  double C = 0.0;
  double psi0 = 0.0;
  double t0 = 0.5;
  double t1 = 2.0;
  int samples = 16;
};

/// Writes a CSV table of the family solution to `out`.
int family_command(const FamilyRequest& req, std::ostream& out);

/// Writes a commented configuration with every key at its default.
int init_command(std::ostream& out);

}  // namespace nilflow
