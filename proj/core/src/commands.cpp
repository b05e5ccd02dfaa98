#include "nilflow/commands.hpp"

#include "nilflow/evolve.hpp"
#include "nilflow/io.hpp"
#include "nilflow/verify_harness.hpp"
#include "report_json.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

namespace nilflow {

namespace fs = std::filesystem;

InitialDataParams initial_params(const RunConfig& cfg) {
  InitialDataParams p;
  p.seed = cfg.seed;
  p.amp_G = cfg.amp_G;
  p.amp_g = cfg.amp_g;
  p.amp_a = cfg.amp_a;
  p.amp_m = cfg.amp_m;
  p.h0 = cfg.h0;
  p.kappa = cfg.twist;
  p.t0 = cfg.t0;
  p.full_h = cfg.full_h;
  return p;
}

FlowState initial_state(const RunConfig& cfg) {
  return random_state(Grid(cfg.N, cfg.L), cfg.lie(), initial_params(cfg));
}

StepController step_controller(const RunConfig& cfg) {
  StepController c;
  c.cfl_sigma = cfg.cfl_sigma;
  c.error_tol = cfg.error_tol;
  c.dt_min = cfg.dt_min;
  c.dt_max = cfg.dt_max;
  return c;
}

namespace {

std::string path_in(const RunConfig& cfg, const std::string& name) { return (fs::path(cfg.output_dir) / name).string(); }

nlohmann::ordered_json header(const char* command, const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["config"] = format_config(cfg);
  return j;
}

struct EnergyCheck {
  bool monotone = true;
  double max_increase = 0.0;
};

EnergyCheck energy_check(const std::vector<DiagnosticsRecord>& d, double tol = 1e-8) {
  EnergyCheck e;
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : d) {
    if (!std::isfinite(r.energy_I)) continue;
    if (std::isfinite(prev)) {
      e.max_increase = std::max(e.max_increase, r.energy_I - prev);
      if (r.energy_I > prev + tol) e.monotone = false;
    }
    prev = r.energy_I;
  }
  return e;
}

Trajectory evolve_or_dump(const RunConfig& cfg, const FlowState& s0, double t_end, const EvolveOptions& opts,
                          std::ostream& log, bool& failed) {
  failed = false;
  try {
    return evolve(s0, t_end, step_controller(cfg), opts);
  } catch (const IntegrationError& e) {
    failed = true;
    const std::string dump = path_in(cfg, "abort_state.txt");
    write_snapshot(dump, e.state);
    log << "integration aborted: " << e.what() << "\nlast valid state written to " << dump << "\n";
    auto j = header("abort", cfg);
    j["error"] = e.what();
    j["t"] = e.state.t;
    atomic_write(path_in(cfg, "report.json"), j.dump(2) + "\n");
    return {};
  }
}

}  // namespace

int run_command(const RunConfig& cfg, std::ostream& log) {
  const FlowState s0 = initial_state(cfg);
  EvolveOptions opts;
  opts.snapshot_cadence = cfg.snapshot_cadence;
  opts.diagnostics_cadence = cfg.diagnostics_cadence;
  long steps = 0;
  bool g_monotone = true;
  ScalarField prev_g = s0.g;
  opts.on_step = [&](const FlowState& s, double) {
    ++steps;
    for (std::size_t x = 0; x < s.size(); ++x)
      if (s.g[x] < prev_g[x] * (1.0 - 1e-12)) g_monotone = false;
    prev_g = s.g;
  };
  bool failed = false;
  const Trajectory traj = evolve_or_dump(cfg, s0, cfg.t_end, opts, log, failed);
  if (failed) return 2;

  atomic_write(path_in(cfg, "series.csv"), series_csv(traj.diagnostics));
  for (const auto& s : traj.states) write_snapshot(path_in(cfg, "snapshots/" + snapshot_filename(s.t)), s);

  const AuditReport audit = maximum_principle_audit(traj);
  const EnergyCheck energy = energy_check(traj.diagnostics);
  auto j = header("run", cfg);
  j["steps"] = steps;
  j["audit"] = to_json(audit);
  j["g_nondecreasing_every_step"] = g_monotone;
  j["energy_monotone"] = energy.monotone;
  j["energy_max_increase"] = energy.max_increase;
  j["final"] = to_json(traj.diagnostics.back());
  const bool clean = audit.clean() && g_monotone && energy.monotone;
  j["flagged"] = !clean;
  atomic_write(path_in(cfg, "report.json"), j.dump(2) + "\n");

  log << "run: " << steps << " steps to t = " << format_number(cfg.t_end) << "\n"
      << "  sup t|[,]|^2 = " << format_number(audit.max_monitor_bracket)
      << "  sup t|H^G|^2 = " << format_number(audit.max_monitor_hg)
      << "  sup tQ = " << format_number(audit.max_monitor_q) << "\n"
      << "  energy monotone: " << (energy.monotone ? "yes" : "no") << "\n"
      << (clean ? "no invariant flags\n" : "invariant flags raised; see report.json\n");
  return clean ? 0 : 1;
}

int verify_command(const RunConfig& cfg, std::ostream& log) {
  LadderSpec spec;
  spec.L = cfg.lie();
  spec.length = cfg.L;
  spec.init = initial_params(cfg);
  spec.init.full_h = false;
  spec.grid_sizes = cfg.verify_sizes;
  spec.delta0 = cfg.verify_delta0;
  spec.times = cfg.verify_times;
  spec.cfl_sigma = cfg.cfl_sigma;
  const auto reports = run_ladder(spec);

  std::string lines;
  bool all = true;
  auto j = header("verify", cfg);
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    lines += to_json(r).dump() + "\n";
    arr.push_back(to_json(r));
    all = all && r.passed;
    log << "  " << to_string(r.quantity) << ": residuals";
    for (const auto& g : r.ladder) log << " " << format_number(g.residual);
    log << "  order " << format_number(std::round(r.order * 1e4) / 1e4) << "  extrapolated "
        << format_number(r.extrapolated) << "  " << (r.passed ? "PASS" : "FAIL") << "\n";
  }
  j["reports"] = arr;
  j["passed"] = all;
  atomic_write(path_in(cfg, "verify.jsonl"), lines);
  atomic_write(path_in(cfg, "report.json"), j.dump(2) + "\n");
  log << (all ? "all identities certified\n" : "some identities failed\n");
  return all ? 0 : 1;
}

BlowdownVerdict judge_blowdown(const std::vector<BlowdownResidual>& res, double c_tolerance) {
  BlowdownVerdict v;
  v.monotone = res.size() >= 2;
  for (std::size_t i = 1; i < res.size(); ++i) {
    const auto a = res[i - 1].components(), b = res[i].components();
    for (std::size_t k = 0; k < a.size(); ++k)
      if (!(b[k] < a[k])) v.monotone = false;
  }
  if (res.size() >= 2) {
    const double c1 = res[res.size() - 2].C_original, c2 = res.back().C_original;
    v.c_relative_change = std::abs(c2 - c1) / std::max(std::abs(c1), std::abs(c2));
    v.c_stable = v.c_relative_change <= c_tolerance;
  }
  return v;
}

int blowdown_command(const RunConfig& cfg, const std::vector<double>& scales, std::ostream& log) {
  if (scales.empty()) throw std::invalid_argument("blowdown needs at least one scale");
  const double s_max = *std::max_element(scales.begin(), scales.end());
  const double t_end = std::max(cfg.t_end, 2.0 * s_max);
  const FlowState s0 = initial_state(cfg);
  EvolveOptions opts;
  opts.snapshot_cadence = cfg.snapshot_cadence;
  opts.diagnostics_cadence = cfg.diagnostics_cadence;
  bool failed = false;
  const Trajectory traj = evolve_or_dump(cfg, s0, t_end, opts, log, failed);
  if (failed) return 2;

  const auto res = compare_to_family(traj, scales);
  const BlowdownVerdict v = judge_blowdown(res);

  std::string csv = "scale";
  for (const auto& n : BlowdownResidual::component_names()) csv += "," + n;
  csv += ",C_fit,C_fit_error,C_original\n";
  std::string jl;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : res) {
    csv += format_full(r.scale);
    for (double c : r.components()) csv += "," + format_full(c);
    csv += "," + format_full(r.C_fit) + "," + format_full(r.C_fit_error) + "," + format_full(r.C_original) + "\n";
    jl += to_json(r).dump() + "\n";
    arr.push_back(to_json(r));
    log << "  s = " << format_number(r.scale) << ":";
    for (double c : r.components()) log << " " << format_number(c);
    log << "  C = " << format_number(r.C_original) << "\n";
  }
  atomic_write(path_in(cfg, "blowdown.csv"), csv);
  atomic_write(path_in(cfg, "blowdown.jsonl"), jl);
  atomic_write(path_in(cfg, "series.csv"), series_csv(traj.diagnostics));
  auto j = header("blowdown", cfg);
  j["residuals"] = arr;
  j["monotone"] = v.monotone;
  j["C_relative_change"] = v.c_relative_change;
  j["C_stable"] = v.c_stable;
  j["rigidity_final"] = to_json(rigidity_report(traj.states.back()));
  atomic_write(path_in(cfg, "report.json"), j.dump(2) + "\n");
  log << "  monotone decrease: " << (v.monotone ? "yes" : "no") << ", C change between largest scales: "
      << format_number(v.c_relative_change) << "\n";
  return v.monotone && v.c_stable ? 0 : 1;
}

int family_command(const FamilyRequest& req, std::ostream& out) {
  if (!(req.t0 > 0.0) || !(req.t1 > req.t0) || req.samples < 2)
    throw std::invalid_argument("family needs 0 < t0 < t1 and at least two samples");
  CanonicalFamilyParams p;
  p.C = req.C;
  p.psi0 = req.psi0;
  std::vector<double> times;
  for (int i = 0; i < req.samples; ++i) times.push_back(req.t0 + (req.t1 - req.t0) * i / (req.samples - 1));
  const auto pts = integrate_family(p, times);
  const double z1 = family_center_entry(p);
  out << "t,Phi,Psi,t_Phi,block_factor,center_factor,g,Phi_closed_form\n";
  for (const auto& fp : pts) {
    const double closed = req.psi0 == 0.0 ? family_closed_form(fp.t, req.C).Phi : std::numeric_limits<double>::quiet_NaN();
    out << format_full(fp.t) << "," << format_full(fp.Phi) << "," << format_full(fp.Psi) << ","
        << format_full(fp.t * fp.Phi) << "," << format_full(fp.G(0, 0) / p.block(0, 0)) << ","
        << format_full(fp.G(2, 2) / z1) << "," << format_full(fp.g) << "," << format_full(closed) << "\n";
  }
  return 0;
}

int init_command(std::ostream& out) {
  out << format_config(RunConfig{});
  return 0;
}

}  // namespace nilflow
