#pragma once

#include "nilflow/nil_algebra.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nilflow {

struct RunConfig {
  AlgebraKind group = AlgebraKind::heisenberg;
  double c = 1.0;
  double L = 6.283185307179586;
  int N = 128;
  double t0 = 0.0;
  double t_end = 10.0;
  double cfl_sigma = 0.2;
  double error_tol = 1e-8;
  double dt_min = 1e-12;
  double dt_max = 1.0;
  std::uint64_t seed = 1;
  double amp_G = 0.3;
  double amp_g = 0.2;
  double amp_a = 0.3;
  double amp_m = 0.2;
  double h0 = 0.5;
  double twist = 0.0;
  bool full_h = false;
  double snapshot_cadence = 1.0;
  double diagnostics_cadence = 0.05;
  std::string output_dir = "out";
  std::vector<int> verify_sizes{64, 128, 256};
  double verify_delta0 = 0.03;
  std::vector<double> verify_times{0.21, 0.30, 0.39};

  LieStructure lie() const;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& msg);
  int line() const { return line_; }

 private:
  int line_;
};

/// Parses `key = value` lines; `#` starts a comment. Unknown keys, malformed
/// values and violated invariants raise ConfigError with the line number
/// (0 for whole-file checks).
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Every key with its value, in a form parse_config accepts.
std::string format_config(const RunConfig& cfg);

}  // namespace nilflow
