#include "nilflow/config.hpp"

#include "nilflow/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace nilflow {

ConfigError::ConfigError(int line, const std::string& msg)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}

LieStructure RunConfig::lie() const {
  return group == AlgebraKind::heisenberg ? LieStructure::heisenberg(c) : LieStructure::abelian();
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double as_double(std::string_view v, int line, std::string_view key) {
  try {
    const double d = parse_number(v);
    if (!std::isfinite(d)) throw std::invalid_argument("non-finite");
    return d;
  } catch (const std::invalid_argument&) {
    throw ConfigError(line, "expected a number for '" + std::string(key) + "', got '" + std::string(v) + "'");
  }
}

long long as_integer(std::string_view v, int line, std::string_view key) {
  long long out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError(line, "expected an integer for '" + std::string(key) + "', got '" + std::string(v) + "'");
  return out;
}

bool as_bool(std::string_view v, int line, std::string_view key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(line, "expected true or false for '" + std::string(key) + "', got '" + std::string(v) + "'");
}

std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    out.push_back(trim(v.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

bool power_of_two_grid(long long n) { return n >= 16 && (n & (n - 1)) == 0; }

void require(bool ok, int line, const std::string& msg) {
  if (!ok) throw ConfigError(line, msg);
}

using Setter = std::function<void(RunConfig&, std::string_view, int)>;

Setter positive(double RunConfig::*field, const char* name) {
  return [field, name](RunConfig& c, std::string_view v, int line) {
    const double d = as_double(v, line, name);
    require(d > 0.0, line, std::string(name) + " must be positive");
    c.*field = d;
  };
}

Setter nonnegative(double RunConfig::*field, const char* name) {
  return [field, name](RunConfig& c, std::string_view v, int line) {
    const double d = as_double(v, line, name);
    require(d >= 0.0, line, std::string(name) + " must be nonnegative");
    c.*field = d;
  };
}

Setter any_real(double RunConfig::*field, const char* name) {
  return [field, name](RunConfig& c, std::string_view v, int line) { c.*field = as_double(v, line, name); };
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"group",
       [](RunConfig& c, std::string_view v, int line) {
         try {
           c.group = algebra_kind_from_string(v);
         } catch (const std::invalid_argument&) {
           throw ConfigError(line, "group must be heisenberg or abelian, got '" + std::string(v) + "'");
         }
       }},
      {"c", positive(&RunConfig::c, "c")},
      {"L", positive(&RunConfig::L, "L")},
      {"N",
       [](RunConfig& c, std::string_view v, int line) {
         const long long n = as_integer(v, line, "N");
         require(power_of_two_grid(n), line, "N must be a power of two ≥ 16");
         c.N = static_cast<int>(n);
       }},
      {"t0", nonnegative(&RunConfig::t0, "t0")},
      {"t_end", positive(&RunConfig::t_end, "t_end")},
      {"cfl_sigma",
       [](RunConfig& c, std::string_view v, int line) {
         const double d = as_double(v, line, "cfl_sigma");
         require(d > 0.0 && d <= 1.0, line, "cfl_sigma must lie in (0, 1]");
         c.cfl_sigma = d;
       }},
      {"error_tol", positive(&RunConfig::error_tol, "error_tol")},
      {"dt_min", positive(&RunConfig::dt_min, "dt_min")},
      {"dt_max", positive(&RunConfig::dt_max, "dt_max")},
      {"seed",
       [](RunConfig& c, std::string_view v, int line) {
         const long long s = as_integer(v, line, "seed");
         require(s >= 0, line, "seed must be nonnegative");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"amp_G", nonnegative(&RunConfig::amp_G, "amp_G")},
      {"amp_g", nonnegative(&RunConfig::amp_g, "amp_g")},
      {"amp_a", nonnegative(&RunConfig::amp_a, "amp_a")},
      {"amp_m", nonnegative(&RunConfig::amp_m, "amp_m")},
      {"h0", any_real(&RunConfig::h0, "h0")},
      {"twist", any_real(&RunConfig::twist, "twist")},
      {"full_h", [](RunConfig& c, std::string_view v, int line) { c.full_h = as_bool(v, line, "full_h"); }},
      {"snapshot_cadence", positive(&RunConfig::snapshot_cadence, "snapshot_cadence")},
      {"diagnostics_cadence", positive(&RunConfig::diagnostics_cadence, "diagnostics_cadence")},
      {"output_dir",
       [](RunConfig& c, std::string_view v, int line) {
         require(!v.empty(), line, "output_dir must not be empty");
         c.output_dir = std::string(v);
       }},
      {"verify_sizes",
       [](RunConfig& c, std::string_view v, int line) {
         std::vector<int> sizes;
         for (auto item : split_list(v)) {
           const long long n = as_integer(item, line, "verify_sizes");
           require(power_of_two_grid(n), line, "verify_sizes entries must be powers of two ≥ 16");
           require(sizes.empty() || n > sizes.back(), line, "verify_sizes must be strictly increasing");
           sizes.push_back(static_cast<int>(n));
         }
         require(sizes.size() >= 2, line, "verify_sizes needs at least two grid sizes");
         c.verify_sizes = sizes;
       }},
      {"verify_delta0", positive(&RunConfig::verify_delta0, "verify_delta0")},
      {"verify_times",
       [](RunConfig& c, std::string_view v, int line) {
         std::vector<double> ts;
         for (auto item : split_list(v)) {
           const double t = as_double(item, line, "verify_times");
           require(t > 0.0, line, "verify_times must be positive");
           ts.push_back(t);
         }
         require(!ts.empty(), line, "verify_times must not be empty");
         c.verify_times = ts;
       }},
  };
  return table;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::map<std::string, int, std::less<>> seen;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(line_no, "unknown key '" + std::string(key) + "'");
    if (seen.count(key)) throw ConfigError(line_no, "duplicate key '" + std::string(key) + "'");
    if (value.empty()) throw ConfigError(line_no, "missing value for '" + std::string(key) + "'");
    it->second(cfg, value, line_no);
    seen.emplace(std::string(key), line_no);
  }
  for (const char* key : {"group", "N", "L", "t_end"})
    if (!seen.count(key)) throw ConfigError(0, std::string("missing required key '") + key + "'");
  auto line_of = [&seen](const char* key) {
    const auto it = seen.find(key);
    return it == seen.end() ? 0 : it->second;
  };
  if (!(cfg.t_end > cfg.t0)) throw ConfigError(line_of("t_end"), "t_end must exceed t0");
  if (!(cfg.dt_max > cfg.dt_min)) throw ConfigError(line_of("dt_max"), "dt_max must exceed dt_min");
  return cfg;
}

RunConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

std::string format_config(const RunConfig& cfg) {
  auto list = [](const auto& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ", ";
      if constexpr (std::is_same_v<std::decay_t<decltype(v[i])>, int>)
        s += std::to_string(v[i]);
      else
        s += format_number(v[i]);
    }
    return s;
  };
  std::ostringstream o;
  o << "# nilflow run configuration\n"
    << "group = " << to_string(cfg.group) << "\n"
    << "c = " << format_number(cfg.c) << "\n"
    << "L = " << format_number(cfg.L) << "\n"
    << "N = " << cfg.N << "\n"
    << "t0 = " << format_number(cfg.t0) << "\n"
    << "t_end = " << format_number(cfg.t_end) << "\n"
    << "\n# time stepping\n"
    << "cfl_sigma = " << format_number(cfg.cfl_sigma) << "\n"
    << "error_tol = " << format_number(cfg.error_tol) << "\n"
    << "dt_min = " << format_number(cfg.dt_min) << "\n"
    << "dt_max = " << format_number(cfg.dt_max) << "\n"
    << "\n# initial data\n"
    << "seed = " << cfg.seed << "\n"
    << "amp_G = " << format_number(cfg.amp_G) << "\n"
    << "amp_g = " << format_number(cfg.amp_g) << "\n"
    << "amp_a = " << format_number(cfg.amp_a) << "\n"
    << "amp_m = " << format_number(cfg.amp_m) << "\n"
    << "h0 = " << format_number(cfg.h0) << "\n"
    << "twist = " << format_number(cfg.twist) << "\n"
    << "full_h = " << (cfg.full_h ? "true" : "false") << "\n"
    << "\n# output\n"
    << "snapshot_cadence = " << format_number(cfg.snapshot_cadence) << "\n"
    << "diagnostics_cadence = " << format_number(cfg.diagnostics_cadence) << "\n"
    << "output_dir = " << cfg.output_dir << "\n"
    << "\n# verify ladder\n"
    << "verify_sizes = " << list(cfg.verify_sizes) << "\n"
    << "verify_delta0 = " << format_number(cfg.verify_delta0) << "\n"
    << "verify_times = " << list(cfg.verify_times) << "\n";
  return o.str();
}

}  // namespace nilflow
