#include "nilflow/io.hpp"

#include "report_json.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

namespace nilflow {

namespace fs = std::filesystem;

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_full(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  return v;
}

void atomic_write(const std::string& path, std::string_view content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

const char* const kSnapshotColumns = "x g G11 G12 G13 G22 G23 G33 a1 a2 a3 m12 m13 m23";

}  // namespace

std::string snapshot_text(const FlowState& s) {
  std::string out;
  out += "schema_version: " + std::to_string(kSchemaVersion) + "\n";
  out += "t: " + format_full(s.t) + "\n";
  out += "N: " + std::to_string(s.grid.n) + "\n";
  out += "L: " + format_full(s.grid.length) + "\n";
  out += "group: " + std::string(to_string(s.L.kind)) + "\n";
  out += "c: " + format_full(s.L.c) + "\n";
  out += "h0: " + format_full(s.h0) + "\n";
  out += "twist: " + format_full(s.twist(0, 0)) + "\n";
  out += std::string("columns: ") + kSnapshotColumns + (s.h0_field ? " h0" : "") + "\n";
  for (std::size_t x = 0; x < s.size(); ++x) {
    const Mat3& G = s.G[x];
    const double row[] = {s.grid.x(static_cast<int>(x)), s.g[x], G(0, 0), G(0, 1), G(0, 2), G(1, 1), G(1, 2),
                          G(2, 2), s.a[x](0), s.a[x](1), s.a[x](2), s.m[x](0, 1), s.m[x](0, 2), s.m[x](1, 2)};
    for (std::size_t k = 0; k < std::size(row); ++k) {
      if (k) out += ' ';
      out += format_full(row[k]);
    }
    if (s.h0_field) out += ' ' + format_full((*s.h0_field)[x]);
    out += '\n';
  }
  return out;
}

FlowState parse_snapshot(std::string_view text) {
  std::map<std::string, std::string> head;
  std::vector<std::vector<double>> rows;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (const auto colon = line.find(':'); colon != std::string_view::npos && rows.empty()) {
      std::string_view v = line.substr(colon + 1);
      while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
      head[std::string(line.substr(0, colon))] = std::string(v);
      continue;
    }
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos < line.size()) {
      const auto sp = line.find(' ', pos);
      const auto tok = line.substr(pos, sp == std::string_view::npos ? std::string_view::npos : sp - pos);
      if (!tok.empty()) {
        try {
          row.push_back(parse_number(tok));
        } catch (const std::invalid_argument&) {
          throw std::runtime_error("snapshot line " + std::to_string(line_no) + ": bad number '" + std::string(tok) + "'");
        }
      }
      if (sp == std::string_view::npos) break;
      pos = sp + 1;
    }
    rows.push_back(std::move(row));
  }
  for (const char* key : {"schema_version", "t", "N", "L", "group", "c", "h0", "columns"})
    if (!head.count(key)) throw std::runtime_error(std::string("snapshot is missing header '") + key + "'");
  if (std::stoi(head["schema_version"]) != kSchemaVersion) throw std::runtime_error("unsupported snapshot schema");
  const bool full_h = head["columns"] == std::string(kSnapshotColumns) + " h0";
  if (!full_h && head["columns"] != kSnapshotColumns) throw std::runtime_error("unexpected snapshot columns");

  const int n = std::stoi(head["N"]);
  const Grid grid(n, parse_number(head["L"]));
  const AlgebraKind kind = algebra_kind_from_string(head["group"]);
  const LieStructure L = kind == AlgebraKind::heisenberg ? LieStructure::heisenberg(parse_number(head["c"]))
                                                         : LieStructure::abelian();
  FlowState s = flat_state(grid, L, parse_number(head["h0"]));
  s.t = parse_number(head["t"]);
  if (head.count("twist")) s.twist = diagonal_twist(parse_number(head["twist"]));
  if (rows.size() != static_cast<std::size_t>(n)) throw std::runtime_error("snapshot row count does not match N");
  if (full_h) s.h0_field = ScalarField(grid.size());
  const std::size_t width = full_h ? 15 : 14;
  for (std::size_t x = 0; x < rows.size(); ++x) {
    const auto& r = rows[x];
    if (r.size() != width) throw std::runtime_error("snapshot row " + std::to_string(x) + " has the wrong width");
    s.g[x] = r[1];
    s.G[x] << r[2], r[3], r[4], r[3], r[5], r[6], r[4], r[6], r[7];
    s.a[x] = Vec3(r[8], r[9], r[10]);
    s.m[x] << 0.0, r[11], r[12], -r[11], 0.0, r[13], -r[12], -r[13], 0.0;
    if (full_h) (*s.h0_field)[x] = r[14];
  }
  return s;
}

void write_snapshot(const std::string& path, const FlowState& s) { atomic_write(path, snapshot_text(s)); }

FlowState read_snapshot(const std::string& path) { return parse_snapshot(read_file(path)); }

std::string snapshot_filename(double t) { return "t=" + format_number(t) + ".txt"; }

std::string series_header() {
  std::string h = "schema_version";
  for (const auto& c : record_columns()) h += "," + c;
  return h + "\n";
}

std::string series_row(const DiagnosticsRecord& r) {
  std::string row = std::to_string(kSchemaVersion);
  for (double v : record_values(r)) row += "," + format_full(v);
  return row + "\n";
}

std::string series_csv(const std::vector<DiagnosticsRecord>& records) {
  std::string out = series_header();
  for (const auto& r : records) out += series_row(r);
  return out;
}

namespace {

// JSON has no NaN; undefined values become null.
nlohmann::ordered_json num(double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(); }

}  // namespace

nlohmann::ordered_json to_json(const DiagnosticsRecord& r) {
  nlohmann::ordered_json j;
  const auto& cols = record_columns();
  const auto vals = record_values(r);
  for (std::size_t i = 0; i < cols.size(); ++i) j[cols[i]] = num(vals[i]);
  return j;
}

nlohmann::ordered_json to_json(const ConsistencyReport& r) {
  nlohmann::ordered_json j;
  j["quantity"] = std::string(to_string(r.quantity));
  j["times"] = r.times;
  auto ladder = nlohmann::ordered_json::array();
  for (const auto& g : r.ladder)
    ladder.push_back({{"N", g.n}, {"dx", g.dx}, {"delta", g.delta}, {"residual", g.residual}, {"per_time", g.per_time}});
  j["ladder"] = ladder;
  j["order"] = num(r.order);
  j["extrapolated"] = num(r.extrapolated);
  j["threshold"] = r.threshold;
  j["min_order"] = r.min_order;
  j["passed"] = r.passed;
  return j;
}

nlohmann::ordered_json to_json(const BlowdownResidual& r) {
  nlohmann::ordered_json j;
  j["scale"] = r.scale;
  j["window"] = {r.t_lo, r.t_hi};
  const auto comps = r.components();
  for (std::size_t i = 0; i < comps.size(); ++i) j[BlowdownResidual::component_names()[i]] = num(comps[i]);
  j["C_fit"] = num(r.C_fit);
  j["C_fit_error"] = num(r.C_fit_error);
  j["C_original"] = num(r.C_original);
  return j;
}

nlohmann::ordered_json to_json(const AuditReport& r) {
  nlohmann::ordered_json j;
  j["hypothesis_holds"] = r.hypothesis_holds;
  auto flags = nlohmann::ordered_json::array();
  for (const auto& f : r.flags) flags.push_back({{"t", f.t}, {"monitor", f.monitor}, {"value", f.value}});
  j["flags"] = flags;
  j["decreasing_above_threshold"] = r.decreasing_above_threshold;
  j["d2_bounded"] = r.d2_bounded;
  j["max_monitor_bracket"] = r.max_monitor_bracket;
  j["max_monitor_hg"] = r.max_monitor_hg;
  j["max_monitor_q"] = r.max_monitor_q;
  j["max_monitor_d2"] = r.max_monitor_d2;
  j["g_nondecreasing"] = r.g_nondecreasing;
  j["growth_cap_holds"] = r.growth_cap_holds;
  return j;
}

nlohmann::ordered_json to_json(const RigidityReport& r) {
  return {{"trace_dg", r.trace_dg},         {"mixed_torsion", r.mixed_torsion},
          {"second_order", r.second_order}, {"bracket_spread", r.bracket_spread},
          {"dg_spread", r.dg_spread},       {"hg_spread", r.hg_spread},
          {"center_dg", r.center_dg},       {"block_relation", r.block_relation},
          {"connection_rate", r.connection_rate}};
}

}  // namespace nilflow
