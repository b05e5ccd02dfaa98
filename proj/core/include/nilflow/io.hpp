#pragma once

#include "nilflow/canonical_limits.hpp"
#include "nilflow/verify_harness.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace nilflow {

inline constexpr int kSchemaVersion = 1;

/// Shortest representation that reads back to the same double; `.` decimal
/// separator regardless of locale.
std::string format_number(double v);
/// Fixed 17 significant digits.
std::string format_full(double v);
double parse_number(std::string_view s);

/// Writes to a temporary file in the same directory, then renames.
void atomic_write(const std::string& path, std::string_view content);
std::string read_file(const std::string& path);

std::string snapshot_text(const FlowState& s);
FlowState parse_snapshot(std::string_view text);
void write_snapshot(const std::string& path, const FlowState& s);
FlowState read_snapshot(const std::string& path);
std::string snapshot_filename(double t);

std::string series_header();
std::string series_row(const DiagnosticsRecord& r);
std::string series_csv(const std::vector<DiagnosticsRecord>& records);

}  // namespace nilflow
