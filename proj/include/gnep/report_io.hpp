#pragma once

#include "gnep/diagnostics.hpp"
#include "gnep/slcp.hpp"

#include <string>

namespace gnep {

/// JSON document with the final point, status, counters and per-iteration records.
std::string trace_to_json(const SolveResult& result, const std::string& problem_id);

std::string diagnostics_to_json(const DiagnosticsReport& report, const std::string& problem_id);

/// Parses {"x": [...], "lambda": [...]}. Throws SchemaError.
JointPoint parse_point_json(const std::string& text);

/// Reads a whole file; throws Error when it cannot be opened.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace gnep
