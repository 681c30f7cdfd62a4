#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "fairdiv/engine.hpp"
#include "fairdiv/fair_division.hpp"
#include "fairdiv/market.hpp"
#include "fairdiv/oracles.hpp"

/// JSON file formats. Indices are 0-based. Rationals are written as canonical
/// "p/q" strings; on input a non-negative JSON integer or an integer string
/// is also accepted. Every parser throws InvalidInput on malformed input.
namespace fairdiv::io {

/// {"agents": n, "goods": m, "valuations": [[...], ...]}
Instance parse_instance(std::string_view text);
Instance read_instance_file(const std::string& path);
std::string instance_to_json(const Instance& instance);

/// {"bundles": [[good indices], ...], "prices": ["p/q", ...]}
Solution parse_solution(std::string_view text);
Solution read_solution_file(const std::string& path);
std::string solution_to_json(const Solution& solution);

/// One trace event as a single JSON line (no trailing newline).
std::string trace_event_to_json(const engine::TraceEvent& event);

/// Nodes, MBB edges, allocation edges, alphas and (optionally) levels.
std::string graph_to_json(const market::MbbGraph& graph, const market::Reachability* reach = nullptr);

std::string report_to_json(const oracles::VerificationReport& report);

/// Writes `text` to `path`, or to stdout when `path` is "-".
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace fairdiv::io
