#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fairdiv/fair_division.hpp"

namespace fairdiv::cli {

enum exit_code : int {
    exit_ok = 0,
    exit_invalid_input = 1,
    exit_hall_violation = 2,
    exit_invariant_breach = 3,
};

struct RunConfig {
    std::string command;
    std::string input;
    std::string solution;
    std::string output = "-";
    std::string trace;
    std::string dump_graph;
    std::string spec;
    std::vector<AgentId> order;
    std::uint64_t seed = 1;
    std::size_t agents = 0;
    std::size_t goods = 0;
    std::int64_t max_value = 10;
    std::optional<std::uint64_t> brute_cap;
};

/// Uniform integer valuations in [0, max_value]; then a random permutation
/// sigma plants v[i][sigma(i)] >= 1 (redrawn from [1, max_value] when zero).
/// Throws InvalidInput unless 0 < agents <= goods and max_value >= 1.
Instance generate_instance(std::size_t agents, std::size_t goods, std::int64_t max_value, std::uint64_t seed);

/// Parses "2,0,1" into an insertion order.
std::vector<AgentId> parse_order(const std::string& text);

int cmd_solve(const RunConfig& cfg, std::ostream& err);
int cmd_verify(const RunConfig& cfg, std::ostream& err);
int cmd_gen(const RunConfig& cfg, std::ostream& err);
int cmd_bench(const RunConfig& cfg, std::ostream& err);

/// Full command line, argv[0] included. Returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& err);

}  // namespace fairdiv::cli
