#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fairdiv/engine.hpp"
#include "fairdiv/fair_division.hpp"

namespace fairdiv::oracles {

/// Default limit on enumerated allocations (n^m) for the brute-force oracles.
inline constexpr std::uint64_t default_brute_cap = 10'000'000;

/// Reads FAIRDIV_BRUTE_CAP, falling back to `fallback` when unset or malformed.
std::uint64_t brute_cap_from_env(std::uint64_t fallback = default_brute_cap);

/// n^m, saturating at UINT64_MAX.
std::uint64_t allocation_count(std::size_t agents, std::size_t goods);

/// EF1 via v_i(x_i) >= v_i(x_j) - max_{g in x_j} v_ig.
bool check_ef1(const Instance& instance, const Allocation& allocation);

/// EF1 by literally removing each good of each envied bundle in turn.
bool check_ef1_literal(const Instance& instance, const Allocation& allocation);

/// Every owned good is a maximum bang-per-buck good of its owner among the
/// goods in play. Agents are the first `allocation.agents()` instance rows.
/// Any non-positive price on a good in play fails the check. A pass is an
/// equilibrium witness, hence a certificate of fractional Pareto optimality.
bool check_mbb_consistency(const Instance& instance, const Solution& solution);

/// Exhaustive integral Pareto-optimality check. Empty when n^m exceeds `cap`.
std::optional<bool> brute_force_po(const Instance& instance, const Allocation& allocation,
                                   std::uint64_t cap = default_brute_cap);

/// prod_i v_i(x_i), the n-th power of Nash social welfare.
Rational nsw_product(const Instance& instance, const Allocation& allocation);

struct MnwResult {
    Rational product;
    Allocation allocation;
};

/// Maximum of prod_i v_i(x_i) over all integral allocations; the first
/// maximizer in enumeration order (good 0's owner varies slowest). Empty when
/// n^m exceeds `cap`.
std::optional<MnwResult> brute_force_mnw(const Instance& instance, std::uint64_t cap = default_brute_cap);

/// Rational just below e^(-1/e) ~ 0.69220.
Rational nsw_ratio_floor();

/// prod_i v_i(x_i) >= floor^n * mnw_product.
bool nsw_ratio_holds(const Instance& instance, const Allocation& allocation, const Rational& mnw_product);

/// Same with the maximum found by brute force; empty when that is skipped.
std::optional<bool> check_nsw_ratio(const Instance& instance, const Allocation& allocation,
                                    std::uint64_t cap = default_brute_cap);

struct VerificationReport {
    bool ef1 = false;
    bool pef1 = false;
    bool mbb_consistent = false;
    std::optional<bool> brute_po;
    Rational nsw_product;
    std::optional<Rational> mnw_product;
    std::optional<bool> ratio_ok;
    /// pEF1 and MBB-consistency imply EF1; false flags a checker bug.
    bool witness_implies_ef1 = true;

    bool all_passed() const;
};

/// Runs every check on a raw-instance solution. Price-level checks (pEF1,
/// MBB-consistency) run on the core projection; goods nobody values are
/// ignored there. Throws InvalidInput when the solution does not fit the
/// instance or is not a partition.
VerificationReport verify(const Instance& instance, const Solution& solution,
                          std::uint64_t cap = default_brute_cap);

/// Engine observer that re-checks every proven invariant on each step with
/// code independent of the engine's own checks. Collects violations instead
/// of throwing.
class InvariantAuditor : public engine::EngineObserver {
public:
    void on_agent_added(const engine::EngineState& state) override;
    void on_step(const engine::TraceEvent& event, const engine::EngineState& after) override;
    void on_find_solution_done(const engine::EngineState& state, std::size_t iterations) override;

    bool clean() const { return violation_count_ == 0; }
    std::size_t violation_count() const { return violation_count_; }
    /// Violation counts keyed by invariant name.
    const std::map<std::string, std::size_t>& violations() const { return violations_; }
    /// First few violation messages, for diagnostics.
    const std::vector<std::string>& samples() const { return samples_; }

    std::size_t steps_checked() const { return steps_checked_; }
    std::size_t calls_checked() const { return calls_checked_; }
    std::size_t max_iterations_seen() const { return max_iterations_; }

private:
    void flag(const std::string& invariant, const std::string& detail);

    Solution previous_;
    std::optional<engine::PotentialVector> previous_potential_;
    std::size_t iterations_in_call_ = 0;
    std::size_t agent_count_ = 0;

    std::map<std::string, std::size_t> violations_;
    std::vector<std::string> samples_;
    std::size_t violation_count_ = 0;
    std::size_t steps_checked_ = 0;
    std::size_t calls_checked_ = 0;
    std::size_t max_iterations_ = 0;
};

}  // namespace fairdiv::oracles
