#pragma once

#include <compare>
#include <memory>
#include <optional>
#include <vector>

#include "fairdiv/fair_division.hpp"
#include "fairdiv/market.hpp"

namespace fairdiv::engine {

/// Price-rise rates. An empty optional stands for +infinity.
struct BetaRates {
    std::optional<Rational> new_edge;        ///< beta_1: an MBB edge leaves the reachable set
    std::optional<Rational> new_violator;    ///< beta_2: a reachable agent becomes a maximum violator
    std::optional<Rational> newest_catches;  ///< beta_3: the solution becomes pEF1
    Rational beta;                           ///< min of the three
    /// Which of the rates attain beta, as 1, 2, 3.
    std::vector<int> attained;
};

enum class StepKind { transfer, price_rise, terminated };

const char* to_string(StepKind kind);

/// (|M_0|, ..., |M_k|, |K|), ordered lexicographically.
struct PotentialVector {
    std::vector<std::size_t> good_counts_by_level;
    std::size_t violator_count = 0;

    std::vector<std::size_t> flatten() const;
    friend std::strong_ordering operator<=>(const PotentialVector& lhs, const PotentialVector& rhs) {
        return lhs.flatten() <=> rhs.flatten();
    }
    friend bool operator==(const PotentialVector& lhs, const PotentialVector& rhs) {
        return lhs.flatten() == rhs.flatten();
    }
};

struct StepOutcome {
    StepKind kind = StepKind::terminated;
    std::optional<BetaRates> rates;
    /// Transfer indices along the path; only meaningful for transfers.
    std::size_t a = 0;
    std::size_t b = 0;
};

/// One FindSolution iteration (or the closing `terminated` marker of a call).
/// Spending, p-hat and potential describe the state before the step.
struct TraceEvent {
    std::size_t step = 0;         ///< global event counter, 1-based
    std::size_t agent_count = 0;  ///< k: agents in play
    AgentId newest_agent = 0;     ///< index of agent k
    StepKind kind = StepKind::terminated;
    std::optional<BetaRates> rates;
    std::optional<market::AlternatingPath> path;
    std::size_t a = 0;
    std::size_t b = 0;
    PotentialVector potential;
    Rational min_spend;
    Rational max_hat;
};

/// Incrementally grown sub-instance. Agents in play are the first
/// `agent_count()` rows of `instance`; goods in play are those someone holds.
struct EngineState {
    std::shared_ptr<const Instance> instance;
    /// bundles.size() == agent_count(); prices has one entry per instance good,
    /// zero for goods not yet in play.
    Solution solution;
    std::vector<TraceEvent> trace;
    std::size_t trace_cap = 1u << 16;
    std::size_t dropped_events = 0;
    std::size_t events_emitted = 0;

    std::size_t agent_count() const { return solution.allocation.agents(); }
    /// The most recently added agent. Requires agent_count() > 0.
    AgentId newest() const { return agent_count() - 1; }

    void record(TraceEvent event);
};

/// Empty state over `instance`: no agents, no goods in play.
EngineState initial_state(std::shared_ptr<const Instance> instance);

/// State with an explicit solution; the newest agent is the last bundle.
/// Throws InvalidInput when the solution does not fit the instance.
EngineState make_state(std::shared_ptr<const Instance> instance, Solution solution);

class EngineObserver {
public:
    virtual ~EngineObserver() = default;
    /// A new agent holds its initial bundle; FindSolution is about to run.
    virtual void on_agent_added(const EngineState& /*state*/) {}
    /// After every step, including the closing `terminated` marker.
    virtual void on_step(const TraceEvent& /*event*/, const EngineState& /*after*/) {}
    virtual void on_find_solution_done(const EngineState& /*state*/, std::size_t /*iterations*/) {}
};

struct EngineOptions {
    /// Agent insertion order over the raw instance's agents; empty means 0..n-1.
    std::vector<AgentId> order;
    std::size_t trace_cap = 1u << 16;
    /// Online checks of MBB containment, pEF1-except-k, L = {k} and the
    /// potential increase. Rate bounds and the iteration watchdog always run.
    bool check_invariants = true;
    EngineObserver* observer = nullptr;
};

struct InitialPrices {
    GoodSet goods;
    /// Parallel to `goods`.
    std::vector<Rational> prices;
};

/// Goods not yet in play that `agent` values positively, priced below every
/// current price by a factor of the good count.
/// Throws InvariantViolation if the agent values nothing.
InitialPrices initial_prices_for_agent(const EngineState& state, AgentId agent);

/// Adds the next agent (index agent_count()) holding `initial.goods`.
void add_agent(EngineState& state, const InitialPrices& initial);

/// Throws InvariantViolation unless 1 < beta < infinity.
BetaRates compute_betas(const EngineState& state, const market::MbbGraph& graph,
                        const market::Reachability& reach);

/// Multiplies the prices of every reachable good by `beta`.
StepOutcome apply_price_rise(EngineState& state, const market::Reachability& reach, const Rational& beta);

/// Reallocates goods along `path` (which starts at the newest agent and ends
/// at a maximum violator). Throws InvariantViolation when no index a exists.
StepOutcome transfer(EngineState& state, const market::AlternatingPath& path);

/// `reach` must be computed from the newest agent with unreachable level k.
PotentialVector compute_potential(const EngineState& state, const market::Reachability& reach);

/// (k - 1) * ((m + k) / k * e)^k with e rounded up to 2.7182818285.
Rational iteration_bound(std::size_t agent_count, std::size_t goods);

/// Runs price rises and transfers until the state is pEF1. Returns the
/// number of iterations (steps) performed.
std::size_t find_solution(EngineState& state, const EngineOptions& options = {});

struct SolveResult {
    /// In the raw instance's index space.
    Solution solution;
    NormalizationRecord record;
    /// Trace with agent and good indices in the raw instance's index space.
    std::vector<TraceEvent> trace;
    std::size_t dropped_events = 0;
    /// FindSolution iterations, one entry per inserted agent in insertion order.
    std::vector<std::size_t> iterations;
    std::vector<Rational> iteration_bounds;
};

/// Normalizes, rejects Hall violations (HallViolation), inserts agents one
/// at a time and returns an EF1 + fPO allocation with its price witness.
SolveResult solve(const Instance& raw, const EngineOptions& options = {});

}  // namespace fairdiv::engine
