#include "fairdiv/engine.hpp"

#include <algorithm>
#include <string>

#include "fairdiv/errors.hpp"

namespace fairdiv::engine {

namespace {

using market::AlternatingPath;
using market::MbbGraph;
using market::Reachability;

void require(bool condition, const std::string& what) {
    if (!condition) throw InvariantViolation(what);
}

bool contains(const GoodSet& set, GoodId good) {
    return std::binary_search(set.begin(), set.end(), good);
}

void insert_sorted(GoodSet& set, GoodId good) {
    set.insert(std::lower_bound(set.begin(), set.end(), good), good);
}

void erase_sorted(GoodSet& set, GoodId good) {
    const auto it = std::lower_bound(set.begin(), set.end(), good);
    require(it != set.end() && *it == good, "transfer removes a good the agent does not hold");
    set.erase(it);
}

/// p(S ∪ {add} ∖ {drop}) without materializing the set.
Rational swapped_price(const PriceVector& prices, const GoodSet& bundle, std::optional<GoodId> add,
                       std::optional<GoodId> drop) {
    Rational total = bundle_price(prices, bundle);
    if (add && !contains(bundle, *add)) total += prices[*add];
    if (drop && contains(bundle, *drop) && drop != add) total -= prices[*drop];
    return total;
}

void min_finite(std::optional<Rational>& slot, Rational candidate) {
    if (!slot || candidate < *slot) slot = std::move(candidate);
}

}  // namespace

const char* to_string(StepKind kind) {
    switch (kind) {
        case StepKind::transfer: return "transfer";
        case StepKind::price_rise: return "price_rise";
        case StepKind::terminated: return "terminated";
    }
    return "unknown";
}

std::vector<std::size_t> PotentialVector::flatten() const {
    std::vector<std::size_t> out = good_counts_by_level;
    out.push_back(violator_count);
    return out;
}

void EngineState::record(TraceEvent event) {
    ++events_emitted;
    if (trace.size() < trace_cap) {
        trace.push_back(std::move(event));
    } else {
        ++dropped_events;
    }
}

EngineState initial_state(std::shared_ptr<const Instance> instance) {
    if (!instance) throw InvalidInput("engine state needs an instance");
    EngineState state;
    state.solution.prices.assign(instance->goods(), Rational{});
    state.instance = std::move(instance);
    return state;
}

EngineState make_state(std::shared_ptr<const Instance> instance, Solution solution) {
    if (!instance) throw InvalidInput("engine state needs an instance");
    if (solution.prices.size() != instance->goods()) throw InvalidInput("price vector has wrong length");
    if (solution.allocation.agents() == 0 || solution.allocation.agents() > instance->agents()) {
        throw InvalidInput("solution agent count does not fit the instance");
    }
    if (!is_partition(solution.allocation, instance->goods(), false)) {
        throw InvalidInput("bundles are not disjoint sorted good sets");
    }
    EngineState state;
    state.instance = std::move(instance);
    state.solution = std::move(solution);
    return state;
}

InitialPrices initial_prices_for_agent(const EngineState& state, AgentId agent) {
    const Instance& inst = *state.instance;
    require(agent == state.agent_count() && agent < inst.agents(), "agents must be added in order");

    const auto owner = owners(state.solution.allocation, inst.goods());
    std::optional<Rational> min_price;
    for (GoodId h = 0; h < inst.goods(); ++h) {
        if (owner[h] != no_owner) min_finite(min_price, state.solution.prices[h]);
    }
    Rational max_value;
    for (const Rational& v : inst.row(agent)) max_value = std::max(max_value, v);
    require(max_value.is_positive(), "agent " + std::to_string(agent) + " values no good");

    // With nothing in play the minimum price is taken to be 1.
    const Rational scale = min_price.value_or(Rational{1}) /
                           (Rational{static_cast<std::int64_t>(inst.goods())} * max_value);
    InitialPrices out;
    for (GoodId g = 0; g < inst.goods(); ++g) {
        if (owner[g] == no_owner && inst.value(agent, g).is_positive()) {
            out.goods.push_back(g);
            out.prices.push_back(inst.value(agent, g) * scale);
        }
    }
    return out;
}

void add_agent(EngineState& state, const InitialPrices& initial) {
    require(state.agent_count() < state.instance->agents(), "no agent left to add");
    for (std::size_t idx = 0; idx < initial.goods.size(); ++idx) {
        state.solution.prices[initial.goods[idx]] = initial.prices[idx];
    }
    state.solution.allocation.bundles.push_back(initial.goods);
}

BetaRates compute_betas(const EngineState& state, const MbbGraph& graph, const Reachability& reach) {
    const Instance& inst = *state.instance;
    const Solution& sol = state.solution;
    const Rational max_hat = max_hat_price(sol);
    const AgentId newest = state.newest();

    BetaRates rates;
    for (AgentId j : reach.r_agents) {
        for (GoodId g = 0; g < inst.goods(); ++g) {
            if (graph.owner[g] == no_owner || reach.good_reached[g]) continue;
            const Rational& v = inst.value(j, g);
            if (v.is_zero()) continue;
            min_finite(rates.new_edge, sol.prices[g] * graph.alphas[j] / v);
        }
        const Rational hat = hat_price(sol.prices, sol.allocation.bundles[j]);
        if (hat.is_positive()) min_finite(rates.new_violator, max_hat / hat);
    }
    const Rational newest_spend = bundle_price(sol.prices, sol.allocation.bundles[newest]);
    if (newest_spend.is_positive()) rates.newest_catches = max_hat / newest_spend;

    std::optional<Rational> beta;
    for (const auto* rate : {&rates.new_edge, &rates.new_violator, &rates.newest_catches}) {
        if (*rate) min_finite(beta, **rate);
    }
    require(beta.has_value(), "all price-rise rates are infinite");
    require(*beta > Rational{1}, "price-rise rate " + beta->str() + " is not above 1");
    rates.beta = *beta;
    if (rates.new_edge == beta) rates.attained.push_back(1);
    if (rates.new_violator == beta) rates.attained.push_back(2);
    if (rates.newest_catches == beta) rates.attained.push_back(3);
    return rates;
}

StepOutcome apply_price_rise(EngineState& state, const Reachability& reach, const Rational& beta) {
    require(beta > Rational{1}, "price-rise rate must exceed 1");
    for (GoodId g : reach.r_goods) state.solution.prices[g] *= beta;
    StepOutcome outcome;
    outcome.kind = StepKind::price_rise;
    return outcome;
}

StepOutcome transfer(EngineState& state, const AlternatingPath& path) {
    require(path.length() >= 1 && path.agents.size() == path.length() + 1, "transfer path is empty");
    auto& bundles = state.solution.allocation.bundles;
    const PriceVector& prices = state.solution.prices;
    const Rational max_hat = max_hat_price(state.solution);
    const std::size_t len = path.length();
    // g_r is path.goods[r - 1]; i_r is path.agents[r].
    auto good_at = [&](std::size_t r) { return path.goods[r - 1]; };

    std::size_t a = 0;
    for (std::size_t r = 1; r <= len; ++r) {
        if (swapped_price(prices, bundles[path.agents[r]], std::nullopt, good_at(r)) >= max_hat) {
            a = r;
            break;
        }
    }
    require(a != 0, "no agent on the transfer path can release its good");

    std::size_t b = 0;
    for (std::size_t r = a - 1; r >= 1; --r) {
        if (max_hat >= swapped_price(prices, bundles[path.agents[r]], good_at(r + 1), good_at(r))) {
            b = r;
            break;
        }
    }

    erase_sorted(bundles[path.agents[a]], good_at(a));
    for (std::size_t c = b + 1; c < a; ++c) {
        auto& bundle = bundles[path.agents[c]];
        erase_sorted(bundle, good_at(c));
        insert_sorted(bundle, good_at(c + 1));
    }
    insert_sorted(bundles[path.agents[b]], good_at(b + 1));

    StepOutcome outcome;
    outcome.kind = StepKind::transfer;
    outcome.a = a;
    outcome.b = b;
    return outcome;
}

PotentialVector compute_potential(const EngineState& state, const Reachability& reach) {
    const std::size_t k = state.agent_count();
    PotentialVector potential;
    potential.good_counts_by_level.assign(k + 1, 0);
    const auto& bundles = state.solution.allocation.bundles;
    for (AgentId i = 0; i < k; ++i) {
        const std::size_t level = std::min(reach.level[i], k);
        potential.good_counts_by_level[level] += bundles[i].size();
    }
    potential.violator_count = max_violators(state.solution).size();
    return potential;
}

Rational iteration_bound(std::size_t agent_count, std::size_t goods) {
    if (agent_count == 0) return Rational{};
    const auto k = static_cast<std::int64_t>(agent_count);
    const auto m = static_cast<std::int64_t>(goods);
    const Rational e_upper(27182818285LL, 10000000000LL);
    const Rational base = Rational(m + k, k) * e_upper;
    return Rational(k - 1) * base.pow(static_cast<unsigned>(agent_count));
}

std::size_t find_solution(EngineState& state, const EngineOptions& options) {
    const Instance& inst = *state.instance;
    const std::size_t k = state.agent_count();
    require(k > 0, "FindSolution needs at least one agent");
    const AgentId newest = state.newest();
    const Rational bound = iteration_bound(k, inst.goods());

    std::optional<PotentialVector> previous;
    std::size_t iterations = 0;
    for (;;) {
        const Rational min_spend = min_spending(state.solution);
        const Rational max_hat = max_hat_price(state.solution);
        const MbbGraph graph = market::build_graph(inst, state.solution);

        if (options.check_invariants) {
            require(market::bundles_within_mbb(graph, state.solution.allocation),
                    "a bundle left its owner's MBB set");
            require(is_pef1_except(state.solution, newest), "pEF1 fails for an agent other than the newest");
        }

        const Reachability from_newest = market::reach_from(graph, {newest}, k);
        TraceEvent event;
        event.agent_count = k;
        event.newest_agent = newest;
        event.min_spend = min_spend;
        event.max_hat = max_hat;
        event.potential = compute_potential(state, from_newest);

        if (min_spend >= max_hat) {
            event.kind = StepKind::terminated;
            event.step = state.events_emitted + 1;
            state.record(event);
            if (options.observer) options.observer->on_step(event, state);
            break;
        }

        const AgentSet spenders = min_spenders(state.solution);
        if (options.check_invariants) {
            require(spenders == AgentSet{newest}, "minimum spender set is not exactly the newest agent");
            if (previous) {
                require(*previous < event.potential, "potential vector did not increase");
            }
        }
        previous = event.potential;

        ++iterations;
        require(Rational{static_cast<std::int64_t>(iterations)} <= bound,
                "FindSolution exceeded its iteration bound");

        const AgentSet violators = max_violators(state.solution);
        const Reachability reach = market::reach_from(graph, spenders, k);
        const bool violator_reachable = std::any_of(violators.begin(), violators.end(),
                                                    [&](AgentId i) { return reach.agent_reached[i]; });

        StepOutcome outcome;
        if (violator_reachable) {
            auto path = market::shortest_violator_path(graph, newest, violators);
            require(path.has_value(), "reachable violator has no path");
            outcome = transfer(state, *path);
            event.path = std::move(path);
        } else {
            BetaRates rates = compute_betas(state, graph, reach);
            outcome = apply_price_rise(state, reach, rates.beta);
            event.rates = std::move(rates);
        }
        event.kind = outcome.kind;
        event.a = outcome.a;
        event.b = outcome.b;
        event.step = state.events_emitted + 1;
        if (options.observer) {
            state.record(event);
            options.observer->on_step(event, state);
        } else {
            state.record(std::move(event));
        }
    }
    if (options.observer) options.observer->on_find_solution_done(state, iterations);
    return iterations;
}

namespace {

AgentSet remap_agents(const AgentSet& agents, const std::vector<AgentId>& map) {
    AgentSet out;
    out.reserve(agents.size());
    for (AgentId i : agents) out.push_back(map[i]);
    return out;
}

}  // namespace

SolveResult solve(const Instance& raw, const EngineOptions& options) {
    if (raw.agents() == 0) throw InvalidInput("instance has no agents");
    if (!options.order.empty()) {
        // Validates the permutation.
        (void)raw.permute_agents(options.order);
    }

    NormalizedInstance normalized = normalize_instance(raw);
    const Instance& core = normalized.core;
    const NormalizationRecord& record = normalized.record;
    if (!check_hall(core)) {
        throw HallViolation("instance violates Hall's condition: no matching covers every agent");
    }

    // Insertion order in core indices.
    std::vector<AgentId> core_of(raw.agents(), no_owner);
    for (AgentId i = 0; i < record.agent_map.size(); ++i) core_of[record.agent_map[i]] = i;
    std::vector<AgentId> order;
    order.reserve(core.agents());
    for (std::size_t r = 0; r < raw.agents(); ++r) {
        const AgentId original = options.order.empty() ? r : options.order[r];
        if (core_of[original] != no_owner) order.push_back(core_of[original]);
    }

    auto ordered = std::make_shared<const Instance>(core.permute_agents(order));
    EngineState state = initial_state(ordered);
    state.trace_cap = options.trace_cap;

    SolveResult result;
    for (AgentId next = 0; next < ordered->agents(); ++next) {
        add_agent(state, initial_prices_for_agent(state, next));
        if (options.observer) options.observer->on_agent_added(state);
        result.iterations.push_back(find_solution(state, options));
        result.iteration_bounds.push_back(iteration_bound(next + 1, ordered->goods()));
    }

    if (options.check_invariants) {
        require(is_partition(state.solution.allocation, ordered->goods()), "final allocation is not a partition");
        require(is_pef1(state.solution), "final solution is not pEF1");
        require(market::bundles_within_mbb(market::build_graph(*ordered, state.solution),
                                           state.solution.allocation),
                "final solution is not MBB-consistent");
    }

    // ordered index -> original index
    std::vector<AgentId> agent_to_original(order.size());
    for (std::size_t r = 0; r < order.size(); ++r) agent_to_original[r] = record.agent_map[order[r]];

    Solution core_solution;
    core_solution.prices = state.solution.prices;
    core_solution.allocation.bundles.assign(core.agents(), GoodSet{});
    for (std::size_t r = 0; r < order.size(); ++r) {
        core_solution.allocation.bundles[order[r]] = state.solution.allocation.bundles[r];
    }
    result.solution = denormalize(core_solution, record);

    for (TraceEvent& event : state.trace) {
        event.newest_agent = agent_to_original[event.newest_agent];
        if (event.path) {
            event.path->agents = remap_agents(event.path->agents, agent_to_original);
            for (GoodId& g : event.path->goods) g = record.good_map[g];
        }
    }
    result.trace = std::move(state.trace);
    result.dropped_events = state.dropped_events;
    result.record = record;
    return result;
}

}  // namespace fairdiv::engine
