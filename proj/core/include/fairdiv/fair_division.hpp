#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fairdiv/rational.hpp"

namespace fairdiv {

using AgentId = std::size_t;
using GoodId = std::size_t;
/// Sorted, duplicate-free list of good indices.
using GoodSet = std::vector<GoodId>;
/// Sorted, duplicate-free list of agent indices.
using AgentSet = std::vector<AgentId>;
using PriceVector = std::vector<Rational>;

/// Additive fair division instance: n agents, m goods, v_ig >= 0.
class Instance {
public:
    Instance() = default;
    /// `values` is row-major, one row of `goods` entries per agent.
    /// Throws InvalidInput on size mismatch or a negative value.
    Instance(std::size_t agents, std::size_t goods, std::vector<Rational> values);

    std::size_t agents() const { return agents_; }
    std::size_t goods() const { return goods_; }

    const Rational& value(AgentId agent, GoodId good) const { return values_[agent * goods_ + good]; }
    std::span<const Rational> row(AgentId agent) const {
        return {values_.data() + agent * goods_, goods_};
    }

    /// v_i(S) under additive valuations.
    Rational bundle_value(AgentId agent, const GoodSet& bundle) const;

    /// Same instance with agents reordered: row r of the result is row order[r] of this.
    Instance permute_agents(std::span<const AgentId> order) const;

    friend bool operator==(const Instance&, const Instance&) = default;

private:
    std::size_t agents_ = 0;
    std::size_t goods_ = 0;
    std::vector<Rational> values_;
};

/// Integral allocation. Bundles are indexed by agent. Over a full instance the
/// bundles partition all goods; over a sub-instance they partition the goods in play.
struct Allocation {
    std::vector<GoodSet> bundles;

    std::size_t agents() const { return bundles.size(); }
    friend bool operator==(const Allocation&, const Allocation&) = default;
};

struct Solution {
    Allocation allocation;
    PriceVector prices;

    friend bool operator==(const Solution&, const Solution&) = default;
};

/// True iff every bundle is sorted, duplicate-free, in range, pairwise disjoint,
/// and (when `require_cover`) together they cover all `goods`.
bool is_partition(const Allocation& allocation, std::size_t goods, bool require_cover = true);

inline constexpr AgentId no_owner = static_cast<AgentId>(-1);

/// owner[g] for each good, `no_owner` for goods nobody holds.
std::vector<AgentId> owners(const Allocation& allocation, std::size_t goods);

/// p(S). Throws InvalidInput when S references a good outside `prices`.
Rational bundle_price(std::span<const Rational> prices, const GoodSet& bundle);

/// p(S) minus the highest price in S; 0 for the empty set.
Rational hat_price(std::span<const Rational> prices, const GoodSet& bundle);

/// min_i p(x_i).
Rational min_spending(const Solution& solution);
/// max_i p̂(x_i).
Rational max_hat_price(const Solution& solution);

/// Agents with minimum spending, ascending. Empty only when there are no agents.
AgentSet min_spenders(const Solution& solution);
/// Agents whose p̂ is maximal, ascending.
AgentSet max_violators(const Solution& solution);

/// min_i p(x_i) >= max_i p̂(x_i).
bool is_pef1(const Solution& solution);
/// p(x_i) >= max_j p̂(x_j) for every i != except.
bool is_pef1_except(const Solution& solution, AgentId except);

/// Maps between a raw instance and its core (no all-zero rows or columns).
struct NormalizationRecord {
    std::size_t original_agents = 0;
    std::size_t original_goods = 0;
    AgentSet dropped_agents;
    GoodSet dropped_goods;
    /// core index -> original index
    std::vector<AgentId> agent_map;
    std::vector<GoodId> good_map;

    bool empty() const { return dropped_agents.empty() && dropped_goods.empty(); }
};

struct NormalizedInstance {
    Instance core;
    NormalizationRecord record;
};

/// Strips goods nobody values and agents who value nothing.
NormalizedInstance normalize_instance(const Instance& raw);

/// Re-embeds a core solution into the original index space. Dropped agents
/// get empty bundles; dropped goods join the lowest-index surviving agent's
/// bundle (agent 0 if none survive) at price 0.
/// Throws InvalidInput when the solution does not match the record.
Solution denormalize(const Solution& core_solution, const NormalizationRecord& record);

/// Restriction of an original-space solution to the core indices. Goods the
/// record dropped are discarded. Empty when a dropped agent holds a surviving
/// good or the sizes do not match the record.
std::optional<Solution> project_to_core(const Solution& solution, const NormalizationRecord& record);

/// Whether the positive-value graph has a matching saturating all agents.
bool check_hall(const Instance& instance);

}  // namespace fairdiv
