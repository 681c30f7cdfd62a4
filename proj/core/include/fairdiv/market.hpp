#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fairdiv/fair_division.hpp"

namespace fairdiv::market {

/// v_ig / p_g with the convention 0/0 = 0.
/// Throws InvariantViolation for a positive value over a zero price.
Rational bang_per_buck(const Rational& value, const Rational& price);

/// alpha_i = max_g v_ig / p_g over every good, for every agent of the instance.
std::vector<Rational> compute_alphas(const Instance& instance, std::span<const Rational> prices);

/// Same, restricted to the goods in play (those someone holds) and to the
/// first `solution.allocation.agents()` agents.
std::vector<Rational> compute_alphas(const Instance& instance, const Solution& solution);

/// Augmented MBB graph of a (sub-)solution. Agents are the first
/// `solution.allocation.agents()` rows; goods in play are the owned ones.
struct MbbGraph {
    std::size_t agents = 0;
    std::size_t goods = 0;
    std::vector<Rational> alphas;
    /// agent -> goods in its MBB set, ascending (MBB edges).
    std::vector<GoodSet> mbb;
    /// good -> owner (allocation edges), `no_owner` when the good is not in play.
    std::vector<AgentId> owner;

    bool is_mbb(AgentId agent, GoodId good) const;
};

MbbGraph build_graph(const Instance& instance, const Solution& solution);

/// x_i ⊆ MBB_i for every agent.
bool bundles_within_mbb(const MbbGraph& graph, const Allocation& allocation);

/// Alternating path i_0, g_1, i_1, ..., g_l, i_l. goods[r - 1] is g_r.
struct AlternatingPath {
    std::vector<AgentId> agents;
    std::vector<GoodId> goods;

    std::size_t length() const { return goods.size(); }
    friend bool operator==(const AlternatingPath&, const AlternatingPath&) = default;
};

struct Reachability {
    std::vector<char> agent_reached;
    std::vector<char> good_reached;
    AgentSet r_agents;  ///< ascending
    GoodSet r_goods;    ///< ascending
    /// Good through which each agent was first reached; `no_owner` for sources and unreached agents.
    std::vector<GoodId> agent_parent;
    /// Agent whose MBB edge first reached each good; `no_owner` when unreached.
    std::vector<AgentId> good_parent;
    /// Half the hop distance from the nearest source; `unreachable_level` when unreached.
    std::vector<std::size_t> level;
    /// Reached agents in BFS dequeue order.
    std::vector<AgentId> visit_order;

    /// Path from a source to a reached agent following parent links.
    AlternatingPath path_to(AgentId target) const;
};

/// BFS over MBB edges (agent -> good) and allocation edges (good -> owner).
/// Adjacency is scanned in ascending index order.
Reachability reach_from(const MbbGraph& graph, const AgentSet& sources, std::size_t unreachable_level);

/// Shortest alternating path from `source` to any agent in `targets`. Among
/// shortest paths, the first target dequeued in BFS order wins, which is the
/// lexicographically smallest node sequence. Empty when no target is reachable.
std::optional<AlternatingPath> shortest_violator_path(const MbbGraph& graph, AgentId source,
                                                      const AgentSet& targets);

}  // namespace fairdiv::market
