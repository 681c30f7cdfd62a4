#include "fairdiv/market.hpp"

#include <algorithm>
#include <deque>
#include <string>

#include "fairdiv/errors.hpp"

namespace fairdiv::market {

namespace {

/// Max ratio over the goods accepted by `in_play` for one agent.
template <typename InPlay>
Rational agent_alpha(const Instance& instance, std::span<const Rational> prices, AgentId agent,
                     InPlay in_play) {
    Rational best;
    for (GoodId g = 0; g < instance.goods(); ++g) {
        if (!in_play(g)) continue;
        best = std::max(best, bang_per_buck(instance.value(agent, g), prices[g]));
    }
    return best;
}

}  // namespace

Rational bang_per_buck(const Rational& value, const Rational& price) {
    if (value.is_zero()) return Rational{};
    if (!price.is_positive()) {
        throw InvariantViolation("positively valued good has non-positive price");
    }
    return value / price;
}

std::vector<Rational> compute_alphas(const Instance& instance, std::span<const Rational> prices) {
    if (prices.size() != instance.goods()) throw InvalidInput("price vector has wrong length");
    std::vector<Rational> alphas;
    alphas.reserve(instance.agents());
    for (AgentId i = 0; i < instance.agents(); ++i) {
        alphas.push_back(agent_alpha(instance, prices, i, [](GoodId) { return true; }));
    }
    return alphas;
}

std::vector<Rational> compute_alphas(const Instance& instance, const Solution& solution) {
    return build_graph(instance, solution).alphas;
}

bool MbbGraph::is_mbb(AgentId agent, GoodId good) const {
    return std::binary_search(mbb[agent].begin(), mbb[agent].end(), good);
}

MbbGraph build_graph(const Instance& instance, const Solution& solution) {
    const std::size_t k = solution.allocation.agents();
    const std::size_t m = instance.goods();
    if (k > instance.agents()) throw InvalidInput("solution has more agents than the instance");
    if (solution.prices.size() != m) throw InvalidInput("price vector has wrong length");

    MbbGraph graph;
    graph.agents = k;
    graph.goods = m;
    graph.owner = owners(solution.allocation, m);
    graph.alphas.reserve(k);
    graph.mbb.resize(k);

    std::vector<Rational> ratios(m);
    for (AgentId i = 0; i < k; ++i) {
        Rational alpha;
        for (GoodId g = 0; g < m; ++g) {
            if (graph.owner[g] == no_owner) continue;
            ratios[g] = bang_per_buck(instance.value(i, g), solution.prices[g]);
            alpha = std::max(alpha, ratios[g]);
        }
        for (GoodId g = 0; g < m; ++g) {
            if (graph.owner[g] != no_owner && ratios[g] == alpha) graph.mbb[i].push_back(g);
        }
        graph.alphas.push_back(std::move(alpha));
    }
    return graph;
}

bool bundles_within_mbb(const MbbGraph& graph, const Allocation& allocation) {
    for (AgentId i = 0; i < allocation.agents(); ++i) {
        for (GoodId g : allocation.bundles[i]) {
            if (!graph.is_mbb(i, g)) return false;
        }
    }
    return true;
}

AlternatingPath Reachability::path_to(AgentId target) const {
    if (target >= agent_reached.size() || !agent_reached[target]) {
        throw InvalidInput("agent " + std::to_string(target) + " is not reachable");
    }
    AlternatingPath path;
    AgentId current = target;
    path.agents.push_back(current);
    while (agent_parent[current] != no_owner) {
        const GoodId g = agent_parent[current];
        path.goods.push_back(g);
        current = good_parent[g];
        path.agents.push_back(current);
    }
    std::reverse(path.agents.begin(), path.agents.end());
    std::reverse(path.goods.begin(), path.goods.end());
    return path;
}

Reachability reach_from(const MbbGraph& graph, const AgentSet& sources, std::size_t unreachable_level) {
    Reachability reach;
    reach.agent_reached.assign(graph.agents, 0);
    reach.good_reached.assign(graph.goods, 0);
    reach.agent_parent.assign(graph.agents, no_owner);
    reach.good_parent.assign(graph.goods, no_owner);
    reach.level.assign(graph.agents, unreachable_level);

    std::deque<AgentId> queue;
    for (AgentId s : sources) {
        if (s >= graph.agents) throw InvalidInput("source agent out of range");
        if (reach.agent_reached[s]) continue;
        reach.agent_reached[s] = 1;
        reach.level[s] = 0;
        queue.push_back(s);
    }
    std::sort(queue.begin(), queue.end());

    while (!queue.empty()) {
        const AgentId i = queue.front();
        queue.pop_front();
        reach.visit_order.push_back(i);
        for (GoodId g : graph.mbb[i]) {
            if (reach.good_reached[g]) continue;
            reach.good_reached[g] = 1;
            reach.good_parent[g] = i;
            const AgentId next = graph.owner[g];
            if (next == no_owner || reach.agent_reached[next]) continue;
            reach.agent_reached[next] = 1;
            reach.agent_parent[next] = g;
            reach.level[next] = reach.level[i] + 1;
            queue.push_back(next);
        }
    }

    for (AgentId i = 0; i < graph.agents; ++i) {
        if (reach.agent_reached[i]) reach.r_agents.push_back(i);
    }
    for (GoodId g = 0; g < graph.goods; ++g) {
        if (reach.good_reached[g]) reach.r_goods.push_back(g);
    }
    return reach;
}

std::optional<AlternatingPath> shortest_violator_path(const MbbGraph& graph, AgentId source,
                                                      const AgentSet& targets) {
    std::vector<char> is_target(graph.agents, 0);
    for (AgentId t : targets) {
        if (t >= graph.agents) throw InvalidInput("target agent out of range");
        is_target[t] = 1;
    }
    const Reachability reach = reach_from(graph, {source}, graph.agents);
    for (AgentId i : reach.visit_order) {
        if (is_target[i]) return reach.path_to(i);
    }
    return std::nullopt;
}

}  // namespace fairdiv::market
