#include <algorithm>
#include <functional>
#include <vector>

#include "fairdiv/fair_division.hpp"

namespace fairdiv {

// Kuhn's augmenting-path matching on the positive-value graph.
bool check_hall(const Instance& instance) {
    const std::size_t n = instance.agents();
    const std::size_t m = instance.goods();
    if (n > m) return false;

    std::vector<std::vector<GoodId>> adjacency(n);
    for (AgentId i = 0; i < n; ++i) {
        for (GoodId g = 0; g < m; ++g) {
            if (instance.value(i, g).is_positive()) adjacency[i].push_back(g);
        }
    }

    std::vector<AgentId> matched_to(m, no_owner);
    std::vector<char> visited(m, 0);
    std::function<bool(AgentId)> augment = [&](AgentId agent) {
        for (GoodId g : adjacency[agent]) {
            if (visited[g]) continue;
            visited[g] = 1;
            if (matched_to[g] == no_owner || augment(matched_to[g])) {
                matched_to[g] = agent;
                return true;
            }
        }
        return false;
    };

    for (AgentId i = 0; i < n; ++i) {
        std::fill(visited.begin(), visited.end(), 0);
        if (!augment(i)) return false;
    }
    return true;
}

}  // namespace fairdiv
