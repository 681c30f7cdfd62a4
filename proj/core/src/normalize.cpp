#include <algorithm>
#include <string>

#include "fairdiv/errors.hpp"
#include "fairdiv/fair_division.hpp"

namespace fairdiv {

NormalizedInstance normalize_instance(const Instance& raw) {
    const std::size_t n = raw.agents();
    const std::size_t m = raw.goods();

    NormalizationRecord record;
    record.original_agents = n;
    record.original_goods = m;

    std::vector<bool> good_valued(m, false);
    std::vector<bool> agent_values(n, false);
    for (AgentId i = 0; i < n; ++i) {
        for (GoodId g = 0; g < m; ++g) {
            if (raw.value(i, g).is_positive()) {
                good_valued[g] = true;
                agent_values[i] = true;
            }
        }
    }
    for (AgentId i = 0; i < n; ++i) {
        (agent_values[i] ? record.agent_map : record.dropped_agents).push_back(i);
    }
    for (GoodId g = 0; g < m; ++g) {
        (good_valued[g] ? record.good_map : record.dropped_goods).push_back(g);
    }

    std::vector<Rational> values;
    values.reserve(record.agent_map.size() * record.good_map.size());
    for (AgentId i : record.agent_map) {
        for (GoodId g : record.good_map) values.push_back(raw.value(i, g));
    }
    Instance core(record.agent_map.size(), record.good_map.size(), std::move(values));
    return {std::move(core), std::move(record)};
}

Solution denormalize(const Solution& core_solution, const NormalizationRecord& record) {
    const auto& core_bundles = core_solution.allocation.bundles;
    if (core_bundles.size() != record.agent_map.size() ||
        core_solution.prices.size() != record.good_map.size()) {
        throw InvalidInput("solution does not match normalization record: expected " +
                           std::to_string(record.agent_map.size()) + " agents and " +
                           std::to_string(record.good_map.size()) + " goods");
    }

    Solution out;
    out.allocation.bundles.assign(record.original_agents, GoodSet{});
    out.prices.assign(record.original_goods, Rational{});

    for (GoodId g = 0; g < record.good_map.size(); ++g) {
        out.prices[record.good_map[g]] = core_solution.prices[g];
    }
    for (AgentId i = 0; i < core_bundles.size(); ++i) {
        auto& bundle = out.allocation.bundles[record.agent_map[i]];
        for (GoodId g : core_bundles[i]) {
            if (g >= record.good_map.size()) throw InvalidInput("core good index out of range");
            bundle.push_back(record.good_map[g]);
        }
    }
    if (!record.dropped_goods.empty() && record.original_agents > 0) {
        const AgentId sink = record.agent_map.empty() ? 0 : record.agent_map.front();
        auto& bundle = out.allocation.bundles[sink];
        bundle.insert(bundle.end(), record.dropped_goods.begin(), record.dropped_goods.end());
    }
    for (auto& bundle : out.allocation.bundles) std::sort(bundle.begin(), bundle.end());
    return out;
}

std::optional<Solution> project_to_core(const Solution& solution, const NormalizationRecord& record) {
    if (solution.allocation.bundles.size() != record.original_agents ||
        solution.prices.size() != record.original_goods) {
        return std::nullopt;
    }
    std::vector<GoodId> core_good(record.original_goods, no_owner);
    for (GoodId g = 0; g < record.good_map.size(); ++g) core_good[record.good_map[g]] = g;
    std::vector<AgentId> core_agent(record.original_agents, no_owner);
    for (AgentId i = 0; i < record.agent_map.size(); ++i) core_agent[record.agent_map[i]] = i;

    Solution out;
    out.allocation.bundles.assign(record.agent_map.size(), GoodSet{});
    out.prices.reserve(record.good_map.size());
    for (GoodId g : record.good_map) out.prices.push_back(solution.prices[g]);

    for (AgentId i = 0; i < record.original_agents; ++i) {
        for (GoodId g : solution.allocation.bundles[i]) {
            if (g >= record.original_goods) return std::nullopt;
            if (core_good[g] == no_owner) continue;
            if (core_agent[i] == no_owner) return std::nullopt;
            out.allocation.bundles[core_agent[i]].push_back(core_good[g]);
        }
    }
    for (auto& bundle : out.allocation.bundles) std::sort(bundle.begin(), bundle.end());
    return out;
}

}  // namespace fairdiv
