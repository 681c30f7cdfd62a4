#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "fairdiv/fair_division.hpp"

namespace fairdiv::testing {

inline Instance make_instance(const std::vector<std::vector<std::int64_t>>& rows) {
    const std::size_t n = rows.size();
    const std::size_t m = n == 0 ? 0 : rows.front().size();
    std::vector<Rational> values;
    for (const auto& row : rows) {
        for (auto v : row) values.emplace_back(v);
    }
    return Instance(n, m, std::move(values));
}

inline PriceVector make_prices(const std::vector<std::int64_t>& prices) {
    PriceVector out;
    for (auto p : prices) out.emplace_back(p);
    return out;
}

/// Three agents, five goods; every row and column has a positive entry.
inline Instance worked_instance() {
    return make_instance({{6, 5, 0, 0, 0}, {0, 1, 7, 3, 0}, {2, 3, 6, 3, 4}});
}

/// x_1 = {1,2}, x_2 = {3,4}, x_3 = {5} at p = (6,5,7,3,4), written 0-based.
inline Solution worked_state() {
    Solution sol;
    sol.allocation.bundles = {{0, 1}, {2, 3}, {4}};
    sol.prices = make_prices({6, 5, 7, 3, 4});
    return sol;
}

/// Uniform integer valuations in [0, max_value].
inline Instance random_instance(std::mt19937_64& rng, std::size_t n, std::size_t m, std::int64_t max_value) {
    std::uniform_int_distribution<std::int64_t> dist(0, max_value);
    std::vector<Rational> values;
    for (std::size_t idx = 0; idx < n * m; ++idx) values.emplace_back(dist(rng));
    return Instance(n, m, std::move(values));
}

/// Uniformly random assignment of every good to an agent.
inline Allocation random_allocation(std::mt19937_64& rng, std::size_t n, std::size_t m) {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    Allocation alloc;
    alloc.bundles.assign(n, GoodSet{});
    for (GoodId g = 0; g < m; ++g) alloc.bundles[pick(rng)].push_back(g);
    return alloc;
}

/// Random prices in [1, max_price]; each good goes to a random agent for
/// whom it is a maximum bang-per-buck good. Goods that are nobody's MBB go to
/// a uniformly random agent, which breaks MBB-consistency.
inline Solution random_mbb_solution(std::mt19937_64& rng, const Instance& inst, std::int64_t max_price) {
    std::uniform_int_distribution<std::int64_t> price(1, max_price);
    Solution sol;
    for (GoodId g = 0; g < inst.goods(); ++g) sol.prices.emplace_back(price(rng));
    std::vector<Rational> alpha(inst.agents());
    for (AgentId i = 0; i < inst.agents(); ++i) {
        for (GoodId g = 0; g < inst.goods(); ++g) alpha[i] = std::max(alpha[i], inst.value(i, g) / sol.prices[g]);
    }
    sol.allocation.bundles.assign(inst.agents(), GoodSet{});
    for (GoodId g = 0; g < inst.goods(); ++g) {
        std::vector<AgentId> takers;
        for (AgentId i = 0; i < inst.agents(); ++i) {
            if (inst.value(i, g) / sol.prices[g] == alpha[i]) takers.push_back(i);
        }
        if (takers.empty()) {
            for (AgentId i = 0; i < inst.agents(); ++i) takers.push_back(i);
        }
        std::uniform_int_distribution<std::size_t> pick(0, takers.size() - 1);
        sol.allocation.bundles[takers[pick(rng)]].push_back(g);
    }
    return sol;
}

/// Hall's condition by enumerating every agent subset.
inline bool hall_by_subsets(const Instance& inst) {
    const std::size_t n = inst.agents();
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
        std::size_t size = 0;
        std::vector<bool> neighbours(inst.goods(), false);
        for (AgentId i = 0; i < n; ++i) {
            if (!(mask & (std::uint64_t{1} << i))) continue;
            ++size;
            for (GoodId g = 0; g < inst.goods(); ++g) {
                if (inst.value(i, g).is_positive()) neighbours[g] = true;
            }
        }
        std::size_t covered = 0;
        for (bool b : neighbours) covered += b ? 1 : 0;
        if (covered < size) return false;
    }
    return true;
}

}  // namespace fairdiv::testing
