#include "fairdiv/fair_division.hpp"

#include <algorithm>
#include <string>

#include "fairdiv/errors.hpp"

namespace fairdiv {

Instance::Instance(std::size_t agents, std::size_t goods, std::vector<Rational> values)
    : agents_(agents), goods_(goods), values_(std::move(values)) {
    if (values_.size() != agents_ * goods_) {
        throw InvalidInput("valuation matrix has " + std::to_string(values_.size()) +
                           " entries, expected " + std::to_string(agents_ * goods_));
    }
    for (std::size_t idx = 0; idx < values_.size(); ++idx) {
        if (values_[idx].is_negative()) {
            throw InvalidInput("negative valuation for agent " + std::to_string(idx / goods_) +
                               ", good " + std::to_string(idx % goods_));
        }
    }
}

Rational Instance::bundle_value(AgentId agent, const GoodSet& bundle) const {
    Rational total;
    for (GoodId g : bundle) total += value(agent, g);
    return total;
}

Instance Instance::permute_agents(std::span<const AgentId> order) const {
    if (order.size() != agents_) throw InvalidInput("agent order has wrong length");
    std::vector<bool> seen(agents_, false);
    std::vector<Rational> values;
    values.reserve(values_.size());
    for (AgentId src : order) {
        if (src >= agents_ || seen[src]) throw InvalidInput("agent order is not a permutation");
        seen[src] = true;
        const auto r = row(src);
        values.insert(values.end(), r.begin(), r.end());
    }
    return Instance(agents_, goods_, std::move(values));
}

bool is_partition(const Allocation& allocation, std::size_t goods, bool require_cover) {
    std::vector<bool> seen(goods, false);
    std::size_t covered = 0;
    for (const auto& bundle : allocation.bundles) {
        for (std::size_t idx = 0; idx < bundle.size(); ++idx) {
            const GoodId g = bundle[idx];
            if (g >= goods || seen[g]) return false;
            if (idx > 0 && bundle[idx - 1] >= g) return false;
            seen[g] = true;
            ++covered;
        }
    }
    return !require_cover || covered == goods;
}

std::vector<AgentId> owners(const Allocation& allocation, std::size_t goods) {
    std::vector<AgentId> owner(goods, no_owner);
    for (AgentId i = 0; i < allocation.bundles.size(); ++i) {
        for (GoodId g : allocation.bundles[i]) {
            if (g >= goods) throw InvalidInput("good index " + std::to_string(g) + " out of range");
            owner[g] = i;
        }
    }
    return owner;
}

Rational bundle_price(std::span<const Rational> prices, const GoodSet& bundle) {
    Rational total;
    for (GoodId g : bundle) {
        if (g >= prices.size()) {
            throw InvalidInput("good index " + std::to_string(g) + " out of range");
        }
        total += prices[g];
    }
    return total;
}

Rational hat_price(std::span<const Rational> prices, const GoodSet& bundle) {
    if (bundle.empty()) return Rational{};
    Rational total = bundle_price(prices, bundle);
    const Rational* top = &prices[bundle.front()];
    for (GoodId g : bundle) {
        if (prices[g] > *top) top = &prices[g];
    }
    return total - *top;
}

Rational min_spending(const Solution& solution) {
    const auto& bundles = solution.allocation.bundles;
    if (bundles.empty()) return Rational{};
    Rational best = bundle_price(solution.prices, bundles.front());
    for (std::size_t i = 1; i < bundles.size(); ++i) {
        best = std::min(best, bundle_price(solution.prices, bundles[i]));
    }
    return best;
}

Rational max_hat_price(const Solution& solution) {
    Rational best;
    for (const auto& bundle : solution.allocation.bundles) {
        best = std::max(best, hat_price(solution.prices, bundle));
    }
    return best;
}

AgentSet min_spenders(const Solution& solution) {
    const auto& bundles = solution.allocation.bundles;
    std::vector<Rational> spend;
    spend.reserve(bundles.size());
    for (const auto& bundle : bundles) spend.push_back(bundle_price(solution.prices, bundle));
    AgentSet result;
    if (spend.empty()) return result;
    const Rational lowest = *std::min_element(spend.begin(), spend.end());
    for (AgentId i = 0; i < spend.size(); ++i) {
        if (spend[i] == lowest) result.push_back(i);
    }
    return result;
}

AgentSet max_violators(const Solution& solution) {
    const auto& bundles = solution.allocation.bundles;
    std::vector<Rational> hats;
    hats.reserve(bundles.size());
    for (const auto& bundle : bundles) hats.push_back(hat_price(solution.prices, bundle));
    AgentSet result;
    if (hats.empty()) return result;
    const Rational highest = *std::max_element(hats.begin(), hats.end());
    for (AgentId i = 0; i < hats.size(); ++i) {
        if (hats[i] == highest) result.push_back(i);
    }
    return result;
}

bool is_pef1(const Solution& solution) {
    return min_spending(solution) >= max_hat_price(solution);
}

bool is_pef1_except(const Solution& solution, AgentId except) {
    const Rational threshold = max_hat_price(solution);
    const auto& bundles = solution.allocation.bundles;
    for (AgentId i = 0; i < bundles.size(); ++i) {
        if (i == except) continue;
        if (bundle_price(solution.prices, bundles[i]) < threshold) return false;
    }
    return true;
}

}  // namespace fairdiv
