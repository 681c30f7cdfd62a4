#include <algorithm>
#include <deque>
#include <sstream>

#include "fairdiv/oracles.hpp"

namespace fairdiv::oracles {

namespace {

using engine::EngineState;
using engine::PotentialVector;
using engine::StepKind;
using engine::TraceEvent;

constexpr std::size_t max_samples = 16;

Rational spend_of(const PriceVector& prices, const GoodSet& bundle) {
    Rational total;
    for (GoodId g : bundle) total += prices[g];
    return total;
}

Rational hat_of(const PriceVector& prices, const GoodSet& bundle) {
    Rational total;
    Rational top;
    for (GoodId g : bundle) {
        total += prices[g];
        top = std::max(top, prices[g]);
    }
    return total - top;
}

Rational top_hat(const Solution& sol) {
    Rational best;
    for (const auto& bundle : sol.allocation.bundles) best = std::max(best, hat_of(sol.prices, bundle));
    return best;
}

GoodSet goods_in_play(const Solution& sol) {
    GoodSet out;
    for (const auto& bundle : sol.allocation.bundles) out.insert(out.end(), bundle.begin(), bundle.end());
    std::sort(out.begin(), out.end());
    return out;
}

/// MBB adjacency by cross-multiplication, never dividing.
std::vector<GoodSet> mbb_sets(const Instance& inst, const Solution& sol, const GoodSet& in_play) {
    std::vector<GoodSet> sets(sol.allocation.agents());
    if (in_play.empty()) return sets;
    for (AgentId i = 0; i < sets.size(); ++i) {
        GoodId best = in_play.front();
        for (GoodId h : in_play) {
            if (inst.value(i, h) * sol.prices[best] > inst.value(i, best) * sol.prices[h]) best = h;
        }
        for (GoodId g : in_play) {
            if (inst.value(i, best) * sol.prices[g] == inst.value(i, g) * sol.prices[best]) sets[i].push_back(g);
        }
    }
    return sets;
}

/// Half hop-distance from `source`; `k` when unreachable.
std::vector<std::size_t> levels_from(const Instance& inst, const Solution& sol, AgentId source) {
    const std::size_t k = sol.allocation.agents();
    const GoodSet in_play = goods_in_play(sol);
    const auto mbb = mbb_sets(inst, sol, in_play);
    const auto owner = owners(sol.allocation, inst.goods());
    std::vector<std::size_t> level(k, k);
    std::vector<char> seen(k, 0);
    std::deque<AgentId> queue{source};
    level[source] = 0;
    seen[source] = 1;
    while (!queue.empty()) {
        const AgentId i = queue.front();
        queue.pop_front();
        for (GoodId g : mbb[i]) {
            const AgentId next = owner[g];
            if (next == no_owner || seen[next]) continue;
            seen[next] = 1;
            level[next] = level[i] + 1;
            queue.push_back(next);
        }
    }
    return level;
}

PotentialVector potential_of(const Instance& inst, const Solution& sol, AgentId newest) {
    const std::size_t k = sol.allocation.agents();
    const auto level = levels_from(inst, sol, newest);
    PotentialVector phi;
    phi.good_counts_by_level.assign(k + 1, 0);
    for (AgentId i = 0; i < k; ++i) phi.good_counts_by_level[level[i]] += sol.allocation.bundles[i].size();
    const Rational top = top_hat(sol);
    for (const auto& bundle : sol.allocation.bundles) {
        if (hat_of(sol.prices, bundle) == top) ++phi.violator_count;
    }
    return phi;
}

bool pef1_except(const Solution& sol, AgentId except) {
    const Rational top = top_hat(sol);
    for (AgentId i = 0; i < sol.allocation.agents(); ++i) {
        if (i != except && spend_of(sol.prices, sol.allocation.bundles[i]) < top) return false;
    }
    return true;
}

std::string describe(const PotentialVector& phi) {
    std::ostringstream os;
    os << '(';
    for (std::size_t c : phi.good_counts_by_level) os << c << ',';
    os << phi.violator_count << ')';
    return os.str();
}

Rational iteration_limit(std::size_t k, std::size_t m) {
    Rational base = Rational(static_cast<std::int64_t>(m + k), static_cast<std::int64_t>(k)) *
                    Rational(27182818285LL, 10000000000LL);
    Rational power{1};
    for (std::size_t r = 0; r < k; ++r) power *= base;
    return Rational(static_cast<std::int64_t>(k) - 1) * power;
}

}  // namespace

void InvariantAuditor::flag(const std::string& invariant, const std::string& detail) {
    ++violations_[invariant];
    ++violation_count_;
    if (samples_.size() < max_samples) samples_.push_back(invariant + ": " + detail);
}

void InvariantAuditor::on_agent_added(const EngineState& state) {
    if (state.agent_count() == 1) {
        previous_ = Solution{};
        agent_count_ = 0;
    }
    const Solution& sol = state.solution;
    const AgentId newest = state.newest();
    const GoodSet before = goods_in_play(previous_);

    // Existing prices are untouched; new goods get positive prices.
    // A fresh auditor may be attached to a state built by hand.
    if (agent_count_ != 0 && agent_count_ + 1 != state.agent_count()) {
        flag("agent order", "agents not added one at a time");
    }
    for (GoodId g : goods_in_play(sol)) {
        const bool old = std::binary_search(before.begin(), before.end(), g);
        if (!sol.prices[g].is_positive()) flag("positive prices", "new good priced <= 0");
        if (old && previous_.prices[g] != sol.prices[g]) flag("non-decreasing prices", "agent insertion repriced a good");
    }
    if (!check_mbb_consistency(*state.instance, sol)) flag("mbb containment", "at FindSolution entry");
    if (!pef1_except(sol, newest)) flag("pef1 except newest", "at FindSolution entry");

    agent_count_ = state.agent_count();
    previous_ = sol;
    previous_potential_.reset();
    iterations_in_call_ = 0;
}

void InvariantAuditor::on_step(const TraceEvent& event, const EngineState& after) {
    const Instance& inst = *after.instance;
    const Solution& before = previous_;
    const Solution& now = after.solution;
    const AgentId newest = after.newest();
    const std::size_t k = after.agent_count();
    ++steps_checked_;

    const PotentialVector phi = potential_of(inst, before, newest);
    if (phi != event.potential) {
        flag("potential bookkeeping", "engine reported " + describe(event.potential) + ", recomputed " + describe(phi));
    }

    if (event.kind == StepKind::terminated) {
        if (before != now) flag("terminated", "state changed on the terminating marker");
        if (!is_pef1(now)) flag("termination pef1", "FindSolution stopped on a non-pEF1 state");
        if (!check_mbb_consistency(inst, now)) flag("mbb containment", "at termination");
        previous_ = now;
        return;
    }

    ++iterations_in_call_;

    // State before the step: not pEF1, minimum spender exactly k.
    if (is_pef1(before)) flag("loop guard", "step taken on a pEF1 state");
    if (min_spenders(before) != AgentSet{newest}) flag("newest is sole min spender", "minimum spenders differ from {k}");

    // Potential strictly increases between consecutive iterations.
    if (previous_potential_ && !(*previous_potential_ < phi)) {
        flag("potential increase", describe(*previous_potential_) + " then " + describe(phi));
    }
    previous_potential_ = phi;

    const GoodSet play_before = goods_in_play(before);
    const GoodSet play_now = goods_in_play(now);
    if (play_before != play_now || !is_partition(now.allocation, inst.goods(), false)) {
        flag("partition", "goods in play changed or bundles overlap");
    }
    for (GoodId g : play_now) {
        if (!now.prices[g].is_positive()) flag("positive prices", "good " + std::to_string(g));
        if (now.prices[g] < before.prices[g]) flag("non-decreasing prices", "good " + std::to_string(g));
    }

    const Rational hat_before = top_hat(before);
    const Rational hat_now = top_hat(now);
    if (event.kind == StepKind::price_rise) {
        if (!event.rates) {
            flag("beta range", "price rise without rates");
        } else if (!(event.rates->beta > Rational{1})) {
            flag("beta range", "beta = " + event.rates->beta.str());
        }
        if (now.allocation != before.allocation) flag("price rise", "allocation changed");
        if (hat_now != hat_before) flag("max p-hat fixed on price rise", "max p-hat moved on a price rise");
    } else {
        if (now.prices != before.prices) flag("transfer", "prices changed");
        if (hat_now > hat_before) flag("max p-hat non-increasing", "max p-hat rose on a transfer");
        if (!event.path) {
            flag("transfer", "transfer without a path");
        } else {
            const auto& path = *event.path;
            const std::size_t a = event.a;
            const std::size_t b = event.b;
            const auto level_before = levels_from(inst, before, newest);
            const auto level_now = levels_from(inst, now, newest);
            for (std::size_t r = 0; r < path.agents.size(); ++r) {
                if (level_before[path.agents[r]] != r) flag("path levels", "level(i_r) != r");
            }
            if (b >= a || a > path.length()) {
                flag("transfer indices", "a=" + std::to_string(a) + " b=" + std::to_string(b));
            } else {
                const AgentId ib = path.agents[b];
                const AgentId ia = path.agents[a];
                if (now.allocation.bundles[ib].size() != before.allocation.bundles[ib].size() + 1) {
                    flag("i_b gains one good", "i_b did not gain exactly one good");
                }
                if (now.allocation.bundles[ia].size() + 1 != before.allocation.bundles[ia].size()) {
                    flag("transfer sizes", "i_a did not lose exactly one good");
                }
                for (AgentId i = 0; i < k; ++i) {
                    if (level_before[i] > b) continue;
                    if (level_now[i] != level_before[i]) flag("low levels kept", "level <= b changed");
                    if (i != ib && now.allocation.bundles[i].size() != before.allocation.bundles[i].size()) {
                        flag("low-level bundle sizes", "bundle size of a low-level agent changed");
                    }
                }
            }
        }
    }

    // State after the step keeps the FindSolution invariants.
    if (!check_mbb_consistency(inst, now)) flag("mbb containment", "after step " + std::to_string(event.step));
    if (!pef1_except(now, newest)) flag("pef1 except newest", "after step " + std::to_string(event.step));

    previous_ = now;
}

void InvariantAuditor::on_find_solution_done(const EngineState& state, std::size_t iterations) {
    ++calls_checked_;
    max_iterations_ = std::max(max_iterations_, iterations);
    if (iterations != iterations_in_call_) {
        flag("iteration count", "engine reported " + std::to_string(iterations) + ", observed " +
                                    std::to_string(iterations_in_call_));
    }
    const Rational bound = iteration_limit(state.agent_count(), state.instance->goods());
    if (Rational(static_cast<std::int64_t>(iterations)) > bound) {
        flag("iteration bound", std::to_string(iterations) + " > " + bound.str());
    }
}

}  // namespace fairdiv::oracles
