#include "fairdiv/oracles.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <string>

#include "fairdiv/errors.hpp"

namespace fairdiv::oracles {

namespace {

/// Per-agent integer rescaling of the valuation matrix: row i is multiplied
/// by the lcm of its denominators. Preserves every per-agent comparison.
template <typename Int>
struct ScaledTable {
    std::size_t agents = 0;
    std::size_t goods = 0;
    std::vector<Int> values;  ///< agents x goods
    std::vector<Int> suffix;  ///< agents x (goods + 1): sum of values[i][h] for h >= g

    const Int& value(AgentId i, GoodId g) const { return values[i * goods + g]; }
    const Int& rest(AgentId i, GoodId g) const { return suffix[i * (goods + 1) + g]; }
};

struct RowScale {
    std::vector<mpz_class> scaled;  ///< agents x goods
    std::vector<mpz_class> factor;  ///< per agent
};

RowScale scale_rows(const Instance& instance) {
    RowScale out;
    out.scaled.reserve(instance.agents() * instance.goods());
    for (AgentId i = 0; i < instance.agents(); ++i) {
        mpz_class lcm = 1;
        for (const Rational& v : instance.row(i)) {
            mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), v.raw().get_den_mpz_t());
        }
        for (const Rational& v : instance.row(i)) {
            out.scaled.push_back(v.raw().get_num() * (lcm / v.raw().get_den()));
        }
        out.factor.push_back(lcm);
    }
    return out;
}

template <typename Int>
Int convert(const mpz_class& value) {
    if constexpr (std::is_same_v<Int, mpz_class>) {
        return value;
    } else {
        return static_cast<Int>(value.get_si());
    }
}

template <typename Int>
ScaledTable<Int> make_table(const Instance& instance, const RowScale& scale) {
    ScaledTable<Int> table;
    table.agents = instance.agents();
    table.goods = instance.goods();
    for (const auto& v : scale.scaled) table.values.push_back(convert<Int>(v));
    table.suffix.assign(table.agents * (table.goods + 1), Int(0));
    for (AgentId i = 0; i < table.agents; ++i) {
        for (GoodId g = table.goods; g-- > 0;) {
            table.suffix[i * (table.goods + 1) + g] =
                table.suffix[i * (table.goods + 1) + g + 1] + table.value(i, g);
        }
    }
    return table;
}

bool fits_int64(const mpz_class& value) {
    static const mpz_class limit = mpz_class(1) << 62;
    return value < limit;
}

mpz_class max_row_sum(const Instance& instance, const RowScale& scale) {
    mpz_class best = 0;
    for (AgentId i = 0; i < instance.agents(); ++i) {
        mpz_class sum = 0;
        for (GoodId g = 0; g < instance.goods(); ++g) sum += scale.scaled[i * instance.goods() + g];
        best = std::max(best, sum);
    }
    return best;
}

template <typename Int>
bool po_search(const ScaledTable<Int>& table, const std::vector<Int>& candidate) {
    const std::size_t n = table.agents;
    const std::size_t m = table.goods;
    std::vector<Int> current(n, Int(0));
    bool dominated = false;

    auto dfs = [&](auto&& self, GoodId g) -> void {
        if (dominated) return;
        for (AgentId i = 0; i < n; ++i) {
            if (current[i] + table.rest(i, g) < candidate[i]) return;
        }
        if (g == m) {
            bool strict = false;
            for (AgentId i = 0; i < n; ++i) {
                if (current[i] > candidate[i]) strict = true;
            }
            dominated = strict;
            return;
        }
        for (AgentId a = 0; a < n; ++a) {
            current[a] += table.value(a, g);
            self(self, g + 1);
            current[a] -= table.value(a, g);
            if (dominated) return;
        }
    };
    dfs(dfs, 0);
    return !dominated;
}

template <typename Int>
std::optional<bool> po_with(const Instance& instance, const RowScale& scale, const Allocation& allocation) {
    const ScaledTable<Int> table = make_table<Int>(instance, scale);
    std::vector<Int> candidate(instance.agents(), Int(0));
    for (AgentId i = 0; i < instance.agents(); ++i) {
        for (GoodId g : allocation.bundles[i]) candidate[i] += table.value(i, g);
    }
    return po_search(table, candidate);
}

template <typename Int>
MnwResult mnw_with(const Instance& instance, const RowScale& scale) {
    const ScaledTable<Int> table = make_table<Int>(instance, scale);
    const std::size_t n = table.agents;
    const std::size_t m = table.goods;
    std::vector<Int> current(n, Int(0));
    std::vector<AgentId> assignment(m, 0);
    std::vector<AgentId> best_assignment(m, 0);
    Int best(0);
    bool found = false;

    auto product = [&](GoodId from) {
        Int p(1);
        for (AgentId i = 0; i < n; ++i) p *= current[i] + table.rest(i, from);
        return p;
    };

    auto dfs = [&](auto&& self, GoodId g) -> void {
        if (found && product(g) <= best) return;
        if (g == m) {
            const Int p = product(m);
            if (!found || p > best) {
                best = p;
                best_assignment = assignment;
                found = true;
            }
            return;
        }
        for (AgentId a = 0; a < n; ++a) {
            assignment[g] = a;
            current[a] += table.value(a, g);
            self(self, g + 1);
            current[a] -= table.value(a, g);
        }
    };
    dfs(dfs, 0);

    MnwResult result;
    result.allocation.bundles.assign(n, GoodSet{});
    for (GoodId g = 0; g < m; ++g) result.allocation.bundles[best_assignment[g]].push_back(g);

    mpz_class denominator = 1;
    for (const auto& f : scale.factor) denominator *= f;
    mpz_class numerator;
    if constexpr (std::is_same_v<Int, mpz_class>) {
        numerator = best;
    } else {
        numerator = mpz_class(std::to_string(best), 10);
    }
    result.product = Rational(mpq_class(numerator, denominator));
    return result;
}

void require_allocation(const Instance& instance, const Allocation& allocation) {
    if (allocation.agents() != instance.agents()) {
        throw InvalidInput("allocation has " + std::to_string(allocation.agents()) + " bundles, expected " +
                           std::to_string(instance.agents()));
    }
    if (!is_partition(allocation, instance.goods())) {
        throw InvalidInput("allocation is not a partition of the goods");
    }
}

}  // namespace

std::uint64_t brute_cap_from_env(std::uint64_t fallback) {
    const char* text = std::getenv("FAIRDIV_BRUTE_CAP");
    if (text == nullptr || *text == '\0') return fallback;
    char* end = nullptr;
    const unsigned long long parsed = std::strtoull(text, &end, 10);
    if (end == nullptr || *end != '\0') return fallback;
    return static_cast<std::uint64_t>(parsed);
}

std::uint64_t allocation_count(std::size_t agents, std::size_t goods) {
    constexpr std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t count = 1;
    for (std::size_t g = 0; g < goods; ++g) {
        if (agents != 0 && count > max / agents) return max;
        count *= agents;
    }
    return count;
}

bool check_ef1(const Instance& instance, const Allocation& allocation) {
    const std::size_t n = allocation.agents();
    for (AgentId i = 0; i < n; ++i) {
        const Rational own = instance.bundle_value(i, allocation.bundles[i]);
        for (AgentId j = 0; j < n; ++j) {
            if (i == j || allocation.bundles[j].empty()) continue;
            Rational other;
            Rational top;
            for (GoodId g : allocation.bundles[j]) {
                other += instance.value(i, g);
                top = std::max(top, instance.value(i, g));
            }
            if (own < other - top) return false;
        }
    }
    return true;
}

bool check_ef1_literal(const Instance& instance, const Allocation& allocation) {
    const std::size_t n = allocation.agents();
    for (AgentId i = 0; i < n; ++i) {
        const Rational own = instance.bundle_value(i, allocation.bundles[i]);
        for (AgentId j = 0; j < n; ++j) {
            if (i == j) continue;
            const GoodSet& envied = allocation.bundles[j];
            if (own >= instance.bundle_value(i, envied)) continue;
            bool rescued = false;
            for (GoodId removed : envied) {
                GoodSet rest;
                for (GoodId g : envied) {
                    if (g != removed) rest.push_back(g);
                }
                if (own >= instance.bundle_value(i, rest)) {
                    rescued = true;
                    break;
                }
            }
            if (!rescued) return false;
        }
    }
    return true;
}

bool check_mbb_consistency(const Instance& instance, const Solution& solution) {
    const std::size_t k = solution.allocation.agents();
    const std::size_t m = instance.goods();
    if (k > instance.agents() || solution.prices.size() != m) return false;
    if (!is_partition(solution.allocation, m, false)) return false;

    GoodSet in_play;
    for (const auto& bundle : solution.allocation.bundles) in_play.insert(in_play.end(), bundle.begin(), bundle.end());
    std::sort(in_play.begin(), in_play.end());
    for (GoodId g : in_play) {
        if (!solution.prices[g].is_positive()) return false;
    }

    // g is MBB for i iff v_ih * p_g <= v_ig * p_h for every good h in play.
    for (AgentId i = 0; i < k; ++i) {
        if (solution.allocation.bundles[i].empty()) continue;
        GoodId best = in_play.front();
        for (GoodId h : in_play) {
            if (instance.value(i, h) * solution.prices[best] > instance.value(i, best) * solution.prices[h]) best = h;
        }
        for (GoodId g : solution.allocation.bundles[i]) {
            if (instance.value(i, best) * solution.prices[g] != instance.value(i, g) * solution.prices[best]) {
                return false;
            }
        }
    }
    return true;
}

std::optional<bool> brute_force_po(const Instance& instance, const Allocation& allocation, std::uint64_t cap) {
    require_allocation(instance, allocation);
    if (allocation_count(instance.agents(), instance.goods()) > cap) return std::nullopt;
    const RowScale scale = scale_rows(instance);
    if (fits_int64(max_row_sum(instance, scale))) {
        return po_with<std::int64_t>(instance, scale, allocation);
    }
    return po_with<mpz_class>(instance, scale, allocation);
}

Rational nsw_product(const Instance& instance, const Allocation& allocation) {
    Rational product{1};
    for (AgentId i = 0; i < allocation.agents(); ++i) {
        product *= instance.bundle_value(i, allocation.bundles[i]);
    }
    return product;
}

std::optional<MnwResult> brute_force_mnw(const Instance& instance, std::uint64_t cap) {
    if (instance.agents() == 0) throw InvalidInput("instance has no agents");
    if (allocation_count(instance.agents(), instance.goods()) > cap) return std::nullopt;
    const RowScale scale = scale_rows(instance);
    mpz_class product_bound = 1;
    for (AgentId i = 0; i < instance.agents(); ++i) {
        mpz_class sum = 0;
        for (GoodId g = 0; g < instance.goods(); ++g) sum += scale.scaled[i * instance.goods() + g];
        product_bound *= sum + 1;
    }
    if (fits_int64(product_bound)) return mnw_with<std::int64_t>(instance, scale);
    return mnw_with<mpz_class>(instance, scale);
}

Rational nsw_ratio_floor() {
    return Rational(6922, 10000);
}

bool nsw_ratio_holds(const Instance& instance, const Allocation& allocation, const Rational& mnw_product) {
    const Rational threshold = nsw_ratio_floor().pow(static_cast<unsigned>(instance.agents())) * mnw_product;
    return nsw_product(instance, allocation) >= threshold;
}

std::optional<bool> check_nsw_ratio(const Instance& instance, const Allocation& allocation, std::uint64_t cap) {
    const auto mnw = brute_force_mnw(instance, cap);
    if (!mnw) return std::nullopt;
    return nsw_ratio_holds(instance, allocation, mnw->product);
}

bool VerificationReport::all_passed() const {
    return ef1 && pef1 && mbb_consistent && witness_implies_ef1 && brute_po.value_or(true) && ratio_ok.value_or(true);
}

VerificationReport verify(const Instance& instance, const Solution& solution, std::uint64_t cap) {
    require_allocation(instance, solution.allocation);
    if (solution.prices.size() != instance.goods()) throw InvalidInput("price vector has wrong length");

    VerificationReport report;
    report.ef1 = check_ef1(instance, solution.allocation);

    const NormalizedInstance normalized = normalize_instance(instance);
    if (const auto core = project_to_core(solution, normalized.record)) {
        report.pef1 = is_pef1(*core);
        report.mbb_consistent = check_mbb_consistency(normalized.core, *core);
    }
    report.witness_implies_ef1 = !(report.pef1 && report.mbb_consistent && !report.ef1);

    report.brute_po = brute_force_po(instance, solution.allocation, cap);
    report.nsw_product = nsw_product(instance, solution.allocation);
    if (const auto mnw = brute_force_mnw(instance, cap)) {
        report.mnw_product = mnw->product;
        report.ratio_ok = nsw_ratio_holds(instance, solution.allocation, mnw->product);
    }
    return report;
}

}  // namespace fairdiv::oracles
