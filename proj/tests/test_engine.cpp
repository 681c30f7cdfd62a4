#include <doctest.h>

#include <memory>
#include <random>

#include "fairdiv/engine.hpp"
#include "fairdiv/errors.hpp"
#include "fairdiv/oracles.hpp"
#include "support/fixtures.hpp"

using namespace fairdiv;
using namespace fairdiv::engine;
using namespace fairdiv::testing;

namespace {

EngineState example_state() {
    return make_state(std::make_shared<const Instance>(worked_instance()), worked_state());
}

std::vector<std::size_t> sizes(std::initializer_list<std::size_t> values) { return values; }

}  // namespace

TEST_CASE("initial prices for the first agent") {
    EngineState state = initial_state(std::make_shared<const Instance>(worked_instance()));
    const InitialPrices first = initial_prices_for_agent(state, 0);
    CHECK(first.goods == GoodSet{0, 1});
    CHECK(first.prices == std::vector<Rational>{Rational(1, 5), Rational(1, 6)});

    add_agent(state, first);
    CHECK(state.agent_count() == 1);
    CHECK(state.solution.prices[0] == Rational(1, 5));
    CHECK(state.solution.prices[2] == Rational(0));

    // Agent 2 values goods 2, 3, 4 (1-based 2..4) but good 1 (0-based) is taken.
    const InitialPrices second = initial_prices_for_agent(state, 1);
    CHECK(second.goods == GoodSet{2, 3});
    // min price 1/6, m = 5, max value 7.
    CHECK(second.prices == std::vector<Rational>{Rational(1, 30), Rational(1, 70)});
    Rational total;
    for (const Rational& p : second.prices) total += p;
    CHECK(total <= Rational(1, 6));

    CHECK_THROWS_AS(initial_prices_for_agent(state, 2), InvariantViolation);
}

TEST_CASE("initial prices when every positive good is taken") {
    auto inst = std::make_shared<const Instance>(make_instance({{1, 1}, {1, 0}}));
    EngineState state = initial_state(inst);
    add_agent(state, initial_prices_for_agent(state, 0));
    const InitialPrices second = initial_prices_for_agent(state, 1);
    CHECK(second.goods.empty());
    CHECK(second.prices.empty());
}

TEST_CASE("betas on the worked example") {
    const EngineState state = example_state();
    const auto graph = market::build_graph(*state.instance, state.solution);
    const auto reach = market::reach_from(graph, {2}, 3);
    const BetaRates rates = compute_betas(state, graph, reach);
    REQUIRE(rates.new_edge.has_value());
    REQUIRE(rates.new_violator.has_value());
    REQUIRE(rates.newest_catches.has_value());
    CHECK(*rates.new_edge == Rational(5, 3));
    CHECK(*rates.new_violator == Rational(5, 3));
    CHECK(*rates.newest_catches == Rational(5, 4));
    CHECK(rates.beta == Rational(5, 4));
    CHECK(rates.attained == std::vector<int>{3});
}

TEST_CASE("beta_1 is invariant under uniform price scaling") {
    EngineState state = example_state();
    for (Rational& p : state.solution.prices) p *= Rational(7, 3);
    const auto graph = market::build_graph(*state.instance, state.solution);
    const auto reach = market::reach_from(graph, {2}, 3);
    const BetaRates rates = compute_betas(state, graph, reach);
    CHECK(*rates.new_edge == Rational(5, 3));
    CHECK(rates.beta == Rational(5, 4));
}

TEST_CASE("only beta_3 finite") {
    // The newest agent values only its own good and holds a singleton, so
    // there is no outside MBB edge and no reachable positive p-hat.
    auto inst = std::make_shared<const Instance>(make_instance({{1, 1, 1, 0}, {0, 0, 0, 1}}));
    Solution sol;
    sol.allocation.bundles = {{0, 1, 2}, {3}};
    sol.prices = make_prices({1, 1, 1, 1});
    const EngineState state = make_state(inst, sol);
    const auto graph = market::build_graph(*inst, state.solution);
    const auto reach = market::reach_from(graph, {1}, 2);
    const BetaRates rates = compute_betas(state, graph, reach);
    CHECK_FALSE(rates.new_edge.has_value());
    CHECK_FALSE(rates.new_violator.has_value());
    REQUIRE(rates.newest_catches.has_value());
    CHECK(rates.beta == *rates.newest_catches);
    CHECK(rates.beta == Rational(2));
}

TEST_CASE("price rise on the worked example") {
    EngineState state = example_state();
    const auto graph = market::build_graph(*state.instance, state.solution);
    const auto reach = market::reach_from(graph, {2}, 3);
    const Rational hat = max_hat_price(state.solution);
    const StepOutcome outcome = apply_price_rise(state, reach, Rational(5, 4));
    CHECK(outcome.kind == StepKind::price_rise);
    CHECK(state.solution.prices ==
          PriceVector{Rational(6), Rational(5), Rational(35, 4), Rational(15, 4), Rational(5)});
    CHECK(state.solution.allocation == worked_state().allocation);
    CHECK(max_hat_price(state.solution) == hat);
    CHECK(is_pef1(state.solution));

    // No MBB edge from an unreached agent into the raised goods.
    const auto after = market::build_graph(*state.instance, state.solution);
    CHECK(market::bundles_within_mbb(after, state.solution.allocation));
    for (AgentId i = 0; i < 3; ++i) {
        if (reach.agent_reached[i]) continue;
        for (GoodId g : after.mbb[i]) CHECK_FALSE(reach.good_reached[g]);
    }

    market::Reachability empty = reach;
    std::fill(empty.good_reached.begin(), empty.good_reached.end(), 0);
    empty.r_goods.clear();
    const PriceVector before = state.solution.prices;
    apply_price_rise(state, empty, Rational(2));
    CHECK(state.solution.prices == before);
}

TEST_CASE("transfer along a one-hop path") {
    auto inst = std::make_shared<const Instance>(make_instance({{1, 1, 1}, {1, 1, 1}}));
    Solution sol;
    sol.allocation.bundles = {{0, 1, 2}, {}};
    sol.prices = make_prices({1, 1, 1});
    EngineState state = make_state(inst, sol);
    market::AlternatingPath path{{1, 0}, {0}};
    const StepOutcome outcome = transfer(state, path);
    CHECK(outcome.kind == StepKind::transfer);
    CHECK(outcome.a == 1);
    CHECK(outcome.b == 0);
    CHECK(state.solution.allocation.bundles == std::vector<GoodSet>{{1, 2}, {0}});
    CHECK(state.solution.prices == make_prices({1, 1, 1}));
}

TEST_CASE("transfer along a longer path shifts goods") {
    // Agent 2 (newest) -> good 0 (held by agent 1) -> good 1 (held by agent 0).
    // Agent 0 holds four goods so it is the only maximum violator.
    auto inst = std::make_shared<const Instance>(
        make_instance({{1, 1, 1, 1, 1}, {1, 1, 0, 0, 0}, {1, 0, 0, 0, 0}}));
    Solution sol;
    sol.allocation.bundles = {{1, 2, 3, 4}, {0}, {}};
    sol.prices = make_prices({1, 1, 1, 1, 1});
    EngineState state = make_state(inst, sol);
    market::AlternatingPath path{{2, 1, 0}, {0, 1}};
    const StepOutcome outcome = transfer(state, path);
    // p(x_1 \ {g_1}) = 0 < 3, so a = 2; b = 1 since 3 >= p({1}).
    CHECK(outcome.a == 2);
    CHECK(outcome.b == 1);
    CHECK(state.solution.allocation.bundles == std::vector<GoodSet>{{2, 3, 4}, {0, 1}, {}});
}

TEST_CASE("potential vector") {
    const EngineState state = example_state();
    const auto graph = market::build_graph(*state.instance, state.solution);
    const auto reach = market::reach_from(graph, {2}, 3);
    const PotentialVector phi = compute_potential(state, reach);
    CHECK(phi.flatten() == sizes({1, 2, 0, 2, 1}));

    auto inst = std::make_shared<const Instance>(make_instance({{1, 2, 3}}));
    Solution single;
    single.allocation.bundles = {{0, 1, 2}};
    single.prices = make_prices({1, 2, 3});
    const EngineState lone = make_state(inst, single);
    const auto lone_graph = market::build_graph(*inst, lone.solution);
    const PotentialVector all_zero = compute_potential(lone, market::reach_from(lone_graph, {0}, 1));
    CHECK(all_zero.flatten() == sizes({3, 0, 1}));

    PotentialVector lo{{1, 2, 0, 2}, 1};
    PotentialVector hi{{1, 2, 1, 1}, 0};
    CHECK(lo < hi);
}

TEST_CASE("iteration bound") {
    CHECK(iteration_bound(1, 7) == Rational(0));
    // (2 - 1) * ((5 + 2) / 2 * e)^2 with e = 2.7182818285.
    const Rational e(27182818285LL, 10000000000LL);
    CHECK(iteration_bound(2, 5) == Rational(7, 2) * e * Rational(7, 2) * e);
}

TEST_CASE("FindSolution reproduces the worked example trace") {
    EngineState state = example_state();
    const std::size_t iterations = find_solution(state);
    CHECK(iterations == 1);
    REQUIRE(state.trace.size() == 2);

    const TraceEvent& rise = state.trace[0];
    CHECK(rise.kind == StepKind::price_rise);
    REQUIRE(rise.rates.has_value());
    CHECK(*rise.rates->new_edge == Rational(5, 3));
    CHECK(*rise.rates->new_violator == Rational(5, 3));
    CHECK(*rise.rates->newest_catches == Rational(5, 4));
    CHECK(rise.rates->beta == Rational(5, 4));
    CHECK(rise.potential.flatten() == sizes({1, 2, 0, 2, 1}));
    CHECK(rise.min_spend == Rational(4));
    CHECK(rise.max_hat == Rational(5));

    CHECK(state.trace[1].kind == StepKind::terminated);
    CHECK(state.solution.prices ==
          PriceVector{Rational(6), Rational(5), Rational(35, 4), Rational(15, 4), Rational(5)});
    CHECK(is_pef1(state.solution));
}

TEST_CASE("FindSolution on a pEF1 state does nothing") {
    auto inst = std::make_shared<const Instance>(make_instance({{4, 1, 2}}));
    Solution single;
    single.allocation.bundles = {{0, 1, 2}};
    single.prices = make_prices({4, 1, 2});
    EngineState state = make_state(inst, single);
    CHECK(find_solution(state) == 0);
    CHECK(state.solution == single);
    REQUIRE(state.trace.size() == 1);
    CHECK(state.trace[0].kind == StepKind::terminated);
}

TEST_CASE("trace cap keeps the first events") {
    EngineState state = example_state();
    state.trace_cap = 1;
    find_solution(state);
    CHECK(state.trace.size() == 1);
    CHECK(state.dropped_events == 1);
    CHECK(state.events_emitted == 2);
}

TEST_CASE("make_state validates its input") {
    auto inst = std::make_shared<const Instance>(worked_instance());
    Solution bad = worked_state();
    bad.prices.pop_back();
    CHECK_THROWS_AS(make_state(inst, bad), InvalidInput);
    Solution overlap = worked_state();
    overlap.allocation.bundles[2] = {1};
    CHECK_THROWS_AS(make_state(inst, overlap), InvalidInput);
}

TEST_CASE("solve small cases") {
    SUBCASE("worked example instance") {
        const SolveResult result = solve(worked_instance());
        CHECK(is_partition(result.solution.allocation, 5));
        CHECK(is_pef1(result.solution));
        CHECK(oracles::check_mbb_consistency(worked_instance(), result.solution));
        CHECK(oracles::check_ef1(worked_instance(), result.solution.allocation));
        CHECK(oracles::brute_force_po(worked_instance(), result.solution.allocation) == std::optional<bool>(true));
        CHECK(result.iterations.size() == 3);
        CHECK(result.iterations[0] == 0);
    }
    SUBCASE("one agent takes everything") {
        const SolveResult result = solve(make_instance({{3, 0, 1}}));
        CHECK(result.solution.allocation.bundles == std::vector<GoodSet>{{0, 1, 2}});
    }
    SUBCASE("identical agents and goods") {
        const SolveResult result = solve(make_instance({{2, 2, 2}, {2, 2, 2}, {2, 2, 2}}));
        for (const auto& bundle : result.solution.allocation.bundles) CHECK(bundle.size() == 1);
    }
    SUBCASE("Hall violation") {
        CHECK_THROWS_AS(solve(make_instance({{1, 0}, {1, 0}})), HallViolation);
    }
    SUBCASE("zero rows and columns") {
        const Instance raw = make_instance({{0, 0, 0}, {1, 0, 2}, {2, 0, 1}});
        const SolveResult result = solve(raw);
        CHECK(result.solution.allocation.bundles[0].empty());
        CHECK(is_partition(result.solution.allocation, 3));
        CHECK(oracles::check_ef1(raw, result.solution.allocation));
        CHECK(result.solution.prices[1] == Rational(0));
    }
    SUBCASE("bad order") {
        EngineOptions options;
        options.order = {0, 0, 1};
        CHECK_THROWS_AS(solve(worked_instance(), options), InvalidInput);
    }
}

TEST_CASE("solve is deterministic and honours the insertion order") {
    const SolveResult first = solve(worked_instance());
    const SolveResult second = solve(worked_instance());
    CHECK(first.solution == second.solution);
    REQUIRE(first.trace.size() == second.trace.size());

    EngineOptions options;
    options.order = {2, 0, 1};
    const SolveResult reordered = solve(worked_instance(), options);
    CHECK(is_pef1(reordered.solution));
    CHECK(oracles::check_ef1(worked_instance(), reordered.solution.allocation));
    CHECK(oracles::check_mbb_consistency(worked_instance(), reordered.solution));
    REQUIRE_FALSE(reordered.trace.empty());
    CHECK(reordered.trace.front().newest_agent == 2);
}

TEST_CASE("random solves keep every invariant") {
    std::mt19937_64 rng(2024);
    std::size_t transfers = 0;
    std::size_t rises = 0;
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t n = 2 + trial % 3;
        const std::size_t m = n + trial % 4;
        Instance inst = random_instance(rng, n, m, 6);
        if (!check_hall(normalize_instance(inst).core)) continue;
        oracles::InvariantAuditor auditor;
        EngineOptions options;
        options.observer = &auditor;
        const SolveResult result = solve(inst, options);
        CHECK(auditor.clean());
        for (const auto& message : auditor.samples()) INFO(message);
        CHECK(oracles::check_ef1(inst, result.solution.allocation));
        for (const TraceEvent& event : result.trace) {
            transfers += event.kind == StepKind::transfer ? 1 : 0;
            rises += event.kind == StepKind::price_rise ? 1 : 0;
        }
    }
    CHECK(transfers > 0);
    CHECK(rises > 0);
}

TEST_CASE("golden run on the worked example instance") {
    const SolveResult result = solve(worked_instance());
    CHECK(result.solution.allocation.bundles == std::vector<GoodSet>{{0, 1}, {2, 3}, {4}});
    CHECK(result.solution.prices ==
          PriceVector{Rational(1, 5), Rational(1, 6), Rational(7, 24), Rational(1, 8), Rational(1, 6)});
    CHECK(result.iterations == std::vector<std::size_t>{0, 1, 2});
    REQUIRE(result.trace.size() == 6);
    CHECK(result.trace[1].rates->beta == Rational(7, 2));
    CHECK(result.trace[3].rates->beta == Rational(10));
    CHECK(result.trace[3].rates->attained == std::vector<int>{1});
    CHECK(result.trace[4].rates->beta == Rational(5, 2));
    // The last call ends at the worked example's prices scaled by 1/30.
    Solution scaled = result.solution;
    for (Rational& p : scaled.prices) p *= Rational(30);
    CHECK(scaled.prices ==
          PriceVector{Rational(6), Rational(5), Rational(35, 4), Rational(15, 4), Rational(5)});
}
