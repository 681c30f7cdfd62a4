#include <doctest.h>

#include <json.hpp>

#include "fairdiv/engine.hpp"
#include "fairdiv/errors.hpp"
#include "fairdiv/io.hpp"
#include "support/fixtures.hpp"

using namespace fairdiv;
using namespace fairdiv::testing;
using nlohmann::json;

TEST_CASE("instance round trip") {
    const std::string text = io::instance_to_json(worked_instance());
    CHECK(text == "{\"agents\":3,\"goods\":5,\"valuations\":[[6,5,0,0,0],[0,1,7,3,0],[2,3,6,3,4]]}\n");
    CHECK(io::parse_instance(text) == worked_instance());

    const Instance mixed = io::parse_instance(R"({"agents":1,"goods":2,"valuations":[["3/6", 2]]})");
    CHECK(mixed.value(0, 0) == Rational(1, 2));
    CHECK(io::instance_to_json(mixed) == "{\"agents\":1,\"goods\":2,\"valuations\":[[\"1/2\",2]]}\n");
}

TEST_CASE("instance parse errors") {
    CHECK_THROWS_AS(io::parse_instance("{"), InvalidInput);
    CHECK_THROWS_AS(io::parse_instance(R"({"agents":1,"goods":1})"), InvalidInput);
    CHECK_THROWS_AS(io::parse_instance(R"({"agents":1,"goods":2,"valuations":[[1]]})"), InvalidInput);
    CHECK_THROWS_AS(io::parse_instance(R"({"agents":2,"goods":1,"valuations":[[1]]})"), InvalidInput);
    CHECK_THROWS_AS(io::parse_instance(R"({"agents":1,"goods":1,"valuations":[[-1]]})"), InvalidInput);
    CHECK_THROWS_AS(io::parse_instance(R"({"agents":1,"goods":1,"valuations":[[1.5]]})"), InvalidInput);
    CHECK_THROWS_AS(io::parse_instance(R"({"agents":1,"goods":1,"valuations":[["1/0"]]})"), InvalidInput);
    CHECK_THROWS_AS(io::parse_instance(R"({"agents":-1,"goods":1,"valuations":[]})"), InvalidInput);
}

TEST_CASE("solution round trip") {
    Solution sol = worked_state();
    sol.prices[2] = Rational(35, 4);
    const std::string text = io::solution_to_json(sol);
    CHECK(text == "{\"bundles\":[[0,1],[2,3],[4]],\"prices\":[\"6/1\",\"5/1\",\"35/4\",\"3/1\",\"4/1\"]}\n");
    CHECK(io::parse_solution(text) == sol);

    const Solution loose = io::parse_solution(R"({"bundles":[[3,1],[]],"prices":[1,"2",3,4]})");
    CHECK(loose.allocation.bundles[0] == GoodSet{1, 3});
    CHECK(loose.prices[1] == Rational(2));

    CHECK_THROWS_AS(io::parse_solution(R"({"bundles":[[0]]})"), InvalidInput);
    CHECK_THROWS_AS(io::parse_solution(R"({"bundles":[[-1]],"prices":[1]})"), InvalidInput);
}

TEST_CASE("trace events serialize as one JSON object") {
    auto state = engine::make_state(std::make_shared<const Instance>(worked_instance()), worked_state());
    engine::find_solution(state);
    REQUIRE(state.trace.size() == 2);

    const std::string line = io::trace_event_to_json(state.trace[0]);
    CHECK(line.find('\n') == std::string::npos);
    const json rise = json::parse(line);
    CHECK(rise["step"] == 1);
    CHECK(rise["k"] == 3);
    CHECK(rise["agent"] == 2);
    CHECK(rise["kind"] == "price_rise");
    CHECK(rise["beta"]["b1"] == "5/3");
    CHECK(rise["beta"]["b2"] == "5/3");
    CHECK(rise["beta"]["b3"] == "5/4");
    CHECK(rise["beta"]["chosen"] == "5/4");
    CHECK(rise["beta"]["attained"] == json::array({"b3"}));
    CHECK(rise["path"].is_null());
    CHECK(rise["potential"] == json::array({1, 2, 0, 2, 1}));
    CHECK(rise["min_spend"] == "4/1");
    CHECK(rise["max_hat"] == "5/1");

    const json end = json::parse(io::trace_event_to_json(state.trace[1]));
    CHECK(end["kind"] == "terminated");
    CHECK(end["beta"].is_null());
}

TEST_CASE("graph dump") {
    const auto graph = market::build_graph(worked_instance(), worked_state());
    const auto reach = market::reach_from(graph, {2}, 3);
    const json doc = json::parse(io::graph_to_json(graph, &reach));
    CHECK(doc["agents"] == 3);
    CHECK(doc["alphas"] == json::array({"1/1", "1/1", "1/1"}));
    CHECK(doc["mbb_edges"].size() == 6);
    CHECK(doc["allocation_edges"].size() == 5);
    CHECK(doc["levels"] == json::array({3, 1, 0}));
    CHECK(doc["r_agents"] == json::array({1, 2}));

    const json bare = json::parse(io::graph_to_json(graph));
    CHECK_FALSE(bare.contains("levels"));
}

TEST_CASE("report dump marks skipped checks") {
    oracles::VerificationReport report;
    report.ef1 = report.pef1 = report.mbb_consistent = true;
    const json doc = json::parse(io::report_to_json(report));
    CHECK(doc["brute_po"] == "skipped");
    CHECK(doc["mnw_product"] == "skipped");
    CHECK(doc["passed"] == true);
}
