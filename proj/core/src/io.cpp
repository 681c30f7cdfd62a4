#include "fairdiv/io.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "fairdiv/errors.hpp"

namespace fairdiv::io {

namespace {

using nlohmann::json;

json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& err) {
        throw InvalidInput(std::string("malformed JSON: ") + err.what());
    }
}

Rational rational_from(const json& node, const std::string& where) {
    if (node.is_number_integer()) {
        return Rational(node.get<std::int64_t>());
    }
    if (node.is_string()) {
        try {
            return Rational::parse(node.get<std::string>());
        } catch (const InvalidInput& err) {
            throw InvalidInput(where + ": " + err.what());
        }
    }
    throw InvalidInput(where + ": expected an integer or a \"p/q\" string");
}

std::size_t index_from(const json& node, const std::string& where) {
    if (!node.is_number_unsigned()) throw InvalidInput(where + ": expected a non-negative integer");
    return node.get<std::size_t>();
}

const json& field(const json& object, const char* key) {
    if (!object.is_object() || !object.contains(key)) {
        throw InvalidInput(std::string("missing field \"") + key + "\"");
    }
    return object.at(key);
}

json rational_json(const std::optional<Rational>& value) {
    return value ? json(value->str()) : json(nullptr);
}

}  // namespace

Instance parse_instance(std::string_view text) {
    const json doc = parse_json(text);
    const std::size_t n = index_from(field(doc, "agents"), "agents");
    const std::size_t m = index_from(field(doc, "goods"), "goods");
    const json& rows = field(doc, "valuations");
    if (!rows.is_array() || rows.size() != n) {
        throw InvalidInput("valuations must hold one row per agent (" + std::to_string(n) + ")");
    }
    std::vector<Rational> values;
    values.reserve(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        const json& row = rows[i];
        if (!row.is_array() || row.size() != m) {
            throw InvalidInput("valuation row " + std::to_string(i) + " must hold " + std::to_string(m) + " entries");
        }
        for (std::size_t g = 0; g < m; ++g) {
            values.push_back(rational_from(row[g], "valuations[" + std::to_string(i) + "][" + std::to_string(g) + "]"));
        }
    }
    return Instance(n, m, std::move(values));
}

std::string instance_to_json(const Instance& instance) {
    json rows = json::array();
    for (AgentId i = 0; i < instance.agents(); ++i) {
        json row = json::array();
        for (const Rational& v : instance.row(i)) {
            if (v.denominator() == 1 && v.numerator().fits_slong_p()) {
                row.push_back(v.numerator().get_si());
            } else {
                row.push_back(v.str());
            }
        }
        rows.push_back(std::move(row));
    }
    json doc;
    doc["agents"] = instance.agents();
    doc["goods"] = instance.goods();
    doc["valuations"] = std::move(rows);
    return doc.dump() + "\n";
}

Solution parse_solution(std::string_view text) {
    const json doc = parse_json(text);
    const json& bundles = field(doc, "bundles");
    const json& prices = field(doc, "prices");
    if (!bundles.is_array() || !prices.is_array()) throw InvalidInput("bundles and prices must be arrays");

    Solution sol;
    for (std::size_t i = 0; i < bundles.size(); ++i) {
        if (!bundles[i].is_array()) throw InvalidInput("bundle " + std::to_string(i) + " must be an array");
        GoodSet bundle;
        for (const json& g : bundles[i]) bundle.push_back(index_from(g, "bundles[" + std::to_string(i) + "]"));
        std::sort(bundle.begin(), bundle.end());
        sol.allocation.bundles.push_back(std::move(bundle));
    }
    for (std::size_t g = 0; g < prices.size(); ++g) {
        sol.prices.push_back(rational_from(prices[g], "prices[" + std::to_string(g) + "]"));
    }
    return sol;
}

std::string solution_to_json(const Solution& solution) {
    json doc;
    doc["bundles"] = json::array();
    for (const auto& bundle : solution.allocation.bundles) doc["bundles"].push_back(bundle);
    doc["prices"] = json::array();
    for (const Rational& p : solution.prices) doc["prices"].push_back(p.str());
    return doc.dump() + "\n";
}

std::string trace_event_to_json(const engine::TraceEvent& event) {
    json doc;
    doc["step"] = event.step;
    doc["k"] = event.agent_count;
    doc["agent"] = event.newest_agent;
    doc["kind"] = engine::to_string(event.kind);
    if (event.rates) {
        json beta;
        beta["b1"] = rational_json(event.rates->new_edge);
        beta["b2"] = rational_json(event.rates->new_violator);
        beta["b3"] = rational_json(event.rates->newest_catches);
        beta["chosen"] = event.rates->beta.str();
        json attained = json::array();
        for (int which : event.rates->attained) attained.push_back("b" + std::to_string(which));
        beta["attained"] = std::move(attained);
        doc["beta"] = std::move(beta);
    } else {
        doc["beta"] = nullptr;
    }
    if (event.path) {
        json path = json::array();
        path.push_back(event.path->agents.front());
        for (std::size_t r = 0; r < event.path->goods.size(); ++r) {
            path.push_back(event.path->goods[r]);
            path.push_back(event.path->agents[r + 1]);
        }
        doc["path"] = std::move(path);
        doc["a"] = event.a;
        doc["b"] = event.b;
    } else {
        doc["path"] = nullptr;
        doc["a"] = nullptr;
        doc["b"] = nullptr;
    }
    doc["potential"] = event.potential.flatten();
    doc["min_spend"] = event.min_spend.str();
    doc["max_hat"] = event.max_hat.str();
    return doc.dump();
}

std::string graph_to_json(const market::MbbGraph& graph, const market::Reachability* reach) {
    json doc;
    doc["agents"] = graph.agents;
    doc["goods"] = graph.goods;
    json alphas = json::array();
    for (const Rational& a : graph.alphas) alphas.push_back(a.str());
    doc["alphas"] = std::move(alphas);
    json mbb_edges = json::array();
    for (AgentId i = 0; i < graph.agents; ++i) {
        for (GoodId g : graph.mbb[i]) mbb_edges.push_back({i, g});
    }
    doc["mbb_edges"] = std::move(mbb_edges);
    json allocation_edges = json::array();
    for (GoodId g = 0; g < graph.goods; ++g) {
        if (graph.owner[g] != no_owner) allocation_edges.push_back({g, graph.owner[g]});
    }
    doc["allocation_edges"] = std::move(allocation_edges);
    if (reach != nullptr) {
        doc["levels"] = reach->level;
        doc["r_agents"] = reach->r_agents;
        doc["r_goods"] = reach->r_goods;
    }
    return doc.dump() + "\n";
}

std::string report_to_json(const oracles::VerificationReport& report) {
    auto tristate = [](const std::optional<bool>& value) { return value ? json(*value) : json("skipped"); };
    json doc;
    doc["ef1"] = report.ef1;
    doc["pef1"] = report.pef1;
    doc["mbb_consistent"] = report.mbb_consistent;
    doc["brute_po"] = tristate(report.brute_po);
    doc["nsw_product"] = report.nsw_product.str();
    doc["mnw_product"] = report.mnw_product ? json(report.mnw_product->str()) : json("skipped");
    doc["ratio_ok"] = tristate(report.ratio_ok);
    doc["witness_implies_ef1"] = report.witness_implies_ef1;
    doc["passed"] = report.all_passed();
    return doc.dump(2) + "\n";
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write " + path);
    out << text;
}

Instance read_instance_file(const std::string& path) {
    return parse_instance(read_text(path));
}

Solution read_solution_file(const std::string& path) {
    return parse_solution(read_text(path));
}

}  // namespace fairdiv::io
