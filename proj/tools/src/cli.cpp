#include "fairdiv/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "fairdiv/engine.hpp"
#include "fairdiv/errors.hpp"
#include "fairdiv/io.hpp"
#include "fairdiv/market.hpp"
#include "fairdiv/oracles.hpp"

namespace fairdiv::cli {

namespace {

using nlohmann::json;

void report_error(std::ostream& err, const char* reason, const std::string& message) {
    json doc;
    doc["error"] = reason;
    doc["message"] = message;
    err << doc.dump() << '\n';
}

std::uint64_t effective_cap(const RunConfig& cfg) {
    return cfg.brute_cap ? *cfg.brute_cap : oracles::brute_cap_from_env();
}

struct BenchJob {
    std::size_t agents = 0;
    std::size_t goods = 0;
    std::uint64_t seed = 0;
};

struct BenchRow {
    BenchJob job;
    std::vector<std::size_t> iterations;
    double bound_ratio = 0.0;
    double wall_ms = 0.0;
    std::optional<double> nsw_ratio;
    std::optional<bool> nsw_ok;
    std::string error;
};

std::vector<std::size_t> size_list(const json& doc, const char* key) {
    if (!doc.contains(key)) throw InvalidInput(std::string("bench spec needs \"") + key + "\"");
    const json& node = doc.at(key);
    std::vector<std::size_t> out;
    if (node.is_number_unsigned()) {
        out.push_back(node.get<std::size_t>());
    } else if (node.is_array()) {
        for (const json& v : node) {
            if (!v.is_number_unsigned()) throw InvalidInput(std::string("\"") + key + "\" entries must be non-negative integers");
            out.push_back(v.get<std::size_t>());
        }
    } else {
        throw InvalidInput(std::string("\"") + key + "\" must be an integer or an array");
    }
    return out;
}

BenchRow run_bench_job(const BenchJob& job, std::int64_t max_value, std::uint64_t cap) {
    BenchRow row;
    row.job = job;
    try {
        const Instance inst = generate_instance(job.agents, job.goods, max_value, job.seed);
        engine::EngineOptions options;
        options.trace_cap = 0;
        const auto start = std::chrono::steady_clock::now();
        const engine::SolveResult result = engine::solve(inst, options);
        row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        row.iterations = result.iterations;
        for (std::size_t k = 0; k < result.iterations.size(); ++k) {
            const double bound = result.iteration_bounds[k].to_double();
            if (bound > 0.0) {
                row.bound_ratio = std::max(row.bound_ratio, static_cast<double>(result.iterations[k]) / bound);
            }
        }
        if (oracles::allocation_count(inst.agents(), inst.goods()) <= cap) {
            const auto mnw = oracles::brute_force_mnw(inst, cap);
            const Rational product = oracles::nsw_product(inst, result.solution.allocation);
            row.nsw_ok = oracles::nsw_ratio_holds(inst, result.solution.allocation, mnw->product);
            if (mnw->product.is_positive()) {
                row.nsw_ratio = std::pow((product / mnw->product).to_double(), 1.0 / static_cast<double>(inst.agents()));
            }
        }
    } catch (const Error& e) {
        row.error = e.what();
    }
    return row;
}

std::string rows_to_csv(const std::vector<BenchRow>& rows) {
    std::ostringstream os;
    os << "n,m,seed,iterations,total_iterations,bound_ratio,wall_ms,nsw_ratio,nsw_ok,error\n";
    for (const BenchRow& row : rows) {
        std::size_t total = 0;
        std::string per_k;
        for (std::size_t k = 0; k < row.iterations.size(); ++k) {
            total += row.iterations[k];
            per_k += (k ? ";" : "") + std::to_string(row.iterations[k]);
        }
        os << row.job.agents << ',' << row.job.goods << ',' << row.job.seed << ',' << per_k << ',' << total << ','
           << row.bound_ratio << ',' << row.wall_ms << ',';
        if (row.nsw_ratio) os << *row.nsw_ratio;
        os << ',';
        if (row.nsw_ok) os << (*row.nsw_ok ? "true" : "false");
        os << ',' << row.error << '\n';
    }
    return os.str();
}

std::string rows_to_json(const std::vector<BenchRow>& rows) {
    json out = json::array();
    for (const BenchRow& row : rows) {
        json doc;
        doc["n"] = row.job.agents;
        doc["m"] = row.job.goods;
        doc["seed"] = row.job.seed;
        doc["iterations"] = row.iterations;
        std::size_t total = 0;
        for (std::size_t it : row.iterations) total += it;
        doc["total_iterations"] = total;
        doc["bound_ratio"] = row.bound_ratio;
        doc["wall_ms"] = row.wall_ms;
        doc["nsw_ratio"] = row.nsw_ratio ? json(*row.nsw_ratio) : json(nullptr);
        doc["nsw_ok"] = row.nsw_ok ? json(*row.nsw_ok) : json("skipped");
        if (!row.error.empty()) doc["error"] = row.error;
        out.push_back(std::move(doc));
    }
    json report;
    report["rows"] = std::move(out);
    return report.dump(2) + "\n";
}

bool ends_with(const std::string& text, const std::string& suffix) {
    return text.size() >= suffix.size() && text.compare(text.size() - suffix.size(), suffix.size(), suffix) == 0;
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& body) {
    try {
        return body();
    } catch (const HallViolation& e) {
        report_error(err, "hall_violation", e.what());
        return exit_hall_violation;
    } catch (const InvariantViolation& e) {
        report_error(err, "invariant_violation", e.what());
        return exit_invariant_breach;
    } catch (const InvalidInput& e) {
        report_error(err, "invalid_input", e.what());
        return exit_invalid_input;
    }
}

}  // namespace

Instance generate_instance(std::size_t agents, std::size_t goods, std::int64_t max_value, std::uint64_t seed) {
    if (agents == 0) throw InvalidInput("gen needs at least one agent");
    if (agents > goods) throw InvalidInput("gen needs n <= m to plant a perfect matching");
    if (max_value < 1) throw InvalidInput("gen needs --max >= 1");

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int64_t> any(0, max_value);
    std::uniform_int_distribution<std::int64_t> positive(1, max_value);
    std::vector<std::int64_t> raw(agents * goods);
    for (auto& v : raw) v = any(rng);

    std::vector<GoodId> sigma(goods);
    for (GoodId g = 0; g < goods; ++g) sigma[g] = g;
    std::shuffle(sigma.begin(), sigma.end(), rng);
    for (AgentId i = 0; i < agents; ++i) {
        auto& v = raw[i * goods + sigma[i]];
        if (v == 0) v = positive(rng);
    }

    std::vector<Rational> values(raw.begin(), raw.end());
    return Instance(agents, goods, std::move(values));
}

std::vector<AgentId> parse_order(const std::string& text) {
    std::vector<AgentId> order;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos) {
            throw InvalidInput("--order expects comma-separated agent indices, got \"" + text + "\"");
        }
        order.push_back(std::stoull(item));
    }
    return order;
}

int cmd_solve(const RunConfig& cfg, std::ostream& err) {
    return guarded(err, [&] {
        const Instance inst = io::read_instance_file(cfg.input);
        engine::EngineOptions options;
        options.order = cfg.order;
        const engine::SolveResult result = engine::solve(inst, options);

        // Brute-force oracles are left to `verify`; the cap of zero skips them.
        const oracles::VerificationReport report = oracles::verify(inst, result.solution, 0);
        if (!report.all_passed()) {
            report_error(err, "invariant_violation", "solver output failed self-verification");
            return static_cast<int>(exit_invariant_breach);
        }

        io::write_text(cfg.output, io::solution_to_json(result.solution));
        if (!cfg.trace.empty()) {
            std::string lines;
            for (const auto& event : result.trace) lines += io::trace_event_to_json(event) + "\n";
            io::write_text(cfg.trace, lines);
            if (result.dropped_events > 0) {
                err << "trace truncated: " << result.dropped_events << " events dropped\n";
            }
        }
        if (!cfg.dump_graph.empty()) {
            const auto graph = market::build_graph(inst, result.solution);
            const auto reach = market::reach_from(graph, min_spenders(result.solution), inst.agents());
            io::write_text(cfg.dump_graph, io::graph_to_json(graph, &reach));
        }
        return static_cast<int>(exit_ok);
    });
}

int cmd_verify(const RunConfig& cfg, std::ostream& err) {
    return guarded(err, [&] {
        const Instance inst = io::read_instance_file(cfg.input);
        const Solution sol = io::read_solution_file(cfg.solution);
        const oracles::VerificationReport report = oracles::verify(inst, sol, effective_cap(cfg));
        io::write_text(cfg.output, io::report_to_json(report));
        return static_cast<int>(report.all_passed() ? exit_ok : exit_invalid_input);
    });
}

int cmd_gen(const RunConfig& cfg, std::ostream& err) {
    return guarded(err, [&] {
        const Instance inst = generate_instance(cfg.agents, cfg.goods, cfg.max_value, cfg.seed);
        io::write_text(cfg.output, io::instance_to_json(inst));
        return static_cast<int>(exit_ok);
    });
}

int cmd_bench(const RunConfig& cfg, std::ostream& err) {
    return guarded(err, [&] {
        json spec;
        try {
            spec = json::parse(io::read_text(cfg.spec));
        } catch (const json::parse_error& e) {
            throw InvalidInput(std::string("malformed bench spec: ") + e.what());
        }
        const auto agent_counts = size_list(spec, "agents");
        const auto good_counts = size_list(spec, "goods");
        const std::int64_t max_value = spec.value("max", std::int64_t{10});
        const std::uint64_t base_seed = spec.value("seed", std::uint64_t{1});
        const std::size_t repeats = spec.value("instances", std::size_t{1});
        const std::size_t threads = std::max<std::size_t>(1, spec.value("threads", std::size_t{1}));
        const std::uint64_t cap = cfg.brute_cap ? *cfg.brute_cap
                                                : spec.value("brute_cap", oracles::brute_cap_from_env());

        std::vector<BenchJob> jobs;
        for (std::size_t n : agent_counts) {
            for (std::size_t m : good_counts) {
                if (n == 0 || n > m) continue;
                for (std::size_t r = 0; r < repeats; ++r) jobs.push_back({n, m, base_seed + r});
            }
        }

        std::vector<BenchRow> rows(jobs.size());
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t idx = next++; idx < jobs.size(); idx = next++) {
                rows[idx] = run_bench_job(jobs[idx], max_value, cap);
            }
        };
        std::vector<std::thread> pool;
        for (std::size_t t = 1; t < std::min(threads, jobs.size()); ++t) pool.emplace_back(worker);
        worker();
        for (auto& th : pool) th.join();

        bool failed = false;
        for (const BenchRow& row : rows) {
            if (!row.error.empty()) {
                err << "n=" << row.job.agents << " m=" << row.job.goods << " seed=" << row.job.seed << ": " << row.error
                    << '\n';
                failed = true;
            }
        }
        io::write_text(cfg.output, ends_with(cfg.output, ".csv") ? rows_to_csv(rows) : rows_to_json(rows));
        return static_cast<int>(failed ? exit_invariant_breach : exit_ok);
    });
}

int run(int argc, const char* const* argv, std::ostream& err) {
    CLI::App app{"Exact EF1 + fPO allocation of indivisible goods"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::string order_text;
    std::uint64_t cap = 0;

    auto* solve = app.add_subcommand("solve", "Compute an EF1 + fPO allocation with its price witness");
    solve->add_option("instance", cfg.input, "Instance JSON file")->required();
    solve->add_option("-o,--output", cfg.output, "Solution JSON file (default stdout)");
    solve->add_option("--trace", cfg.trace, "Write the event trace as JSON lines");
    solve->add_option("--order", order_text, "Agent insertion order, e.g. 2,0,1");
    solve->add_option("--dump-graph", cfg.dump_graph, "Write the final MBB graph as JSON");

    auto* verify = app.add_subcommand("verify", "Check a solution against every oracle");
    verify->add_option("instance", cfg.input, "Instance JSON file")->required();
    verify->add_option("solution", cfg.solution, "Solution JSON file")->required();
    auto* cap_opt = verify->add_option("--brute-cap", cap, "Largest n^m enumerated by brute force");
    verify->add_option("-o,--output", cfg.output, "Report JSON file (default stdout)");

    auto* gen = app.add_subcommand("gen", "Generate an instance with a planted perfect matching");
    gen->add_option("-n", cfg.agents, "Agents")->required();
    gen->add_option("-m", cfg.goods, "Goods")->required();
    gen->add_option("--max", cfg.max_value, "Largest valuation");
    gen->add_option("--seed", cfg.seed, "Random seed");
    gen->add_option("-o,--output", cfg.output, "Instance JSON file (default stdout)");

    auto* bench = app.add_subcommand("bench", "Iteration counts, bound ratios and NSW ratios over a sweep");
    bench->add_option("--spec", cfg.spec, "Sweep description JSON")->required();
    auto* bench_cap = bench->add_option("--brute-cap", cap, "Largest n^m enumerated for NSW ratios");
    bench->add_option("-o,--output", cfg.output, "Report file, CSV when it ends in .csv (default stdout JSON)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        report_error(err, "invalid_input", e.what());
        return exit_invalid_input;
    }
    if (cap_opt->count() > 0 || bench_cap->count() > 0) cfg.brute_cap = cap;

    if (*solve) {
        cfg.command = "solve";
        try {
            if (!order_text.empty()) cfg.order = parse_order(order_text);
        } catch (const InvalidInput& e) {
            report_error(err, "invalid_input", e.what());
            return exit_invalid_input;
        }
        return cmd_solve(cfg, err);
    }
    if (*verify) return cmd_verify(cfg, err);
    if (*gen) return cmd_gen(cfg, err);
    return cmd_bench(cfg, err);
}

}  // namespace fairdiv::cli
