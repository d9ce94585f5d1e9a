// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exit code 0 only when all pass.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "txsc/analysis.hpp"
#include "txsc/corpus.hpp"
#include "txsc/digest.hpp"
#include "txsc/interp.hpp"
#include "txsc/parse.hpp"
#include "txsc/print.hpp"
#include "txsc/recipes.hpp"
#include "txsc/rng.hpp"
#include "txsc/serial.hpp"
#include "txsc/sim.hpp"
#include "txsc/transform.hpp"

using namespace txsc;
using Clock = std::chrono::steady_clock;

namespace {

struct Criterion {
    int number;
    std::string title;
    std::function<void(std::ostream&)> body;  // throws on failure
};

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw Failure(what);
}

void require_recipe(const std::string& name) {
    RecipeResult r = run_recipe(name);
    if (r.exit_code != 0) {
        std::string detail;
        for (const auto& item : r.report["assertions"])
            if (!item["passed"].get<bool>()) detail += " [" + item["name"].get<std::string>() + "]";
        throw Failure("recipe " + name + " failed:" + detail);
    }
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// ---- criterion 6: random (state, budget) pairs ------------------------------

Value fuzz_value(RandomStream& rng, PrimType t) {
    switch (t) {
        case PrimType::Address: {
            static const char* ids[] = {"alice", "bob", "carol", "oracle:WolframAlpha", ""};
            return Value(Address{ids[rng.next_in(0, 4)]});
        }
        case PrimType::Bool: return Value(rng.next_in(0, 1) == 1);
        case PrimType::Uint: return Value(rng.next_in(0, 64));
        case PrimType::Bytes32: {
            Bytes32 b;
            for (auto& byte : b.bytes) byte = static_cast<std::uint8_t>(rng.next_in(0, 255));
            return Value(b);
        }
        case PrimType::String: return Value("s" + std::to_string(rng.next_in(0, 7)));
    }
    return Value(std::uint64_t{0});
}

void out_of_gas_atomicity(std::ostream& log) {
    require_recipe("out-of-gas-atomicity");

    std::vector<ContractAst> contracts;
    for (const char* file : {"contracts/puzzle.txsc", "contracts/blockking.txsc"}) {
        ContractAst ast = parse_contract(corpus_file(file));
        TransformConfig config =
            TransformConfig::from_toml(corpus_file("config/standard.toml")).restricted_to(ast);
        auto [rewritten, report] = transform(ast, analyze(ast), config);
        contracts.push_back(std::move(ast));
        contracts.push_back(std::move(rewritten));
    }
    static const PrimType kTypes[] = {PrimType::Address, PrimType::Bool, PrimType::Uint,
                                      PrimType::Bytes32, PrimType::String};
    long executions = 0, aborts = 0;
    for (const auto& ast : contracts) {
        for (const auto& fn : ast.functions) {
            Bytes32 seed_digest = sha256("c6|" + ast.name + "/" + fn.name);
            std::uint64_t fn_seed = 0;
            for (int b = 0; b < 8; ++b) fn_seed = (fn_seed << 8) | seed_digest.bytes[b];
            RandomStream rng(fn_seed);
            for (int i = 0; i < 1000; ++i) {
                ObjectState st = default_state(ast);
                for (const auto& a : ast.attributes) st.attrs[a.name] = fuzz_value(rng, a.type);
                st.balance = rng.next_in(0, 80);
                CallContext ctx;
                ctx.sender = Address{rng.next_in(0, 1) ? "alice" : "bob"};
                ctx.value = rng.next_in(0, 10);
                ctx.block_number = rng.next_in(1, 9);
                ctx.gas_budget = rng.next_in(0, 16);
                for (const char* key :
                     {"solved", "reward", "payload", "result", "diff", "lock_id"})
                    if (rng.next_in(0, 3) != 0)
                        ctx.data[key] = fuzz_value(rng, kTypes[rng.next_in(0, 4)]);
                StubEnv env;
                env.lock_held_answer = rng.next_in(0, 1) == 1;
                if (rng.next_in(0, 1)) env.escrow = rng.next_in(0, 30);
                ExecResult res = execute(ast, fn.name, st, ctx, env);
                ++executions;
                require(res.gas_used <= ctx.gas_budget, "gas_used exceeded the budget");
                if (res.outcome != Outcome::Committed) {
                    ++aborts;
                    require(res.new_state == st,
                            "abort left a dirty state in " + ast.name + "." + fn.name);
                    require(res.transfers.empty() && res.external_requests.empty() &&
                                res.escrow_ops.empty() && res.lock_ops.empty(),
                            "abort staged effects in " + ast.name + "." + fn.name);
                }
            }
        }
    }
    log << executions << " executions, " << aborts << " rolled-back aborts";
}

// ---- criterion 8/10: random schedule sweep -----------------------------------

ScenarioConfig sweep_scenario(std::uint64_t seed) {
    RandomStream rng(seed);
    ScenarioConfig config;
    config.seed = seed;
    config.block_interval_ticks = 5;
    config.max_ticks = 500;
    config.chains.push_back(ChainSpec{"main", static_cast<int>(rng.next_in(1, 3)), false});
    config.chains.push_back(ChainSpec{"lockchain", 1, true});

    TransformConfig tc = TransformConfig::from_toml(corpus_file("config/standard.toml"));
    config.transform = tc;

    bool with_blockking = rng.next_in(0, 2) != 0;
    DeploySpec puzzle;
    puzzle.file = "puzzle.txsc";
    puzzle.chain = "main";
    puzzle.deployer = "alice";
    puzzle.value = 2;
    puzzle.gas = 20;
    puzzle.data["diff"] =
        Json("0xffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffff");
    config.contracts.push_back(puzzle);
    if (with_blockking) {
        DeploySpec bk;
        bk.file = "blockking.txsc";
        bk.chain = "main";
        bk.deployer = "alice";
        bk.value = 60;
        bk.gas = 20;
        config.contracts.push_back(bk);
    }

    OracleSpec oracle;
    oracle.service = "WolframAlpha";
    oracle.delay_min = 5;
    oracle.delay_max = 12;
    oracle.drop_probability = (seed % 7 == 0) ? 1.0 : 0.0;
    oracle.callback_gas = 40;
    config.oracle = oracle;

    static const char* kClients[] = {"alice", "bob", "carol"};
    std::uint64_t client_count = rng.next_in(1, 3);
    std::uint64_t total_spans = 0;
    for (std::uint64_t c = 0; c < client_count; ++c) {
        ClientSpec client;
        client.id = kClients[c];
        client.funds = 2000;
        std::uint64_t spans = rng.next_in(1, 2);
        for (std::uint64_t s = 0; s < spans && total_spans < 6; ++s, ++total_spans) {
            bool blockking_span = with_blockking && rng.next_in(0, 2) == 0;
            if (blockking_span) {
                ClientStep acquire;
                acquire.tick = static_cast<int>(rng.next_in(1, 40));
                AcquireStep a;
                a.for_chain = "main";
                a.for_contract = "BlockKing";
                a.for_fn = "enter";
                a.retry_every = 3;
                a.max_attempts = 60;
                acquire.action = a;
                client.steps.push_back(std::move(acquire));

                ClientStep call;
                call.tick = acquire.tick + 1;
                CallStep cs;
                cs.chain = "main";
                cs.contract = "BlockKing";
                cs.fn = "enter";
                cs.gas = 30;
                cs.value = rng.next_in(1, 5);
                cs.data["lock_id"] = Json("$lock");
                call.action = cs;
                client.steps.push_back(std::move(call));
            } else {
                int t = static_cast<int>(rng.next_in(11, 60));
                ClientStep observe;
                observe.tick = t;
                ObserveStep o;
                o.chain = "main";
                o.contract = "Puzzle";
                o.attrs = {"solved", "reward"};
                observe.action = o;
                client.steps.push_back(std::move(observe));

                ClientStep call;
                call.tick = t + static_cast<int>(rng.next_in(1, 6));
                CallStep cs;
                cs.chain = "main";
                cs.contract = "Puzzle";
                cs.fn = rng.next_in(0, 1) ? "UpdateReward" : "SubmitSolution";
                cs.gas = rng.next_in(4, 20);  // some runs starve mid-body
                cs.value = rng.next_in(0, 3);
                cs.data["solved"] = Json("$observed.solved");
                cs.data["reward"] = Json("$observed.reward");
                std::ostringstream payload;
                payload << "0x";
                for (int i = 0; i < 64; ++i) payload << "0123456789abcdef"[rng.next_in(0, 15)];
                cs.data["payload"] = Json(payload.str());
                call.action = cs;
                client.steps.push_back(std::move(call));
            }
        }
        config.clients.push_back(std::move(client));
    }
    return config;
}

int g_sweep_runs = 0;
std::vector<History> g_sweep_histories;

void serializability_sweep(std::ostream& log) {
    g_sweep_runs = 0;
    g_sweep_histories.clear();
    auto start = Clock::now();
    int committed_spans = 0;
    for (std::uint64_t k = 0; k < 200; ++k) {
        ScenarioConfig config = sweep_scenario(1000 + k);
        SimResult sim =
            run(config, [](const std::string& f) { return corpus_file("contracts/" + f); });
        Verdict verdict = check(sim.history, 8, false);
        require(verdict.serializable,
                "seed " + std::to_string(1000 + k) + " produced a non-serializable history: " +
                    verdict.notes);
        require(lock_safety_holds(sim.history),
                "seed " + std::to_string(1000 + k) + " violated lock safety");
        for (const auto& span : sim.history.spans)
            if (span.any_committed()) ++committed_spans;
        ++g_sweep_runs;
        g_sweep_histories.push_back(sim.history);
    }
    double elapsed = seconds_since(start);
    require(elapsed < 60.0, "sweep took " + std::to_string(elapsed) + "s (budget 60s)");
    log << g_sweep_runs << " schedules, " << committed_spans << " committed spans, "
        << elapsed << "s";
}

void static_dynamic_soundness(std::ostream& log) {
    require(!g_sweep_histories.empty(), "sweep must run before the soundness check");
    long checked = 0;
    for (const auto& history : g_sweep_histories) {
        std::map<std::string, ContractAst> code;
        std::map<std::string, ProfileMap> profiles;
        for (const auto& c : history.contracts) {
            ContractAst ast = parse_contract(c.source);
            profiles.emplace(c.chain + "|" + c.name, analyze(ast));
            code.emplace(c.chain + "|" + c.name, std::move(ast));
        }
        for (const auto& span : history.spans) {
            for (const auto& event : span.events) {
                if (event.outcome != Outcome::Committed) continue;
                const ProfileMap& pm = profiles.at(event.chain + "|" + event.contract);
                const FunctionProfile& profile = pm.at(event.fn);
                for (const auto& op : pre_write_reads(event.trace)) {
                    require(profile.read_set.contains(op.attr),
                            event.fn + " read " + op.attr + " outside its static read set");
                    ++checked;
                }
                for (const auto& op : event.trace) {
                    if (!op.is_write) continue;
                    require(profile.write_set.contains(op.attr),
                            event.fn + " wrote " + op.attr + " outside its static write set");
                    ++checked;
                }
            }
        }
    }
    log << checked << " trace operations checked against static sets";
}

}  // namespace

int main() {
    std::vector<Criterion> criteria;

    criteria.push_back({1, "puzzle anomaly reproduction", [](std::ostream& log) {
                            auto start = Clock::now();
                            require_recipe("puzzle-anomaly");
                            double s = seconds_since(start);
                            require(s < 1.0, "took " + std::to_string(s) + "s (budget 1s)");
                            log << s << "s";
                        }});
    criteria.push_back({2, "puzzle fix yields an abort and a serializable history",
                        [](std::ostream& log) {
                            auto start = Clock::now();
                            require_recipe("puzzle-fixed");
                            double s = seconds_since(start);
                            require(s < 1.0, "took " + std::to_string(s) + "s (budget 1s)");
                            log << s << "s";
                        }});
    criteria.push_back({3, "SDTF check injection matches the golden file", [](std::ostream& log) {
                            ContractAst ast = parse_contract(corpus_file("contracts/puzzle.txsc"));
                            auto [out, report] = transform(
                                ast, analyze(ast),
                                TransformConfig::from_toml(corpus_file("config/standard.toml")));
                            std::string printed = print_contract(out);
                            require(printed == corpus_file("golden/puzzle_transformed.txsc"),
                                    "transformed source differs from the golden file");
                            const FunctionDecl* update = out.find_function("UpdateReward");
                            require(update && update->body.size() >= 2, "prologue missing");
                            require(print_stmt(update->body[0]) ==
                                        "requires(solved == msg.data.solved);",
                                    "first injected check wrong");
                            require(print_stmt(update->body[1]) ==
                                        "requires(reward == msg.data.reward);",
                                    "second injected check wrong");
                            log << "byte-identical, both checks present";
                        }});
    criteria.push_back({4, "blockking anomaly reproduction", [](std::ostream& log) {
                            require_recipe("blockking-anomaly");
                            log << "all three callbacks judged the last bidder";
                        }});
    criteria.push_back({5, "blockking fix serializes the bids", [](std::ostream& log) {
                            require_recipe("blockking-fixed");
                            log << "locks serialized the entries";
                        }});
    criteria.push_back({6, "atomicity under out-of-gas", out_of_gas_atomicity});
    criteria.push_back({7, "lost-callback consistency and owner recovery", [](std::ostream& log) {
                            require_recipe("lost-callback");
                            log << "shadows staged, escrow forfeited, lock safety held";
                        }});
    criteria.push_back({8, "serializability sweep over random schedules", serializability_sweep});
    criteria.push_back({9, "recipes are deterministic", [](std::ostream& log) {
                            for (const auto& name : recipe_names()) {
                                RecipeResult a = run_recipe(name);
                                RecipeResult b = run_recipe(name);
                                require(a.report.dump() == b.report.dump(),
                                        name + " reports differ between runs");
                                require(a.histories.size() == b.histories.size(),
                                        name + " history counts differ");
                                for (std::size_t i = 0; i < a.histories.size(); ++i)
                                    require(a.histories[i].second == b.histories[i].second,
                                            name + " history bytes differ");
                            }
                            log << recipe_names().size() << " recipes, byte-identical reruns";
                        }});
    criteria.push_back({10, "dynamic traces stay inside the static sets",
                        static_dynamic_soundness});

    int failures = 0;
    for (const auto& c : criteria) {
        std::ostringstream log;
        bool ok = true;
        std::string why;
        auto start = Clock::now();
        try {
            c.body(log);
        } catch (const std::exception& e) {
            ok = false;
            why = e.what();
        }
        double elapsed = seconds_since(start);
        if (ok) {
            std::printf("PASS  %2d. %s", c.number, c.title.c_str());
            if (!log.str().empty()) std::printf("  [%s]", log.str().c_str());
            std::printf("  (%.2fs)\n", elapsed);
        } else {
            ++failures;
            std::printf("FAIL  %2d. %s  -- %s  (%.2fs)\n", c.number, c.title.c_str(), why.c_str(),
                        elapsed);
        }
        std::fflush(stdout);
    }
    if (failures) std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    else std::printf("all %zu criteria passed\n", criteria.size());
    return failures == 0 ? 0 : 1;
}
