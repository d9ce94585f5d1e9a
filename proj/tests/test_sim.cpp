#include "doctest.h"
#include "txsc/corpus.hpp"
#include "txsc/history.hpp"
#include "txsc/recipes.hpp"
#include "txsc/sim.hpp"

using namespace txsc;

namespace {

SimResult run_corpus(const std::string& scenario) {
    ScenarioConfig config = ScenarioConfig::from_toml(corpus_file("scenarios/" + scenario));
    return run(config, [](const std::string& f) { return corpus_file("contracts/" + f); });
}

}  // namespace

TEST_CASE("lock registry grants and denies by item overlap") {
    std::map<std::string, LockRecordState> locks;
    int counter = 0;
    std::vector<std::string> items = {"main/BlockKing/warrior", "main/BlockKing/warriorBlock",
                                      "main/BlockKing/warriorGold", "main/BlockKing/king",
                                      "main/BlockKing/kingBlock", "main/BlockKing/randomNumber"};
    LockGrant first = try_acquire(locks, counter, "alice", items, 1);
    CHECK(first.granted);
    CHECK(first.lock_id == "L1");

    LockGrant second = try_acquire(locks, counter, "bob", {"main/BlockKing/warrior"}, 2);
    CHECK_FALSE(second.granted);

    // disjoint items coexist
    LockGrant other = try_acquire(locks, counter, "bob", {"main/Puzzle/reward"}, 2);
    CHECK(other.granted);

    CHECK(do_release(locks, "L1", false, 3) == ReleaseResult::Ok);
    CHECK(locks.at("L1").status == LockStatus::Released);
    LockGrant third = try_acquire(locks, counter, "bob", {"main/BlockKing/warrior"}, 4);
    CHECK(third.granted);
    CHECK(third.lock_id != first.lock_id);

    CHECK(do_release(locks, "L9", false, 5) == ReleaseResult::UnknownLock);
    CHECK(do_release(locks, "L1", false, 5) == ReleaseResult::AlreadyReleased);
}

TEST_CASE("forfeited locks record their status") {
    std::map<std::string, LockRecordState> locks;
    int counter = 0;
    try_acquire(locks, counter, "bob", {"main/C/x"}, 1);
    CHECK(do_release(locks, "L1", true, 2) == ReleaseResult::Ok);
    CHECK(locks.at("L1").status == LockStatus::Forfeited);
}

TEST_CASE("the puzzle anomaly schedule reproduces the stale payout") {
    SimResult sim = run_corpus("puzzle_anomaly.toml");
    const History& h = sim.history;
    REQUIRE(h.spans.size() == 2);
    CHECK(h.spans[0].span_id == "alice-1");
    CHECK(h.spans[1].span_id == "bob-1");

    // bob observed the pre-update values
    REQUIRE(h.spans[1].observed_reads.size() == 2);
    CHECK(h.spans[1].observed_reads[1].attr == "reward");
    CHECK(h.spans[1].observed_reads[1].value.as_uint() == 2);

    // both calls committed in the same block, owner update first
    REQUIRE(h.spans[0].events.size() == 1);
    REQUIRE(h.spans[1].events.size() == 1);
    CHECK(h.spans[0].events[0].block == h.spans[1].events[0].block);
    CHECK(h.spans[0].events[0].order < h.spans[1].events[0].order);

    // the solver is paid exactly zero and the puzzle is marked solved
    CHECK(h.spans[1].events[0].transfers ==
          std::vector<std::pair<Address, std::uint64_t>>{{Address{"bob"}, 0}});
    const ObjectState* puzzle = sim.find_object("main", "Puzzle");
    REQUIRE(puzzle);
    CHECK(puzzle->attrs.at("solved").as_bool());
    CHECK(puzzle->attrs.at("reward").as_uint() == 0);
}

TEST_CASE("equal seeds give byte-identical histories") {
    for (const char* scenario :
         {"puzzle_anomaly.toml", "puzzle_fixed.toml", "blockking_fixed.toml"}) {
        CAPTURE(scenario);
        std::string a = export_history(run_corpus(scenario).history);
        std::string b = export_history(run_corpus(scenario).history);
        CHECK(a == b);
    }
}

TEST_CASE("a different seed reorders same-tick arrivals deterministically") {
    ScenarioConfig config =
        ScenarioConfig::from_toml(corpus_file("scenarios/puzzle_anomaly.toml"));
    config.seed = 1234;
    SimResult sim = run(config, [](const std::string& f) { return corpus_file("contracts/" + f); });
    // different seed, same arrival ticks: ordering still alice before bob
    CHECK(sim.history.spans[0].events[0].order < sim.history.spans[1].events[0].order);
}

TEST_CASE("gas is conserved between clients and miners") {
    for (const char* scenario : {"puzzle_anomaly.toml", "blockking_fixed.toml",
                                 "out_of_gas.toml", "lost_callback_recover.toml"}) {
        CAPTURE(scenario);
        SimResult sim = run_corpus(scenario);
        CHECK(sim.total_gas_spent == sim.total_gas_paid);
        std::uint64_t payments = 0;
        std::int64_t miner_balances = 0;
        for (const auto& chain : sim.chains) {
            for (const auto& block : chain.blocks)
                for (const auto& e : block.entries) payments += e.gas_payment;
            for (const auto& [account, balance] : chain.accounts)
                if (account.starts_with("miner:")) miner_balances += balance;
        }
        CHECK(payments == sim.total_gas_paid);
        CHECK(miner_balances == static_cast<std::int64_t>(payments));
    }
}

TEST_CASE("aborted calls still pay the miner and leave no delta") {
    SimResult sim = run_corpus("out_of_gas.toml");
    const History& h = sim.history;
    REQUIRE(h.spans.size() == 2);
    const SpanEvent& oog = h.spans[0].events.at(0);
    CHECK(oog.outcome == Outcome::AbortedOutOfGas);
    CHECK(oog.gas_used == 2);
    bool found_entry = false;
    for (const auto& block : sim.find_chain("main")->blocks)
        for (const auto& e : block.entries)
            if (e.span_id == "bob-1") {
                found_entry = true;
                CHECK(e.gas_payment == 2);
            }
    CHECK(found_entry);
}

TEST_CASE("callbacks join the originating span") {
    SimResult sim = run_corpus("blockking_anomaly.toml");
    for (const auto& span : sim.history.spans) {
        REQUIRE(span.events.size() == 2);
        CHECK(span.events[0].kind == EventKind::Call);
        CHECK(span.events[1].kind == EventKind::Callback);
        CHECK(span.events[1].fn == "_callback");
        // myid round-trips from the recorded external request
        REQUIRE(span.events[0].external_requests.size() == 1);
        CHECK(span.events[1].ctx.data.at("myid").as_string() ==
              span.events[0].external_requests[0].callback_id);
    }
}

TEST_CASE("dropped callbacks leave staged state and a held lock") {
    SimResult sim = run_corpus("lost_callback.toml");
    const History& h = sim.history;
    REQUIRE(h.spans.size() == 1);
    CHECK(h.spans[0].dropped_callbacks.size() == 1);
    const ObjectState* bk = sim.find_object("main", "BlockKing");
    REQUIRE(bk);
    CHECK(bk->attrs.at("warrior").as_address().id == "");
    CHECK(bk->attrs.at("__after_warrior").as_address().id == "bob");
    REQUIRE(h.locks.size() == 1);
    CHECK(h.locks[0].status == "Held");
    CHECK(lock_safety_holds(h));
}

TEST_CASE("an empty run exports an empty span list") {
    ScenarioConfig config;
    config.seed = 1;
    config.chains.push_back(ChainSpec{"main", 1, false});
    SimResult sim = run(config, [](const std::string&) -> std::string {
        throw ConfigError("no contracts in this scenario");
    });
    CHECK(export_history(sim.history) == "{\n  \"spans\": []\n}\n");
}

TEST_CASE("histories survive the JSON round trip") {
    for (const char* scenario : {"puzzle_anomaly.toml", "blockking_fixed.toml"}) {
        CAPTURE(scenario);
        History h = run_corpus(scenario).history;
        std::string exported = export_history(h);
        History reloaded = history_from_json(Json::parse(exported));
        CHECK(export_history(reloaded) == exported);
    }
}

TEST_CASE("blocks chain by digest with consecutive indexes") {
    SimResult sim = run_corpus("blockking_fixed.toml");
    for (const auto& chain : sim.chains) {
        std::string prev = "0x0000000000000000000000000000000000000000000000000000000000000000";
        std::uint64_t index = 0;
        for (const auto& block : chain.blocks) {
            CHECK(block.index == index + 1);
            CHECK(block.prev_digest == prev);
            CHECK(block.digest.size() == 66);
            prev = block.digest;
            index = block.index;
        }
    }
}

TEST_CASE("observed reads precede the span's first call") {
    SimResult sim = run_corpus("puzzle_anomaly.toml");
    for (const auto& span : sim.history.spans) {
        if (span.events.empty()) continue;
        for (const auto& read : span.observed_reads) CHECK(read.order < span.events[0].order);
        for (std::size_t i = 1; i < span.events.size(); ++i)
            CHECK(span.events[i - 1].order < span.events[i].order);
    }
}
