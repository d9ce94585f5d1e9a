#include "doctest.h"
#include "txsc/analysis.hpp"
#include "txsc/corpus.hpp"
#include "txsc/interp.hpp"
#include "txsc/parse.hpp"
#include "txsc/rng.hpp"

using namespace txsc;

namespace {

ContractAst puzzle() { return parse_contract(corpus_file("contracts/puzzle.txsc")); }
ContractAst blockking() { return parse_contract(corpus_file("contracts/blockking.txsc")); }

std::set<std::string> names(std::initializer_list<const char*> xs) {
    std::set<std::string> out;
    for (auto* x : xs) out.insert(x);
    return out;
}

}  // namespace

TEST_CASE("puzzle profiles match the hand trace") {
    ContractAst ast = puzzle();
    ProfileMap profiles = analyze(ast);

    const FunctionProfile& update = profiles.at("UpdateReward");
    CHECK(update.read_set == names({"owner", "solved", "reward"}));
    CHECK(update.write_set == names({"reward"}));
    CHECK(update.classification == Classification::SDTF);
    CHECK_FALSE(update.triggers_callback);

    const FunctionProfile& submit = profiles.at("SubmitSolution");
    CHECK(submit.read_set == names({"solved", "diff", "reward"}));
    CHECK(submit.write_set == names({"solution", "solved"}));
    CHECK(submit.classification == Classification::SDTF);

    CHECK(profiles.at("constructor").classification == Classification::NonTransactional);
}

TEST_CASE("blockking profiles: enter is cross-domain, _callback is its target") {
    ContractAst ast = blockking();
    ProfileMap profiles = analyze(ast);

    const FunctionProfile& enter = profiles.at("enter");
    CHECK(enter.external_calls == names({"WolframAlpha"}));
    CHECK(enter.classification == Classification::CDTF);
    CHECK(enter.write_set == names({"warrior", "warriorGold", "warriorBlock"}));
    CHECK(enter.read_set.empty());
    CHECK(enter.triggers_callback);

    const FunctionProfile& cb = profiles.at("_callback");
    CHECK(cb.is_callback_target);
    CHECK(cb.triggers_callback);
    CHECK(cb.classification == Classification::NonTransactional);
    CHECK(cb.write_set == names({"randomNumber", "king", "kingBlock"}));
    CHECK(callback_target(profiles) == std::string("_callback"));
}

TEST_CASE("client check set follows attribute declaration order") {
    ContractAst ast = puzzle();
    ProfileMap profiles = analyze(ast);
    CHECK(client_checkset(ast, profiles.at("UpdateReward")) ==
          std::vector<std::string>{"owner", "solved", "reward"});
    CHECK(client_checkset(ast, profiles.at("SubmitSolution")) ==
          std::vector<std::string>{"solved", "reward", "diff"});
}

TEST_CASE("client check set of an empty read set is empty") {
    ContractAst ast = parse_contract(
        "contract C { attr uint x; fn f() { start_tx; x = msg.value; end_tx; } }");
    ProfileMap profiles = analyze(ast);
    CHECK(profiles.at("f").classification == Classification::SDTF);
    CHECK(client_checkset(ast, profiles.at("f")).empty());
}

TEST_CASE("client check set rejects non-SDTFs") {
    ContractAst ast = blockking();
    ProfileMap profiles = analyze(ast);
    CHECK_THROWS_AS(client_checkset(ast, profiles.at("enter")), AnalysisError);
    CHECK_THROWS_AS(client_checkset(ast, profiles.at("constructor")), AnalysisError);
}

TEST_CASE("lock cover set spans the entry and its callback") {
    ContractAst ast = blockking();
    ProfileMap profiles = analyze(ast);
    CHECK(lock_cover_set(ast, profiles, "enter") ==
          names({"warrior", "warriorBlock", "warriorGold", "king", "kingBlock", "randomNumber"}));
}

TEST_CASE("a transactional function must write something") {
    ContractAst ast = parse_contract(
        "contract C { attr uint x; fn f() { start_tx; requires(x > 0); end_tx; } }");
    CHECK_THROWS_AS(analyze(ast), AnalysisError);
}

TEST_CASE("an attribute written before it is read stays out of the read set") {
    ContractAst ast = parse_contract(
        "contract C { attr uint x; attr uint y; "
        "fn f() { x = 1; y = x + 1; } }");
    ProfileMap profiles = analyze(ast);
    CHECK(profiles.at("f").read_set.empty());
    CHECK(profiles.at("f").write_set == names({"x", "y"}));
}

TEST_CASE("branch writes merge conservatively") {
    // x is written on only one path, so the later read of x still counts
    ContractAst ast = parse_contract(
        "contract C { attr uint x; attr uint y; attr bool c; "
        "fn f() { if (c) { x = 1; } y = x; } }");
    ProfileMap profiles = analyze(ast);
    CHECK(profiles.at("f").read_set == names({"c", "x"}));
    CHECK(profiles.at("f").write_set == names({"x", "y"}));
    // written on both paths: excluded from the read set
    ContractAst both = parse_contract(
        "contract C { attr uint x; attr uint y; attr bool c; "
        "fn f() { if (c) { x = 1; } else { x = 2; } y = x; } }");
    CHECK(analyze(both).at("f").read_set == names({"c"}));
}

TEST_CASE("classification is a function of the AST alone") {
    ContractAst ast = blockking();
    ProfileMap a = analyze(ast);
    ProfileMap b = analyze(ast);
    for (const auto& [fn, p] : a) CHECK(p.classification == b.at(fn).classification);
}

// --- dynamic soundness of the static sets -----------------------------------

namespace {

Value random_value(RandomStream& rng, PrimType t) {
    switch (t) {
        case PrimType::Address: {
            static const char* ids[] = {"alice", "bob", "carol", "oracle:WolframAlpha", ""};
            return Value(Address{ids[rng.next_in(0, 4)]});
        }
        case PrimType::Bool: return Value(rng.next_in(0, 1) == 1);
        case PrimType::Uint: return Value(rng.next_in(0, 50));
        case PrimType::Bytes32: {
            Bytes32 b;
            for (auto& byte : b.bytes) byte = static_cast<std::uint8_t>(rng.next_in(0, 255));
            return Value(b);
        }
        case PrimType::String: return Value("s" + std::to_string(rng.next_in(0, 9)));
    }
    return Value(std::uint64_t{0});
}

ObjectState random_state(RandomStream& rng, const ContractAst& ast) {
    ObjectState st = default_state(ast);
    for (const auto& a : ast.attributes) st.attrs[a.name] = random_value(rng, a.type);
    st.balance = rng.next_in(0, 100);
    return st;
}

CallContext random_ctx(RandomStream& rng) {
    CallContext ctx;
    static const char* senders[] = {"alice", "bob", "carol", "oracle:WolframAlpha"};
    ctx.sender = Address{senders[rng.next_in(0, 3)]};
    ctx.value = rng.next_in(0, 10);
    ctx.block_number = rng.next_in(1, 9);
    ctx.gas_budget = rng.next_in(0, 25);
    static const PrimType types[] = {PrimType::Address, PrimType::Bool, PrimType::Uint,
                                     PrimType::Bytes32, PrimType::String};
    for (const char* key : {"solved", "reward", "payload", "diff", "result", "owner"})
        if (rng.next_in(0, 3) != 0) ctx.data[key] = random_value(rng, types[rng.next_in(0, 4)]);
    ctx.data["lock_id"] = Value(std::string("L1"));
    return ctx;
}

}  // namespace

TEST_CASE("dynamic traces stay inside the static read and write sets") {
    RandomStream rng(2024);
    for (const auto& file : {"contracts/puzzle.txsc", "contracts/blockking.txsc"}) {
        ContractAst ast = parse_contract(corpus_file(file));
        ProfileMap profiles = analyze(ast);
        for (const auto& fn : ast.functions) {
            const FunctionProfile& profile = profiles.at(fn.name);
            for (int i = 0; i < 300; ++i) {
                ObjectState st = random_state(rng, ast);
                CallContext ctx = random_ctx(rng);
                StubEnv env;
                env.lock_held_answer = rng.next_in(0, 1) == 1;
                ExecResult res = execute(ast, fn.name, st, ctx, env);
                for (const auto& op : pre_write_reads(res.trace)) {
                    CAPTURE(fn.name);
                    CAPTURE(op.attr);
                    CHECK(profile.read_set.contains(op.attr));
                }
                for (const auto& op : res.trace) {
                    if (!op.is_write) continue;
                    CAPTURE(fn.name);
                    CAPTURE(op.attr);
                    CHECK(profile.write_set.contains(op.attr));
                }
            }
        }
    }
}
