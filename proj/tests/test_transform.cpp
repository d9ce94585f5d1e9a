#include "doctest.h"
#include "txsc/analysis.hpp"
#include "txsc/corpus.hpp"
#include "txsc/interp.hpp"
#include "txsc/parse.hpp"
#include "txsc/print.hpp"
#include "txsc/rng.hpp"
#include "txsc/transform.hpp"
#include "txsc/typecheck.hpp"

using namespace txsc;

namespace {

ContractAst puzzle() { return parse_contract(corpus_file("contracts/puzzle.txsc")); }
ContractAst blockking() { return parse_contract(corpus_file("contracts/blockking.txsc")); }

TransformConfig standard_config() {
    return TransformConfig::from_toml(corpus_file("config/standard.toml"));
}

TransformConfig standard_config_for(const ContractAst& ast) {
    return standard_config().restricted_to(ast);
}

std::string stmt_text(const Stmt& s) { return print_stmt(s, 0); }

}  // namespace

TEST_CASE("freshness checks are injected in declaration order") {
    ContractAst ast = puzzle();
    auto [out, report] = transform(ast, analyze(ast), standard_config());

    const FunctionDecl* update = out.find_function("UpdateReward");
    REQUIRE(update);
    REQUIRE(update->body.size() >= 2);
    CHECK(stmt_text(update->body[0]) == "requires(solved == msg.data.solved);");
    CHECK(stmt_text(update->body[1]) == "requires(reward == msg.data.reward);");
    CHECK_FALSE(update->transactional);

    const FunctionDecl* submit = out.find_function("SubmitSolution");
    REQUIRE(submit);
    CHECK(stmt_text(submit->body[0]) == "requires(solved == msg.data.solved);");
    CHECK(stmt_text(submit->body[1]) == "requires(reward == msg.data.reward);");

    // no markers anywhere in the output
    for (const auto& f : out.functions)
        for (const auto& s : f.body) {
            CHECK_FALSE(std::holds_alternative<StartTx>(s.node));
            CHECK_FALSE(std::holds_alternative<EndTx>(s.node));
        }

    CHECK(report.total_injected_checks() == 4);
    CHECK(report.total_shadow_attrs() == 0);
    CHECK(typecheck(out).empty());
}

TEST_CASE("transformed puzzle matches the committed golden file") {
    ContractAst ast = puzzle();
    auto [out, report] = transform(ast, analyze(ast), standard_config());
    CHECK(print_contract(out) == corpus_file("golden/puzzle_transformed.txsc"));
}

TEST_CASE("transformed blockking matches the committed golden file") {
    ContractAst ast = blockking();
    auto [out, report] = transform(ast, analyze(ast), standard_config_for(ast));
    CHECK(print_contract(out) == corpus_file("golden/blockking_transformed.txsc"));
}

TEST_CASE("the constructor passes through untouched") {
    ContractAst ast = puzzle();
    auto [out, report] = transform(ast, analyze(ast), standard_config());
    CHECK(structurally_equal(ast.find_function("constructor")->body,
                             out.find_function("constructor")->body));
}

TEST_CASE("an empty check set leaves only the marker removal") {
    ContractAst ast = parse_contract(
        "contract C { attr uint x; fn f() { start_tx; x = msg.value; end_tx; } }");
    auto [out, report] = transform(ast, analyze(ast), TransformConfig{});
    const FunctionDecl* f = out.find_function("f");
    REQUIRE(f);
    REQUIRE(f->body.size() == 1);
    CHECK(stmt_text(f->body[0]) == "x = msg.value;");
    CHECK(report.total_injected_checks() == 0);
}

TEST_CASE("cross-domain entries stage writes and the callback commits them") {
    ContractAst ast = blockking();
    auto [out, report] = transform(ast, analyze(ast), standard_config_for(ast));

    // shadow attributes appended in declaration order
    std::vector<std::string> attr_names;
    for (const auto& a : out.attributes) attr_names.push_back(a.name);
    CHECK(attr_names == std::vector<std::string>{
                            "owner", "king", "warrior", "kingBlock", "warriorBlock",
                            "warriorGold", "randomNumber", "__after_warrior",
                            "__after_warriorBlock", "__after_warriorGold"});

    const FunctionDecl* enter = out.find_function("enter");
    REQUIRE(enter);
    CHECK(stmt_text(enter->body[0]) == "requires(lock_held(msg.data.lock_id));");
    CHECK(stmt_text(enter->body[1]) == "escrow(25);");
    CHECK(stmt_text(enter->body[2]) == "__after_warrior = warrior;");
    CHECK(stmt_text(enter->body[3]) == "__after_warriorBlock = warriorBlock;");
    CHECK(stmt_text(enter->body[4]) == "__after_warriorGold = warriorGold;");
    // every write in the body goes to a shadow
    ProfileMap out_profiles = analyze(out);
    for (const auto& attr : out_profiles.at("enter").write_set)
        CHECK(attr.starts_with("__after_"));

    const FunctionDecl* cb = out.find_function("_callback");
    REQUIRE(cb);
    CHECK(stmt_text(cb->body[0]) == "requires(msg.sender == oracle_address());");
    CHECK(stmt_text(cb->body[1]) == "warrior = __after_warrior;");
    CHECK(stmt_text(cb->body[2]) == "warriorBlock = __after_warriorBlock;");
    CHECK(stmt_text(cb->body[3]) == "warriorGold = __after_warriorGold;");
    CHECK(stmt_text(cb->body[cb->body.size() - 2]) == "lock_release(msg.data.lock_id);");
    CHECK(stmt_text(cb->body.back()) == "escrow_refund();");

    const FunctionDecl* recover = out.find_function("owner_recover");
    REQUIRE(recover);
    CHECK(stmt_text(recover->body[0]) == "requires(msg.sender == owner);");
    CHECK(stmt_text(recover->body.back()) == "lock_forfeit(msg.data.lock_id);");

    int lock_checks = 0, escrows = 0;
    for (const auto& e : report.per_function) {
        lock_checks += e.lock_checks;
        escrows += e.escrows;
    }
    CHECK(lock_checks == 1);
    CHECK(escrows == 1);
    CHECK(report.total_shadow_attrs() == 3);
    CHECK(typecheck(out).empty());
}

TEST_CASE("contracts without cross-domain functions pass transform_cdtf unchanged") {
    ContractAst ast = puzzle();
    ContractAst out = transform_cdtf(ast, analyze(ast), standard_config_for(ast));
    CHECK(structurally_equal(ast, out));
}

TEST_CASE("a cross-domain entry needs a designated callback") {
    ContractAst ast = parse_contract(
        "contract C { attr address owner; attr uint x; "
        "fn f() { start_tx; x = 1; external_query(\"svc\", \"q\"); end_tx; } }");
    CHECK_THROWS_AS(transform_cdtf(ast, analyze(ast), TransformConfig{}), TransformError);
}

TEST_CASE("exclusions are validated against the read set") {
    ContractAst ast = puzzle();
    ProfileMap profiles = analyze(ast);
    TransformConfig bad_fn;
    bad_fn.check_exclusions["NoSuchFn"] = {"reward"};
    CHECK_THROWS_AS(transform_sdtf(ast, profiles, bad_fn), TransformError);
    TransformConfig bad_attr;
    bad_attr.check_exclusions["UpdateReward"] = {"solution"};  // written, never read
    CHECK_THROWS_AS(transform_sdtf(ast, profiles, bad_attr), TransformError);
}

TEST_CASE("reserved prefix is rejected on marked input") {
    ContractAst ast = parse_contract(
        "contract C { attr uint __after_x; attr uint x; "
        "fn f() { start_tx; x = 1; end_tx; } }");
    CHECK_THROWS_AS(transform_sdtf(ast, analyze(ast), TransformConfig{}), TransformError);
}

TEST_CASE("transforming marker-free output changes nothing") {
    for (auto make : {puzzle, blockking}) {
        ContractAst ast = make();
        auto [once, r1] = transform(ast, analyze(ast), standard_config_for(ast));
        auto [twice, r2] = transform(once, analyze(once), standard_config_for(once));
        CHECK(structurally_equal(once, twice));
        CHECK(r2.total_injected_checks() == 0);
        CHECK(r2.total_shadow_attrs() == 0);
    }
}

TEST_CASE("serial schedules agree between original and transformed puzzle") {
    ContractAst original = puzzle();
    auto [rewritten, report] = transform(original, analyze(original), standard_config());

    RandomStream rng(512);
    for (int round = 0; round < 50; ++round) {
        ObjectState st_orig = default_state(original);
        st_orig.attrs["owner"] = Value(Address{"alice"});
        st_orig.attrs["reward"] = Value(rng.next_in(0, 5));
        Bytes32 ff;
        ff.bytes.fill(0xff);
        st_orig.attrs["diff"] = Value(ff);
        st_orig.balance = 100;
        ObjectState st_tx = st_orig;
        st_tx.contract = rewritten.name;

        for (int step = 0; step < 6; ++step) {
            bool update = rng.next_in(0, 1) == 1;
            CallContext ctx;
            ctx.sender = Address{update ? "alice" : "bob"};
            ctx.value = rng.next_in(0, 4);
            ctx.gas_budget = 20;
            ctx.block_number = static_cast<std::uint64_t>(step + 1);
            // a serial client always sends the current values
            ctx.data["solved"] = st_orig.attrs.at("solved");
            ctx.data["reward"] = st_orig.attrs.at("reward");
            Bytes32 payload;
            for (auto& b : payload.bytes) b = static_cast<std::uint8_t>(rng.next_in(0, 255));
            ctx.data["payload"] = Value(payload);
            std::string fn = update ? "UpdateReward" : "SubmitSolution";

            StubEnv env;
            ExecResult a = execute(original, fn, st_orig, ctx, env);
            ExecResult b = execute(rewritten, fn, st_tx, ctx, env);
            CHECK(a.outcome == b.outcome);
            if (a.committed() && b.committed()) {
                st_orig = a.new_state;
                st_tx = b.new_state;
                CHECK(st_orig.attrs == st_tx.attrs);
                CHECK(st_orig.balance == st_tx.balance);
                CHECK(a.transfers == b.transfers);
            }
        }
    }
}

TEST_CASE("serial enter+callback agrees between original and transformed blockking") {
    ContractAst original = blockking();
    auto [rewritten, report] =
        transform(original, analyze(original), standard_config_for(original));

    RandomStream rng(77);
    for (int round = 0; round < 40; ++round) {
        ObjectState st_orig = default_state(original);
        st_orig.attrs["owner"] = Value(Address{"dora"});
        st_orig.attrs["king"] = Value(Address{"dora"});
        st_orig.balance = 100;
        ObjectState st_tx = default_state(rewritten);
        for (const auto& [k, v] : st_orig.attrs) st_tx.attrs[k] = v;
        st_tx.balance = st_orig.balance;

        StubEnv env;
        env.lock_held_answer = true;
        env.escrow = 25;

        CallContext enter_ctx;
        enter_ctx.sender = Address{"bob"};
        enter_ctx.value = rng.next_in(1, 9);
        enter_ctx.gas_budget = 30;
        enter_ctx.block_number = rng.next_in(1, 9);
        enter_ctx.data["lock_id"] = Value(std::string("L1"));

        ExecResult a1 = execute(original, "enter", st_orig, enter_ctx, env);
        ExecResult b1 = execute(rewritten, "enter", st_tx, enter_ctx, env);
        REQUIRE(a1.committed());
        REQUIRE(b1.committed());
        CHECK(a1.external_requests.size() == 1);
        CHECK(b1.external_requests.size() == 1);

        CallContext cb_ctx;
        cb_ctx.sender = env.oracle;
        cb_ctx.gas_budget = 30;
        cb_ctx.block_number = enter_ctx.block_number + 1;
        cb_ctx.data["result"] = Value(rng.next_in(1, 9));
        cb_ctx.data["lock_id"] = Value(std::string("L1"));

        ExecResult a2 = execute(original, "_callback", a1.new_state, cb_ctx, env);
        ExecResult b2 = execute(rewritten, "_callback", b1.new_state, cb_ctx, env);
        REQUIRE(a2.committed());
        REQUIRE(b2.committed());
        for (const auto& attr : original.attributes) {
            CAPTURE(attr.name);
            CHECK(a2.new_state.attrs.at(attr.name) == b2.new_state.attrs.at(attr.name));
        }
        CHECK(a2.transfers == b2.transfers);
        CHECK(a2.new_state.balance == b2.new_state.balance);
    }
}
