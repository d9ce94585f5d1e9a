#include "doctest.h"
#include "txsc/corpus.hpp"
#include "txsc/parse.hpp"
#include "txsc/print.hpp"
#include "txsc/rng.hpp"
#include "txsc/typecheck.hpp"

using namespace txsc;

namespace {

const std::string& puzzle_src() { return corpus_file("contracts/puzzle.txsc"); }
const std::string& blockking_src() { return corpus_file("contracts/blockking.txsc"); }

}  // namespace

TEST_CASE("puzzle contract parses to five attributes and three functions") {
    ContractAst ast = parse_contract(puzzle_src());
    CHECK(ast.name == "Puzzle");
    CHECK(ast.attributes.size() == 5);
    CHECK(ast.functions.size() == 3);
    CHECK(ast.find_function("UpdateReward")->transactional);
    CHECK(ast.find_function("SubmitSolution")->transactional);
    CHECK_FALSE(ast.find_function("constructor")->transactional);
}

TEST_CASE("blockking parses with a transactional enter and a plain callback") {
    ContractAst ast = parse_contract(blockking_src());
    CHECK(ast.attributes.size() == 7);
    CHECK(ast.find_function("enter")->transactional);
    CHECK_FALSE(ast.find_function("_callback")->transactional);
}

TEST_CASE("empty contract parses") {
    ContractAst ast = parse_contract("contract C { }");
    CHECK(ast.name == "C");
    CHECK(ast.attributes.empty());
    CHECK(ast.functions.empty());
}

TEST_CASE("duplicate attribute names are rejected") {
    const char* src = "contract C { attr uint reward; attr uint reward; }";
    CHECK_THROWS_AS(parse_contract(src), DuplicateNameError);
}

TEST_CASE("duplicate function names are rejected") {
    const char* src = "contract C { fn f() { return; } fn f() { return; } }";
    CHECK_THROWS_AS(parse_contract(src), DuplicateNameError);
}

TEST_CASE("syntax errors carry a location and expectation") {
    try {
        parse_contract("contract C { attr uint; }");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.loc.line == 1);
        CHECK(e.loc.col > 0);
        CHECK(!e.expected.empty());
    }
}

TEST_CASE("markers must enclose the whole body") {
    CHECK_THROWS_AS(parse_contract("contract C { fn f() { start_tx; x = 1; } }"), SyntaxError);
    CHECK_THROWS_AS(parse_contract("contract C { fn f() { x = 1; start_tx; end_tx; } }"),
                    SyntaxError);
    CHECK_THROWS_AS(
        parse_contract("contract C { fn f() { if (true) { start_tx; } end_tx; } }"),
        SyntaxError);
    // a single well-formed pair is fine
    ContractAst ok = parse_contract("contract C { fn f() { start_tx; x = 1; end_tx; } }");
    CHECK(ok.functions[0].transactional);
}

TEST_CASE("one external_query per function") {
    const char* src =
        "contract C { fn f() { external_query(\"a\", \"b\"); external_query(\"a\", \"c\"); } }";
    CHECK_THROWS_AS(parse_contract(src), SyntaxError);
}

TEST_CASE("corpus contracts round-trip through the printer") {
    for (const auto& src : {puzzle_src(), blockking_src()}) {
        ContractAst first = parse_contract(src);
        std::string printed = print_contract(first);
        ContractAst second = parse_contract(printed);
        CHECK(structurally_equal(first, second));
        // printing is a fixed point
        CHECK(print_contract(second) == printed);
    }
}

TEST_CASE("every node carries a location inside the source") {
    const std::string& src = puzzle_src();
    int line_count = 1;
    for (char c : src)
        if (c == '\n') ++line_count;
    ContractAst ast = parse_contract(src);
    CHECK(ast.loc.line >= 1);
    for (const auto& a : ast.attributes) {
        CHECK(a.loc.line >= 1);
        CHECK(a.loc.line <= line_count);
    }
    for (const auto& f : ast.functions) {
        CHECK(f.loc.line >= 1);
        CHECK(f.loc.line <= line_count);
        for (const auto& s : f.body) {
            CHECK(s.loc.line >= 1);
            CHECK(s.loc.line <= line_count);
        }
    }
}

TEST_CASE("typecheck accepts the corpus") {
    CHECK(typecheck(parse_contract(puzzle_src())).empty());
    CHECK(typecheck(parse_contract(blockking_src())).empty());
}

TEST_CASE("typecheck reports a forced mismatch") {
    ContractAst ast = parse_contract(
        "contract C { attr uint reward; fn f() { reward = true; } }");
    auto diags = typecheck(ast);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].kind == DiagKind::TypeMismatch);
}

TEST_CASE("typecheck reports unresolved names") {
    ContractAst ast = parse_contract(
        "contract C { attr uint reward; fn f() { reward = bonus + 1; } }");
    auto diags = typecheck(ast);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].kind == DiagKind::UnresolvedName);
}

TEST_CASE("typecheck flags bad operand types") {
    ContractAst ast = parse_contract(
        "contract C { attr bool b; fn f() { b = 1 && true; } }");
    CHECK(!typecheck(ast).empty());
}

// --- random round-trip property ---------------------------------------------

namespace {

struct AstGen {
    RandomStream rng;
    std::vector<std::string> attr_names;
    std::vector<PrimType> attr_types;

    explicit AstGen(std::uint64_t seed) : rng(seed) {}

    std::string fresh_name(const char* prefix, int i) { return std::string(prefix) + std::to_string(i); }

    ExprPtr gen_expr(int depth) {
        switch (rng.next_in(0, depth <= 0 ? 4 : 8)) {
            case 0:
                return attr_names.empty()
                           ? make_literal(Value(rng.next_in(0, 99)))
                           : make_attr_read(attr_names[rng.next_in(0, attr_names.size() - 1)]);
            case 1: return make_local_read(fresh_name("loc", static_cast<int>(rng.next_in(0, 2))));
            case 2: {
                switch (rng.next_in(0, 3)) {
                    case 0: return make_implicit(Implicit::MsgSender);
                    case 1: return make_implicit(Implicit::MsgValue);
                    case 2: return make_implicit(Implicit::BlockNumber);
                    default: return make_implicit(Implicit::MsgData, fresh_name("k", 1));
                }
            }
            case 3: {
                switch (rng.next_in(0, 3)) {
                    case 0: return make_literal(Value(rng.next_in(0, 1000)));
                    case 1: return make_literal(Value(rng.next_in(0, 1) == 1));
                    case 2: return make_literal(Value(std::string("text-") +
                                                      std::to_string(rng.next_in(0, 9))));
                    default: return make_literal(Value(Address{"acct"}));
                }
            }
            case 4: return make_oracle_address();
            case 5: {
                static const BinaryOp ops[] = {BinaryOp::Eq,  BinaryOp::Ne, BinaryOp::Lt,
                                               BinaryOp::Gt,  BinaryOp::Add, BinaryOp::Sub,
                                               BinaryOp::Mul, BinaryOp::And, BinaryOp::Or};
                return make_binary(ops[rng.next_in(0, 8)], gen_expr(depth - 1),
                                   gen_expr(depth - 1));
            }
            case 6: return make_unary(UnaryOp::Not, gen_expr(depth - 1));
            case 7: return make_hash(gen_expr(depth - 1));
            default: return make_lock_held(gen_expr(depth - 1));
        }
    }

    Stmt gen_stmt(int depth) {
        Stmt s;
        switch (rng.next_in(0, depth <= 0 ? 5 : 7)) {
            case 0:
                s.node = Assign{attr_names.empty() || rng.next_in(0, 1) == 0
                                    ? fresh_name("loc", static_cast<int>(rng.next_in(0, 2)))
                                    : attr_names[rng.next_in(0, attr_names.size() - 1)],
                                gen_expr(depth)};
                break;
            case 1: s.node = Requires{gen_expr(depth)}; break;
            case 2: s.node = Transfer{gen_expr(depth), gen_expr(depth)}; break;
            case 3: s.node = Return{}; break;
            case 4: s.node = Escrow{gen_expr(depth)}; break;
            case 5: s.node = LockRelease{gen_expr(depth)}; break;
            case 6: {
                If iff{gen_expr(depth - 1), gen_body(depth - 1, 2), std::nullopt};
                if (rng.next_in(0, 1) == 1) iff.else_body = gen_body(depth - 1, 2);
                s.node = std::move(iff);
                break;
            }
            default: s.node = EscrowRefund{}; break;
        }
        return s;
    }

    StmtList gen_body(int depth, int max_stmts) {
        StmtList body;
        std::uint64_t n = rng.next_in(0, static_cast<std::uint64_t>(max_stmts));
        for (std::uint64_t i = 0; i < n; ++i) body.push_back(gen_stmt(depth));
        return body;
    }

    ContractAst gen_contract() {
        ContractAst c;
        c.name = "Fuzz";
        std::uint64_t attrs = rng.next_in(0, 4);
        static const PrimType types[] = {PrimType::Address, PrimType::Bool, PrimType::Uint,
                                         PrimType::Bytes32, PrimType::String};
        for (std::uint64_t i = 0; i < attrs; ++i) {
            AttributeDecl a;
            a.name = fresh_name("a", static_cast<int>(i));
            a.type = types[rng.next_in(0, 4)];
            c.attributes.push_back(a);
            attr_names.push_back(a.name);
        }
        std::uint64_t fns = rng.next_in(1, 3);
        for (std::uint64_t i = 0; i < fns; ++i) {
            FunctionDecl f;
            f.name = fresh_name("f", static_cast<int>(i));
            std::uint64_t params = rng.next_in(0, 2);
            for (std::uint64_t k = 0; k < params; ++k)
                f.params.push_back(Param{fresh_name("p", static_cast<int>(k)),
                                         types[rng.next_in(0, 4)]});
            f.body = gen_body(3, 5);
            if (rng.next_in(0, 2) == 0 && !f.body.empty()) {
                StmtList wrapped;
                Stmt start;
                start.node = StartTx{};
                wrapped.push_back(std::move(start));
                for (auto& stmt : f.body) wrapped.push_back(std::move(stmt));
                Stmt end;
                end.node = EndTx{};
                wrapped.push_back(std::move(end));
                f.body = std::move(wrapped);
                f.transactional = true;
            }
            c.functions.push_back(std::move(f));
        }
        return c;
    }
};

}  // namespace

TEST_CASE("print/parse round-trips random contracts") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        AstGen gen(seed);
        ContractAst original = gen.gen_contract();
        std::string printed = print_contract(original);
        CAPTURE(printed);
        ContractAst reparsed = parse_contract(printed);
        CHECK(structurally_equal(original, reparsed));
    }
}

TEST_CASE("parsing is reproducible") {
    const std::string& src = puzzle_src();
    CHECK(structurally_equal(parse_contract(src), parse_contract(src)));
}
