#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "txsc/errors.hpp"
#include "txsc/value.hpp"

namespace txsc {

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

enum class BinaryOp { Eq, Ne, Lt, Gt, Add, Sub, Mul, And, Or };
enum class UnaryOp { Not };

std::string to_string(BinaryOp op);
std::string to_string(UnaryOp op);

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

/// Read of a declared contract attribute.
struct AttrRead {
    std::string name;
};

/// Read of a function-local name or parameter.
struct LocalRead {
    std::string name;
};

enum class Implicit { MsgSender, MsgValue, MsgData, BlockNumber };

/// msg.sender, msg.value, msg.data.<key>, block.number
struct ImplicitRead {
    Implicit kind;
    std::string key;  // set only for MsgData
};

struct Literal {
    Value value;
};

struct Binary {
    BinaryOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};

struct Unary {
    UnaryOp op;
    ExprPtr operand;
};

/// sha256(expr) over the canonical encoding of the operand.
struct HashCall {
    ExprPtr arg;
};

/// lock_held(lock_id): true iff the lock-manager chain holds a covering lock.
struct LockHeldCall {
    ExprPtr lock_id;
};

/// oracle_address(): identity the external oracle service calls back from.
struct OracleAddressCall {};

struct Expr {
    using Node = std::variant<AttrRead, LocalRead, ImplicitRead, Literal, Binary, Unary,
                              HashCall, LockHeldCall, OracleAddressCall>;
    SourceLoc loc;
    Node node;
};

ExprPtr clone(const Expr& e);
bool structurally_equal(const Expr& a, const Expr& b);

// Convenience constructors used by the parser and the transformer.
ExprPtr make_attr_read(std::string name, SourceLoc loc = {});
ExprPtr make_local_read(std::string name, SourceLoc loc = {});
ExprPtr make_implicit(Implicit kind, std::string key = "", SourceLoc loc = {});
ExprPtr make_literal(Value v, SourceLoc loc = {});
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs, SourceLoc loc = {});
ExprPtr make_unary(UnaryOp op, ExprPtr operand, SourceLoc loc = {});
ExprPtr make_hash(ExprPtr arg, SourceLoc loc = {});
ExprPtr make_lock_held(ExprPtr lock_id, SourceLoc loc = {});
ExprPtr make_oracle_address(SourceLoc loc = {});

// ---------------------------------------------------------------------------
// Statements
// ---------------------------------------------------------------------------

struct Stmt;
using StmtList = std::vector<Stmt>;

struct Assign {
    std::string target;
    ExprPtr value;
};

struct Requires {
    ExprPtr cond;
};

struct If {
    ExprPtr cond;
    StmtList then_body;
    std::optional<StmtList> else_body;
};

/// transfer(to, amount): pays out of the contract's balance.
struct Transfer {
    ExprPtr recipient;
    ExprPtr amount;
};

/// external_query("service", "query"): asynchronous oracle request; the
/// response arrives later as a call to the contract's callback function.
struct ExternalQuery {
    std::string service;
    std::string query;
};

struct Return {};

/// Transaction markers. Directives for the rewriting passes, not runtime
/// statements; the interpreter skips them and the transformer removes them.
struct StartTx {};
struct EndTx {};

/// escrow(amount): stakes `amount` of the contract balance against the lock
/// named by msg.data.lock_id; refunded or forfeited later.
struct Escrow {
    ExprPtr amount;
};

/// escrow_refund(): returns the stake for msg.data.lock_id to its depositor.
struct EscrowRefund {};

/// escrow_forfeit(recipient): pays the stake for msg.data.lock_id to recipient.
struct EscrowForfeit {
    ExprPtr recipient;
};

/// lock_release(lock_id) / lock_forfeit(lock_id): mark the lock record
/// Released or Forfeited on the lock-manager chain at commit.
struct LockRelease {
    ExprPtr lock_id;
};

struct LockForfeit {
    ExprPtr lock_id;
};

struct Stmt {
    using Node = std::variant<Assign, Requires, If, Transfer, ExternalQuery, Return, StartTx,
                              EndTx, Escrow, EscrowRefund, EscrowForfeit, LockRelease, LockForfeit>;
    SourceLoc loc;
    Node node;
};

Stmt clone(const Stmt& s);
StmtList clone(const StmtList& body);
bool structurally_equal(const Stmt& a, const Stmt& b);
bool structurally_equal(const StmtList& a, const StmtList& b);

// ---------------------------------------------------------------------------
// Declarations
// ---------------------------------------------------------------------------

struct AttributeDecl {
    std::string name;
    PrimType type = PrimType::Uint;
    SourceLoc loc;
    // visibility is always public in this DSL
};

struct Param {
    std::string name;
    PrimType type;
};

struct FunctionDecl {
    std::string name;
    std::vector<Param> params;
    StmtList body;
    bool transactional = false;  // true when body is enclosed in start_tx/end_tx
    SourceLoc loc;
};

struct ContractAst {
    std::string name;
    std::vector<AttributeDecl> attributes;
    std::vector<FunctionDecl> functions;
    SourceLoc loc;

    const AttributeDecl* find_attribute(const std::string& name) const;
    const FunctionDecl* find_function(const std::string& name) const;
    bool has_attribute(const std::string& name) const { return find_attribute(name) != nullptr; }
};

ContractAst clone(const ContractAst& c);
bool structurally_equal(const ContractAst& a, const ContractAst& b);

/// AST rendered as JSON (locations included) for `txsc parse`.
Json ast_to_json(const ContractAst& c);

/// Names reserved for generated code. User contracts that still carry
/// transaction markers may not declare them.
inline constexpr const char* kGeneratedPrefix = "__";
inline constexpr const char* kAfterImagePrefix = "__after_";

}  // namespace txsc
