#include "txsc/typecheck.hpp"

#include <map>
#include <optional>

namespace txsc {

std::string to_string(DiagKind k) {
    switch (k) {
        case DiagKind::TypeMismatch: return "TypeMismatch";
        case DiagKind::UnresolvedName: return "UnresolvedName";
        case DiagKind::BadOperand: return "BadOperand";
        case DiagKind::MarkerMisuse: return "MarkerMisuse";
        case DiagKind::Other: return "Other";
    }
    return "?";
}

namespace {

// nullopt stands for the dynamic type of msg.data.<key> reads: it unifies
// with every primitive and is checked at execution time.
using MaybeType = std::optional<PrimType>;

struct Checker {
    const ContractAst& ast;
    std::vector<Diagnostic>& diags;
    std::map<std::string, MaybeType> locals;  // params + block-introduced names

    void error(DiagKind kind, SourceLoc loc, std::string msg) {
        diags.push_back(Diagnostic{kind, loc, std::move(msg)});
    }

    static bool compatible(MaybeType a, MaybeType b) { return !a || !b || *a == *b; }

    static std::string show(MaybeType t) { return t ? to_string(*t) : "dynamic"; }

    MaybeType check_expr(const Expr& e) {
        return std::visit(
            [&](const auto& n) -> MaybeType {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, AttrRead>) {
                    const auto* a = ast.find_attribute(n.name);
                    if (!a) {
                        error(DiagKind::UnresolvedName, e.loc, "unknown attribute '" + n.name + "'");
                        return std::nullopt;
                    }
                    return a->type;
                } else if constexpr (std::is_same_v<T, LocalRead>) {
                    auto it = locals.find(n.name);
                    if (it == locals.end()) {
                        error(DiagKind::UnresolvedName, e.loc, "unknown name '" + n.name + "'");
                        return std::nullopt;
                    }
                    return it->second;
                } else if constexpr (std::is_same_v<T, ImplicitRead>) {
                    switch (n.kind) {
                        case Implicit::MsgSender: return PrimType::Address;
                        case Implicit::MsgValue: return PrimType::Uint;
                        case Implicit::MsgData: return std::nullopt;
                        case Implicit::BlockNumber: return PrimType::Uint;
                    }
                    return std::nullopt;
                } else if constexpr (std::is_same_v<T, Literal>) {
                    return n.value.type();
                } else if constexpr (std::is_same_v<T, Binary>) {
                    MaybeType lt = check_expr(*n.lhs);
                    MaybeType rt = check_expr(*n.rhs);
                    switch (n.op) {
                        case BinaryOp::Eq:
                        case BinaryOp::Ne:
                            if (!compatible(lt, rt))
                                error(DiagKind::TypeMismatch, e.loc,
                                      "cannot compare " + show(lt) + " with " + show(rt));
                            return PrimType::Bool;
                        case BinaryOp::Lt:
                        case BinaryOp::Gt: {
                            auto ordered = [](MaybeType t) {
                                return !t || *t == PrimType::Uint || *t == PrimType::Bytes32;
                            };
                            if (!ordered(lt) || !ordered(rt) || !compatible(lt, rt))
                                error(DiagKind::BadOperand, e.loc,
                                      "ordering needs uint or bytes32 operands of one type, got " +
                                          show(lt) + " and " + show(rt));
                            return PrimType::Bool;
                        }
                        case BinaryOp::Add:
                        case BinaryOp::Sub:
                        case BinaryOp::Mul: {
                            auto arith = [](MaybeType t) { return !t || *t == PrimType::Uint; };
                            if (!arith(lt) || !arith(rt))
                                error(DiagKind::BadOperand, e.loc,
                                      "arithmetic needs uint operands, got " + show(lt) + " and " +
                                          show(rt));
                            return PrimType::Uint;
                        }
                        case BinaryOp::And:
                        case BinaryOp::Or: {
                            auto boolean = [](MaybeType t) { return !t || *t == PrimType::Bool; };
                            if (!boolean(lt) || !boolean(rt))
                                error(DiagKind::BadOperand, e.loc,
                                      "logical operator needs bool operands, got " + show(lt) +
                                          " and " + show(rt));
                            return PrimType::Bool;
                        }
                    }
                    return std::nullopt;
                } else if constexpr (std::is_same_v<T, Unary>) {
                    MaybeType t = check_expr(*n.operand);
                    if (t && *t != PrimType::Bool)
                        error(DiagKind::BadOperand, e.loc, "'!' needs a bool operand, got " + show(t));
                    return PrimType::Bool;
                } else if constexpr (std::is_same_v<T, HashCall>) {
                    check_expr(*n.arg);  // any primitive hashes
                    return PrimType::Bytes32;
                } else if constexpr (std::is_same_v<T, LockHeldCall>) {
                    MaybeType t = check_expr(*n.lock_id);
                    if (t && *t != PrimType::String && *t != PrimType::Bytes32)
                        error(DiagKind::BadOperand, e.loc,
                              "lock_held needs a lock identifier, got " + show(t));
                    return PrimType::Bool;
                } else {
                    return PrimType::Address;
                }
            },
            e.node);
    }

    void expect_bool(const Expr& e, const char* where) {
        MaybeType t = check_expr(e);
        if (t && *t != PrimType::Bool)
            error(DiagKind::TypeMismatch, e.loc,
                  std::string(where) + " condition must be bool, got " + show(t));
    }

    void check_block(const StmtList& body) {
        for (const auto& s : body) check_stmt(s);
    }

    void check_stmt(const Stmt& s) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Assign>) {
                    MaybeType vt = check_expr(*n.value);
                    if (const auto* a = ast.find_attribute(n.target)) {
                        if (vt && *vt != a->type)
                            error(DiagKind::TypeMismatch, s.loc,
                                  "cannot assign " + show(vt) + " to " + to_string(a->type) +
                                      " attribute '" + n.target + "'");
                    } else {
                        auto it = locals.find(n.target);
                        if (it == locals.end()) {
                            locals[n.target] = vt;  // first assignment introduces the local
                        } else if (!compatible(it->second, vt)) {
                            error(DiagKind::TypeMismatch, s.loc,
                                  "cannot assign " + show(vt) + " to " + show(it->second) +
                                      " local '" + n.target + "'");
                        }
                    }
                } else if constexpr (std::is_same_v<T, Requires>) {
                    expect_bool(*n.cond, "requires");
                } else if constexpr (std::is_same_v<T, If>) {
                    expect_bool(*n.cond, "if");
                    check_block(n.then_body);
                    if (n.else_body) check_block(*n.else_body);
                } else if constexpr (std::is_same_v<T, Transfer>) {
                    MaybeType rt = check_expr(*n.recipient);
                    if (rt && *rt != PrimType::Address)
                        error(DiagKind::TypeMismatch, s.loc,
                              "transfer recipient must be an address, got " + show(rt));
                    MaybeType at = check_expr(*n.amount);
                    if (at && *at != PrimType::Uint)
                        error(DiagKind::TypeMismatch, s.loc,
                              "transfer amount must be uint, got " + show(at));
                } else if constexpr (std::is_same_v<T, Escrow>) {
                    MaybeType at = check_expr(*n.amount);
                    if (at && *at != PrimType::Uint)
                        error(DiagKind::TypeMismatch, s.loc,
                              "escrow amount must be uint, got " + show(at));
                } else if constexpr (std::is_same_v<T, EscrowForfeit>) {
                    MaybeType rt = check_expr(*n.recipient);
                    if (rt && *rt != PrimType::Address)
                        error(DiagKind::TypeMismatch, s.loc,
                              "escrow_forfeit recipient must be an address, got " + show(rt));
                } else if constexpr (std::is_same_v<T, LockRelease> ||
                                     std::is_same_v<T, LockForfeit>) {
                    MaybeType t = check_expr(*n.lock_id);
                    if (t && *t != PrimType::String && *t != PrimType::Bytes32)
                        error(DiagKind::BadOperand, s.loc,
                              "lock id must be a string or bytes32, got " + show(t));
                } else {
                    // ExternalQuery, Return, StartTx, EndTx, EscrowRefund: nothing to check
                }
            },
            s.node);
    }
};

}  // namespace

std::vector<Diagnostic> typecheck(const ContractAst& ast) {
    std::vector<Diagnostic> diags;
    for (const auto& f : ast.functions) {
        Checker checker{ast, diags, {}};
        for (const auto& p : f.params) checker.locals[p.name] = p.type;
        checker.check_block(f.body);
    }
    return diags;
}

}  // namespace txsc
