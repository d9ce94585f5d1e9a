#include "txsc/interp.hpp"

#include <set>

#include "txsc/digest.hpp"
#include "txsc/print.hpp"

namespace txsc {

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::Committed: return "Committed";
        case Outcome::AbortedRequires: return "AbortedRequires";
        case Outcome::AbortedOutOfGas: return "AbortedOutOfGas";
        case Outcome::AbortedError: return "AbortedError";
    }
    return "?";
}

namespace {

struct Abort {
    Outcome outcome;
    std::string detail;
    SourceLoc loc;
};

enum class Flow { Next, Returned };

struct Runner {
    const ContractAst& ast;
    const CallContext& ctx;
    HostEnv& env;
    ExecResult& res;
    ObjectState& working;
    std::uint64_t gas_left;
    std::map<std::string, Value> locals;

    void charge(const SourceLoc& loc) {
        if (gas_left == 0) throw Abort{Outcome::AbortedOutOfGas, "out of gas", loc};
        --gas_left;
        ++res.gas_used;
    }

    Value read_attr(const std::string& name, SourceLoc loc) {
        auto it = working.attrs.find(name);
        if (it == working.attrs.end())
            throw Abort{Outcome::AbortedError, "attribute '" + name + "' missing from state", loc};
        res.trace.push_back(TraceOp{false, name, it->second});
        return it->second;
    }

    void write_attr(const std::string& name, Value v, SourceLoc loc) {
        const auto* decl = ast.find_attribute(name);
        if (!decl) throw Abort{Outcome::AbortedError, "attribute '" + name + "' undeclared", loc};
        if (v.type() != decl->type)
            throw Abort{Outcome::AbortedError,
                        "cannot store " + to_string(v.type()) + " into " + to_string(decl->type) +
                            " attribute '" + name + "'",
                        loc};
        working.attrs[name] = v;
        res.trace.push_back(TraceOp{true, name, std::move(v)});
    }

    Value data_value(const std::string& key, SourceLoc loc) {
        auto it = ctx.data.find(key);
        if (it == ctx.data.end())
            throw Abort{Outcome::AbortedError, "msg.data has no entry '" + key + "'", loc};
        return it->second;
    }

    std::string lock_id_from_ctx(SourceLoc loc) {
        auto it = ctx.data.find("lock_id");
        if (it == ctx.data.end() || it->second.type() != PrimType::String)
            throw Abort{Outcome::AbortedError, "msg.data.lock_id missing or not a string", loc};
        return it->second.as_string();
    }

    std::uint64_t expect_uint(const Value& v, const char* what, SourceLoc loc) {
        if (v.type() != PrimType::Uint)
            throw Abort{Outcome::AbortedError,
                        std::string(what) + " must be uint, got " + to_string(v.type()), loc};
        return v.as_uint();
    }

    bool expect_bool(const Value& v, const char* what, SourceLoc loc) {
        if (v.type() != PrimType::Bool)
            throw Abort{Outcome::AbortedError,
                        std::string(what) + " must be bool, got " + to_string(v.type()), loc};
        return v.as_bool();
    }

    Value eval(const Expr& e) {
        return std::visit(
            [&](const auto& n) -> Value {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, AttrRead>) {
                    return read_attr(n.name, e.loc);
                } else if constexpr (std::is_same_v<T, LocalRead>) {
                    auto it = locals.find(n.name);
                    if (it == locals.end())
                        throw Abort{Outcome::AbortedError, "name '" + n.name + "' unbound", e.loc};
                    return it->second;
                } else if constexpr (std::is_same_v<T, ImplicitRead>) {
                    switch (n.kind) {
                        case Implicit::MsgSender: return Value(ctx.sender);
                        case Implicit::MsgValue: return Value(ctx.value);
                        case Implicit::MsgData: return data_value(n.key, e.loc);
                        case Implicit::BlockNumber: return Value(ctx.block_number);
                    }
                    throw Abort{Outcome::AbortedError, "bad implicit", e.loc};
                } else if constexpr (std::is_same_v<T, Literal>) {
                    return n.value;
                } else if constexpr (std::is_same_v<T, Binary>) {
                    Value l = eval(*n.lhs);
                    Value r = eval(*n.rhs);
                    return apply_binary(n.op, l, r, e.loc);
                } else if constexpr (std::is_same_v<T, Unary>) {
                    Value v = eval(*n.operand);
                    return Value(!expect_bool(v, "'!' operand", e.loc));
                } else if constexpr (std::is_same_v<T, HashCall>) {
                    Value v = eval(*n.arg);
                    return Value(sha256(v.canonical_encoding()));
                } else if constexpr (std::is_same_v<T, LockHeldCall>) {
                    Value id = eval(*n.lock_id);
                    bool held = env.lock_held(id);
                    res.env_log.lock_held.push_back(held);
                    return Value(held);
                } else {
                    Address a = env.oracle_address();
                    res.env_log.oracle_address.push_back(a.id);
                    return Value(a);
                }
            },
            e.node);
    }

    Value apply_binary(BinaryOp op, const Value& l, const Value& r, SourceLoc loc) {
        switch (op) {
            case BinaryOp::Eq:
            case BinaryOp::Ne: {
                if (l.type() != r.type())
                    throw Abort{Outcome::AbortedError,
                                "cannot compare " + to_string(l.type()) + " with " +
                                    to_string(r.type()),
                                loc};
                bool eq = l == r;
                return Value(op == BinaryOp::Eq ? eq : !eq);
            }
            case BinaryOp::Lt:
            case BinaryOp::Gt: {
                if (l.type() == PrimType::Uint && r.type() == PrimType::Uint) {
                    return Value(op == BinaryOp::Lt ? l.as_uint() < r.as_uint()
                                                    : l.as_uint() > r.as_uint());
                }
                if (l.type() == PrimType::Bytes32 && r.type() == PrimType::Bytes32) {
                    return Value(op == BinaryOp::Lt ? l.as_bytes32() < r.as_bytes32()
                                                    : l.as_bytes32() > r.as_bytes32());
                }
                throw Abort{Outcome::AbortedError,
                            "ordering needs two uints or two bytes32, got " +
                                to_string(l.type()) + " and " + to_string(r.type()),
                            loc};
            }
            case BinaryOp::Add:
            case BinaryOp::Sub:
            case BinaryOp::Mul: {
                std::uint64_t a = expect_uint(l, "arithmetic operand", loc);
                std::uint64_t b = expect_uint(r, "arithmetic operand", loc);
                // uint arithmetic wraps mod 2^64
                std::uint64_t out = op == BinaryOp::Add ? a + b
                                    : op == BinaryOp::Sub ? a - b
                                                          : a * b;
                return Value(out);
            }
            case BinaryOp::And:
                return Value(expect_bool(l, "'&&' operand", loc) && expect_bool(r, "'&&' operand", loc));
            case BinaryOp::Or:
                return Value(expect_bool(l, "'||' operand", loc) || expect_bool(r, "'||' operand", loc));
        }
        throw Abort{Outcome::AbortedError, "bad operator", loc};
    }

    Flow run_block(const StmtList& body) {
        for (const auto& s : body) {
            if (std::holds_alternative<StartTx>(s.node) || std::holds_alternative<EndTx>(s.node))
                continue;  // directives, not executable statements
            charge(s.loc);
            Flow flow = run_stmt(s);
            if (flow == Flow::Returned) return flow;
        }
        return Flow::Next;
    }

    Flow run_stmt(const Stmt& s) {
        return std::visit(
            [&](const auto& n) -> Flow {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Assign>) {
                    Value v = eval(*n.value);
                    if (ast.has_attribute(n.target)) {
                        write_attr(n.target, std::move(v), s.loc);
                    } else {
                        locals[n.target] = std::move(v);
                    }
                    return Flow::Next;
                } else if constexpr (std::is_same_v<T, Requires>) {
                    Value v = eval(*n.cond);
                    if (!expect_bool(v, "requires condition", s.loc))
                        throw Abort{Outcome::AbortedRequires, print_expr(*n.cond), s.loc};
                    return Flow::Next;
                } else if constexpr (std::is_same_v<T, If>) {
                    Value v = eval(*n.cond);
                    if (expect_bool(v, "if condition", s.loc)) return run_block(n.then_body);
                    if (n.else_body) return run_block(*n.else_body);
                    return Flow::Next;
                } else if constexpr (std::is_same_v<T, Transfer>) {
                    Value rec = eval(*n.recipient);
                    if (rec.type() != PrimType::Address)
                        throw Abort{Outcome::AbortedError, "transfer recipient must be an address",
                                    s.loc};
                    std::uint64_t amount = expect_uint(eval(*n.amount), "transfer amount", s.loc);
                    if (working.balance < amount)
                        throw Abort{Outcome::AbortedError, "insufficient balance", s.loc};
                    working.balance -= amount;
                    res.transfers.emplace_back(rec.as_address(), amount);
                    return Flow::Next;
                } else if constexpr (std::is_same_v<T, ExternalQuery>) {
                    res.external_requests.push_back(
                        ExternalRequest{n.service, n.query, env.new_callback_id()});
                    return Flow::Next;
                } else if constexpr (std::is_same_v<T, Escrow>) {
                    // the stake is the caller's money, held by the chain, not
                    // part of the contract balance
                    std::string lock_id = lock_id_from_ctx(s.loc);
                    std::uint64_t amount = expect_uint(eval(*n.amount), "escrow amount", s.loc);
                    res.escrow_ops.push_back(
                        EscrowOp{EscrowOp::Kind::Deposit, lock_id, amount, ctx.sender});
                    return Flow::Next;
                } else if constexpr (std::is_same_v<T, EscrowRefund>) {
                    std::string lock_id = lock_id_from_ctx(s.loc);
                    auto amount = env.escrow_amount(Value(lock_id));
                    res.env_log.escrow_amount.push_back(amount);
                    if (!amount)
                        throw Abort{Outcome::AbortedError, "no escrow for lock '" + lock_id + "'",
                                    s.loc};
                    res.escrow_ops.push_back(EscrowOp{EscrowOp::Kind::Refund, lock_id, 0, {}});
                    return Flow::Next;
                } else if constexpr (std::is_same_v<T, EscrowForfeit>) {
                    std::string lock_id = lock_id_from_ctx(s.loc);
                    Value rec = eval(*n.recipient);
                    if (rec.type() != PrimType::Address)
                        throw Abort{Outcome::AbortedError,
                                    "escrow_forfeit recipient must be an address", s.loc};
                    auto amount = env.escrow_amount(Value(lock_id));
                    res.env_log.escrow_amount.push_back(amount);
                    if (!amount)
                        throw Abort{Outcome::AbortedError, "no escrow for lock '" + lock_id + "'",
                                    s.loc};
                    res.escrow_ops.push_back(
                        EscrowOp{EscrowOp::Kind::Forfeit, lock_id, 0, rec.as_address()});
                    return Flow::Next;
                } else if constexpr (std::is_same_v<T, LockRelease> ||
                                     std::is_same_v<T, LockForfeit>) {
                    Value id = eval(*n.lock_id);
                    if (id.type() != PrimType::String)
                        throw Abort{Outcome::AbortedError, "lock id must be a string", s.loc};
                    res.lock_ops.push_back(
                        LockOp{id.as_string(), std::is_same_v<T, LockForfeit>});
                    return Flow::Next;
                } else if constexpr (std::is_same_v<T, Return>) {
                    return Flow::Returned;
                } else {
                    return Flow::Next;  // markers never reach here
                }
            },
            s.node);
    }
};

}  // namespace

ExecResult execute(const ContractAst& ast, const std::string& fn, const ObjectState& state,
                   const CallContext& ctx, HostEnv& env) {
    const FunctionDecl* decl = ast.find_function(fn);
    if (!decl) throw UnknownFunctionError(fn);

    ExecResult res;
    ObjectState working = state;
    working.balance += ctx.value;  // call value lands in the contract

    Runner runner{ast, ctx, env, res, working, ctx.gas_budget, {}};
    try {
        // a call with no gas at all aborts before anything runs
        if (ctx.gas_budget == 0)
            throw Abort{Outcome::AbortedOutOfGas, "out of gas", decl->loc};
        for (const auto& p : decl->params) {
            auto it = ctx.data.find(p.name);
            if (it == ctx.data.end())
                throw Abort{Outcome::AbortedError, "missing argument '" + p.name + "'", decl->loc};
            if (it->second.type() != p.type)
                throw Abort{Outcome::AbortedError,
                            "argument '" + p.name + "' must be " + to_string(p.type), decl->loc};
            runner.locals[p.name] = it->second;
        }
        runner.run_block(decl->body);
        res.outcome = Outcome::Committed;
        res.new_state = std::move(working);
    } catch (const Abort& abort) {
        res.outcome = abort.outcome;
        res.detail = abort.detail;
        res.fail_loc = abort.loc;
        res.new_state = state;  // full rollback
        res.transfers.clear();
        res.external_requests.clear();
        res.escrow_ops.clear();
        res.lock_ops.clear();
    }
    return res;
}

ObjectState default_state(const ContractAst& ast) {
    ObjectState st;
    st.contract = ast.name;
    for (const auto& a : ast.attributes) st.attrs[a.name] = Value::default_of(a.type);
    return st;
}

std::vector<TraceOp> pre_write_reads(const std::vector<TraceOp>& trace) {
    std::set<std::string> written;
    std::vector<TraceOp> out;
    for (const auto& op : trace) {
        if (op.is_write) {
            written.insert(op.attr);
        } else if (!written.contains(op.attr)) {
            out.push_back(op);
        }
    }
    return out;
}

}  // namespace txsc
