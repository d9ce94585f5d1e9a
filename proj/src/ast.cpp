#include "txsc/ast.hpp"

namespace txsc {

std::string to_string(BinaryOp op) {
    switch (op) {
        case BinaryOp::Eq: return "==";
        case BinaryOp::Ne: return "!=";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::And: return "&&";
        case BinaryOp::Or: return "||";
    }
    return "?";
}

std::string to_string(UnaryOp op) { return op == UnaryOp::Not ? "!" : "?"; }

ExprPtr make_attr_read(std::string name, SourceLoc loc) {
    return std::make_unique<Expr>(Expr{loc, AttrRead{std::move(name)}});
}
ExprPtr make_local_read(std::string name, SourceLoc loc) {
    return std::make_unique<Expr>(Expr{loc, LocalRead{std::move(name)}});
}
ExprPtr make_implicit(Implicit kind, std::string key, SourceLoc loc) {
    return std::make_unique<Expr>(Expr{loc, ImplicitRead{kind, std::move(key)}});
}
ExprPtr make_literal(Value v, SourceLoc loc) {
    return std::make_unique<Expr>(Expr{loc, Literal{std::move(v)}});
}
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs, SourceLoc loc) {
    return std::make_unique<Expr>(Expr{loc, Binary{op, std::move(lhs), std::move(rhs)}});
}
ExprPtr make_unary(UnaryOp op, ExprPtr operand, SourceLoc loc) {
    return std::make_unique<Expr>(Expr{loc, Unary{op, std::move(operand)}});
}
ExprPtr make_hash(ExprPtr arg, SourceLoc loc) {
    return std::make_unique<Expr>(Expr{loc, HashCall{std::move(arg)}});
}
ExprPtr make_lock_held(ExprPtr lock_id, SourceLoc loc) {
    return std::make_unique<Expr>(Expr{loc, LockHeldCall{std::move(lock_id)}});
}
ExprPtr make_oracle_address(SourceLoc loc) {
    return std::make_unique<Expr>(Expr{loc, OracleAddressCall{}});
}

ExprPtr clone(const Expr& e) {
    ExprPtr out = std::visit(
        [&](const auto& n) -> ExprPtr {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, AttrRead>) {
                return make_attr_read(n.name, e.loc);
            } else if constexpr (std::is_same_v<T, LocalRead>) {
                return make_local_read(n.name, e.loc);
            } else if constexpr (std::is_same_v<T, ImplicitRead>) {
                return make_implicit(n.kind, n.key, e.loc);
            } else if constexpr (std::is_same_v<T, Literal>) {
                return make_literal(n.value, e.loc);
            } else if constexpr (std::is_same_v<T, Binary>) {
                return make_binary(n.op, clone(*n.lhs), clone(*n.rhs), e.loc);
            } else if constexpr (std::is_same_v<T, Unary>) {
                return make_unary(n.op, clone(*n.operand), e.loc);
            } else if constexpr (std::is_same_v<T, HashCall>) {
                return make_hash(clone(*n.arg), e.loc);
            } else if constexpr (std::is_same_v<T, LockHeldCall>) {
                return make_lock_held(clone(*n.lock_id), e.loc);
            } else {
                return make_oracle_address(e.loc);
            }
        },
        e.node);
    return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& na) -> bool {
            using T = std::decay_t<decltype(na)>;
            const auto& nb = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, AttrRead> || std::is_same_v<T, LocalRead>) {
                return na.name == nb.name;
            } else if constexpr (std::is_same_v<T, ImplicitRead>) {
                return na.kind == nb.kind && na.key == nb.key;
            } else if constexpr (std::is_same_v<T, Literal>) {
                return na.value == nb.value;
            } else if constexpr (std::is_same_v<T, Binary>) {
                return na.op == nb.op && structurally_equal(*na.lhs, *nb.lhs) &&
                       structurally_equal(*na.rhs, *nb.rhs);
            } else if constexpr (std::is_same_v<T, Unary>) {
                return na.op == nb.op && structurally_equal(*na.operand, *nb.operand);
            } else if constexpr (std::is_same_v<T, HashCall>) {
                return structurally_equal(*na.arg, *nb.arg);
            } else if constexpr (std::is_same_v<T, LockHeldCall>) {
                return structurally_equal(*na.lock_id, *nb.lock_id);
            } else {
                return true;
            }
        },
        a.node);
}

Stmt clone(const Stmt& s) {
    Stmt out;
    out.loc = s.loc;
    out.node = std::visit(
        [&](const auto& n) -> Stmt::Node {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Assign>) {
                return Assign{n.target, clone(*n.value)};
            } else if constexpr (std::is_same_v<T, Requires>) {
                return Requires{clone(*n.cond)};
            } else if constexpr (std::is_same_v<T, If>) {
                If copy{clone(*n.cond), clone(n.then_body), std::nullopt};
                if (n.else_body) copy.else_body = clone(*n.else_body);
                return copy;
            } else if constexpr (std::is_same_v<T, Transfer>) {
                return Transfer{clone(*n.recipient), clone(*n.amount)};
            } else if constexpr (std::is_same_v<T, ExternalQuery>) {
                return ExternalQuery{n.service, n.query};
            } else if constexpr (std::is_same_v<T, Escrow>) {
                return Escrow{clone(*n.amount)};
            } else if constexpr (std::is_same_v<T, EscrowForfeit>) {
                return EscrowForfeit{clone(*n.recipient)};
            } else if constexpr (std::is_same_v<T, LockRelease>) {
                return LockRelease{clone(*n.lock_id)};
            } else if constexpr (std::is_same_v<T, LockForfeit>) {
                return LockForfeit{clone(*n.lock_id)};
            } else {
                return n;  // Return, StartTx, EndTx, EscrowRefund
            }
        },
        s.node);
    return out;
}

StmtList clone(const StmtList& body) {
    StmtList out;
    out.reserve(body.size());
    for (const auto& s : body) out.push_back(clone(s));
    return out;
}

bool structurally_equal(const Stmt& a, const Stmt& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& na) -> bool {
            using T = std::decay_t<decltype(na)>;
            const auto& nb = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, Assign>) {
                return na.target == nb.target && structurally_equal(*na.value, *nb.value);
            } else if constexpr (std::is_same_v<T, Requires>) {
                return structurally_equal(*na.cond, *nb.cond);
            } else if constexpr (std::is_same_v<T, If>) {
                if (!structurally_equal(*na.cond, *nb.cond)) return false;
                if (!structurally_equal(na.then_body, nb.then_body)) return false;
                if (na.else_body.has_value() != nb.else_body.has_value()) return false;
                return !na.else_body || structurally_equal(*na.else_body, *nb.else_body);
            } else if constexpr (std::is_same_v<T, Transfer>) {
                return structurally_equal(*na.recipient, *nb.recipient) &&
                       structurally_equal(*na.amount, *nb.amount);
            } else if constexpr (std::is_same_v<T, ExternalQuery>) {
                return na.service == nb.service && na.query == nb.query;
            } else if constexpr (std::is_same_v<T, Escrow>) {
                return structurally_equal(*na.amount, *nb.amount);
            } else if constexpr (std::is_same_v<T, EscrowForfeit>) {
                return structurally_equal(*na.recipient, *nb.recipient);
            } else if constexpr (std::is_same_v<T, LockRelease>) {
                return structurally_equal(*na.lock_id, *nb.lock_id);
            } else if constexpr (std::is_same_v<T, LockForfeit>) {
                return structurally_equal(*na.lock_id, *nb.lock_id);
            } else {
                return true;
            }
        },
        a.node);
}

bool structurally_equal(const StmtList& a, const StmtList& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!structurally_equal(a[i], b[i])) return false;
    return true;
}

const AttributeDecl* ContractAst::find_attribute(const std::string& name) const {
    for (const auto& a : attributes)
        if (a.name == name) return &a;
    return nullptr;
}

const FunctionDecl* ContractAst::find_function(const std::string& name) const {
    for (const auto& f : functions)
        if (f.name == name) return &f;
    return nullptr;
}

ContractAst clone(const ContractAst& c) {
    ContractAst out;
    out.name = c.name;
    out.attributes = c.attributes;
    out.loc = c.loc;
    out.functions.reserve(c.functions.size());
    for (const auto& f : c.functions) {
        FunctionDecl fd;
        fd.name = f.name;
        fd.params = f.params;
        fd.body = clone(f.body);
        fd.transactional = f.transactional;
        fd.loc = f.loc;
        out.functions.push_back(std::move(fd));
    }
    return out;
}

bool structurally_equal(const ContractAst& a, const ContractAst& b) {
    if (a.name != b.name) return false;
    if (a.attributes.size() != b.attributes.size()) return false;
    for (std::size_t i = 0; i < a.attributes.size(); ++i) {
        if (a.attributes[i].name != b.attributes[i].name ||
            a.attributes[i].type != b.attributes[i].type)
            return false;
    }
    if (a.functions.size() != b.functions.size()) return false;
    for (std::size_t i = 0; i < a.functions.size(); ++i) {
        const auto& fa = a.functions[i];
        const auto& fb = b.functions[i];
        if (fa.name != fb.name || fa.transactional != fb.transactional) return false;
        if (fa.params.size() != fb.params.size()) return false;
        for (std::size_t k = 0; k < fa.params.size(); ++k)
            if (fa.params[k].name != fb.params[k].name || fa.params[k].type != fb.params[k].type)
                return false;
        if (!structurally_equal(fa.body, fb.body)) return false;
    }
    return true;
}

namespace {

Json loc_json(const SourceLoc& loc) { return Json{{"line", loc.line}, {"col", loc.col}}; }

Json expr_json(const Expr& e);

Json stmt_json(const Stmt& s);

Json body_json(const StmtList& body) {
    Json arr = Json::array();
    for (const auto& s : body) arr.push_back(stmt_json(s));
    return arr;
}

Json expr_json(const Expr& e) {
    Json j = Json::object();
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, AttrRead>) {
                j["expr"] = "attr";
                j["name"] = n.name;
            } else if constexpr (std::is_same_v<T, LocalRead>) {
                j["expr"] = "local";
                j["name"] = n.name;
            } else if constexpr (std::is_same_v<T, ImplicitRead>) {
                j["expr"] = "implicit";
                switch (n.kind) {
                    case Implicit::MsgSender: j["name"] = "msg.sender"; break;
                    case Implicit::MsgValue: j["name"] = "msg.value"; break;
                    case Implicit::MsgData: j["name"] = "msg.data." + n.key; break;
                    case Implicit::BlockNumber: j["name"] = "block.number"; break;
                }
            } else if constexpr (std::is_same_v<T, Literal>) {
                j["expr"] = "literal";
                j["value"] = n.value.to_json();
            } else if constexpr (std::is_same_v<T, Binary>) {
                j["expr"] = "binary";
                j["op"] = to_string(n.op);
                j["lhs"] = expr_json(*n.lhs);
                j["rhs"] = expr_json(*n.rhs);
            } else if constexpr (std::is_same_v<T, Unary>) {
                j["expr"] = "unary";
                j["op"] = to_string(n.op);
                j["operand"] = expr_json(*n.operand);
            } else if constexpr (std::is_same_v<T, HashCall>) {
                j["expr"] = "sha256";
                j["arg"] = expr_json(*n.arg);
            } else if constexpr (std::is_same_v<T, LockHeldCall>) {
                j["expr"] = "lock_held";
                j["arg"] = expr_json(*n.lock_id);
            } else {
                j["expr"] = "oracle_address";
            }
        },
        e.node);
    j["loc"] = loc_json(e.loc);
    return j;
}

Json stmt_json(const Stmt& s) {
    Json j = Json::object();
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Assign>) {
                j["stmt"] = "assign";
                j["target"] = n.target;
                j["value"] = expr_json(*n.value);
            } else if constexpr (std::is_same_v<T, Requires>) {
                j["stmt"] = "requires";
                j["cond"] = expr_json(*n.cond);
            } else if constexpr (std::is_same_v<T, If>) {
                j["stmt"] = "if";
                j["cond"] = expr_json(*n.cond);
                j["then"] = body_json(n.then_body);
                if (n.else_body) j["else"] = body_json(*n.else_body);
            } else if constexpr (std::is_same_v<T, Transfer>) {
                j["stmt"] = "transfer";
                j["to"] = expr_json(*n.recipient);
                j["amount"] = expr_json(*n.amount);
            } else if constexpr (std::is_same_v<T, ExternalQuery>) {
                j["stmt"] = "external_query";
                j["service"] = n.service;
                j["query"] = n.query;
            } else if constexpr (std::is_same_v<T, Return>) {
                j["stmt"] = "return";
            } else if constexpr (std::is_same_v<T, StartTx>) {
                j["stmt"] = "start_tx";
            } else if constexpr (std::is_same_v<T, EndTx>) {
                j["stmt"] = "end_tx";
            } else if constexpr (std::is_same_v<T, Escrow>) {
                j["stmt"] = "escrow";
                j["amount"] = expr_json(*n.amount);
            } else if constexpr (std::is_same_v<T, EscrowRefund>) {
                j["stmt"] = "escrow_refund";
            } else if constexpr (std::is_same_v<T, EscrowForfeit>) {
                j["stmt"] = "escrow_forfeit";
                j["recipient"] = expr_json(*n.recipient);
            } else if constexpr (std::is_same_v<T, LockRelease>) {
                j["stmt"] = "lock_release";
                j["lock_id"] = expr_json(*n.lock_id);
            } else {
                j["stmt"] = "lock_forfeit";
                j["lock_id"] = expr_json(*n.lock_id);
            }
        },
        s.node);
    j["loc"] = loc_json(s.loc);
    return j;
}

}  // namespace

Json ast_to_json(const ContractAst& c) {
    Json j = Json::object();
    j["contract"] = c.name;
    Json attrs = Json::array();
    for (const auto& a : c.attributes) {
        attrs.push_back(Json{{"name", a.name},
                             {"type", to_string(a.type)},
                             {"visibility", "public"},
                             {"loc", loc_json(a.loc)}});
    }
    j["attributes"] = attrs;
    Json fns = Json::array();
    for (const auto& f : c.functions) {
        Json fj = Json::object();
        fj["name"] = f.name;
        Json params = Json::array();
        for (const auto& p : f.params)
            params.push_back(Json{{"name", p.name}, {"type", to_string(p.type)}});
        fj["params"] = params;
        fj["transactional"] = f.transactional;
        fj["body"] = body_json(f.body);
        fj["loc"] = loc_json(f.loc);
        fns.push_back(fj);
    }
    j["functions"] = fns;
    return j;
}

}  // namespace txsc
