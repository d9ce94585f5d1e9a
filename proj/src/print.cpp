#include "txsc/print.hpp"

#include <sstream>

namespace txsc {

namespace {

int precedence(const Expr& e) {
    if (const auto* b = std::get_if<Binary>(&e.node)) {
        switch (b->op) {
            case BinaryOp::Or: return 1;
            case BinaryOp::And: return 2;
            case BinaryOp::Eq:
            case BinaryOp::Ne: return 3;
            case BinaryOp::Lt:
            case BinaryOp::Gt: return 4;
            case BinaryOp::Add:
            case BinaryOp::Sub: return 5;
            case BinaryOp::Mul: return 6;
        }
    }
    if (std::holds_alternative<Unary>(e.node)) return 7;
    return 8;
}

void emit_expr(std::ostream& os, const Expr& e, int min_prec) {
    int prec = precedence(e);
    bool parens = prec < min_prec;
    if (parens) os << "(";
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, AttrRead> || std::is_same_v<T, LocalRead>) {
                os << n.name;
            } else if constexpr (std::is_same_v<T, ImplicitRead>) {
                switch (n.kind) {
                    case Implicit::MsgSender: os << "msg.sender"; break;
                    case Implicit::MsgValue: os << "msg.value"; break;
                    case Implicit::MsgData: os << "msg.data." << n.key; break;
                    case Implicit::BlockNumber: os << "block.number"; break;
                }
            } else if constexpr (std::is_same_v<T, Literal>) {
                os << to_display(n.value);
            } else if constexpr (std::is_same_v<T, Binary>) {
                // all binary operators associate left
                emit_expr(os, *n.lhs, prec);
                os << " " << to_string(n.op) << " ";
                emit_expr(os, *n.rhs, prec + 1);
            } else if constexpr (std::is_same_v<T, Unary>) {
                os << to_string(n.op);
                emit_expr(os, *n.operand, 7);
            } else if constexpr (std::is_same_v<T, HashCall>) {
                os << "sha256(";
                emit_expr(os, *n.arg, 0);
                os << ")";
            } else if constexpr (std::is_same_v<T, LockHeldCall>) {
                os << "lock_held(";
                emit_expr(os, *n.lock_id, 0);
                os << ")";
            } else {
                os << "oracle_address()";
            }
        },
        e.node);
    if (parens) os << ")";
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void emit_block(std::ostream& os, const StmtList& body, int indent);

void emit_stmt(std::ostream& os, const Stmt& s, int indent) {
    std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    os << pad;
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Assign>) {
                os << n.target << " = ";
                emit_expr(os, *n.value, 0);
                os << ";";
            } else if constexpr (std::is_same_v<T, Requires>) {
                os << "requires(";
                emit_expr(os, *n.cond, 0);
                os << ");";
            } else if constexpr (std::is_same_v<T, If>) {
                os << "if (";
                emit_expr(os, *n.cond, 0);
                os << ") {\n";
                emit_block(os, n.then_body, indent + 1);
                os << pad << "}";
                if (n.else_body) {
                    os << " else {\n";
                    emit_block(os, *n.else_body, indent + 1);
                    os << pad << "}";
                }
            } else if constexpr (std::is_same_v<T, Transfer>) {
                os << "transfer(";
                emit_expr(os, *n.recipient, 0);
                os << ", ";
                emit_expr(os, *n.amount, 0);
                os << ");";
            } else if constexpr (std::is_same_v<T, ExternalQuery>) {
                os << "external_query(" << quoted(n.service) << ", " << quoted(n.query) << ");";
            } else if constexpr (std::is_same_v<T, Return>) {
                os << "return;";
            } else if constexpr (std::is_same_v<T, StartTx>) {
                os << "start_tx;";
            } else if constexpr (std::is_same_v<T, EndTx>) {
                os << "end_tx;";
            } else if constexpr (std::is_same_v<T, Escrow>) {
                os << "escrow(";
                emit_expr(os, *n.amount, 0);
                os << ");";
            } else if constexpr (std::is_same_v<T, EscrowRefund>) {
                os << "escrow_refund();";
            } else if constexpr (std::is_same_v<T, EscrowForfeit>) {
                os << "escrow_forfeit(";
                emit_expr(os, *n.recipient, 0);
                os << ");";
            } else if constexpr (std::is_same_v<T, LockRelease>) {
                os << "lock_release(";
                emit_expr(os, *n.lock_id, 0);
                os << ");";
            } else {
                os << "lock_forfeit(";
                emit_expr(os, *n.lock_id, 0);
                os << ");";
            }
        },
        s.node);
    os << "\n";
}

void emit_block(std::ostream& os, const StmtList& body, int indent) {
    for (const auto& s : body) emit_stmt(os, s, indent);
}

}  // namespace

std::string print_expr(const Expr& e) {
    std::ostringstream os;
    emit_expr(os, e, 0);
    return os.str();
}

std::string print_stmt(const Stmt& s, int indent) {
    std::ostringstream os;
    emit_stmt(os, s, indent);
    std::string out = os.str();
    if (!out.empty() && out.back() == '\n') out.pop_back();
    return out;
}

std::string print_contract(const ContractAst& ast) {
    std::ostringstream os;
    os << "contract " << ast.name << " {\n";
    for (const auto& a : ast.attributes)
        os << "  attr " << to_string(a.type) << " " << a.name << ";\n";
    for (std::size_t i = 0; i < ast.functions.size(); ++i) {
        const auto& f = ast.functions[i];
        os << "\n";
        os << "  fn " << f.name << "(";
        for (std::size_t k = 0; k < f.params.size(); ++k) {
            if (k) os << ", ";
            os << to_string(f.params[k].type) << " " << f.params[k].name;
        }
        os << ") {\n";
        emit_block(os, f.body, 2);
        os << "  }\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace txsc
