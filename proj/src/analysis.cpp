#include "txsc/analysis.hpp"

#include <algorithm>

#include "txsc/errors.hpp"

namespace txsc {

std::string to_string(Classification c) {
    switch (c) {
        case Classification::SDTF: return "SDTF";
        case Classification::CDTF: return "CDTF";
        case Classification::NonTransactional: return "NonTransactional";
    }
    return "?";
}

namespace {

struct Walker {
    const ContractAst& ast;
    FunctionProfile& profile;

    void read_expr(const Expr& e, const std::set<std::string>& written) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, AttrRead>) {
                    if (!written.contains(n.name)) profile.read_set.insert(n.name);
                } else if constexpr (std::is_same_v<T, Binary>) {
                    read_expr(*n.lhs, written);
                    read_expr(*n.rhs, written);
                } else if constexpr (std::is_same_v<T, Unary>) {
                    read_expr(*n.operand, written);
                } else if constexpr (std::is_same_v<T, HashCall>) {
                    read_expr(*n.arg, written);
                } else if constexpr (std::is_same_v<T, LockHeldCall>) {
                    read_expr(*n.lock_id, written);
                }
            },
            e.node);
    }

    // Returns the attributes definitely written on every path through `body`,
    // starting from `written`. Read/write/external sets accumulate as a
    // union over all paths.
    std::set<std::string> walk(const StmtList& body, std::set<std::string> written) {
        for (const auto& s : body) {
            std::visit(
                [&](const auto& n) {
                    using T = std::decay_t<decltype(n)>;
                    if constexpr (std::is_same_v<T, Assign>) {
                        read_expr(*n.value, written);
                        if (ast.has_attribute(n.target)) {
                            profile.write_set.insert(n.target);
                            written.insert(n.target);
                        }
                    } else if constexpr (std::is_same_v<T, Requires>) {
                        read_expr(*n.cond, written);
                    } else if constexpr (std::is_same_v<T, If>) {
                        read_expr(*n.cond, written);
                        std::set<std::string> then_written = walk(n.then_body, written);
                        std::set<std::string> else_written =
                            n.else_body ? walk(*n.else_body, written) : written;
                        std::set<std::string> both;
                        std::set_intersection(then_written.begin(), then_written.end(),
                                              else_written.begin(), else_written.end(),
                                              std::inserter(both, both.begin()));
                        written = std::move(both);
                    } else if constexpr (std::is_same_v<T, Transfer>) {
                        // reads the amount (and recipient) attributes; the
                        // balance side effect is not an attribute write
                        read_expr(*n.recipient, written);
                        read_expr(*n.amount, written);
                    } else if constexpr (std::is_same_v<T, ExternalQuery>) {
                        profile.external_calls.insert(n.service);
                    } else if constexpr (std::is_same_v<T, Escrow>) {
                        read_expr(*n.amount, written);
                    } else if constexpr (std::is_same_v<T, EscrowForfeit>) {
                        read_expr(*n.recipient, written);
                    } else if constexpr (std::is_same_v<T, LockRelease>) {
                        read_expr(*n.lock_id, written);
                    } else if constexpr (std::is_same_v<T, LockForfeit>) {
                        read_expr(*n.lock_id, written);
                    } else {
                        // Return, StartTx, EndTx, EscrowRefund: no attribute access
                    }
                },
                s.node);
        }
        return written;
    }
};

// Callback designation: first statement (markers aside) is
// requires(msg.sender == oracle_address()), in either operand order.
bool designates_callback(const FunctionDecl& f) {
    for (const auto& s : f.body) {
        if (std::holds_alternative<StartTx>(s.node)) continue;
        const auto* req = std::get_if<Requires>(&s.node);
        if (!req) return false;
        const auto* cmp = std::get_if<Binary>(&req->cond->node);
        if (!cmp || cmp->op != BinaryOp::Eq) return false;
        auto is_sender = [](const Expr& e) {
            const auto* imp = std::get_if<ImplicitRead>(&e.node);
            return imp && imp->kind == Implicit::MsgSender;
        };
        auto is_oracle = [](const Expr& e) {
            return std::holds_alternative<OracleAddressCall>(e.node);
        };
        return (is_sender(*cmp->lhs) && is_oracle(*cmp->rhs)) ||
               (is_oracle(*cmp->lhs) && is_sender(*cmp->rhs));
    }
    return false;
}

}  // namespace

ProfileMap analyze(const ContractAst& ast) {
    ProfileMap out;
    for (const auto& f : ast.functions) {
        FunctionProfile p;
        p.function = f.name;
        Walker walker{ast, p};
        walker.walk(f.body, {});
        p.is_callback_target = designates_callback(f);
        p.triggers_callback = !p.external_calls.empty() || p.is_callback_target;
        if (!f.transactional) {
            p.classification = Classification::NonTransactional;
        } else {
            if (p.write_set.empty())
                throw AnalysisError("transactional function '" + f.name +
                                    "' updates no attribute");
            p.classification = (!p.external_calls.empty() || p.triggers_callback)
                                   ? Classification::CDTF
                                   : Classification::SDTF;
        }
        out.emplace(f.name, std::move(p));
    }
    return out;
}

std::vector<std::string> client_checkset(const ContractAst& ast, const FunctionProfile& profile) {
    if (profile.classification != Classification::SDTF)
        throw AnalysisError("client_checkset: '" + profile.function + "' is not an SDTF (" +
                            to_string(profile.classification) + ")");
    std::vector<std::string> out;
    for (const auto& a : ast.attributes)
        if (profile.read_set.contains(a.name)) out.push_back(a.name);
    return out;
}

std::optional<std::string> callback_target(const ProfileMap& profiles) {
    // contracts in this DSL have at most one designated callback; take the
    // first in name order for determinism
    for (const auto& [name, p] : profiles)
        if (p.is_callback_target) return name;
    return std::nullopt;
}

std::set<std::string> lock_cover_set(const ContractAst& ast, const ProfileMap& profiles,
                                     const std::string& fn) {
    auto it = profiles.find(fn);
    if (it == profiles.end()) throw UnknownFunctionError(fn);
    std::set<std::string> cover;
    auto add = [&](const FunctionProfile& p) {
        cover.insert(p.read_set.begin(), p.read_set.end());
        cover.insert(p.write_set.begin(), p.write_set.end());
    };
    add(it->second);
    if (!it->second.external_calls.empty()) {
        if (auto cb = callback_target(profiles)) add(profiles.at(*cb));
    }
    std::erase_if(cover, [](const std::string& a) { return a.starts_with(kGeneratedPrefix); });
    (void)ast;
    return cover;
}

Json profiles_to_json(const ContractAst& ast, const ProfileMap& profiles) {
    auto decl_ordered = [&](const std::set<std::string>& names) {
        Json arr = Json::array();
        for (const auto& a : ast.attributes)
            if (names.contains(a.name)) arr.push_back(a.name);
        return arr;
    };
    Json arr = Json::array();
    for (const auto& f : ast.functions) {
        const auto& p = profiles.at(f.name);
        arr.push_back(Json{{"function", p.function},
                           {"readSet", decl_ordered(p.read_set)},
                           {"writeSet", decl_ordered(p.write_set)},
                           {"classification", to_string(p.classification)}});
    }
    return arr;
}

}  // namespace txsc
