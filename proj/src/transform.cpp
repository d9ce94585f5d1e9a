#include "txsc/transform.hpp"

#include <algorithm>

#include "txsc/errors.hpp"
#include "txsc/toml.hpp"
#include "txsc/typecheck.hpp"

namespace txsc {

namespace {

const FunctionProfile& profile_of(const ProfileMap& profiles, const std::string& fn) {
    auto it = profiles.find(fn);
    if (it == profiles.end()) throw TransformError("missing profile for function '" + fn + "'");
    return it->second;
}

void validate_exclusions(const ContractAst& ast, const ProfileMap& profiles,
                         const TransformConfig& config) {
    for (const auto& [fn, excluded] : config.check_exclusions) {
        if (!ast.find_function(fn))
            throw TransformError("check exclusion names unknown function '" + fn + "'");
        const auto& p = profile_of(profiles, fn);
        for (const auto& attr : excluded) {
            if (!p.read_set.contains(attr))
                throw TransformError("excluded attribute '" + attr + "' is not in the read set of '" +
                                     fn + "'");
        }
    }
}

// Contracts still carrying transaction markers may not use generated names.
void validate_reserved_names(const ContractAst& ast) {
    bool any_marked = std::any_of(ast.functions.begin(), ast.functions.end(),
                                  [](const FunctionDecl& f) { return f.transactional; });
    if (!any_marked) return;
    for (const auto& a : ast.attributes) {
        if (a.name.starts_with(kGeneratedPrefix))
            throw TransformError("attribute '" + a.name + "' uses the reserved '" +
                                 kGeneratedPrefix + "' prefix");
    }
}

StmtList strip_markers(const StmtList& body) {
    StmtList out;
    for (const auto& s : body) {
        if (std::holds_alternative<StartTx>(s.node) || std::holds_alternative<EndTx>(s.node))
            continue;
        out.push_back(clone(s));
    }
    return out;
}

Stmt freshness_check(const std::string& attr) {
    Stmt s;
    s.node = Requires{make_binary(BinaryOp::Eq, make_attr_read(attr),
                                  make_implicit(Implicit::MsgData, attr))};
    return s;
}

Stmt assign_stmt(const std::string& target, ExprPtr value) {
    Stmt s;
    s.node = Assign{target, std::move(value)};
    return s;
}

std::string shadow_name(const std::string& attr) { return kAfterImagePrefix + attr; }

// Rewrites reads and writes of the staged attributes to their shadows.
ExprPtr redirect_expr(const Expr& e, const std::set<std::string>& staged) {
    ExprPtr out = clone(e);
    if (auto* ar = std::get_if<AttrRead>(&out->node)) {
        if (staged.contains(ar->name)) ar->name = shadow_name(ar->name);
        return out;
    }
    if (auto* b = std::get_if<Binary>(&out->node)) {
        b->lhs = redirect_expr(*b->lhs, staged);
        b->rhs = redirect_expr(*b->rhs, staged);
    } else if (auto* u = std::get_if<Unary>(&out->node)) {
        u->operand = redirect_expr(*u->operand, staged);
    } else if (auto* h = std::get_if<HashCall>(&out->node)) {
        h->arg = redirect_expr(*h->arg, staged);
    } else if (auto* lh = std::get_if<LockHeldCall>(&out->node)) {
        lh->lock_id = redirect_expr(*lh->lock_id, staged);
    }
    return out;
}

StmtList redirect_block(const StmtList& body, const std::set<std::string>& staged) {
    StmtList out;
    for (const auto& s : body) {
        Stmt ns = clone(s);
        std::visit(
            [&](auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Assign>) {
                    n.value = redirect_expr(*n.value, staged);
                    if (staged.contains(n.target)) n.target = shadow_name(n.target);
                } else if constexpr (std::is_same_v<T, Requires>) {
                    n.cond = redirect_expr(*n.cond, staged);
                } else if constexpr (std::is_same_v<T, If>) {
                    n.cond = redirect_expr(*n.cond, staged);
                    n.then_body = redirect_block(n.then_body, staged);
                    if (n.else_body) n.else_body = redirect_block(*n.else_body, staged);
                } else if constexpr (std::is_same_v<T, Transfer>) {
                    n.recipient = redirect_expr(*n.recipient, staged);
                    n.amount = redirect_expr(*n.amount, staged);
                } else if constexpr (std::is_same_v<T, Escrow>) {
                    n.amount = redirect_expr(*n.amount, staged);
                } else if constexpr (std::is_same_v<T, EscrowForfeit>) {
                    n.recipient = redirect_expr(*n.recipient, staged);
                } else if constexpr (std::is_same_v<T, LockRelease>) {
                    n.lock_id = redirect_expr(*n.lock_id, staged);
                } else if constexpr (std::is_same_v<T, LockForfeit>) {
                    n.lock_id = redirect_expr(*n.lock_id, staged);
                }
            },
            ns.node);
        out.push_back(std::move(ns));
    }
    return out;
}

FunctionTransform& report_entry(TransformReport* report, const std::string& fn) {
    static FunctionTransform scratch;
    if (!report) {
        scratch = FunctionTransform{};
        return scratch;
    }
    for (auto& e : report->per_function)
        if (e.function == fn) return e;
    report->per_function.push_back(FunctionTransform{fn, {}, {}, 0, 0, 0});
    return report->per_function.back();
}

ExprPtr msg_data_lock_id() { return make_implicit(Implicit::MsgData, "lock_id"); }

}  // namespace

ContractAst transform_sdtf(const ContractAst& ast, const ProfileMap& profiles,
                           const TransformConfig& config, TransformReport* report) {
    validate_reserved_names(ast);
    validate_exclusions(ast, profiles, config);
    ContractAst out = clone(ast);
    for (auto& f : out.functions) {
        const auto& p = profile_of(profiles, f.name);
        if (p.classification != Classification::SDTF) continue;

        std::vector<std::string> checks = client_checkset(ast, p);
        if (auto it = config.check_exclusions.find(f.name); it != config.check_exclusions.end()) {
            std::erase_if(checks, [&](const std::string& a) { return it->second.contains(a); });
        }

        StmtList body;
        for (const auto& a : checks) body.push_back(freshness_check(a));
        StmtList rest = strip_markers(f.body);
        for (auto& s : rest) body.push_back(std::move(s));
        f.body = std::move(body);
        f.transactional = false;

        auto& entry = report_entry(report, f.name);
        entry.injected_checks = checks;
        entry.generated_statements += static_cast<int>(checks.size());
    }
    return out;
}

ContractAst transform_cdtf(const ContractAst& ast, const ProfileMap& profiles,
                           const TransformConfig& config, TransformReport* report) {
    validate_reserved_names(ast);

    std::vector<std::string> entry_fns;
    for (const auto& f : ast.functions) {
        const auto& p = profile_of(profiles, f.name);
        if (p.classification == Classification::CDTF && !p.external_calls.empty())
            entry_fns.push_back(f.name);
    }
    bool any_cdtf = std::any_of(ast.functions.begin(), ast.functions.end(), [&](const auto& f) {
        return profile_of(profiles, f.name).classification == Classification::CDTF;
    });
    if (!any_cdtf) return clone(ast);

    std::optional<std::string> callback = callback_target(profiles);
    if (!entry_fns.empty() && !callback)
        throw TransformError(
            "no callback designated for cross-domain function (expected a function starting with "
            "requires(msg.sender == oracle_address()))");

    // Every attribute an entry function writes is staged in a shadow and only
    // copied to the real attribute when the callback commits.
    std::set<std::string> staged;
    for (const auto& fn : entry_fns) {
        const auto& ws = profile_of(profiles, fn).write_set;
        staged.insert(ws.begin(), ws.end());
    }
    std::vector<std::string> staged_ordered;
    for (const auto& a : ast.attributes)
        if (staged.contains(a.name)) staged_ordered.push_back(a.name);

    if (!staged.empty()) {
        if (!ast.find_attribute("owner") ||
            ast.find_attribute("owner")->type != PrimType::Address)
            throw TransformError(
                "cross-domain transform needs an 'owner' address attribute for escrow recovery");
        if (ast.find_function("owner_recover"))
            throw TransformError("contract already defines owner_recover");
    }

    ContractAst out = clone(ast);

    for (auto& f : out.functions) {
        const auto& p = profile_of(profiles, f.name);
        bool is_entry =
            p.classification == Classification::CDTF && !p.external_calls.empty();
        bool is_callback = callback && f.name == *callback;

        if (is_entry) {
            auto& entry = report_entry(report, f.name);
            std::vector<std::string> own_staged;
            for (const auto& a : ast.attributes)
                if (p.write_set.contains(a.name)) own_staged.push_back(a.name);

            StmtList body;
            Stmt lock_check;
            lock_check.node = Requires{make_lock_held(msg_data_lock_id())};
            body.push_back(std::move(lock_check));
            Stmt deposit;
            deposit.node = Escrow{make_literal(Value(config.deposit_amount))};
            body.push_back(std::move(deposit));
            for (const auto& a : own_staged)
                body.push_back(assign_stmt(shadow_name(a), make_attr_read(a)));

            StmtList rest = redirect_block(strip_markers(f.body), p.write_set);
            for (auto& s : rest) body.push_back(std::move(s));
            f.body = std::move(body);
            f.transactional = false;

            entry.lock_checks += 1;
            entry.escrows += 1;
            entry.generated_statements += 2 + static_cast<int>(own_staged.size());
        } else if (is_callback) {
            auto& entry = report_entry(report, f.name);
            StmtList original = strip_markers(f.body);
            StmtList body;
            std::size_t i = 0;
            if (!original.empty()) body.push_back(std::move(original[i++]));  // designation check
            for (const auto& a : staged_ordered)
                body.push_back(assign_stmt(a, make_attr_read(shadow_name(a))));
            for (; i < original.size(); ++i) body.push_back(std::move(original[i]));
            Stmt release;
            release.node = LockRelease{msg_data_lock_id()};
            body.push_back(std::move(release));
            Stmt refund;
            refund.node = EscrowRefund{};
            body.push_back(std::move(refund));
            f.body = std::move(body);
            f.transactional = false;

            entry.generated_statements += static_cast<int>(staged_ordered.size()) + 2;
        } else if (p.classification == Classification::CDTF) {
            // a marked callback target with no external calls of its own
            f.body = strip_markers(f.body);
            f.transactional = false;
        }
    }

    for (const auto& a : staged_ordered) {
        AttributeDecl shadow;
        shadow.name = shadow_name(a);
        shadow.type = ast.find_attribute(a)->type;
        out.attributes.push_back(shadow);
        report_entry(report, entry_fns.front()).generated_shadow_attrs.push_back(shadow.name);
    }

    if (!staged_ordered.empty()) {
        FunctionDecl recover;
        recover.name = "owner_recover";
        Stmt owner_check;
        owner_check.node = Requires{
            make_binary(BinaryOp::Eq, make_implicit(Implicit::MsgSender), make_attr_read("owner"))};
        recover.body.push_back(std::move(owner_check));
        for (const auto& a : staged_ordered)
            recover.body.push_back(assign_stmt(shadow_name(a), make_attr_read(a)));
        Stmt forfeit;
        forfeit.node = EscrowForfeit{make_attr_read("owner")};
        recover.body.push_back(std::move(forfeit));
        Stmt lock_forfeit;
        lock_forfeit.node = LockForfeit{msg_data_lock_id()};
        recover.body.push_back(std::move(lock_forfeit));
        auto& entry = report_entry(report, recover.name);
        entry.generated_statements += static_cast<int>(recover.body.size());
        out.functions.push_back(std::move(recover));
    }

    return out;
}

std::pair<ContractAst, TransformReport> transform(const ContractAst& ast,
                                                  const ProfileMap& profiles,
                                                  const TransformConfig& config) {
    TransformReport report;
    ContractAst pass1 = transform_sdtf(ast, profiles, config, &report);
    ContractAst pass2 = transform_cdtf(pass1, profiles, config, &report);
    auto diags = typecheck(pass2);
    if (!diags.empty())
        throw TransformError("transformed contract does not typecheck: " + diags.front().str());
    return {std::move(pass2), std::move(report)};
}

TransformConfig TransformConfig::from_toml(const std::string& toml_text) {
    Json doc = toml::parse(toml_text);
    TransformConfig config;
    if (doc.contains("deposit_amount")) {
        if (!doc["deposit_amount"].is_number_unsigned())
            throw ConfigError("deposit_amount must be a non-negative integer");
        config.deposit_amount = doc["deposit_amount"].get<std::uint64_t>();
    }
    if (doc.contains("lock_chain")) config.lock_chain_id = doc["lock_chain"].get<std::string>();
    if (doc.contains("exclusions")) {
        for (const auto& [fn, arr] : doc["exclusions"].items()) {
            if (!arr.is_array()) throw ConfigError("exclusions entries must be arrays");
            for (const auto& a : arr) config.check_exclusions[fn].insert(a.get<std::string>());
        }
    }
    return config;
}

TransformConfig TransformConfig::restricted_to(const ContractAst& ast) const {
    TransformConfig out = *this;
    std::erase_if(out.check_exclusions,
                  [&](const auto& entry) { return ast.find_function(entry.first) == nullptr; });
    return out;
}

Json TransformReport::to_json() const {
    Json arr = Json::array();
    for (const auto& e : per_function) {
        arr.push_back(Json{{"function", e.function},
                           {"injectedChecks", e.injected_checks},
                           {"generatedShadowAttrs", e.generated_shadow_attrs},
                           {"lockChecks", e.lock_checks},
                           {"escrows", e.escrows},
                           {"generatedStatements", e.generated_statements}});
    }
    return Json{{"perFunction", arr}};
}

int TransformReport::total_injected_checks() const {
    int n = 0;
    for (const auto& e : per_function) n += static_cast<int>(e.injected_checks.size());
    return n;
}

int TransformReport::total_shadow_attrs() const {
    int n = 0;
    for (const auto& e : per_function) n += static_cast<int>(e.generated_shadow_attrs.size());
    return n;
}

}  // namespace txsc
