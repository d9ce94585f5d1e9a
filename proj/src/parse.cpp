#include "txsc/parse.hpp"

#include <cctype>
#include <set>

#include "txsc/errors.hpp"

namespace txsc {

namespace {

struct Token {
    enum class Type { Ident, Number, StringLit, HexLit, Punct, End };
    Type type = Type::End;
    std::string text;
    std::uint64_t num = 0;
    SourceLoc loc;

    std::string describe() const {
        switch (type) {
            case Type::Ident: return "identifier '" + text + "'";
            case Type::Number: return "number " + text;
            case Type::StringLit: return "string literal";
            case Type::HexLit: return "bytes32 literal";
            case Type::Punct: return "'" + text + "'";
            case Type::End: return "end of input";
        }
        return "?";
    }
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_ws();
        Token t;
        t.loc = loc();
        if (pos_ >= src_.size()) {
            t.type = Token::Type::End;
            return t;
        }
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                advance();
            t.type = Token::Type::Ident;
            t.text = std::string(src_.substr(start, pos_ - start));
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            // 0x... is a bytes32 literal, otherwise a decimal uint
            if (c == '0' && pos_ + 1 < src_.size() && (src_[pos_ + 1] == 'x' || src_[pos_ + 1] == 'X')) {
                std::size_t start = pos_;
                advance();
                advance();
                while (pos_ < src_.size() &&
                       std::isxdigit(static_cast<unsigned char>(src_[pos_])))
                    advance();
                t.type = Token::Type::HexLit;
                t.text = std::string(src_.substr(start, pos_ - start));
                return t;
            }
            std::size_t start = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                advance();
            t.type = Token::Type::Number;
            t.text = std::string(src_.substr(start, pos_ - start));
            try {
                t.num = std::stoull(t.text);
            } catch (const std::exception&) {
                throw SyntaxError(t.loc, "uint literal within 64 bits", t.text);
            }
            return t;
        }
        if (c == '"') {
            advance();
            std::string out;
            while (pos_ < src_.size() && src_[pos_] != '"') {
                char d = src_[pos_];
                if (d == '\\' && pos_ + 1 < src_.size()) {
                    advance();
                    char e = src_[pos_];
                    if (e == 'n') out.push_back('\n');
                    else if (e == 't') out.push_back('\t');
                    else out.push_back(e);  // \" and \\ and anything else verbatim
                } else if (d == '\n') {
                    throw SyntaxError(t.loc, "closing '\"' on the same line", "newline");
                } else {
                    out.push_back(d);
                }
                advance();
            }
            if (pos_ >= src_.size()) throw SyntaxError(t.loc, "closing '\"'", "end of input");
            advance();
            t.type = Token::Type::StringLit;
            t.text = out;
            return t;
        }
        // multi-char operators first
        for (const char* op : {"==", "!=", "&&", "||"}) {
            if (src_.substr(pos_).starts_with(op)) {
                advance();
                advance();
                t.type = Token::Type::Punct;
                t.text = op;
                return t;
            }
        }
        static const std::string singles = "<>+-*!=(){};,.";
        if (singles.find(c) != std::string::npos) {
            advance();
            t.type = Token::Type::Punct;
            t.text = std::string(1, c);
            return t;
        }
        throw SyntaxError(t.loc, "token", std::string(1, c));
    }

private:
    void skip_ws() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else {
                break;
            }
        }
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    SourceLoc loc() const { return SourceLoc{line_, col_}; }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    explicit Parser(std::string_view src) : lex_(src) { cur_ = lex_.next(); }

    ContractAst parse() {
        ContractAst c;
        c.loc = cur_.loc;
        expect_ident("contract");
        c.name = expect_any_ident("contract name");
        expect_punct("{");
        std::set<std::string> attr_names;
        while (is_ident("attr")) {
            AttributeDecl a = parse_attr();
            if (!attr_names.insert(a.name).second)
                throw DuplicateNameError(a.loc, a.name, "attribute");
            c.attributes.push_back(a);
        }
        attrs_ = &c.attributes;
        std::set<std::string> fn_names;
        while (is_ident("fn")) {
            FunctionDecl f = parse_fn();
            if (!fn_names.insert(f.name).second) throw DuplicateNameError(f.loc, f.name, "function");
            c.functions.push_back(std::move(f));
        }
        expect_punct("}");
        if (cur_.type != Token::Type::End)
            throw SyntaxError(cur_.loc, "end of input", cur_.describe());
        return c;
    }

private:
    AttributeDecl parse_attr() {
        AttributeDecl a;
        a.loc = cur_.loc;
        expect_ident("attr");
        a.type = parse_type();
        a.name = expect_any_ident("attribute name");
        expect_punct(";");
        return a;
    }

    PrimType parse_type() {
        Token t = cur_;
        std::string name = expect_any_ident("type name");
        auto pt = prim_type_from_string(name);
        if (!pt) throw SyntaxError(t.loc, "one of address, bool, uint, bytes32, string", name);
        return *pt;
    }

    FunctionDecl parse_fn() {
        FunctionDecl f;
        f.loc = cur_.loc;
        expect_ident("fn");
        f.name = expect_any_ident("function name");
        expect_punct("(");
        std::set<std::string> param_names;
        if (!is_punct(")")) {
            while (true) {
                Param p;
                p.type = parse_type();
                Token nt = cur_;
                p.name = expect_any_ident("parameter name");
                if (!param_names.insert(p.name).second)
                    throw DuplicateNameError(nt.loc, p.name, "parameter");
                f.params.push_back(p);
                if (is_punct(",")) {
                    eat();
                    continue;
                }
                break;
            }
        }
        expect_punct(")");
        query_count_ = 0;
        f.body = parse_block();
        validate_markers(f);
        return f;
    }

    StmtList parse_block() {
        expect_punct("{");
        StmtList body;
        while (!is_punct("}")) body.push_back(parse_stmt());
        expect_punct("}");
        return body;
    }

    Stmt parse_stmt() {
        Stmt s;
        s.loc = cur_.loc;
        if (is_ident("start_tx")) {
            eat();
            expect_punct(";");
            s.node = StartTx{};
        } else if (is_ident("end_tx")) {
            eat();
            expect_punct(";");
            s.node = EndTx{};
        } else if (is_ident("requires")) {
            eat();
            expect_punct("(");
            ExprPtr cond = parse_expr();
            expect_punct(")");
            expect_punct(";");
            s.node = Requires{std::move(cond)};
        } else if (is_ident("transfer")) {
            eat();
            expect_punct("(");
            ExprPtr to = parse_expr();
            expect_punct(",");
            ExprPtr amount = parse_expr();
            expect_punct(")");
            expect_punct(";");
            s.node = Transfer{std::move(to), std::move(amount)};
        } else if (is_ident("external_query")) {
            if (++query_count_ > 1)
                throw SyntaxError(s.loc, "at most one external_query per function", "a second one");
            eat();
            expect_punct("(");
            std::string service = expect_string("service name");
            expect_punct(",");
            std::string query = expect_string("query text");
            expect_punct(")");
            expect_punct(";");
            s.node = ExternalQuery{service, query};
        } else if (is_ident("escrow")) {
            eat();
            expect_punct("(");
            ExprPtr amount = parse_expr();
            expect_punct(")");
            expect_punct(";");
            s.node = Escrow{std::move(amount)};
        } else if (is_ident("escrow_refund")) {
            eat();
            expect_punct("(");
            expect_punct(")");
            expect_punct(";");
            s.node = EscrowRefund{};
        } else if (is_ident("escrow_forfeit")) {
            eat();
            expect_punct("(");
            ExprPtr rec = parse_expr();
            expect_punct(")");
            expect_punct(";");
            s.node = EscrowForfeit{std::move(rec)};
        } else if (is_ident("lock_release")) {
            eat();
            expect_punct("(");
            ExprPtr id = parse_expr();
            expect_punct(")");
            expect_punct(";");
            s.node = LockRelease{std::move(id)};
        } else if (is_ident("lock_forfeit")) {
            eat();
            expect_punct("(");
            ExprPtr id = parse_expr();
            expect_punct(")");
            expect_punct(";");
            s.node = LockForfeit{std::move(id)};
        } else if (is_ident("return")) {
            eat();
            expect_punct(";");
            s.node = Return{};
        } else if (is_ident("if")) {
            eat();
            expect_punct("(");
            ExprPtr cond = parse_expr();
            expect_punct(")");
            StmtList then_body = parse_block();
            std::optional<StmtList> else_body;
            if (is_ident("else")) {
                eat();
                else_body = parse_block();
            }
            s.node = If{std::move(cond), std::move(then_body), std::move(else_body)};
        } else if (cur_.type == Token::Type::Ident) {
            std::string target = cur_.text;
            eat();
            expect_punct("=");
            ExprPtr value = parse_expr();
            expect_punct(";");
            s.node = Assign{target, std::move(value)};
        } else {
            throw SyntaxError(s.loc, "statement", cur_.describe());
        }
        return s;
    }

    // Precedence, loosest first: || < && < == != < < > < + - < * < unary !
    ExprPtr parse_expr() { return parse_or(); }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (is_punct("||")) {
            SourceLoc loc = cur_.loc;
            eat();
            lhs = make_binary(BinaryOp::Or, std::move(lhs), parse_and(), loc);
        }
        return lhs;
    }

    ExprPtr parse_and() {
        ExprPtr lhs = parse_eq();
        while (is_punct("&&")) {
            SourceLoc loc = cur_.loc;
            eat();
            lhs = make_binary(BinaryOp::And, std::move(lhs), parse_eq(), loc);
        }
        return lhs;
    }

    ExprPtr parse_eq() {
        ExprPtr lhs = parse_rel();
        while (is_punct("==") || is_punct("!=")) {
            BinaryOp op = is_punct("==") ? BinaryOp::Eq : BinaryOp::Ne;
            SourceLoc loc = cur_.loc;
            eat();
            lhs = make_binary(op, std::move(lhs), parse_rel(), loc);
        }
        return lhs;
    }

    ExprPtr parse_rel() {
        ExprPtr lhs = parse_add();
        while (is_punct("<") || is_punct(">")) {
            BinaryOp op = is_punct("<") ? BinaryOp::Lt : BinaryOp::Gt;
            SourceLoc loc = cur_.loc;
            eat();
            lhs = make_binary(op, std::move(lhs), parse_add(), loc);
        }
        return lhs;
    }

    ExprPtr parse_add() {
        ExprPtr lhs = parse_mul();
        while (is_punct("+") || is_punct("-")) {
            BinaryOp op = is_punct("+") ? BinaryOp::Add : BinaryOp::Sub;
            SourceLoc loc = cur_.loc;
            eat();
            lhs = make_binary(op, std::move(lhs), parse_mul(), loc);
        }
        return lhs;
    }

    ExprPtr parse_mul() {
        ExprPtr lhs = parse_unary();
        while (is_punct("*")) {
            SourceLoc loc = cur_.loc;
            eat();
            lhs = make_binary(BinaryOp::Mul, std::move(lhs), parse_unary(), loc);
        }
        return lhs;
    }

    ExprPtr parse_unary() {
        if (is_punct("!")) {
            SourceLoc loc = cur_.loc;
            eat();
            return make_unary(UnaryOp::Not, parse_unary(), loc);
        }
        return parse_primary();
    }

    ExprPtr parse_primary() {
        SourceLoc loc = cur_.loc;
        if (is_punct("(")) {
            eat();
            ExprPtr inner = parse_expr();
            expect_punct(")");
            return inner;
        }
        if (cur_.type == Token::Type::Number) {
            std::uint64_t v = cur_.num;
            eat();
            return make_literal(Value(v), loc);
        }
        if (cur_.type == Token::Type::HexLit) {
            Bytes32 h = Bytes32::from_hex(cur_.text);  // throws on wrong width
            eat();
            return make_literal(Value(h), loc);
        }
        if (cur_.type == Token::Type::StringLit) {
            std::string s = cur_.text;
            eat();
            return make_literal(Value(std::move(s)), loc);
        }
        if (cur_.type != Token::Type::Ident)
            throw SyntaxError(loc, "expression", cur_.describe());

        std::string name = cur_.text;
        if (name == "true" || name == "false") {
            eat();
            return make_literal(Value(name == "true"), loc);
        }
        if (name == "sha256") {
            eat();
            expect_punct("(");
            ExprPtr arg = parse_expr();
            expect_punct(")");
            return make_hash(std::move(arg), loc);
        }
        if (name == "lock_held") {
            eat();
            expect_punct("(");
            ExprPtr arg = parse_expr();
            expect_punct(")");
            return make_lock_held(std::move(arg), loc);
        }
        if (name == "oracle_address") {
            eat();
            expect_punct("(");
            expect_punct(")");
            return make_oracle_address(loc);
        }
        if (name == "address") {
            eat();
            expect_punct("(");
            std::string id = expect_string("address string");
            expect_punct(")");
            return make_literal(Value(Address{id}), loc);
        }
        if (name == "msg") {
            eat();
            expect_punct(".");
            std::string field = expect_any_ident("sender, value or data");
            if (field == "sender") return make_implicit(Implicit::MsgSender, "", loc);
            if (field == "value") return make_implicit(Implicit::MsgValue, "", loc);
            if (field == "data") {
                expect_punct(".");
                std::string key = expect_any_ident("msg.data key");
                return make_implicit(Implicit::MsgData, key, loc);
            }
            throw SyntaxError(loc, "msg.sender, msg.value or msg.data.<key>", field);
        }
        if (name == "block") {
            eat();
            expect_punct(".");
            std::string field = expect_any_ident("number");
            if (field != "number") throw SyntaxError(loc, "block.number", field);
            return make_implicit(Implicit::BlockNumber, "", loc);
        }
        eat();
        if (attrs_) {
            for (const auto& a : *attrs_)
                if (a.name == name) return make_attr_read(name, loc);
        }
        return make_local_read(name, loc);
    }

    // Markers must be the literal first and last statements of the body,
    // at most one of each, and may not appear nested inside branches.
    void validate_markers(FunctionDecl& f) {
        int nested = count_nested_markers(f.body);
        if (nested > 0)
            throw SyntaxError(f.loc, "start_tx/end_tx only at the top of the function body",
                              "marker inside a branch in '" + f.name + "'");
        int starts = 0, ends = 0;
        for (const auto& s : f.body) {
            if (std::holds_alternative<StartTx>(s.node)) ++starts;
            if (std::holds_alternative<EndTx>(s.node)) ++ends;
        }
        if (starts == 0 && ends == 0) {
            f.transactional = false;
            return;
        }
        bool well_formed = starts == 1 && ends == 1 && !f.body.empty() &&
                           std::holds_alternative<StartTx>(f.body.front().node) &&
                           std::holds_alternative<EndTx>(f.body.back().node);
        if (!well_formed)
            throw SyntaxError(f.loc,
                              "a single start_tx/end_tx pair enclosing the whole body",
                              "misplaced markers in '" + f.name + "'");
        f.transactional = true;
    }

    static int count_nested_markers(const StmtList& body) {
        int n = 0;
        for (const auto& s : body) {
            if (const auto* iff = std::get_if<If>(&s.node)) {
                n += count_markers_deep(iff->then_body);
                if (iff->else_body) n += count_markers_deep(*iff->else_body);
            }
        }
        return n;
    }

    static int count_markers_deep(const StmtList& body) {
        int n = 0;
        for (const auto& s : body) {
            if (std::holds_alternative<StartTx>(s.node) || std::holds_alternative<EndTx>(s.node))
                ++n;
            if (const auto* iff = std::get_if<If>(&s.node)) {
                n += count_markers_deep(iff->then_body);
                if (iff->else_body) n += count_markers_deep(*iff->else_body);
            }
        }
        return n;
    }

    // token helpers
    bool is_ident(const char* kw) const {
        return cur_.type == Token::Type::Ident && cur_.text == kw;
    }
    bool is_punct(const char* p) const {
        return cur_.type == Token::Type::Punct && cur_.text == p;
    }
    void eat() { cur_ = lex_.next(); }
    void expect_ident(const char* kw) {
        if (!is_ident(kw)) throw SyntaxError(cur_.loc, std::string("'") + kw + "'", cur_.describe());
        eat();
    }
    std::string expect_any_ident(const char* what) {
        if (cur_.type != Token::Type::Ident) throw SyntaxError(cur_.loc, what, cur_.describe());
        std::string name = cur_.text;
        eat();
        return name;
    }
    std::string expect_string(const char* what) {
        if (cur_.type != Token::Type::StringLit)
            throw SyntaxError(cur_.loc, what, cur_.describe());
        std::string s = cur_.text;
        eat();
        return s;
    }
    void expect_punct(const char* p) {
        if (!is_punct(p)) throw SyntaxError(cur_.loc, std::string("'") + p + "'", cur_.describe());
        eat();
    }

    Lexer lex_;
    Token cur_;
    const std::vector<AttributeDecl>* attrs_ = nullptr;
    int query_count_ = 0;
};

}  // namespace

ContractAst parse_contract(std::string_view source) { return Parser(source).parse(); }

}  // namespace txsc
