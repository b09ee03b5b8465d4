#include "stf/syntax/parser.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "stf/model/error.hpp"
#include "stf/syntax/lexer.hpp"
#include "stf/syntax/printer.hpp"

namespace stf {

namespace {

bool valid_utf8(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        const auto c = static_cast<unsigned char>(s[i]);
        std::size_t n = 0;
        if (c < 0x80) {
            n = 0;
        } else if ((c & 0xE0) == 0xC0 && c >= 0xC2) {
            n = 1;
        } else if ((c & 0xF0) == 0xE0) {
            n = 2;
        } else if ((c & 0xF8) == 0xF0 && c <= 0xF4) {
            n = 3;
        } else {
            return false;
        }
        if (n > 0 && i + n >= s.size()) return false;
        for (std::size_t k = 1; k <= n; ++k) {
            if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return false;
        }
        i += n + 1;
    }
    return true;
}

struct Failure {
    ParseDiagnostic diag;
};

SourceSpan cover(const SourceSpan& a, const SourceSpan& b) {
    SourceSpan s = a;
    s.end = b.end;
    return s;
}

std::string describe(const Token& t) {
    switch (t.kind) {
        case TokenKind::End: return "end of input";
        case TokenKind::String: return "string " + t.lexeme;
        default: return "'" + t.lexeme + "'";
    }
}

class Parser {
public:
    Parser(std::vector<Token> tokens, std::vector<ParseDiagnostic>& diags)
        : toks_(std::move(tokens)), diags_(diags) {}

    Model parse_model() {
        Model m;
        while (peek().kind != TokenKind::End) {
            const std::size_t start = idx_;
            try {
                if (peek().is_keyword("import")) {
                    m.imports.push_back(parse_import());
                } else if (peek().is_keyword("thing")) {
                    m.things.push_back(parse_thing());
                } else if (peek().is_keyword("configuration")) {
                    m.configurations.push_back(parse_configuration());
                } else {
                    fail("'thing', 'configuration' or 'import'");
                }
            } catch (const Failure& f) {
                diags_.push_back(f.diag);
                if (idx_ == start) ++idx_;
                recover();
            }
        }
        return m;
    }

private:
    const Token& peek(std::size_t k = 0) const {
        const std::size_t i = std::min(idx_ + k, toks_.size() - 1);
        return toks_[i];
    }
    const Token& last() const { return toks_[idx_ == 0 ? 0 : idx_ - 1]; }
    const Token& take() {
        const Token& t = toks_[idx_];
        if (idx_ + 1 < toks_.size()) ++idx_;
        return t;
    }

    [[noreturn]] void fail(const std::string& expected) {
        const Token& t = peek();
        throw Failure{{"expected " + expected + ", found " + describe(t), t.span, expected}};
    }
    [[noreturn]] void fail_at(const Token& t, const std::string& message) {
        throw Failure{{message, t.span, {}}};
    }

    void recover() {
        while (peek().kind != TokenKind::End) {
            const Token& t = peek();
            if (t.is_keyword("thing") || t.is_keyword("configuration") || t.is_keyword("import")) return;
            ++idx_;
        }
    }

    const Token& keyword(std::string_view kw) {
        if (!peek().is_keyword(kw)) fail("'" + std::string(kw) + "'");
        return take();
    }
    const Token& punct(std::string_view p) {
        if (!peek().is_punct(p)) fail("'" + std::string(p) + "'");
        return take();
    }
    bool accept_keyword(std::string_view kw) {
        if (!peek().is_keyword(kw)) return false;
        take();
        return true;
    }
    bool accept_punct(std::string_view p) {
        if (!peek().is_punct(p)) return false;
        take();
        return true;
    }
    Ref ident(const std::string& what = "identifier") {
        if (peek().kind != TokenKind::Identifier) fail(what);
        const Token& t = take();
        return Ref{t.lexeme, t.span};
    }
    std::string string_lit() {
        if (peek().kind != TokenKind::String) fail("string literal");
        return take().text;
    }
    std::int64_t int_lit() {
        if (peek().kind != TokenKind::Int) fail("integer literal");
        const Token& t = take();
        return to_int(t, false);
    }
    std::int64_t to_int(const Token& t, bool negate) {
        std::string digits = negate ? "-" + t.lexeme : t.lexeme;
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
        if (ec != std::errc{} || p != digits.data() + digits.size()) fail_at(t, "integer literal out of range");
        return v;
    }
    double to_float(const Token& t, bool negate) {
        double v = 0;
        auto [p, ec] = std::from_chars(t.lexeme.data(), t.lexeme.data() + t.lexeme.size(), v);
        if (ec != std::errc{}) fail_at(t, "float literal out of range");
        return negate ? -v : v;
    }

    ScalarType type_name() {
        if (peek().kind != TokenKind::Identifier) fail("type (Int, Float, Bool, String, Timestamp)");
        const Token& t = peek();
        auto ty = parse_scalar_type(t.lexeme);
        if (!ty) fail("type (Int, Float, Bool, String, Timestamp)");
        take();
        return *ty;
    }

    Value literal() {
        const Token& t = peek();
        if (t.is_punct("-")) {
            take();
            if (peek().kind == TokenKind::Int) return Value::integer(to_int(take(), true));
            if (peek().kind == TokenKind::Float) return Value::real(to_float(take(), true));
            fail("number after '-'");
        }
        switch (t.kind) {
            case TokenKind::Int: return Value::integer(to_int(take(), false));
            case TokenKind::Float: return Value::real(to_float(take(), false));
            case TokenKind::String: return Value::string(take().text);
            default: break;
        }
        if (t.is_keyword("true") || t.is_keyword("false")) return Value::boolean(take().lexeme == "true");
        fail("literal");
    }

    Annotation annotation() {
        const Token& at = punct("@");
        const SourceSpan start = at.span;
        Ref key = ident("annotation key");
        Annotation a{key.name, string_lit(), cover(start, last().span)};
        if (!is_registered_annotation(a.key)) {
            diags_.push_back({"unknown annotation '@" + a.key + "' (expected @platform, @backend or @dataset_format)",
                              key.span, "@platform, @backend or @dataset_format"});
        }
        return a;
    }

    Import parse_import() {
        const SourceSpan start = keyword("import").span;
        std::string path = string_lit();
        Import imp{path, cover(start, last().span)};
        accept_punct(";");
        return imp;
    }

    Thing parse_thing() {
        Thing t;
        const SourceSpan start = keyword("thing").span;
        t.is_fragment = accept_keyword("fragment");
        t.name = ident("thing name").name;
        if (accept_keyword("includes")) {
            t.includes.push_back(ident("fragment name"));
            while (accept_punct(",")) t.includes.push_back(ident("fragment name"));
        }
        while (peek().is_punct("@")) t.annotations.push_back(annotation());
        punct("{");
        while (peek().is_keyword("property")) t.properties.push_back(parse_property());
        while (peek().is_keyword("message")) t.messages.push_back(parse_message());
        while (peek().is_keyword("port")) t.ports.push_back(parse_port());
        if (peek().is_keyword("data_analytics")) t.da = parse_da();
        if (!peek().is_keyword("statechart")) {
            fail("'property', 'message', 'port', 'data_analytics' or 'statechart'");
        }
        t.behavior = parse_statechart();
        punct("}");
        t.span = cover(start, last().span);
        return t;
    }

    Configuration parse_configuration() {
        Configuration c;
        const SourceSpan start = keyword("configuration").span;
        c.name = ident("configuration name").name;
        punct("{");
        while (peek().is_keyword("instance")) {
            take();
            Instance inst;
            inst.name = ident("instance name");
            punct(":");
            inst.thing = ident("thing name");
            accept_punct(";");
            c.instances.push_back(inst);
        }
        while (peek().is_keyword("connector")) {
            const SourceSpan cs = take().span;
            Connector conn;
            conn.left.instance = ident("instance name");
            punct(".");
            conn.left.port = ident("port name");
            punct("<->");
            conn.right.instance = ident("instance name");
            punct(".");
            conn.right.port = ident("port name");
            conn.span = cover(cs, last().span);
            accept_punct(";");
            c.connectors.push_back(conn);
        }
        if (!peek().is_punct("}")) fail("'instance', 'connector' or '}'");
        punct("}");
        c.span = cover(start, last().span);
        return c;
    }

    Property parse_property() {
        const SourceSpan start = keyword("property").span;
        Property p;
        p.name = ident("property name").name;
        punct(":");
        p.type = type_name();
        if (accept_punct("=")) p.initial = literal();
        p.span = cover(start, last().span);
        accept_punct(";");
        return p;
    }

    Message parse_message() {
        const SourceSpan start = keyword("message").span;
        Message m;
        m.name = ident("message name").name;
        punct("(");
        if (!peek().is_punct(")")) {
            do {
                Param p;
                Ref n = ident("parameter name");
                p.name = n.name;
                punct(":");
                p.type = type_name();
                p.span = cover(n.span, last().span);
                m.params.push_back(p);
            } while (accept_punct(","));
        }
        punct(")");
        m.span = cover(start, last().span);
        accept_punct(";");
        return m;
    }

    Port parse_port() {
        const SourceSpan start = keyword("port").span;
        Port p;
        p.name = ident("port name").name;
        punct("{");
        if (accept_keyword("receives")) {
            p.receives.push_back(ident("message name"));
            while (peek().kind == TokenKind::Identifier) p.receives.push_back(ident());
        }
        if (accept_keyword("sends")) {
            p.sends.push_back(ident("message name"));
            while (peek().kind == TokenKind::Identifier) p.sends.push_back(ident());
        }
        punct("}");
        p.span = cover(start, last().span);
        accept_punct(";");
        return p;
    }

    DataAnalyticsSpec parse_da() {
        DataAnalyticsSpec da;
        const SourceSpan start = keyword("data_analytics").span;
        punct("{");
        keyword("dataset");
        da.dataset = string_lit();
        keyword("features");
        da.features.push_back(ident("feature property"));
        while (peek().kind == TokenKind::Identifier) da.features.push_back(ident());
        keyword("labels");
        da.labels.push_back(ident("label property"));
        while (peek().kind == TokenKind::Identifier) da.labels.push_back(ident());
        if (accept_keyword("sequential")) {
            if (accept_keyword("true")) {
                da.sequential = true;
            } else {
                keyword("false");
                da.sequential = false;
            }
        }
        if (peek().is_keyword("window")) {
            const SourceSpan ws = take().span;
            Window w;
            w.lag = int_lit();
            keyword("horizon");
            w.horizon = int_lit();
            da.window = w;
            da.window_span = cover(ws, last().span);
        }
        if (accept_keyword("scaling")) {
            if (accept_keyword("none")) {
                da.scaling = Scaling::None;
            } else if (accept_keyword("minmax")) {
                da.scaling = Scaling::MinMax;
            } else if (accept_keyword("zscore")) {
                da.scaling = Scaling::ZScore;
            } else {
                fail("'none', 'minmax' or 'zscore'");
            }
        }
        if (accept_keyword("missing")) {
            if (accept_keyword("drop")) {
                da.missing = MissingPolicy::Drop;
            } else if (accept_keyword("mean_impute")) {
                da.missing = MissingPolicy::MeanImpute;
            } else {
                fail("'drop' or 'mean_impute'");
            }
        }
        if (accept_keyword("model")) {
            ExpertMode e;
            e.algorithm = ident("algorithm name");
            punct("{");
            while (peek().kind == TokenKind::Identifier) {
                Ref n = ident();
                punct("=");
                Value v = literal();
                e.hyperparams.push_back({n.name, v, cover(n.span, last().span)});
            }
            punct("}");
            da.mode = e;
        } else if (accept_keyword("automl")) {
            AutoMlMode a;
            punct("{");
            keyword("metric");
            a.metric = ident("metric name");
            keyword("folds");
            a.folds = int_lit();
            if (accept_keyword("budget")) a.budget = int_lit();
            punct("}");
            da.mode = a;
        } else {
            fail("'model' or 'automl'");
        }
        if (accept_keyword("pretrained")) da.pretrained = string_lit();
        while (peek().is_punct("@")) da.annotations.push_back(annotation());
        punct("}");
        da.span = cover(start, last().span);
        return da;
    }

    StateMachine parse_statechart() {
        StateMachine sm;
        const SourceSpan start = keyword("statechart").span;
        sm.name = ident("statechart name").name;
        keyword("init");
        sm.initial = ident("initial state");
        punct("{");
        while (true) {
            if (peek().is_keyword("state")) {
                sm.states.push_back(parse_state());
            } else if (peek().is_punct("}")) {
                break;
            } else {
                fail("'state' or '}'");
            }
        }
        punct("}");
        sm.span = cover(start, last().span);
        return sm;
    }

    State parse_state() {
        State s;
        const SourceSpan start = keyword("state").span;
        s.name = ident("state name").name;
        punct("{");
        if (accept_keyword("on_entry")) s.on_entry = block();
        if (accept_keyword("on_exit")) s.on_exit = block();
        while (peek().is_keyword("transition")) s.transitions.push_back(parse_transition());
        if (!peek().is_punct("}")) fail("'on_entry', 'on_exit', 'transition' or '}'");
        punct("}");
        s.span = cover(start, last().span);
        return s;
    }

    Transition parse_transition() {
        Transition tr;
        const SourceSpan start = keyword("transition").span;
        punct("->");
        tr.target = ident("target state");
        if (accept_keyword("event")) {
            EventRef ev;
            ev.port = ident("port name");
            punct(".");
            ev.message = ident("message name");
            tr.event = ev;
        }
        if (accept_keyword("guard")) tr.guard = expression();
        if (peek().is_punct("{")) tr.actions = block();
        tr.span = cover(start, last().span);
        return tr;
    }

    Block block() {
        punct("{");
        Block b;
        while (!peek().is_punct("}")) b.push_back(statement());
        punct("}");
        return b;
    }

    static std::optional<DaAction> da_keyword(const Token& t) {
        if (t.kind != TokenKind::Keyword) return std::nullopt;
        if (t.lexeme == "da_save") return DaAction::Save;
        if (t.lexeme == "da_preprocess") return DaAction::Preprocess;
        if (t.lexeme == "da_train") return DaAction::Train;
        if (t.lexeme == "da_predict") return DaAction::Predict;
        return std::nullopt;
    }

    Statement statement() {
        const Token& first = peek();
        const SourceSpan start = first.span;
        Statement st;
        if (auto da = da_keyword(first)) {
            take();
            st.node = DaStmt{*da};
        } else if (first.is_keyword("var")) {
            take();
            LocalDeclStmt d;
            d.name = ident("variable name");
            punct(":");
            d.type = type_name();
            punct("=");
            d.init = expression();
            st.node = std::move(d);
        } else if (first.is_keyword("print")) {
            take();
            st.node = PrintStmt{expression()};
        } else if (first.is_keyword("if")) {
            take();
            IfStmt s;
            s.cond = expression();
            *s.then_body = block();
            if (accept_keyword("else")) *s.else_body = block();
            st.node = std::move(s);
        } else if (first.is_keyword("while")) {
            take();
            WhileStmt s;
            s.cond = expression();
            *s.body = block();
            st.node = std::move(s);
        } else if (first.kind == TokenKind::Identifier && peek(1).is_punct("=")) {
            AssignStmt s;
            s.target = ident();
            take();
            s.value = expression();
            st.node = std::move(s);
        } else if (first.kind == TokenKind::Identifier && peek(1).is_punct("!")) {
            SendStmt s;
            s.port = ident();
            take();
            s.message = ident("message name");
            punct("(");
            if (!peek().is_punct(")")) {
                s.args.push_back(expression());
                while (accept_punct(",")) s.args.push_back(expression());
            }
            punct(")");
            st.node = std::move(s);
        } else {
            fail("statement");
        }
        st.span = cover(start, last().span);
        accept_punct(";");
        return st;
    }

    // Precedence, loosest first: or, and, comparison, additive, multiplicative, unary.
    Expr expression() { return or_expr(); }

    Expr make_binary(BinaryOp op, Expr lhs, Expr rhs) {
        Expr e;
        e.span = cover(lhs.span, rhs.span);
        e.node = BinaryExpr{op, std::move(lhs), std::move(rhs)};
        return e;
    }

    Expr or_expr() {
        Expr lhs = and_expr();
        while (accept_keyword("or")) lhs = make_binary(BinaryOp::Or, std::move(lhs), and_expr());
        return lhs;
    }
    Expr and_expr() {
        Expr lhs = cmp_expr();
        while (accept_keyword("and")) lhs = make_binary(BinaryOp::And, std::move(lhs), cmp_expr());
        return lhs;
    }
    Expr cmp_expr() {
        Expr lhs = add_expr();
        static const std::pair<std::string_view, BinaryOp> ops[] = {
            {"==", BinaryOp::Eq}, {"!=", BinaryOp::Ne}, {"<=", BinaryOp::Le},
            {">=", BinaryOp::Ge}, {"<", BinaryOp::Lt},  {">", BinaryOp::Gt},
        };
        for (const auto& [p, op] : ops) {
            if (accept_punct(p)) return make_binary(op, std::move(lhs), add_expr());
        }
        return lhs;
    }
    Expr add_expr() {
        Expr lhs = mul_expr();
        while (true) {
            if (accept_punct("+")) {
                lhs = make_binary(BinaryOp::Add, std::move(lhs), mul_expr());
            } else if (accept_punct("-")) {
                lhs = make_binary(BinaryOp::Sub, std::move(lhs), mul_expr());
            } else {
                return lhs;
            }
        }
    }
    Expr mul_expr() {
        Expr lhs = unary_expr();
        while (true) {
            if (accept_punct("*")) {
                lhs = make_binary(BinaryOp::Mul, std::move(lhs), unary_expr());
            } else if (accept_punct("/")) {
                lhs = make_binary(BinaryOp::Div, std::move(lhs), unary_expr());
            } else if (accept_punct("%")) {
                lhs = make_binary(BinaryOp::Mod, std::move(lhs), unary_expr());
            } else {
                return lhs;
            }
        }
    }
    Expr unary_expr() {
        const Token& t = peek();
        if (t.is_punct("-")) {
            const SourceSpan start = take().span;
            // "-<number>" is a negative literal; "-(<number>)" stays a negation.
            if (peek().kind == TokenKind::Int || peek().kind == TokenKind::Float) {
                const Token& num = take();
                Expr e;
                e.node = LiteralExpr{num.kind == TokenKind::Int ? Value::integer(to_int(num, true))
                                                                : Value::real(to_float(num, true))};
                e.span = cover(start, num.span);
                return e;
            }
            Expr operand = unary_expr();
            Expr e;
            e.span = cover(start, operand.span);
            e.node = UnaryExpr{UnaryOp::Neg, std::move(operand)};
            return e;
        }
        if (t.is_keyword("not")) {
            const SourceSpan start = take().span;
            Expr operand = unary_expr();
            Expr e;
            e.span = cover(start, operand.span);
            e.node = UnaryExpr{UnaryOp::Not, std::move(operand)};
            return e;
        }
        return primary();
    }
    Expr primary() {
        const Token& t = peek();
        Expr e;
        e.span = t.span;
        if (auto da = da_keyword(t)) {
            take();
            e.node = DaActionExpr{*da};
            return e;
        }
        switch (t.kind) {
            case TokenKind::Int:
            case TokenKind::Float:
            case TokenKind::String:
                e.node = LiteralExpr{literal()};
                return e;
            case TokenKind::Identifier:
                e.node = NameExpr{take().lexeme};
                return e;
            default: break;
        }
        if (t.is_keyword("true") || t.is_keyword("false")) {
            e.node = LiteralExpr{literal()};
            return e;
        }
        if (t.is_punct("(")) {
            take();
            Expr inner = expression();
            punct(")");
            return inner;
        }
        fail("expression");
    }

    std::vector<Token> toks_;
    std::size_t idx_ = 0;
    std::vector<ParseDiagnostic>& diags_;
};

}  // namespace

ParseResult parse(std::string_view text, const std::string& file) {
    ParseResult result;
    if (!valid_utf8(text)) {
        result.diagnostics.push_back({"input is not valid UTF-8", SourceSpan{file, 1, 1, 0, 0}, {}});
        return result;
    }
    LexResult lexed = lex(text, file);
    for (auto& e : lexed.errors) result.diagnostics.push_back({e.message, e.span, {}});
    std::vector<Token> tokens;
    tokens.reserve(lexed.tokens.size());
    for (auto& t : lexed.tokens) {
        if (t.kind != TokenKind::Invalid) tokens.push_back(std::move(t));
    }
    Parser p(std::move(tokens), result.diagnostics);
    result.model = p.parse_model();
    return result;
}

std::string format_parse_diagnostic(const ParseDiagnostic& d) {
    std::ostringstream os;
    os << (d.span.file.empty() ? "<input>" : d.span.file) << ':' << d.span.line << ':' << d.span.column
       << ": error: " << d.message;
    return os.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ModuleResolver file_resolver(std::vector<ParseDiagnostic>& sink) {
    return [&sink](const Import& imp, const std::string& importer) -> LoadedModule {
        namespace fs = std::filesystem;
        fs::path p = fs::path(importer).parent_path() / imp.path;
        const std::string id = p.lexically_normal().generic_string();
        std::string text;
        try {
            text = read_file(id);
        } catch (const Error&) {
            throw MergeError("cannot resolve import \"" + imp.path + "\" from '" + importer + "'");
        }
        ParseResult r = parse(text, id);
        for (auto& d : r.diagnostics) sink.push_back(d);
        if (!r.model) throw MergeError("cannot parse imported module '" + id + "'");
        return LoadedModule{id, std::move(*r.model)};
    };
}

LoadResult load_model_file(const std::string& path) {
    LoadResult out;
    const std::string id = std::filesystem::path(path).lexically_normal().generic_string();
    std::string text;
    try {
        text = read_file(path);
    } catch (const Error& e) {
        out.diagnostics.push_back({e.what(), SourceSpan{id, 0, 0, 0, 0}, {}});
        return out;
    }
    ParseResult r = parse(text, id);
    out.diagnostics = r.diagnostics;
    if (!r.model) return out;
    try {
        Model merged = merge_imports(*r.model, id, file_resolver(out.diagnostics));
        if (!out.diagnostics.empty()) return out;
        out.canonical_text = pretty_print(merged);
        out.model = std::move(merged);
    } catch (const Error& e) {
        out.diagnostics.push_back({e.what(), SourceSpan{id, 1, 1, 0, 0}, {}});
    }
    return out;
}

}  // namespace stf
