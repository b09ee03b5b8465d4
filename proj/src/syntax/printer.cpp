#include "stf/syntax/printer.hpp"

#include <cmath>
#include <sstream>

namespace stf {

namespace {

int precedence(const Expr& e) {
    if (const auto* b = std::get_if<BinaryExpr>(&e.node)) {
        switch (b->op) {
            case BinaryOp::Or: return 1;
            case BinaryOp::And: return 2;
            case BinaryOp::Eq:
            case BinaryOp::Ne:
            case BinaryOp::Lt:
            case BinaryOp::Le:
            case BinaryOp::Gt:
            case BinaryOp::Ge: return 3;
            case BinaryOp::Add:
            case BinaryOp::Sub: return 4;
            case BinaryOp::Mul:
            case BinaryOp::Div:
            case BinaryOp::Mod: return 5;
        }
    }
    if (std::holds_alternative<UnaryExpr>(e.node)) return 6;
    return 7;
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out + "\"";
}

std::string wrap(const Expr& e, bool parens) {
    std::string s = print_expr(e);
    return parens ? "(" + s + ")" : s;
}

bool is_nonnegative_number(const Expr& e) {
    const auto* lit = std::get_if<LiteralExpr>(&e.node);
    if (!lit) return false;
    const Value& v = lit->value;
    if (v.type() == ScalarType::Int) return v.as_int() >= 0;
    if (v.type() == ScalarType::Float) return !std::signbit(v.as_float());
    return false;
}

class Printer {
public:
    std::string run(const Model& m) {
        bool first = true;
        for (const auto& imp : m.imports) {
            line("import " + quote(imp.path));
            first = false;
        }
        for (const auto& t : m.things) {
            if (!first) out_ << '\n';
            first = false;
            thing(t);
        }
        for (const auto& c : m.configurations) {
            if (!first) out_ << '\n';
            first = false;
            configuration(c);
        }
        return out_.str();
    }

private:
    void line(const std::string& s) {
        for (int i = 0; i < depth_; ++i) out_ << "    ";
        out_ << s << '\n';
    }
    void open(const std::string& s) {
        line(s + " {");
        ++depth_;
    }
    void close() {
        --depth_;
        line("}");
    }

    static std::string annotations(const std::vector<Annotation>& as) {
        std::string s;
        for (const auto& a : as) s += " @" + a.key + " " + quote(a.value);
        return s;
    }

    static std::string refs(const std::vector<Ref>& rs, const char* sep = " ") {
        std::string s;
        for (std::size_t i = 0; i < rs.size(); ++i) {
            if (i) s += sep;
            s += rs[i].name;
        }
        return s;
    }

    void thing(const Thing& t) {
        std::string head = "thing ";
        if (t.is_fragment) head += "fragment ";
        head += t.name;
        if (!t.includes.empty()) head += " includes " + refs(t.includes, ", ");
        head += annotations(t.annotations);
        open(head);
        for (const auto& p : t.properties) {
            std::string s = "property " + p.name + " : " + std::string(to_string(p.type));
            if (p.initial) s += " = " + print_literal(*p.initial);
            line(s);
        }
        for (const auto& m : t.messages) {
            std::string s = "message " + m.name + "(";
            for (std::size_t i = 0; i < m.params.size(); ++i) {
                if (i) s += ", ";
                s += m.params[i].name + " : " + std::string(to_string(m.params[i].type));
            }
            line(s + ")");
        }
        for (const auto& p : t.ports) {
            if (p.receives.empty() && p.sends.empty()) {
                line("port " + p.name + " { }");
                continue;
            }
            open("port " + p.name);
            if (!p.receives.empty()) line("receives " + refs(p.receives));
            if (!p.sends.empty()) line("sends " + refs(p.sends));
            close();
        }
        if (t.da) da(*t.da);
        statechart(t.behavior);
        close();
    }

    void da(const DataAnalyticsSpec& d) {
        open("data_analytics");
        line("dataset " + quote(d.dataset));
        line("features " + refs(d.features));
        line("labels " + refs(d.labels));
        if (d.sequential) line("sequential true");
        if (d.window) line("window " + std::to_string(d.window->lag) + " horizon " + std::to_string(d.window->horizon));
        if (d.scaling != Scaling::None) line("scaling " + std::string(to_string(d.scaling)));
        if (d.missing != MissingPolicy::Drop) line("missing " + std::string(to_string(d.missing)));
        if (const auto* e = std::get_if<ExpertMode>(&d.mode)) {
            if (e->hyperparams.empty()) {
                line("model " + e->algorithm.name + " { }");
            } else {
                open("model " + e->algorithm.name);
                for (const auto& h : e->hyperparams) line(h.name + " = " + print_literal(h.value));
                close();
            }
        } else {
            const auto& a = std::get<AutoMlMode>(d.mode);
            std::string s = "automl { metric " + a.metric.name + " folds " + std::to_string(a.folds);
            if (a.budget) s += " budget " + std::to_string(*a.budget);
            line(s + " }");
        }
        if (d.pretrained) line("pretrained " + quote(*d.pretrained));
        for (const auto& a : d.annotations) line("@" + a.key + " " + quote(a.value));
        close();
    }

    void statechart(const StateMachine& sm) {
        const std::string head = "statechart " + sm.name + " init " + sm.initial.name;
        if (sm.states.empty()) {
            line(head + " { }");
            return;
        }
        open(head);
        for (const auto& s : sm.states) state(s);
        close();
    }

    void state(const State& s) {
        if (s.on_entry.empty() && s.on_exit.empty() && s.transitions.empty()) {
            line("state " + s.name + " { }");
            return;
        }
        open("state " + s.name);
        if (!s.on_entry.empty()) {
            open("on_entry");
            block(s.on_entry);
            close();
        }
        if (!s.on_exit.empty()) {
            open("on_exit");
            block(s.on_exit);
            close();
        }
        for (const auto& t : s.transitions) {
            std::string head = "transition -> " + t.target.name;
            if (t.event) head += " event " + t.event->port.name + "." + t.event->message.name;
            if (t.guard) head += " guard " + print_expr(*t.guard);
            if (t.actions.empty()) {
                line(head);
            } else {
                open(head);
                block(t.actions);
                close();
            }
        }
        close();
    }

    void block(const Block& b) {
        for (const auto& st : b) statement(st);
    }

    void statement(const Statement& st) {
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, AssignStmt>) {
                    line(s.target.name + " = " + print_expr(s.value));
                } else if constexpr (std::is_same_v<T, LocalDeclStmt>) {
                    line("var " + s.name.name + " : " + std::string(to_string(s.type)) + " = " + print_expr(s.init));
                } else if constexpr (std::is_same_v<T, SendStmt>) {
                    std::string a;
                    for (std::size_t i = 0; i < s.args.size(); ++i) {
                        if (i) a += ", ";
                        a += print_expr(s.args[i]);
                    }
                    line(s.port.name + "!" + s.message.name + "(" + a + ")");
                } else if constexpr (std::is_same_v<T, PrintStmt>) {
                    line("print " + print_expr(s.value));
                } else if constexpr (std::is_same_v<T, IfStmt>) {
                    open("if " + print_expr(s.cond));
                    block(*s.then_body);
                    if (!s.else_body->empty()) {
                        --depth_;
                        open("} else");
                        block(*s.else_body);
                    }
                    close();
                } else if constexpr (std::is_same_v<T, WhileStmt>) {
                    open("while " + print_expr(s.cond));
                    block(*s.body);
                    close();
                } else if constexpr (std::is_same_v<T, DaStmt>) {
                    line(std::string(to_string(s.action)));
                }
            },
            st.node);
    }

    void configuration(const Configuration& c) {
        if (c.instances.empty() && c.connectors.empty()) {
            line("configuration " + c.name + " { }");
            return;
        }
        open("configuration " + c.name);
        for (const auto& i : c.instances) line("instance " + i.name.name + " : " + i.thing.name);
        for (const auto& k : c.connectors) {
            line("connector " + k.left.instance.name + "." + k.left.port.name + " <-> " + k.right.instance.name + "." +
                 k.right.port.name);
        }
        close();
    }

    std::ostringstream out_;
    int depth_ = 0;
};

}  // namespace

std::string print_literal(const Value& v) {
    switch (v.type()) {
        case ScalarType::String: return quote(v.as_string());
        default: return v.to_text();
    }
}

std::string print_expr(const Expr& e) {
    return std::visit(
        [&](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, LiteralExpr>) {
                return print_literal(n.value);
            } else if constexpr (std::is_same_v<T, NameExpr>) {
                return n.name;
            } else if constexpr (std::is_same_v<T, DaActionExpr>) {
                return std::string(to_string(n.action));
            } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                const Expr& operand = *n.operand;
                if (n.op == UnaryOp::Not) return "not " + wrap(operand, precedence(operand) < 6);
                // "-5" would re-read as a negative literal.
                const bool parens = precedence(operand) < 6 || is_nonnegative_number(operand);
                return "-" + wrap(operand, parens);
            } else {
                const int p = precedence(e);
                const Expr& lhs = *n.lhs;
                const Expr& rhs = *n.rhs;
                const bool lhs_parens = precedence(lhs) < p || (p == 3 && precedence(lhs) == 3);
                const bool rhs_parens = precedence(rhs) <= p;
                return wrap(lhs, lhs_parens) + " " + std::string(to_string(n.op)) + " " + wrap(rhs, rhs_parens);
            }
        },
        e.node);
}

std::string pretty_print(const Model& m) { return Printer().run(m); }

}  // namespace stf
