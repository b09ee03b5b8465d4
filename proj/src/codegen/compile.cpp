#include <map>

#include "json.hpp"

#include "stf/check/validator.hpp"
#include "stf/codegen/bundle.hpp"
#include "stf/ml/model_io.hpp"
#include "stf/model/error.hpp"
#include "stf/syntax/parser.hpp"
#include "stf/syntax/printer.hpp"
#include "stf/version.hpp"

namespace stf {

namespace {

class ThingCompiler {
public:
    ThingCompiler(const Thing& thing, const ThingInfo& info) : thing_(thing), info_(info) {}

    CompiledThing compile() {
        CompiledThing out;
        out.info = info_;
        out.initial = state_index(thing_.behavior.initial.name);
        for (const auto& s : thing_.behavior.states) {
            CState cs;
            cs.name = s.name;
            cs.entry = body(s.on_entry, nullptr);
            cs.exit = body(s.on_exit, nullptr);
            for (const auto& t : s.transitions) cs.transitions.push_back(transition(t));
            out.states.push_back(std::move(cs));
        }
        return out;
    }

private:
    struct Slot {
        std::size_t index;
        ScalarType type;
    };

    [[noreturn]] void fail(const std::string& msg) const { throw BundleError("thing '" + thing_.name + "': " + msg); }

    std::size_t state_index(const std::string& name) const {
        const auto& states = thing_.behavior.states;
        for (std::size_t i = 0; i < states.size(); ++i) {
            if (states[i].name == name) return i;
        }
        fail("unknown state '" + name + "'");
    }

    CTransition transition(const Transition& t) {
        CTransition ct;
        ct.target = state_index(t.target.name);
        const MessageInfo* msg = nullptr;
        if (t.event) {
            auto port = info_.port_index(t.event->port.name);
            auto message = info_.message_index(t.event->message.name);
            if (!port || !message) fail("unknown event " + t.event->port.name + "." + t.event->message.name);
            ct.event = std::make_pair(*port, *message);
            msg = &info_.messages[*message];
        }
        if (t.guard) {
            begin(msg);
            ct.guard = expr(*t.guard);
        }
        ct.actions = body(t.actions, msg);
        return ct;
    }

    void begin(const MessageInfo* msg) {
        msg_ = msg;
        scopes_.clear();
        slots_ = 0;
    }

    CBody body(const Block& b, const MessageInfo* msg) {
        begin(msg);
        CBody out;
        out.code = block(b);
        out.locals = slots_;
        return out;
    }

    std::vector<CStmt> block(const Block& b) {
        scopes_.emplace_back();
        std::vector<CStmt> out;
        for (const auto& st : b) out.push_back(statement(st));
        scopes_.pop_back();
        return out;
    }

    const Slot* find_local(const std::string& name) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto l = it->find(name);
            if (l != it->end()) return &l->second;
        }
        return nullptr;
    }

    std::optional<std::size_t> param_index(const std::string& name) const {
        if (!msg_) return std::nullopt;
        for (std::size_t i = 0; i < msg_->params.size(); ++i) {
            if (msg_->params[i].name == name) return i;
        }
        return std::nullopt;
    }

    CExpr expr(const Expr& e) {
        return std::visit(
            [&](const auto& n) -> CExpr {
                using T = std::decay_t<decltype(n)>;
                CExpr c;
                if constexpr (std::is_same_v<T, LiteralExpr>) {
                    c.kind = CExpr::Kind::Literal;
                    c.literal = n.value;
                } else if constexpr (std::is_same_v<T, NameExpr>) {
                    if (const Slot* l = find_local(n.name)) {
                        c.kind = CExpr::Kind::Local;
                        c.index = l->index;
                    } else if (auto p = param_index(n.name)) {
                        c.kind = CExpr::Kind::Param;
                        c.index = *p;
                    } else if (auto p = info_.property_index(n.name)) {
                        c.kind = CExpr::Kind::Property;
                        c.index = *p;
                    } else {
                        fail("unknown name '" + n.name + "'");
                    }
                } else if constexpr (std::is_same_v<T, DaActionExpr>) {
                    fail(std::string(to_string(n.action)) + " used as an expression");
                } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                    c.kind = CExpr::Kind::Unary;
                    c.unary = n.op;
                    c.operands.push_back(expr(*n.operand));
                } else {
                    c.kind = CExpr::Kind::Binary;
                    c.binary = n.op;
                    c.operands.push_back(expr(*n.lhs));
                    c.operands.push_back(expr(*n.rhs));
                }
                return c;
            },
            e.node);
    }

    CStmt statement(const Statement& st) {
        return std::visit(
            [&](const auto& n) -> CStmt {
                using T = std::decay_t<decltype(n)>;
                CStmt c;
                if constexpr (std::is_same_v<T, AssignStmt>) {
                    c.exprs.push_back(expr(n.value));
                    if (const Slot* l = find_local(n.target.name)) {
                        c.kind = CStmt::Kind::SetLocal;
                        c.index = l->index;
                        c.type = l->type;
                    } else if (param_index(n.target.name)) {
                        fail("message parameter '" + n.target.name + "' cannot be assigned");
                    } else if (auto p = info_.property_index(n.target.name)) {
                        c.kind = CStmt::Kind::AssignProperty;
                        c.index = *p;
                    } else {
                        fail("unknown name '" + n.target.name + "'");
                    }
                } else if constexpr (std::is_same_v<T, LocalDeclStmt>) {
                    c.kind = CStmt::Kind::DeclareLocal;
                    c.exprs.push_back(expr(n.init));
                    c.index = slots_++;
                    c.type = n.type;
                    scopes_.back()[n.name.name] = Slot{c.index, n.type};
                } else if constexpr (std::is_same_v<T, SendStmt>) {
                    c.kind = CStmt::Kind::Send;
                    for (const auto& a : n.args) c.exprs.push_back(expr(a));
                    auto port = info_.port_index(n.port.name);
                    auto message = info_.message_index(n.message.name);
                    if (!port || !message) fail("unknown send target " + n.port.name + "!" + n.message.name);
                    c.index = *port;
                    c.message = *message;
                } else if constexpr (std::is_same_v<T, PrintStmt>) {
                    c.kind = CStmt::Kind::Print;
                    c.exprs.push_back(expr(n.value));
                } else if constexpr (std::is_same_v<T, IfStmt>) {
                    c.kind = CStmt::Kind::If;
                    c.exprs.push_back(expr(n.cond));
                    c.body = block(*n.then_body);
                    c.else_body = block(*n.else_body);
                } else if constexpr (std::is_same_v<T, WhileStmt>) {
                    c.kind = CStmt::Kind::While;
                    c.exprs.push_back(expr(n.cond));
                    c.body = block(*n.body);
                } else {
                    c.kind = CStmt::Kind::Da;
                    c.action = n.action;
                }
                return c;
            },
            st.node);
    }

    const Thing& thing_;
    const ThingInfo& info_;
    const MessageInfo* msg_ = nullptr;
    std::vector<std::map<std::string, Slot>> scopes_;
    std::size_t slots_ = 0;
};

}  // namespace

std::string model_hash(const Model& m) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : pretty_print(m)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return "fnv1a64:" + std::string(buf);
}

Bundle compile_bundle(const Model& m, const std::string& config, const BundleOptions& options) {
    for (const auto& d : validate(m)) {
        if (d.severity == Severity::Error) throw BundleError("model has errors: " + format_diagnostic(d));
    }
    Bundle b;
    b.manifest.tool = std::string(kToolName);
    b.manifest.tool_version = std::string(kToolVersion);
    b.manifest.model_hash = model_hash(m);
    try {
        b.system = describe_system(m, config);
    } catch (const InstantiationError& e) {
        throw BundleError(e.what());
    }
    for (auto& info : b.system.things) {
        const Thing& thing = *m.find_thing(info.name);
        if (info.da) {
            DaConfig& da = *info.da;
            auto backend = resolved_backend(thing);
            if (!backend) {
                if (!options.default_backend) {
                    throw BundleError("thing '" + info.name + "' has no backend; add @backend or pass a default backend");
                }
                backend = options.default_backend;
                b.manifest.default_backend = options.default_backend;
            }
            if (*backend != "builtin") {
                throw BundleError("thing '" + info.name + "': unsupported backend '" + *backend + "'");
            }
            da.backend = *backend;
            if (da.pretrained) {
                const std::string path = resolve_data_path(options.data_root, *da.pretrained);
                try {
                    const std::string text = read_file(path);
                    model_from_json(text, path);
                    da.pretrained_json = nlohmann::json::parse(text).dump();
                } catch (const std::exception& e) {
                    throw BundleError("thing '" + info.name + "': pretrained model: " + e.what());
                }
            }
        }
        b.things.push_back(std::make_shared<const CompiledThing>(ThingCompiler(thing, info).compile()));
    }
    return b;
}

std::string generate_bundle(const Model& m, const std::string& config, const BundleOptions& options) {
    return bundle_text(compile_bundle(m, config, options));
}

}  // namespace stf
