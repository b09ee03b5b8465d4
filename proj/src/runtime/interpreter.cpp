#include "stf/runtime/interpreter.hpp"

#include <map>

#include "stf/check/validator.hpp"
#include "stf/runtime/ops.hpp"

namespace stf {

namespace {

class AstBehavior : public Behavior {
public:
    AstBehavior(std::shared_ptr<const Model> model, const Thing& thing, const ThingInfo& info)
        : model_(std::move(model)), thing_(thing), info_(info) {
        const StateMachine& sm = thing.behavior;
        auto state_index = [&](const std::string& name) {
            for (std::size_t i = 0; i < sm.states.size(); ++i) {
                if (sm.states[i].name == name) return i;
            }
            throw InstantiationError(thing.name + ": unknown state '" + name + "'");
        };
        initial_ = state_index(sm.initial.name);
        for (const auto& s : sm.states) {
            std::vector<std::size_t> targets;
            for (const auto& t : s.transitions) targets.push_back(state_index(t.target.name));
            targets_.push_back(std::move(targets));
        }
    }

    std::size_t initial_state() const override { return initial_; }

    void entry(Host& host, std::size_t state) override { run(host, nullptr, thing_.behavior.states[state].on_entry); }
    void exit(Host& host, std::size_t state) override { run(host, nullptr, thing_.behavior.states[state].on_exit); }

    std::optional<std::size_t> select(const Host& host, std::size_t state, const Envelope* msg) override {
        const auto& transitions = thing_.behavior.states[state].transitions;
        for (std::size_t i = 0; i < transitions.size(); ++i) {
            const Transition& t = transitions[i];
            if (msg) {
                if (!t.event || t.event->port.name != info_.ports[msg->port].name ||
                    t.event->message.name != info_.messages[msg->message].name) {
                    continue;
                }
            } else if (t.event) {
                continue;
            }
            if (t.guard) {
                Frame f{const_cast<Host&>(host), msg, {}};
                if (!truth(eval(f, *t.guard))) continue;
            }
            return i;
        }
        return std::nullopt;
    }

    std::size_t target(std::size_t state, std::size_t transition) const override {
        return targets_[state][transition];
    }

    void actions(Host& host, std::size_t state, std::size_t transition, const Envelope* msg) override {
        run(host, msg, thing_.behavior.states[state].transitions[transition].actions);
    }

private:
    struct Local {
        ScalarType type;
        Value value;
    };
    struct Frame {
        Host& host;
        const Envelope* msg;
        std::vector<std::map<std::string, Local>> scopes;
    };

    void run(Host& host, const Envelope* msg, const Block& b) {
        Frame f{host, msg, {}};
        block(f, b);
    }

    Local* find_local(Frame& f, const std::string& name) {
        for (auto it = f.scopes.rbegin(); it != f.scopes.rend(); ++it) {
            auto l = it->find(name);
            if (l != it->end()) return &l->second;
        }
        return nullptr;
    }

    std::optional<std::size_t> param_index(const Frame& f, const std::string& name) const {
        if (!f.msg) return std::nullopt;
        const auto& params = info_.messages[f.msg->message].params;
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (params[i].name == name) return i;
        }
        return std::nullopt;
    }

    Value lookup(Frame& f, const std::string& name) {
        if (const Local* l = find_local(f, name)) return l->value;
        if (auto p = param_index(f, name)) return f.msg->args.at(*p);
        if (auto p = info_.property_index(name)) return f.host.property(*p);
        throw RuntimeFault("unknown name '" + name + "'");
    }

    Value eval(Frame& f, const Expr& e) {
        return std::visit(
            [&](const auto& n) -> Value {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, LiteralExpr>) {
                    return n.value;
                } else if constexpr (std::is_same_v<T, NameExpr>) {
                    return lookup(f, n.name);
                } else if constexpr (std::is_same_v<T, DaActionExpr>) {
                    throw RuntimeFault(std::string(to_string(n.action)) + " cannot be evaluated as an expression");
                } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                    return apply_unary(n.op, eval(f, *n.operand));
                } else {
                    const Value l = eval(f, *n.lhs);
                    if (n.op == BinaryOp::And || n.op == BinaryOp::Or) {
                        const bool lv = truth(l);
                        if (n.op == BinaryOp::And ? !lv : lv) return Value::boolean(lv);
                        return Value::boolean(truth(eval(f, *n.rhs)));
                    }
                    return apply_binary(n.op, l, eval(f, *n.rhs));
                }
            },
            e.node);
    }

    void block(Frame& f, const Block& b) {
        f.scopes.emplace_back();
        for (const auto& st : b) statement(f, st);
        f.scopes.pop_back();
    }

    void statement(Frame& f, const Statement& st) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, AssignStmt>) {
                    const Value v = eval(f, n.value);
                    if (Local* l = find_local(f, n.target.name)) {
                        l->value = coerce(v, l->type);
                    } else if (param_index(f, n.target.name)) {
                        throw RuntimeFault("message parameter '" + n.target.name + "' cannot be assigned");
                    } else if (auto p = info_.property_index(n.target.name)) {
                        f.host.assign(*p, v);
                    } else {
                        throw RuntimeFault("unknown name '" + n.target.name + "'");
                    }
                } else if constexpr (std::is_same_v<T, LocalDeclStmt>) {
                    const Value v = coerce(eval(f, n.init), n.type);
                    f.scopes.back()[n.name.name] = Local{n.type, v};
                } else if constexpr (std::is_same_v<T, SendStmt>) {
                    std::vector<Value> args;
                    for (const auto& a : n.args) args.push_back(eval(f, a));
                    auto port = info_.port_index(n.port.name);
                    auto message = info_.message_index(n.message.name);
                    if (!port || !message) throw RuntimeFault("unknown port or message in send");
                    f.host.send(*port, *message, std::move(args));
                } else if constexpr (std::is_same_v<T, PrintStmt>) {
                    f.host.print(eval(f, n.value));
                } else if constexpr (std::is_same_v<T, IfStmt>) {
                    block(f, truth(eval(f, n.cond)) ? *n.then_body : *n.else_body);
                } else if constexpr (std::is_same_v<T, WhileStmt>) {
                    std::int64_t iterations = 0;
                    while (truth(eval(f, n.cond))) {
                        if (++iterations > kLoopLimit) throw RuntimeFault("loop limit exceeded");
                        block(f, *n.body);
                    }
                } else if constexpr (std::is_same_v<T, DaStmt>) {
                    f.host.da(n.action);
                }
            },
            st.node);
    }

    std::shared_ptr<const Model> model_;
    const Thing& thing_;
    ThingInfo info_;
    std::size_t initial_ = 0;
    std::vector<std::vector<std::size_t>> targets_;
};

}  // namespace

std::vector<std::unique_ptr<Behavior>> ast_behaviors(std::shared_ptr<const Model> model, const SystemInfo& system) {
    std::vector<std::unique_ptr<Behavior>> out;
    for (const auto& info : system.things) {
        const Thing* t = model->find_thing(info.name);
        if (!t) throw InstantiationError("unknown thing '" + info.name + "'");
        out.push_back(std::make_unique<AstBehavior>(model, *t, info));
    }
    return out;
}

std::unique_ptr<Simulation> instantiate(const Model& model, const std::string& config, const RunOptions& options) {
    const auto diagnostics = validate(model);
    for (const auto& d : diagnostics) {
        if (d.severity == Severity::Error) throw InstantiationError("model has errors: " + format_diagnostic(d));
    }
    auto shared = std::make_shared<const Model>(model);
    SystemInfo system = describe_system(*shared, config);
    auto behaviors = ast_behaviors(shared, system);
    return std::make_unique<Simulation>(std::move(system), std::move(behaviors), options);
}

Trace interpret(const Model& model, const std::string& config, const Scenario& scenario, const RunOptions& options) {
    auto sim = instantiate(model, config, options);
    return sim->run(scenario);
}

}  // namespace stf
