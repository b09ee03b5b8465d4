#include "stf/codegen/bundle.hpp"
#include "stf/model/error.hpp"
#include "stf/runtime/ops.hpp"

namespace stf {

namespace {

class CompiledBehavior : public Behavior {
public:
    explicit CompiledBehavior(std::shared_ptr<const CompiledThing> thing) : thing_(std::move(thing)) {}

    std::size_t initial_state() const override { return thing_->initial; }

    void entry(Host& host, std::size_t state) override { run(host, nullptr, thing_->states[state].entry); }
    void exit(Host& host, std::size_t state) override { run(host, nullptr, thing_->states[state].exit); }

    std::optional<std::size_t> select(const Host& host, std::size_t state, const Envelope* msg) override {
        const auto& transitions = thing_->states[state].transitions;
        for (std::size_t i = 0; i < transitions.size(); ++i) {
            const CTransition& t = transitions[i];
            if (msg) {
                if (!t.event || t.event->first != msg->port || t.event->second != msg->message) continue;
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
        return thing_->states[state].transitions[transition].target;
    }

    void actions(Host& host, std::size_t state, std::size_t transition, const Envelope* msg) override {
        run(host, msg, thing_->states[state].transitions[transition].actions);
    }

private:
    struct Frame {
        Host& host;
        const Envelope* msg;
        std::vector<Value> locals;
    };

    void run(Host& host, const Envelope* msg, const CBody& body) {
        Frame f{host, msg, std::vector<Value>(body.locals)};
        code(f, body.code);
    }

    Value eval(Frame& f, const CExpr& e) {
        switch (e.kind) {
            case CExpr::Kind::Literal: return e.literal;
            case CExpr::Kind::Property: return f.host.property(e.index);
            case CExpr::Kind::Param:
                if (!f.msg || e.index >= f.msg->args.size()) throw RuntimeFault("parameter read without a message");
                return f.msg->args[e.index];
            case CExpr::Kind::Local: return f.locals.at(e.index);
            case CExpr::Kind::Unary: return apply_unary(e.unary, eval(f, e.operands[0]));
            case CExpr::Kind::Binary: {
                const Value l = eval(f, e.operands[0]);
                if (e.binary == BinaryOp::And || e.binary == BinaryOp::Or) {
                    const bool lv = truth(l);
                    if (e.binary == BinaryOp::And ? !lv : lv) return Value::boolean(lv);
                    return Value::boolean(truth(eval(f, e.operands[1])));
                }
                return apply_binary(e.binary, l, eval(f, e.operands[1]));
            }
        }
        throw RuntimeFault("bad expression");
    }

    void code(Frame& f, const std::vector<CStmt>& stmts) {
        for (const auto& s : stmts) statement(f, s);
    }

    void statement(Frame& f, const CStmt& s) {
        switch (s.kind) {
            case CStmt::Kind::AssignProperty: f.host.assign(s.index, eval(f, s.exprs[0])); break;
            case CStmt::Kind::DeclareLocal:
            case CStmt::Kind::SetLocal: {
                const Value v = coerce(eval(f, s.exprs[0]), s.type);
                f.locals.at(s.index) = v;
                break;
            }
            case CStmt::Kind::Send: {
                std::vector<Value> args;
                for (const auto& a : s.exprs) args.push_back(eval(f, a));
                f.host.send(s.index, s.message, std::move(args));
                break;
            }
            case CStmt::Kind::Print: f.host.print(eval(f, s.exprs[0])); break;
            case CStmt::Kind::If: code(f, truth(eval(f, s.exprs[0])) ? s.body : s.else_body); break;
            case CStmt::Kind::While: {
                std::int64_t iterations = 0;
                while (truth(eval(f, s.exprs[0]))) {
                    if (++iterations > kLoopLimit) throw RuntimeFault("loop limit exceeded");
                    code(f, s.body);
                }
                break;
            }
            case CStmt::Kind::Da: f.host.da(s.action); break;
        }
    }

    std::shared_ptr<const CompiledThing> thing_;
};

}  // namespace

std::vector<std::unique_ptr<Behavior>> bundle_behaviors(const Bundle& b) {
    std::vector<std::unique_ptr<Behavior>> out;
    for (const auto& t : b.things) out.push_back(std::make_unique<CompiledBehavior>(t));
    return out;
}

std::unique_ptr<Simulation> instantiate_bundle(const Bundle& b, const RunOptions& options) {
    return std::make_unique<Simulation>(b.system, bundle_behaviors(b), options);
}

Trace run_bundle(const Bundle& b, const Scenario& scenario, const RunOptions& options) {
    return instantiate_bundle(b, options)->run(scenario);
}

}  // namespace stf
