#include "stf/check/validator.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "stf/check/reachability.hpp"
#include "stf/ml/learners.hpp"
#include "stf/ml/metrics.hpp"
#include "stf/syntax/printer.hpp"

namespace stf {

namespace {

std::string quoted(const std::string& s) { return "'" + s + "'"; }
std::string type_name(ScalarType t) { return std::string(to_string(t)); }

class Validator {
public:
    Validator(const Model& m, const MetadataProvider* meta) : m_(m), meta_(meta) {}

    std::vector<Diagnostic> run() {
        top_level_names();
        for (const auto& t : m_.things) thing(t);
        for (const auto& c : m_.configurations) configuration(c);
        unconnected_ports();
        sort_diagnostics(out_);
        return std::move(out_);
    }

private:
    void add(const char* rule, const SourceSpan& span, std::string message, std::vector<SourceSpan> related = {}) {
        out_.push_back({rule, find_rule(rule)->severity, std::move(message), span, std::move(related)});
    }

    template <typename Range, typename NameOf, typename SpanOf>
    void unique(const Range& items, const std::string& what, NameOf name_of, SpanOf span_of) {
        std::map<std::string, SourceSpan> seen;
        for (const auto& item : items) {
            const std::string& n = name_of(item);
            auto [it, fresh] = seen.emplace(n, span_of(item));
            if (!fresh) add("E001", span_of(item), "duplicate " + what + " " + quoted(n), {it->second});
        }
    }

    void top_level_names() {
        unique(m_.things, "thing", [](const Thing& t) -> const std::string& { return t.name; },
               [](const Thing& t) { return t.span; });
        unique(m_.configurations, "configuration", [](const Configuration& c) -> const std::string& { return c.name; },
               [](const Configuration& c) { return c.span; });
    }

    // ---- things ----------------------------------------------------------

    void thing(const Thing& t) {
        unique(t.properties, "property", [](const Property& p) -> const std::string& { return p.name; },
               [](const Property& p) { return p.span; });
        unique(t.messages, "message", [](const Message& p) -> const std::string& { return p.name; },
               [](const Message& p) { return p.span; });
        unique(t.ports, "port", [](const Port& p) -> const std::string& { return p.name; },
               [](const Port& p) { return p.span; });
        for (const auto& msg : t.messages) {
            unique(msg.params, "parameter of message " + quoted(msg.name),
                   [](const Param& p) -> const std::string& { return p.name; }, [](const Param& p) { return p.span; });
        }
        for (const auto& p : t.properties) {
            if (p.initial && !assignable(p.initial->type(), p.type)) {
                add("E009", p.span,
                    "initial value of property " + quoted(p.name) + " is " + type_name(p.initial->type()) + ", expected " +
                        type_name(p.type));
            }
        }
        for (const auto& port : t.ports) {
            for (const auto* group : {&port.receives, &port.sends}) {
                for (const auto& r : *group) {
                    if (!t.find_message(r.name)) {
                        add("E002", r.span, "port " + quoted(port.name) + " references undeclared message " + quoted(r.name));
                    }
                }
            }
        }
        if (t.da) da_block(t, *t.da);
        if (!t.is_fragment) behavior(t);
    }

    // ---- DA block --------------------------------------------------------

    void da_block(const Thing& t, const DataAnalyticsSpec& da) {
        std::set<std::string> features;
        for (const auto* group : {&da.features, &da.labels}) {
            const bool is_feature = group == &da.features;
            std::set<std::string> seen;
            for (const auto& r : *group) {
                if (!t.find_property(r.name)) {
                    add("E004", r.span,
                        std::string(is_feature ? "feature " : "label ") + quoted(r.name) + " is not a property of " +
                            quoted(t.name));
                    continue;
                }
                if (!seen.insert(r.name).second) {
                    add("E004", r.span, std::string(is_feature ? "feature " : "label ") + quoted(r.name) + " listed twice");
                }
                if (is_feature) {
                    features.insert(r.name);
                } else if (features.count(r.name) && !da.sequential) {
                    add("E004", r.span, quoted(r.name) + " is both a feature and a label");
                }
            }
        }
        if (da.window) {
            if (!da.sequential) add("E010", da.window_span, "window/horizon requires 'sequential true'");
            if (da.window->lag < 1 || da.window->horizon < 1) {
                add("E010", da.window_span, "window and horizon must be positive");
            }
        }

        // Task kind from label types.
        Task kind = Task::Classification;
        bool known = false;
        bool mixed = false;
        for (const auto& r : da.labels) {
            const Property* p = t.find_property(r.name);
            if (!p) continue;
            const Task k = task_for(p->type);
            if (known && kind != k) mixed = true;
            kind = k;
            known = true;
        }
        if (mixed) {
            add("E006", da.labels.front().span, "labels mix classification (Bool/String) and regression (Int/Float) types");
            known = false;
        }
        const Task* task = known ? &kind : nullptr;

        if (const auto* e = std::get_if<ExpertMode>(&da.mode)) {
            const AlgorithmInfo* info = find_algorithm(e->algorithm.name);
            if (!info) {
                add("E006", e->algorithm.span, "unknown algorithm " + quoted(e->algorithm.name));
            } else {
                if (task && !supports(*info, *task)) {
                    const Property* label = t.find_property(da.labels.front().name);
                    add("E006", e->algorithm.span,
                        std::string(*task == Task::Regression ? "classification" : "regression") + " algorithm " +
                            quoted(e->algorithm.name) + " cannot predict " + type_name(label->type) + " label " +
                            quoted(label->name));
                }
                std::set<std::string> seen;
                for (const auto& h : e->hyperparams) {
                    if (!seen.insert(h.name).second) {
                        add("E006", h.span, "hyperparameter " + quoted(h.name) + " given twice");
                        continue;
                    }
                    if (!h.value.is_numeric()) {
                        add("E006", h.span, "hyperparameter " + quoted(h.name) + " must be a number");
                        continue;
                    }
                    if (auto why = check_hyperparam(*info, h.name, h.value.to_double()); !why.empty()) {
                        add("E006", h.span, "hyperparameter " + quoted(h.name) + " " + why);
                    }
                }
            }
            if (e->hyperparams.empty()) {
                add("H202", e->algorithm.span,
                    "expert mode with no hyperparameters; consider 'automl' to search algorithms and hyperparameters");
            }
        } else {
            const auto& a = std::get<AutoMlMode>(da.mode);
            if (!metric_known(a.metric.name)) {
                add("E006", a.metric.span, "unknown metric " + quoted(a.metric.name) + " (accuracy, macro_f1 or rmse)");
            } else if (task && !metric_supports(a.metric.name, *task)) {
                add("E006", a.metric.span,
                    "metric " + quoted(a.metric.name) + " does not apply to " + std::string(to_string(*task)));
            }
            if (a.folds < 2) add("E006", a.metric.span, "automl needs at least 2 folds");
            if (a.budget && *a.budget < 1) add("E006", a.metric.span, "automl budget must be at least 1");
        }

        if (!meta_) return;
        if (auto info = meta_->dataset(da.dataset)) {
            if (info->rows < 10 * da.features.size()) {
                add("H201", da.span,
                    "dataset " + quoted(da.dataset) + " has " + std::to_string(info->rows) + " rows for " +
                        std::to_string(da.features.size()) + " features; at least 10 rows per feature are advised");
            }
            if (da.scaling == Scaling::ZScore) {
                for (const auto& f : da.features) {
                    if (std::count(info->constant_columns.begin(), info->constant_columns.end(), f.name)) {
                        add("H203", f.span, "feature " + quoted(f.name) + " is constant; zscore scaling leaves it at zero");
                    }
                }
            }
        }
        if (da.pretrained) pretrained(t, da);
    }

    void pretrained(const Thing& t, const DataAnalyticsSpec& da) {
        auto info = meta_->pretrained(*da.pretrained);
        if (!info) return;
        const std::string where = "pretrained model " + quoted(*da.pretrained);
        if (!info->error.empty()) {
            add("E011", da.span, where + " cannot be loaded: " + info->error);
            return;
        }
        auto describe = [](const std::vector<FeatureSpec>& fs) {
            std::string s;
            for (const auto& f : fs) s += (s.empty() ? "" : ", ") + f.name + ":" + std::string(to_string(f.type));
            return "[" + s + "]";
        };
        auto declared = [&](const std::vector<Ref>& refs) {
            std::vector<FeatureSpec> out;
            for (const auto& r : refs) {
                const Property* p = t.find_property(r.name);
                out.push_back({r.name, p ? column_type_for(p->type) : ColumnType::Numeric});
            }
            return out;
        };
        std::vector<std::string> problems;
        const auto feats = declared(da.features);
        if (feats != info->features) {
            problems.push_back("expects features " + describe(info->features) + ", block declares " + describe(feats));
        }
        const auto labels = declared(da.labels);
        if (labels != info->labels) {
            problems.push_back("predicts labels " + describe(info->labels) + ", block declares " + describe(labels));
        }
        const std::optional<Window> window = da.sequential ? da.window : std::nullopt;
        if (window != info->window) problems.push_back("was trained with a different window");
        if (problems.empty()) return;
        std::string message = where;
        for (std::size_t i = 0; i < problems.size(); ++i) message += (i ? "; " : " ") + problems[i];
        add("E011", da.span, message);
    }

    // ---- statechart and action language ---------------------------------

    struct Scope {
        const Thing& thing;
        const Message* params = nullptr;
        std::vector<std::map<std::string, ScalarType>> locals;
    };

    std::optional<ScalarType> lookup(const Scope& s, const std::string& name) const {
        for (auto it = s.locals.rbegin(); it != s.locals.rend(); ++it) {
            auto f = it->find(name);
            if (f != it->end()) return f->second;
        }
        if (s.params) {
            for (const auto& p : s.params->params) {
                if (p.name == name) return p.type;
            }
        }
        if (const Property* p = s.thing.find_property(name)) return p->type;
        return std::nullopt;
    }

    std::optional<ScalarType> expr(const Expr& e, const Scope& s) {
        return std::visit(
            [&](const auto& n) -> std::optional<ScalarType> {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, LiteralExpr>) {
                    return n.value.type();
                } else if constexpr (std::is_same_v<T, NameExpr>) {
                    auto t = lookup(s, n.name);
                    if (!t) add("E009", e.span, "unknown name " + quoted(n.name));
                    return t;
                } else if constexpr (std::is_same_v<T, DaActionExpr>) {
                    add("E012", e.span,
                        std::string(to_string(n.action)) + " is an action and cannot be used inside an expression or guard");
                    return std::nullopt;
                } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                    auto t = expr(*n.operand, s);
                    if (!t) return std::nullopt;
                    auto r = unary_result_type(n.op, *t);
                    if (!r) {
                        add("E009", e.span,
                            std::string(n.op == UnaryOp::Not ? "'not'" : "unary '-'") + " cannot apply to " + type_name(*t));
                    }
                    return r;
                } else {
                    auto l = expr(*n.lhs, s);
                    auto r = expr(*n.rhs, s);
                    if (!l || !r) return std::nullopt;
                    auto res = binary_result_type(n.op, *l, *r);
                    if (!res) {
                        add("E009", e.span,
                            "operator '" + std::string(to_string(n.op)) + "' cannot apply to " + type_name(*l) + " and " +
                                type_name(*r));
                    }
                    return res;
                }
            },
            e.node);
    }

    void condition(const Expr& e, const Scope& s, const char* what) {
        auto t = expr(e, s);
        if (t && *t != ScalarType::Bool) add("E009", e.span, std::string(what) + " must be Bool, found " + type_name(*t));
    }

    void block(const Block& b, Scope& s) {
        s.locals.emplace_back();
        for (const auto& st : b) statement(st, s);
        s.locals.pop_back();
    }

    void statement(const Statement& st, Scope& s) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, AssignStmt>) {
                    std::optional<ScalarType> target;
                    bool is_param = false;
                    for (auto it = s.locals.rbegin(); it != s.locals.rend() && !target; ++it) {
                        auto f = it->find(n.target.name);
                        if (f != it->end()) target = f->second;
                    }
                    if (!target && s.params) {
                        for (const auto& p : s.params->params) is_param = is_param || p.name == n.target.name;
                    }
                    if (!target && !is_param) {
                        if (const Property* p = s.thing.find_property(n.target.name)) target = p->type;
                    }
                    auto v = expr(n.value, s);
                    if (is_param) {
                        add("E009", n.target.span, "message parameter " + quoted(n.target.name) + " cannot be assigned");
                    } else if (!target) {
                        add("E009", n.target.span, "assignment to unknown name " + quoted(n.target.name));
                    } else if (v && !assignable(*v, *target)) {
                        add("E009", st.span,
                            "cannot assign " + type_name(*v) + " to " + quoted(n.target.name) + " of type " + type_name(*target));
                    }
                } else if constexpr (std::is_same_v<T, LocalDeclStmt>) {
                    auto v = expr(n.init, s);
                    if (v && !assignable(*v, n.type)) {
                        add("E009", st.span,
                            "cannot initialize " + type_name(n.type) + " local " + quoted(n.name.name) + " with " + type_name(*v));
                    }
                    if (!s.locals.back().emplace(n.name.name, n.type).second) {
                        add("E009", n.name.span, "local " + quoted(n.name.name) + " already declared in this block");
                    }
                } else if constexpr (std::is_same_v<T, SendStmt>) {
                    send(n, st, s);
                } else if constexpr (std::is_same_v<T, PrintStmt>) {
                    expr(n.value, s);
                } else if constexpr (std::is_same_v<T, IfStmt>) {
                    condition(n.cond, s, "if condition");
                    block(*n.then_body, s);
                    block(*n.else_body, s);
                } else if constexpr (std::is_same_v<T, WhileStmt>) {
                    condition(n.cond, s, "while condition");
                    block(*n.body, s);
                } else if constexpr (std::is_same_v<T, DaStmt>) {
                    if (!s.thing.da) {
                        add("E005", st.span,
                            std::string(to_string(n.action)) + " used in thing " + quoted(s.thing.name) +
                                " which has no data_analytics block");
                    }
                }
            },
            st.node);
    }

    void send(const SendStmt& n, const Statement& st, const Scope& s) {
        std::vector<std::optional<ScalarType>> args;
        for (const auto& a : n.args) args.push_back(expr(a, s));
        const Port* port = s.thing.find_port(n.port.name);
        if (!port) {
            add("E009", n.port.span, "send on unknown port " + quoted(n.port.name));
            return;
        }
        const bool declared = std::any_of(port->sends.begin(), port->sends.end(),
                                          [&](const Ref& r) { return r.name == n.message.name; });
        if (!declared) {
            add("E009", n.message.span, "port " + quoted(port->name) + " does not send " + quoted(n.message.name));
            return;
        }
        const Message* msg = s.thing.find_message(n.message.name);
        if (!msg) return;  // E002 already reported
        if (msg->params.size() != n.args.size()) {
            add("E009", st.span,
                "message " + quoted(msg->name) + " takes " + std::to_string(msg->params.size()) + " argument(s), " +
                    std::to_string(n.args.size()) + " given");
            return;
        }
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] && !assignable(*args[i], msg->params[i].type)) {
                add("E009", n.args[i].span,
                    "argument " + quoted(msg->params[i].name) + " of " + quoted(msg->name) + " expects " +
                        type_name(msg->params[i].type) + ", found " + type_name(*args[i]));
            }
        }
    }

    void behavior(const Thing& t) {
        const StateMachine& sm = t.behavior;
        unique(sm.states, "state", [](const State& s) -> const std::string& { return s.name; },
               [](const State& s) { return s.span; });
        const Reachability reach = reachability(sm);
        if (!reach.initial_known) {
            add("E008", sm.initial.span, "initial state " + quoted(sm.initial.name) + " is not declared");
        }
        for (std::size_t i = 0; i < sm.states.size(); ++i) {
            const State& st = sm.states[i];
            if (reach.initial_known && !reach.reachable[i]) {
                add("E008", st.span, "state " + quoted(st.name) + " is unreachable from " + quoted(sm.initial.name));
            }
            Scope scope{t, nullptr, {}};
            block(st.on_entry, scope);
            block(st.on_exit, scope);
            for (const auto& tr : st.transitions) transition(t, tr);
        }
        if (t.da && !t.da->pretrained) {
            for (const Statement* site : reach.untrained_predicts.sites) {
                add("W101", site->span,
                    "da_predict is reachable on a path without da_train and no pretrained model is declared");
            }
        }
        if (t.da) {
            for (const Statement* site : reach.unprepared_trains.sites) {
                add("W103", site->span, "da_train is reachable on a path without a preceding da_preprocess");
            }
        }
    }

    void transition(const Thing& t, const Transition& tr) {
        if (!t.find_state(tr.target.name)) {
            add("E008", tr.target.span, "transition target " + quoted(tr.target.name) + " is not a state");
        }
        const Message* params = nullptr;
        if (tr.event) {
            const Port* port = t.find_port(tr.event->port.name);
            const Message* msg = t.find_message(tr.event->message.name);
            if (!port) {
                add("E003", tr.event->port.span, "event names unknown port " + quoted(tr.event->port.name));
            } else if (std::none_of(port->receives.begin(), port->receives.end(),
                                    [&](const Ref& r) { return r.name == tr.event->message.name; })) {
                add("E003", tr.event->message.span,
                    "port " + quoted(port->name) + " does not receive " + quoted(tr.event->message.name));
            }
            params = msg;
        }
        Scope scope{t, params, {}};
        if (tr.guard) condition(*tr.guard, scope, "guard");
        block(tr.actions, scope);
    }

    // ---- configurations --------------------------------------------------

    void configuration(const Configuration& c) {
        unique(c.instances, "instance", [](const Instance& i) -> const std::string& { return i.name.name; },
               [](const Instance& i) { return i.name.span; });
        std::map<std::string, const Thing*> kinds;
        for (const auto& inst : c.instances) {
            const Thing* t = m_.find_thing(inst.thing.name);
            if (!t) {
                add("E007", inst.thing.span, "instance " + quoted(inst.name.name) + " of unknown thing " + quoted(inst.thing.name));
            } else if (t->is_fragment) {
                add("E007", inst.thing.span, "thing fragment " + quoted(t->name) + " cannot be instantiated");
                t = nullptr;
            }
            kinds.emplace(inst.name.name, t);
        }
        for (const auto& k : c.connectors) {
            const Port* ports[2] = {nullptr, nullptr};
            const Thing* things[2] = {nullptr, nullptr};
            bool ok = true;
            for (int side = 0; side < 2; ++side) {
                const Endpoint& e = side == 0 ? k.left : k.right;
                auto it = kinds.find(e.instance.name);
                if (it == kinds.end()) {
                    add("E007", e.instance.span, "connector names unknown instance " + quoted(e.instance.name));
                    ok = false;
                    continue;
                }
                if (!it->second) {
                    ok = false;
                    continue;
                }
                things[side] = it->second;
                ports[side] = it->second->find_port(e.port.name);
                if (!ports[side]) {
                    add("E007", e.port.span, "thing " + quoted(it->second->name) + " has no port " + quoted(e.port.name));
                    ok = false;
                }
            }
            if (!ok) continue;
            for (int side = 0; side < 2; ++side) {
                const Port& from = *ports[side];
                const Port& to = *ports[1 - side];
                for (const auto& msg : from.sends) {
                    const bool received = std::any_of(to.receives.begin(), to.receives.end(),
                                                      [&](const Ref& r) { return r.name == msg.name; });
                    if (!received) {
                        add("E007", k.span,
                            "port " + quoted(from.name) + " sends " + quoted(msg.name) + " but peer port " + quoted(to.name) +
                                " does not receive it");
                        continue;
                    }
                    const Message* a = things[side]->find_message(msg.name);
                    const Message* b = things[1 - side]->find_message(msg.name);
                    if (a && b) {
                        bool same = a->params.size() == b->params.size();
                        for (std::size_t i = 0; same && i < a->params.size(); ++i) same = a->params[i].type == b->params[i].type;
                        if (!same) {
                            add("E007", k.span, "message " + quoted(msg.name) + " has different parameter types on each side");
                        }
                    }
                }
            }
        }
    }

    void unconnected_ports() {
        std::set<std::string> instantiated;
        std::set<std::pair<std::string, std::string>> connected;
        for (const auto& c : m_.configurations) {
            std::map<std::string, std::string> kinds;
            for (const auto& i : c.instances) {
                kinds[i.name.name] = i.thing.name;
                instantiated.insert(i.thing.name);
            }
            for (const auto& k : c.connectors) {
                for (const Endpoint* e : {&k.left, &k.right}) {
                    auto it = kinds.find(e->instance.name);
                    if (it != kinds.end()) connected.emplace(it->second, e->port.name);
                }
            }
        }
        for (const auto& t : m_.things) {
            if (!instantiated.count(t.name)) continue;
            for (const auto& p : t.ports) {
                if (!p.receives.empty() && !connected.count({t.name, p.name})) {
                    add("W102", p.span,
                        "receiving port " + quoted(p.name) + " of " + quoted(t.name) + " is never connected");
                }
            }
        }
    }

    const Model& m_;
    const MetadataProvider* meta_;
    std::vector<Diagnostic> out_;
};

}  // namespace

std::vector<Diagnostic> validate(const Model& m, const MetadataProvider* datasets) {
    return Validator(m, datasets).run();
}

}  // namespace stf
