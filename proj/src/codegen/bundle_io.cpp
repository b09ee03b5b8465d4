#include <array>

#include "stf/codegen/bundle.hpp"
#include "stf/model/error.hpp"
#include "stf/syntax/parser.hpp"

namespace stf {

using json = nlohmann::json;

namespace {

constexpr std::array kBinaryOps = {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div, BinaryOp::Mod,
                                   BinaryOp::Eq,  BinaryOp::Ne,  BinaryOp::Lt,  BinaryOp::Le,  BinaryOp::Gt,
                                   BinaryOp::Ge,  BinaryOp::And, BinaryOp::Or};
constexpr std::array kDaActions = {DaAction::Save, DaAction::Preprocess, DaAction::Train, DaAction::Predict};

std::string_view unary_name(UnaryOp op) { return op == UnaryOp::Neg ? "-" : "not"; }

std::string_view da_name(DaAction a) {
    switch (a) {
        case DaAction::Save: return "save";
        case DaAction::Preprocess: return "preprocess";
        case DaAction::Train: return "train";
        case DaAction::Predict: return "predict";
    }
    return "?";
}

json raw_value(const Value& v) {
    switch (v.type()) {
        case ScalarType::Int:
        case ScalarType::Timestamp: return v.as_int();
        case ScalarType::Float: return v.as_float();
        case ScalarType::Bool: return v.as_bool();
        case ScalarType::String: return v.as_string();
    }
    return nullptr;
}

json expr_json(const CExpr& e) {
    switch (e.kind) {
        case CExpr::Kind::Literal: return {"lit", to_string(e.literal.type()), raw_value(e.literal)};
        case CExpr::Kind::Property: return {"prop", e.index};
        case CExpr::Kind::Param: return {"param", e.index};
        case CExpr::Kind::Local: return {"local", e.index};
        case CExpr::Kind::Unary: return {"un", unary_name(e.unary), expr_json(e.operands[0])};
        case CExpr::Kind::Binary:
            return {"bin", to_string(e.binary), expr_json(e.operands[0]), expr_json(e.operands[1])};
    }
    return nullptr;
}

json code_json(const std::vector<CStmt>& code);

json stmt_json(const CStmt& s) {
    switch (s.kind) {
        case CStmt::Kind::AssignProperty: return {"assign", s.index, expr_json(s.exprs[0])};
        case CStmt::Kind::DeclareLocal: return {"local", s.index, to_string(s.type), expr_json(s.exprs[0])};
        case CStmt::Kind::SetLocal: return {"set", s.index, to_string(s.type), expr_json(s.exprs[0])};
        case CStmt::Kind::Send: {
            json args = json::array();
            for (const auto& a : s.exprs) args.push_back(expr_json(a));
            return {"send", s.index, s.message, args};
        }
        case CStmt::Kind::Print: return {"print", expr_json(s.exprs[0])};
        case CStmt::Kind::If: return {"if", expr_json(s.exprs[0]), code_json(s.body), code_json(s.else_body)};
        case CStmt::Kind::While: return {"while", expr_json(s.exprs[0]), code_json(s.body)};
        case CStmt::Kind::Da: return {"da", da_name(s.action)};
    }
    return nullptr;
}

json code_json(const std::vector<CStmt>& code) {
    json a = json::array();
    for (const auto& s : code) a.push_back(stmt_json(s));
    return a;
}

json body_json(const CBody& b) { return {{"locals", b.locals}, {"code", code_json(b.code)}}; }

json features_json(const std::vector<FeatureSpec>& fs) {
    json a = json::array();
    for (const auto& f : fs) a.push_back({{"name", f.name}, {"type", to_string(f.type)}});
    return a;
}

json da_json(const DaConfig& d) {
    json j;
    j["dataset"] = d.dataset;
    j["features"] = features_json(d.pipeline.features);
    j["labels"] = features_json(d.pipeline.labels);
    j["task"] = to_string(d.pipeline.task);
    j["sequential"] = d.pipeline.sequential;
    j["window"] = d.pipeline.window ? json{{"lag", d.pipeline.window->lag}, {"horizon", d.pipeline.window->horizon}}
                                    : json(nullptr);
    j["scaling"] = to_string(d.pipeline.scaling);
    j["missing"] = to_string(d.pipeline.missing);
    if (d.automl) {
        j["mode"] = "automl";
        j["metric"] = d.metric;
        j["folds"] = d.folds;
        j["budget"] = d.budget;
    } else {
        j["mode"] = "expert";
        j["algorithm"] = d.expert.algorithm;
        j["hyperparams"] = d.expert.hyperparams;
    }
    j["pretrained"] = d.pretrained ? json(*d.pretrained) : json(nullptr);
    j["pretrained_model"] = d.pretrained_json ? json::parse(*d.pretrained_json) : json(nullptr);
    j["backend"] = d.backend;
    return j;
}

json thing_json(const CompiledThing& t) {
    const ThingInfo& info = t.info;
    json j;
    j["name"] = info.name;
    j["properties"] = json::array();
    for (const auto& p : info.properties) {
        j["properties"].push_back({{"name", p.name}, {"type", to_string(p.type)}, {"initial", raw_value(p.initial)}});
    }
    j["messages"] = json::array();
    for (const auto& m : info.messages) {
        json params = json::array();
        for (const auto& p : m.params) params.push_back({{"name", p.name}, {"type", to_string(p.type)}});
        j["messages"].push_back({{"name", m.name}, {"params", params}});
    }
    j["ports"] = json::array();
    for (const auto& p : info.ports) {
        j["ports"].push_back({{"name", p.name}, {"receives", p.receives}, {"sends", p.sends}});
    }
    j["initial"] = t.initial;
    j["states"] = json::array();
    for (const auto& s : t.states) {
        json transitions = json::array();
        for (const auto& tr : s.transitions) {
            transitions.push_back({{"target", tr.target},
                                   {"event", tr.event ? json{tr.event->first, tr.event->second} : json(nullptr)},
                                   {"guard", tr.guard ? expr_json(*tr.guard) : json(nullptr)},
                                   {"actions", body_json(tr.actions)}});
        }
        j["states"].push_back(
            {{"name", s.name}, {"entry", body_json(s.entry)}, {"exit", body_json(s.exit)}, {"transitions", transitions}});
    }
    j["da"] = info.da ? da_json(*info.da) : json(nullptr);
    return j;
}

// Reading.

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
        throw BundleError(source_ + ": " + path + ": " + msg);
    }

    const json& field(const json& obj, const std::string& path, const char* key) const {
        if (!obj.is_object()) fail(path, "expected an object");
        auto it = obj.find(key);
        if (it == obj.end()) fail(path, std::string("missing field '") + key + "'");
        return *it;
    }

    const json& array(const json& j, const std::string& path) const {
        if (!j.is_array()) fail(path, "expected an array");
        return j;
    }

    const json& element(const json& arr, const std::string& path, std::size_t i) const {
        if (!arr.is_array() || i >= arr.size()) fail(path, "expected at least " + std::to_string(i + 1) + " elements");
        return arr[i];
    }

    std::string string(const json& j, const std::string& path) const {
        if (!j.is_string()) fail(path, "expected a string");
        return j.get<std::string>();
    }

    bool boolean(const json& j, const std::string& path) const {
        if (!j.is_boolean()) fail(path, "expected a boolean");
        return j.get<bool>();
    }

    std::int64_t integer(const json& j, const std::string& path) const {
        if (!j.is_number_integer()) fail(path, "expected an integer");
        return j.get<std::int64_t>();
    }

    std::size_t index(const json& j, const std::string& path, std::size_t bound, const char* what) const {
        const std::int64_t v = integer(j, path);
        if (v < 0 || static_cast<std::size_t>(v) >= bound) {
            fail(path, "index " + std::to_string(v) + " out of range (" + std::to_string(bound) + " " + what + ")");
        }
        return static_cast<std::size_t>(v);
    }

    ScalarType scalar_type(const json& j, const std::string& path) const {
        auto t = parse_scalar_type(string(j, path));
        if (!t) fail(path, "unknown type '" + j.get<std::string>() + "'");
        return *t;
    }

    Value value(const json& j, ScalarType t, const std::string& path) const {
        switch (t) {
            case ScalarType::Int: return Value::integer(integer(j, path));
            case ScalarType::Timestamp: return Value::timestamp(integer(j, path));
            case ScalarType::Float:
                if (!j.is_number()) fail(path, "expected a number");
                return Value::real(j.get<double>());
            case ScalarType::Bool: return Value::boolean(boolean(j, path));
            case ScalarType::String: return Value::string(string(j, path));
        }
        fail(path, "bad value");
    }

    template <typename E, std::size_t N, typename Name>
    E enumerator(const json& j, const std::string& path, const std::array<E, N>& all, Name name_of) const {
        const std::string s = string(j, path);
        for (E e : all) {
            if (name_of(e) == s) return e;
        }
        fail(path, "unknown value '" + s + "'");
    }

private:
    std::string source_;
};

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }
std::string at(const std::string& path, int i) { return at(path, static_cast<std::size_t>(i)); }
std::string at(const std::string& path, const char* key) { return path + "." + key; }

class ThingLoader {
public:
    ThingLoader(const Reader& r, const json& j, std::string path) : r_(r), j_(j), path_(std::move(path)) {}

    CompiledThing load() {
        CompiledThing t;
        ThingInfo& info = t.info;
        info.name = r_.string(r_.field(j_, path_, "name"), at(path_, "name"));
        const std::string pp = at(path_, "properties");
        const json& props = r_.array(r_.field(j_, path_, "properties"), pp);
        for (std::size_t i = 0; i < props.size(); ++i) {
            const std::string p = at(pp, i);
            PropertyInfo pi;
            pi.name = r_.string(r_.field(props[i], p, "name"), at(p, "name"));
            pi.type = r_.scalar_type(r_.field(props[i], p, "type"), at(p, "type"));
            pi.initial = r_.value(r_.field(props[i], p, "initial"), pi.type, at(p, "initial"));
            info.properties.push_back(std::move(pi));
        }
        const std::string mp = at(path_, "messages");
        const json& msgs = r_.array(r_.field(j_, path_, "messages"), mp);
        for (std::size_t i = 0; i < msgs.size(); ++i) {
            const std::string p = at(mp, i);
            MessageInfo mi;
            mi.name = r_.string(r_.field(msgs[i], p, "name"), at(p, "name"));
            const json& params = r_.array(r_.field(msgs[i], p, "params"), at(p, "params"));
            for (std::size_t k = 0; k < params.size(); ++k) {
                const std::string q = at(at(p, "params"), k);
                mi.params.push_back({r_.string(r_.field(params[k], q, "name"), at(q, "name")),
                                     r_.scalar_type(r_.field(params[k], q, "type"), at(q, "type"))});
            }
            info.messages.push_back(std::move(mi));
        }
        const std::string portp = at(path_, "ports");
        const json& ports = r_.array(r_.field(j_, path_, "ports"), portp);
        for (std::size_t i = 0; i < ports.size(); ++i) {
            const std::string p = at(portp, i);
            PortInfo pi;
            pi.name = r_.string(r_.field(ports[i], p, "name"), at(p, "name"));
            pi.receives = message_names(r_.field(ports[i], p, "receives"), at(p, "receives"), info);
            pi.sends = message_names(r_.field(ports[i], p, "sends"), at(p, "sends"), info);
            info.ports.push_back(std::move(pi));
        }
        const std::string sp = at(path_, "states");
        const json& states = r_.array(r_.field(j_, path_, "states"), sp);
        if (states.empty()) r_.fail(sp, "a thing needs at least one state");
        for (std::size_t i = 0; i < states.size(); ++i) {
            info.states.push_back(r_.string(r_.field(states[i], at(sp, i), "name"), at(at(sp, i), "name")));
        }
        info_ = &info;
        const json& da = r_.field(j_, path_, "da");
        if (!da.is_null()) info.da = da_config(da, at(path_, "da"));
        t.initial = r_.index(r_.field(j_, path_, "initial"), at(path_, "initial"), states.size(), "states");
        for (std::size_t i = 0; i < states.size(); ++i) t.states.push_back(state(states[i], at(sp, i)));
        return t;
    }

private:
    std::vector<std::string> message_names(const json& j, const std::string& path, const ThingInfo& info) const {
        std::vector<std::string> out;
        r_.array(j, path);
        for (std::size_t i = 0; i < j.size(); ++i) {
            out.push_back(r_.string(j[i], at(path, i)));
            if (!info.message_index(out.back())) r_.fail(at(path, i), "unknown message '" + out.back() + "'");
        }
        return out;
    }

    CState state(const json& j, const std::string& path) {
        CState s;
        s.name = r_.string(r_.field(j, path, "name"), at(path, "name"));
        s.entry = body(r_.field(j, path, "entry"), at(path, "entry"), nullptr);
        s.exit = body(r_.field(j, path, "exit"), at(path, "exit"), nullptr);
        const std::string tp = at(path, "transitions");
        const json& ts = r_.array(r_.field(j, path, "transitions"), tp);
        for (std::size_t i = 0; i < ts.size(); ++i) s.transitions.push_back(transition(ts[i], at(tp, i)));
        return s;
    }

    CTransition transition(const json& j, const std::string& path) {
        CTransition t;
        t.target = r_.index(r_.field(j, path, "target"), at(path, "target"), info_->states.size(), "states");
        const MessageInfo* msg = nullptr;
        const json& ev = r_.field(j, path, "event");
        if (!ev.is_null()) {
            const std::string ep = at(path, "event");
            r_.array(ev, ep);
            if (ev.size() != 2) r_.fail(ep, "expected [port, message]");
            const std::size_t port = r_.index(ev[0], at(ep, 0), info_->ports.size(), "ports");
            const std::size_t message = r_.index(ev[1], at(ep, 1), info_->messages.size(), "messages");
            t.event = std::make_pair(port, message);
            msg = &info_->messages[message];
        }
        const json& guard = r_.field(j, path, "guard");
        if (!guard.is_null()) {
            msg_ = msg;
            locals_ = 0;
            t.guard = expr(guard, at(path, "guard"));
        }
        t.actions = body(r_.field(j, path, "actions"), at(path, "actions"), msg);
        return t;
    }

    CBody body(const json& j, const std::string& path, const MessageInfo* msg) {
        CBody b;
        msg_ = msg;
        const std::int64_t locals = r_.integer(r_.field(j, path, "locals"), at(path, "locals"));
        if (locals < 0 || locals > 1'000'000) r_.fail(at(path, "locals"), "bad local count");
        b.locals = static_cast<std::size_t>(locals);
        locals_ = b.locals;
        b.code = code(r_.field(j, path, "code"), at(path, "code"));
        return b;
    }

    std::vector<CStmt> code(const json& j, const std::string& path) {
        r_.array(j, path);
        std::vector<CStmt> out;
        for (std::size_t i = 0; i < j.size(); ++i) out.push_back(statement(j[i], at(path, i)));
        return out;
    }

    void arity(const json& j, const std::string& path, std::size_t n) const {
        if (j.size() != n) r_.fail(path, "expected " + std::to_string(n) + " elements");
    }

    CStmt statement(const json& j, const std::string& path) {
        r_.array(j, path);
        const std::string op = r_.string(r_.element(j, path, 0), at(path, 0));
        CStmt s;
        if (op == "assign") {
            arity(j, path, 3);
            s.kind = CStmt::Kind::AssignProperty;
            s.index = r_.index(j[1], at(path, 1), info_->properties.size(), "properties");
            s.exprs.push_back(expr(j[2], at(path, 2)));
        } else if (op == "local" || op == "set") {
            arity(j, path, 4);
            s.kind = op == "local" ? CStmt::Kind::DeclareLocal : CStmt::Kind::SetLocal;
            s.index = r_.index(j[1], at(path, 1), locals_, "locals");
            s.type = r_.scalar_type(j[2], at(path, 2));
            s.exprs.push_back(expr(j[3], at(path, 3)));
        } else if (op == "send") {
            arity(j, path, 4);
            s.kind = CStmt::Kind::Send;
            s.index = r_.index(j[1], at(path, 1), info_->ports.size(), "ports");
            s.message = r_.index(j[2], at(path, 2), info_->messages.size(), "messages");
            const json& args = r_.array(j[3], at(path, 3));
            if (args.size() != info_->messages[s.message].params.size()) {
                r_.fail(at(path, 3), "argument count does not match message '" + info_->messages[s.message].name + "'");
            }
            for (std::size_t i = 0; i < args.size(); ++i) s.exprs.push_back(expr(args[i], at(at(path, 3), i)));
        } else if (op == "print") {
            arity(j, path, 2);
            s.kind = CStmt::Kind::Print;
            s.exprs.push_back(expr(j[1], at(path, 1)));
        } else if (op == "if") {
            arity(j, path, 4);
            s.kind = CStmt::Kind::If;
            s.exprs.push_back(expr(j[1], at(path, 1)));
            s.body = code(j[2], at(path, 2));
            s.else_body = code(j[3], at(path, 3));
        } else if (op == "while") {
            arity(j, path, 3);
            s.kind = CStmt::Kind::While;
            s.exprs.push_back(expr(j[1], at(path, 1)));
            s.body = code(j[2], at(path, 2));
        } else if (op == "da") {
            arity(j, path, 2);
            if (!info_->da) r_.fail(path, "DA action in a thing without a DA configuration");
            s.kind = CStmt::Kind::Da;
            s.action = r_.enumerator(j[1], at(path, 1), kDaActions, da_name);
        } else {
            r_.fail(at(path, 0), "unknown statement '" + op + "'");
        }
        return s;
    }

    CExpr expr(const json& j, const std::string& path) const {
        r_.array(j, path);
        const std::string op = r_.string(r_.element(j, path, 0), at(path, 0));
        CExpr e;
        if (op == "lit") {
            arity(j, path, 3);
            e.kind = CExpr::Kind::Literal;
            e.literal = r_.value(j[2], r_.scalar_type(j[1], at(path, 1)), at(path, 2));
        } else if (op == "prop") {
            arity(j, path, 2);
            e.kind = CExpr::Kind::Property;
            e.index = r_.index(j[1], at(path, 1), info_->properties.size(), "properties");
        } else if (op == "param") {
            arity(j, path, 2);
            e.kind = CExpr::Kind::Param;
            e.index = r_.index(j[1], at(path, 1), msg_ ? msg_->params.size() : 0, "parameters");
        } else if (op == "local") {
            arity(j, path, 2);
            e.kind = CExpr::Kind::Local;
            e.index = r_.index(j[1], at(path, 1), locals_, "locals");
        } else if (op == "un") {
            arity(j, path, 3);
            e.kind = CExpr::Kind::Unary;
            e.unary = r_.enumerator(j[1], at(path, 1), std::array{UnaryOp::Neg, UnaryOp::Not}, unary_name);
            e.operands.push_back(expr(j[2], at(path, 2)));
        } else if (op == "bin") {
            arity(j, path, 4);
            e.kind = CExpr::Kind::Binary;
            e.binary = r_.enumerator(j[1], at(path, 1), kBinaryOps, [](BinaryOp b) { return to_string(b); });
            e.operands.push_back(expr(j[2], at(path, 2)));
            e.operands.push_back(expr(j[3], at(path, 3)));
        } else {
            r_.fail(at(path, 0), "unknown expression '" + op + "'");
        }
        return e;
    }

    std::vector<FeatureSpec> features(const json& j, const std::string& path) const {
        std::vector<FeatureSpec> out;
        r_.array(j, path);
        for (std::size_t i = 0; i < j.size(); ++i) {
            const std::string p = at(path, i);
            FeatureSpec f;
            f.name = r_.string(r_.field(j[i], p, "name"), at(p, "name"));
            const std::string type = r_.string(r_.field(j[i], p, "type"), at(p, "type"));
            auto t = parse_column_type(type);
            if (!t) r_.fail(at(p, "type"), "unknown column type '" + type + "'");
            f.type = *t;
            if (!info_->property_index(f.name)) r_.fail(at(p, "name"), "unknown property '" + f.name + "'");
            out.push_back(std::move(f));
        }
        return out;
    }

    DaConfig da_config(const json& j, const std::string& path) const {
        DaConfig d;
        auto f = [&](const char* key) -> const json& { return r_.field(j, path, key); };
        d.dataset = r_.string(f("dataset"), at(path, "dataset"));
        d.pipeline.features = features(f("features"), at(path, "features"));
        d.pipeline.labels = features(f("labels"), at(path, "labels"));
        d.pipeline.task = r_.enumerator(f("task"), at(path, "task"), std::array{Task::Classification, Task::Regression},
                                        [](Task t) { return to_string(t); });
        d.pipeline.sequential = r_.boolean(f("sequential"), at(path, "sequential"));
        if (!f("window").is_null()) {
            const std::string wp = at(path, "window");
            Window w;
            w.lag = r_.integer(r_.field(f("window"), wp, "lag"), at(wp, "lag"));
            w.horizon = r_.integer(r_.field(f("window"), wp, "horizon"), at(wp, "horizon"));
            if (w.lag < 1 || w.horizon < 1) r_.fail(wp, "lag and horizon must be positive");
            d.pipeline.window = w;
        }
        d.pipeline.scaling =
            r_.enumerator(f("scaling"), at(path, "scaling"), std::array{Scaling::None, Scaling::MinMax, Scaling::ZScore},
                          [](Scaling s) { return to_string(s); });
        d.pipeline.missing =
            r_.enumerator(f("missing"), at(path, "missing"), std::array{MissingPolicy::Drop, MissingPolicy::MeanImpute},
                          [](MissingPolicy m) { return to_string(m); });
        const std::string mode = r_.string(f("mode"), at(path, "mode"));
        if (mode == "automl") {
            d.automl = true;
            d.metric = r_.string(f("metric"), at(path, "metric"));
            d.folds = r_.integer(f("folds"), at(path, "folds"));
            d.budget = r_.integer(f("budget"), at(path, "budget"));
        } else if (mode == "expert") {
            d.expert.algorithm = r_.string(f("algorithm"), at(path, "algorithm"));
            const json& hp = f("hyperparams");
            if (!hp.is_object()) r_.fail(at(path, "hyperparams"), "expected an object");
            for (auto it = hp.begin(); it != hp.end(); ++it) {
                if (!it->is_number()) r_.fail(at(at(path, "hyperparams"), it.key().c_str()), "expected a number");
                d.expert.hyperparams[it.key()] = it->get<double>();
            }
        } else {
            r_.fail(at(path, "mode"), "unknown mode '" + mode + "'");
        }
        if (!f("pretrained").is_null()) d.pretrained = r_.string(f("pretrained"), at(path, "pretrained"));
        const json& embedded = f("pretrained_model");
        if (!embedded.is_null()) {
            if (!embedded.is_object()) r_.fail(at(path, "pretrained_model"), "expected an object");
            d.pretrained_json = embedded.dump();
        }
        d.backend = r_.string(f("backend"), at(path, "backend"));
        if (d.backend != "builtin") r_.fail(at(path, "backend"), "unsupported backend '" + d.backend + "'");
        return d;
    }

    const Reader& r_;
    const json& j_;
    std::string path_;
    const ThingInfo* info_ = nullptr;
    const MessageInfo* msg_ = nullptr;
    std::size_t locals_ = 0;
};

}  // namespace

json bundle_json(const Bundle& b) {
    json j;
    j["format_version"] = b.format_version;
    j["manifest"] = {{"tool", b.manifest.tool},
                     {"tool_version", b.manifest.tool_version},
                     {"model_hash", b.manifest.model_hash},
                     {"default_backend", b.manifest.default_backend ? json(*b.manifest.default_backend) : json(nullptr)}};
    json instances = json::array();
    for (const auto& i : b.system.instances) instances.push_back({{"name", i.name}, {"thing", i.thing}});
    json connectors = json::array();
    for (const auto& l : b.system.links) {
        connectors.push_back({{"left", {l.left_instance, l.left_port}}, {"right", {l.right_instance, l.right_port}}});
    }
    j["configuration"] = {{"name", b.system.configuration}, {"instances", instances}, {"connectors", connectors}};
    j["things"] = json::array();
    for (const auto& t : b.things) j["things"].push_back(thing_json(*t));
    return j;
}

std::string bundle_text(const Bundle& b) { return bundle_json(b).dump(2) + "\n"; }

Bundle load_bundle(std::string_view text, const std::string& source) {
    const Reader r(source);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw BundleError(source + ": not valid JSON: " + e.what());
    }
    Bundle b;
    const std::int64_t version = r.integer(r.field(j, "$", "format_version"), "$.format_version");
    if (version > kBundleFormatVersion) {
        r.fail("$.format_version", "bundle format version " + std::to_string(version) + " is newer than supported version " +
                                       std::to_string(kBundleFormatVersion));
    }
    if (version < 1) r.fail("$.format_version", "unsupported bundle format version " + std::to_string(version));
    b.format_version = version;
    const json& manifest = r.field(j, "$", "manifest");
    b.manifest.tool = r.string(r.field(manifest, "$.manifest", "tool"), "$.manifest.tool");
    b.manifest.tool_version = r.string(r.field(manifest, "$.manifest", "tool_version"), "$.manifest.tool_version");
    b.manifest.model_hash = r.string(r.field(manifest, "$.manifest", "model_hash"), "$.manifest.model_hash");
    const json& db = r.field(manifest, "$.manifest", "default_backend");
    if (!db.is_null()) b.manifest.default_backend = r.string(db, "$.manifest.default_backend");

    const json& things = r.array(r.field(j, "$", "things"), "$.things");
    for (std::size_t i = 0; i < things.size(); ++i) {
        auto t = std::make_shared<CompiledThing>(ThingLoader(r, things[i], at("$.things", i)).load());
        b.system.things.push_back(t->info);
        b.things.push_back(std::move(t));
    }

    const json& config = r.field(j, "$", "configuration");
    b.system.configuration = r.string(r.field(config, "$.configuration", "name"), "$.configuration.name");
    const json& instances = r.array(r.field(config, "$.configuration", "instances"), "$.configuration.instances");
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const std::string p = at("$.configuration.instances", i);
        InstanceInfo inst;
        inst.name = r.string(r.field(instances[i], p, "name"), at(p, "name"));
        if (b.system.instance_index(inst.name)) r.fail(at(p, "name"), "duplicate instance '" + inst.name + "'");
        inst.thing = r.index(r.field(instances[i], p, "thing"), at(p, "thing"), b.things.size(), "things");
        b.system.instances.push_back(std::move(inst));
    }
    const json& connectors = r.array(r.field(config, "$.configuration", "connectors"), "$.configuration.connectors");
    for (std::size_t i = 0; i < connectors.size(); ++i) {
        const std::string p = at("$.configuration.connectors", i);
        LinkInfo link;
        auto endpoint = [&](const char* side, std::size_t& inst, std::size_t& port) {
            const std::string ep = at(p, side);
            const json& e = r.array(r.field(connectors[i], p, side), ep);
            if (e.size() != 2) r.fail(ep, "expected [instance, port]");
            inst = r.index(e[0], at(ep, 0), b.system.instances.size(), "instances");
            port = r.index(e[1], at(ep, 1), b.system.things[b.system.instances[inst].thing].ports.size(), "ports");
        };
        endpoint("left", link.left_instance, link.left_port);
        endpoint("right", link.right_instance, link.right_port);
        b.system.links.push_back(link);
    }
    return b;
}

Bundle load_bundle_file(const std::string& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const Error& e) {
        throw BundleError(e.what());
    }
    return load_bundle(text, path);
}

}  // namespace stf
