#include "stf/model/ast.hpp"

#include <algorithm>

namespace stf {

std::string_view to_string(DaAction a) {
    switch (a) {
        case DaAction::Save: return "da_save";
        case DaAction::Preprocess: return "da_preprocess";
        case DaAction::Train: return "da_train";
        case DaAction::Predict: return "da_predict";
    }
    return "?";
}

std::string_view to_string(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Mod: return "%";
        case BinaryOp::Eq: return "==";
        case BinaryOp::Ne: return "!=";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Ge: return ">=";
        case BinaryOp::And: return "and";
        case BinaryOp::Or: return "or";
    }
    return "?";
}

std::string_view to_string(Scaling s) {
    switch (s) {
        case Scaling::None: return "none";
        case Scaling::MinMax: return "minmax";
        case Scaling::ZScore: return "zscore";
    }
    return "?";
}

std::string_view to_string(MissingPolicy m) {
    return m == MissingPolicy::Drop ? "drop" : "mean_impute";
}

namespace {
template <typename Seq>
auto find_named(const Seq& seq, std::string_view n) -> decltype(&*seq.begin()) {
    auto it = std::find_if(seq.begin(), seq.end(), [&](const auto& e) { return e.name == n; });
    return it == seq.end() ? nullptr : &*it;
}
}  // namespace

const Property* Thing::find_property(std::string_view n) const { return find_named(properties, n); }
const Message* Thing::find_message(std::string_view n) const { return find_named(messages, n); }
const Port* Thing::find_port(std::string_view n) const { return find_named(ports, n); }
const State* Thing::find_state(std::string_view n) const { return find_named(behavior.states, n); }

const Thing* Model::find_thing(std::string_view n) const { return find_named(things, n); }
const Configuration* Model::find_configuration(std::string_view n) const {
    return find_named(configurations, n);
}

bool is_registered_annotation(std::string_view key) {
    return key == "platform" || key == "backend" || key == "dataset_format";
}

std::optional<std::string> resolved_backend(const Thing& thing) {
    if (thing.da) {
        for (const auto& a : thing.da->annotations) {
            if (a.key == "backend") return a.value;
        }
    }
    for (const auto& a : thing.annotations) {
        if (a.key == "backend") return a.value;
    }
    return std::nullopt;
}

namespace {
bool numeric(ScalarType t) { return t == ScalarType::Int || t == ScalarType::Float; }
}  // namespace

std::optional<ScalarType> binary_result_type(BinaryOp op, ScalarType l, ScalarType r) {
    using T = ScalarType;
    const auto arith = [&]() -> std::optional<T> {
        if (numeric(l) && numeric(r)) return l == T::Float || r == T::Float ? T::Float : T::Int;
        return std::nullopt;
    };
    switch (op) {
        case BinaryOp::Add:
            if (l == T::String || r == T::String) return T::String;
            if ((l == T::Timestamp && r == T::Int) || (l == T::Int && r == T::Timestamp)) return T::Timestamp;
            return arith();
        case BinaryOp::Sub:
            if (l == T::Timestamp && r == T::Int) return T::Timestamp;
            if (l == T::Timestamp && r == T::Timestamp) return T::Int;
            return arith();
        case BinaryOp::Mul:
        case BinaryOp::Div:
        case BinaryOp::Mod: return arith();
        case BinaryOp::Eq:
        case BinaryOp::Ne:
            if (l == r || (numeric(l) && numeric(r))) return T::Bool;
            return std::nullopt;
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Gt:
        case BinaryOp::Ge:
            if ((numeric(l) && numeric(r)) || (l == r && (l == T::String || l == T::Timestamp))) return T::Bool;
            return std::nullopt;
        case BinaryOp::And:
        case BinaryOp::Or:
            if (l == T::Bool && r == T::Bool) return T::Bool;
            return std::nullopt;
    }
    return std::nullopt;
}

std::optional<ScalarType> unary_result_type(UnaryOp op, ScalarType t) {
    if (op == UnaryOp::Not) return t == ScalarType::Bool ? std::optional(t) : std::nullopt;
    return numeric(t) ? std::optional(t) : std::nullopt;
}

}  // namespace stf
