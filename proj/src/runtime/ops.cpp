#include "stf/runtime/ops.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <string>

namespace stf {

namespace {

std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}
std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}
std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}

bool integral(const Value& v) { return v.type() == ScalarType::Int || v.type() == ScalarType::Timestamp; }

[[noreturn]] void bad_operands(BinaryOp op, const Value& a, const Value& b) {
    throw RuntimeFault("operator '" + std::string(to_string(op)) + "' cannot apply to " + std::string(to_string(a.type())) +
                       " and " + std::string(to_string(b.type())));
}

int compare(BinaryOp op, const Value& a, const Value& b) {
    if (integral(a) && integral(b)) return a.as_int() < b.as_int() ? -1 : a.as_int() > b.as_int() ? 1 : 0;
    if (a.is_numeric() && b.is_numeric()) {
        const double x = a.to_double(), y = b.to_double();
        return x < y ? -1 : x > y ? 1 : 0;
    }
    if (a.type() == ScalarType::String && b.type() == ScalarType::String) {
        const int c = a.as_string().compare(b.as_string());
        return c < 0 ? -1 : c > 0 ? 1 : 0;
    }
    if (a.type() == ScalarType::Bool && b.type() == ScalarType::Bool) return int(a.as_bool()) - int(b.as_bool());
    bad_operands(op, a, b);
}

}  // namespace

Value apply_binary(BinaryOp op, const Value& a, const Value& b) {
    const ScalarType ta = a.type(), tb = b.type();
    switch (op) {
        case BinaryOp::Add:
            if (ta == ScalarType::String || tb == ScalarType::String) return Value::string(a.to_text() + b.to_text());
            [[fallthrough]];
        case BinaryOp::Sub:
        case BinaryOp::Mul:
        case BinaryOp::Div:
        case BinaryOp::Mod: {
            if (ta == ScalarType::Timestamp || tb == ScalarType::Timestamp) {
                if (op == BinaryOp::Add && integral(a) && integral(b) && !(ta == tb)) {
                    return Value::timestamp(wrap_add(a.as_int(), b.as_int()));
                }
                if (op == BinaryOp::Sub && ta == ScalarType::Timestamp && tb == ScalarType::Int) {
                    return Value::timestamp(wrap_sub(a.as_int(), b.as_int()));
                }
                if (op == BinaryOp::Sub && ta == ScalarType::Timestamp && tb == ScalarType::Timestamp) {
                    return Value::integer(wrap_sub(a.as_int(), b.as_int()));
                }
                bad_operands(op, a, b);
            }
            if (ta == ScalarType::Int && tb == ScalarType::Int) {
                const std::int64_t x = a.as_int(), y = b.as_int();
                switch (op) {
                    case BinaryOp::Add: return Value::integer(wrap_add(x, y));
                    case BinaryOp::Sub: return Value::integer(wrap_sub(x, y));
                    case BinaryOp::Mul: return Value::integer(wrap_mul(x, y));
                    default: break;
                }
                if (y == 0) throw RuntimeFault("division by zero");
                if (x == std::numeric_limits<std::int64_t>::min() && y == -1) {
                    throw RuntimeFault("integer overflow in division");
                }
                return Value::integer(op == BinaryOp::Div ? x / y : x % y);
            }
            if (!a.is_numeric() || !b.is_numeric()) bad_operands(op, a, b);
            const double x = a.to_double(), y = b.to_double();
            switch (op) {
                case BinaryOp::Add: return Value::real(x + y);
                case BinaryOp::Sub: return Value::real(x - y);
                case BinaryOp::Mul: return Value::real(x * y);
                default: break;
            }
            if (y == 0.0) throw RuntimeFault("division by zero");
            return Value::real(op == BinaryOp::Div ? x / y : std::fmod(x, y));
        }
        case BinaryOp::Eq:
        case BinaryOp::Ne: {
            bool eq;
            if (a.is_numeric() && b.is_numeric() && ta != tb) {
                eq = a.to_double() == b.to_double();
            } else if (ta != tb) {
                bad_operands(op, a, b);
            } else {
                eq = a == b;
            }
            return Value::boolean(op == BinaryOp::Eq ? eq : !eq);
        }
        case BinaryOp::Lt: return Value::boolean(compare(op, a, b) < 0);
        case BinaryOp::Le: return Value::boolean(compare(op, a, b) <= 0);
        case BinaryOp::Gt: return Value::boolean(compare(op, a, b) > 0);
        case BinaryOp::Ge: return Value::boolean(compare(op, a, b) >= 0);
        case BinaryOp::And: return Value::boolean(truth(a) && truth(b));
        case BinaryOp::Or: return Value::boolean(truth(a) || truth(b));
    }
    bad_operands(op, a, b);
}

Value apply_unary(UnaryOp op, const Value& v) {
    if (op == UnaryOp::Not) return Value::boolean(!truth(v));
    if (v.type() == ScalarType::Int) return Value::integer(wrap_sub(0, v.as_int()));
    if (v.type() == ScalarType::Float) return Value::real(-v.as_float());
    throw RuntimeFault("unary '-' cannot apply to " + std::string(to_string(v.type())));
}

bool truth(const Value& v) {
    if (v.type() != ScalarType::Bool) {
        throw RuntimeFault("condition is " + std::string(to_string(v.type())) + ", expected Bool");
    }
    return v.as_bool();
}

Value coerce(const Value& v, ScalarType t) {
    if (auto c = v.convert_to(t)) return *c;
    throw RuntimeFault("cannot store " + std::string(to_string(v.type())) + " into " + std::string(to_string(t)));
}

std::optional<Value> parse_value(std::string_view text, ScalarType t) {
    auto parse_int = [&](std::int64_t& out) {
        auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
        return ec == std::errc() && end == text.data() + text.size() && !text.empty();
    };
    switch (t) {
        case ScalarType::Int: {
            std::int64_t v;
            if (parse_int(v)) return Value::integer(v);
            return std::nullopt;
        }
        case ScalarType::Float: {
            double v;
            auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
            if (ec == std::errc() && end == text.data() + text.size() && !text.empty() && std::isfinite(v)) {
                return Value::real(v);
            }
            return std::nullopt;
        }
        case ScalarType::Bool:
            if (text == "true") return Value::boolean(true);
            if (text == "false") return Value::boolean(false);
            return std::nullopt;
        case ScalarType::String: return Value::string(std::string(text));
        case ScalarType::Timestamp: {
            std::int64_t v;
            if (parse_int(v)) return Value::timestamp(v);
            if (auto ts = parse_rfc3339(text)) return Value::timestamp(*ts);
            return std::nullopt;
        }
    }
    return std::nullopt;
}

}  // namespace stf
