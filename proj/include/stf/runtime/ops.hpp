#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "stf/model/ast.hpp"
#include "stf/model/error.hpp"

namespace stf {

/// Dynamic failure inside an action (division by zero, overflow, runaway
/// loop). The engine reports it and halts the instance.
class RuntimeFault : public Error {
public:
    using Error::Error;
};

/// Iterations one `while` statement may run before it faults.
constexpr std::int64_t kLoopLimit = 1'000'000;

/// Operator semantics shared by every executor. Integer arithmetic wraps;
/// division or modulo by zero faults. `and`/`or` here are strict; executors
/// short-circuit before calling.
Value apply_binary(BinaryOp op, const Value& lhs, const Value& rhs);
Value apply_unary(UnaryOp op, const Value& v);

/// Condition value; faults when `v` is not Bool.
bool truth(const Value& v);

/// Stores `v` into a slot of type `t` (Int widens); faults otherwise.
Value coerce(const Value& v, ScalarType t);

/// Reads text as a value of type `t` (timestamps as RFC 3339 or epoch seconds).
std::optional<Value> parse_value(std::string_view text, ScalarType t);

}  // namespace stf
