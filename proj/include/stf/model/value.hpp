#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace stf {

enum class ScalarType { Int, Float, Bool, String, Timestamp };

std::string_view to_string(ScalarType t);
std::optional<ScalarType> parse_scalar_type(std::string_view s);

/// A typed scalar. Timestamps are epoch seconds held in the integer slot.
class Value {
public:
    Value() : type_(ScalarType::Int), data_(std::int64_t{0}) {}

    static Value integer(std::int64_t v) { return Value(ScalarType::Int, v); }
    static Value real(double v) { return Value(ScalarType::Float, v); }
    static Value boolean(bool v) { return Value(ScalarType::Bool, v); }
    static Value string(std::string v) { return Value(ScalarType::String, std::move(v)); }
    static Value timestamp(std::int64_t v) { return Value(ScalarType::Timestamp, v); }

    /// Type zero value: 0, 0.0, false, "", epoch 0.
    static Value zero(ScalarType t);

    ScalarType type() const { return type_; }

    std::int64_t as_int() const { return std::get<std::int64_t>(data_); }
    double as_float() const { return std::get<double>(data_); }
    bool as_bool() const { return std::get<bool>(data_); }
    const std::string& as_string() const { return std::get<std::string>(data_); }

    bool is_numeric() const { return type_ == ScalarType::Int || type_ == ScalarType::Float; }
    /// Numeric view (Int, Float, Timestamp, Bool as 0/1).
    double to_double() const;

    /// Canonical text form, used by print, CSV output and string concatenation.
    std::string to_text() const;

    /// Converts an assignable value to `target` (Int widens to Float/Timestamp).
    /// Returns nullopt when the conversion is not permitted.
    std::optional<Value> convert_to(ScalarType target) const;

    friend bool operator==(const Value&, const Value&) = default;

private:
    template <typename T>
    Value(ScalarType t, T v) : type_(t), data_(std::move(v)) {}

    ScalarType type_;
    std::variant<std::int64_t, double, bool, std::string> data_;
};

/// Whether a value of type `from` may be stored into a slot of type `to`.
bool assignable(ScalarType from, ScalarType to);

/// Shortest text that round-trips to the same double; always contains
/// a '.', 'e', "inf" or "nan" so it reads back as a float.
std::string format_double(double v);

/// Parses RFC 3339 (`2024-01-01T00:00:00Z`, optional fraction and offset).
std::optional<std::int64_t> parse_rfc3339(std::string_view s);
std::string format_rfc3339(std::int64_t epoch_seconds);

}  // namespace stf
