#include "stf/model/value.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace stf {

std::string_view to_string(ScalarType t) {
    switch (t) {
        case ScalarType::Int: return "Int";
        case ScalarType::Float: return "Float";
        case ScalarType::Bool: return "Bool";
        case ScalarType::String: return "String";
        case ScalarType::Timestamp: return "Timestamp";
    }
    return "?";
}

std::optional<ScalarType> parse_scalar_type(std::string_view s) {
    if (s == "Int") return ScalarType::Int;
    if (s == "Float") return ScalarType::Float;
    if (s == "Bool") return ScalarType::Bool;
    if (s == "String") return ScalarType::String;
    if (s == "Timestamp") return ScalarType::Timestamp;
    return std::nullopt;
}

Value Value::zero(ScalarType t) {
    switch (t) {
        case ScalarType::Int: return integer(0);
        case ScalarType::Float: return real(0.0);
        case ScalarType::Bool: return boolean(false);
        case ScalarType::String: return string("");
        case ScalarType::Timestamp: return timestamp(0);
    }
    return {};
}

double Value::to_double() const {
    switch (type_) {
        case ScalarType::Int:
        case ScalarType::Timestamp: return static_cast<double>(as_int());
        case ScalarType::Float: return as_float();
        case ScalarType::Bool: return as_bool() ? 1.0 : 0.0;
        case ScalarType::String: break;
    }
    return 0.0;
}

std::string Value::to_text() const {
    switch (type_) {
        case ScalarType::Int:
        case ScalarType::Timestamp: return std::to_string(as_int());
        case ScalarType::Float: return format_double(as_float());
        case ScalarType::Bool: return as_bool() ? "true" : "false";
        case ScalarType::String: return as_string();
    }
    return {};
}

bool assignable(ScalarType from, ScalarType to) {
    if (from == to) return true;
    return from == ScalarType::Int && (to == ScalarType::Float || to == ScalarType::Timestamp);
}

std::optional<Value> Value::convert_to(ScalarType target) const {
    if (type_ == target) return *this;
    if (!assignable(type_, target)) return std::nullopt;
    if (target == ScalarType::Float) return real(static_cast<double>(as_int()));
    return timestamp(as_int());
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    std::string out(buf.data(), end);
    if (out.find_first_of(".e") == std::string::npos) out += ".0";
    return out;
}

namespace {

// Days since 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    y += m <= 2;
}

bool read_digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
    if (pos + n > s.size()) return false;
    out = 0;
    for (std::size_t i = pos; i < pos + n; ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
        out = out * 10 + (s[i] - '0');
    }
    return true;
}

}  // namespace

std::optional<std::int64_t> parse_rfc3339(std::string_view s) {
    int year, month, day, hour, minute, second;
    if (!read_digits(s, 0, 4, year) || s.size() < 20 || s[4] != '-' || !read_digits(s, 5, 2, month) ||
        s[7] != '-' || !read_digits(s, 8, 2, day) || (s[10] != 'T' && s[10] != 't' && s[10] != ' ') ||
        !read_digits(s, 11, 2, hour) || s[13] != ':' || !read_digits(s, 14, 2, minute) || s[16] != ':' ||
        !read_digits(s, 17, 2, second)) {
        return std::nullopt;
    }
    if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 || second > 60) {
        return std::nullopt;
    }
    std::size_t pos = 19;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        const std::size_t start = pos;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
        if (pos == start) return std::nullopt;
    }
    if (pos >= s.size()) return std::nullopt;
    std::int64_t offset = 0;
    if (s[pos] == 'Z' || s[pos] == 'z') {
        ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
        int oh, om;
        if (!read_digits(s, pos + 1, 2, oh) || pos + 3 >= s.size() || s[pos + 3] != ':' ||
            !read_digits(s, pos + 4, 2, om)) {
            return std::nullopt;
        }
        offset = (oh * 3600 + om * 60) * (s[pos] == '+' ? 1 : -1);
        pos += 6;
    } else {
        return std::nullopt;
    }
    if (pos != s.size()) return std::nullopt;
    const std::int64_t days = days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
    return days * 86400 + hour * 3600 + minute * 60 + second - offset;
}

std::string format_rfc3339(std::int64_t epoch_seconds) {
    std::int64_t days = epoch_seconds / 86400;
    std::int64_t rem = epoch_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    std::int64_t y;
    unsigned m, d;
    civil_from_days(days, y, m, d);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ", static_cast<long long>(y), m, d,
                  static_cast<long long>(rem / 3600), static_cast<long long>(rem / 60 % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

}  // namespace stf
