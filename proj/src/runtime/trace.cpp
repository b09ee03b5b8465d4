#include "stf/runtime/trace.hpp"

#include <cmath>

namespace stf {

using json = nlohmann::ordered_json;

json value_json(const Value& v) {
    switch (v.type()) {
        case ScalarType::Int: return v.as_int();
        case ScalarType::Float: return std::isfinite(v.as_float()) ? json(v.as_float()) : json(nullptr);
        case ScalarType::Bool: return v.as_bool();
        case ScalarType::String: return v.as_string();
        case ScalarType::Timestamp: return format_rfc3339(v.as_int());
    }
    return nullptr;
}

std::string trace_line(const TraceEvent& e) {
    json j;
    j["tick"] = e.tick;
    j["kind"] = e.kind;
    j["instance"] = e.instance;
    j["payload"] = e.payload;
    return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string trace_text(const Trace& t) {
    std::string out;
    for (const auto& e : t) {
        out += trace_line(e);
        out += '\n';
    }
    return out;
}

}  // namespace stf
