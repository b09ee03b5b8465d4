#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "stf/model/value.hpp"

namespace stf {

/// One observable step of a simulation. Kinds: state_enter, state_exit,
/// inject, receive, discard, send, drop, assign, print, da_save,
/// da_preprocess, da_train, da_predict, error.
struct TraceEvent {
    std::int64_t tick = 0;
    std::string kind;
    std::string instance;
    nlohmann::ordered_json payload = nlohmann::ordered_json::object();
};

using Trace = std::vector<TraceEvent>;

/// JSON for a runtime value: numbers and booleans natively, strings as is,
/// timestamps in RFC 3339, non-finite floats as null.
nlohmann::ordered_json value_json(const Value& v);

/// `{"tick":..,"kind":..,"instance":..,"payload":{..}}` on one line.
std::string trace_line(const TraceEvent& e);

/// JSON Lines text of a whole trace, newline terminated.
std::string trace_text(const Trace& t);

}  // namespace stf
