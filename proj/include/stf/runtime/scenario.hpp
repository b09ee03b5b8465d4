#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace stf {

/// External message delivered to an instance port at a given tick.
struct Injection {
    std::int64_t tick = 0;
    std::string instance;
    std::string port;
    std::string message;
    std::vector<std::string> args;  ///< text, converted by the message's parameter types
    std::size_t line = 0;
};

struct Scenario {
    std::vector<Injection> injections;  ///< sorted by tick, stable
    std::int64_t max_ticks = 10000;
};

/// Line records `tick instance port message arg1,arg2,...`; blank lines and
/// `#` comments are skipped; `max_ticks N` sets the stop bound. Throws
/// ScenarioError with `source:LINE:` context.
Scenario parse_scenario(std::string_view text, const std::string& source = "<scenario>");
Scenario load_scenario(const std::string& path);

std::string scenario_text(const Scenario& s);

}  // namespace stf
