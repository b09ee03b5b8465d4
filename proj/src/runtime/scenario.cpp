#include "stf/runtime/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "stf/model/error.hpp"
#include "stf/syntax/parser.hpp"

namespace stf {

namespace {

std::vector<std::string> split_ws(std::string_view line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        if (j > i) out.emplace_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

std::int64_t parse_count(const std::string& s, const std::string& where, const char* what) {
    std::int64_t v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || v < 0) {
        throw ScenarioError(where + ": " + what + " must be a non-negative integer, found '" + s + "'");
    }
    return v;
}

}  // namespace

Scenario parse_scenario(std::string_view text, const std::string& source) {
    Scenario s;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const auto fields = split_ws(line);
        if (fields.empty()) continue;
        const std::string where = source + ":" + std::to_string(line_no);
        if (fields[0] == "max_ticks") {
            if (fields.size() != 2) throw ScenarioError(where + ": expected 'max_ticks N'");
            s.max_ticks = parse_count(fields[1], where, "max_ticks");
            continue;
        }
        if (fields.size() < 4 || fields.size() > 5) {
            throw ScenarioError(where + ": expected 'tick instance port message [arg,...]'");
        }
        Injection inj;
        inj.tick = parse_count(fields[0], where, "tick");
        inj.instance = fields[1];
        inj.port = fields[2];
        inj.message = fields[3];
        inj.line = line_no;
        if (fields.size() == 5) {
            std::stringstream ss(fields[4]);
            std::string arg;
            while (std::getline(ss, arg, ',')) inj.args.push_back(arg);
            if (fields[4].back() == ',') inj.args.emplace_back();
        }
        s.injections.push_back(std::move(inj));
    }
    std::stable_sort(s.injections.begin(), s.injections.end(),
                     [](const Injection& a, const Injection& b) { return a.tick < b.tick; });
    return s;
}

Scenario load_scenario(const std::string& path) { return parse_scenario(read_file(path), path); }

std::string scenario_text(const Scenario& s) {
    std::string out = "max_ticks " + std::to_string(s.max_ticks) + "\n";
    for (const auto& i : s.injections) {
        out += std::to_string(i.tick) + " " + i.instance + " " + i.port + " " + i.message;
        for (std::size_t k = 0; k < i.args.size(); ++k) out += (k ? "," : " ") + i.args[k];
        out += "\n";
    }
    return out;
}

}  // namespace stf
