#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "stf/model/ast.hpp"

namespace stf {

enum class Severity { Error, Warning, Hint };
std::string_view to_string(Severity s);

struct Diagnostic {
    std::string rule;  ///< catalog id, e.g. "E004"
    Severity severity = Severity::Error;
    std::string message;
    SourceSpan span;
    std::vector<SourceSpan> related;
};

struct RuleInfo {
    std::string_view id;
    Severity severity;
    std::string_view summary;
};

/// E001-E012, W101-W103, H201-H203.
const std::vector<RuleInfo>& rule_catalog();
const RuleInfo* find_rule(std::string_view id);

/// `FILE:LINE:COL: severity[RULE]: message`
std::string format_diagnostic(const Diagnostic& d);

/// JSON array, one record per diagnostic (rule, severity, file, line, column, message).
std::string diagnostics_report(const std::vector<Diagnostic>& ds);

bool has_errors(const std::vector<Diagnostic>& ds);

/// Orders by file, then source offset, then rule id.
void sort_diagnostics(std::vector<Diagnostic>& ds);

}  // namespace stf
