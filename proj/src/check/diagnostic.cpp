#include "stf/check/diagnostic.hpp"

#include <algorithm>
#include <tuple>

#include "json.hpp"

namespace stf {

namespace {

const std::vector<RuleInfo> kCatalog = {
    {"E001", Severity::Error, "duplicate name"},
    {"E002", Severity::Error, "port references undeclared message"},
    {"E003", Severity::Error, "transition event not receivable on the named port"},
    {"E004", Severity::Error, "DA feature/label does not name a usable property"},
    {"E005", Severity::Error, "DA action in a thing without a data_analytics block"},
    {"E006", Severity::Error, "algorithm, hyperparameter or metric incompatible with the label task"},
    {"E007", Severity::Error, "connector or instance incompatible with the declared things"},
    {"E008", Severity::Error, "unknown or unreachable state"},
    {"E009", Severity::Error, "type error"},
    {"E010", Severity::Error, "window/horizon without sequential data"},
    {"E011", Severity::Error, "pretrained model does not match the DA schema"},
    {"E012", Severity::Error, "DA action in an expression"},
    {"W101", Severity::Warning, "da_predict reachable without da_train and no pretrained model"},
    {"W102", Severity::Warning, "receiving port never connected"},
    {"W103", Severity::Warning, "da_train reachable without a preceding da_preprocess"},
    {"H201", Severity::Hint, "fewer than 10 dataset rows per feature"},
    {"H202", Severity::Hint, "expert mode without hyperparameters"},
    {"H203", Severity::Hint, "zscore scaling of a constant column"},
};

}  // namespace

std::string_view to_string(Severity s) {
    switch (s) {
        case Severity::Error: return "error";
        case Severity::Warning: return "warning";
        case Severity::Hint: return "hint";
    }
    return "?";
}

const std::vector<RuleInfo>& rule_catalog() { return kCatalog; }

const RuleInfo* find_rule(std::string_view id) {
    for (const auto& r : kCatalog) {
        if (r.id == id) return &r;
    }
    return nullptr;
}

std::string format_diagnostic(const Diagnostic& d) {
    return (d.span.file.empty() ? std::string("<input>") : d.span.file) + ":" + std::to_string(d.span.line) + ":" +
           std::to_string(d.span.column) + ": " + std::string(to_string(d.severity)) + "[" + d.rule + "]: " + d.message;
}

std::string diagnostics_report(const std::vector<Diagnostic>& ds) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& d : ds) {
        out.push_back({{"rule", d.rule},
                       {"severity", std::string(to_string(d.severity))},
                       {"file", d.span.file},
                       {"line", d.span.line},
                       {"column", d.span.column},
                       {"message", d.message}});
    }
    return out.dump(2) + "\n";
}

bool has_errors(const std::vector<Diagnostic>& ds) {
    return std::any_of(ds.begin(), ds.end(), [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

void sort_diagnostics(std::vector<Diagnostic>& ds) {
    std::stable_sort(ds.begin(), ds.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return std::tie(a.span.file, a.span.begin, a.rule) < std::tie(b.span.file, b.span.begin, b.rule);
    });
}

}  // namespace stf
