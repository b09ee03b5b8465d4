#pragma once

// Seeded-defect fixtures: each file starts with `// expect RULE` and marks the
// expected diagnostic position with `/*^*/` placed right before it.

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include "stf/check/validator.hpp"
#include "stf/syntax/parser.hpp"

namespace stf::testing {

struct FixtureOutcome {
    std::string file;
    std::string expected_rule;
    std::uint32_t line = 0;
    std::uint32_t column = 0;
    std::vector<Diagnostic> diagnostics;
    std::string problem;  ///< empty when the fixture behaves as expected
};

inline FixtureOutcome run_fixture(const std::filesystem::path& path) {
    FixtureOutcome out;
    out.file = path.filename().string();
    const std::string text = read_file(path.string());
    const std::string header = "// expect ";
    if (text.rfind(header, 0) != 0) {
        out.problem = "missing expect header";
        return out;
    }
    out.expected_rule = text.substr(header.size(), text.find('\n') - header.size());
    const std::string marker = "/*^*/";
    const std::size_t at = text.find(marker);
    if (at == std::string::npos) {
        out.problem = "missing position marker";
        return out;
    }
    const std::size_t target = at + marker.size();
    const std::size_t line_start = text.rfind('\n', target) + 1;
    out.line = 1 + static_cast<std::uint32_t>(std::count(text.begin(), text.begin() + target, '\n'));
    out.column = 1 + static_cast<std::uint32_t>(target - line_start);

    LoadResult loaded = load_model_file(path.string());
    if (!loaded.model) {
        out.problem = "does not load";
        return out;
    }
    FileMetadataProvider meta(path.parent_path().string());
    out.diagnostics = validate(*loaded.model, &meta);
    if (out.diagnostics.size() != 1) {
        out.problem = std::to_string(out.diagnostics.size()) + " diagnostics";
        for (const auto& d : out.diagnostics) out.problem += "; " + format_diagnostic(d);
        return out;
    }
    const Diagnostic& d = out.diagnostics.front();
    if (d.rule != out.expected_rule) {
        out.problem = "got " + format_diagnostic(d);
    } else if (d.span.line != out.line || d.span.column != out.column) {
        out.problem = "expected at " + std::to_string(out.line) + ":" + std::to_string(out.column) + ", got " +
                      format_diagnostic(d);
    }
    return out;
}

inline std::vector<std::filesystem::path> fixture_files(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.path().extension() == ".stf") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

}  // namespace stf::testing
