#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stf/model/ast.hpp"
#include "stf/model/merge.hpp"

namespace stf {

struct ParseDiagnostic {
    std::string message;
    SourceSpan span;
    std::string expected;  ///< human-readable expected-token hint, may be empty
};

struct ParseResult {
    /// Empty only when the input could not be read as UTF-8. Otherwise
    /// holds every top-level item that parsed cleanly, even if others failed.
    std::optional<Model> model;
    std::vector<ParseDiagnostic> diagnostics;

    bool ok() const { return model.has_value() && diagnostics.empty(); }
};

/// Parses model text. After a syntax error, parsing resumes at the next
/// top-level `thing`, `configuration` or `import`.
ParseResult parse(std::string_view text, const std::string& file = {});

/// Renders a diagnostic as `FILE:LINE:COL: error: message`.
std::string format_parse_diagnostic(const ParseDiagnostic& d);

/// Result of reading a model file and flattening its imports.
struct LoadResult {
    std::optional<Model> model;
    std::vector<ParseDiagnostic> diagnostics;  ///< parse and merge failures, all fatal
    std::string canonical_text;                ///< pretty-printed merged model (empty on failure)
};

/// Resolver that reads imports relative to the importing file's directory.
ModuleResolver file_resolver(std::vector<ParseDiagnostic>& diagnostics_sink);

/// Reads, parses and merges the model rooted at `path`.
LoadResult load_model_file(const std::string& path);

/// Reads a whole file; throws stf::Error when it cannot be opened.
std::string read_file(const std::string& path);

}  // namespace stf
