#pragma once

// Template packs: text files with {{slot}} placeholders filled from a
// compiled bundle. The generator adds manifest.txt listing every emitted path.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "stf/codegen/bundle.hpp"

namespace stf {

struct TemplateFile {
    std::string path;  ///< relative output path
    std::string text;
};

struct TemplatePack {
    std::string name;
    std::vector<TemplateFile> files;
};

inline constexpr std::string_view kManifestFile = "manifest.txt";

/// Slots a template may use.
const std::vector<std::string_view>& slot_registry();

/// The shipped pack: README.md, bundle.json, run.sh, state_tables.txt, deploy.cfg.
TemplatePack reference_pack();

/// Every regular file below `dir` is a template, keyed by its relative path.
TemplatePack load_template_pack(const std::string& dir);

/// "reference" or a directory holding a pack.
TemplatePack find_template_pack(const std::string& name);

/// Placeholder names used by `text`, in order of appearance.
std::vector<std::string> template_slots(std::string_view text);

/// Slot values derived from a compiled bundle.
std::map<std::string, std::string> slot_values(const Bundle& b);

/// Substitutes every placeholder. Throws TemplateError naming the template
/// and the slot when a placeholder is not in the registry.
std::string render(std::string_view text, const std::map<std::string, std::string>& values,
                   const std::string& template_name);

/// Renders and writes the pack into `out_dir`, then verifies the written
/// tree against the manifest. Returns the manifest paths.
std::vector<std::string> generate_sources(const Bundle& b, const TemplatePack& pack, const std::string& out_dir);

}  // namespace stf
