#pragma once

#include <functional>
#include <string>
#include <vector>

#include "stf/model/ast.hpp"

namespace stf {

struct LoadedModule {
    std::string id;  ///< canonical identity used for cycle detection
    Model model;
};

/// Loads the module named by `import` as seen from the module `importer_id`.
/// Throws stf::Error when the module cannot be loaded.
using ModuleResolver = std::function<LoadedModule(const Import& import, const std::string& importer_id)>;

/// Flattens the import graph rooted at `root` into a single model.
///
/// Things imported from other modules may be refined by a same-named thing
/// in the importing module (PIM -> PSM overlay): annotations are added,
/// the DA block's mode/pretrained/annotations filled, new properties,
/// messages and ports appended. Retyping or removing existing elements is a
/// MergeError. A refining statechart with no states inherits the base one.
/// Thing fragments named in `includes` are flattened into their includers.
/// The result has no imports and no includes, so merging it again is the
/// identity.
Model merge_imports(const Model& root, const std::string& root_id, const ModuleResolver& resolver);

struct UnresolvedSite {
    std::string thing;
    SourceSpan span;
};

/// DA-enabled (non-fragment) things without a concrete backend. Empty means
/// the model is a complete platform-specific model.
std::vector<UnresolvedSite> platform_completeness(const Model& m);

}  // namespace stf
