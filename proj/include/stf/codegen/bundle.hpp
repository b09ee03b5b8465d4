#pragma once

// Deployment bundles: a configuration compiled to integer-indexed state
// tables and prefix-form expression trees, stored as canonical JSON and
// executed by the same engine as the interpreter.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "stf/runtime/engine.hpp"

namespace stf {

inline constexpr std::int64_t kBundleFormatVersion = 1;

struct CExpr {
    enum class Kind { Literal, Property, Param, Local, Binary, Unary };
    Kind kind = Kind::Literal;
    Value literal;
    std::size_t index = 0;
    BinaryOp binary = BinaryOp::Add;
    UnaryOp unary = UnaryOp::Neg;
    std::vector<CExpr> operands;
};

struct CStmt {
    enum class Kind { AssignProperty, DeclareLocal, SetLocal, Send, Print, If, While, Da };
    Kind kind = Kind::Print;
    std::size_t index = 0;    ///< property, local slot or port
    std::size_t message = 0;  ///< send
    ScalarType type = ScalarType::Int;
    DaAction action = DaAction::Save;
    std::vector<CExpr> exprs;  ///< value, condition or send arguments
    std::vector<CStmt> body;
    std::vector<CStmt> else_body;
};

struct CBody {
    std::size_t locals = 0;
    std::vector<CStmt> code;
};

struct CTransition {
    std::size_t target = 0;
    std::optional<std::pair<std::size_t, std::size_t>> event;  ///< (port, message)
    std::optional<CExpr> guard;
    CBody actions;
};

struct CState {
    std::string name;
    CBody entry;
    CBody exit;
    std::vector<CTransition> transitions;
};

struct CompiledThing {
    ThingInfo info;
    std::size_t initial = 0;
    std::vector<CState> states;
};

struct BundleManifest {
    std::string tool;
    std::string tool_version;
    std::string model_hash;
    std::optional<std::string> default_backend;
};

struct Bundle {
    std::int64_t format_version = kBundleFormatVersion;
    BundleManifest manifest;
    SystemInfo system;  ///< things' DA configs carry embedded pretrained models
    std::vector<std::shared_ptr<const CompiledThing>> things;
};

struct BundleOptions {
    std::string data_root;                       ///< base for pretrained model files
    std::optional<std::string> default_backend;  ///< applied to DA things without one
};

/// FNV-1a 64 of the canonical pretty-printed model, as "fnv1a64:<hex>".
std::string model_hash(const Model& m);

/// Compiles configuration `config` of a merged, validated model. Throws
/// BundleError on validation errors, unresolved or unsupported backends and
/// unreadable pretrained models.
Bundle compile_bundle(const Model& m, const std::string& config, const BundleOptions& options);

nlohmann::json bundle_json(const Bundle& b);
/// Canonical bytes: sorted keys, two-space indent, trailing newline.
std::string bundle_text(const Bundle& b);
std::string generate_bundle(const Model& m, const std::string& config, const BundleOptions& options);

/// Parses and checks a bundle. Every index is range-checked; any defect is
/// a BundleError naming the offending field.
Bundle load_bundle(std::string_view text, const std::string& source = "<bundle>");
Bundle load_bundle_file(const std::string& path);

std::vector<std::unique_ptr<Behavior>> bundle_behaviors(const Bundle& b);
std::unique_ptr<Simulation> instantiate_bundle(const Bundle& b, const RunOptions& options);
Trace run_bundle(const Bundle& b, const Scenario& scenario, const RunOptions& options);

}  // namespace stf
