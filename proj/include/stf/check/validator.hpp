#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stf/check/diagnostic.hpp"
#include "stf/ml/preprocess.hpp"
#include "stf/model/ast.hpp"

namespace stf {

struct DatasetMetadata {
    std::size_t rows = 0;
    std::vector<std::string> columns;
    std::vector<std::string> constant_columns;
};

struct PretrainedMetadata {
    std::string error;  ///< non-empty when the file exists but does not load
    std::vector<FeatureSpec> features;
    std::vector<FeatureSpec> labels;
    std::optional<Window> window;
};

/// Optional access to datasets and pretrained model files for the data-aware
/// rules (E011, H201, H203). Returning nullopt means "not available".
class MetadataProvider {
public:
    virtual ~MetadataProvider() = default;
    virtual std::optional<DatasetMetadata> dataset(const std::string& path) const = 0;
    virtual std::optional<PretrainedMetadata> pretrained(const std::string& path) const = 0;
};

/// Reads files relative to `root` (absolute paths are used as is).
class FileMetadataProvider : public MetadataProvider {
public:
    explicit FileMetadataProvider(std::string root) : root_(std::move(root)) {}
    std::optional<DatasetMetadata> dataset(const std::string& path) const override;
    std::optional<PretrainedMetadata> pretrained(const std::string& path) const override;
    std::string resolve(const std::string& path) const;

private:
    std::string root_;
};

/// Runs the full rule catalog over a merged model. Deterministic; sorted.
std::vector<Diagnostic> validate(const Model& m, const MetadataProvider* datasets = nullptr);

}  // namespace stf
