#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stf/ml/dataset.hpp"
#include "stf/ml/matrix.hpp"
#include "stf/model/ast.hpp"

namespace stf {

enum class Task { Classification, Regression };
std::string_view to_string(Task t);

struct FeatureSpec {
    std::string name;
    ColumnType type = ColumnType::Numeric;
    friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

/// Everything preprocessing needs from a DA block, with column types resolved.
struct PipelineSpec {
    std::vector<FeatureSpec> features;
    std::vector<FeatureSpec> labels;
    Task task = Task::Regression;
    bool sequential = false;
    std::optional<Window> window;
    Scaling scaling = Scaling::None;
    MissingPolicy missing = MissingPolicy::Drop;
};

/// Column type a property of scalar type `t` takes in a dataset.
ColumnType column_type_for(ScalarType t);

/// Bool/String labels classify, Int/Float/Timestamp labels regress.
Task task_for(ScalarType label_type);

/// Resolves a DA block against its thing's property declarations.
PipelineSpec pipeline_spec(const Thing& thing);

struct ScalerEntry {
    Scaling kind = Scaling::None;
    double p1 = 0.0;  ///< min or mean
    double p2 = 0.0;  ///< max or std
    friend bool operator==(const ScalerEntry&, const ScalerEntry&) = default;
};

/// Fitted preprocessing state. Enough to transform a fresh record exactly as
/// the training data was transformed.
struct Preprocessor {
    PipelineSpec spec;
    /// Per feature: sorted categories for categorical features, else empty.
    std::vector<std::vector<std::string>> categories;
    /// Per label: sorted classes (classification only).
    std::vector<std::vector<std::string>> classes;
    /// Per expanded (pre-window) feature column.
    std::vector<std::string> expanded_names;
    std::vector<ScalerEntry> scaler;
    /// Mean-impute fill values per feature and label, by name.
    std::vector<std::pair<std::string, Cell>> fill;

    /// Window lag (1 when not windowed).
    std::size_t lag() const;
    std::size_t horizon() const;
    std::vector<std::string> feature_names() const;
    std::vector<std::string> label_names() const;
    std::size_t output_count() const { return label_names().size(); }

    /// Expands and scales one raw feature record (cells in spec.features order).
    /// Unknown categories become all-zero blocks and bump `unknown`.
    std::vector<double> expand(const std::vector<Cell>& record, std::size_t* unknown = nullptr) const;

    /// Model input for a prediction: `lag()` consecutive raw records, oldest first.
    std::vector<double> transform(const std::vector<std::vector<Cell>>& records, std::size_t* unknown = nullptr) const;

    double scale(std::size_t column, double v) const;
    double unscale(std::size_t column, double v) const;
};

struct PreparedData {
    Matrix x;
    Matrix y;  ///< class index (classification) or value (regression) per output
    Preprocessor prep;
    std::size_t unknown_categories = 0;
};

/// Fits imputation, encoding and scaling on `ds` and applies them, then
/// slides the lag window when the spec is sequential with a window.
PreparedData preprocess(const Dataset& ds, const PipelineSpec& spec);

/// Number of windows a series of `n` rows yields for lag `w`, horizon `h`.
std::size_t window_count(std::size_t n, std::size_t w, std::size_t h);

}  // namespace stf
