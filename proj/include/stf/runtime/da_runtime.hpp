#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "stf/ml/dataset.hpp"
#include "stf/ml/learners.hpp"
#include "stf/runtime/system.hpp"

namespace stf {

/// Per-instance DA lifecycle: dataset buffer, prepared data, trained model.
/// Action failures throw stf::Error; the engine turns them into error events.
class DaRuntime {
public:
    /// Loads the dataset (required unless a pretrained model is declared)
    /// and the pretrained model. Throws InstantiationError.
    DaRuntime(const ThingInfo& thing, const std::string& data_root, bool persist_saves);

    nlohmann::ordered_json save(const std::vector<Value>& properties);
    nlohmann::ordered_json preprocess();
    nlohmann::ordered_json train(std::uint64_t seed);
    /// Predicts from the current feature values and writes the label
    /// properties in `properties`.
    nlohmann::ordered_json predict(std::vector<Value>& properties);

    bool prepared() const { return prepared_.has_value(); }
    bool model_ready() const { return model_.has_value(); }
    const TrainedModel* model() const { return model_ ? &*model_ : nullptr; }
    std::size_t buffered_rows() const { return buffer_.size(); }
    /// File rows followed by buffered rows.
    Dataset combined() const;
    /// Training summary of the last successful da_train, else null.
    const nlohmann::ordered_json& last_report() const { return report_; }

private:
    Cell cell_of(const Value& v) const;
    std::vector<Cell> row_of(const std::vector<Value>& properties) const;

    const ThingInfo& thing_;
    const DaConfig& config_;
    std::string dataset_path_;
    bool persist_;
    Dataset base_;
    std::vector<std::vector<Cell>> buffer_;
    std::optional<PreparedData> prepared_;
    std::optional<TrainedModel> model_;
    nlohmann::ordered_json report_;
};

/// `path` resolved against `root` unless absolute or root is empty.
std::string resolve_data_path(const std::string& root, const std::string& path);

}  // namespace stf
