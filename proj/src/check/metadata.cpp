#include <filesystem>

#include "stf/check/validator.hpp"
#include "stf/ml/dataset.hpp"
#include "stf/ml/model_io.hpp"
#include "stf/model/error.hpp"

namespace stf {

std::string FileMetadataProvider::resolve(const std::string& path) const {
    std::filesystem::path p(path);
    if (p.is_absolute() || root_.empty()) return p.string();
    return (std::filesystem::path(root_) / p).string();
}

std::optional<DatasetMetadata> FileMetadataProvider::dataset(const std::string& path) const {
    const std::string full = resolve(path);
    if (!std::filesystem::is_regular_file(full)) return std::nullopt;
    Dataset ds;
    try {
        ds = load_dataset(full);
    } catch (const Error&) {
        return std::nullopt;
    }
    DatasetMetadata md;
    md.rows = ds.size();
    for (std::size_t c = 0; c < ds.columns.size(); ++c) {
        md.columns.push_back(ds.columns[c].name);
        const Cell* first = nullptr;
        bool constant = true;
        for (const auto& r : ds.rows) {
            const Cell& cell = r[c];
            if (cell.missing) continue;
            if (!first) {
                first = &cell;
            } else if (cell.number != first->number || cell.text != first->text) {
                constant = false;
                break;
            }
        }
        if (constant && first) md.constant_columns.push_back(ds.columns[c].name);
    }
    return md;
}

std::optional<PretrainedMetadata> FileMetadataProvider::pretrained(const std::string& path) const {
    const std::string full = resolve(path);
    if (!std::filesystem::is_regular_file(full)) return std::nullopt;
    PretrainedMetadata md;
    try {
        const TrainedModel m = load_model(full);
        md.features = m.prep.spec.features;
        md.labels = m.prep.spec.labels;
        if (m.prep.spec.sequential) md.window = m.prep.spec.window;
    } catch (const Error& e) {
        md.error = e.what();
    }
    return md;
}

}  // namespace stf
