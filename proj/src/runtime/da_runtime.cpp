#include "stf/runtime/da_runtime.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "stf/ml/automl.hpp"
#include "stf/ml/metrics.hpp"
#include "stf/ml/model_io.hpp"
#include "stf/model/error.hpp"
#include "stf/runtime/ops.hpp"
#include "stf/runtime/trace.hpp"
#include "stf/syntax/parser.hpp"

namespace stf {

using json = nlohmann::ordered_json;

std::string resolve_data_path(const std::string& root, const std::string& path) {
    const std::filesystem::path p(path);
    if (p.is_absolute() || root.empty()) return p.string();
    return (std::filesystem::path(root) / p).string();
}

namespace {

json hyperparams_json(const ModelSpec& spec) {
    json h = json::object();
    for (const auto& [k, v] : spec.hyperparams) h[k] = v;
    return h;
}

}  // namespace

DaRuntime::DaRuntime(const ThingInfo& thing, const std::string& data_root, bool persist_saves)
    : thing_(thing), config_(*thing.da), persist_(persist_saves) {
    dataset_path_ = resolve_data_path(data_root, config_.dataset);
    Schema declared;
    for (const auto* group : {&config_.pipeline.features, &config_.pipeline.labels}) {
        for (const auto& f : *group) declared[f.name] = f.type;
    }
    if (std::filesystem::is_regular_file(dataset_path_)) {
        try {
            base_ = load_dataset(dataset_path_, declared);
        } catch (const Error& e) {
            throw InstantiationError(thing.name + ": " + e.what());
        }
    } else if (!config_.pretrained) {
        throw InstantiationError(thing.name + ": dataset '" + dataset_path_ + "' not found");
    } else {
        for (const auto* group : {&config_.pipeline.features, &config_.pipeline.labels}) {
            for (const auto& f : *group) {
                if (!base_.column_index(f.name)) base_.columns.push_back({f.name, f.type});
            }
        }
    }
    if (config_.pretrained) {
        const std::string path = resolve_data_path(data_root, *config_.pretrained);
        try {
            const std::string text = config_.pretrained_json ? *config_.pretrained_json : read_file(path);
            model_ = model_from_json(text, path);
        } catch (const Error& e) {
            throw InstantiationError(thing.name + ": pretrained model: " + e.what());
        }
    }
}

Cell DaRuntime::cell_of(const Value& v) const {
    switch (v.type()) {
        case ScalarType::Bool:
        case ScalarType::String: return Cell::of_text(v.to_text());
        default: return Cell::of_number(v.to_double());
    }
}

std::vector<Cell> DaRuntime::row_of(const std::vector<Value>& properties) const {
    std::vector<Cell> row;
    for (const auto& c : base_.columns) {
        auto idx = thing_.property_index(c.name);
        row.push_back(idx ? cell_of(properties[*idx]) : Cell::none());
    }
    return row;
}

Dataset DaRuntime::combined() const {
    Dataset ds = base_;
    ds.rows.insert(ds.rows.end(), buffer_.begin(), buffer_.end());
    return ds;
}

json DaRuntime::save(const std::vector<Value>& properties) {
    std::vector<Cell> row = row_of(properties);
    json values = json::object();
    for (std::size_t c = 0; c < base_.columns.size(); ++c) {
        if (auto idx = thing_.property_index(base_.columns[c].name)) {
            values[base_.columns[c].name] = value_json(properties[*idx]);
        }
    }
    if (persist_) {
        const bool fresh = !std::filesystem::exists(dataset_path_);
        std::ofstream out(dataset_path_, std::ios::app | std::ios::binary);
        if (!out) throw DatasetError("cannot append to '" + dataset_path_ + "'");
        std::vector<std::string> fields;
        if (fresh) {
            for (const auto& c : base_.columns) fields.push_back(c.name);
            out << csv_row(fields);
            fields.clear();
        }
        for (std::size_t c = 0; c < row.size(); ++c) fields.push_back(cell_text(row[c], base_.columns[c].type));
        out << csv_row(fields);
    }
    buffer_.push_back(std::move(row));
    json payload;
    payload["row"] = values;
    payload["buffered"] = buffer_.size();
    return payload;
}

json DaRuntime::preprocess() {
    prepared_ = stf::preprocess(combined(), config_.pipeline);
    json payload;
    payload["rows"] = prepared_->x.rows;
    payload["columns"] = prepared_->x.cols;
    payload["outputs"] = prepared_->y.cols;
    return payload;
}

json DaRuntime::train(std::uint64_t seed) {
    if (!prepared_) throw MlError("no prepared data");
    const PreparedData& data = *prepared_;
    json payload;
    ModelSpec spec = config_.expert;
    std::string metric(default_metric(config_.pipeline.task));
    if (config_.automl) {
        metric = config_.metric;
        const AutoMlResult search = automl_search(data, metric, static_cast<std::size_t>(config_.folds), config_.budget, seed);
        spec = search.best;
        payload["mode"] = "automl";
        payload["algorithm"] = spec.algorithm;
        payload["hyperparams"] = hyperparams_json(spec);
        payload["metric"] = metric;
        payload["cv_score"] = search.leaderboard.front().score;
        payload["candidates"] = search.leaderboard.size();
    } else {
        payload["mode"] = "expert";
        payload["algorithm"] = spec.algorithm;
        payload["hyperparams"] = hyperparams_json(spec);
        payload["metric"] = metric;
    }
    TrainedModel m = fit(spec, data, seed);
    payload["train_score"] = score(m, data.x, data.y, metric);
    payload["rows"] = data.x.rows;
    model_ = std::move(m);
    report_ = payload;
    return payload;
}

json DaRuntime::predict(std::vector<Value>& properties) {
    if (!model_) throw MlError("model not ready");
    const TrainedModel& m = *model_;
    const auto& features = m.prep.spec.features;
    json inputs = json::object();
    std::vector<std::vector<Cell>> records;
    const std::size_t lag = m.prep.lag();
    const bool windowed = m.prep.spec.sequential && m.prep.spec.window;
    if (windowed) {
        const Dataset ds = combined();
        if (ds.size() < lag) {
            throw MlError("window needs " + std::to_string(lag) + " rows, dataset has " + std::to_string(ds.size()));
        }
        std::vector<std::size_t> cols;
        for (const auto& f : features) {
            auto c = ds.column_index(f.name);
            if (!c) throw MlError("dataset has no column '" + f.name + "'");
            cols.push_back(*c);
        }
        for (std::size_t r = ds.size() - lag; r < ds.size(); ++r) {
            std::vector<Cell> rec;
            for (std::size_t c : cols) rec.push_back(ds.rows[r][c]);
            records.push_back(std::move(rec));
        }
        inputs["window"] = lag;
    } else {
        std::vector<Cell> rec;
        for (const auto& f : features) {
            auto idx = thing_.property_index(f.name);
            if (!idx) throw MlError("model feature '" + f.name + "' is not a property of " + thing_.name);
            rec.push_back(cell_of(properties[*idx]));
            inputs[f.name] = value_json(properties[*idx]);
        }
        records.push_back(std::move(rec));
    }
    const std::vector<Prediction> preds = stf::predict(m, records);
    json outputs = json::object();
    const std::size_t h = m.prep.horizon();
    for (std::size_t l = 0; l < m.prep.spec.labels.size(); ++l) {
        const std::string& name = m.prep.spec.labels[l].name;
        auto idx = thing_.property_index(name);
        if (!idx) throw MlError("model label '" + name + "' is not a property of " + thing_.name);
        const ScalarType type = thing_.properties[*idx].type;
        const std::size_t o = l * h;
        std::optional<Value> v;
        if (m.task == Task::Classification) {
            v = parse_value(prediction_text(m, o, preds[o]), type);
        } else if (type == ScalarType::Float) {
            v = Value::real(preds[o].value);
        } else if (type == ScalarType::Int || type == ScalarType::Timestamp) {
            if (std::isfinite(preds[o].value)) {
                const auto r = static_cast<std::int64_t>(std::llround(preds[o].value));
                v = type == ScalarType::Int ? Value::integer(r) : Value::timestamp(r);
            }
        }
        if (!v) {
            throw MlError("prediction for '" + name + "' does not fit " + std::string(to_string(type)));
        }
        properties[*idx] = *v;
        outputs[name] = value_json(*v);
    }
    json payload;
    payload["inputs"] = inputs;
    payload["outputs"] = outputs;
    return payload;
}

}  // namespace stf
