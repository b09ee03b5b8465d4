#pragma once

#include <string>
#include <vector>

#include "stf/ml/dataset.hpp"
#include "stf/ml/preprocess.hpp"

namespace stf::testing {

/// Numeric dataset with columns x0..x{d-1} and y.
inline Dataset numeric_dataset(const std::vector<std::vector<double>>& xs, const std::vector<double>& ys) {
    Dataset ds;
    const std::size_t d = xs.empty() ? 0 : xs[0].size();
    for (std::size_t j = 0; j < d; ++j) ds.columns.push_back({"x" + std::to_string(j), ColumnType::Numeric});
    ds.columns.push_back({"y", ColumnType::Numeric});
    for (std::size_t i = 0; i < xs.size(); ++i) {
        std::vector<Cell> row;
        for (double v : xs[i]) row.push_back(Cell::of_number(v));
        row.push_back(Cell::of_number(ys[i]));
        ds.rows.push_back(row);
    }
    return ds;
}

/// Numeric features x0.. and a categorical label y.
inline Dataset class_dataset(const std::vector<std::vector<double>>& xs, const std::vector<std::string>& ys) {
    Dataset ds = numeric_dataset(xs, std::vector<double>(ys.size(), 0.0));
    ds.columns.back().type = ColumnType::Categorical;
    for (std::size_t i = 0; i < ys.size(); ++i) ds.rows[i].back() = Cell::of_text(ys[i]);
    return ds;
}

inline PipelineSpec spec_for(const Dataset& ds, Task task) {
    PipelineSpec s;
    for (std::size_t j = 0; j + 1 < ds.columns.size(); ++j) s.features.push_back({ds.columns[j].name, ds.columns[j].type});
    s.labels.push_back({ds.columns.back().name, ds.columns.back().type});
    s.task = task;
    return s;
}

}  // namespace stf::testing
