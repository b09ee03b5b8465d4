#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "stf/ml/preprocess.hpp"

namespace stf {

struct ClassScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

struct MetricsReport {
    Task task = Task::Classification;
    // classification
    double accuracy = 0.0;
    std::vector<ClassScores> per_class;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    std::vector<std::vector<std::size_t>> confusion;  ///< [truth][predicted]
    // regression
    double rmse = 0.0;
    double mae = 0.0;
};

/// Labels are class indices in [0, n_classes). 0/0 precision or recall is 0.
MetricsReport evaluate_classification(const std::vector<std::size_t>& predicted, const std::vector<std::size_t>& truth,
                                      std::size_t n_classes);
MetricsReport evaluate_regression(const std::vector<double>& predicted, const std::vector<double>& truth);

/// accuracy, macro_f1 (classification) or rmse (regression).
bool metric_supports(std::string_view metric, Task t);
bool metric_known(std::string_view metric);
bool higher_is_better(std::string_view metric);
double metric_value(const MetricsReport& r, std::string_view metric);
std::string_view default_metric(Task t);

}  // namespace stf
