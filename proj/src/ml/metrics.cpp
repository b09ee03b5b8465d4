#include "stf/ml/metrics.hpp"

#include <cmath>

#include "stf/model/error.hpp"

namespace stf {

MetricsReport evaluate_classification(const std::vector<std::size_t>& predicted, const std::vector<std::size_t>& truth,
                                      std::size_t n_classes) {
    if (predicted.size() != truth.size()) throw MlError("prediction and truth lengths differ");
    if (truth.empty()) throw MlError("cannot evaluate zero predictions");
    MetricsReport r;
    r.task = Task::Classification;
    r.confusion.assign(n_classes, std::vector<std::size_t>(n_classes, 0));
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] >= n_classes || predicted[i] >= n_classes) throw MlError("class index out of range");
        ++r.confusion[truth[i]][predicted[i]];
        if (truth[i] == predicted[i]) ++correct;
    }
    r.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
    r.per_class.resize(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c) {
        std::size_t tp = r.confusion[c][c], fp = 0, fn = 0;
        for (std::size_t o = 0; o < n_classes; ++o) {
            if (o == c) continue;
            fp += r.confusion[o][c];
            fn += r.confusion[c][o];
        }
        ClassScores& s = r.per_class[c];
        s.support = tp + fn;
        s.precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        s.recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
        s.f1 = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
        r.macro_precision += s.precision;
        r.macro_recall += s.recall;
        r.macro_f1 += s.f1;
    }
    if (n_classes) {
        r.macro_precision /= static_cast<double>(n_classes);
        r.macro_recall /= static_cast<double>(n_classes);
        r.macro_f1 /= static_cast<double>(n_classes);
    }
    return r;
}

MetricsReport evaluate_regression(const std::vector<double>& predicted, const std::vector<double>& truth) {
    if (predicted.size() != truth.size()) throw MlError("prediction and truth lengths differ");
    if (truth.empty()) throw MlError("cannot evaluate zero predictions");
    MetricsReport r;
    r.task = Task::Regression;
    double se = 0, ae = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double e = predicted[i] - truth[i];
        se += e * e;
        ae += std::fabs(e);
    }
    const auto n = static_cast<double>(truth.size());
    r.rmse = std::sqrt(se / n);
    r.mae = ae / n;
    return r;
}

bool metric_known(std::string_view metric) { return metric == "accuracy" || metric == "macro_f1" || metric == "rmse"; }

bool metric_supports(std::string_view metric, Task t) {
    if (t == Task::Classification) return metric == "accuracy" || metric == "macro_f1";
    return metric == "rmse";
}

bool higher_is_better(std::string_view metric) { return metric != "rmse"; }

double metric_value(const MetricsReport& r, std::string_view metric) {
    if (metric == "accuracy") return r.accuracy;
    if (metric == "macro_f1") return r.macro_f1;
    if (metric == "rmse") return r.rmse;
    throw MlError("unknown metric '" + std::string(metric) + "'");
}

std::string_view default_metric(Task t) { return t == Task::Classification ? "macro_f1" : "rmse"; }

}  // namespace stf
