#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "stf/ml/matrix.hpp"
#include "stf/ml/preprocess.hpp"

namespace stf {

struct ModelSpec {
    std::string algorithm;
    std::map<std::string, double> hyperparams;
    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct HyperparamInfo {
    std::string_view name;
    bool integer;
    double min;  ///< inclusive lower bound
    bool min_exclusive;
    double default_value;
};

struct AlgorithmInfo {
    std::string_view name;
    bool classification;
    bool regression;
    std::vector<HyperparamInfo> hyperparams;
};

/// baseline, linear_regression, logistic_regression, knn, gaussian_nb.
const std::vector<AlgorithmInfo>& algorithms();
const AlgorithmInfo* find_algorithm(std::string_view name);
bool supports(const AlgorithmInfo& a, Task t);

/// Empty when valid, else a reason.
std::string check_hyperparam(const AlgorithmInfo& a, std::string_view name, double value);

/// Hyperparameter value or the algorithm's default.
double hyperparam(const ModelSpec& spec, std::string_view name);

struct BaselineParams {
    std::vector<double> class_counts;  ///< classification
    double mean = 0.0;                 ///< regression
    friend bool operator==(const BaselineParams&, const BaselineParams&) = default;
};
struct LinearParams {
    std::vector<double> weights;
    double intercept = 0.0;
    friend bool operator==(const LinearParams&, const LinearParams&) = default;
};
struct LogisticParams {
    std::vector<double> weights;
    double intercept = 0.0;
    friend bool operator==(const LogisticParams&, const LogisticParams&) = default;
};
struct KnnParams {
    std::size_t k = 5;
    std::vector<double> mean;
    std::vector<double> std;
    Matrix train;  ///< standardized
    std::vector<std::size_t> labels;
    std::size_t n_classes = 0;
    friend bool operator==(const KnnParams&, const KnnParams&) = default;
};
struct NaiveBayesParams {
    std::vector<double> priors;
    std::vector<std::vector<double>> means;
    std::vector<std::vector<double>> variances;
    friend bool operator==(const NaiveBayesParams&, const NaiveBayesParams&) = default;
};

using OutputParams = std::variant<BaselineParams, LinearParams, LogisticParams, KnnParams, NaiveBayesParams>;

struct TrainedModel {
    ModelSpec spec;
    Task task = Task::Regression;
    Preprocessor prep;
    std::vector<OutputParams> outputs;  ///< one per prepared label column
    std::uint64_t trained_on = 0;
};

struct Prediction {
    double value = 0.0;              ///< regression value, or class index
    std::vector<double> probabilities;  ///< classification only
};

/// Fits one model per output column of `data.y`. Throws MlError on a singular
/// system, a single-class label, or an algorithm that does not fit the task.
TrainedModel fit(const ModelSpec& spec, const PreparedData& data, std::uint64_t seed = 0);

/// Predicts every output for each row of prepared features.
std::vector<std::vector<Prediction>> predict_prepared(const TrainedModel& m, const Matrix& x);

/// Predicts from raw feature records (`m.prep.lag()` records, oldest first).
std::vector<Prediction> predict(const TrainedModel& m, const std::vector<std::vector<Cell>>& records,
                                std::size_t* unknown = nullptr);

/// Class name or formatted number of a prediction for output `o`.
std::string prediction_text(const TrainedModel& m, std::size_t o, const Prediction& p);

}  // namespace stf
