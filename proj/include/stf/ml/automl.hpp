#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stf/ml/learners.hpp"
#include "stf/ml/metrics.hpp"

namespace stf {

/// Row indices per fold. Sizes are floor(n/k) with the remainder spread over
/// the first folds. Rows are shuffled with the seed unless `ordered`.
std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t k, std::uint64_t seed, bool ordered);

struct CvResult {
    double mean = 0.0;
    std::vector<double> per_fold;
};

/// Mean of `metric` over folds. Multi-output models average the metric over outputs.
CvResult kfold_cv(const ModelSpec& spec, const PreparedData& data, std::size_t folds, std::uint64_t seed,
                  std::string_view metric);

/// Metric of a trained model on prepared rows, averaged over outputs.
double score(const TrainedModel& m, const Matrix& x, const Matrix& y, std::string_view metric);

struct LeaderboardEntry {
    ModelSpec spec;
    std::size_t rank_index = 0;  ///< position in enumeration order
    double score = 0.0;
    bool failed = false;
    std::string error;
};

struct AutoMlResult {
    ModelSpec best;
    std::vector<LeaderboardEntry> leaderboard;  ///< best first
};

/// The fixed candidate grid in enumeration order, filtered by task.
/// Logistic regression is dropped when any label has more than two classes.
std::vector<ModelSpec> candidate_grid(const PreparedData& data);

constexpr std::int64_t kDefaultBudget = 24;
constexpr std::int64_t kDefaultFolds = 5;

AutoMlResult automl_search(const PreparedData& data, std::string_view metric, std::size_t folds, std::int64_t budget,
                           std::uint64_t seed);

}  // namespace stf
