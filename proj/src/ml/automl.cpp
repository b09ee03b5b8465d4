#include "stf/ml/automl.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "stf/ml/kernels.hpp"
#include "stf/ml/rng.hpp"
#include "stf/model/error.hpp"

namespace stf {

std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t k, std::uint64_t seed, bool ordered) {
    if (k < 2) throw MlError("cross-validation needs at least 2 folds");
    if (n < k) throw MlError("too few rows (" + std::to_string(n) + ") for " + std::to_string(k) + " folds");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    if (!ordered) {
        SplitMix64 rng(seed);
        shuffle(order, rng);
    }
    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t pos = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = n / k + (f < n % k ? 1 : 0);
        folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                        order.begin() + static_cast<std::ptrdiff_t>(pos + size));
        pos += size;
    }
    return folds;
}

double score(const TrainedModel& m, const Matrix& x, const Matrix& y, std::string_view metric) {
    const auto preds = predict_prepared(m, x);
    double total = 0;
    for (std::size_t o = 0; o < y.cols; ++o) {
        MetricsReport r;
        if (m.task == Task::Classification) {
            std::vector<std::size_t> p(x.rows), t(x.rows);
            for (std::size_t i = 0; i < x.rows; ++i) {
                p[i] = static_cast<std::size_t>(preds[i][o].value);
                t[i] = static_cast<std::size_t>(y(i, o));
            }
            r = evaluate_classification(p, t, m.prep.classes[o / m.prep.horizon()].size());
        } else {
            std::vector<double> p(x.rows);
            for (std::size_t i = 0; i < x.rows; ++i) p[i] = preds[i][o].value;
            r = evaluate_regression(p, y.column(o));
        }
        total += metric_value(r, metric);
    }
    return total / static_cast<double>(y.cols);
}

CvResult kfold_cv(const ModelSpec& spec, const PreparedData& data, std::size_t folds, std::uint64_t seed,
                  std::string_view metric) {
    const auto parts = make_folds(data.x.rows, folds, seed, data.prep.spec.sequential);
    CvResult out;
    for (std::size_t f = 0; f < parts.size(); ++f) {
        std::vector<std::size_t> train;
        for (std::size_t g = 0; g < parts.size(); ++g) {
            if (g != f) train.insert(train.end(), parts[g].begin(), parts[g].end());
        }
        std::sort(train.begin(), train.end());
        PreparedData fold;
        fold.prep = data.prep;
        fold.x = data.x.take_rows(train);
        fold.y = data.y.take_rows(train);
        const TrainedModel m = fit(spec, fold, seed);
        out.per_fold.push_back(score(m, data.x.take_rows(parts[f]), data.y.take_rows(parts[f]), metric));
    }
    out.mean = std::accumulate(out.per_fold.begin(), out.per_fold.end(), 0.0) / static_cast<double>(out.per_fold.size());
    return out;
}

std::vector<ModelSpec> candidate_grid(const PreparedData& data) {
    const Task task = data.prep.spec.task;
    bool binary = true;
    for (const auto& c : data.prep.classes) binary = binary && c.size() == 2;
    std::vector<ModelSpec> grid;
    grid.push_back({"baseline", {}});
    if (task == Task::Regression) {
        for (double l : {1e-8, 1e-2, 1.0}) grid.push_back({"linear_regression", {{"lambda", l}}});
        return grid;
    }
    if (binary) {
        for (double lr : {0.01, 0.1}) {
            for (double it : {200.0, 500.0}) {
                grid.push_back({"logistic_regression", {{"iterations", it}, {"learning_rate", lr}}});
            }
        }
    }
    for (double k : {1.0, 3.0, 5.0, 7.0}) grid.push_back({"knn", {{"k", k}}});
    grid.push_back({"gaussian_nb", {}});
    return grid;
}

AutoMlResult automl_search(const PreparedData& data, std::string_view metric, std::size_t folds, std::int64_t budget,
                           std::uint64_t seed) {
    const Task task = data.prep.spec.task;
    if (!metric_supports(metric, task)) {
        throw MlError("metric '" + std::string(metric) + "' does not apply to " + std::string(to_string(task)));
    }
    if (task == Task::Classification) {
        for (std::size_t o = 0; o < data.y.cols; ++o) {
            const double first = data.y.rows ? data.y(0, o) : 0.0;
            bool varied = false;
            for (std::size_t i = 1; i < data.y.rows && !varied; ++i) varied = data.y(i, o) != first;
            if (!varied) throw MlError("degenerate labels: only one class present");
        }
    }
    std::vector<ModelSpec> grid = candidate_grid(data);
    if (budget < 1) throw MlError("automl budget must be at least 1");
    if (static_cast<std::size_t>(budget) < grid.size()) grid.resize(static_cast<std::size_t>(budget));
    if (grid.empty()) throw MlError("no applicable algorithms");

    std::vector<LeaderboardEntry> board(grid.size());
    kernels::for_each_index(grid.size(), [&](std::size_t i) {
        LeaderboardEntry& e = board[i];
        e.spec = grid[i];
        e.rank_index = i;
        try {
            e.score = kfold_cv(grid[i], data, folds, seed, metric).mean;
        } catch (const std::exception& ex) {
            e.failed = true;
            e.error = ex.what();
        }
    });
    const bool higher = higher_is_better(metric);
    std::stable_sort(board.begin(), board.end(), [&](const LeaderboardEntry& a, const LeaderboardEntry& b) {
        if (a.failed != b.failed) return !a.failed;
        if (a.failed) return false;
        return higher ? a.score > b.score : a.score < b.score;
    });
    if (board.front().failed) throw MlError("every automl candidate failed: " + board.front().error);
    return AutoMlResult{board.front().spec, std::move(board)};
}

}  // namespace stf
