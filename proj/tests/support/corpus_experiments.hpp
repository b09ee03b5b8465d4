#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "stf/corpus/generators.hpp"
#include "stf/ml/automl.hpp"
#include "stf/ml/dataset.hpp"
#include "stf/ml/learners.hpp"
#include "stf/runtime/interpreter.hpp"
#include "stf/syntax/parser.hpp"
#include "temp_dir.hpp"

namespace stf::testing {

inline std::string corpus_path(const std::string& name) { return std::string(STF_SOURCE_DIR) + "/corpus/" + name; }

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline double rmse_of(const std::vector<double>& predicted, const std::vector<double>& truth) {
    double se = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) se += (predicted[i] - truth[i]) * (predicted[i] - truth[i]);
    return std::sqrt(se / static_cast<double>(truth.size()));
}

struct UpliftOutcome {
    double automl_accuracy = 0.0;
    double baseline_accuracy = 0.0;
    std::string algorithm;
    std::size_t test_rows = 0;
};

/// Ordered split of gen_pingpong: AutoML on the head, accuracy on the tail,
/// against the majority baseline fitted on the same head.
inline UpliftOutcome pingpong_uplift(std::uint64_t seed, std::size_t n, double holdout) {
    const auto rows = pingpong_rows(seed, n);
    const std::size_t train = n - static_cast<std::size_t>(std::llround(static_cast<double>(n) * holdout));
    const Schema schema = {{"ip_block", ColumnType::Numeric},
                           {"hour", ColumnType::Numeric},
                           {"attacker", ColumnType::Categorical}};
    const Dataset head =
        parse_csv(pingpong_csv({rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(train)}), schema);
    PipelineSpec spec;
    spec.features = {{"ip_block", ColumnType::Numeric}, {"hour", ColumnType::Numeric}};
    spec.labels = {{"attacker", ColumnType::Categorical}};
    spec.task = Task::Classification;
    spec.scaling = Scaling::ZScore;
    const PreparedData data = preprocess(head, spec);
    const AutoMlResult search = automl_search(data, "accuracy", 5, kDefaultBudget, seed);
    const TrainedModel best = fit(search.best, data, seed);
    const TrainedModel baseline = fit(ModelSpec{"baseline", {}}, data, seed);
    auto accuracy = [&](const TrainedModel& m) {
        std::size_t correct = 0;
        for (std::size_t i = train; i < n; ++i) {
            const std::vector<std::vector<Cell>> rec = {
                {Cell::of_number(rows[i].ip_block), Cell::of_number(rows[i].hour)}};
            const auto p = predict(m, rec);
            if (prediction_text(m, 0, p[0]) == (rows[i].attacker ? "true" : "false")) ++correct;
        }
        return static_cast<double>(correct) / static_cast<double>(n - train);
    };
    return {accuracy(best), accuracy(baseline), search.best.algorithm, n - train};
}

struct NialmOutcome {
    double app1_accuracy = 0.0;
    double app2_accuracy = 0.0;
    std::size_t predictions = 0;
    std::size_t expected = 0;
};

/// Runs the corpus nialm model on a fresh gen_nialm split and scores the
/// appliance states the smart home prints against the generator's truth.
inline NialmOutcome nialm_pipeline(std::uint64_t seed, std::size_t T, double holdout) {
    TempDir dir;
    const CorpusSplit split = synthesize_split({"nialm", seed, T, std::nullopt}, holdout);
    dir.write("data/nialm.csv", split.csv);
    const std::string model_path = dir.write("nialm.stf", slurp(corpus_path("nialm.stf")));
    const LoadResult loaded = load_model_file(model_path);
    if (!loaded.model) return {};
    RunOptions opts;
    opts.data_root = dir.str();
    opts.seed = seed;
    const Trace trace = interpret(*loaded.model, "", parse_scenario(split.scenario), opts);
    const auto truth = nialm_rows(seed, T);
    NialmOutcome out;
    out.expected = T - split.train_rows;
    std::size_t ok1 = 0, ok2 = 0;
    for (const auto& e : trace) {
        if (e.kind != "print" || e.instance != "home") continue;
        const std::string text = e.payload["text"].get<std::string>();
        long long t = 0;
        char a1[8] = {}, a2[8] = {};
        if (std::sscanf(text.c_str(), "t=%lld app1=%7s app2=%7s", &t, a1, a2) != 3) continue;
        if (t < 0 || static_cast<std::size_t>(t) >= T) continue;
        const NialmRow& r = truth[static_cast<std::size_t>(t)];
        ++out.predictions;
        if ((std::string(a1) == "true") == r.app1_on) ++ok1;
        if ((std::string(a2) == "true") == r.app2_on) ++ok2;
    }
    if (out.expected) {
        out.app1_accuracy = static_cast<double>(ok1) / static_cast<double>(out.expected);
        out.app2_accuracy = static_cast<double>(ok2) / static_cast<double>(out.expected);
    }
    return out;
}

struct ForecastOutcome {
    double model_rmse = 0.0;
    double persistence_rmse = 0.0;
    std::size_t test_points = 0;
};

/// One-step-ahead forecasts over the final `holdout` share of a series: a
/// lag-window linear model fitted on earlier windows against persistence.
inline ForecastOutcome one_step_forecast(const std::vector<double>& series, std::size_t window, double holdout,
                                         double lambda = 1e-8) {
    const std::size_t n = series.size();
    const std::size_t cut = n - static_cast<std::size_t>(std::llround(static_cast<double>(n) * holdout));
    std::string csv = "price\n";
    for (double p : series) csv += format_double(p) + "\n";
    const Dataset ds = parse_csv(csv, {{"price", ColumnType::Numeric}});
    PipelineSpec spec;
    spec.features = {{"price", ColumnType::Numeric}};
    spec.labels = {{"price", ColumnType::Numeric}};
    spec.task = Task::Regression;
    spec.sequential = true;
    spec.window = Window{static_cast<std::int64_t>(window), 1};
    const PreparedData all = preprocess(ds, spec);
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t i = 0; i < all.x.rows; ++i) (i + window < cut ? train_idx : test_idx).push_back(i);
    PreparedData train = all;
    train.x = all.x.take_rows(train_idx);
    train.y = all.y.take_rows(train_idx);
    const TrainedModel m = fit(ModelSpec{"linear_regression", {{"lambda", lambda}}}, train);
    const Matrix xt = all.x.take_rows(test_idx);
    const auto preds = predict_prepared(m, xt);
    std::vector<double> model, naive, truth;
    for (std::size_t k = 0; k < test_idx.size(); ++k) {
        const std::size_t target = test_idx[k] + window;
        model.push_back(preds[k][0].value);
        naive.push_back(series[target - 1]);
        truth.push_back(series[target]);
    }
    return {rmse_of(model, truth), rmse_of(naive, truth), truth.size()};
}

}  // namespace stf::testing
