#include "stf/ml/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>

#include "stf/ml/kernels.hpp"
#include "stf/model/error.hpp"
#include "stf/model/value.hpp"

namespace stf {

namespace {

constexpr double kVarianceFloor = 1e-9;

const std::vector<AlgorithmInfo> kAlgorithms = {
    {"baseline", true, true, {}},
    {"linear_regression", false, true, {{"lambda", false, 0.0, false, 1e-8}}},
    {"logistic_regression",
     true,
     false,
     {{"learning_rate", false, 0.0, true, 0.1}, {"iterations", true, 1.0, false, 500}}},
    {"knn", true, false, {{"k", true, 1.0, false, 5}}},
    {"gaussian_nb", true, false, {}},
};

std::size_t argmax(const std::vector<double>& v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

/// Solves A x = b for symmetric positive definite A.
std::vector<double> cholesky_solve(Matrix a, std::vector<double> b) {
    const std::size_t n = a.rows;
    double max_diag = 1.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::fabs(a(i, i)));
    const double tiny = 1e-13 * max_diag;
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
        if (!(d > tiny)) throw MlError("singular system in linear_regression (increase lambda or remove collinear features)");
        const double l = std::sqrt(d);
        a(j, j) = l;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
            a(i, j) = s / l;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= a(i, k) * b[k];
        b[i] = s / a(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a(k, i) * b[k];
        b[i] = s / a(i, i);
    }
    return b;
}

std::vector<std::size_t> class_column(const Matrix& y, std::size_t col) {
    std::vector<std::size_t> out(y.rows);
    for (std::size_t i = 0; i < y.rows; ++i) out[i] = static_cast<std::size_t>(y(i, col));
    return out;
}

BaselineParams fit_baseline(const Matrix& y, std::size_t col, Task task, std::size_t n_classes) {
    BaselineParams p;
    if (task == Task::Classification) {
        p.class_counts.assign(n_classes, 0.0);
        for (std::size_t i = 0; i < y.rows; ++i) p.class_counts[static_cast<std::size_t>(y(i, col))] += 1.0;
    } else {
        double s = 0;
        for (std::size_t i = 0; i < y.rows; ++i) s += y(i, col);
        p.mean = s / static_cast<double>(y.rows);
    }
    return p;
}

LinearParams fit_linear(const Matrix& x, const Matrix& y, std::size_t col, double lambda) {
    Matrix a = kernels::gram(x);
    for (std::size_t j = 0; j < x.cols; ++j) a(j, j) += lambda;
    std::vector<double> sol = cholesky_solve(std::move(a), kernels::xty(x, y, col));
    LinearParams p;
    p.intercept = sol.back();
    sol.pop_back();
    p.weights = std::move(sol);
    return p;
}

LogisticParams fit_logistic(const Matrix& x, const Matrix& y, std::size_t col, double lr, std::size_t iters) {
    std::vector<double> target(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) target[i] = y(i, col);
    std::vector<double> w(x.cols + 1, 0.0);
    for (std::size_t it = 0; it < iters; ++it) {
        const std::vector<double> g = kernels::logistic_gradient(x, target, w);
        for (std::size_t j = 0; j < w.size(); ++j) w[j] -= lr * g[j];
    }
    LogisticParams p;
    p.intercept = w.back();
    w.pop_back();
    p.weights = std::move(w);
    return p;
}

KnnParams fit_knn(const Matrix& x, const Matrix& y, std::size_t col, std::size_t k, std::size_t n_classes) {
    KnnParams p;
    p.k = k;
    p.n_classes = n_classes;
    p.mean.assign(x.cols, 0.0);
    p.std.assign(x.cols, 1.0);
    const auto n = static_cast<double>(x.rows);
    for (std::size_t j = 0; j < x.cols; ++j) {
        double s = 0;
        for (std::size_t i = 0; i < x.rows; ++i) s += x(i, j);
        const double mean = s / n;
        double ss = 0;
        for (std::size_t i = 0; i < x.rows; ++i) ss += (x(i, j) - mean) * (x(i, j) - mean);
        const double sd = std::sqrt(ss / n);
        p.mean[j] = mean;
        p.std[j] = sd > 0 ? sd : 1.0;
    }
    p.train = Matrix(x.rows, x.cols);
    for (std::size_t i = 0; i < x.rows; ++i) {
        for (std::size_t j = 0; j < x.cols; ++j) p.train(i, j) = (x(i, j) - p.mean[j]) / p.std[j];
    }
    p.labels = class_column(y, col);
    return p;
}

NaiveBayesParams fit_nb(const Matrix& x, const Matrix& y, std::size_t col, std::size_t n_classes) {
    NaiveBayesParams p;
    const std::size_t d = x.cols;
    std::vector<double> count(n_classes, 0.0);
    p.means.assign(n_classes, std::vector<double>(d, 0.0));
    p.variances.assign(n_classes, std::vector<double>(d, 1.0));
    const auto labels = class_column(y, col);
    for (std::size_t i = 0; i < x.rows; ++i) {
        count[labels[i]] += 1.0;
        for (std::size_t j = 0; j < d; ++j) p.means[labels[i]][j] += x(i, j);
    }
    for (std::size_t c = 0; c < n_classes; ++c) {
        if (count[c] == 0) continue;
        for (std::size_t j = 0; j < d; ++j) p.means[c][j] /= count[c];
    }
    std::vector<std::vector<double>> ss(n_classes, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < x.rows; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = x(i, j) - p.means[labels[i]][j];
            ss[labels[i]][j] += diff * diff;
        }
    }
    for (std::size_t c = 0; c < n_classes; ++c) {
        if (count[c] == 0) continue;
        for (std::size_t j = 0; j < d; ++j) p.variances[c][j] = std::max(ss[c][j] / count[c], kVarianceFloor);
    }
    p.priors.resize(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c) p.priors[c] = count[c] / static_cast<double>(x.rows);
    return p;
}

Prediction classify(std::vector<double> probs) {
    Prediction p;
    p.value = static_cast<double>(argmax(probs));
    p.probabilities = std::move(probs);
    return p;
}

Prediction predict_nb(const NaiveBayesParams& p, const double* x, std::size_t d) {
    const std::size_t nc = p.priors.size();
    std::vector<double> logp(nc, -std::numeric_limits<double>::infinity());
    for (std::size_t c = 0; c < nc; ++c) {
        if (p.priors[c] <= 0) continue;
        double s = std::log(p.priors[c]);
        for (std::size_t j = 0; j < d; ++j) {
            const double v = p.variances[c][j];
            const double diff = x[j] - p.means[c][j];
            s += -0.5 * std::log(2.0 * std::numbers::pi * v) - diff * diff / (2.0 * v);
        }
        logp[c] = s;
    }
    const double mx = *std::max_element(logp.begin(), logp.end());
    std::vector<double> probs(nc, 0.0);
    double total = 0;
    for (std::size_t c = 0; c < nc; ++c) {
        probs[c] = std::isinf(logp[c]) ? 0.0 : std::exp(logp[c] - mx);
        total += probs[c];
    }
    for (auto& v : probs) v /= total;
    return classify(std::move(probs));
}

Prediction knn_vote(const KnnParams& p, const double* dist) {
    const std::size_t n = p.train.rows;
    const std::size_t k = std::min(p.k, n);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                      [&](std::size_t a, std::size_t b) { return dist[a] < dist[b] || (dist[a] == dist[b] && a < b); });
    std::vector<double> votes(p.n_classes, 0.0);
    for (std::size_t i = 0; i < k; ++i) votes[p.labels[idx[i]]] += 1.0;
    for (auto& v : votes) v /= static_cast<double>(k);
    return classify(std::move(votes));
}

std::size_t distinct(const std::vector<std::size_t>& v) { return std::set<std::size_t>(v.begin(), v.end()).size(); }

}  // namespace

const std::vector<AlgorithmInfo>& algorithms() { return kAlgorithms; }

const AlgorithmInfo* find_algorithm(std::string_view name) {
    for (const auto& a : kAlgorithms) {
        if (a.name == name) return &a;
    }
    return nullptr;
}

bool supports(const AlgorithmInfo& a, Task t) { return t == Task::Classification ? a.classification : a.regression; }

std::string check_hyperparam(const AlgorithmInfo& a, std::string_view name, double value) {
    for (const auto& h : a.hyperparams) {
        if (h.name != name) continue;
        if (!std::isfinite(value)) return "must be finite";
        if (h.integer && std::nearbyint(value) != value) return "must be an integer";
        if (h.min_exclusive ? !(value > h.min) : !(value >= h.min)) {
            return std::string("must be ") + (h.min_exclusive ? "> " : ">= ") + format_double(h.min);
        }
        return {};
    }
    return "unknown hyperparameter for " + std::string(a.name);
}

double hyperparam(const ModelSpec& spec, std::string_view name) {
    auto it = spec.hyperparams.find(std::string(name));
    if (it != spec.hyperparams.end()) return it->second;
    if (const AlgorithmInfo* a = find_algorithm(spec.algorithm)) {
        for (const auto& h : a->hyperparams) {
            if (h.name == name) return h.default_value;
        }
    }
    throw MlError("no hyperparameter '" + std::string(name) + "' for " + spec.algorithm);
}

TrainedModel fit(const ModelSpec& spec, const PreparedData& data, std::uint64_t /*seed*/) {
    const AlgorithmInfo* info = find_algorithm(spec.algorithm);
    if (!info) throw MlError("unknown algorithm '" + spec.algorithm + "'");
    const Task task = data.prep.spec.task;
    if (!supports(*info, task)) {
        throw MlError(spec.algorithm + " does not support " + std::string(to_string(task)));
    }
    for (const auto& [k, v] : spec.hyperparams) {
        if (auto why = check_hyperparam(*info, k, v); !why.empty()) throw MlError("hyperparameter '" + k + "' " + why);
    }
    if (data.x.rows == 0) throw MlError("no training rows");
    if (data.y.cols == 0) throw MlError("no label columns to train on");

    TrainedModel m;
    m.spec = spec;
    m.task = task;
    m.prep = data.prep;
    m.trained_on = data.x.rows;
    const std::size_t h = data.prep.horizon();
    for (std::size_t o = 0; o < data.y.cols; ++o) {
        std::size_t n_classes = 0;
        if (task == Task::Classification) {
            n_classes = data.prep.classes[o / h].size();
            if (distinct(class_column(data.y, o)) < 2) {
                throw MlError("degenerate labels: classification with one class present in '" +
                              data.prep.label_names()[o] + "'");
            }
        }
        const std::string& alg = spec.algorithm;
        if (alg == "baseline") {
            m.outputs.emplace_back(fit_baseline(data.y, o, task, n_classes));
        } else if (alg == "linear_regression") {
            m.outputs.emplace_back(fit_linear(data.x, data.y, o, hyperparam(spec, "lambda")));
        } else if (alg == "logistic_regression") {
            if (n_classes != 2) throw MlError("logistic_regression is binary only");
            m.outputs.emplace_back(fit_logistic(data.x, data.y, o, hyperparam(spec, "learning_rate"),
                                                static_cast<std::size_t>(hyperparam(spec, "iterations"))));
        } else if (alg == "knn") {
            m.outputs.emplace_back(
                fit_knn(data.x, data.y, o, static_cast<std::size_t>(hyperparam(spec, "k")), n_classes));
        } else {
            m.outputs.emplace_back(fit_nb(data.x, data.y, o, n_classes));
        }
    }
    return m;
}

std::vector<std::vector<Prediction>> predict_prepared(const TrainedModel& m, const Matrix& x) {
    std::vector<std::vector<Prediction>> out(x.rows, std::vector<Prediction>(m.outputs.size()));
    for (std::size_t o = 0; o < m.outputs.size(); ++o) {
        std::visit(
            [&](const auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, KnnParams>) {
                    if (x.cols != p.mean.size()) throw MlError("feature width mismatch");
                    Matrix q(x.rows, x.cols);
                    for (std::size_t i = 0; i < x.rows; ++i) {
                        for (std::size_t j = 0; j < x.cols; ++j) q(i, j) = (x(i, j) - p.mean[j]) / p.std[j];
                    }
                    const Matrix dist = kernels::sq_distances(q, p.train);
                    for (std::size_t i = 0; i < x.rows; ++i) out[i][o] = knn_vote(p, dist.row(i));
                } else {
                    for (std::size_t i = 0; i < x.rows; ++i) {
                        const double* r = x.row(i);
                        Prediction& pr = out[i][o];
                        if constexpr (std::is_same_v<T, BaselineParams>) {
                            if (m.task == Task::Classification) {
                                const double total = std::accumulate(p.class_counts.begin(), p.class_counts.end(), 0.0);
                                std::vector<double> probs = p.class_counts;
                                for (auto& v : probs) v /= total;
                                pr = classify(std::move(probs));
                            } else {
                                pr.value = p.mean;
                            }
                        } else if constexpr (std::is_same_v<T, LinearParams> || std::is_same_v<T, LogisticParams>) {
                            if (x.cols != p.weights.size()) throw MlError("feature width mismatch");
                            double z = p.intercept;
                            for (std::size_t j = 0; j < x.cols; ++j) z += p.weights[j] * r[j];
                            if constexpr (std::is_same_v<T, LinearParams>) {
                                pr.value = z;
                            } else {
                                const double pos = kernels::sigmoid(z);
                                pr.value = pos > 0.5 ? 1.0 : 0.0;
                                pr.probabilities = {1.0 - pos, pos};
                            }
                        } else {
                            if (!p.means.empty() && x.cols != p.means[0].size()) throw MlError("feature width mismatch");
                            pr = predict_nb(p, r, x.cols);
                        }
                    }
                }
            },
            m.outputs[o]);
    }
    return out;
}

std::vector<Prediction> predict(const TrainedModel& m, const std::vector<std::vector<Cell>>& records,
                                std::size_t* unknown) {
    const std::vector<double> row = m.prep.transform(records, unknown);
    Matrix x(1, row.size());
    std::copy(row.begin(), row.end(), x.row(0));
    return predict_prepared(m, x)[0];
}

std::string prediction_text(const TrainedModel& m, std::size_t o, const Prediction& p) {
    if (m.task == Task::Classification) {
        const auto& cls = m.prep.classes.at(o / m.prep.horizon());
        return cls.at(static_cast<std::size_t>(p.value));
    }
    return format_double(p.value);
}

}  // namespace stf
