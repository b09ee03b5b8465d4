#include "stf/ml/model_io.hpp"

#include <fstream>

#include "json.hpp"

#include "stf/model/error.hpp"
#include "stf/syntax/parser.hpp"

namespace stf {

using json = nlohmann::ordered_json;

namespace {

json features_json(const std::vector<FeatureSpec>& fs) {
    json a = json::array();
    for (const auto& f : fs) a.push_back({{"name", f.name}, {"type", std::string(to_string(f.type))}});
    return a;
}

json params_json(const OutputParams& p) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, BaselineParams>) {
                if (!v.class_counts.empty()) return {{"class_counts", v.class_counts}};
                return {{"mean", v.mean}};
            } else if constexpr (std::is_same_v<T, LinearParams> || std::is_same_v<T, LogisticParams>) {
                return {{"weights", v.weights}, {"intercept", v.intercept}};
            } else if constexpr (std::is_same_v<T, KnnParams>) {
                json rows = json::array();
                for (std::size_t i = 0; i < v.train.rows; ++i) {
                    rows.push_back(std::vector<double>(v.train.row(i), v.train.row(i) + v.train.cols));
                }
                return {{"k", v.k}, {"mean", v.mean}, {"std", v.std}, {"train", rows}, {"labels", v.labels}};
            } else {
                return {{"priors", v.priors}, {"means", v.means}, {"variances", v.variances}};
            }
        },
        p);
}

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& msg) const { throw MlError(source_ + ": " + msg); }

    const json& field(const json& obj, const char* key, const char* where) const {
        if (!obj.is_object() || !obj.contains(key)) fail(std::string("missing '") + key + "' in " + where);
        return obj.at(key);
    }

    double number(const json& v, const char* what) const {
        if (!v.is_number()) fail(std::string(what) + " must be a number");
        return v.get<double>();
    }

    std::vector<double> numbers(const json& v, const char* what, std::size_t expect) const {
        if (!v.is_array()) fail(std::string(what) + " must be an array");
        std::vector<double> out;
        for (const auto& e : v) out.push_back(number(e, what));
        if (expect != SIZE_MAX && out.size() != expect) {
            fail(std::string(what) + " has " + std::to_string(out.size()) + " entries, expected " + std::to_string(expect));
        }
        return out;
    }

    std::vector<FeatureSpec> features(const json& v, const char* what) const {
        if (!v.is_array()) fail(std::string("schema.") + what + " must be an array");
        std::vector<FeatureSpec> out;
        for (const auto& e : v) {
            const json& n = field(e, "name", "schema entry");
            if (!n.is_string()) fail("schema entry name must be a string");
            ColumnType t = ColumnType::Numeric;
            if (e.contains("type")) {
                if (!e["type"].is_string()) fail("schema entry type must be a string");
                auto parsed = parse_column_type(e["type"].get<std::string>());
                if (!parsed) fail("unknown column type '" + e["type"].get<std::string>() + "'");
                t = *parsed;
            }
            out.push_back({n.get<std::string>(), t});
        }
        return out;
    }

    std::vector<std::string> strings(const json& v, const std::string& what) const {
        if (!v.is_array()) fail(what + " must be an array of strings");
        std::vector<std::string> out;
        for (const auto& e : v) {
            if (!e.is_string()) fail(what + " must be an array of strings");
            out.push_back(e.get<std::string>());
        }
        if (!std::is_sorted(out.begin(), out.end()) || std::adjacent_find(out.begin(), out.end()) != out.end()) {
            fail(what + " must be sorted and unique");
        }
        return out;
    }

private:
    std::string source_;
};

}  // namespace

std::string model_to_json(const TrainedModel& m) {
    const Preprocessor& p = m.prep;
    json j;
    j["format_version"] = kModelFormatVersion;
    j["algorithm"] = m.spec.algorithm;
    j["task"] = std::string(to_string(m.task));
    json hp = json::object();
    for (const auto& [k, v] : m.spec.hyperparams) hp[k] = v;
    j["hyperparams"] = hp;
    j["schema"] = {{"features", features_json(p.spec.features)},
                   {"labels", features_json(p.spec.labels)},
                   {"sequential", p.spec.sequential}};
    json cols = json::array();
    for (std::size_t c = 0; c < p.scaler.size(); ++c) {
        cols.push_back({{"name", p.expanded_names[c]}, {"p1", p.scaler[c].p1}, {"p2", p.scaler[c].p2}});
    }
    j["scaler"] = {{"kind", std::string(to_string(p.spec.scaling))}, {"columns", cols}};
    json enc_f = json::object(), enc_l = json::object();
    for (std::size_t f = 0; f < p.spec.features.size(); ++f) {
        if (p.spec.features[f].type == ColumnType::Categorical) enc_f[p.spec.features[f].name] = p.categories[f];
    }
    for (std::size_t l = 0; l < p.classes.size(); ++l) enc_l[p.spec.labels[l].name] = p.classes[l];
    j["encoder"] = {{"features", enc_f}, {"labels", enc_l}};
    json fill = json::object();
    auto categorical = [&](const std::string& name) {
        for (const auto* group : {&p.spec.features, &p.spec.labels}) {
            for (const auto& f : *group) {
                if (f.name == name) return f.type == ColumnType::Categorical;
            }
        }
        return false;
    };
    for (const auto& [name, cell] : p.fill) {
        if (categorical(name)) {
            fill[name] = cell.text;
        } else {
            fill[name] = cell.number;
        }
    }
    j["imputer"] = {{"policy", std::string(to_string(p.spec.missing))}, {"fill", fill}};
    j["window"] = p.spec.window ? json{{"lag", p.spec.window->lag}, {"horizon", p.spec.window->horizon}} : json();
    json outs = json::array();
    for (const auto& o : m.outputs) outs.push_back(params_json(o));
    j["parameters"] = {{"outputs", outs}};
    j["trained_on"] = m.trained_on;
    return j.dump(2) + "\n";
}

TrainedModel model_from_json(const std::string& text, const std::string& source) {
    Reader r(source);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        r.fail(std::string("not valid JSON: ") + e.what());
    }
    if (!j.is_object()) r.fail("model file must be a JSON object");
    const json& ver = r.field(j, "format_version", "model");
    if (!ver.is_number_integer() || ver.get<int>() != kModelFormatVersion) {
        r.fail("unsupported format_version " + ver.dump() + " (expected " + std::to_string(kModelFormatVersion) + ")");
    }
    const json& alg = r.field(j, "algorithm", "model");
    if (!alg.is_string()) r.fail("algorithm must be a string");
    TrainedModel m;
    m.spec.algorithm = alg.get<std::string>();
    const AlgorithmInfo* info = find_algorithm(m.spec.algorithm);
    if (!info) r.fail("unknown algorithm '" + m.spec.algorithm + "'");
    const json& task = r.field(j, "task", "model");
    if (task == "classification") {
        m.task = Task::Classification;
    } else if (task == "regression") {
        m.task = Task::Regression;
    } else {
        r.fail("task must be 'classification' or 'regression'");
    }
    if (!supports(*info, m.task)) r.fail(m.spec.algorithm + " does not support " + std::string(to_string(m.task)));
    if (j.contains("hyperparams")) {
        if (!j["hyperparams"].is_object()) r.fail("hyperparams must be an object");
        for (const auto& [k, v] : j["hyperparams"].items()) {
            const double val = r.number(v, "hyperparameter");
            if (auto why = check_hyperparam(*info, k, val); !why.empty()) r.fail("hyperparameter '" + k + "' " + why);
            m.spec.hyperparams[k] = val;
        }
    }

    const json& schema = r.field(j, "schema", "model");
    Preprocessor& p = m.prep;
    p.spec.task = m.task;
    p.spec.features = r.features(r.field(schema, "features", "schema"), "features");
    p.spec.labels = r.features(r.field(schema, "labels", "schema"), "labels");
    if (p.spec.features.empty()) r.fail("schema.features is empty");
    if (p.spec.labels.empty()) r.fail("schema.labels is empty");
    if (schema.contains("sequential")) {
        if (!schema["sequential"].is_boolean()) r.fail("schema.sequential must be a boolean");
        p.spec.sequential = schema["sequential"].get<bool>();
    }
    for (const auto& l : p.spec.labels) {
        const bool cat = l.type == ColumnType::Categorical;
        if (cat != (m.task == Task::Classification)) r.fail("label '" + l.name + "' type does not match the task");
    }
    if (j.contains("window") && !j["window"].is_null()) {
        const json& w = j["window"];
        const double lag = r.number(r.field(w, "lag", "window"), "window.lag");
        const double hor = r.number(r.field(w, "horizon", "window"), "window.horizon");
        if (lag < 1 || hor < 1) r.fail("window lag and horizon must be positive");
        p.spec.window = Window{static_cast<std::int64_t>(lag), static_cast<std::int64_t>(hor)};
        p.spec.sequential = true;
    }

    const json enc = j.contains("encoder") ? j["encoder"] : json::object();
    const json enc_f = enc.contains("features") ? enc["features"] : json::object();
    const json enc_l = enc.contains("labels") ? enc["labels"] : json::object();
    p.categories.resize(p.spec.features.size());
    for (std::size_t f = 0; f < p.spec.features.size(); ++f) {
        const FeatureSpec& fs = p.spec.features[f];
        if (fs.type == ColumnType::Categorical) {
            if (!enc_f.contains(fs.name)) r.fail("encoder has no categories for feature '" + fs.name + "'");
            p.categories[f] = r.strings(enc_f[fs.name], "encoder.features." + fs.name);
            for (const auto& c : p.categories[f]) p.expanded_names.push_back(fs.name + "=" + c);
        } else if (fs.type == ColumnType::Timestamp) {
            p.expanded_names.push_back(fs.name + ".hour");
            p.expanded_names.push_back(fs.name + ".dow");
            p.expanded_names.push_back(fs.name + ".epoch");
        } else {
            p.expanded_names.push_back(fs.name);
        }
    }
    if (m.task == Task::Classification) {
        for (const auto& l : p.spec.labels) {
            if (!enc_l.contains(l.name)) r.fail("encoder has no classes for label '" + l.name + "'");
            p.classes.push_back(r.strings(enc_l[l.name], "encoder.labels." + l.name));
            if (p.classes.back().empty()) r.fail("label '" + l.name + "' has no classes");
        }
    }

    p.scaler.assign(p.expanded_names.size(), ScalerEntry{});
    if (j.contains("scaler") && !j["scaler"].is_null()) {
        const json& sc = j["scaler"];
        const json& kind = r.field(sc, "kind", "scaler");
        if (kind == "none") {
            p.spec.scaling = Scaling::None;
        } else if (kind == "minmax") {
            p.spec.scaling = Scaling::MinMax;
        } else if (kind == "zscore") {
            p.spec.scaling = Scaling::ZScore;
        } else {
            r.fail("unknown scaler kind " + kind.dump());
        }
        const json& cols = r.field(sc, "columns", "scaler");
        if (!cols.is_array() || cols.size() != p.expanded_names.size()) {
            r.fail("scaler.columns must have one entry per expanded feature (" + std::to_string(p.expanded_names.size()) +
                   ")");
        }
        std::size_t col = 0;
        for (std::size_t f = 0; f < p.spec.features.size(); ++f) {
            const bool categorical = p.spec.features[f].type == ColumnType::Categorical;
            const std::size_t width =
                categorical ? p.categories[f].size() : (p.spec.features[f].type == ColumnType::Timestamp ? 3 : 1);
            for (std::size_t c = col; c < col + width; ++c) {
                const json& e = cols[c];
                const json& name = r.field(e, "name", "scaler column");
                if (name != p.expanded_names[c]) r.fail("scaler column " + std::to_string(c) + " is not '" + p.expanded_names[c] + "'");
                p.scaler[c] = {categorical ? Scaling::None : p.spec.scaling, r.number(r.field(e, "p1", "scaler column"), "p1"),
                               r.number(r.field(e, "p2", "scaler column"), "p2")};
            }
            col += width;
        }
    }
    if (j.contains("imputer") && !j["imputer"].is_null()) {
        const json& im = j["imputer"];
        const json& pol = r.field(im, "policy", "imputer");
        if (pol == "drop") {
            p.spec.missing = MissingPolicy::Drop;
        } else if (pol == "mean_impute") {
            p.spec.missing = MissingPolicy::MeanImpute;
        } else {
            r.fail("unknown imputer policy " + pol.dump());
        }
        if (im.contains("fill")) {
            for (const auto& [k, v] : im["fill"].items()) {
                if (v.is_string()) {
                    p.fill.emplace_back(k, Cell::of_text(v.get<std::string>()));
                } else {
                    p.fill.emplace_back(k, Cell::of_number(r.number(v, "imputer fill")));
                }
            }
        }
    }

    const std::vector<std::string> fnames = p.feature_names();
    const std::size_t d = fnames.size();
    const json& outs = r.field(r.field(j, "parameters", "model"), "outputs", "parameters");
    if (!outs.is_array() || outs.size() != p.output_count()) {
        r.fail("parameters.outputs must have " + std::to_string(p.output_count()) + " entries");
    }
    for (std::size_t o = 0; o < outs.size(); ++o) {
        const json& e = outs[o];
        const std::size_t nc = m.task == Task::Classification ? p.classes[o / p.horizon()].size() : 0;
        const std::string& a = m.spec.algorithm;
        if (a == "baseline") {
            BaselineParams b;
            if (m.task == Task::Classification) {
                b.class_counts = r.numbers(r.field(e, "class_counts", "baseline parameters"), "class_counts", nc);
            } else {
                b.mean = r.number(r.field(e, "mean", "baseline parameters"), "mean");
            }
            m.outputs.emplace_back(b);
        } else if (a == "linear_regression" || a == "logistic_regression") {
            std::vector<double> w = r.numbers(r.field(e, "weights", "parameters"), "weights", d);
            const double b = r.number(r.field(e, "intercept", "parameters"), "intercept");
            if (a == "linear_regression") {
                m.outputs.emplace_back(LinearParams{w, b});
            } else {
                if (nc != 2) r.fail("logistic_regression needs exactly two classes");
                m.outputs.emplace_back(LogisticParams{w, b});
            }
        } else if (a == "knn") {
            KnnParams k;
            const double kv = r.number(r.field(e, "k", "knn parameters"), "k");
            if (kv < 1) r.fail("knn k must be at least 1");
            k.k = static_cast<std::size_t>(kv);
            k.n_classes = nc;
            k.mean = r.numbers(r.field(e, "mean", "knn parameters"), "mean", d);
            k.std = r.numbers(r.field(e, "std", "knn parameters"), "std", d);
            const json& train = r.field(e, "train", "knn parameters");
            if (!train.is_array() || train.empty()) r.fail("knn train must be a nonempty array");
            k.train = Matrix(train.size(), d);
            for (std::size_t i = 0; i < train.size(); ++i) {
                auto row = r.numbers(train[i], "knn train row", d);
                std::copy(row.begin(), row.end(), k.train.row(i));
            }
            for (double v : r.numbers(r.field(e, "labels", "knn parameters"), "labels", train.size())) {
                if (v < 0 || v >= static_cast<double>(nc)) r.fail("knn label out of range");
                k.labels.push_back(static_cast<std::size_t>(v));
            }
            m.outputs.emplace_back(std::move(k));
        } else {
            NaiveBayesParams nb;
            nb.priors = r.numbers(r.field(e, "priors", "gaussian_nb parameters"), "priors", nc);
            const json& means = r.field(e, "means", "gaussian_nb parameters");
            const json& vars = r.field(e, "variances", "gaussian_nb parameters");
            if (!means.is_array() || means.size() != nc || !vars.is_array() || vars.size() != nc) {
                r.fail("gaussian_nb means/variances need one row per class");
            }
            for (std::size_t c = 0; c < nc; ++c) {
                nb.means.push_back(r.numbers(means[c], "means", d));
                nb.variances.push_back(r.numbers(vars[c], "variances", d));
                for (double v : nb.variances.back()) {
                    if (!(v > 0)) r.fail("gaussian_nb variances must be positive");
                }
            }
            m.outputs.emplace_back(std::move(nb));
        }
    }
    if (j.contains("trained_on")) m.trained_on = static_cast<std::uint64_t>(r.number(j["trained_on"], "trained_on"));
    return m;
}

void save_model(const TrainedModel& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw MlError("cannot write model file '" + path + "'");
    out << model_to_json(m);
}

TrainedModel load_model(const std::string& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const Error& e) {
        throw MlError(e.what());
    }
    return model_from_json(text, path);
}

}  // namespace stf
