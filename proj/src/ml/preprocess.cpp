#include "stf/ml/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "stf/model/error.hpp"

namespace stf {

namespace {

bool windowed(const PipelineSpec& s) { return s.sequential && s.window.has_value(); }

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

double hour_of_day(double epoch) {
    const auto s = static_cast<std::int64_t>(std::floor(epoch));
    return static_cast<double>(floor_div(s - floor_div(s, 86400) * 86400, 3600));
}

/// Monday = 0. 1970-01-01 was a Thursday.
double day_of_week(double epoch) {
    const auto days = floor_div(static_cast<std::int64_t>(std::floor(epoch)), 86400);
    return static_cast<double>(((days + 3) % 7 + 7) % 7);
}

std::size_t expanded_width(const FeatureSpec& f, const std::vector<std::string>& cats) {
    switch (f.type) {
        case ColumnType::Numeric: return 1;
        case ColumnType::Timestamp: return 3;
        case ColumnType::Categorical: return cats.size();
    }
    return 0;
}

Cell column_fill(const Dataset& ds, std::size_t c) {
    if (ds.columns[c].type == ColumnType::Categorical) {
        std::map<std::string, std::size_t> counts;
        for (const auto& r : ds.rows) {
            if (!r[c].missing) ++counts[r[c].text];
        }
        const std::string* best = nullptr;
        std::size_t best_n = 0;
        for (const auto& [k, n] : counts) {
            if (n > best_n) {
                best = &k;
                best_n = n;
            }
        }
        return Cell::of_text(best ? *best : std::string{});
    }
    double sum = 0;
    std::size_t n = 0;
    for (const auto& r : ds.rows) {
        if (!r[c].missing) {
            sum += r[c].number;
            ++n;
        }
    }
    return Cell::of_number(n ? sum / static_cast<double>(n) : 0.0);
}

}  // namespace

std::string_view to_string(Task t) { return t == Task::Classification ? "classification" : "regression"; }

ColumnType column_type_for(ScalarType t) {
    switch (t) {
        case ScalarType::Int:
        case ScalarType::Float: return ColumnType::Numeric;
        case ScalarType::Timestamp: return ColumnType::Timestamp;
        case ScalarType::Bool:
        case ScalarType::String: return ColumnType::Categorical;
    }
    return ColumnType::Numeric;
}

Task task_for(ScalarType label_type) {
    return label_type == ScalarType::Bool || label_type == ScalarType::String ? Task::Classification : Task::Regression;
}

PipelineSpec pipeline_spec(const Thing& thing) {
    if (!thing.da) throw MlError("thing '" + thing.name + "' has no data_analytics block");
    const DataAnalyticsSpec& da = *thing.da;
    PipelineSpec s;
    auto resolve = [&](const Ref& r) {
        const Property* p = thing.find_property(r.name);
        if (!p) throw MlError("thing '" + thing.name + "' has no property '" + r.name + "'");
        return FeatureSpec{r.name, column_type_for(p->type)};
    };
    for (const auto& f : da.features) s.features.push_back(resolve(f));
    for (const auto& l : da.labels) s.labels.push_back(resolve(l));
    if (!da.labels.empty()) {
        s.task = task_for(thing.find_property(da.labels.front().name)->type);
    }
    s.sequential = da.sequential;
    s.window = da.window;
    s.scaling = da.scaling;
    s.missing = da.missing;
    return s;
}

std::size_t window_count(std::size_t n, std::size_t w, std::size_t h) { return n >= w + h ? n - w - h + 1 : 0; }

std::size_t Preprocessor::lag() const { return windowed(spec) ? static_cast<std::size_t>(spec.window->lag) : 1; }
std::size_t Preprocessor::horizon() const {
    return windowed(spec) ? static_cast<std::size_t>(spec.window->horizon) : 1;
}

std::vector<std::string> Preprocessor::feature_names() const {
    if (!windowed(spec)) return expanded_names;
    std::vector<std::string> out;
    for (const auto& n : expanded_names) {
        for (std::size_t k = lag(); k >= 1; --k) out.push_back(n + "@-" + std::to_string(k));
    }
    return out;
}

std::vector<std::string> Preprocessor::label_names() const {
    std::vector<std::string> out;
    const std::size_t h = horizon();
    for (const auto& l : spec.labels) {
        if (!windowed(spec) || h == 1) {
            out.push_back(l.name);
        } else {
            for (std::size_t s = 0; s < h; ++s) out.push_back(l.name + "@+" + std::to_string(s));
        }
    }
    return out;
}

double Preprocessor::scale(std::size_t column, double v) const {
    const ScalerEntry& e = scaler[column];
    switch (e.kind) {
        case Scaling::None: return v;
        case Scaling::MinMax: return e.p2 > e.p1 ? (v - e.p1) / (e.p2 - e.p1) : v - e.p1;
        case Scaling::ZScore: return e.p2 > 0 ? (v - e.p1) / e.p2 : v - e.p1;
    }
    return v;
}

double Preprocessor::unscale(std::size_t column, double v) const {
    const ScalerEntry& e = scaler[column];
    switch (e.kind) {
        case Scaling::None: return v;
        case Scaling::MinMax: return e.p2 > e.p1 ? v * (e.p2 - e.p1) + e.p1 : v + e.p1;
        case Scaling::ZScore: return e.p2 > 0 ? v * e.p2 + e.p1 : v + e.p1;
    }
    return v;
}

std::vector<double> Preprocessor::expand(const std::vector<Cell>& record, std::size_t* unknown) const {
    if (record.size() != spec.features.size()) {
        throw MlError("record has " + std::to_string(record.size()) + " features, model expects " +
                      std::to_string(spec.features.size()));
    }
    std::vector<double> out;
    out.reserve(expanded_names.size());
    for (std::size_t f = 0; f < spec.features.size(); ++f) {
        Cell cell = record[f];
        if (cell.missing) {
            auto it = std::find_if(fill.begin(), fill.end(), [&](const auto& p) { return p.first == spec.features[f].name; });
            if (it == fill.end()) throw MlError("missing value for feature '" + spec.features[f].name + "'");
            cell = it->second;
        }
        switch (spec.features[f].type) {
            case ColumnType::Numeric: out.push_back(cell.number); break;
            case ColumnType::Timestamp:
                out.push_back(hour_of_day(cell.number));
                out.push_back(day_of_week(cell.number));
                out.push_back(cell.number);
                break;
            case ColumnType::Categorical: {
                const auto& cats = categories[f];
                auto it = std::lower_bound(cats.begin(), cats.end(), cell.text);
                const bool known = it != cats.end() && *it == cell.text;
                if (!known && unknown) ++*unknown;
                for (std::size_t k = 0; k < cats.size(); ++k) {
                    out.push_back(known && static_cast<std::size_t>(it - cats.begin()) == k ? 1.0 : 0.0);
                }
                break;
            }
        }
    }
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = scale(c, out[c]);
    return out;
}

std::vector<double> Preprocessor::transform(const std::vector<std::vector<Cell>>& records, std::size_t* unknown) const {
    const std::size_t w = lag();
    if (records.size() != w) {
        throw MlError("prediction needs " + std::to_string(w) + " record(s), got " + std::to_string(records.size()));
    }
    if (!windowed(spec)) return expand(records[0], unknown);
    std::vector<std::vector<double>> rows;
    for (const auto& r : records) rows.push_back(expand(r, unknown));
    std::vector<double> out;
    out.reserve(expanded_names.size() * w);
    for (std::size_t j = 0; j < expanded_names.size(); ++j) {
        for (std::size_t k = w; k >= 1; --k) out.push_back(rows[w - k][j]);
    }
    return out;
}

PreparedData preprocess(const Dataset& input, const PipelineSpec& spec) {
    PreparedData out;
    Preprocessor& p = out.prep;
    p.spec = spec;
    if (spec.features.empty()) throw DatasetError("no features declared");

    auto locate = [&](const FeatureSpec& f) {
        auto c = input.column_index(f.name);
        if (!c) throw DatasetError("dataset has no column '" + f.name + "'");
        if (input.columns[*c].type != f.type) {
            throw DatasetError("column '" + f.name + "' is " + std::string(to_string(input.columns[*c].type)) +
                               ", expected " + std::string(to_string(f.type)));
        }
        return *c;
    };
    std::vector<std::size_t> fcol, lcol;
    for (const auto& f : spec.features) fcol.push_back(locate(f));
    for (const auto& l : spec.labels) lcol.push_back(locate(l));

    Dataset ds;
    ds.columns = input.columns;
    if (spec.missing == MissingPolicy::Drop) {
        for (const auto& r : input.rows) {
            bool keep = true;
            for (auto c : fcol) keep = keep && !r[c].missing;
            for (auto c : lcol) keep = keep && !r[c].missing;
            if (keep) ds.rows.push_back(r);
        }
    } else {
        ds.rows = input.rows;
        std::set<std::size_t> used(fcol.begin(), fcol.end());
        used.insert(lcol.begin(), lcol.end());
        for (auto c : used) {
            const Cell f = column_fill(input, c);
            p.fill.emplace_back(input.columns[c].name, f);
            for (auto& r : ds.rows) {
                if (r[c].missing) r[c] = f;
            }
        }
    }
    if (ds.rows.empty()) throw DatasetError("dataset is empty after applying the missing-value policy");
    const std::size_t n = ds.rows.size();

    p.categories.resize(spec.features.size());
    for (std::size_t f = 0; f < spec.features.size(); ++f) {
        const FeatureSpec& fs = spec.features[f];
        if (fs.type == ColumnType::Categorical) {
            std::set<std::string> cats;
            for (const auto& r : ds.rows) cats.insert(r[fcol[f]].text);
            p.categories[f].assign(cats.begin(), cats.end());
        }
        switch (fs.type) {
            case ColumnType::Numeric: p.expanded_names.push_back(fs.name); break;
            case ColumnType::Timestamp:
                p.expanded_names.push_back(fs.name + ".hour");
                p.expanded_names.push_back(fs.name + ".dow");
                p.expanded_names.push_back(fs.name + ".epoch");
                break;
            case ColumnType::Categorical:
                for (const auto& c : p.categories[f]) p.expanded_names.push_back(fs.name + "=" + c);
                break;
        }
    }
    if (spec.task == Task::Classification) {
        for (auto c : lcol) {
            std::set<std::string> classes;
            for (const auto& r : ds.rows) classes.insert(r[c].text);
            p.classes.emplace_back(classes.begin(), classes.end());
        }
    }

    // Unscaled expansion, then fit the scaler column by column.
    const std::size_t d0 = p.expanded_names.size();
    p.scaler.assign(d0, ScalerEntry{});
    Matrix base(n, d0);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Cell> rec;
        for (auto c : fcol) rec.push_back(ds.rows[i][c]);
        auto v = p.expand(rec);
        std::copy(v.begin(), v.end(), base.row(i));
    }
    std::size_t col = 0;
    for (std::size_t f = 0; f < spec.features.size(); ++f) {
        const std::size_t width = expanded_width(spec.features[f], p.categories[f]);
        if (spec.features[f].type != ColumnType::Categorical && spec.scaling != Scaling::None) {
            for (std::size_t j = col; j < col + width; ++j) {
                ScalerEntry e{spec.scaling, 0, 0};
                if (spec.scaling == Scaling::MinMax) {
                    e.p1 = e.p2 = base(0, j);
                    for (std::size_t i = 0; i < n; ++i) {
                        e.p1 = std::min(e.p1, base(i, j));
                        e.p2 = std::max(e.p2, base(i, j));
                    }
                } else {
                    double sum = 0;
                    for (std::size_t i = 0; i < n; ++i) sum += base(i, j);
                    e.p1 = sum / static_cast<double>(n);
                    double ss = 0;
                    for (std::size_t i = 0; i < n; ++i) ss += (base(i, j) - e.p1) * (base(i, j) - e.p1);
                    e.p2 = std::sqrt(ss / static_cast<double>(n));
                }
                p.scaler[j] = e;
                for (std::size_t i = 0; i < n; ++i) base(i, j) = p.scale(j, base(i, j));
            }
        }
        col += width;
    }

    const std::size_t L = spec.labels.size();
    Matrix labels(n, L);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t l = 0; l < L; ++l) {
            const Cell& c = ds.rows[i][lcol[l]];
            if (spec.task == Task::Classification) {
                const auto& cls = p.classes[l];
                labels(i, l) = static_cast<double>(std::lower_bound(cls.begin(), cls.end(), c.text) - cls.begin());
            } else {
                labels(i, l) = c.number;
            }
        }
    }

    if (!windowed(spec)) {
        out.x = std::move(base);
        out.y = std::move(labels);
        return out;
    }
    const std::size_t w = p.lag(), h = p.horizon();
    const std::size_t rows = window_count(n, w, h);
    if (rows == 0) {
        throw DatasetError("series of " + std::to_string(n) + " rows is too short for window " + std::to_string(w) +
                           " horizon " + std::to_string(h));
    }
    out.x = Matrix(rows, d0 * w);
    out.y = Matrix(rows, L * h);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = r + w;
        std::size_t c = 0;
        for (std::size_t j = 0; j < d0; ++j) {
            for (std::size_t k = w; k >= 1; --k) out.x(r, c++) = base(t - k, j);
        }
        c = 0;
        for (std::size_t l = 0; l < L; ++l) {
            for (std::size_t s = 0; s < h; ++s) out.y(r, c++) = labels(t + s, l);
        }
    }
    return out;
}

}  // namespace stf
