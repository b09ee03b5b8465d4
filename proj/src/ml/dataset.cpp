#include "stf/ml/dataset.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <set>

#include "stf/model/error.hpp"
#include "stf/model/value.hpp"
#include "stf/syntax/parser.hpp"

namespace stf {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::optional<double> parse_number(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

struct RawRow {
    std::vector<std::string> fields;
    std::vector<bool> quoted;
    std::size_t line = 0;
};

std::vector<RawRow> split_csv(std::string_view text, const std::string& source) {
    std::vector<RawRow> rows;
    std::size_t i = 0;
    std::size_t line = 1;
    while (i < text.size()) {
        RawRow row;
        row.line = line;
        std::string field;
        bool quoted = false;
        bool done = false;
        while (!done) {
            if (i >= text.size()) {
                done = true;
            } else if (text[i] == '"' && field.empty() && !quoted) {
                quoted = true;
                ++i;
                while (true) {
                    if (i >= text.size()) throw DatasetError(source + ":" + std::to_string(row.line) + ": unterminated quote");
                    if (text[i] == '"') {
                        if (i + 1 < text.size() && text[i + 1] == '"') {
                            field += '"';
                            i += 2;
                            continue;
                        }
                        ++i;
                        break;
                    }
                    if (text[i] == '\n') ++line;
                    field += text[i++];
                }
                continue;
            } else if (text[i] == ',') {
                ++i;
            } else if (text[i] == '\n' || text[i] == '\r') {
                if (text[i] == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
                ++i;
                ++line;
                done = true;
            } else {
                field += text[i++];
                continue;
            }
            row.fields.push_back(quoted ? field : std::string(trim(field)));
            row.quoted.push_back(quoted);
            field.clear();
            quoted = false;
        }
        const bool blank = row.fields.size() == 1 && row.fields[0].empty() && !row.quoted[0];
        if (!blank) rows.push_back(std::move(row));
    }
    return rows;
}

ColumnType infer(const std::vector<RawRow>& rows, std::size_t c) {
    bool numeric = true;
    bool timestamp = true;
    bool any = false;
    for (const auto& r : rows) {
        const std::string& f = r.fields[c];
        if (f.empty() && !r.quoted[c]) continue;
        any = true;
        if (numeric && !parse_number(f)) numeric = false;
        if (timestamp && !parse_rfc3339(f)) timestamp = false;
        if (!numeric && !timestamp) break;
    }
    if (!any || numeric) return ColumnType::Numeric;
    return timestamp ? ColumnType::Timestamp : ColumnType::Categorical;
}

std::string format_number(double v) {
    if (std::nearbyint(v) == v && std::fabs(v) < 1e15) return std::to_string(static_cast<long long>(v));
    return format_double(v);
}

}  // namespace

std::string_view to_string(ColumnType t) {
    switch (t) {
        case ColumnType::Numeric: return "numeric";
        case ColumnType::Categorical: return "categorical";
        case ColumnType::Timestamp: return "timestamp";
    }
    return "?";
}

std::optional<ColumnType> parse_column_type(std::string_view s) {
    if (s == "numeric") return ColumnType::Numeric;
    if (s == "categorical") return ColumnType::Categorical;
    if (s == "timestamp") return ColumnType::Timestamp;
    return std::nullopt;
}

std::optional<std::size_t> Dataset::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].name == name) return i;
    }
    return std::nullopt;
}

Dataset parse_csv(std::string_view text, const Schema& declared, const std::string& source) {
    std::vector<RawRow> raw = split_csv(text, source);
    if (raw.empty()) throw DatasetError(source + ": missing header row");
    Dataset ds;
    std::set<std::string> seen;
    for (const auto& name : raw[0].fields) {
        if (name.empty()) throw DatasetError(source + ": empty column name in header");
        if (!seen.insert(name).second) throw DatasetError(source + ": duplicate column '" + name + "'");
        ds.columns.push_back({name, ColumnType::Numeric});
    }
    raw.erase(raw.begin());
    const std::size_t width = ds.columns.size();
    for (const auto& r : raw) {
        if (r.fields.size() != width) {
            throw DatasetError(source + ":" + std::to_string(r.line) + ": expected " + std::to_string(width) +
                               " fields, found " + std::to_string(r.fields.size()));
        }
    }
    for (std::size_t c = 0; c < width; ++c) {
        auto it = declared.find(ds.columns[c].name);
        ds.columns[c].type = it != declared.end() ? it->second : infer(raw, c);
    }
    ds.rows.reserve(raw.size());
    for (const auto& r : raw) {
        std::vector<Cell> row(width);
        for (std::size_t c = 0; c < width; ++c) {
            const std::string& f = r.fields[c];
            if (f.empty() && !r.quoted[c]) continue;
            const ColumnType t = ds.columns[c].type;
            auto bad = [&](const char* what) {
                return DatasetError(source + ":" + std::to_string(r.line) + ": column '" + ds.columns[c].name +
                                    "': cannot parse '" + f + "' as " + what);
            };
            if (t == ColumnType::Numeric) {
                auto v = parse_number(f);
                if (!v) throw bad("numeric");
                row[c] = Cell::of_number(*v);
            } else if (t == ColumnType::Timestamp) {
                auto v = parse_rfc3339(f);
                if (!v) throw bad("timestamp");
                row[c] = Cell::of_number(static_cast<double>(*v));
            } else {
                row[c] = Cell::of_text(f);
            }
        }
        ds.rows.push_back(std::move(row));
    }
    return ds;
}

Schema parse_schema_sidecar(std::string_view text, const std::string& source) {
    Schema out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const std::size_t nl = text.find('\n');
        std::string_view line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const std::size_t colon = line.find(':');
        if (colon == std::string_view::npos) {
            throw DatasetError(source + ":" + std::to_string(line_no) + ": expected 'name:type'");
        }
        const std::string name(trim(line.substr(0, colon)));
        auto type = parse_column_type(trim(line.substr(colon + 1)));
        if (name.empty() || !type) {
            throw DatasetError(source + ":" + std::to_string(line_no) + ": expected 'name:type' with type numeric, "
                               "categorical or timestamp");
        }
        out[name] = *type;
    }
    return out;
}

Dataset load_dataset(const std::string& path, const Schema& declared) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const Error& e) {
        throw DatasetError(e.what());
    }
    Schema schema = declared;
    const std::string sidecar = path + ".schema";
    if (std::filesystem::exists(sidecar)) {
        for (const auto& [k, v] : parse_schema_sidecar(read_file(sidecar), sidecar)) schema.emplace(k, v);
    }
    return parse_csv(text, schema, path);
}

std::string cell_text(const Cell& c, ColumnType t) {
    if (c.missing) return {};
    switch (t) {
        case ColumnType::Numeric: return format_number(c.number);
        case ColumnType::Timestamp: return format_rfc3339(static_cast<std::int64_t>(c.number));
        case ColumnType::Categorical: return c.text;
    }
    return {};
}

std::string csv_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        const std::string& f = fields[i];
        if (f.find_first_of(",\"\n\r") != std::string::npos || (!f.empty() && (f.front() == ' ' || f.back() == ' '))) {
            out += '"';
            for (char ch : f) {
                if (ch == '"') out += '"';
                out += ch;
            }
            out += '"';
        } else {
            out += f;
        }
    }
    return out + "\n";
}

std::string to_csv(const Dataset& ds) {
    std::vector<std::string> header;
    for (const auto& c : ds.columns) header.push_back(c.name);
    std::string out = csv_row(header);
    for (const auto& r : ds.rows) {
        std::vector<std::string> f;
        for (std::size_t c = 0; c < ds.columns.size(); ++c) f.push_back(cell_text(r[c], ds.columns[c].type));
        out += csv_row(f);
    }
    return out;
}

}  // namespace stf
