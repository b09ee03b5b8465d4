#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stf {

enum class ColumnType { Numeric, Categorical, Timestamp };

std::string_view to_string(ColumnType t);
std::optional<ColumnType> parse_column_type(std::string_view s);

/// One CSV cell. Numeric and timestamp cells use `number` (epoch seconds for
/// timestamps); categorical cells use `text`.
struct Cell {
    bool missing = true;
    double number = 0.0;
    std::string text;

    static Cell of_number(double v) { return Cell{false, v, {}}; }
    static Cell of_text(std::string s) { return Cell{false, 0.0, std::move(s)}; }
    static Cell none() { return Cell{}; }

    friend bool operator==(const Cell&, const Cell&) = default;
};

struct ColumnInfo {
    std::string name;
    ColumnType type = ColumnType::Numeric;
    friend bool operator==(const ColumnInfo&, const ColumnInfo&) = default;
};

using Schema = std::map<std::string, ColumnType>;

struct Dataset {
    std::vector<ColumnInfo> columns;
    std::vector<std::vector<Cell>> rows;

    std::optional<std::size_t> column_index(std::string_view name) const;
    std::size_t size() const { return rows.size(); }
};

/// Parses CSV text (header mandatory, `,` separator, RFC 4180 quoting, empty
/// cell = missing). Columns named in `declared` use that type; the rest are
/// inferred: all numbers -> Numeric, all RFC 3339 -> Timestamp, else Categorical.
/// Throws DatasetError on ragged rows or cells that do not parse as declared.
Dataset parse_csv(std::string_view text, const Schema& declared = {}, const std::string& source = "<csv>");

/// Reads `path`. A sidecar `path + ".schema"` (lines `name:type`) adds declared
/// types underneath `declared`.
Dataset load_dataset(const std::string& path, const Schema& declared = {});

Schema parse_schema_sidecar(std::string_view text, const std::string& source = "<schema>");

/// Text of a cell as written to CSV (timestamps in RFC 3339).
std::string cell_text(const Cell& c, ColumnType t);

std::string to_csv(const Dataset& ds);
std::string csv_row(const std::vector<std::string>& fields);

}  // namespace stf
