#pragma once

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bi3/loading.hpp"

namespace bi3 {

struct CsvOptions {
    bool header = true;
    // Label column selection: by name (needs a header), by 0-based index,
    // or — when neither is given — the last column.
    std::optional<std::string> label_column;
    std::optional<std::size_t> label_index;
};

namespace detail {

struct CsvRecord {
    std::vector<std::string> fields;
    std::size_t line = 0;  // 1-based line the record starts on
};

// RFC-4180 tokenizer: quoted fields may contain commas, doubled quotes and
// newlines.  Unquoted fields are trimmed; fully blank lines are skipped.
inline std::vector<CsvRecord> read_csv_records(std::istream& in) {
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::vector<CsvRecord> records;
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;       // current field was quoted
    bool in_quotes = false;    // currently inside the quoted section
    bool blank_line = true;    // nothing but an empty unquoted field so far
    std::size_t line = 1, record_line = 1;

    auto end_field = [&]() {
        fields.push_back(quoted ? field : std::string(trim(field)));
        field.clear();
        quoted = false;
    };
    auto end_record = [&]() {
        end_field();
        if (!(fields.size() == 1 && fields[0].empty() && blank_line)) {
            records.push_back(CsvRecord{std::move(fields), record_line});
        }
        fields = {};
        blank_line = true;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && field.empty() && !quoted) {
            quoted = true;
            in_quotes = true;
            blank_line = false;
        } else if (c == '"' && quoted) {
            throw ParseError("unexpected character after closing quote", line);
        } else if (c == ',') {
            end_field();
            blank_line = false;
        } else if (c == '\n') {
            end_record();
            ++line;
            record_line = line;
        } else if (c == '\r') {
            // swallowed; handled by the following '\n' (or end of input)
        } else {
            if (quoted && !std::isspace(static_cast<unsigned char>(c))) {
                throw ParseError("unexpected character after closing quote", line);
            }
            if (!quoted) field.push_back(c);
            blank_line = false;
        }
    }
    if (in_quotes) throw ParseError("unterminated quoted field", record_line);
    if (!field.empty() || !fields.empty() || quoted) end_record();
    return records;
}

}  // namespace detail

// Parses CSV text into a canonical Dataset.  Column kinds are inferred: a
// column is numeric when every retained cell parses as a number, otherwise
// nominal.  Rows with missing cells (empty or "?") are dropped and counted.
inline LoadedDataset parse_csv(std::istream& in, const CsvOptions& options = {}) {
    auto records = detail::read_csv_records(in);
    if (records.empty()) throw ParseError("empty input");

    std::vector<std::string> names;
    std::size_t first_data = 0;
    const std::size_t width = records[0].fields.size();
    if (options.header) {
        names = records[0].fields;
        first_data = 1;
    } else {
        for (std::size_t c = 0; c < width; ++c) names.push_back("col" + std::to_string(c));
    }
    for (std::size_t r = first_data; r < records.size(); ++r) {
        if (records[r].fields.size() != width) {
            throw ParseError("expected " + std::to_string(width) + " fields, got " +
                             std::to_string(records[r].fields.size()), records[r].line);
        }
    }

    std::size_t label_col;
    if (options.label_column) {
        if (!options.header) throw ParseError("label column by name requires a header row");
        const auto it = std::find(names.begin(), names.end(), *options.label_column);
        if (it == names.end()) {
            throw ParseError("label column '" + *options.label_column + "' not found in header");
        }
        label_col = static_cast<std::size_t>(it - names.begin());
    } else if (options.label_index) {
        if (*options.label_index >= width) {
            throw ParseError("label column index " + std::to_string(*options.label_index) +
                             " out of range for " + std::to_string(width) + " columns");
        }
        label_col = *options.label_index;
    } else {
        if (width == 0) throw ParseError("empty records");
        label_col = width - 1;
    }
    if (width < 2) throw ParseError("need at least one feature column besides the label");

    // Retain complete rows only.
    std::vector<const detail::CsvRecord*> kept;
    std::size_t rows_read = 0, rows_dropped = 0;
    for (std::size_t r = first_data; r < records.size(); ++r) {
        ++rows_read;
        bool missing = false;
        for (const std::string& cell : records[r].fields) {
            if (detail::is_missing(cell)) {
                missing = true;
                break;
            }
        }
        if (missing) {
            ++rows_dropped;
        } else {
            kept.push_back(&records[r]);
        }
    }

    // Infer column kinds over retained rows.
    std::vector<Column> columns;
    std::vector<std::size_t> feature_cols;
    for (std::size_t c = 0; c < width; ++c) {
        if (c == label_col) continue;
        feature_cols.push_back(c);
        bool numeric = true;
        for (const auto* record : kept) {
            double v;
            if (!detail::parse_double(record->fields[c], v)) {
                numeric = false;
                break;
            }
        }
        columns.push_back(Column{names[c], numeric ? ColumnKind::numeric : ColumnKind::nominal, {}});
    }

    std::vector<double> values;
    std::vector<std::string> label_tokens;
    values.reserve(kept.size() * feature_cols.size());
    for (const auto* record : kept) {
        for (std::size_t f = 0; f < feature_cols.size(); ++f) {
            const std::string& cell = record->fields[feature_cols[f]];
            if (columns[f].kind == ColumnKind::numeric) {
                double v = 0.0;
                detail::parse_double(cell, v);
                values.push_back(v);
            } else {
                auto& cats = columns[f].categories;
                auto it = std::find(cats.begin(), cats.end(), cell);
                if (it == cats.end()) {
                    cats.push_back(cell);
                    it = cats.end() - 1;
                }
                values.push_back(static_cast<double>(it - cats.begin()));
            }
        }
        label_tokens.push_back(record->fields[label_col]);
    }

    return detail::finalize_loaded(FeatureSchema{std::move(columns)}, std::move(values),
                                   label_tokens, rows_read, rows_dropped);
}

inline LoadedDataset parse_csv(const std::string& text, const CsvOptions& options = {}) {
    std::istringstream in(text);
    return parse_csv(in, options);
}

inline LoadedDataset parse_csv_file(const std::filesystem::path& path, const CsvOptions& options = {}) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    try {
        return parse_csv(in, options);
    } catch (ParseError& e) {
        throw ParseError(path.filename().string() + ": " + e.what());
    }
}

// Shortest decimal text that parses back to exactly the same double.
inline std::string format_double(double v) {
    char buffer[32];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), v);
    return std::string(buffer, result.ptr);
}

namespace detail {

inline std::string csv_quote(const std::string& field) {
    const bool needs_quotes =
        field.find_first_of(",\"\n\r") != std::string::npos ||
        (!field.empty() && (std::isspace(static_cast<unsigned char>(field.front())) ||
                            std::isspace(static_cast<unsigned char>(field.back()))));
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

}  // namespace detail

// Serializes a dataset to CSV: feature columns in order, label column last.
// Numeric cells use shortest round-trip formatting, so parse_csv(to_csv(d))
// reproduces d exactly.
inline std::string to_csv(const Dataset& dataset, const std::string& label_header = "class") {
    std::string label_name = label_header;
    auto collides = [&](const std::string& name) {
        for (const Column& c : dataset.schema().columns()) {
            if (c.name == name) return true;
        }
        return false;
    };
    while (collides(label_name)) label_name += "_label";

    std::string out;
    for (const Column& c : dataset.schema().columns()) {
        out += detail::csv_quote(c.name);
        out += ',';
    }
    out += detail::csv_quote(label_name);
    out += '\n';
    for (std::size_t r = 0; r < dataset.rows(); ++r) {
        for (std::size_t c = 0; c < dataset.cols(); ++c) {
            if (dataset.schema().is_nominal(c)) {
                out += detail::csv_quote(dataset.category_at(r, c));
            } else {
                out += format_double(dataset.value(r, c));
            }
            out += ',';
        }
        out += detail::csv_quote(dataset.label(r) == 1 ? dataset.positive_name()
                                                       : dataset.negative_name());
        out += '\n';
    }
    return out;
}

}  // namespace bi3
