#pragma once

#include <algorithm>
#include <cctype>
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
namespace detail {

inline std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline std::vector<std::string> split_commas(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = s.find(',', start);
        if (comma == std::string_view::npos) {
            out.emplace_back(trim(s.substr(start)));
            break;
        }
        out.emplace_back(trim(s.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

struct KeelAttribute {
    std::string name;
    ColumnKind kind = ColumnKind::numeric;
    std::vector<std::string> categories;
};

// "@attribute Name real [a, b]" / "@attribute Name {v1, v2}" / "integer" / "numeric"
inline KeelAttribute parse_keel_attribute(std::string_view body, std::size_t line) {
    body = trim(body);
    const std::size_t name_end = body.find_first_of(" \t{");
    if (name_end == 0 || body.empty()) throw ParseError("@attribute without a name", line);
    KeelAttribute attr;
    if (name_end == std::string_view::npos) {
        throw ParseError("@attribute '" + std::string(body) + "' has no type", line);
    }
    attr.name = std::string(body.substr(0, name_end));
    std::string_view type = trim(body.substr(name_end));
    if (type.empty()) throw ParseError("@attribute '" + attr.name + "' has no type", line);
    if (type.front() == '{') {
        if (type.back() != '}') throw ParseError("unterminated category list", line);
        attr.kind = ColumnKind::nominal;
        attr.categories = split_commas(type.substr(1, type.size() - 2));
        if (attr.categories.empty() ||
            std::any_of(attr.categories.begin(), attr.categories.end(),
                        [](const std::string& c) { return c.empty(); })) {
            throw ParseError("empty category in attribute '" + attr.name + "'", line);
        }
        return attr;
    }
    std::size_t word_end = 0;
    while (word_end < type.size() && std::isalpha(static_cast<unsigned char>(type[word_end]))) {
        ++word_end;
    }
    const std::string word = lower(type.substr(0, word_end));
    if (word != "real" && word != "integer" && word != "numeric") {
        throw ParseError("unknown attribute type '" + std::string(type) + "'", line);
    }
    attr.kind = ColumnKind::numeric;  // the optional [min, max] range is ignored
    return attr;
}

}  // namespace detail

// Parses the KEEL .dat format: @relation / @attribute / @inputs / @outputs
// headers followed by comma-separated @data rows.  Rows containing "?" are
// dropped and counted.  The label column is @outputs when given, otherwise
// the last declared attribute.  The result is canonical (+1 = minority).
inline LoadedDataset parse_keel(std::istream& in) {
    std::vector<detail::KeelAttribute> attributes;
    std::optional<std::vector<std::string>> input_names;
    std::optional<std::string> output_name;
    bool in_data = false;

    std::vector<std::vector<std::string>> rows;  // raw tokens, one per attribute
    std::vector<bool> row_has_missing;
    std::string line;
    std::size_t line_number = 0;

    while (std::getline(in, line)) {
        ++line_number;
        const std::string_view text = detail::trim(line);
        if (text.empty() || text.front() == '%') continue;
        if (!in_data && text.front() == '@') {
            const std::size_t keyword_end = text.find_first_of(" \t");
            const std::string keyword =
                detail::lower(text.substr(0, keyword_end == std::string_view::npos ? text.size()
                                                                                   : keyword_end));
            const std::string_view body = keyword_end == std::string_view::npos
                                              ? std::string_view{}
                                              : detail::trim(text.substr(keyword_end));
            if (keyword == "@relation") {
                // dataset name: not used
            } else if (keyword == "@attribute") {
                attributes.push_back(detail::parse_keel_attribute(body, line_number));
            } else if (keyword == "@inputs") {
                input_names = detail::split_commas(body);
            } else if (keyword == "@outputs" || keyword == "@output") {
                const auto names = detail::split_commas(body);
                if (names.size() != 1 || names[0].empty()) {
                    throw ParseError("@outputs must name exactly one attribute", line_number);
                }
                output_name = names[0];
            } else if (keyword == "@data") {
                in_data = true;
            } else {
                throw ParseError("unknown header keyword '" + keyword + "'", line_number);
            }
            continue;
        }
        if (!in_data) throw ParseError("data row before @data section", line_number);
        auto tokens = detail::split_commas(text);
        if (tokens.size() != attributes.size()) {
            throw ParseError("expected " + std::to_string(attributes.size()) + " values, got " +
                             std::to_string(tokens.size()), line_number);
        }
        bool missing = false;
        for (const std::string& token : tokens) {
            if (detail::is_missing(token)) {
                missing = true;
                break;
            }
        }
        rows.push_back(std::move(tokens));
        row_has_missing.push_back(missing);
    }

    if (attributes.empty()) throw ParseError("no @attribute declarations found");
    if (!in_data) throw ParseError("missing @data section");

    // Resolve the label column and the feature columns.
    auto find_attribute = [&](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < attributes.size(); ++i) {
            if (attributes[i].name == name) return i;
        }
        throw ParseError("attribute '" + name + "' is not declared");
    };
    const std::size_t label_index =
        output_name ? find_attribute(*output_name) : attributes.size() - 1;
    std::vector<std::size_t> feature_indices;
    if (input_names) {
        for (const std::string& name : *input_names) {
            const std::size_t idx = find_attribute(name);
            if (idx != label_index) feature_indices.push_back(idx);
        }
    } else {
        for (std::size_t i = 0; i < attributes.size(); ++i) {
            if (i != label_index) feature_indices.push_back(i);
        }
    }
    if (feature_indices.empty()) throw ParseError("no input attributes remain");

    std::vector<Column> columns;
    for (const std::size_t idx : feature_indices) {
        columns.push_back(Column{attributes[idx].name, attributes[idx].kind, attributes[idx].categories});
    }
    FeatureSchema schema{std::move(columns)};

    std::vector<double> values;
    std::vector<std::string> label_tokens;
    std::size_t rows_read = 0, rows_dropped = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& tokens = rows[r];
        ++rows_read;
        if (row_has_missing[r]) {
            ++rows_dropped;
            continue;
        }
        for (std::size_t f = 0; f < feature_indices.size(); ++f) {
            const std::size_t idx = feature_indices[f];
            const std::string& token = tokens[idx];
            const detail::KeelAttribute& attr = attributes[idx];
            if (attr.kind == ColumnKind::numeric) {
                double v = 0.0;
                if (!detail::parse_double(token, v)) {
                    throw ParseError("cannot parse '" + token + "' as a number in attribute '" +
                                     attr.name + "'");
                }
                values.push_back(v);
            } else {
                const auto it = std::find(attr.categories.begin(), attr.categories.end(), token);
                if (it == attr.categories.end()) {
                    throw ParseError("value '" + token + "' is not a declared category of attribute '" +
                                     attr.name + "'");
                }
                values.push_back(static_cast<double>(it - attr.categories.begin()));
            }
        }
        label_tokens.push_back(tokens[label_index]);
    }

    return detail::finalize_loaded(std::move(schema), std::move(values), label_tokens, rows_read,
                                   rows_dropped);
}

inline LoadedDataset parse_keel(const std::string& text) {
    std::istringstream in(text);
    return parse_keel(in);
}

inline LoadedDataset parse_keel_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    try {
        return parse_keel(in);
    } catch (ParseError& e) {
        throw ParseError(path.filename().string() + ": " + e.what());
    }
}

}  // namespace bi3
