#pragma once

#include <charconv>
#include <cstddef>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "bi3/dataset.hpp"
#include "bi3/error.hpp"

namespace bi3 {

struct LoadReport {
    std::size_t rows_read = 0;             // data rows encountered in the source
    std::size_t rows_dropped_missing = 0;  // rows discarded because of missing values
    ClassStats stats;                      // class sizes after canonicalization
};

struct LoadedDataset {
    Dataset dataset;  // canonical: +1 is the minority class
    ClassStats stats;
    LoadReport report;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const char* ws = " \t\r\n";
    const auto begin = s.find_first_not_of(ws);
    if (begin == std::string_view::npos) return {};
    const auto end = s.find_last_not_of(ws);
    return s.substr(begin, end - begin + 1);
}

// Full-token floating point parse ("1.5e3", "-0.25", "+7", ...).
inline bool parse_double(std::string_view token, double& out) {
    token = trim(token);
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    if (token.empty()) return false;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    const auto result = std::from_chars(first, last, out);
    return result.ec == std::errc() && result.ptr == last;
}

inline bool is_missing(std::string_view token) {
    const std::string_view t = trim(token);
    return t.empty() || t == "?";
}

// Shared tail of both parsers: turn decoded feature rows plus raw label
// tokens into a canonical LoadedDataset.
inline LoadedDataset finalize_loaded(FeatureSchema schema, std::vector<double> values,
                                     const std::vector<std::string>& label_tokens,
                                     std::size_t rows_read, std::size_t rows_dropped) {
    if (label_tokens.size() < 2) {
        throw ParseError("fewer than two usable data rows (" +
                         std::to_string(label_tokens.size()) + " found)");
    }
    std::vector<std::string> distinct;
    for (const std::string& token : label_tokens) {
        bool known = false;
        for (const std::string& d : distinct) {
            if (d == token) {
                known = true;
                break;
            }
        }
        if (!known) distinct.push_back(token);
        if (distinct.size() > 2) break;
    }
    if (distinct.size() != 2) {
        throw ParseError("expected exactly two classes, found " + std::to_string(distinct.size()));
    }
    std::vector<int> labels;
    labels.reserve(label_tokens.size());
    for (const std::string& token : label_tokens) {
        labels.push_back(token == distinct[0] ? 1 : -1);
    }
    Dataset raw(std::move(schema), std::move(values), std::move(labels), distinct[0], distinct[1]);
    auto [dataset, stats] = canonicalize(raw);
    LoadReport report{rows_read, rows_dropped, stats};
    return LoadedDataset{std::move(dataset), stats, report};
}

}  // namespace detail
}  // namespace bi3
