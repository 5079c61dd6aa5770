#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bi3/error.hpp"

namespace bi3 {

enum class ColumnKind { numeric, nominal };

struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::numeric;
    // Category strings in schema order; nominal cells store an index into
    // this list (as a double).  Empty for numeric columns.
    std::vector<std::string> categories;
};

class FeatureSchema {
public:
    FeatureSchema() = default;
    explicit FeatureSchema(std::vector<Column> columns) : columns_(std::move(columns)) {}

    std::size_t column_count() const { return columns_.size(); }
    const Column& column(std::size_t i) const { return columns_.at(i); }
    const std::vector<Column>& columns() const { return columns_; }

    bool is_nominal(std::size_t i) const { return columns_.at(i).kind == ColumnKind::nominal; }

private:
    std::vector<Column> columns_;
};

struct ClassStats {
    std::size_t n_pos = 0;  // minority (+1) size after canonicalization
    std::size_t n_neg = 0;  // majority (-1) size
    double imbalance_ratio = 0.0;  // n_neg / n_pos
};

// Immutable binary-labelled feature matrix.  Labels are +1 / -1; class_name(+1)
// and class_name(-1) remember what the labels were called in the source data.
class Dataset {
public:
    Dataset() = default;

    Dataset(FeatureSchema schema, std::vector<double> values, std::vector<int> labels,
            std::string positive_name, std::string negative_name)
        : schema_(std::move(schema)),
          values_(std::move(values)),
          labels_(std::move(labels)),
          positive_name_(std::move(positive_name)),
          negative_name_(std::move(negative_name)) {
        const std::size_t cols = schema_.column_count();
        if (cols == 0) throw PreconditionError("Dataset: schema has no columns");
        if (labels_.size() < 2) throw PreconditionError("Dataset: needs at least 2 rows");
        if (values_.size() != labels_.size() * cols) {
            throw PreconditionError("Dataset: value buffer does not match rows x columns");
        }
        rows_ = labels_.size();
        std::size_t pos = 0, neg = 0;
        for (int label : labels_) {
            if (label == 1) {
                ++pos;
            } else if (label == -1) {
                ++neg;
            } else {
                throw PreconditionError("Dataset: labels must be +1 or -1");
            }
        }
        if (pos == 0 || neg == 0) throw PreconditionError("Dataset: both classes must be present");
        for (std::size_t c = 0; c < cols; ++c) {
            if (!schema_.is_nominal(c)) continue;
            const double limit = static_cast<double>(schema_.column(c).categories.size());
            for (std::size_t r = 0; r < rows_; ++r) {
                const double v = value(r, c);
                if (v < 0.0 || v >= limit || v != std::floor(v)) {
                    throw PreconditionError("Dataset: nominal cell out of category range in column '" +
                                            schema_.column(c).name + "'");
                }
            }
        }
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return schema_.column_count(); }
    const FeatureSchema& schema() const { return schema_; }

    double value(std::size_t row, std::size_t col) const { return values_[row * cols() + col]; }
    std::span<const double> row(std::size_t r) const {
        return std::span<const double>(values_.data() + r * cols(), cols());
    }
    const std::vector<double>& values() const { return values_; }

    int label(std::size_t row) const { return labels_[row]; }
    const std::vector<int>& labels() const { return labels_; }

    const std::string& positive_name() const { return positive_name_; }
    const std::string& negative_name() const { return negative_name_; }

    ClassStats class_stats() const {
        ClassStats s;
        for (int label : labels_) (label == 1 ? s.n_pos : s.n_neg)++;
        s.imbalance_ratio = static_cast<double>(s.n_neg) / static_cast<double>(s.n_pos);
        return s;
    }

    std::vector<std::size_t> indices_of(int label) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < rows_; ++i) {
            if (labels_[i] == label) out.push_back(i);
        }
        return out;
    }

    // The decoded category string of a nominal cell.
    const std::string& category_at(std::size_t row, std::size_t col) const {
        return schema_.column(col).categories.at(static_cast<std::size_t>(value(row, col)));
    }

private:
    FeatureSchema schema_;
    std::vector<double> values_;
    std::vector<int> labels_;
    std::string positive_name_;
    std::string negative_name_;
    std::size_t rows_ = 0;
};

// Content equality up to representation: column names/kinds, decoded cell
// values, labels and class names must match; nominal category *order* may
// differ between the two schemas.
inline bool semantically_equal(const Dataset& a, const Dataset& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    if (a.positive_name() != b.positive_name() || a.negative_name() != b.negative_name()) return false;
    for (std::size_t c = 0; c < a.cols(); ++c) {
        const Column& ca = a.schema().column(c);
        const Column& cb = b.schema().column(c);
        if (ca.name != cb.name || ca.kind != cb.kind) return false;
    }
    if (a.labels() != b.labels()) return false;
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) {
            if (a.schema().is_nominal(c)) {
                if (a.category_at(r, c) != b.category_at(r, c)) return false;
            } else {
                if (a.value(r, c) != b.value(r, c)) return false;
            }
        }
    }
    return true;
}

// Relabels so that +1 is the minority class.  Ties in class size go to the
// class whose name sorts first lexicographically.  Idempotent.
inline std::pair<Dataset, ClassStats> canonicalize(const Dataset& input) {
    const ClassStats raw = input.class_stats();
    bool swap_labels;
    if (raw.n_pos != raw.n_neg) {
        swap_labels = raw.n_pos > raw.n_neg;
    } else {
        swap_labels = input.negative_name() < input.positive_name();
    }
    if (!swap_labels) {
        return {input, raw};
    }
    std::vector<int> flipped(input.labels());
    for (int& label : flipped) label = -label;
    Dataset out(input.schema(), input.values(), std::move(flipped),
                input.negative_name(), input.positive_name());
    return {out, out.class_stats()};
}

}  // namespace bi3
