#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bi3/dataset.hpp"
#include "bi3/error.hpp"
#include "bi3/neighbors.hpp"
#include "bi3/rng.hpp"

namespace bi3 {

enum class RecoveryMethod { none, oversample, undersample, smote, sample_weight };

inline std::string recovery_name(RecoveryMethod method) {
    switch (method) {
        case RecoveryMethod::none: return "none";
        case RecoveryMethod::oversample: return "os";
        case RecoveryMethod::undersample: return "us";
        case RecoveryMethod::smote: return "smote";
        case RecoveryMethod::sample_weight: return "sw";
    }
    return "?";
}

inline RecoveryMethod recovery_from_name(const std::string& name) {
    if (name == "none") return RecoveryMethod::none;
    if (name == "os") return RecoveryMethod::oversample;
    if (name == "us") return RecoveryMethod::undersample;
    if (name == "smote") return RecoveryMethod::smote;
    if (name == "sw") return RecoveryMethod::sample_weight;
    throw PreconditionError("unknown recovery method '" + name + "' (expected none|os|us|smote|sw)");
}

enum class Provenance : std::uint8_t { original, duplicated, synthetic };

// A (possibly resampled) training split.  Rows remember where they came
// from: `source_rows` holds the original dataset row for original and
// duplicated rows, and npos for synthetic ones.
struct TrainSet {
    static constexpr std::size_t no_source = static_cast<std::size_t>(-1);

    std::size_t cols = 0;
    std::vector<double> values;  // rows x cols, row-major
    std::vector<int> labels;
    std::vector<double> weights;
    std::vector<Provenance> provenance;
    std::vector<std::size_t> source_rows;

    std::size_t rows() const { return labels.size(); }

    std::span<const double> row(std::size_t r) const {
        return std::span<const double>(values.data() + r * cols, cols);
    }

    std::size_t count(int label) const {
        return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
    }

    std::vector<std::size_t> indices_of(int label) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == label) out.push_back(i);
        }
        return out;
    }

    // New TrainSet holding only the given rows, in the given order.
    TrainSet subset(std::span<const std::size_t> keep) const {
        TrainSet out;
        out.cols = cols;
        for (const std::size_t r : keep) {
            out.append_row(row(r), labels[r], weights[r], provenance[r], source_rows[r]);
        }
        return out;
    }

    void append_row(std::span<const double> x, int label, double weight, Provenance origin,
                    std::size_t source) {
        values.insert(values.end(), x.begin(), x.end());
        labels.push_back(label);
        weights.push_back(weight);
        provenance.push_back(origin);
        source_rows.push_back(source);
    }

    static TrainSet from_rows(const Dataset& dataset, std::span<const std::size_t> rows) {
        TrainSet out;
        out.cols = dataset.cols();
        out.values.reserve(rows.size() * out.cols);
        for (const std::size_t r : rows) {
            out.append_row(dataset.row(r), dataset.label(r), 1.0, Provenance::original, r);
        }
        return out;
    }
};

namespace detail {

inline void require_both_classes(const TrainSet& train, const char* op) {
    if (train.count(1) == 0 || train.count(-1) == 0) {
        throw PreconditionError(std::string(op) + ": both classes must be present");
    }
}

}  // namespace detail

// Duplicates uniformly drawn minority rows (with replacement) until the
// classes are balanced.
inline TrainSet oversample(const TrainSet& train, Rng& rng) {
    detail::require_both_classes(train, "oversample");
    TrainSet out = train;
    const std::vector<std::size_t> minority = train.indices_of(1);
    const std::size_t deficit = train.count(-1) - std::min(train.count(-1), minority.size());
    for (std::size_t i = 0; i < deficit; ++i) {
        const std::size_t pick = minority[rng.below(minority.size())];
        out.append_row(train.row(pick), 1, train.weights[pick], Provenance::duplicated,
                       train.source_rows[pick]);
    }
    return out;
}

// Keeps every minority row and a uniform without-replacement subset of the
// majority of equal size; original row order is preserved.
inline TrainSet undersample(const TrainSet& train, Rng& rng) {
    detail::require_both_classes(train, "undersample");
    const std::vector<std::size_t> majority = train.indices_of(-1);
    const std::size_t keep_count = std::min(train.count(1), majority.size());
    const std::vector<std::size_t> chosen =
        sample_without_replacement(majority, keep_count, rng);
    std::vector<std::uint8_t> keep(train.rows(), 0);
    for (std::size_t i = 0; i < train.rows(); ++i) keep[i] = train.labels[i] == 1 ? 1 : 0;
    for (const std::size_t i : chosen) keep[i] = 1;
    TrainSet out;
    out.cols = train.cols;
    for (std::size_t i = 0; i < train.rows(); ++i) {
        if (keep[i]) {
            out.append_row(train.row(i), train.labels[i], train.weights[i], train.provenance[i],
                           train.source_rows[i]);
        }
    }
    return out;
}

// Synthetic minority interpolation: each new row is x + delta * (z - x) on
// numeric columns for a uniformly drawn minority seed x, one of its
// k_smote nearest minority neighbors z, and delta ~ U[0, 1); nominal columns
// copy the seed's value.  Appends n_neg - n_pos rows.
inline TrainSet smote(const TrainSet& train, const FeatureSchema& schema, MetricConfig metric,
                      std::size_t k_smote, Rng& rng) {
    detail::require_both_classes(train, "smote");
    if (schema.column_count() != train.cols) {
        throw PreconditionError("smote: schema does not match the training set");
    }
    const std::vector<std::size_t> minority = train.indices_of(1);
    if (minority.size() < 2) {
        throw PreconditionError("smote: needs at least two minority samples");
    }
    bool any_numeric = false;
    for (std::size_t c = 0; c < schema.column_count(); ++c) {
        if (!schema.is_nominal(c)) any_numeric = true;
    }
    if (!any_numeric) {
        throw PreconditionError("smote: needs at least one numeric column to interpolate");
    }
    if (k_smote < 1) throw PreconditionError("smote: k_smote must be positive");

    const std::size_t needed =
        train.count(-1) - std::min(train.count(-1), minority.size());
    TrainSet out = train;
    if (needed == 0) return out;

    // Nearest minority neighbors of each minority row (ties by ascending
    // train-row index, self excluded).
    const DistanceModel model(schema, train.values, train.rows(), metric);
    const std::size_t list_len = std::min(k_smote, minority.size() - 1);
    std::vector<std::vector<std::size_t>> neighbor_lists(minority.size());
    for (std::size_t i = 0; i < minority.size(); ++i) {
        std::vector<std::pair<double, std::size_t>> cands;
        cands.reserve(minority.size() - 1);
        for (std::size_t j = 0; j < minority.size(); ++j) {
            if (j == i) continue;
            cands.emplace_back(model.squared(train.row(minority[j]), train.row(minority[i])),
                               minority[j]);
        }
        std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(list_len),
                          cands.end());
        for (std::size_t n = 0; n < list_len; ++n) neighbor_lists[i].push_back(cands[n].second);
    }

    std::vector<double> synthetic(train.cols);
    for (std::size_t s = 0; s < needed; ++s) {
        const std::size_t seed_i = rng.below(minority.size());
        const std::size_t seed_row = minority[seed_i];
        const auto& list = neighbor_lists[seed_i];
        const std::size_t partner_row = list[rng.below(list.size())];
        const double delta = rng.uniform();
        const auto x = train.row(seed_row);
        const auto z = train.row(partner_row);
        for (std::size_t c = 0; c < train.cols; ++c) {
            synthetic[c] = schema.is_nominal(c) ? x[c] : x[c] + delta * (z[c] - x[c]);
        }
        out.append_row(synthetic, 1, 1.0, Provenance::synthetic, TrainSet::no_source);
    }
    return out;
}

// Weight vector for cost-sensitive training: minority rows weigh as much as
// the training set's imbalance ratio, majority rows weigh 1.
inline std::vector<double> sample_weights(const TrainSet& train) {
    detail::require_both_classes(train, "sample_weights");
    const double ratio =
        static_cast<double>(train.count(-1)) / static_cast<double>(train.count(1));
    std::vector<double> weights;
    weights.reserve(train.rows());
    for (const int label : train.labels) weights.push_back(label == 1 ? ratio : 1.0);
    return weights;
}

inline TrainSet apply_recovery(RecoveryMethod method, const TrainSet& train,
                               const FeatureSchema& schema, MetricConfig metric,
                               std::size_t k_smote, Rng& rng) {
    switch (method) {
        case RecoveryMethod::none: return train;
        case RecoveryMethod::oversample: return oversample(train, rng);
        case RecoveryMethod::undersample: return undersample(train, rng);
        case RecoveryMethod::smote: return smote(train, schema, metric, k_smote, rng);
        case RecoveryMethod::sample_weight: {
            TrainSet out = train;
            out.weights = sample_weights(train);
            return out;
        }
    }
    throw PreconditionError("apply_recovery: unknown method");
}

}  // namespace bi3
