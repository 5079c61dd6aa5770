#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include "bi3/dataset.hpp"
#include "bi3/error.hpp"

namespace bi3 {

enum class Normalization { none, min_max };

struct MetricConfig {
    Normalization normalization = Normalization::none;
};

// Mixed-type distance: squared numeric differences (optionally min-max
// scaled with column statistics taken over the whole dataset the model was
// built from) plus 0/1 mismatch terms for nominal columns, under one sqrt.
class DistanceModel {
public:
    DistanceModel(const FeatureSchema& schema, std::span<const double> values, std::size_t rows,
                  MetricConfig config = {})
        : nominal_(schema.column_count(), 0), scale_(schema.column_count(), 1.0) {
        const std::size_t cols = schema.column_count();
        if (rows * cols != values.size()) {
            throw PreconditionError("DistanceModel: value buffer does not match rows x columns");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            nominal_[c] = schema.is_nominal(c) ? 1 : 0;
        }
        if (config.normalization == Normalization::min_max) {
            for (std::size_t c = 0; c < cols; ++c) {
                if (nominal_[c]) continue;
                double lo = std::numeric_limits<double>::infinity();
                double hi = -std::numeric_limits<double>::infinity();
                for (std::size_t r = 0; r < rows; ++r) {
                    const double v = values[r * cols + c];
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
                scale_[c] = hi > lo ? 1.0 / (hi - lo) : 0.0;  // constant column: no contribution
            }
        }
    }

    explicit DistanceModel(const Dataset& dataset, MetricConfig config = {})
        : DistanceModel(dataset.schema(), dataset.values(), dataset.rows(), config) {}

    std::size_t column_count() const { return nominal_.size(); }

    double squared(std::span<const double> a, std::span<const double> b) const {
        if (a.size() != nominal_.size() || b.size() != nominal_.size()) {
            throw PreconditionError("DistanceModel: vector length does not match the schema");
        }
        double sum = 0.0;
        for (std::size_t c = 0; c < nominal_.size(); ++c) {
            if (nominal_[c]) {
                sum += a[c] == b[c] ? 0.0 : 1.0;
            } else {
                const double d = (a[c] - b[c]) * scale_[c];
                sum += d * d;
            }
        }
        return sum;
    }

    double operator()(std::span<const double> a, std::span<const double> b) const {
        return std::sqrt(squared(a, b));
    }

private:
    std::vector<std::uint8_t> nominal_;
    std::vector<double> scale_;
};

// Distance between two feature vectors without dataset context (so min-max
// scaling, which needs column statistics, is not available here).
inline double distance(std::span<const double> a, std::span<const double> b,
                       const FeatureSchema& schema) {
    if (a.size() != schema.column_count() || b.size() != schema.column_count()) {
        throw PreconditionError("distance: vector length does not match the schema");
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < schema.column_count(); ++c) {
        if (schema.is_nominal(c)) {
            sum += a[c] == b[c] ? 0.0 : 1.0;
        } else {
            const double d = a[c] - b[c];
            sum += d * d;
        }
    }
    return std::sqrt(sum);
}

struct Neighborhood {
    std::size_t query = 0;
    std::size_t k = 0;                   // effective neighborhood size
    std::size_t majority_count = 0;      // neighbors labelled -1
    bool flexible_applied = false;       // true when the neighborhood was grown
    std::vector<std::size_t> indices;    // ascending (distance, index)
    std::vector<double> distances;
    std::vector<int> labels;
};

namespace detail {

using DistIndex = std::pair<double, std::size_t>;  // (squared distance, row); ties on index

// The k nearest rows to `query` among all other rows, ascending.
inline std::vector<DistIndex> smallest_k(const Dataset& dataset, const DistanceModel& model,
                                         std::size_t query, std::size_t k) {
    std::priority_queue<DistIndex> heap;  // max-heap over (distance, index)
    const auto q = dataset.row(query);
    for (std::size_t j = 0; j < dataset.rows(); ++j) {
        if (j == query) continue;
        const DistIndex cand{model.squared(dataset.row(j), q), j};
        if (heap.size() < k) {
            heap.push(cand);
        } else if (cand < heap.top()) {
            heap.pop();
            heap.push(cand);
        }
    }
    std::vector<DistIndex> out(heap.size());
    for (std::size_t i = out.size(); i-- > 0;) {
        out[i] = heap.top();
        heap.pop();
    }
    return out;
}

inline Neighborhood make_neighborhood(const Dataset& dataset, std::size_t query,
                                      const std::vector<DistIndex>& picks, bool flexible_applied) {
    Neighborhood nb;
    nb.query = query;
    nb.k = picks.size();
    nb.flexible_applied = flexible_applied;
    for (const auto& [dsq, j] : picks) {
        nb.indices.push_back(j);
        nb.distances.push_back(std::sqrt(dsq));
        nb.labels.push_back(dataset.label(j));
        if (dataset.label(j) == -1) ++nb.majority_count;
    }
    return nb;
}

}  // namespace detail

// Plain k-nearest-neighbor query; the query row itself is excluded and
// distance ties are broken by ascending row index.
inline Neighborhood knn(const Dataset& dataset, const DistanceModel& model, std::size_t query,
                        std::size_t k) {
    if (query >= dataset.rows()) throw PreconditionError("knn: query index out of range");
    if (k < 1 || k > dataset.rows() - 1) {
        throw PreconditionError("knn: k must be in [1, rows-1]");
    }
    return detail::make_neighborhood(dataset, query, detail::smallest_k(dataset, model, query, k),
                                     false);
}

inline Neighborhood knn(const Dataset& dataset, std::size_t query, std::size_t k,
                        MetricConfig config = {}) {
    return knn(dataset, DistanceModel(dataset, config), query, k);
}

// Neighborhood used by the per-instance index: starts from the k0 nearest
// neighbors; when every one of them belongs to the majority class, grows the
// neighborhood out to the nearest minority sample (rank rho), giving k = rho
// with exactly one minority member, the rho-th.
inline Neighborhood flexible_neighborhood(const Dataset& dataset, const DistanceModel& model,
                                          std::size_t query, std::size_t k0) {
    if (query >= dataset.rows()) {
        throw PreconditionError("flexible_neighborhood: query index out of range");
    }
    if (dataset.label(query) != 1) {
        throw PreconditionError("flexible_neighborhood: query must be a minority (+1) sample");
    }
    if (k0 < 1 || k0 > dataset.rows() - 1) {
        throw PreconditionError("flexible_neighborhood: k0 must be in [1, rows-1]");
    }

    const auto base = detail::smallest_k(dataset, model, query, k0);
    const bool all_majority =
        std::all_of(base.begin(), base.end(),
                    [&](const detail::DistIndex& p) { return dataset.label(p.second) == -1; });
    if (!all_majority) {
        return detail::make_neighborhood(dataset, query, base, false);
    }

    // Nearest minority sample and its rank among all other rows.
    const auto q = dataset.row(query);
    detail::DistIndex nearest_minority{std::numeric_limits<double>::infinity(),
                                       std::numeric_limits<std::size_t>::max()};
    for (std::size_t j = 0; j < dataset.rows(); ++j) {
        if (j == query || dataset.label(j) != 1) continue;
        const detail::DistIndex cand{model.squared(dataset.row(j), q), j};
        nearest_minority = std::min(nearest_minority, cand);
    }
    if (nearest_minority.second == std::numeric_limits<std::size_t>::max()) {
        throw UnsupportedInstanceError(
            "flexible_neighborhood: no other minority sample exists in the dataset");
    }
    std::vector<detail::DistIndex> picks;
    for (std::size_t j = 0; j < dataset.rows(); ++j) {
        if (j == query) continue;
        const detail::DistIndex cand{model.squared(dataset.row(j), q), j};
        if (cand <= nearest_minority) picks.push_back(cand);
    }
    std::sort(picks.begin(), picks.end());
    return detail::make_neighborhood(dataset, query, picks, true);
}

inline Neighborhood flexible_neighborhood(const Dataset& dataset, std::size_t query, std::size_t k0,
                                          MetricConfig config = {}) {
    return flexible_neighborhood(dataset, DistanceModel(dataset, config), query, k0);
}

// Labels of every other row ordered by ascending (distance, index); used by
// the k-sweep to evaluate all neighborhood sizes in one pass.
inline std::vector<int> sorted_neighbor_labels(const Dataset& dataset, const DistanceModel& model,
                                               std::size_t query) {
    std::vector<detail::DistIndex> all;
    all.reserve(dataset.rows() - 1);
    const auto q = dataset.row(query);
    for (std::size_t j = 0; j < dataset.rows(); ++j) {
        if (j == query) continue;
        all.emplace_back(model.squared(dataset.row(j), q), j);
    }
    std::sort(all.begin(), all.end());
    std::vector<int> labels;
    labels.reserve(all.size());
    for (const auto& [dsq, j] : all) labels.push_back(dataset.label(j));
    return labels;
}

}  // namespace bi3
