#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "bi3/dataset.hpp"
#include "bi3/error.hpp"
#include "bi3/linalg.hpp"
#include "bi3/neighbors.hpp"
#include "bi3/parallel.hpp"

namespace bi3 {

// Difference between the balanced-world and observed posterior of the
// minority class given unnormalized evidence scores: f_n for the majority
// class, f_p for the minority class as observed, and f_p_prime for the
// minority class after recovering the class balance.  A vanished
// denominator contributes 0.
inline double normalized_posterior_difference(double f_n, double f_p, double f_p_prime) {
    const double balanced = (f_n + f_p_prime) > 0.0 ? f_p_prime / (f_n + f_p_prime) : 0.0;
    const double observed = (f_n + f_p) > 0.0 ? f_p / (f_n + f_p) : 0.0;
    return balanced - observed;
}

// Per-instance index from neighborhood counts: `majority` of the k nearest
// neighbors belong to the majority class and `ratio` = N_n / N_p.  Estimates
// how much the minority posterior at this point would rise if the classes
// were balanced.
inline double ibi3_from_counts(std::size_t majority, std::size_t k, double ratio) {
    if (k == 0) throw PreconditionError("ibi3_from_counts: k must be positive");
    if (majority >= k) {
        throw PreconditionError(
            "ibi3_from_counts: majority count must be smaller than k "
            "(a neighborhood with no minority member has no defined value)");
    }
    if (ratio < 1.0) throw PreconditionError("ibi3_from_counts: imbalance ratio must be >= 1");
    const double f_n = static_cast<double>(majority) / static_cast<double>(k);
    const double f_p = static_cast<double>(k - majority) / static_cast<double>(k);
    return normalized_posterior_difference(f_n, f_p, ratio * f_p);
}

// Convenience single-instance entry point using the flexible neighborhood.
inline double instance_ibi3(const Dataset& dataset, const ClassStats& stats, std::size_t index,
                            std::size_t k0 = 5, MetricConfig metric = {}) {
    const Neighborhood nb = flexible_neighborhood(dataset, index, k0, metric);
    return ibi3_from_counts(nb.majority_count, nb.k, stats.imbalance_ratio);
}

// ---------------------------------------------------------------------------
// Comparison measures
// ---------------------------------------------------------------------------

// k-disagreeing neighbors: fraction of the k nearest neighbors with a label
// different from the query's.
inline double kdn(const Dataset& dataset, const DistanceModel& model, std::size_t index,
                  std::size_t k) {
    const Neighborhood nb = knn(dataset, model, index, k);
    std::size_t different = 0;
    for (const int label : nb.labels) {
        if (label != dataset.label(index)) ++different;
    }
    return static_cast<double>(different) / static_cast<double>(k);
}

inline double kdn(const Dataset& dataset, std::size_t index, std::size_t k,
                  MetricConfig metric = {}) {
    return kdn(dataset, DistanceModel(dataset, metric), index, k);
}

enum class ClEstimator { histogram, gaussian };

// Naive-Bayes style class likelihood tables.  Numeric columns are
// discretized into equal-width bins over the column's full range (or modeled
// as per-class normals under the gaussian estimator); nominal columns use
// category counts.  All counts are Laplace smoothed.
class ClassLikelihoodModel {
public:
    ClassLikelihoodModel(const Dataset& dataset, std::size_t bins = 10,
                         ClEstimator estimator = ClEstimator::histogram)
        : estimator_(estimator), bins_(bins) {
        if (bins_ < 1) throw PreconditionError("ClassLikelihoodModel: bins must be positive");
        const std::size_t cols = dataset.cols();
        columns_.resize(cols);
        class_size_[0] = class_size_[1] = 0;
        for (std::size_t r = 0; r < dataset.rows(); ++r) ++class_size_[class_of(dataset.label(r))];

        for (std::size_t c = 0; c < cols; ++c) {
            ColumnTable& table = columns_[c];
            table.nominal = dataset.schema().is_nominal(c);
            if (table.nominal) {
                const std::size_t n_cat = dataset.schema().column(c).categories.size();
                table.count[0].assign(n_cat, 0.0);
                table.count[1].assign(n_cat, 0.0);
                for (std::size_t r = 0; r < dataset.rows(); ++r) {
                    table.count[class_of(dataset.label(r))]
                               [static_cast<std::size_t>(dataset.value(r, c))] += 1.0;
                }
                continue;
            }
            double lo = dataset.value(0, c), hi = lo;
            for (std::size_t r = 1; r < dataset.rows(); ++r) {
                lo = std::min(lo, dataset.value(r, c));
                hi = std::max(hi, dataset.value(r, c));
            }
            table.lo = lo;
            table.width = (hi - lo) / static_cast<double>(bins_);
            if (estimator_ == ClEstimator::histogram) {
                table.count[0].assign(bins_, 0.0);
                table.count[1].assign(bins_, 0.0);
                for (std::size_t r = 0; r < dataset.rows(); ++r) {
                    table.count[class_of(dataset.label(r))][bin_of(table, dataset.value(r, c))] += 1.0;
                }
            } else {
                for (int cls = 0; cls < 2; ++cls) {
                    double sum = 0.0, sq = 0.0;
                    const double n = static_cast<double>(class_size_[cls]);
                    for (std::size_t r = 0; r < dataset.rows(); ++r) {
                        if (class_of(dataset.label(r)) != cls) continue;
                        sum += dataset.value(r, c);
                        sq += dataset.value(r, c) * dataset.value(r, c);
                    }
                    table.mean[cls] = sum / n;
                    const double var = n > 1 ? std::max(0.0, (sq - sum * sum / n) / (n - 1)) : 0.0;
                    table.sd[cls] = std::sqrt(var);
                }
            }
        }
    }

    // CL(x, y) = 1 - prod_i P(x_i | y) for the row's own label.
    double class_likelihood_complement(const Dataset& dataset, std::size_t row) const {
        const int cls = class_of(dataset.label(row));
        double product = 1.0;
        for (std::size_t c = 0; c < columns_.size(); ++c) {
            product *= factor(columns_[c], cls, dataset.value(row, c));
        }
        return 1.0 - product;
    }

private:
    struct ColumnTable {
        bool nominal = false;
        double lo = 0.0, width = 0.0;
        std::vector<double> count[2];  // histogram bins or category counts
        double mean[2] = {0.0, 0.0}, sd[2] = {0.0, 0.0};
    };

    static int class_of(int label) { return label == 1 ? 0 : 1; }

    std::size_t bin_of(const ColumnTable& table, double v) const {
        if (table.width <= 0.0) return 0;
        const double offset = (v - table.lo) / table.width;
        const auto bin = static_cast<std::size_t>(std::max(0.0, offset));
        return std::min(bin, bins_ - 1);
    }

    double factor(const ColumnTable& table, int cls, double v) const {
        const double n = static_cast<double>(class_size_[cls]);
        if (table.nominal) {
            const double cats = static_cast<double>(table.count[cls].size());
            return (table.count[cls][static_cast<std::size_t>(v)] + 1.0) / (n + cats);
        }
        if (estimator_ == ClEstimator::histogram) {
            return (table.count[cls][bin_of(table, v)] + 1.0) / (n + static_cast<double>(bins_));
        }
        // Gaussian estimator: probability mass of one bin width centered at v.
        if (table.width <= 0.0) return 1.0;
        const double half = table.width / 2.0;
        if (table.sd[cls] < 1e-12) {
            return std::abs(v - table.mean[cls]) <= half ? 1.0 : 1e-12;
        }
        const double upper = detail::normal_cdf((v + half - table.mean[cls]) / table.sd[cls]);
        const double lower = detail::normal_cdf((v - half - table.mean[cls]) / table.sd[cls]);
        return std::clamp(upper - lower, 1e-12, 1.0);
    }

    ClEstimator estimator_;
    std::size_t bins_;
    std::size_t class_size_[2];
    std::vector<ColumnTable> columns_;
};

inline double cl(const Dataset& dataset, std::size_t index, std::size_t bins = 10,
                 ClEstimator estimator = ClEstimator::histogram) {
    return ClassLikelihoodModel(dataset, bins, estimator)
        .class_likelihood_complement(dataset, index);
}

// Class mixture: fraction of all samples whose k-neighborhood is at most
// half same-class.
inline double cm(const Dataset& dataset, std::size_t k, MetricConfig metric = {},
                 unsigned threads = 1) {
    if (k < 1 || k > dataset.rows() - 1) throw PreconditionError("cm: k must be in [1, rows-1]");
    const DistanceModel model(dataset, metric);
    std::vector<std::uint8_t> mixed(dataset.rows(), 0);
    parallel_for(dataset.rows(), threads, [&](std::size_t r) {
        const auto picks = detail::smallest_k(dataset, model, r, k);
        std::size_t same = 0;
        for (const auto& [dsq, j] : picks) {
            if (dataset.label(j) == dataset.label(r)) ++same;
        }
        mixed[r] = (2 * same <= k) ? 1 : 0;
    });
    std::size_t total = 0;
    for (const auto m : mixed) total += m;
    return static_cast<double>(total) / static_cast<double>(dataset.rows());
}

// ---------------------------------------------------------------------------
// Dataset-level measure pass
// ---------------------------------------------------------------------------

struct MeasureConfig {
    std::size_t k0 = 5;
    MetricConfig metric;
    bool flexible = true;  // which per-instance variant fills the headline fields
    std::size_t cl_bins = 10;
    ClEstimator cl_estimator = ClEstimator::histogram;
    std::size_t cm_k = 0;  // 0: use k0
    unsigned threads = 1;
};

struct InstanceMeasure {
    std::size_t index = 0;  // row in the dataset
    double ibi3 = 0.0;      // the configured variant
    double ibi3_flexible = 0.0;
    double ibi3_fixed = 0.0;
    double kdn = 0.0;
    double cl = 0.0;
    std::size_t majority_count = 0;  // of the effective neighborhood
    std::size_t k = 0;               // effective neighborhood size
    bool flexible_applied = false;
    bool skipped = false;
};

struct MeasureReport {
    std::vector<InstanceMeasure> instances;  // minority rows, ascending index
    double bi3 = 0.0;        // mean of the configured per-instance variant
    double bi3_flexible = 0.0;
    double bi3_fixed = 0.0;
    double mean_kdn = 0.0;   // over minority instances
    double mean_cl = 0.0;    // over minority instances
    double cm = 0.0;         // over all instances
    double imbalance_ratio = 0.0;
    std::size_t skipped = 0;
    MeasureConfig config;
};

inline MeasureReport measure_dataset(const Dataset& dataset, const ClassStats& stats,
                                     MeasureConfig config = {}) {
    if (stats.n_pos < 2) {
        throw PreconditionError("measure_dataset: needs at least two minority samples");
    }
    if (stats.imbalance_ratio < 1.0) {
        throw PreconditionError("measure_dataset: dataset must be canonical (minority = +1)");
    }
    const DistanceModel model(dataset, config.metric);
    const ClassLikelihoodModel cl_model(dataset, config.cl_bins, config.cl_estimator);
    const std::vector<std::size_t> minority = dataset.indices_of(1);
    const double ratio = stats.imbalance_ratio;

    MeasureReport report;
    report.config = config;
    report.imbalance_ratio = ratio;
    report.instances.resize(minority.size());

    parallel_for(minority.size(), config.threads, [&](std::size_t i) {
        InstanceMeasure& rec = report.instances[i];
        rec.index = minority[i];
        try {
            const Neighborhood nb = flexible_neighborhood(dataset, model, rec.index, config.k0);
            rec.majority_count = nb.majority_count;
            rec.k = nb.k;
            rec.flexible_applied = nb.flexible_applied;
            rec.ibi3_flexible = ibi3_from_counts(nb.majority_count, nb.k, ratio);
            rec.ibi3_fixed =
                nb.flexible_applied ? 0.0 : ibi3_from_counts(nb.majority_count, config.k0, ratio);
            rec.kdn = nb.flexible_applied
                          ? 1.0
                          : static_cast<double>(nb.majority_count) / static_cast<double>(config.k0);
            rec.ibi3 = config.flexible ? rec.ibi3_flexible : rec.ibi3_fixed;
            rec.cl = cl_model.class_likelihood_complement(dataset, rec.index);
        } catch (const UnsupportedInstanceError&) {
            rec.skipped = true;
        }
    });

    double sum_flex = 0.0, sum_fixed = 0.0, sum_kdn = 0.0, sum_cl = 0.0;
    std::size_t used = 0;
    for (const InstanceMeasure& rec : report.instances) {
        if (rec.skipped) {
            ++report.skipped;
            continue;
        }
        sum_flex += rec.ibi3_flexible;
        sum_fixed += rec.ibi3_fixed;
        sum_kdn += rec.kdn;
        sum_cl += rec.cl;
        ++used;
    }
    if (used == 0) throw PreconditionError("measure_dataset: no usable minority instance");
    report.bi3_flexible = sum_flex / static_cast<double>(used);
    report.bi3_fixed = sum_fixed / static_cast<double>(used);
    report.bi3 = config.flexible ? report.bi3_flexible : report.bi3_fixed;
    report.mean_kdn = sum_kdn / static_cast<double>(used);
    report.mean_cl = sum_cl / static_cast<double>(used);
    report.cm = cm(dataset, config.cm_k == 0 ? config.k0 : config.cm_k, config.metric,
                   config.threads);
    return report;
}

// ---------------------------------------------------------------------------
// Closed-form oracle on Gaussian class models
// ---------------------------------------------------------------------------

struct GaussianClassModel {
    std::vector<double> mean;
    std::vector<double> covariance;  // d x d row-major

    std::size_t dim() const { return mean.size(); }
};

inline GaussianClassModel fit_gaussian_class(const Dataset& dataset, int label) {
    const std::vector<std::size_t> rows = dataset.indices_of(label);
    const std::size_t n = rows.size();
    const std::size_t d = dataset.cols();
    if (n < 2) throw PreconditionError("fit_gaussian_class: needs at least two samples");
    GaussianClassModel model;
    model.mean.assign(d, 0.0);
    for (const std::size_t r : rows) {
        for (std::size_t c = 0; c < d; ++c) model.mean[c] += dataset.value(r, c);
    }
    for (double& m : model.mean) m /= static_cast<double>(n);
    model.covariance.assign(d * d, 0.0);
    for (const std::size_t r : rows) {
        for (std::size_t i = 0; i < d; ++i) {
            const double di = dataset.value(r, i) - model.mean[i];
            for (std::size_t j = 0; j <= i; ++j) {
                model.covariance[i * d + j] += di * (dataset.value(r, j) - model.mean[j]);
            }
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = model.covariance[i * d + j] / static_cast<double>(n - 1);
            model.covariance[i * d + j] = v;
            model.covariance[j * d + i] = v;
        }
    }
    return model;
}

inline double log_gaussian_density(const GaussianClassModel& model, std::span<const double> x) {
    const std::size_t d = model.dim();
    if (x.size() != d) throw PreconditionError("log_gaussian_density: dimension mismatch");
    std::vector<double> chol = model.covariance;
    if (!detail::cholesky_factor(chol, d)) {
        throw PreconditionError("log_gaussian_density: covariance is not positive definite");
    }
    std::vector<double> z(d);
    for (std::size_t i = 0; i < d; ++i) z[i] = x[i] - model.mean[i];
    detail::solve_lower(chol, d, z);
    double quad = 0.0, logdet = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        quad += z[i] * z[i];
        logdet += std::log(chol[i * d + i]);
    }
    return -0.5 * quad - logdet - 0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi);
}

// Closed-form analog of the per-instance index: evidence scores are class
// priors times exact Gaussian densities instead of neighbor counts.
inline double gaussian_ibi3(const GaussianClassModel& minority_model,
                            const GaussianClassModel& majority_model, std::span<const double> x,
                            double n_pos, double n_neg) {
    if (n_pos <= 0.0 || n_neg < n_pos) {
        throw PreconditionError("gaussian_ibi3: class sizes must satisfy n_neg >= n_pos > 0");
    }
    const double density_pos = std::exp(log_gaussian_density(minority_model, x));
    const double density_neg = std::exp(log_gaussian_density(majority_model, x));
    const double f_n = n_neg * density_neg;
    const double f_p = n_pos * density_pos;
    const double f_p_prime = n_neg * density_pos;
    return normalized_posterior_difference(f_n, f_p, f_p_prime);
}

}  // namespace bi3
