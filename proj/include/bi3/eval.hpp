#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bi3/dataset.hpp"
#include "bi3/error.hpp"
#include "bi3/measures.hpp"
#include "bi3/neighbors.hpp"
#include "bi3/parallel.hpp"
#include "bi3/recovery.hpp"
#include "bi3/rng.hpp"

namespace bi3 {

// ---------------------------------------------------------------------------
// Weighted kNN classifier
// ---------------------------------------------------------------------------

// Minority score of x: summed weight of the +1 members among the k nearest
// training rows over the summed weight of all k.  Ties in distance are broken
// by ascending training-row index; k is capped at the training size.
inline double knn_score(const TrainSet& train, const DistanceModel& model,
                        std::span<const double> x, std::size_t k) {
    if (train.rows() == 0) throw PreconditionError("knn_score: empty training set");
    if (k < 1) throw PreconditionError("knn_score: k must be positive");
    k = std::min(k, train.rows());
    std::priority_queue<std::pair<double, std::size_t>> heap;
    for (std::size_t j = 0; j < train.rows(); ++j) {
        const std::pair<double, std::size_t> cand{model.squared(train.row(j), x), j};
        if (heap.size() < k) {
            heap.push(cand);
        } else if (cand < heap.top()) {
            heap.pop();
            heap.push(cand);
        }
    }
    double total = 0.0, positive = 0.0;
    while (!heap.empty()) {
        const std::size_t j = heap.top().second;
        heap.pop();
        total += train.weights[j];
        if (train.labels[j] == 1) positive += train.weights[j];
    }
    if (total <= 0.0) throw PreconditionError("knn_score: neighbor weights sum to zero");
    return positive / total;
}

inline int predict_from_score(double score) { return score > 0.5 ? 1 : -1; }

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

// F1 of the +1 class; 0 when the positive class is never correctly predicted.
inline double f1_positive(std::span<const int> predicted, std::span<const int> actual) {
    if (predicted.size() != actual.size() || predicted.empty()) {
        throw PreconditionError("f1_positive: need equally sized, non-empty label vectors");
    }
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] == 1 && actual[i] == 1) ++tp;
        if (predicted[i] == 1 && actual[i] == -1) ++fp;
        if (predicted[i] == -1 && actual[i] == 1) ++fn;
    }
    const double denom = static_cast<double>(2 * tp + fp + fn);
    return denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(tp) / denom;
}

// Average ranks, 1-based; exact-equal values share the mean of their positions.
inline std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return values[a] < values[b] || (values[a] == values[b] && a < b);
    });
    std::vector<double> ranks(values.size(), 0.0);
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = mean_rank;
        i = j + 1;
    }
    return ranks;
}

// Spearman rank correlation: Pearson correlation of average ranks.  Throws
// UndefinedCorrelationError when either variable has zero rank variance.
inline double spearman(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw PreconditionError("spearman: need two equally sized vectors of length >= 2");
    }
    const std::vector<double> ra = average_ranks(a);
    const std::vector<double> rb = average_ranks(b);
    const double n = static_cast<double>(a.size());
    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        mean_a += ra[i];
        mean_b += rb[i];
    }
    mean_a /= n;
    mean_b /= n;
    double var_a = 0.0, var_b = 0.0, cov = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = ra[i] - mean_a;
        const double db = rb[i] - mean_b;
        var_a += da * da;
        var_b += db * db;
        cov += da * db;
    }
    if (var_a == 0.0 || var_b == 0.0) {
        throw UndefinedCorrelationError("spearman: zero rank variance");
    }
    return cov / std::sqrt(var_a * var_b);
}

// ---------------------------------------------------------------------------
// Stratified cross-validation folds
// ---------------------------------------------------------------------------

struct FoldPlan {
    std::size_t fold_count = 0;
    bool reduced = false;  // requested fold count exceeded the minority size
    std::vector<std::vector<std::size_t>> folds;  // test rows per fold, ascending
};

// Shuffles each class separately and deals its members round-robin, so every
// fold's class counts differ by at most one.  When the smaller class has
// fewer members than `requested`, the fold count drops to that size.
inline FoldPlan stratified_folds(std::span<const int> labels, std::size_t requested, Rng& rng) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        (labels[i] == 1 ? pos : neg).push_back(i);
    }
    const std::size_t smaller = std::min(pos.size(), neg.size());
    if (requested < 2) throw PreconditionError("stratified_folds: need at least 2 folds");
    if (smaller < 2) {
        throw PreconditionError("stratified_folds: both classes need at least 2 members");
    }
    FoldPlan plan;
    plan.fold_count = std::min(requested, smaller);
    plan.reduced = plan.fold_count < requested;
    plan.folds.assign(plan.fold_count, {});
    for (std::vector<std::size_t>* cls : {&pos, &neg}) {
        shuffle(*cls, rng);
        for (std::size_t i = 0; i < cls->size(); ++i) {
            plan.folds[i % plan.fold_count].push_back((*cls)[i]);
        }
    }
    for (auto& fold : plan.folds) std::sort(fold.begin(), fold.end());
    return plan;
}

// ---------------------------------------------------------------------------
// Recovery study
// ---------------------------------------------------------------------------

struct NamedDataset {
    std::string name;
    Dataset dataset;
    ClassStats stats;
};

// How resampling interacts with cross-validation.
//
// fold_resample (default): folds are dealt on the original dataset and each
// recovery method sees only the training fold; test folds stay untouched.
// This is the leak-free protocol and gives honest generalization estimates.
//
// dataset_resample: each method resamples the WHOLE dataset once per run and
// the folds are dealt on the resampled data.  Copies of test rows can then
// appear in training folds, which inflates scores for the sampling methods.
// It exists to reproduce published reference numbers that were measured this
// way; do not use it to estimate real-world performance.  Per-instance score
// deltas are not defined under this protocol (test rows are resampled rows,
// not the original minority samples), so instance-level correlations are
// only available under fold_resample.
enum class EvalProtocol { fold_resample, dataset_resample };

inline std::string protocol_name(EvalProtocol protocol) {
    return protocol == EvalProtocol::fold_resample ? "fold_resample" : "dataset_resample";
}

struct StudyConfig {
    MeasureConfig measure;          // neighborhood size k0, metric, CL bins, ...
    std::size_t classifier_k = 5;
    std::size_t smote_k = 5;
    std::size_t folds = 10;
    std::size_t runs = 5;
    std::vector<RecoveryMethod> methods{RecoveryMethod::oversample, RecoveryMethod::undersample,
                                        RecoveryMethod::smote, RecoveryMethod::sample_weight};
    EvalProtocol protocol = EvalProtocol::fold_resample;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

struct MethodOutcome {
    bool defined = true;
    std::string failure;             // first error message when !defined
    double f1_delta = 0.0;           // mean-over-runs F1 minus baseline F1
    std::vector<double> score_delta; // per minority row: mean-over-runs score change
};

struct DatasetEvaluation {
    std::string name;
    std::size_t rows = 0;
    bool fold_reduced = false;
    MeasureReport measures;
    double f1_baseline = 0.0;
    std::vector<std::size_t> minority_rows;  // ascending; aligns with measures.instances
    std::vector<double> baseline_score;      // per minority row, mean over runs
    std::map<RecoveryMethod, MethodOutcome> outcomes;
};

// FNV-1a hash of the dataset name: every dataset gets its own stream family,
// stable under suite composition.
inline std::uint64_t dataset_salt(const std::string& name) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const unsigned char c : name) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline Rng fold_rng(std::uint64_t seed, std::uint64_t salt, std::size_t run) {
    return Rng(mix_seed(seed, {salt, 0xf01d5, run}));
}

inline Rng method_rng(std::uint64_t seed, std::uint64_t salt, std::size_t run, std::size_t fold,
                      RecoveryMethod method) {
    return Rng(mix_seed(seed, {salt, 0x3e740d, run, fold, static_cast<std::uint64_t>(method)}));
}

// Fold stream for the dataset_resample protocol, where every (method, run)
// pair deals its own folds on its own resampled copy of the data.
inline Rng resample_fold_rng(std::uint64_t seed, std::uint64_t salt, std::size_t run,
                             RecoveryMethod method) {
    return Rng(mix_seed(seed, {salt, 0x5e7f01d, run, static_cast<std::uint64_t>(method)}));
}

// Runs the full cross-validated recovery comparison on one dataset: a
// baseline weighted-kNN pass plus one pass per recovery method, repeated
// `runs` times over freshly dealt stratified folds.
inline DatasetEvaluation evaluate_dataset(const NamedDataset& input, const StudyConfig& config) {
    const Dataset& dataset = input.dataset;
    const std::size_t n = dataset.rows();
    const std::size_t n_methods = config.methods.size();
    const std::uint64_t salt = dataset_salt(input.name);

    DatasetEvaluation result;
    result.name = input.name;
    result.rows = n;
    result.minority_rows = dataset.indices_of(1);

    MeasureConfig measure_config = config.measure;
    measure_config.threads = config.threads;
    result.measures = measure_dataset(dataset, input.stats, measure_config);

    // Fold plans are dealt sequentially so that the task loop below can run
    // in any order.
    std::vector<FoldPlan> plans;
    for (std::size_t run = 0; run < config.runs; ++run) {
        Rng rng = fold_rng(config.seed, salt, run);
        plans.push_back(stratified_folds(dataset.labels(), config.folds, rng));
        if (plans.back().reduced) result.fold_reduced = true;
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    // scores[variant][run * n + row]; variant 0 is the baseline.
    std::vector<std::vector<double>> scores(1 + n_methods,
                                            std::vector<double>(config.runs * n, nan));

    std::vector<std::pair<std::size_t, std::size_t>> tasks;  // (run, fold)
    for (std::size_t run = 0; run < config.runs; ++run) {
        for (std::size_t fold = 0; fold < plans[run].fold_count; ++fold) {
            tasks.emplace_back(run, fold);
        }
    }
    // failures[task][method]: each task writes only its own slots.
    std::vector<std::vector<std::string>> failures(tasks.size(),
                                                   std::vector<std::string>(n_methods));

    parallel_for(tasks.size(), config.threads, [&](std::size_t t) {
        const auto [run, fold] = tasks[t];
        const std::vector<std::size_t>& test_rows = plans[run].folds[fold];
        std::vector<std::uint8_t> in_test(n, 0);
        for (const std::size_t r : test_rows) in_test[r] = 1;
        std::vector<std::size_t> train_rows;
        train_rows.reserve(n - test_rows.size());
        for (std::size_t r = 0; r < n; ++r) {
            if (!in_test[r]) train_rows.push_back(r);
        }

        const TrainSet base = TrainSet::from_rows(dataset, train_rows);
        {
            const DistanceModel model(dataset.schema(), base.values, base.rows(),
                                      config.measure.metric);
            for (const std::size_t r : test_rows) {
                scores[0][run * n + r] = knn_score(base, model, dataset.row(r), config.classifier_k);
            }
        }
        if (config.protocol != EvalProtocol::fold_resample) return;
        for (std::size_t m = 0; m < n_methods; ++m) {
            Rng rng = method_rng(config.seed, salt, run, fold, config.methods[m]);
            try {
                const TrainSet resampled = apply_recovery(config.methods[m], base, dataset.schema(),
                                                          config.measure.metric, config.smote_k,
                                                          rng);
                const DistanceModel model(dataset.schema(), resampled.values, resampled.rows(),
                                          config.measure.metric);
                for (const std::size_t r : test_rows) {
                    scores[1 + m][run * n + r] =
                        knn_score(resampled, model, dataset.row(r), config.classifier_k);
                }
            } catch (const PreconditionError& e) {
                failures[t][m] = e.what();
            }
        }
    });

    // Pool predictions per run, then average F1 over runs.
    auto run_f1 = [&](const std::vector<double>& variant_scores, std::size_t run) {
        std::vector<int> predicted(n);
        for (std::size_t r = 0; r < n; ++r) {
            predicted[r] = predict_from_score(variant_scores[run * n + r]);
        }
        return f1_positive(predicted, dataset.labels());
    };
    double f1_base_sum = 0.0;
    for (std::size_t run = 0; run < config.runs; ++run) f1_base_sum += run_f1(scores[0], run);
    result.f1_baseline = f1_base_sum / static_cast<double>(config.runs);

    result.baseline_score.assign(result.minority_rows.size(), 0.0);
    for (std::size_t i = 0; i < result.minority_rows.size(); ++i) {
        double sum = 0.0;
        for (std::size_t run = 0; run < config.runs; ++run) {
            sum += scores[0][run * n + result.minority_rows[i]];
        }
        result.baseline_score[i] = sum / static_cast<double>(config.runs);
    }

    if (config.protocol == EvalProtocol::fold_resample) {
        for (std::size_t m = 0; m < n_methods; ++m) {
            MethodOutcome outcome;
            for (std::size_t t = 0; t < tasks.size() && outcome.defined; ++t) {
                if (!failures[t][m].empty()) {
                    outcome.defined = false;
                    outcome.failure = failures[t][m];
                }
            }
            if (outcome.defined) {
                double f1_sum = 0.0;
                for (std::size_t run = 0; run < config.runs; ++run) {
                    f1_sum += run_f1(scores[1 + m], run);
                }
                outcome.f1_delta = f1_sum / static_cast<double>(config.runs) - result.f1_baseline;
                outcome.score_delta.assign(result.minority_rows.size(), 0.0);
                for (std::size_t i = 0; i < result.minority_rows.size(); ++i) {
                    const std::size_t row = result.minority_rows[i];
                    double sum = 0.0;
                    for (std::size_t run = 0; run < config.runs; ++run) {
                        sum += scores[1 + m][run * n + row] - scores[0][run * n + row];
                    }
                    outcome.score_delta[i] = sum / static_cast<double>(config.runs);
                }
            }
            result.outcomes[config.methods[m]] = std::move(outcome);
        }
        return result;
    }

    // dataset_resample: each (method, run) resamples the whole dataset, deals
    // fresh folds on the resampled copy and cross-validates it without any
    // further resampling.  F1 is measured on the resampled test folds;
    // per-instance score deltas are not defined here (see EvalProtocol).
    const std::vector<std::size_t> all_rows = [&] {
        std::vector<std::size_t> rows(n);
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        return rows;
    }();
    const TrainSet whole = TrainSet::from_rows(dataset, all_rows);
    std::vector<double> method_run_f1(n_methods * config.runs, nan);
    std::vector<std::string> method_run_failure(n_methods * config.runs);
    parallel_for(n_methods * config.runs, config.threads, [&](std::size_t slot) {
        const std::size_t m = slot / config.runs;
        const std::size_t run = slot % config.runs;
        try {
            Rng rng = method_rng(config.seed, salt, run, 0, config.methods[m]);
            const TrainSet resampled = apply_recovery(config.methods[m], whole, dataset.schema(),
                                                      config.measure.metric, config.smote_k, rng);
            Rng deal = resample_fold_rng(config.seed, salt, run, config.methods[m]);
            const FoldPlan plan = stratified_folds(resampled.labels, config.folds, deal);
            std::vector<int> predicted, actual;
            predicted.reserve(resampled.rows());
            actual.reserve(resampled.rows());
            std::vector<std::uint8_t> in_test(resampled.rows(), 0);
            for (const std::vector<std::size_t>& test_rows : plan.folds) {
                std::fill(in_test.begin(), in_test.end(), 0);
                for (const std::size_t r : test_rows) in_test[r] = 1;
                std::vector<std::size_t> train_rows;
                train_rows.reserve(resampled.rows() - test_rows.size());
                for (std::size_t r = 0; r < resampled.rows(); ++r) {
                    if (!in_test[r]) train_rows.push_back(r);
                }
                const TrainSet train = resampled.subset(train_rows);
                const DistanceModel model(dataset.schema(), train.values, train.rows(),
                                          config.measure.metric);
                for (const std::size_t r : test_rows) {
                    const double s = knn_score(train, model, resampled.row(r), config.classifier_k);
                    predicted.push_back(predict_from_score(s));
                    actual.push_back(resampled.labels[r]);
                }
            }
            method_run_f1[slot] = f1_positive(predicted, actual);
        } catch (const PreconditionError& e) {
            method_run_failure[slot] = e.what();
        }
    });
    for (std::size_t m = 0; m < n_methods; ++m) {
        MethodOutcome outcome;
        double f1_sum = 0.0;
        for (std::size_t run = 0; run < config.runs && outcome.defined; ++run) {
            const std::size_t slot = m * config.runs + run;
            if (!method_run_failure[slot].empty()) {
                outcome.defined = false;
                outcome.failure = method_run_failure[slot];
            } else {
                f1_sum += method_run_f1[slot];
            }
        }
        if (outcome.defined) {
            outcome.f1_delta = f1_sum / static_cast<double>(config.runs) - result.f1_baseline;
        }
        result.outcomes[config.methods[m]] = std::move(outcome);
    }
    return result;
}

struct SuiteEvaluation {
    StudyConfig config;
    std::vector<DatasetEvaluation> datasets;
};

// Evaluates every dataset of a suite; datasets are processed in parallel and
// each per-dataset evaluation runs single-threaded.
inline SuiteEvaluation evaluate_suite(const std::vector<NamedDataset>& suite,
                                      const StudyConfig& config) {
    if (suite.empty()) throw PreconditionError("evaluate_suite: empty suite");
    SuiteEvaluation out;
    out.config = config;
    out.datasets.resize(suite.size());
    StudyConfig per_dataset = config;
    per_dataset.threads = 1;
    parallel_for(suite.size(), config.threads,
                 [&](std::size_t i) { out.datasets[i] = evaluate_dataset(suite[i], per_dataset); });
    return out;
}

// ---------------------------------------------------------------------------
// Correlation studies
// ---------------------------------------------------------------------------

enum class DataIndexKind { bi3, mean_kdn, mean_cl, cm, ir };

inline std::string data_index_name(DataIndexKind kind) {
    switch (kind) {
        case DataIndexKind::bi3: return "bi3";
        case DataIndexKind::mean_kdn: return "kdn";
        case DataIndexKind::mean_cl: return "cl";
        case DataIndexKind::cm: return "cm";
        case DataIndexKind::ir: return "ir";
    }
    return "?";
}

inline const std::vector<DataIndexKind>& all_data_indices() {
    static const std::vector<DataIndexKind> kinds{DataIndexKind::bi3, DataIndexKind::mean_kdn,
                                                  DataIndexKind::mean_cl, DataIndexKind::cm,
                                                  DataIndexKind::ir};
    return kinds;
}

struct CorrelationValue {
    bool defined = false;
    double rho = 0.0;
    std::size_t pairs = 0;
    std::string note;  // reason when !defined
};

struct CorrelationReport {
    std::vector<RecoveryMethod> methods;
    // Instance level: IBI3 against mean minority-score increase, pooled
    // over every dataset of the suite.
    std::map<RecoveryMethod, CorrelationValue> instance;
    // Data level: one dataset-level index against the F1 improvement.
    std::map<RecoveryMethod, std::map<DataIndexKind, CorrelationValue>> data;
};

namespace detail {

inline CorrelationValue correlate(const std::vector<double>& x, const std::vector<double>& y) {
    CorrelationValue value;
    value.pairs = x.size();
    if (x.size() < 2) {
        value.note = "fewer than two pairs";
        return value;
    }
    try {
        value.rho = spearman(x, y);
        value.defined = true;
    } catch (const UndefinedCorrelationError& e) {
        value.note = e.what();
    }
    return value;
}

}  // namespace detail

inline double data_index_value(const DatasetEvaluation& d, DataIndexKind kind) {
    switch (kind) {
        case DataIndexKind::bi3: return d.measures.bi3;
        case DataIndexKind::mean_kdn: return d.measures.mean_kdn;
        case DataIndexKind::mean_cl: return d.measures.mean_cl;
        case DataIndexKind::cm: return d.measures.cm;
        case DataIndexKind::ir: return d.measures.imbalance_ratio;
    }
    throw PreconditionError("data_index_value: unknown index");
}

inline CorrelationReport correlation_report(const SuiteEvaluation& suite) {
    CorrelationReport report;
    report.methods = suite.config.methods;
    for (const RecoveryMethod method : suite.config.methods) {
        std::vector<double> inst_x, inst_y;
        std::vector<double> f1_delta;
        std::map<DataIndexKind, std::vector<double>> index_values;
        for (const DatasetEvaluation& d : suite.datasets) {
            const auto it = d.outcomes.find(method);
            if (it == d.outcomes.end() || !it->second.defined) continue;
            // Per-instance deltas exist only under the fold-resampling
            // protocol; a dataset-level resampling run leaves them empty.
            if (it->second.score_delta.size() == d.minority_rows.size()) {
                for (std::size_t i = 0; i < d.minority_rows.size(); ++i) {
                    if (d.measures.instances[i].skipped) continue;
                    inst_x.push_back(d.measures.instances[i].ibi3);
                    inst_y.push_back(it->second.score_delta[i]);
                }
            }
            f1_delta.push_back(it->second.f1_delta);
            for (const DataIndexKind kind : all_data_indices()) {
                index_values[kind].push_back(data_index_value(d, kind));
            }
        }
        report.instance[method] = detail::correlate(inst_x, inst_y);
        if (!report.instance[method].defined && inst_x.empty() && !f1_delta.empty()) {
            report.instance[method].note = "no per-instance deltas under this protocol";
        }
        for (const DataIndexKind kind : all_data_indices()) {
            report.data[method][kind] = detail::correlate(index_values[kind], f1_delta);
        }
    }
    return report;
}

// Instance-level study: per-instance index against the mean minority score
// increase of each recovery method, pooled over all datasets of the suite.
inline CorrelationReport run_instance_study(const std::vector<NamedDataset>& suite,
                                            const StudyConfig& config) {
    CorrelationReport report = correlation_report(evaluate_suite(suite, config));
    report.data.clear();
    return report;
}

// Data-level study: dataset index values against per-dataset F1 improvements.
inline CorrelationReport run_data_study(const std::vector<NamedDataset>& suite,
                                        const StudyConfig& config) {
    CorrelationReport report = correlation_report(evaluate_suite(suite, config));
    report.instance.clear();
    return report;
}

// ---------------------------------------------------------------------------
// Neighborhood-size sweep
// ---------------------------------------------------------------------------

struct KSweepRow {
    std::size_t k = 0;
    // Correlations averaged over the defined recovery methods.
    CorrelationValue instance_flexible, instance_fixed;
    CorrelationValue data_flexible, data_fixed;
};

namespace detail {

inline CorrelationValue average_defined(const std::vector<CorrelationValue>& values) {
    CorrelationValue out;
    double sum = 0.0;
    std::size_t count = 0;
    for (const CorrelationValue& v : values) {
        if (!v.defined) continue;
        sum += v.rho;
        ++count;
        out.pairs += v.pairs;
    }
    if (count == 0) {
        out.note = "no defined correlation";
        return out;
    }
    out.defined = true;
    out.rho = sum / static_cast<double>(count);
    return out;
}

}  // namespace detail

// Recomputes the per-instance index for every k in [k_from, k_to] (both the
// flexible and the fixed neighborhood variant) and correlates against the
// score/F1 changes of an already evaluated suite.  The suite and evaluation
// must be aligned (same datasets, same order).
inline std::vector<KSweepRow> sweep_k(const std::vector<NamedDataset>& suite,
                                      const SuiteEvaluation& eval, std::size_t k_from,
                                      std::size_t k_to, unsigned threads = 1) {
    if (suite.size() != eval.datasets.size()) {
        throw PreconditionError("sweep_k: suite and evaluation are not aligned");
    }
    if (k_from < 1 || k_from > k_to) {
        throw PreconditionError("sweep_k: need 1 <= k_from <= k_to");
    }
    for (std::size_t d = 0; d < suite.size(); ++d) {
        if (suite[d].name != eval.datasets[d].name) {
            throw PreconditionError("sweep_k: suite and evaluation are not aligned");
        }
        if (k_to > suite[d].dataset.rows() - 1) {
            throw PreconditionError("sweep_k: k_to exceeds rows-1 of dataset " + suite[d].name);
        }
    }
    const std::size_t k_count = k_to - k_from + 1;

    // Per k: pooled per-instance values and per-dataset means, both variants.
    std::vector<std::vector<double>> inst_flex(k_count), inst_fixed(k_count);
    std::vector<std::vector<double>> bi3_flex(k_count), bi3_fixed(k_count);

    for (std::size_t d = 0; d < suite.size(); ++d) {
        const Dataset& dataset = suite[d].dataset;
        const double ratio = suite[d].stats.imbalance_ratio;
        const DistanceModel model(dataset, eval.config.measure.metric);
        const std::vector<std::size_t>& minority = eval.datasets[d].minority_rows;

        // prefix[i][j]: majority members among the j nearest neighbors of
        // minority row i; first_pos[i]: 0-based rank of its nearest minority.
        std::vector<std::vector<std::uint32_t>> prefix(minority.size());
        std::vector<std::size_t> first_pos(minority.size());
        parallel_for(minority.size(), threads, [&](std::size_t i) {
            const std::vector<int> labels = sorted_neighbor_labels(dataset, model, minority[i]);
            prefix[i].assign(labels.size() + 1, 0);
            first_pos[i] = labels.size();
            for (std::size_t j = 0; j < labels.size(); ++j) {
                prefix[i][j + 1] = prefix[i][j] + (labels[j] == -1 ? 1 : 0);
                if (labels[j] == 1 && first_pos[i] == labels.size()) first_pos[i] = j;
            }
        });

        for (std::size_t ki = 0; ki < k_count; ++ki) {
            const std::size_t k = k_from + ki;
            double sum_flex = 0.0, sum_fixed = 0.0;
            std::size_t used = 0;
            for (std::size_t i = 0; i < minority.size(); ++i) {
                if (eval.datasets[d].measures.instances[i].skipped) continue;
                const std::size_t m = prefix[i][k];
                double value_fixed, value_flex;
                if (m < k) {
                    value_fixed = ibi3_from_counts(m, k, ratio);
                    value_flex = value_fixed;
                } else {
                    value_fixed = 0.0;
                    const std::size_t p = first_pos[i];
                    value_flex = ibi3_from_counts(p, p + 1, ratio);
                }
                inst_flex[ki].push_back(value_flex);
                inst_fixed[ki].push_back(value_fixed);
                sum_flex += value_flex;
                sum_fixed += value_fixed;
                ++used;
            }
            bi3_flex[ki].push_back(sum_flex / static_cast<double>(used));
            bi3_fixed[ki].push_back(sum_fixed / static_cast<double>(used));
        }
    }

    // Score / F1 deltas do not depend on k; gather them once per method.
    std::vector<RecoveryMethod> defined_methods;
    std::map<RecoveryMethod, std::vector<double>> method_score_delta, method_f1_delta;
    for (const RecoveryMethod method : eval.config.methods) {
        bool all_defined = true;
        bool has_instance = true;
        std::vector<double> score_delta, f1_delta;
        for (const DatasetEvaluation& d : eval.datasets) {
            const auto it = d.outcomes.find(method);
            if (it == d.outcomes.end() || !it->second.defined) {
                all_defined = false;
                break;
            }
            // Instance deltas are absent under dataset-level resampling;
            // those evaluations still provide the per-dataset F1 deltas.
            if (it->second.score_delta.size() != d.minority_rows.size()) {
                has_instance = false;
            } else if (has_instance) {
                for (std::size_t i = 0; i < d.minority_rows.size(); ++i) {
                    if (d.measures.instances[i].skipped) continue;
                    score_delta.push_back(it->second.score_delta[i]);
                }
            }
            f1_delta.push_back(it->second.f1_delta);
        }
        if (!all_defined) continue;
        defined_methods.push_back(method);
        if (has_instance) method_score_delta[method] = std::move(score_delta);
        method_f1_delta[method] = std::move(f1_delta);
    }

    std::vector<KSweepRow> rows(k_count);
    for (std::size_t ki = 0; ki < k_count; ++ki) {
        rows[ki].k = k_from + ki;
        std::vector<CorrelationValue> iflex, ifixed, dflex, dfixed;
        for (const RecoveryMethod method : defined_methods) {
            if (const auto sd = method_score_delta.find(method); sd != method_score_delta.end()) {
                iflex.push_back(detail::correlate(inst_flex[ki], sd->second));
                ifixed.push_back(detail::correlate(inst_fixed[ki], sd->second));
            }
            dflex.push_back(detail::correlate(bi3_flex[ki], method_f1_delta[method]));
            dfixed.push_back(detail::correlate(bi3_fixed[ki], method_f1_delta[method]));
        }
        rows[ki].instance_flexible = detail::average_defined(iflex);
        rows[ki].instance_fixed = detail::average_defined(ifixed);
        rows[ki].data_flexible = detail::average_defined(dflex);
        rows[ki].data_fixed = detail::average_defined(dfixed);
    }
    return rows;
}

}  // namespace bi3
