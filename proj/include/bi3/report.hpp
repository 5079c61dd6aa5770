#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "bi3/csv.hpp"
#include "bi3/eval.hpp"
#include "bi3/loading.hpp"
#include "bi3/measures.hpp"
#include "bi3/synth.hpp"

namespace bi3 {

inline constexpr int kReportSchemaVersion = 1;

inline std::string normalization_name(Normalization n) {
    return n == Normalization::min_max ? "min_max" : "none";
}

inline std::string cl_estimator_name(ClEstimator e) {
    return e == ClEstimator::gaussian ? "gaussian" : "histogram";
}

inline nlohmann::json load_report_json(const LoadedDataset& loaded) {
    nlohmann::json columns = nlohmann::json::array();
    for (const Column& c : loaded.dataset.schema().columns()) {
        columns.push_back({{"name", c.name},
                           {"kind", c.kind == ColumnKind::nominal ? "nominal" : "numeric"}});
    }
    return nlohmann::json{{"schema", kReportSchemaVersion},
                          {"rows_read", loaded.report.rows_read},
                          {"rows_dropped_missing", loaded.report.rows_dropped_missing},
                          {"n_pos", loaded.stats.n_pos},
                          {"n_neg", loaded.stats.n_neg},
                          {"ir", loaded.stats.imbalance_ratio},
                          {"positive_class", loaded.dataset.positive_name()},
                          {"negative_class", loaded.dataset.negative_name()},
                          {"columns", columns}};
}

inline nlohmann::json measure_report_json(const MeasureReport& report,
                                          const std::string& dataset_name = "") {
    nlohmann::json instances = nlohmann::json::array();
    for (const InstanceMeasure& rec : report.instances) {
        instances.push_back({{"index", rec.index},
                             {"ibi3", rec.ibi3},
                             {"ibi3_flexible", rec.ibi3_flexible},
                             {"ibi3_fixed", rec.ibi3_fixed},
                             {"kdn", rec.kdn},
                             {"cl", rec.cl},
                             {"majority_count", rec.majority_count},
                             {"k", rec.k},
                             {"flexible_applied", rec.flexible_applied},
                             {"skipped", rec.skipped}});
    }
    nlohmann::json out{{"schema", kReportSchemaVersion},
                       {"k0", report.config.k0},
                       {"normalization", normalization_name(report.config.metric.normalization)},
                       {"flexible", report.config.flexible},
                       {"cl_bins", report.config.cl_bins},
                       {"cl_estimator", cl_estimator_name(report.config.cl_estimator)},
                       {"ir", report.imbalance_ratio},
                       {"bi3", report.bi3},
                       {"bi3_flexible", report.bi3_flexible},
                       {"bi3_fixed", report.bi3_fixed},
                       {"mean_kdn", report.mean_kdn},
                       {"mean_cl", report.mean_cl},
                       {"cm", report.cm},
                       {"skipped", report.skipped},
                       {"instances", instances}};
    if (!dataset_name.empty()) out["dataset"] = dataset_name;
    return out;
}

// Flat per-instance table with one trailing summary row.
inline std::string measure_report_csv(const MeasureReport& report) {
    std::string out =
        "row,ibi3,ibi3_flexible,ibi3_fixed,kdn,cl,majority_count,k,flexible_applied,skipped\n";
    for (const InstanceMeasure& rec : report.instances) {
        out += std::to_string(rec.index) + ',' + format_double(rec.ibi3) + ',' +
               format_double(rec.ibi3_flexible) + ',' + format_double(rec.ibi3_fixed) + ',' +
               format_double(rec.kdn) + ',' + format_double(rec.cl) + ',' +
               std::to_string(rec.majority_count) + ',' + std::to_string(rec.k) + ',' +
               (rec.flexible_applied ? "1" : "0") + ',' + (rec.skipped ? "1" : "0") + '\n';
    }
    out += "mean," + format_double(report.bi3) + ',' + format_double(report.bi3_flexible) + ',' +
           format_double(report.bi3_fixed) + ',' + format_double(report.mean_kdn) + ',' +
           format_double(report.mean_cl) + ",,,,\n";
    return out;
}

inline nlohmann::json covariance_json(const CovarianceSpec& cov) {
    return nlohmann::json{{"v00", cov.v00}, {"v01", cov.v01}, {"v11", cov.v11}};
}

inline nlohmann::json synth_sidecar_json(const SynthResult& result) {
    return nlohmann::json{
        {"schema", kReportSchemaVersion},
        {"family", result.spec.family == SynthFamily::overlap ? "overlap" : "noise"},
        {"n_pos", result.stats.n_pos},
        {"n_neg", result.stats.n_neg},
        {"ir", result.spec.ir},
        {"dist", result.spec.dist},
        {"noise_rate", result.spec.noise_rate},
        {"seed", result.spec.seed},
        {"cov_pos", covariance_json(result.spec.cov_pos)},
        {"cov_neg", covariance_json(result.spec.cov_neg)},
        {"flipped_to_negative", result.flipped_to_negative},
        {"flipped_to_positive", result.flipped_to_positive}};
}

inline nlohmann::json correlation_value_json(const CorrelationValue& value) {
    nlohmann::json out{{"defined", value.defined}, {"pairs", value.pairs}};
    if (value.defined) {
        out["rho"] = value.rho;
    } else {
        out["note"] = value.note;
    }
    return out;
}

inline nlohmann::json correlation_report_json(const CorrelationReport& report) {
    nlohmann::json instance = nlohmann::json::object();
    for (const auto& [method, value] : report.instance) {
        instance[recovery_name(method)] = correlation_value_json(value);
    }
    nlohmann::json data = nlohmann::json::object();
    for (const auto& [method, per_index] : report.data) {
        nlohmann::json entry = nlohmann::json::object();
        for (const auto& [kind, value] : per_index) {
            entry[data_index_name(kind)] = correlation_value_json(value);
        }
        data[recovery_name(method)] = entry;
    }
    return nlohmann::json{{"schema", kReportSchemaVersion},
                          {"instance_level", instance},
                          {"data_level", data}};
}

inline nlohmann::json dataset_evaluation_json(const DatasetEvaluation& d) {
    nlohmann::json methods = nlohmann::json::object();
    for (const auto& [method, outcome] : d.outcomes) {
        nlohmann::json entry{{"defined", outcome.defined}};
        if (outcome.defined) {
            entry["f1_delta"] = outcome.f1_delta;
        } else {
            entry["failure"] = outcome.failure;
        }
        methods[recovery_name(method)] = entry;
    }
    return nlohmann::json{{"name", d.name},
                          {"rows", d.rows},
                          {"ir", d.measures.imbalance_ratio},
                          {"bi3", d.measures.bi3},
                          {"bi3_flexible", d.measures.bi3_flexible},
                          {"bi3_fixed", d.measures.bi3_fixed},
                          {"mean_kdn", d.measures.mean_kdn},
                          {"mean_cl", d.measures.mean_cl},
                          {"cm", d.measures.cm},
                          {"f1_baseline", d.f1_baseline},
                          {"fold_reduced", d.fold_reduced},
                          {"methods", methods}};
}

inline nlohmann::json experiment_json(const SuiteEvaluation& suite,
                                      const CorrelationReport& correlations) {
    nlohmann::json datasets = nlohmann::json::array();
    for (const DatasetEvaluation& d : suite.datasets) {
        datasets.push_back(dataset_evaluation_json(d));
    }
    nlohmann::json methods = nlohmann::json::array();
    for (const RecoveryMethod m : suite.config.methods) methods.push_back(recovery_name(m));
    return nlohmann::json{
        {"schema", kReportSchemaVersion},
        {"config",
         {{"k0", suite.config.measure.k0},
          {"normalization", normalization_name(suite.config.measure.metric.normalization)},
          {"classifier_k", suite.config.classifier_k},
          {"smote_k", suite.config.smote_k},
          {"folds", suite.config.folds},
          {"runs", suite.config.runs},
          {"seed", suite.config.seed},
          {"protocol", protocol_name(suite.config.protocol)},
          {"methods", methods}}},
        {"datasets", datasets},
        {"correlations", correlation_report_json(correlations)}};
}

// One row per dataset; handy for plotting index values against F1 changes.
inline std::string suite_datasets_csv(const SuiteEvaluation& suite) {
    std::string out = "name,rows,ir,bi3,bi3_flexible,bi3_fixed,mean_kdn,mean_cl,cm,f1_baseline";
    for (const RecoveryMethod m : suite.config.methods) {
        out += ",f1_delta_" + recovery_name(m);
    }
    out += '\n';
    for (const DatasetEvaluation& d : suite.datasets) {
        out += d.name + ',' + std::to_string(d.rows) + ',' +
               format_double(d.measures.imbalance_ratio) + ',' + format_double(d.measures.bi3) +
               ',' + format_double(d.measures.bi3_flexible) + ',' +
               format_double(d.measures.bi3_fixed) + ',' + format_double(d.measures.mean_kdn) +
               ',' + format_double(d.measures.mean_cl) + ',' + format_double(d.measures.cm) + ',' +
               format_double(d.f1_baseline);
        for (const RecoveryMethod m : suite.config.methods) {
            const auto it = d.outcomes.find(m);
            out += ',';
            if (it != d.outcomes.end() && it->second.defined) {
                out += format_double(it->second.f1_delta);
            }
        }
        out += '\n';
    }
    return out;
}

// Resampled fold dump: feature columns, label, weight, provenance and the
// original dataset row each training row came from (empty for synthetic).
inline std::string train_set_csv(const TrainSet& train, const FeatureSchema& schema,
                                 const std::string& positive_name,
                                 const std::string& negative_name) {
    std::string out;
    for (const Column& c : schema.columns()) {
        out += detail::csv_quote(c.name);
        out += ',';
    }
    out += "class,weight,provenance,source_row\n";
    for (std::size_t r = 0; r < train.rows(); ++r) {
        for (std::size_t c = 0; c < train.cols; ++c) {
            if (schema.is_nominal(c)) {
                const auto cat = static_cast<std::size_t>(train.row(r)[c]);
                out += detail::csv_quote(schema.column(c).categories.at(cat));
            } else {
                out += format_double(train.row(r)[c]);
            }
            out += ',';
        }
        out += detail::csv_quote(train.labels[r] == 1 ? positive_name : negative_name);
        out += ',';
        out += format_double(train.weights[r]);
        out += ',';
        switch (train.provenance[r]) {
            case Provenance::original: out += "original"; break;
            case Provenance::duplicated: out += "duplicated"; break;
            case Provenance::synthetic: out += "synthetic"; break;
        }
        out += ',';
        if (train.source_rows[r] != TrainSet::no_source) {
            out += std::to_string(train.source_rows[r]);
        }
        out += '\n';
    }
    return out;
}

inline std::string sweep_csv(const std::vector<KSweepRow>& rows) {
    std::string out = "k,instance_flexible,instance_fixed,data_flexible,data_fixed\n";
    auto cell = [](const CorrelationValue& v) { return v.defined ? format_double(v.rho) : ""; };
    for (const KSweepRow& row : rows) {
        out += std::to_string(row.k) + ',' + cell(row.instance_flexible) + ',' +
               cell(row.instance_fixed) + ',' + cell(row.data_flexible) + ',' +
               cell(row.data_fixed) + '\n';
    }
    return out;
}

}  // namespace bi3
