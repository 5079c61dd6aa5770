// Command line interface: measure | synth | experiment | sweep-k.
//
// Exit codes: 0 success, 1 usage error, 2 input/parse error, 3 computation
// precondition violation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bi3/bi3.hpp"

namespace {

namespace fs = std::filesystem;

void write_output(const std::string& target, const std::string& content) {
    if (target == "-") {
        std::cout << content;
        std::cout.flush();
        return;
    }
    std::ofstream out(target, std::ios::binary);
    if (!out) throw bi3::IoError("cannot open '" + target + "' for writing");
    out << content;
    if (!out) throw bi3::IoError("failed while writing '" + target + "'");
}

std::string detect_format(const std::string& format, const fs::path& path) {
    if (format != "auto") return format;
    const std::string ext = path.extension().string();
    if (ext == ".dat" || ext == ".arff") return "keel";
    return "csv";
}

bi3::Normalization parse_normalization(const std::string& name) {
    return name == "min_max" ? bi3::Normalization::min_max : bi3::Normalization::none;
}

std::vector<bi3::RecoveryMethod> parse_methods(const std::string& csv_list) {
    std::vector<bi3::RecoveryMethod> methods;
    std::size_t start = 0;
    while (start <= csv_list.size()) {
        const std::size_t comma = csv_list.find(',', start);
        const std::string token =
            csv_list.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!token.empty()) methods.push_back(bi3::recovery_from_name(token));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (methods.empty()) throw bi3::PreconditionError("no recovery methods given");
    return methods;
}

struct MeasureArgs {
    std::string input;
    std::string format = "auto";
    std::string label_column;
    int label_index = -1;
    bool no_header = false;
    std::size_t k0 = 5;
    bool no_flexible = false;
    std::string normalization = "none";
    std::size_t bins = 10;
    std::string cl_estimator = "histogram";
    std::size_t cm_k = 0;
    unsigned threads = 0;
    std::string output = "-";
    std::string output_format = "json";
};

bi3::LoadedDataset load_input(const std::string& input, const std::string& format,
                              const std::string& label_column, int label_index, bool no_header) {
    const std::string resolved = detect_format(format, input);
    if (resolved == "keel") return bi3::parse_keel_file(input);
    bi3::CsvOptions options;
    options.header = !no_header;
    if (!label_column.empty()) options.label_column = label_column;
    if (label_index >= 0) options.label_index = static_cast<std::size_t>(label_index);
    return bi3::parse_csv_file(input, options);
}

int run_measure(const MeasureArgs& args) {
    const bi3::LoadedDataset loaded =
        load_input(args.input, args.format, args.label_column, args.label_index, args.no_header);
    if (loaded.report.rows_dropped_missing > 0) {
        std::cerr << "note: dropped " << loaded.report.rows_dropped_missing
                  << " row(s) with missing values\n";
    }

    bi3::MeasureConfig config;
    config.k0 = args.k0;
    config.flexible = !args.no_flexible;
    config.metric.normalization = parse_normalization(args.normalization);
    config.cl_bins = args.bins;
    config.cl_estimator = args.cl_estimator == "gaussian" ? bi3::ClEstimator::gaussian
                                                          : bi3::ClEstimator::histogram;
    config.cm_k = args.cm_k;
    config.threads = bi3::resolve_threads(args.threads);

    const bi3::MeasureReport report =
        bi3::measure_dataset(loaded.dataset, loaded.stats, config);

    std::string content;
    if (args.output_format == "csv") {
        content = bi3::measure_report_csv(report);
    } else {
        nlohmann::json out = bi3::measure_report_json(report, fs::path(args.input).stem().string());
        out["load"] = bi3::load_report_json(loaded);
        content = out.dump(2) + "\n";
    }
    write_output(args.output, content);

    char line[160];
    std::snprintf(line, sizeof(line), "BI3=%.4f BI3_f=%.4f IR=%.2f minority=%zu rows=%zu\n",
                  report.bi3_flexible, report.bi3_fixed, report.imbalance_ratio,
                  loaded.stats.n_pos, loaded.dataset.rows());
    std::cerr << line;
    return 0;
}

struct SynthArgs {
    std::string family;
    std::size_t ir = 5;
    double dist = 2.0;
    double noise = 0.0;
    std::size_t n_pos = 100;
    std::uint64_t seed = 1;
    std::vector<double> cov_pos, cov_neg;
    std::string output = "synthetic";
};

int run_synth(const SynthArgs& args) {
    bi3::CovarianceSpec cov_pos, cov_neg;
    if (!args.cov_pos.empty() || !args.cov_neg.empty()) {
        if (args.cov_pos.size() != 3 || args.cov_neg.size() != 3) {
            throw bi3::PreconditionError("--cov-pos and --cov-neg each need v00,v01,v11");
        }
        cov_pos = bi3::CovarianceSpec{args.cov_pos[0], args.cov_pos[1], args.cov_pos[2]};
        cov_neg = bi3::CovarianceSpec{args.cov_neg[0], args.cov_neg[1], args.cov_neg[2]};
        if (!cov_pos.positive_definite() || !cov_neg.positive_definite()) {
            throw bi3::PreconditionError("covariance must be positive definite");
        }
    } else {
        bi3::Rng rng(bi3::mix_seed(args.seed, 0xc07));
        cov_pos = bi3::random_covariance(rng);
        cov_neg = bi3::random_covariance(rng);
    }

    const bi3::SynthResult result =
        args.family == "noise"
            ? bi3::gen_noise(args.ir, args.noise, cov_pos, cov_neg, args.seed, args.n_pos)
            : bi3::gen_overlap(args.ir, args.dist, cov_pos, cov_neg, args.seed, args.n_pos);

    const std::string csv_path = args.output + ".csv";
    const std::string json_path = args.output + ".json";
    write_output(csv_path, bi3::to_csv(result.dataset, "label"));
    write_output(json_path, bi3::synth_sidecar_json(result).dump(2) + "\n");
    std::cerr << "wrote " << csv_path << " and " << json_path << " (" << result.stats.n_pos
              << " positive, " << result.stats.n_neg << " negative)\n";
    return 0;
}

struct StudyArgs {
    std::string suite;
    std::string methods = "os,us,smote,sw";
    std::uint64_t seed = 1;
    std::size_t folds = 10;
    std::size_t runs = 5;
    std::size_t k0 = 5;
    std::size_t classifier_k = 5;
    std::size_t smote_k = 5;
    std::size_t bins = 10;
    std::string normalization = "none";
    std::string protocol = "fold";
    bool no_flexible = false;
    unsigned threads = 0;
    std::size_t cov_draws = 10;
    std::string output = "-";
    std::string csv_output;
    std::string dump_dir;
    std::size_t k_from = 2;  // sweep-k only
    std::size_t k_to = 50;
};

std::vector<bi3::NamedDataset> build_suite(const StudyArgs& args) {
    std::vector<bi3::NamedDataset> suite;
    if (args.suite == "syn_overlap" || args.suite == "syn_noise") {
        const bi3::SynthFamily family = args.suite == "syn_overlap" ? bi3::SynthFamily::overlap
                                                                    : bi3::SynthFamily::noise;
        for (bi3::SuiteDataset& d : bi3::synthetic_suite(family, args.seed, args.cov_draws)) {
            suite.push_back(bi3::NamedDataset{d.name, std::move(d.dataset), d.stats});
        }
        return suite;
    }
    if (args.suite.rfind("dir:", 0) != 0) {
        throw bi3::PreconditionError(
            "--suite must be syn_overlap, syn_noise or dir:PATH");
    }
    const fs::path dir = args.suite.substr(4);
    if (!fs::is_directory(dir)) throw bi3::IoError("'" + dir.string() + "' is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string ext = entry.path().extension().string();
        if (ext == ".dat" || ext == ".csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const fs::path& file : files) {
        try {
            bi3::LoadedDataset loaded = file.extension() == ".dat" ? bi3::parse_keel_file(file)
                                                                   : bi3::parse_csv_file(file);
            if (loaded.stats.n_pos < 2) {
                std::cerr << "skipping " << file.filename().string()
                          << ": fewer than two minority samples\n";
                continue;
            }
            suite.push_back(bi3::NamedDataset{file.stem().string(), std::move(loaded.dataset),
                                              loaded.stats});
        } catch (const bi3::Error& e) {
            std::cerr << "skipping " << file.filename().string() << ": " << e.what() << "\n";
        }
    }
    if (suite.empty()) throw bi3::IoError("no loadable dataset in '" + dir.string() + "'");
    return suite;
}

bi3::StudyConfig build_study_config(const StudyArgs& args) {
    bi3::StudyConfig config;
    config.measure.k0 = args.k0;
    config.measure.flexible = !args.no_flexible;
    config.measure.metric.normalization = parse_normalization(args.normalization);
    config.measure.cl_bins = args.bins;
    config.classifier_k = args.classifier_k;
    config.smote_k = args.smote_k;
    config.folds = args.folds;
    config.runs = args.runs;
    config.methods = parse_methods(args.methods);
    config.seed = args.seed;
    config.threads = bi3::resolve_threads(args.threads);
    if (args.protocol == "fold") {
        config.protocol = bi3::EvalProtocol::fold_resample;
    } else if (args.protocol == "dataset") {
        config.protocol = bi3::EvalProtocol::dataset_resample;
    } else {
        throw bi3::PreconditionError("--protocol must be fold or dataset");
    }
    return config;
}

void dump_resampled(const std::vector<bi3::NamedDataset>& suite, const bi3::StudyConfig& config,
                    const fs::path& dir) {
    fs::create_directories(dir);
    for (const bi3::NamedDataset& d : suite) {
        const std::uint64_t salt = bi3::dataset_salt(d.name);
        bi3::Rng plan_rng = bi3::fold_rng(config.seed, salt, 0);
        const bi3::FoldPlan plan = bi3::stratified_folds(d.dataset.labels(), config.folds, plan_rng);
        std::vector<std::uint8_t> in_test(d.dataset.rows(), 0);
        for (const std::size_t r : plan.folds[0]) in_test[r] = 1;
        std::vector<std::size_t> train_rows;
        for (std::size_t r = 0; r < d.dataset.rows(); ++r) {
            if (!in_test[r]) train_rows.push_back(r);
        }
        const bi3::TrainSet base = bi3::TrainSet::from_rows(d.dataset, train_rows);
        for (const bi3::RecoveryMethod method : config.methods) {
            bi3::Rng rng = bi3::method_rng(config.seed, salt, 0, 0, method);
            try {
                const bi3::TrainSet resampled =
                    bi3::apply_recovery(method, base, d.dataset.schema(), config.measure.metric,
                                        config.smote_k, rng);
                const fs::path file = dir / (d.name + "_" + bi3::recovery_name(method) + ".csv");
                write_output(file.string(),
                             bi3::train_set_csv(resampled, d.dataset.schema(),
                                                d.dataset.positive_name(),
                                                d.dataset.negative_name()));
            } catch (const bi3::PreconditionError& e) {
                std::cerr << "dump-resampled: " << d.name << "/" << bi3::recovery_name(method)
                          << " undefined: " << e.what() << "\n";
            }
        }
    }
}

void print_correlation_summary(const bi3::CorrelationReport& report) {
    for (const auto& [method, value] : report.instance) {
        std::cerr << "instance " << bi3::recovery_name(method) << ": ";
        if (value.defined) {
            char buffer[32];
            std::snprintf(buffer, sizeof(buffer), "%.4f", value.rho);
            std::cerr << buffer << " (" << value.pairs << " pairs)\n";
        } else {
            std::cerr << "undefined: " << value.note << "\n";
        }
    }
    for (const auto& [method, per_index] : report.data) {
        const auto it = per_index.find(bi3::DataIndexKind::bi3);
        if (it == per_index.end()) continue;
        std::cerr << "data " << bi3::recovery_name(method) << ": ";
        if (it->second.defined) {
            char buffer[32];
            std::snprintf(buffer, sizeof(buffer), "%.4f", it->second.rho);
            std::cerr << buffer << " (" << it->second.pairs << " datasets)\n";
        } else {
            std::cerr << "undefined: " << it->second.note << "\n";
        }
    }
}

int run_experiment(const StudyArgs& args) {
    const std::vector<bi3::NamedDataset> suite = build_suite(args);
    const bi3::StudyConfig config = build_study_config(args);
    const bi3::SuiteEvaluation eval = bi3::evaluate_suite(suite, config);
    const bi3::CorrelationReport correlations = bi3::correlation_report(eval);
    write_output(args.output, bi3::experiment_json(eval, correlations).dump(2) + "\n");
    if (!args.csv_output.empty()) {
        write_output(args.csv_output, bi3::suite_datasets_csv(eval));
    }
    if (!args.dump_dir.empty()) {
        dump_resampled(suite, config, args.dump_dir);
    }
    print_correlation_summary(correlations);
    return 0;
}

int run_sweep(const StudyArgs& args) {
    if (args.k_from < 1 || args.k_from > args.k_to) {
        throw CLI::ValidationError("--k-from must be in [1, --k-to]");
    }
    const std::vector<bi3::NamedDataset> suite = build_suite(args);
    const bi3::StudyConfig config = build_study_config(args);
    const bi3::SuiteEvaluation eval = bi3::evaluate_suite(suite, config);
    const std::vector<bi3::KSweepRow> rows =
        bi3::sweep_k(suite, eval, args.k_from, args.k_to, config.threads);
    write_output(args.output, bi3::sweep_csv(rows));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayes imbalance impact index toolkit"};
    app.require_subcommand(1);

    MeasureArgs measure_args;
    CLI::App* measure = app.add_subcommand(
        "measure", "Compute the imbalance impact index and comparison measures for one dataset");
    measure->add_option("--input", measure_args.input, "dataset file")->required();
    measure->add_option("--format", measure_args.format, "input format")
        ->check(CLI::IsMember({"auto", "keel", "csv"}))
        ->capture_default_str();
    measure->add_option("--label-column", measure_args.label_column,
                        "CSV label column name (default: last column)");
    measure->add_option("--label-index", measure_args.label_index, "CSV label column index");
    measure->add_flag("--no-header", measure_args.no_header, "CSV input has no header row");
    measure->add_option("--k0", measure_args.k0, "neighborhood size")->capture_default_str();
    measure->add_flag("--no-flexible", measure_args.no_flexible,
                      "use the fixed-size neighborhood variant for the headline index");
    measure->add_option("--normalize", measure_args.normalization, "feature normalization")
        ->check(CLI::IsMember({"none", "min_max"}))
        ->capture_default_str();
    measure->add_option("--bins", measure_args.bins, "likelihood histogram bins")
        ->capture_default_str();
    measure->add_option("--cl-estimator", measure_args.cl_estimator,
                        "class-likelihood estimator")
        ->check(CLI::IsMember({"histogram", "gaussian"}))
        ->capture_default_str();
    measure->add_option("--cm-k", measure_args.cm_k, "neighborhood size for the mixture measure (0: k0)");
    measure->add_option("--threads", measure_args.threads, "worker threads (0: hardware)");
    measure->add_option("--output", measure_args.output, "report path or - for stdout")
        ->capture_default_str();
    measure->add_option("--output-format", measure_args.output_format, "report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();

    SynthArgs synth_args;
    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic 2-D benchmark dataset");
    synth->add_option("family", synth_args.family, "dataset family")
        ->required()
        ->check(CLI::IsMember({"overlap", "noise"}));
    synth->add_option("--ir", synth_args.ir, "imbalance ratio")->capture_default_str();
    synth->add_option("--dist", synth_args.dist, "class mean distance (overlap family)")
        ->capture_default_str();
    synth->add_option("--noise", synth_args.noise, "label noise rate (noise family)")
        ->capture_default_str();
    synth->add_option("--n-pos", synth_args.n_pos, "minority size")->capture_default_str();
    synth->add_option("--seed", synth_args.seed, "generator seed")->capture_default_str();
    synth->add_option("--cov-pos", synth_args.cov_pos, "minority covariance v00,v01,v11")
        ->delimiter(',')
        ->expected(3);
    synth->add_option("--cov-neg", synth_args.cov_neg, "majority covariance v00,v01,v11")
        ->delimiter(',')
        ->expected(3);
    synth->add_option("--output", synth_args.output, "output basename (.csv and .json)")
        ->capture_default_str();

    auto add_study_options = [](CLI::App* cmd, StudyArgs& args) {
        cmd->add_option("--suite", args.suite, "syn_overlap | syn_noise | dir:PATH")->required();
        cmd->add_option("--methods", args.methods, "comma list of none|os|us|smote|sw")
            ->capture_default_str();
        cmd->add_option("--seed", args.seed, "master seed")->capture_default_str();
        cmd->add_option("--folds", args.folds, "cross-validation folds")->capture_default_str();
        cmd->add_option("--runs", args.runs, "cross-validation repetitions")->capture_default_str();
        cmd->add_option("--k0", args.k0, "index neighborhood size")->capture_default_str();
        cmd->add_option("--classifier-k", args.classifier_k, "classifier neighbors")
            ->capture_default_str();
        cmd->add_option("--smote-k", args.smote_k, "synthetic-oversampling neighbors")
            ->capture_default_str();
        cmd->add_option("--bins", args.bins, "likelihood histogram bins")->capture_default_str();
        cmd->add_option("--normalize", args.normalization, "feature normalization")
            ->check(CLI::IsMember({"none", "min_max"}))
            ->capture_default_str();
        cmd->add_option("--protocol", args.protocol,
                        "fold: resample training folds only (leak-free); dataset: resample "
                        "the whole dataset before dealing folds (inflates scores, matches "
                        "published reference results; no per-instance deltas)")
            ->check(CLI::IsMember({"fold", "dataset"}))
            ->capture_default_str();
        cmd->add_flag("--no-flexible", args.no_flexible,
                      "use the fixed-size neighborhood variant for the headline index");
        cmd->add_option("--threads", args.threads, "worker threads (0: hardware)");
        cmd->add_option("--cov-draws", args.cov_draws, "covariance pairs per synthetic cell")
            ->capture_default_str();
        cmd->add_option("--output", args.output, "report path or - for stdout")
            ->capture_default_str();
    };

    StudyArgs experiment_args;
    CLI::App* experiment = app.add_subcommand(
        "experiment", "Cross-validated recovery study with correlation report");
    add_study_options(experiment, experiment_args);
    experiment->add_option("--csv", experiment_args.csv_output, "also write a per-dataset CSV");
    experiment->add_option("--dump-resampled", experiment_args.dump_dir,
                           "dump the first resampled fold of each dataset to this directory");

    StudyArgs sweep_args;
    CLI::App* sweep = app.add_subcommand("sweep-k", "Correlations for a range of neighborhood sizes");
    add_study_options(sweep, sweep_args);
    sweep->add_option("--k-from", sweep_args.k_from, "first neighborhood size")
        ->capture_default_str();
    sweep->add_option("--k-to", sweep_args.k_to, "last neighborhood size")->capture_default_str();

    try {
        app.parse(argc, argv);
        if (app.got_subcommand(measure)) return run_measure(measure_args);
        if (app.got_subcommand(synth)) return run_synth(synth_args);
        if (app.got_subcommand(experiment)) return run_experiment(experiment_args);
        if (app.got_subcommand(sweep)) return run_sweep(sweep_args);
        std::cerr << "no subcommand given\n";
        return 1;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const bi3::PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const bi3::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
