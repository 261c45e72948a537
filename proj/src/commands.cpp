#include "stacksent/commands.hpp"

#include "stacksent/binary_io.hpp"
#include "stacksent/error.hpp"
#include "stacksent/random.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace stacksent {

namespace {

template <typename F>
auto in_stage(std::string_view stage, F&& body) -> decltype(body())
{
    try {
        return body();
    } catch (const Error& e) {
        throw Error(e.code(), std::string(stage) + ": " + e.message());
    }
}

std::string utc_now()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string hex64(std::uint64_t value)
{
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << value;
    return out.str();
}

void ensure_dir(const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorCode::Io, "cannot create output directory " + dir.string() + ": " + ec.message());
}

template <typename Writer>
void write_output(const std::filesystem::path& path, Writer&& writer)
{
    std::ostringstream out;
    writer(out);
    write_file_atomic(path, out.str());
}

std::vector<Label> labels_of(const std::vector<Document>& docs)
{
    std::vector<Label> y;
    y.reserve(docs.size());
    for (const auto& d : docs) y.push_back(*d.label);
    return y;
}

struct Dataset {
    LabeledCorpus corpus;
    std::optional<EmbeddingTable> embeddings;
};

Dataset load_dataset(const ExperimentConfig& config, bool need_embeddings, std::ostream& log)
{
    Dataset data;
    data.corpus = in_stage("load corpus", [&] {
        return preprocess(load_corpus(config.corpus, config.schema));
    });
    const auto& p = data.corpus.provenance;
    log << "corpus " << config.corpus.string() << ": " << data.corpus.size() << " documents ("
        << p.dropped_empty << " empty, " << p.dropped_duplicates << " duplicate rows dropped)\n";
    if (need_embeddings) {
        if (!config.embeddings)
            fail(ErrorCode::Config, "feature set tfidf+emb requires an embeddings file (--embeddings)");
        data.embeddings = in_stage("load embeddings", [&] { return load_embeddings(*config.embeddings); });
        log << "embeddings " << config.embeddings->string() << ": " << data.embeddings->size()
            << " rows, dim " << data.embeddings->dim() << ", encoder '" << data.embeddings->model_id()
            << "'\n";
    }
    return data;
}

struct SplitData {
    SplitPlan plan;
    std::vector<Document> train;
    std::vector<Document> test;
};

SplitData split_dataset(const ExperimentConfig& config, const LabeledCorpus& corpus)
{
    SplitData s;
    s.plan = in_stage("split", [&] {
        return split(corpus, config.test_fraction, config.split_seed, config.split_stratified);
    });
    for (std::size_t i : s.plan.train_indices) s.train.push_back(corpus.documents[i]);
    for (std::size_t i : s.plan.test_indices) s.test.push_back(corpus.documents[i]);
    return s;
}

const EmbeddingTable* table_of(const Dataset& data)
{
    return data.embeddings ? &*data.embeddings : nullptr;
}

void write_run_info(const std::filesystem::path& path,
                    const std::vector<std::pair<std::string, std::string>>& rows)
{
    write_output(path, [&](std::ostream& out) {
        out << "key\tvalue\n";
        for (const auto& [k, v] : rows) out << k << '\t' << v << '\n';
    });
}

std::optional<EmbeddingTable> maybe_embeddings(const std::optional<std::filesystem::path>& path,
                                               const FeaturePipeline& pipeline, std::ostream& log)
{
    if (!pipeline.needs_embeddings()) {
        if (path)
            log << "warning: bundle uses tfidf features; ignoring --embeddings " << path->string()
                << '\n';
        return std::nullopt;
    }
    if (!path)
        fail(ErrorCode::MissingEmbedding,
             "bundle uses tfidf+emb features; pass the embeddings file with --embeddings");
    return in_stage("load embeddings", [&] { return load_embeddings(*path); });
}

} // namespace

void write_predictions_tsv(std::ostream& out, const std::vector<Document>& docs,
                           const BundlePredictions& predictions)
{
    const bool labelled = !docs.empty() && std::all_of(docs.begin(), docs.end(),
                                                       [](const Document& d) { return d.label.has_value(); });
    out << "id\tpredicted\tp_negative\tp_neutral\tp_positive";
    if (labelled) out << "\ttrue";
    out << '\n';
    out << std::setprecision(17);
    for (std::size_t i = 0; i < docs.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        out << hex64(docs[i].id) << '\t' << label_name(predictions.labels[i]);
        for (int k = 0; k < kNumClasses; ++k) out << '\t' << predictions.probs(r, k);
        if (labelled) out << '\t' << label_name(*docs[i].label);
        out << '\n';
    }
}

std::pair<std::vector<Label>, std::vector<Label>> read_predictions_tsv(const std::filesystem::path& path)
{
    std::istringstream in(read_file(path));
    std::string line;
    std::getline(in, line);
    if (line.find("\ttrue") == std::string::npos)
        fail(ErrorCode::MissingColumn, path.string() + " has no true-label column");
    std::vector<Label> predicted, truth;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream row(line);
        std::string cell;
        while (std::getline(row, cell, '\t')) cells.push_back(cell);
        if (cells.size() != 6) fail(ErrorCode::Malformed, "prediction row with " + std::to_string(cells.size()) + " cells");
        const auto p = parse_label(cells[1]);
        const auto t = parse_label(cells[5]);
        if (!p || !t) fail(ErrorCode::UnknownLabel, "unreadable label in " + path.string());
        predicted.push_back(*p);
        truth.push_back(*t);
    }
    return {predicted, truth};
}

TrainOutcome cmd_train(const ExperimentConfig& config, std::ostream& log)
{
    const std::string started = utc_now();
    config.validate();
    const bool need_embeddings = config.features.feature_set == FeatureSet::TfidfEmbeddings;
    const Dataset data = load_dataset(config, need_embeddings, log);
    const SplitData s = split_dataset(config, data.corpus);
    log << "split: " << s.train.size() << " train / " << s.test.size() << " test (seed "
        << config.split_seed << ")\n";

    const auto pipeline = in_stage("features", [&] {
        return fit_pipeline(s.train, config.features, table_of(data));
    });
    const Eigen::MatrixXd X_train = in_stage("features", [&] { return pipeline.transform(s.train, table_of(data)); });
    const auto y_train = labels_of(s.train);
    log << "features: " << feature_set_name(pipeline.feature_set) << ", dim " << pipeline.dim() << '\n';

    log << "training " << model_kind_name(config.model) << "...\n";
    Classifier model = in_stage("train", [&] {
        return train_classifier(config.model, X_train, y_train, config.hyperparams, config.train_seed);
    });

    TrainOutcome outcome;
    outcome.bundle.pipeline = pipeline;
    outcome.bundle.model = std::move(model);
    outcome.bundle.config_ini = to_ini(config);
    auto& prov = outcome.bundle.provenance;
    prov.config_hash = fnv1a64(outcome.bundle.config_ini);
    prov.split_seed = config.split_seed;
    prov.folds_seed = config.folds_seed;
    prov.train_seed = config.train_seed;
    prov.corpus_fingerprint = corpus_fingerprint(data.corpus.documents);
    prov.embedding_model_id = pipeline.embedding_model_id;
    prov.train_rows = s.train.size();
    prov.test_rows = s.test.size();

    const auto predictions = in_stage("evaluate", [&] {
        return predict_bundle(outcome.bundle, s.test, table_of(data));
    });
    outcome.test_metrics = compute_metrics(labels_of(s.test), predictions.labels);

    ensure_dir(config.out_dir);
    outcome.bundle_path = config.out_dir / files::kBundle;
    const std::string bytes = serialize_bundle(outcome.bundle);
    in_stage("write bundle", [&] { write_file_atomic(outcome.bundle_path, bytes); });
    write_file_atomic(config.out_dir / files::kConfigUsed, outcome.bundle.config_ini);
    write_output(config.out_dir / files::kTestReport, [&](std::ostream& out) {
        write_classification_report(out, outcome.test_metrics,
                                    std::string(model_display_name(config.model)) + " (" +
                                        std::string(feature_set_name(pipeline.feature_set)) +
                                        "), held-out test split",
                                    config.averaging);
    });
    write_output(config.out_dir / files::kTestMetrics,
                 [&](std::ostream& out) { write_metrics_tsv(out, outcome.test_metrics); });
    write_output(config.out_dir / files::kTestPredictions,
                 [&](std::ostream& out) { write_predictions_tsv(out, s.test, predictions); });
    write_run_info(config.out_dir / files::kRunInfo,
                   {{"command", "train"},
                    {"started_utc", started},
                    {"finished_utc", utc_now()},
                    {"config_hash", hex64(prov.config_hash)},
                    {"bundle_fnv1a64", hex64(fnv1a64(bytes))},
                    {"corpus_fingerprint", hex64(prov.corpus_fingerprint)},
                    {"model", std::string(model_kind_name(config.model))},
                    {"feature_set", std::string(feature_set_name(pipeline.feature_set))},
                    {"train_rows", std::to_string(prov.train_rows)},
                    {"test_rows", std::to_string(prov.test_rows)}});
    log << "test accuracy " << std::fixed << std::setprecision(4) << outcome.test_metrics.accuracy
        << std::defaultfloat << "\nbundle written to " << outcome.bundle_path.string() << '\n';
    return outcome;
}

MetricsReport cmd_evaluate(const EvaluateRequest& request, std::ostream& log)
{
    const ModelBundle bundle = in_stage("load bundle", [&] { return load_bundle(request.bundle); });
    if (request.features && *request.features != bundle.pipeline.feature_set)
        fail(ErrorCode::FeatureSetMismatch,
             "bundle was trained on " + std::string(feature_set_name(bundle.pipeline.feature_set)) +
                 " features, not " + std::string(feature_set_name(*request.features)));
    const auto corpus = in_stage("load corpus", [&] {
        return preprocess(load_corpus(request.corpus, request.schema));
    });
    const auto table = maybe_embeddings(request.embeddings, bundle.pipeline, log);
    const auto predictions = in_stage("predict", [&] {
        return predict_bundle(bundle, corpus.documents, table ? &*table : nullptr);
    });
    const MetricsReport report = compute_metrics(labels_of(corpus.documents), predictions.labels);

    ensure_dir(request.out_dir);
    write_output(request.out_dir / files::kEvalReport, [&](std::ostream& out) {
        write_classification_report(out, report,
                                    std::string(model_display_name(bundle.kind())) + " (" +
                                        std::string(feature_set_name(bundle.pipeline.feature_set)) +
                                        ") on " + request.corpus.filename().string(),
                                    request.averaging);
    });
    write_output(request.out_dir / files::kEvalMetrics,
                 [&](std::ostream& out) { write_metrics_tsv(out, report); });
    write_output(request.out_dir / files::kEvalPredictions,
                 [&](std::ostream& out) { write_predictions_tsv(out, corpus.documents, predictions); });
    log << "evaluated " << corpus.size() << " documents: accuracy " << std::fixed
        << std::setprecision(4) << report.accuracy << std::defaultfloat << '\n';
    return report;
}

std::size_t cmd_predict(const PredictRequest& request, std::ostream& out, std::ostream& log)
{
    if (request.input.has_value() == request.text.has_value())
        fail(ErrorCode::Config, "predict needs exactly one of an input file or --text");
    const ModelBundle bundle = in_stage("load bundle", [&] { return load_bundle(request.bundle); });
    if (request.features && *request.features != bundle.pipeline.feature_set)
        fail(ErrorCode::FeatureSetMismatch,
             "bundle was trained on " + std::string(feature_set_name(bundle.pipeline.feature_set)) +
                 " features, not " + std::string(feature_set_name(*request.features)));

    std::vector<Document> docs;
    if (request.text) {
        const std::string normalized = normalize_text(*request.text);
        if (normalized.empty()) fail(ErrorCode::InvalidArgument, "--text is empty");
        docs.push_back(Document{document_id(normalized), normalized, std::nullopt});
    } else {
        const std::string raw = in_stage("read input", [&] { return read_file(*request.input); });
        if (raw.find_first_not_of(" \t\r\n") != std::string::npos) {
            auto corpus = in_stage("load input", [&] {
                return preprocess_unlabeled(load_corpus(*request.input, request.schema, false));
            });
            docs = std::move(corpus.documents);
        }
    }

    BundlePredictions predictions;
    predictions.probs.resize(0, kNumClasses);
    if (docs.empty()) {
        if (request.embeddings && !bundle.pipeline.needs_embeddings())
            log << "warning: bundle uses tfidf features; ignoring --embeddings\n";
    } else {
        const auto table = maybe_embeddings(request.embeddings, bundle.pipeline, log);
        predictions = in_stage("predict", [&] {
            return predict_bundle(bundle, docs, table ? &*table : nullptr);
        });
    }
    write_predictions_tsv(out, docs, predictions);
    return docs.size();
}

GridResult cmd_grid_search(const ExperimentConfig& config, std::ostream& log)
{
    config.validate();
    if (config.grid.axes.empty()) fail(ErrorCode::Config, "no [grid] section in the config");
    validate_grid(config.grid, config.model);
    const bool need_embeddings = config.features.feature_set == FeatureSet::TfidfEmbeddings;
    const Dataset data = load_dataset(config, need_embeddings, log);
    const SplitData s = split_dataset(config, data.corpus);
    const auto y_train = labels_of(s.train);
    const FoldPlan plan = in_stage("folds", [&] {
        return make_folds(y_train, config.folds, config.folds_stratified, config.folds_seed);
    });
    const auto folds = in_stage("features", [&] {
        return fold_data(s.train, plan, config.features, table_of(data));
    });
    log << "grid: " << config.grid.cell_count() << " cells x " << config.folds << " folds on "
        << s.train.size() << " training documents\n";

    BaseFitCache cache;
    GridOptions options;
    options.cv.seed = config.train_seed;
    options.cv.averaging = config.averaging;
    options.cv.cache = &cache;
    options.metric = config.grid_metric;
    const auto started = std::chrono::steady_clock::now();
    options.on_cell = [&](std::size_t c, std::size_t n) {
        if ((c + 1) % 10 == 0 || c + 1 == n) {
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            log << "  cell " << c + 1 << "/" << n << " (" << std::fixed << std::setprecision(1) << secs
                << std::defaultfloat << " s)\n";
        }
    };
    const GridResult result = in_stage("grid search", [&] {
        return grid_search(config.grid, config.model, config.hyperparams, folds, options);
    });

    ExperimentConfig best = config;
    best.hyperparams = result.best_hyperparams(config.hyperparams);
    best.grid = {};

    ensure_dir(config.out_dir);
    write_output(config.out_dir / files::kGridCells, [&](std::ostream& out) { write_grid_tsv(out, result); });
    write_file_atomic(config.out_dir / files::kGridBest, to_ini(best));
    write_output(config.out_dir / files::kGridSummary, [&](std::ostream& out) {
        const auto& cell = result.best_cell();
        out << "Grid search: " << model_display_name(config.model) << ", " << result.cells.size()
            << " cells, " << config.folds << "-fold "
            << (config.folds_stratified ? "stratified" : "plain") << " CV on the training split\n";
        out << "Best cell " << result.best << (result.tie ? " (tied; first in enumeration order)" : "")
            << ":\n";
        for (const auto& [key, value] : cell.params) out << "  " << key << " = " << value << '\n';
        out << std::fixed << std::setprecision(4) << "  mean accuracy " << cell.cv.accuracy.mean
            << " (sd " << cell.cv.accuracy.stdev << "), mean F1 " << cell.cv.f1.mean << '\n';
    });
    write_run_info(config.out_dir / files::kRunInfo,
                   {{"command", "grid-search"},
                    {"finished_utc", utc_now()},
                    {"config_hash", hex64(config_hash(config))},
                    {"cells", std::to_string(result.cells.size())},
                    {"best_cell", std::to_string(result.best)},
                    {"tie", result.tie ? "true" : "false"}});
    log << "best cell " << result.best << ", score " << result.best_cell().score << "; config in "
        << (config.out_dir / files::kGridBest).string() << '\n';
    return result;
}

std::vector<ComparisonRow> cmd_compare(const ExperimentConfig& config, std::ostream& log)
{
    config.validate();
    bool need_embeddings = false;
    for (FeatureSet set : config.compare_features) need_embeddings |= set == FeatureSet::TfidfEmbeddings;
    if (need_embeddings && !config.embeddings)
        fail(ErrorCode::Config, "comparing tfidf+emb requires an embeddings file (--embeddings)");
    const Dataset data = load_dataset(config, need_embeddings, log);
    const SplitData s = split_dataset(config, data.corpus);
    const auto y_train = labels_of(s.train);
    const auto y_test = labels_of(s.test);

    std::vector<ComparisonRow> rows;
    for (FeatureSet set : config.compare_features) {
        PipelineOptions options = config.features;
        options.feature_set = set;
        std::optional<FeaturePipeline> pipeline;
        Eigen::MatrixXd X_train, X_test;
        std::string pipeline_error;
        try {
            pipeline = fit_pipeline(s.train, options, table_of(data));
            X_train = pipeline->transform(s.train, table_of(data));
            X_test = pipeline->transform(s.test, table_of(data));
        } catch (const Error& e) {
            pipeline_error = std::string("features: ") + e.what();
        }
        for (ModelKind kind : config.compare_models) {
            ComparisonRow row;
            row.kind = kind;
            row.feature_set = set;
            row.split_seed = config.split_seed;
            const auto t0 = std::chrono::steady_clock::now();
            if (!pipeline) {
                row.error = pipeline_error;
            } else {
                try {
                    const auto model = train_classifier(kind, X_train, y_train, config.hyperparams,
                                                        config.train_seed);
                    row.metrics = compute_metrics(y_test, predict_labels(model, X_test));
                    row.ok = true;
                } catch (const Error& e) {
                    row.error = e.what();
                }
            }
            row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            log << "  " << model_kind_name(kind) << " / " << feature_set_name(set) << ": ";
            if (row.ok)
                log << "accuracy " << std::fixed << std::setprecision(4) << row.metrics.accuracy
                    << std::defaultfloat << " (" << std::setprecision(3) << row.seconds << " s)\n";
            else
                log << "FAILED " << row.error << '\n';
            rows.push_back(std::move(row));
        }
    }

    ensure_dir(config.out_dir);
    write_output(config.out_dir / files::kComparison, [&](std::ostream& out) {
        out << "Model comparison on a shared split (seed " << config.split_seed << ", "
            << s.train.size() << " train / " << s.test.size() << " test)\n";
        write_comparison_table(out, rows, config.averaging);
    });
    write_output(config.out_dir / files::kComparisonTsv,
                 [&](std::ostream& out) { write_comparison_tsv(out, rows, config.averaging); });
    write_output(config.out_dir / files::kPlotData, [&](std::ostream& out) { write_plot_data(out, rows); });
    write_run_info(config.out_dir / files::kRunInfo, {{"command", "compare"},
                                                      {"finished_utc", utc_now()},
                                                      {"config_hash", hex64(config_hash(config))},
                                                      {"split_seed", std::to_string(config.split_seed)}});
    return rows;
}

CvResult cmd_folds(const ExperimentConfig& config, std::ostream& log)
{
    config.validate();
    const bool need_embeddings = config.features.feature_set == FeatureSet::TfidfEmbeddings;
    const Dataset data = load_dataset(config, need_embeddings, log);
    const auto y = data.corpus.labels();
    const FoldPlan plan = in_stage("folds", [&] {
        return make_folds(y, config.folds, config.folds_stratified, config.folds_seed);
    });
    const auto folds = in_stage("features", [&] {
        return fold_data(data.corpus.documents, plan, config.features, table_of(data));
    });
    CvOptions options;
    options.seed = config.train_seed;
    options.averaging = config.averaging;
    const CvResult cv = in_stage("cross-validate", [&] {
        return cross_validate(config.model, config.hyperparams, folds, options);
    });

    ensure_dir(config.out_dir);
    write_output(config.out_dir / files::kFolds, [&](std::ostream& out) {
        out << "id\tlabel\tfold\n";
        for (std::size_t i = 0; i < plan.indices.size(); ++i) {
            const auto& d = data.corpus.documents[plan.indices[i]];
            out << hex64(d.id) << '\t' << label_name(*d.label) << '\t' << plan.assignments[i] << '\n';
        }
    });
    write_output(config.out_dir / files::kCvFolds, [&](std::ostream& out) {
        out << "fold\taccuracy\tprecision\trecall\tf1\tsupport\n" << std::setprecision(17);
        for (std::size_t f = 0; f < cv.folds.size(); ++f) {
            const auto& m = cv.folds[f];
            const auto& avg = averaged(m, config.averaging);
            out << f << '\t' << m.accuracy << '\t' << avg.precision << '\t' << avg.recall << '\t'
                << avg.f1 << '\t' << m.total() << '\n';
        }
    });
    write_output(config.out_dir / files::kCvSummary, [&](std::ostream& out) {
        out << model_display_name(config.model) << " (" << feature_set_name(config.features.feature_set)
            << "), " << config.folds << "-fold " << (config.folds_stratified ? "stratified" : "plain")
            << " cross-validation, " << data.corpus.size() << " documents\n";
        out << std::fixed << std::setprecision(2);
        out << "Accuracy  " << cv.accuracy.mean << " +/- " << cv.accuracy.stdev << '\n'
            << "Precision " << cv.precision.mean << " +/- " << cv.precision.stdev << '\n'
            << "Recall    " << cv.recall.mean << " +/- " << cv.recall.stdev << '\n'
            << "F1-score  " << cv.f1.mean << " +/- " << cv.f1.stdev << '\n';
    });
    log << "cross-validated accuracy " << std::fixed << std::setprecision(4) << cv.accuracy.mean
        << " (sd " << cv.accuracy.stdev << ")" << std::defaultfloat << '\n';
    return cv;
}

void cmd_make_benchmark(const SyntheticOptions& options, const std::filesystem::path& csv_path,
                        const std::filesystem::path& emb_path, std::ostream& log)
{
    const auto corpus = generate_synthetic(options);
    for (const auto& path : {csv_path, emb_path})
        if (path.has_parent_path()) ensure_dir(path.parent_path());
    write_synthetic(corpus, csv_path, emb_path);
    log << "wrote " << corpus.raw.size() << " rows to " << csv_path.string() << " and "
        << corpus.embeddings.size() << " embeddings to " << emb_path.string() << '\n';
}

} // namespace stacksent
