// stacksent: train, evaluate and compare the sentiment models from the
// command line. Run `stacksent <command> --help` for the flags of each
// command.

#include "stacksent/binary_io.hpp"
#include "stacksent/commands.hpp"
#include "stacksent/error.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace stacksent;

namespace {

// Flags shared by the config-driven commands; unset flags leave the config
// file (or built-in defaults) alone.
struct ExperimentFlags {
    std::string config;
    std::string corpus;
    std::string embeddings;
    std::string features;
    std::string model;
    std::optional<std::uint64_t> seed;
    std::optional<double> test_fraction;
    std::optional<int> folds;
    std::optional<bool> stratified;
    std::string out_dir;
    std::vector<std::string> params;
    std::string text_col;
    std::string label_col;
    bool use_paper_grid = false;

    void attach(CLI::App& cmd)
    {
        cmd.add_option("--config", config, "INI experiment config");
        cmd.add_option("--corpus", corpus, "labelled CSV corpus");
        cmd.add_option("--embeddings", embeddings, "EMB1 embeddings file");
        cmd.add_option("--features", features, "tfidf or tfidf+emb");
        cmd.add_option("--model", model, "logreg, knn, bagged_gbdt, adaboost or cse");
        cmd.add_option("--seed", seed, "seed for the split, folds and training");
        cmd.add_option("--test-fraction", test_fraction, "held-out fraction");
        cmd.add_option("--folds", folds, "number of cross-validation folds");
        cmd.add_option("--stratified", stratified, "stratify split and folds (true/false)");
        cmd.add_option("--out-dir", out_dir, "output directory");
        cmd.add_option("--param", params, "hyperparameter override key=value (repeatable)");
        cmd.add_option("--text-col", text_col, "text column name");
        cmd.add_option("--label-col", label_col, "label column name");
    }

    ExperimentConfig resolve() const
    {
        ExperimentConfig c = config.empty() ? ExperimentConfig{} : load_config(config);
        if (!corpus.empty()) c.corpus = corpus;
        if (!embeddings.empty()) c.embeddings = embeddings;
        if (!features.empty()) c.features.feature_set = parse_feature_set(features);
        if (!model.empty()) {
            try {
                c.model = parse_model_kind(model);
            } catch (const Error& e) {
                fail(ErrorCode::Config, e.message());
            }
        }
        if (seed) c.set_seed(*seed);
        if (test_fraction) c.test_fraction = *test_fraction;
        if (folds) c.folds = *folds;
        if (stratified) c.split_stratified = c.folds_stratified = *stratified;
        if (!out_dir.empty()) c.out_dir = out_dir;
        if (!text_col.empty()) c.schema.text_column = text_col;
        if (!label_col.empty()) c.schema.label_column = label_col;
        for (const auto& p : params) apply_param_override(c, p);
        if (use_paper_grid) c.grid = paper_grid();
        return c;
    }
};

std::optional<FeatureSet> optional_features(const std::string& text)
{
    if (text.empty()) return std::nullopt;
    return parse_feature_set(text);
}

std::optional<std::filesystem::path> optional_path(const std::string& text)
{
    if (text.empty()) return std::nullopt;
    return std::filesystem::path(text);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Stacked-ensemble sentiment classification (TF-IDF and embedding features)"};
    app.require_subcommand(1);

    ExperimentFlags train_flags, grid_flags, compare_flags, folds_flags;
    auto* train = app.add_subcommand("train", "train one model and write a bundle plus test report");
    train_flags.attach(*train);

    auto* grid = app.add_subcommand("grid-search", "cross-validated grid search on the training split");
    grid_flags.attach(*grid);
    grid->add_flag("--paper-grid", grid_flags.use_paper_grid, "use the full 972-cell published grid");

    auto* compare = app.add_subcommand("compare", "all models x feature sets on one split");
    compare_flags.attach(*compare);

    auto* folds = app.add_subcommand("folds", "k-fold cross-validation over the whole corpus");
    folds_flags.attach(*folds);

    EvaluateRequest eval_request;
    std::string eval_bundle, eval_corpus, eval_embeddings, eval_features, eval_out = "out";
    std::string eval_text_col = "text", eval_label_col = "label";
    auto* evaluate = app.add_subcommand("evaluate", "score a bundle on a labelled corpus");
    evaluate->add_option("--bundle", eval_bundle, "model bundle")->required();
    evaluate->add_option("--corpus", eval_corpus, "labelled CSV corpus")->required();
    evaluate->add_option("--embeddings", eval_embeddings, "EMB1 embeddings file");
    evaluate->add_option("--features", eval_features, "expected feature set of the bundle");
    evaluate->add_option("--out-dir", eval_out, "output directory");
    evaluate->add_option("--text-col", eval_text_col, "text column name");
    evaluate->add_option("--label-col", eval_label_col, "label column name");

    std::string pred_bundle, pred_input, pred_text, pred_embeddings, pred_features, pred_output;
    std::string pred_text_col = "text";
    auto* predict = app.add_subcommand("predict", "label new texts with a bundle");
    predict->add_option("--bundle", pred_bundle, "model bundle")->required();
    auto* input_opt = predict->add_option("--input", pred_input, "CSV with a text column");
    predict->add_option("--text", pred_text, "a single text")->excludes(input_opt);
    predict->add_option("--embeddings", pred_embeddings, "EMB1 embeddings covering the inputs");
    predict->add_option("--features", pred_features, "expected feature set of the bundle");
    predict->add_option("--output", pred_output, "output file (default: standard output)");
    predict->add_option("--text-col", pred_text_col, "text column name");

    SyntheticOptions bench;
    std::string bench_dir = "data";
    auto* make_bench = app.add_subcommand("make-benchmark", "write the synthetic benchmark corpus");
    make_bench->add_option("--out-dir", bench_dir, "output directory");
    make_bench->add_option("--seed", bench.seed, "generator seed");
    make_bench->add_option("--documents", bench.documents, "documents after preprocessing");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*train) {
            cmd_train(train_flags.resolve(), std::cerr);
        } else if (*grid) {
            cmd_grid_search(grid_flags.resolve(), std::cerr);
        } else if (*compare) {
            const auto config = compare_flags.resolve();
            cmd_compare(config, std::cerr);
            std::ifstream table(config.out_dir / files::kComparison);
            std::cout << table.rdbuf();
        } else if (*folds) {
            cmd_folds(folds_flags.resolve(), std::cerr);
        } else if (*evaluate) {
            eval_request.bundle = eval_bundle;
            eval_request.corpus = eval_corpus;
            eval_request.embeddings = optional_path(eval_embeddings);
            eval_request.features = optional_features(eval_features);
            eval_request.out_dir = eval_out;
            eval_request.schema = {eval_text_col, eval_label_col};
            cmd_evaluate(eval_request, std::cerr);
            std::ifstream report(eval_request.out_dir / files::kEvalReport);
            std::cout << report.rdbuf();
        } else if (*predict) {
            PredictRequest request;
            request.bundle = pred_bundle;
            request.input = optional_path(pred_input);
            if (predict->count("--text") > 0) request.text = pred_text;
            request.embeddings = optional_path(pred_embeddings);
            request.features = optional_features(pred_features);
            request.schema.text_column = pred_text_col;
            if (pred_output.empty()) {
                cmd_predict(request, std::cout, std::cerr);
            } else {
                std::ostringstream rows;
                cmd_predict(request, rows, std::cerr);
                write_file_atomic(pred_output, rows.str());
            }
        } else if (*make_bench) {
            const std::filesystem::path dir = bench_dir;
            cmd_make_benchmark(bench, dir / "benchmark.csv", dir / "benchmark.emb1", std::cerr);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
