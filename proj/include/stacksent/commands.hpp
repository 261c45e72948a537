#pragma once

#include "stacksent/bundle.hpp"
#include "stacksent/config.hpp"
#include "stacksent/evaluation.hpp"
#include "stacksent/synthetic.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace stacksent {

// Output files, all inside the configured output directory. Tables are
// tab-separated with a header line; text reports are for reading.
namespace files {
inline constexpr const char* kBundle = "model.ssmb";
inline constexpr const char* kConfigUsed = "config.ini";
inline constexpr const char* kRunInfo = "run.tsv"; // key, value (timestamps live here)
inline constexpr const char* kTestReport = "test_report.txt";
inline constexpr const char* kTestMetrics = "test_metrics.tsv";
inline constexpr const char* kTestPredictions = "test_predictions.tsv";
inline constexpr const char* kEvalReport = "eval_report.txt";
inline constexpr const char* kEvalMetrics = "eval_metrics.tsv";
inline constexpr const char* kEvalPredictions = "eval_predictions.tsv";
inline constexpr const char* kGridCells = "grid_cells.tsv";
inline constexpr const char* kGridBest = "grid_best.ini";
inline constexpr const char* kGridSummary = "grid_summary.txt";
inline constexpr const char* kComparison = "comparison.txt";
inline constexpr const char* kComparisonTsv = "comparison.tsv";
inline constexpr const char* kPlotData = "plot_data.csv";
inline constexpr const char* kFolds = "folds.tsv";
inline constexpr const char* kCvFolds = "cv_folds.tsv";
inline constexpr const char* kCvSummary = "cv_summary.txt";
} // namespace files

// Prediction rows: id, predicted label, the three probabilities and, when
// the input was labelled, the true label.
void write_predictions_tsv(std::ostream& out, const std::vector<Document>& docs,
                           const BundlePredictions& predictions);

// Reads back (predicted, true) label pairs of a labelled predictions file.
std::pair<std::vector<Label>, std::vector<Label>> read_predictions_tsv(
    const std::filesystem::path& path);

struct TrainOutcome {
    std::filesystem::path bundle_path;
    ModelBundle bundle;
    MetricsReport test_metrics;
};

// preprocess -> split -> fit features on the training split -> train ->
// bundle plus held-out test report. Errors name the failing stage.
TrainOutcome cmd_train(const ExperimentConfig& config, std::ostream& log);

struct EvaluateRequest {
    std::filesystem::path bundle;
    std::filesystem::path corpus;
    CsvSchema schema;
    std::optional<std::filesystem::path> embeddings;
    std::optional<FeatureSet> features; // must match the bundle when given
    std::filesystem::path out_dir = "out";
    Averaging averaging = Averaging::Weighted;
};

MetricsReport cmd_evaluate(const EvaluateRequest& request, std::ostream& log);

struct PredictRequest {
    std::filesystem::path bundle;
    std::optional<std::filesystem::path> input; // CSV with a text column
    std::optional<std::string> text;            // or a single text
    CsvSchema schema;
    std::optional<std::filesystem::path> embeddings;
    std::optional<FeatureSet> features;
};

// Writes prediction rows to `out`; returns the number of rows.
std::size_t cmd_predict(const PredictRequest& request, std::ostream& out, std::ostream& log);

// Grid over the training split's folds. The best cell is written as a
// config that cmd_train accepts unchanged.
GridResult cmd_grid_search(const ExperimentConfig& config, std::ostream& log);

// Every configured (model, feature set) pair on one shared split. Failing
// cells are reported and the rest still run.
std::vector<ComparisonRow> cmd_compare(const ExperimentConfig& config, std::ostream& log);

// k-fold cross-validation of the configured model over the whole corpus,
// with the feature pipeline refitted inside every fold.
CvResult cmd_folds(const ExperimentConfig& config, std::ostream& log);

// Writes the synthetic benchmark corpus and its embeddings.
void cmd_make_benchmark(const SyntheticOptions& options, const std::filesystem::path& csv_path,
                        const std::filesystem::path& emb_path, std::ostream& log);

} // namespace stacksent
