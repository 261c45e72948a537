#pragma once

#include "stacksent/classifier.hpp"
#include "stacksent/corpus.hpp"
#include "stacksent/features.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace stacksent {

// Rows are true classes, columns predicted classes.
using ConfusionMatrix = Eigen::Matrix<long, kNumClasses, kNumClasses>;

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    long support = 0;
    bool precision_undefined = false; // nothing predicted as this class
    bool recall_undefined = false;    // class absent from the truth
};

struct AveragedMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct MetricsReport {
    double accuracy = 0.0;
    std::array<ClassMetrics, kNumClasses> per_class{};
    AveragedMetrics weighted; // support-weighted
    AveragedMetrics macro;    // over classes seen in truth or predictions
    ConfusionMatrix confusion = ConfusionMatrix::Zero();

    long total() const { return confusion.sum(); }
    bool any_undefined() const;
};

ConfusionMatrix confusion_matrix(std::span<const Label> y_true, std::span<const Label> y_pred);
MetricsReport compute_metrics(std::span<const Label> y_true, std::span<const Label> y_pred);
MetricsReport metrics_from_confusion(const ConfusionMatrix& confusion);

enum class Averaging { Weighted, Macro };
enum class SelectionMetric { Accuracy, WeightedF1 };

const AveragedMetrics& averaged(const MetricsReport& report, Averaging averaging);
double selection_score(const MetricsReport& report, SelectionMetric metric);

// Train/test matrices of one fold.
struct FoldData {
    Eigen::MatrixXd X_train;
    std::vector<Label> y_train;
    Eigen::MatrixXd X_test;
    std::vector<Label> y_test;
};

// Slices precomputed features by the plan (plan indices are rows of X).
std::vector<FoldData> fold_data(const Eigen::MatrixXd& X, std::span<const Label> y,
                                const FoldPlan& plan);

// Refits the feature pipeline on each fold's training documents, so no fold
// sees vocabulary or scaler statistics from its own test rows.
std::vector<FoldData> fold_data(const std::vector<Document>& docs, const FoldPlan& plan,
                                const PipelineOptions& features, const EmbeddingTable* table);

struct Summary {
    double mean = 0.0;
    double stdev = 0.0; // population
};

Summary summarize(std::span<const double> values);

struct CvResult {
    std::vector<MetricsReport> folds;
    MetricsReport pooled; // over the concatenated out-of-fold predictions
    Summary accuracy;
    Summary precision;
    Summary recall;
    Summary f1;
};

// Called once per training run with the fold index.
using TrainingHook = std::function<void(int fold)>;

struct CvOptions {
    std::uint64_t seed = 0;
    Averaging averaging = Averaging::Weighted;
    TrainingHook on_train;
    BaseFitCache* cache = nullptr;
};

// The model of fold f is trained with derive_seed(seed, "cv", f).
CvResult cross_validate(ModelKind kind, const Hyperparams& hp, std::span<const FoldData> folds,
                        const CvOptions& options = {});
CvResult cross_validate(ModelKind kind, const Hyperparams& hp, const Eigen::MatrixXd& X,
                        std::span<const Label> y, const FoldPlan& plan,
                        const CvOptions& options = {});

// Ordered parameter -> values. Cells are the Cartesian product with the
// last key varying fastest.
struct GridSpec {
    std::vector<std::pair<std::string, std::vector<double>>> axes;

    std::size_t cell_count() const;
    std::vector<std::pair<std::string, double>> cell(std::size_t index) const;
};

struct GridCell {
    std::vector<std::pair<std::string, double>> params;
    CvResult cv;
    double score = 0.0;
};

struct GridResult {
    ModelKind kind = ModelKind::Cse;
    SelectionMetric metric = SelectionMetric::Accuracy;
    std::vector<GridCell> cells;
    std::size_t best = 0;
    bool tie = false; // another cell matched the best score

    const GridCell& best_cell() const { return cells[best]; }
    Hyperparams best_hyperparams(const Hyperparams& base) const;
};

struct GridOptions {
    CvOptions cv;
    SelectionMetric metric = SelectionMetric::Accuracy;
    // Called after each cell with (cell index, cell count).
    std::function<void(std::size_t, std::size_t)> on_cell;
};

// Throws UnknownParameter for keys the model kind does not take and Config
// for an empty grid.
void validate_grid(const GridSpec& grid, ModelKind kind);

GridResult grid_search(const GridSpec& grid, ModelKind kind, const Hyperparams& base,
                       std::span<const FoldData> folds, const GridOptions& options = {});
GridResult grid_search(const GridSpec& grid, ModelKind kind, const Hyperparams& base,
                       const Eigen::MatrixXd& X, std::span<const Label> y, const FoldPlan& plan,
                       const GridOptions& options = {});

// The Table 3 grid.
GridSpec paper_grid();

// Plain-text report: one row per class (positive first), then the overall
// accuracy, two decimals.
void write_classification_report(std::ostream& out, const MetricsReport& report,
                                 const std::string& title = "",
                                 Averaging averaging = Averaging::Weighted);

// Full-precision tab-separated report. Header line, then rows of
// (scope, class, precision, recall, f1, support, flag), then the confusion
// matrix as (confusion, true class, predicted class, count, ...).
void write_metrics_tsv(std::ostream& out, const MetricsReport& report);

struct ComparisonRow {
    ModelKind kind = ModelKind::LogReg;
    FeatureSet feature_set = FeatureSet::Tfidf;
    std::uint64_t split_seed = 0;
    bool ok = false;
    std::string error;
    MetricsReport metrics;
    double seconds = 0.0;
};

// Models down, grouped by feature set, two decimals.
void write_comparison_table(std::ostream& out, std::span<const ComparisonRow> rows,
                            Averaging averaging = Averaging::Weighted);

// model, feature_set, split_seed, status, accuracy, precision, recall, f1,
// seconds.
void write_comparison_tsv(std::ostream& out, std::span<const ComparisonRow> rows,
                          Averaging averaging = Averaging::Weighted);

// model, feature_set, accuracy rows for charting.
void write_plot_data(std::ostream& out, std::span<const ComparisonRow> rows);

// One row per cell: the swept parameters, mean/stdev accuracy and F1, then
// the per-fold accuracies.
void write_grid_tsv(std::ostream& out, const GridResult& result);

} // namespace stacksent
