#include "stacksent/evaluation.hpp"

#include "stacksent/error.hpp"
#include "stacksent/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace stacksent {

namespace {

// Display order of the text reports.
constexpr std::array<Label, kNumClasses> kReportOrder{Label::Positive, Label::Neutral,
                                                      Label::Negative};

std::string display_label(Label label)
{
    std::string name(label_name(label));
    name[0] = static_cast<char>(name[0] - 'a' + 'A');
    return name;
}

std::string_view feature_set_title(FeatureSet set)
{
    return set == FeatureSet::Tfidf ? "TF-IDF" : "TF-IDF + Embeddings";
}

std::string fixed2(double value)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", value);
    return buf;
}

std::string full(double value)
{
    std::ostringstream out;
    out << std::setprecision(17) << value;
    return out.str();
}

std::vector<Label> labels_of(const std::vector<Document>& docs)
{
    std::vector<Label> y;
    y.reserve(docs.size());
    for (const auto& d : docs) {
        if (!d.label) fail(ErrorCode::InvalidArgument, "document without a label in a fold");
        y.push_back(*d.label);
    }
    return y;
}

} // namespace

bool MetricsReport::any_undefined() const
{
    return std::any_of(per_class.begin(), per_class.end(), [](const ClassMetrics& m) {
        return m.precision_undefined || m.recall_undefined;
    });
}

ConfusionMatrix confusion_matrix(std::span<const Label> y_true, std::span<const Label> y_pred)
{
    if (y_true.size() != y_pred.size())
        fail(ErrorCode::LengthMismatch, std::to_string(y_true.size()) + " true labels vs " +
                                            std::to_string(y_pred.size()) + " predictions");
    if (y_true.empty()) fail(ErrorCode::InvalidArgument, "no predictions to score");
    ConfusionMatrix counts = ConfusionMatrix::Zero();
    for (std::size_t i = 0; i < y_true.size(); ++i) ++counts(index_of(y_true[i]), index_of(y_pred[i]));
    return counts;
}

MetricsReport metrics_from_confusion(const ConfusionMatrix& confusion)
{
    MetricsReport report;
    report.confusion = confusion;
    const long total = confusion.sum();
    if (total <= 0) fail(ErrorCode::InvalidArgument, "empty confusion matrix");
    report.accuracy = static_cast<double>(confusion.trace()) / static_cast<double>(total);

    int seen = 0;
    for (int k = 0; k < kNumClasses; ++k) {
        auto& m = report.per_class[k];
        const long tp = confusion(k, k);
        const long predicted = confusion.col(k).sum();
        m.support = confusion.row(k).sum();
        m.precision_undefined = predicted == 0;
        m.recall_undefined = m.support == 0;
        m.precision = predicted > 0 ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
        m.recall = m.support > 0 ? static_cast<double>(tp) / static_cast<double>(m.support) : 0.0;
        m.f1 = m.precision + m.recall > 0.0
                   ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                   : 0.0;

        const double w = static_cast<double>(m.support) / static_cast<double>(total);
        report.weighted.precision += w * m.precision;
        report.weighted.recall += w * m.recall;
        report.weighted.f1 += w * m.f1;
        if (m.support > 0 || predicted > 0) {
            ++seen;
            report.macro.precision += m.precision;
            report.macro.recall += m.recall;
            report.macro.f1 += m.f1;
        }
    }
    report.macro.precision /= seen;
    report.macro.recall /= seen;
    report.macro.f1 /= seen;
    return report;
}

MetricsReport compute_metrics(std::span<const Label> y_true, std::span<const Label> y_pred)
{
    return metrics_from_confusion(confusion_matrix(y_true, y_pred));
}

const AveragedMetrics& averaged(const MetricsReport& report, Averaging averaging)
{
    return averaging == Averaging::Weighted ? report.weighted : report.macro;
}

double selection_score(const MetricsReport& report, SelectionMetric metric)
{
    return metric == SelectionMetric::Accuracy ? report.accuracy : report.weighted.f1;
}

std::vector<FoldData> fold_data(const Eigen::MatrixXd& X, std::span<const Label> y,
                                const FoldPlan& plan)
{
    if (static_cast<std::size_t>(X.rows()) != y.size())
        fail(ErrorCode::LengthMismatch, "feature rows and labels differ in length");
    std::vector<FoldData> out;
    for (int f = 0; f < plan.k; ++f) {
        const auto train = plan.fold_complement(f);
        const auto test = plan.fold_members(f);
        out.push_back({select_rows(X, train), select_labels(y, train), select_rows(X, test),
                       select_labels(y, test)});
    }
    return out;
}

std::vector<FoldData> fold_data(const std::vector<Document>& docs, const FoldPlan& plan,
                                const PipelineOptions& features, const EmbeddingTable* table)
{
    std::vector<FoldData> out;
    for (int f = 0; f < plan.k; ++f) {
        std::vector<Document> train, test;
        for (std::size_t i : plan.fold_complement(f)) train.push_back(docs.at(i));
        for (std::size_t i : plan.fold_members(f)) test.push_back(docs.at(i));
        const auto pipeline = fit_pipeline(train, features, table);
        out.push_back({pipeline.transform(train, table), labels_of(train),
                       pipeline.transform(test, table), labels_of(test)});
    }
    return out;
}

Summary summarize(std::span<const double> values)
{
    Summary s;
    if (values.empty()) return s;
    for (double v : values) s.mean += v;
    s.mean /= static_cast<double>(values.size());
    for (double v : values) s.stdev += (v - s.mean) * (v - s.mean);
    s.stdev = std::sqrt(s.stdev / static_cast<double>(values.size()));
    return s;
}

CvResult cross_validate(ModelKind kind, const Hyperparams& hp, std::span<const FoldData> folds,
                        const CvOptions& options)
{
    if (folds.empty()) fail(ErrorCode::InvalidArgument, "no folds to evaluate");
    CvResult result;
    std::vector<Label> all_true, all_pred;
    std::vector<double> acc, p, r, f1;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        const auto& fold = folds[f];
        try {
            if (options.on_train) options.on_train(static_cast<int>(f));
            const auto model = train_classifier(kind, fold.X_train, fold.y_train, hp,
                                                derive_seed(options.seed, "cv", f), options.cache);
            const auto pred = predict_labels(model, fold.X_test);
            result.folds.push_back(compute_metrics(fold.y_test, pred));
            all_true.insert(all_true.end(), fold.y_test.begin(), fold.y_test.end());
            all_pred.insert(all_pred.end(), pred.begin(), pred.end());
        } catch (const Error& e) {
            throw Error(e.code(), "fold " + std::to_string(f) + ": " + e.message());
        }
        const auto& m = result.folds.back();
        const auto& avg = averaged(m, options.averaging);
        acc.push_back(m.accuracy);
        p.push_back(avg.precision);
        r.push_back(avg.recall);
        f1.push_back(avg.f1);
    }
    result.pooled = compute_metrics(all_true, all_pred);
    result.accuracy = summarize(acc);
    result.precision = summarize(p);
    result.recall = summarize(r);
    result.f1 = summarize(f1);
    return result;
}

CvResult cross_validate(ModelKind kind, const Hyperparams& hp, const Eigen::MatrixXd& X,
                        std::span<const Label> y, const FoldPlan& plan, const CvOptions& options)
{
    const auto folds = fold_data(X, y, plan);
    return cross_validate(kind, hp, folds, options);
}

std::size_t GridSpec::cell_count() const
{
    if (axes.empty()) return 0;
    std::size_t n = 1;
    for (const auto& [key, values] : axes) n *= values.size();
    return n;
}

std::vector<std::pair<std::string, double>> GridSpec::cell(std::size_t index) const
{
    std::vector<std::pair<std::string, double>> out(axes.size());
    for (std::size_t a = axes.size(); a-- > 0;) {
        const auto& values = axes[a].second;
        out[a] = {axes[a].first, values[index % values.size()]};
        index /= values.size();
    }
    return out;
}

Hyperparams GridResult::best_hyperparams(const Hyperparams& base) const
{
    Hyperparams hp = base;
    for (const auto& [key, value] : best_cell().params) hp.set(key, value);
    return hp;
}

void validate_grid(const GridSpec& grid, ModelKind kind)
{
    if (grid.cell_count() == 0) fail(ErrorCode::Config, "grid has no cells");
    for (const auto& [key, values] : grid.axes) {
        require_key(kind, key);
        if (values.empty()) fail(ErrorCode::Config, "grid key " + key + " has no values");
    }
}

GridResult grid_search(const GridSpec& grid, ModelKind kind, const Hyperparams& base,
                       std::span<const FoldData> folds, const GridOptions& options)
{
    validate_grid(grid, kind);
    const std::size_t n = grid.cell_count();

    // Reject bad values before any training.
    std::vector<Hyperparams> settings;
    settings.reserve(n);
    for (std::size_t c = 0; c < n; ++c) {
        Hyperparams hp = base;
        for (const auto& [key, value] : grid.cell(c)) hp.set(key, value);
        settings.push_back(hp);
    }

    GridResult result;
    result.kind = kind;
    result.metric = options.metric;
    for (std::size_t c = 0; c < n; ++c) {
        GridCell cell;
        cell.params = grid.cell(c);
        cell.cv = cross_validate(kind, settings[c], folds, options.cv);
        std::vector<double> scores;
        for (const auto& m : cell.cv.folds) scores.push_back(selection_score(m, options.metric));
        cell.score = summarize(scores).mean;
        if (c == 0 || cell.score > result.cells[result.best].score) result.best = c;
        result.cells.push_back(std::move(cell));
        if (options.on_cell) options.on_cell(c, n);
    }
    const double best = result.cells[result.best].score;
    for (std::size_t c = 0; c < n; ++c)
        if (c != result.best && result.cells[c].score == best) result.tie = true;
    return result;
}

GridResult grid_search(const GridSpec& grid, ModelKind kind, const Hyperparams& base,
                       const Eigen::MatrixXd& X, std::span<const Label> y, const FoldPlan& plan,
                       const GridOptions& options)
{
    validate_grid(grid, kind);
    const auto folds = fold_data(X, y, plan);
    return grid_search(grid, kind, base, folds, options);
}

GridSpec paper_grid()
{
    return GridSpec{{
        {"logreg__C", {0.01, 0.1, 10}},
        {"lgbm__n_estimators", {50, 100, 200}},
        {"lgbm__learning_rate", {0.01, 0.1, 0.2}},
        {"knn__n_neighbors", {3, 5, 7}},
        {"adaboost__n_estimators", {50, 100, 200}},
        {"final_estimator__estimator__C", {0.01, 0.1, 1, 10}},
    }};
}

void write_classification_report(std::ostream& out, const MetricsReport& report,
                                 const std::string& title, Averaging averaging)
{
    if (!title.empty()) out << title << '\n';
    out << std::left << std::setw(14) << "Class" << std::right << std::setw(11) << "Precision"
        << std::setw(9) << "Recall" << std::setw(11) << "F1-score" << std::setw(10) << "Support"
        << '\n';
    for (Label label : kReportOrder) {
        const auto& m = report.per_class[index_of(label)];
        out << std::left << std::setw(14) << display_label(label) << std::right << std::setw(11)
            << fixed2(m.precision) << std::setw(9) << fixed2(m.recall) << std::setw(11)
            << fixed2(m.f1) << std::setw(10) << m.support;
        if (m.precision_undefined) out << "  (no predictions)";
        out << '\n';
    }
    const auto& avg = averaged(report, averaging);
    out << std::left << std::setw(14) << (averaging == Averaging::Weighted ? "Weighted avg" : "Macro avg")
        << std::right << std::setw(11) << fixed2(avg.precision) << std::setw(9)
        << fixed2(avg.recall) << std::setw(11) << fixed2(avg.f1) << std::setw(10)
        << report.total() << '\n';
    char buf[64];
    std::snprintf(buf, sizeof buf, "Overall Accuracy: %.1f%%", 100.0 * report.accuracy);
    out << buf << '\n';
}

void write_metrics_tsv(std::ostream& out, const MetricsReport& report)
{
    out << "scope\tclass\tprecision\trecall\tf1\tsupport\tflag\n";
    out << "overall\taccuracy\t" << full(report.accuracy) << '\t' << full(report.accuracy) << '\t'
        << full(report.accuracy) << '\t' << report.total() << "\t-\n";
    for (int k = 0; k < kNumClasses; ++k) {
        const auto& m = report.per_class[k];
        std::string flag = "-";
        if (m.precision_undefined && m.recall_undefined) flag = "no_predictions,no_support";
        else if (m.precision_undefined) flag = "no_predictions";
        else if (m.recall_undefined) flag = "no_support";
        out << "class\t" << label_name(label_from_index(k)) << '\t' << full(m.precision) << '\t'
            << full(m.recall) << '\t' << full(m.f1) << '\t' << m.support << '\t' << flag << '\n';
    }
    for (auto [name, avg] : {std::pair{"weighted", &report.weighted}, std::pair{"macro", &report.macro}})
        out << "average\t" << name << '\t' << full(avg->precision) << '\t' << full(avg->recall)
            << '\t' << full(avg->f1) << '\t' << report.total() << "\t-\n";
    for (int t = 0; t < kNumClasses; ++t)
        for (int p = 0; p < kNumClasses; ++p)
            out << "confusion\t" << label_name(label_from_index(t)) << '\t'
                << label_name(label_from_index(p)) << '\t' << report.confusion(t, p)
                << "\t-\t-\t-\n";
}

void write_comparison_table(std::ostream& out, std::span<const ComparisonRow> rows,
                            Averaging averaging)
{
    constexpr int kName = 30;
    const auto rule = std::string(kName + 4 * 11, '-');
    out << std::left << std::setw(kName) << "Model" << std::right << std::setw(11) << "Accuracy"
        << std::setw(11) << "Precision" << std::setw(11) << "Recall" << std::setw(11)
        << "F1-Score" << '\n';
    for (FeatureSet set : {FeatureSet::Tfidf, FeatureSet::TfidfEmbeddings}) {
        const bool any = std::any_of(rows.begin(), rows.end(),
                                     [&](const ComparisonRow& r) { return r.feature_set == set; });
        if (!any) continue;
        out << rule << '\n' << feature_set_title(set) << '\n' << rule << '\n';
        for (const auto& row : rows) {
            if (row.feature_set != set) continue;
            out << std::left << std::setw(kName) << model_display_name(row.kind) << std::right;
            if (!row.ok) {
                out << std::setw(11) << "failed" << "  " << row.error << '\n';
                continue;
            }
            const auto& avg = averaged(row.metrics, averaging);
            out << std::setw(11) << fixed2(row.metrics.accuracy) << std::setw(11)
                << fixed2(avg.precision) << std::setw(11) << fixed2(avg.recall) << std::setw(11)
                << fixed2(avg.f1) << '\n';
        }
    }
}

void write_comparison_tsv(std::ostream& out, std::span<const ComparisonRow> rows,
                          Averaging averaging)
{
    out << "model\tfeature_set\tsplit_seed\tstatus\taccuracy\tprecision\trecall\tf1\tseconds\n";
    for (const auto& row : rows) {
        out << model_kind_name(row.kind) << '\t' << feature_set_name(row.feature_set) << '\t'
            << row.split_seed << '\t';
        if (!row.ok) {
            out << "failed\t\t\t\t\t" << full(row.seconds) << '\n';
            continue;
        }
        const auto& avg = averaged(row.metrics, averaging);
        out << "ok\t" << full(row.metrics.accuracy) << '\t' << full(avg.precision) << '\t'
            << full(avg.recall) << '\t' << full(avg.f1) << '\t' << full(row.seconds) << '\n';
    }
}

void write_plot_data(std::ostream& out, std::span<const ComparisonRow> rows)
{
    out << "model,feature_set,accuracy\n";
    for (const auto& row : rows)
        if (row.ok)
            out << model_kind_name(row.kind) << ',' << feature_set_name(row.feature_set) << ','
                << full(row.metrics.accuracy) << '\n';
}

void write_grid_tsv(std::ostream& out, const GridResult& result)
{
    if (result.cells.empty()) return;
    out << "cell";
    for (const auto& [key, value] : result.cells.front().params) out << '\t' << key;
    out << "\tmean_accuracy\tstd_accuracy\tmean_f1\tstd_f1\tscore";
    const std::size_t k = result.cells.front().cv.folds.size();
    for (std::size_t f = 0; f < k; ++f) out << "\tfold" << f << "_accuracy";
    out << "\tbest\n";
    for (std::size_t c = 0; c < result.cells.size(); ++c) {
        const auto& cell = result.cells[c];
        out << c;
        for (const auto& [key, value] : cell.params) out << '\t' << full(value);
        out << '\t' << full(cell.cv.accuracy.mean) << '\t' << full(cell.cv.accuracy.stdev) << '\t'
            << full(cell.cv.f1.mean) << '\t' << full(cell.cv.f1.stdev) << '\t' << full(cell.score);
        for (const auto& m : cell.cv.folds) out << '\t' << full(m.accuracy);
        out << '\t' << (c == result.best ? (result.tie ? "best,tie" : "best") : "") << '\n';
    }
}

} // namespace stacksent
