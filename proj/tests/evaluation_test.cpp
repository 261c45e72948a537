#include "fixtures.hpp"
#include "oracles.hpp"

#include "stacksent/error.hpp"
#include "stacksent/evaluation.hpp"
#include "stacksent/random.hpp"

#include <gtest/gtest.h>

#include <set>
#include <sstream>

using namespace stacksent;

namespace {

constexpr Label N = Label::Negative, U = Label::Neutral, P = Label::Positive;

ErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::Io;
}

} // namespace

TEST(Metrics, PerfectPrediction)
{
    const std::vector<Label> y{N, U, P, P};
    const auto m = compute_metrics(y, y);
    EXPECT_EQ(m.accuracy, 1.0);
    for (const auto& c : m.per_class) EXPECT_EQ(c.f1, 1.0);
}

TEST(Metrics, HandComputedExample)
{
    const std::vector<Label> t{N, N, P, P}, p{N, P, P, P};
    const auto m = compute_metrics(t, p);
    EXPECT_DOUBLE_EQ(m.accuracy, 0.75);
    const auto& pos = m.per_class[index_of(P)];
    EXPECT_DOUBLE_EQ(pos.precision, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(pos.recall, 1.0);
    EXPECT_DOUBLE_EQ(pos.f1, 0.8);
    EXPECT_TRUE(m.per_class[index_of(U)].precision_undefined);
    EXPECT_TRUE(m.per_class[index_of(U)].recall_undefined);
    // Macro averages only Negative and Positive.
    EXPECT_DOUBLE_EQ(m.macro.recall, 0.75);
}

TEST(Metrics, AllNeutralPredictor)
{
    const std::vector<Label> t{N, N, U, U, P, P};
    const std::vector<Label> p(6, U);
    const auto m = compute_metrics(t, p);
    EXPECT_DOUBLE_EQ(m.accuracy, 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(m.per_class[index_of(U)].recall, 1.0);
    EXPECT_DOUBLE_EQ(m.per_class[index_of(U)].precision, 1.0 / 3.0);
    EXPECT_TRUE(m.per_class[index_of(N)].precision_undefined);
    EXPECT_TRUE(m.any_undefined());
}

TEST(Metrics, Errors)
{
    const std::vector<Label> a{N, P}, b{N};
    EXPECT_EQ(code_of([&] { compute_metrics(a, b); }), ErrorCode::LengthMismatch);
    EXPECT_EQ(code_of([&] { compute_metrics({}, {}); }), ErrorCode::InvalidArgument);
}

TEST(Metrics, FuzzedIdentitiesAndCountingOracle)
{
    SplitMix64 rng(17);
    for (int trial = 0; trial < 500; ++trial) {
        const auto n = 1 + rng.uniform(80);
        std::vector<Label> t, p;
        for (std::uint64_t i = 0; i < n; ++i) {
            t.push_back(label_from_index(static_cast<int>(rng.uniform(3))));
            p.push_back(rng.uniform(4) == 0 ? t.back() : label_from_index(static_cast<int>(rng.uniform(3))));
        }
        const auto m = compute_metrics(t, p);
        const auto o = oracle::count_metrics(t, p);
        ASSERT_EQ(m.confusion, o.confusion);
        EXPECT_EQ(m.accuracy, o.accuracy);
        EXPECT_NEAR(m.accuracy, static_cast<double>(m.confusion.trace()) / m.confusion.sum(), 1e-15);
        EXPECT_NEAR(m.weighted.recall, m.accuracy, 1e-12);
        for (int k = 0; k < 3; ++k) {
            const auto& c = m.per_class[static_cast<std::size_t>(k)];
            EXPECT_EQ(c.precision, o.precision[k]);
            EXPECT_EQ(c.recall, o.recall[k]);
            EXPECT_NEAR(c.f1, o.f1[k], 1e-15);
            EXPECT_EQ(c.support, o.support[k]);
        }
        const auto again = metrics_from_confusion(m.confusion);
        EXPECT_EQ(again.accuracy, m.accuracy);
        EXPECT_EQ(again.weighted.f1, m.weighted.f1);
    }
}

TEST(Summary, PopulationStdev)
{
    const std::vector<double> v{1, 2, 3, 4};
    const auto s = summarize(v);
    EXPECT_DOUBLE_EQ(s.mean, 2.5);
    EXPECT_DOUBLE_EQ(s.stdev, std::sqrt(1.25));
}

TEST(CrossValidate, ConstantLabelsGivePerfectFolds)
{
    const auto d = fixtures::random_dataset(20, 2, 3);
    const std::vector<Label> y(20, P);
    Hyperparams hp;
    hp.knn_neighbors = 1;
    const auto plan = make_folds(y, 4, false, 1);
    const auto cv = cross_validate(ModelKind::Knn, hp, d.X, y, plan);
    ASSERT_EQ(cv.folds.size(), 4u);
    for (const auto& f : cv.folds) EXPECT_EQ(f.accuracy, 1.0);
}

TEST(CrossValidate, AggregateIsMeanOfFolds)
{
    const auto d = fixtures::blobs(20, 4, 1.0, 1.0, 7);
    const auto plan = make_folds(d.y, 5, true, 2);
    int trained = 0;
    CvOptions options;
    options.on_train = [&](int) { ++trained; };
    const auto cv = cross_validate(ModelKind::LogReg, Hyperparams{}, d.X, d.y, plan, options);
    double sum = 0.0;
    for (const auto& f : cv.folds) sum += f.accuracy;
    EXPECT_NEAR(cv.accuracy.mean, sum / 5, 1e-12);
    EXPECT_EQ(trained, 5);
    EXPECT_EQ(cv.pooled.total(), 60);
}

TEST(CrossValidate, DocumentFoldsRefitThePipeline)
{
    const auto corpus = fixtures::benchmark_corpus();
    const auto plan = make_folds(corpus.labels(), 3, true, 4);
    const auto folds = fold_data(corpus.documents, plan, PipelineOptions{}, nullptr);
    ASSERT_EQ(folds.size(), 3u);
    for (int f = 0; f < 3; ++f) {
        const auto& fd = folds[static_cast<std::size_t>(f)];
        EXPECT_EQ(fd.X_test.rows(), static_cast<Eigen::Index>(plan.fold_members(f).size()));
        std::vector<Document> train, test;
        for (auto i : plan.fold_complement(f)) train.push_back(corpus.documents[i]);
        for (auto i : plan.fold_members(f)) test.push_back(corpus.documents[i]);
        const auto pipeline = fit_pipeline(train, PipelineOptions{}, nullptr);
        EXPECT_EQ(fd.X_test, pipeline.transform(test, nullptr));
        EXPECT_EQ(fd.X_train, pipeline.transform(train, nullptr));
    }
}

TEST(Grid, PaperGridEnumeration)
{
    const auto grid = paper_grid();
    EXPECT_EQ(grid.cell_count(), 972u);
    std::set<std::vector<std::pair<std::string, double>>> cells;
    for (std::size_t i = 0; i < grid.cell_count(); ++i) cells.insert(grid.cell(i));
    EXPECT_EQ(cells.size(), 972u);
    validate_grid(grid, ModelKind::Cse);
    // Last axis varies fastest.
    EXPECT_EQ(grid.cell(0).back().second, grid.axes.back().second[0]);
    EXPECT_EQ(grid.cell(1).back().second, grid.axes.back().second[1]);
    EXPECT_EQ(grid.cell(1).front().second, grid.axes.front().second[0]);
}

TEST(Grid, Validation)
{
    GridSpec unknown{{{"knn__n_neighbors", {3}}, {"logreg__penalty", {1}}}};
    try {
        validate_grid(unknown, ModelKind::Cse);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownParameter);
        EXPECT_NE(std::string(e.what()).find("logreg__C"), std::string::npos);
    }
    GridSpec wrong_model{{{"logreg__C", {1}}}};
    EXPECT_EQ(code_of([&] { validate_grid(wrong_model, ModelKind::Knn); }), ErrorCode::UnknownParameter);
    EXPECT_EQ(code_of([&] { validate_grid(GridSpec{}, ModelKind::Knn); }), ErrorCode::Config);
}

TEST(Grid, SingleCellTiesAndTrainingCount)
{
    const auto d = fixtures::blobs(10, 3, 2.0, 1.0, 5);
    const auto plan = make_folds(d.y, 3, true, 5);

    const auto single = grid_search(GridSpec{{{"knn__n_neighbors", {3}}}}, ModelKind::Knn, Hyperparams{}, d.X, d.y, plan);
    EXPECT_EQ(single.cells.size(), 1u);
    EXPECT_EQ(single.best, 0u);
    EXPECT_FALSE(single.tie);

    const auto tied = grid_search(GridSpec{{{"knn__n_neighbors", {1, 1}}}}, ModelKind::Knn, Hyperparams{}, d.X, d.y, plan);
    EXPECT_EQ(tied.best, 0u);
    EXPECT_TRUE(tied.tie);

    int trained = 0;
    std::size_t announced = 0;
    GridOptions options;
    options.cv.on_train = [&](int) { ++trained; };
    options.on_cell = [&](std::size_t, std::size_t) { ++announced; };
    const GridSpec grid{{{"logreg__C", {0.01, 1}}, {"knn__n_neighbors", {1, 3}}}};
    const auto result = grid_search(grid, ModelKind::Cse, Hyperparams{}, d.X, d.y, plan, options);
    EXPECT_EQ(trained, 4 * 3);
    EXPECT_EQ(announced, 4u);
    const auto hp = result.best_hyperparams(Hyperparams{});
    for (const auto& [key, value] : result.best_cell().params) EXPECT_EQ(hp.get(key), value);
}

TEST(Reports, ClassificationReportLayout)
{
    const std::vector<Label> t{N, N, P, P}, p{N, P, P, P};
    std::ostringstream out;
    write_classification_report(out, compute_metrics(t, p), "Test");
    const std::string text = out.str();
    EXPECT_NE(text.find("Class"), std::string::npos);
    EXPECT_NE(text.find("F1-score"), std::string::npos);
    EXPECT_LT(text.find("Positive"), text.find("Neutral"));
    EXPECT_LT(text.find("Neutral"), text.find("Negative"));
    EXPECT_NE(text.find("0.80"), std::string::npos);
    EXPECT_NE(text.find("Weighted avg"), std::string::npos);
    EXPECT_NE(text.find("Overall Accuracy: 75.0%"), std::string::npos);

    std::ostringstream macro;
    write_classification_report(macro, compute_metrics(t, p), "", Averaging::Macro);
    EXPECT_NE(macro.str().find("Macro avg"), std::string::npos);
}

TEST(Reports, ComparisonTableMarksFailures)
{
    std::vector<ComparisonRow> rows(2);
    rows[0] = {ModelKind::Knn, FeatureSet::Tfidf, 42, true, "", compute_metrics(std::vector<Label>{N, P}, std::vector<Label>{N, P}), 0.1};
    rows[1] = {ModelKind::Knn, FeatureSet::TfidfEmbeddings, 42, false, "MissingEmbedding: x", {}, 0.0};
    std::ostringstream table, plot;
    write_comparison_table(table, rows);
    write_plot_data(plot, rows);
    EXPECT_NE(table.str().find("TF-IDF + Embeddings"), std::string::npos);
    EXPECT_NE(table.str().find("failed"), std::string::npos);
    EXPECT_NE(table.str().find("1.00"), std::string::npos);
    EXPECT_EQ(plot.str().rfind("model,feature_set,accuracy", 0), 0u);
}
