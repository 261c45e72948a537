#include "fixtures.hpp"

#include "stacksent/commands.hpp"
#include "stacksent/error.hpp"
#include "stacksent/random.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace stacksent;

namespace {

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

std::string hex(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// One logreg/tfidf training run shared by the tests below.
class TrainedBundle : public ::testing::Test {
protected:
    static void SetUpTestSuite()
    {
        dir_ = new fixtures::TempDir("commands");
        config_ = new ExperimentConfig(fixtures::benchmark_config(dir_->path() / "train"));
        config_->model = ModelKind::LogReg;
        config_->features.feature_set = FeatureSet::Tfidf;
        std::ostringstream log;
        outcome_ = new TrainOutcome(cmd_train(*config_, log));
    }
    static void TearDownTestSuite()
    {
        delete outcome_;
        delete config_;
        delete dir_;
    }
    static fixtures::TempDir* dir_;
    static ExperimentConfig* config_;
    static TrainOutcome* outcome_;
};

fixtures::TempDir* TrainedBundle::dir_ = nullptr;
ExperimentConfig* TrainedBundle::config_ = nullptr;
TrainOutcome* TrainedBundle::outcome_ = nullptr;

} // namespace

TEST_F(TrainedBundle, WritesBundleReportsAndProvenance)
{
    const auto out = config_->out_dir;
    for (const char* name : {files::kBundle, files::kConfigUsed, files::kRunInfo, files::kTestReport,
                             files::kTestMetrics, files::kTestPredictions})
        EXPECT_TRUE(std::filesystem::exists(out / name)) << name;
    const std::string run = fixtures::slurp(out / files::kRunInfo);
    EXPECT_NE(run.find("config_hash\t" + hex(config_hash(*config_))), std::string::npos);
    EXPECT_EQ(outcome_->bundle.provenance.config_hash, config_hash(*config_));
    EXPECT_EQ(outcome_->bundle.provenance.train_rows, 240u);
    EXPECT_EQ(outcome_->bundle.provenance.test_rows, 60u);
    EXPECT_EQ(load_config(out / files::kConfigUsed).model, ModelKind::LogReg);

    const auto [predicted, truth] = read_predictions_tsv(out / files::kTestPredictions);
    EXPECT_EQ(compute_metrics(truth, predicted).accuracy, outcome_->test_metrics.accuracy);
}

TEST_F(TrainedBundle, EvaluateAgreesWithItsPredictionsFile)
{
    EvaluateRequest request;
    request.bundle = outcome_->bundle_path;
    request.corpus = fixtures::data_dir() / "benchmark.csv";
    request.embeddings = fixtures::data_dir() / "benchmark.emb1";
    request.out_dir = dir_->path() / "eval";
    std::ostringstream log;
    const auto report = cmd_evaluate(request, log);
    EXPECT_NE(log.str().find("warning: bundle uses tfidf features"), std::string::npos);
    EXPECT_EQ(report.total(), 300);
    const auto [predicted, truth] = read_predictions_tsv(request.out_dir / files::kEvalPredictions);
    const auto again = compute_metrics(truth, predicted);
    EXPECT_EQ(again.accuracy, report.accuracy);
    EXPECT_EQ(again.confusion, report.confusion);

    request.features = FeatureSet::TfidfEmbeddings;
    EXPECT_EQ(code_of([&] { cmd_evaluate(request, log); }), ErrorCode::FeatureSetMismatch);
}

TEST_F(TrainedBundle, PredictSingleTextAndEmptyInput)
{
    PredictRequest request;
    request.bundle = outcome_->bundle_path;
    request.text = "Excelente atención, muy rápido";
    std::ostringstream out, log;
    EXPECT_EQ(cmd_predict(request, out, log), 1u);
    std::istringstream rows(out.str());
    std::string header, row;
    std::getline(rows, header);
    std::getline(rows, row);
    EXPECT_EQ(header, "id\tpredicted\tp_negative\tp_neutral\tp_positive");
    std::vector<std::string> cells;
    std::istringstream fields(row);
    for (std::string c; std::getline(fields, c, '\t');) cells.push_back(c);
    ASSERT_EQ(cells.size(), 5u);
    const double sum = std::stod(cells[2]) + std::stod(cells[3]) + std::stod(cells[4]);
    EXPECT_NEAR(sum, 1.0, 1e-9);

    fixtures::write_text(dir_->path() / "empty.csv", "");
    PredictRequest empty;
    empty.bundle = outcome_->bundle_path;
    empty.input = dir_->path() / "empty.csv";
    std::ostringstream none;
    EXPECT_EQ(cmd_predict(empty, none, log), 0u);
    EXPECT_EQ(none.str(), header + "\n");
}

TEST_F(TrainedBundle, PredictionsRoundTripThroughEvaluate)
{
    const auto corpus = fixtures::benchmark_corpus();
    std::string csv = "text,label\n";
    for (std::size_t i = 0; i < 40; ++i)
        csv += "\"" + corpus.documents[i].text + "\"," + std::string(label_name(*corpus.documents[i].label)) + "\n";
    fixtures::write_text(dir_->path() / "labelled.csv", csv);

    PredictRequest request;
    request.bundle = outcome_->bundle_path;
    request.input = dir_->path() / "labelled.csv";
    std::ostringstream out, log;
    cmd_predict(request, out, log);

    EvaluateRequest eval;
    eval.bundle = outcome_->bundle_path;
    eval.corpus = dir_->path() / "labelled.csv";
    eval.out_dir = dir_->path() / "eval_small";
    cmd_evaluate(eval, log);
    const std::string evaluated = fixtures::slurp(eval.out_dir / files::kEvalPredictions);
    std::istringstream a(out.str()), b(evaluated);
    for (std::string la, lb; std::getline(a, la) && std::getline(b, lb);)
        EXPECT_EQ(lb.substr(0, la.size()), la);
}

TEST_F(TrainedBundle, CliPredictAndEvaluate)
{
    const auto bundle = outcome_->bundle_path.string();
    fixtures::write_text(dir_->path() / "blank.csv", "text\n   \n");
    auto run = fixtures::run_cli("predict --bundle '" + bundle + "' --input blank.csv", dir_->path());
    EXPECT_EQ(run.exit_code, 0) << run.err;
    EXPECT_EQ(run.out, "id\tpredicted\tp_negative\tp_neutral\tp_positive\n");

    run = fixtures::run_cli("predict --bundle '" + bundle + "' --text 'muy mala experiencia'", dir_->path());
    EXPECT_EQ(run.exit_code, 0) << run.err;

    run = fixtures::run_cli("evaluate --bundle '" + bundle + "' --corpus '" +
                                (fixtures::data_dir() / "benchmark.csv").string() + "' --out-dir ev",
                            dir_->path());
    EXPECT_EQ(run.exit_code, 0) << run.err;
    EXPECT_NE(run.out.find("Overall Accuracy"), std::string::npos);

    run = fixtures::run_cli("predict --bundle missing.ssmb --text hola", dir_->path());
    EXPECT_EQ(run.exit_code, 3);
    run = fixtures::run_cli("predict", dir_->path());
    EXPECT_EQ(run.exit_code, 2);
}

TEST(Commands, ConfigErrorsBeforeAnyCompute)
{
    fixtures::TempDir dir("cfg");
    auto config = fixtures::benchmark_config(dir.path());
    config.embeddings.reset();
    std::ostringstream log;
    EXPECT_EQ(code_of([&] { cmd_train(config, log); }), ErrorCode::Config);
    EXPECT_FALSE(std::filesystem::exists(dir / files::kBundle));

    auto grid = fixtures::benchmark_config(dir.path());
    EXPECT_EQ(code_of([&] { cmd_grid_search(grid, log); }), ErrorCode::Config);

    const auto run = fixtures::run_cli("train --config '" + (fixtures::data_dir() / "benchmark.ini").string() +
                                           "' --corpus '" + (fixtures::data_dir() / "benchmark.csv").string() +
                                           "' --model knn --param logreg__C=1 --out-dir o",
                                       dir.path());
    EXPECT_EQ(run.exit_code, 2);
    EXPECT_NE(run.err.find("UnknownParameter"), std::string::npos);
    EXPECT_NE(run.err.find("knn__n_neighbors"), std::string::npos);
}

TEST(Commands, CompareSharesOneSplit)
{
    fixtures::TempDir dir("compare");
    auto config = fixtures::benchmark_config(dir.path());
    config.compare_models = {ModelKind::LogReg, ModelKind::Knn};
    std::ostringstream log;
    const auto rows = cmd_compare(config, log);
    ASSERT_EQ(rows.size(), 4u);
    for (const auto& row : rows) {
        EXPECT_TRUE(row.ok) << row.error;
        EXPECT_EQ(row.split_seed, 42u);
        EXPECT_EQ(row.metrics.total(), 60);
    }
    EXPECT_TRUE(std::filesystem::exists(dir / files::kComparison));
    EXPECT_TRUE(std::filesystem::exists(dir / files::kPlotData));
}

TEST(Commands, CompareKeepsGoingAfterAFailedCell)
{
    fixtures::TempDir dir("compare_fail");
    auto config = fixtures::benchmark_config(dir.path());
    config.compare_models = {ModelKind::Knn, ModelKind::LogReg};
    config.compare_features = {FeatureSet::Tfidf};
    config.hyperparams.knn_neighbors = 1000;
    std::ostringstream log;
    const auto rows = cmd_compare(config, log);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_FALSE(rows[0].ok);
    EXPECT_NE(rows[0].error.find("KTooLarge"), std::string::npos);
    EXPECT_TRUE(rows[1].ok);
}

TEST(Commands, InputFilesAreNotModified)
{
    const auto csv = fixtures::slurp(fixtures::data_dir() / "benchmark.csv");
    const auto emb = fixtures::slurp(fixtures::data_dir() / "benchmark.emb1");
    const auto ini = fixtures::slurp(fixtures::data_dir() / "benchmark.ini");
    fixtures::TempDir dir("inputs");
    auto config = fixtures::benchmark_config(dir.path());
    config.model = ModelKind::Knn;
    std::ostringstream log;
    cmd_train(config, log);
    EXPECT_EQ(fixtures::slurp(fixtures::data_dir() / "benchmark.csv"), csv);
    EXPECT_EQ(fixtures::slurp(fixtures::data_dir() / "benchmark.emb1"), emb);
    EXPECT_EQ(fixtures::slurp(fixtures::data_dir() / "benchmark.ini"), ini);
}

TEST(Commands, MakeBenchmarkReproducesBundledData)
{
    fixtures::TempDir dir("bench");
    std::ostringstream log;
    cmd_make_benchmark(SyntheticOptions{}, dir / "b.csv", dir / "b.emb1", log);
    EXPECT_EQ(fixtures::slurp(dir / "b.csv"), fixtures::slurp(fixtures::data_dir() / "benchmark.csv"));
    EXPECT_EQ(fixtures::slurp(dir / "b.emb1"), fixtures::slurp(fixtures::data_dir() / "benchmark.emb1"));
    const auto corpus = fixtures::benchmark_corpus();
    EXPECT_EQ(corpus.size(), 300u);
    for (const auto& doc : corpus.documents) EXPECT_TRUE(fixtures::benchmark_embeddings().contains(doc.id));
}

TEST(Commands, FoldsOverWholeCorpus)
{
    fixtures::TempDir dir("folds");
    auto config = fixtures::benchmark_config(dir.path());
    config.model = ModelKind::LogReg;
    config.folds = 3;
    std::ostringstream log;
    const auto cv = cmd_folds(config, log);
    EXPECT_EQ(cv.folds.size(), 3u);
    EXPECT_EQ(cv.pooled.total(), 300);
    EXPECT_TRUE(std::filesystem::exists(dir / files::kCvSummary));
}
