#include "fixtures.hpp"

#include "stacksent/bundle.hpp"
#include "stacksent/config.hpp"
#include "stacksent/error.hpp"
#include "stacksent/random.hpp"

#include <gtest/gtest.h>

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

Hyperparams quick_hp()
{
    Hyperparams hp;
    hp.adaboost.n_estimators = 10;
    hp.bagging = {2, true, {10, 0.1, 3, 2}};
    hp.cse_folds = 3;
    return hp;
}

std::vector<Document> random_docs(std::size_t n, std::uint64_t seed, const std::vector<Document>& pool)
{
    SplitMix64 rng(seed);
    std::vector<Document> docs;
    for (std::size_t i = 0; i < n; ++i) {
        std::string text;
        const auto words = 1 + rng.uniform(12);
        for (std::uint64_t w = 0; w < words; ++w) {
            const auto& src = pool[rng.uniform(pool.size())].text;
            const auto at = rng.uniform(src.size());
            text += src.substr(at, 1 + rng.uniform(10)) + " ";
        }
        if (rng.uniform(10) == 0) text = "";
        docs.push_back({document_id(text), text, std::nullopt});
    }
    return docs;
}

struct Trained {
    std::vector<Document> docs;
    ModelBundle bundle;
};

// Bundle of `kind` fitted on the first 120 benchmark documents.
Trained train_small(ModelKind kind, FeatureSet set)
{
    auto corpus = fixtures::benchmark_corpus();
    corpus.documents.resize(120);
    PipelineOptions options;
    options.feature_set = set;
    const auto& table = fixtures::benchmark_embeddings();
    Trained t;
    t.docs = corpus.documents;
    t.bundle.pipeline = fit_pipeline(t.docs, options, &table);
    const auto X = t.bundle.pipeline.transform(t.docs, &table);
    t.bundle.model = train_classifier(kind, X, corpus.labels(), quick_hp(), 5);
    ExperimentConfig c;
    c.corpus = "x.csv";
    c.model = kind;
    c.hyperparams = quick_hp();
    t.bundle.config_ini = to_ini(c);
    t.bundle.provenance = {config_hash(c), 1, 2, 5, corpus_fingerprint(t.docs), t.bundle.pipeline.embedding_model_id, 120, 0};
    return t;
}

} // namespace

TEST(Config, RoundTripIsCanonical)
{
    ExperimentConfig c;
    c.corpus = "data/c.csv";
    c.embeddings = "data/e.emb1";
    c.features.feature_set = FeatureSet::TfidfEmbeddings;
    c.features.tfidf = {2, 2};
    c.test_fraction = 0.25;
    c.set_seed(123456789012345ULL);
    c.model = ModelKind::Cse;
    c.hyperparams.set("final_estimator__estimator__C", 10.0);
    c.hyperparams.set("lgbm__learning_rate", 0.2);
    c.grid = {{{"knn__n_neighbors", {3, 5, 7}}}};
    c.grid_metric = SelectionMetric::WeightedF1;
    c.compare_models = {ModelKind::Knn};
    c.averaging = Averaging::Macro;
    const std::string ini = to_ini(c);
    const auto back = parse_config(ini);
    EXPECT_EQ(to_ini(back), ini);
    EXPECT_EQ(back.hyperparams, c.hyperparams);
    EXPECT_EQ(back.split_seed, 123456789012345ULL);
    EXPECT_EQ(back.grid.axes, c.grid.axes);
    EXPECT_EQ(config_hash(back), config_hash(c));
    c.train_seed += 1;
    EXPECT_NE(config_hash(back), config_hash(c));
}

TEST(Config, Rejections)
{
    EXPECT_EQ(code_of([] { parse_config("[data]\ncorpus=a\n[nope]\nx=1\n"); }), ErrorCode::Config);
    EXPECT_EQ(code_of([] { parse_config("[data]\ncorpus=a\ncolour=red\n"); }), ErrorCode::Config);
    EXPECT_EQ(code_of([] { parse_config("[data]\ncorpus=a\n[split]\ntest_fraction=abc\n"); }), ErrorCode::Config);
    EXPECT_EQ(code_of([] { parse_config("[data]\ncorpus=a\n[model]\nkind=knn\n[hyperparams]\nlogreg__C=1\n"); }),
              ErrorCode::UnknownParameter);
    EXPECT_EQ(code_of([] { parse_config("[data]\ncorpus=a\n[features]\nset=tfidf+emb\n").validate(); }),
              ErrorCode::Config);
    EXPECT_EQ(code_of([] { ExperimentConfig{}.validate(); }), ErrorCode::Config);
}

TEST(Config, ParamOverrides)
{
    ExperimentConfig c;
    c.model = ModelKind::Knn;
    apply_param_override(c, "knn__n_neighbors=7");
    EXPECT_EQ(c.hyperparams.knn_neighbors, 7);
    EXPECT_EQ(code_of([&] { apply_param_override(c, "knn__n_neighbors"); }), ErrorCode::Config);
    EXPECT_EQ(code_of([&] { apply_param_override(c, "adaboost__n_estimators=5"); }), ErrorCode::UnknownParameter);
}

TEST(Config, BenchmarkConfigLoads)
{
    const auto c = load_config(fixtures::data_dir() / "benchmark.ini");
    EXPECT_EQ(c.model, ModelKind::Cse);
    EXPECT_EQ(c.features.feature_set, FeatureSet::TfidfEmbeddings);
    EXPECT_EQ(c.hyperparams, Hyperparams{});
    EXPECT_EQ(c.hyperparams.logreg.c, 0.1);
    EXPECT_EQ(c.hyperparams.meta.c, 0.1);
    EXPECT_EQ(c.hyperparams.knn_neighbors, 3);
    EXPECT_EQ(c.hyperparams.adaboost.n_estimators, 50);
    EXPECT_EQ(c.hyperparams.bagging.gbdt.n_estimators, 50);
    EXPECT_EQ(c.hyperparams.bagging.gbdt.learning_rate, 0.01);
}

class BundleRoundTrip : public ::testing::TestWithParam<ModelKind> {};

TEST_P(BundleRoundTrip, BitIdenticalBytesAndPredictions)
{
    const FeatureSet set = GetParam() == ModelKind::Knn ? FeatureSet::TfidfEmbeddings : FeatureSet::Tfidf;
    const auto t = train_small(GetParam(), set);
    const std::string bytes = serialize_bundle(t.bundle);
    fixtures::TempDir dir("bundle");
    save_bundle(dir / "m.ssmb", t.bundle);
    const auto loaded = load_bundle(dir / "m.ssmb");
    EXPECT_EQ(serialize_bundle(loaded), bytes);
    EXPECT_EQ(loaded.provenance, t.bundle.provenance);
    EXPECT_EQ(loaded.kind(), GetParam());

    if (set == FeatureSet::Tfidf) {
        const auto fuzz = random_docs(100, 3, t.docs);
        const auto a = predict_bundle(t.bundle, fuzz, nullptr);
        const auto b = predict_bundle(loaded, fuzz, nullptr);
        EXPECT_EQ(a.probs, b.probs);
        EXPECT_EQ(a.labels, b.labels);
    } else {
        const auto& table = fixtures::benchmark_embeddings();
        auto corpus = fixtures::benchmark_corpus();
        const auto a = predict_bundle(t.bundle, corpus.documents, &table);
        const auto b = predict_bundle(loaded, corpus.documents, &table);
        EXPECT_EQ(a.probs, b.probs);
        EXPECT_EQ(code_of([&] { predict_bundle(loaded, corpus.documents, nullptr); }), ErrorCode::MissingEmbedding);
    }
}

INSTANTIATE_TEST_SUITE_P(AllModels, BundleRoundTrip, ::testing::ValuesIn(kAllModelKinds),
                         [](const auto& info) { return std::string(model_kind_name(info.param)); });

TEST(Bundle, CorruptionIsDetected)
{
    const auto t = train_small(ModelKind::LogReg, FeatureSet::Tfidf);
    const std::string bytes = serialize_bundle(t.bundle);
    const std::string manifest = bundle_manifest(bytes);
    EXPECT_NE(manifest.find("logreg"), std::string::npos);
    EXPECT_NE(manifest.find("tfidf"), std::string::npos);

    std::string magic = bytes;
    magic[0] = 'X';
    EXPECT_EQ(code_of([&] { parse_bundle(magic); }), ErrorCode::BadMagic);
    EXPECT_EQ(code_of([&] { parse_bundle(bytes.substr(0, bytes.size() - 10)); }), ErrorCode::Truncated);
    SplitMix64 rng(4);
    for (int i = 0; i < 20; ++i) {
        std::string flipped = bytes;
        const auto at = bytes.size() - 1 - rng.uniform(bytes.size() / 2);
        flipped[at] = static_cast<char>(flipped[at] ^ 0x5A);
        EXPECT_THROW(parse_bundle(flipped), Error) << "byte " << at;
    }
}

TEST(Bundle, FeatureSetMismatch)
{
    const auto t = train_small(ModelKind::Knn, FeatureSet::Tfidf);
    EXPECT_EQ(code_of([&] { predict_bundle(t.bundle, t.docs, nullptr, FeatureSet::TfidfEmbeddings); }),
              ErrorCode::FeatureSetMismatch);
    EXPECT_EQ(predict_bundle(t.bundle, {}, nullptr).labels.size(), 0u);

    const auto e = train_small(ModelKind::LogReg, FeatureSet::TfidfEmbeddings);
    EmbeddingTable other(fixtures::benchmark_embeddings().dim(), Pooling::MeanPool, "other-encoder");
    EXPECT_EQ(code_of([&] { predict_bundle(e.bundle, t.docs, &other); }), ErrorCode::FeatureSetMismatch);
}
