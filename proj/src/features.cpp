#include "stacksent/features.hpp"

#include "stacksent/error.hpp"

namespace stacksent {

std::string_view feature_set_name(FeatureSet set)
{
    return set == FeatureSet::Tfidf ? "tfidf" : "tfidf+emb";
}

FeatureSet parse_feature_set(std::string_view name)
{
    if (name == "tfidf") return FeatureSet::Tfidf;
    if (name == "tfidf+emb") return FeatureSet::TfidfEmbeddings;
    fail(ErrorCode::Config, "unknown feature set '" + std::string(name) + "' (tfidf, tfidf+emb)");
}

Eigen::Index FeaturePipeline::dim() const
{
    return tfidf.dim() + (scaler ? scaler->dim() : 0);
}

FusedVector FeaturePipeline::fused(std::string_view text, const DenseVector* embedding) const
{
    SparseVector sparse = transform_tfidf(tfidf, text);
    if (!needs_embeddings()) return FusedVector{std::move(sparse), Eigen::VectorXd()};
    if (embedding == nullptr) fail(ErrorCode::MissingEmbedding, "pipeline requires an embedding");
    if (embedding->size() != scaler->dim())
        fail(ErrorCode::DimMismatch, "embedding has " + std::to_string(embedding->size()) +
                                         " values, pipeline expects " +
                                         std::to_string(scaler->dim()));
    return fuse(sparse, *embedding, *scaler);
}

FeatureMatrix FeaturePipeline::transform(const std::vector<Document>& docs,
                                         const EmbeddingTable* table) const
{
    if (needs_embeddings()) {
        if (table == nullptr) fail(ErrorCode::MissingEmbedding, "feature set tfidf+emb needs embeddings");
        require_embeddings(docs, *table);
    }
    FeatureMatrix X(static_cast<Eigen::Index>(docs.size()), dim());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        if (needs_embeddings()) {
            const DenseVector e = table->row(docs[i].id);
            fused(docs[i].text, &e).write_to(X.row(r));
        } else {
            fused(docs[i].text, nullptr).write_to(X.row(r));
        }
    }
    return X;
}

FeaturePipeline fit_pipeline(const std::vector<Document>& train_docs, const PipelineOptions& options,
                             const EmbeddingTable* table)
{
    FeaturePipeline p;
    p.feature_set = options.feature_set;
    p.standardize = options.standardize;
    std::vector<std::string> texts;
    texts.reserve(train_docs.size());
    for (const auto& d : train_docs) texts.push_back(d.text);
    p.tfidf = fit_tfidf(texts, options.tfidf);
    if (p.needs_embeddings()) {
        if (table == nullptr) fail(ErrorCode::MissingEmbedding, "feature set tfidf+emb needs embeddings");
        require_embeddings(train_docs, *table);
        std::vector<DocId> ids;
        ids.reserve(train_docs.size());
        for (const auto& d : train_docs) ids.push_back(d.id);
        p.scaler = options.standardize ? fit_scaler(*table, ids) : DenseScaler::identity(table->dim());
        p.embedding_model_id = table->model_id();
    }
    return p;
}

void require_embeddings(const std::vector<Document>& docs, const EmbeddingTable& table)
{
    std::string missing;
    std::size_t count = 0;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (table.contains(docs[i].id)) continue;
        if (++count <= 10) {
            missing += (missing.empty() ? "" : ", ");
            missing += "row " + std::to_string(i + 1) + " (id " + std::to_string(docs[i].id) + ")";
        }
    }
    if (count > 0) {
        fail(ErrorCode::MissingEmbedding, std::to_string(count) + " document(s) lack embeddings: " +
                                              missing + (count > 10 ? ", ..." : ""));
    }
}

} // namespace stacksent
