#pragma once

#include "stacksent/corpus.hpp"
#include "stacksent/embeddings.hpp"
#include "stacksent/text_features.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stacksent {

enum class FeatureSet { Tfidf, TfidfEmbeddings };

std::string_view feature_set_name(FeatureSet set); // "tfidf" / "tfidf+emb"
FeatureSet parse_feature_set(std::string_view name);

using FeatureMatrix = Eigen::MatrixXd;

// Fitted text -> feature-row transformation.
struct FeaturePipeline {
    FeatureSet feature_set = FeatureSet::Tfidf;
    TfidfModel tfidf;
    std::optional<DenseScaler> scaler; // set iff feature_set is TfidfEmbeddings
    bool standardize = true;
    std::string embedding_model_id;

    Eigen::Index dim() const;
    bool needs_embeddings() const { return feature_set == FeatureSet::TfidfEmbeddings; }

    // `embedding` is ignored for tfidf-only pipelines.
    FusedVector fused(std::string_view text, const DenseVector* embedding) const;

    // One dense row per document; embeddings are joined by document id.
    FeatureMatrix transform(const std::vector<Document>& docs, const EmbeddingTable* table) const;
};

struct PipelineOptions {
    FeatureSet feature_set = FeatureSet::Tfidf;
    TfidfConfig tfidf;
    bool standardize = true;
};

// Fits TF-IDF (and the dense scaler) on the training documents only.
FeaturePipeline fit_pipeline(const std::vector<Document>& train_docs, const PipelineOptions& options,
                             const EmbeddingTable* table);

// Checks that every document has an embedding; the MissingEmbedding message
// lists the offending positions and ids.
void require_embeddings(const std::vector<Document>& docs, const EmbeddingTable& table);

} // namespace stacksent
