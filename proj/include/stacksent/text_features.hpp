#pragma once

#include "stacksent/corpus.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace stacksent {

// Sorted (index, value) pairs with strictly increasing indices.
using SparseVector = Eigen::SparseVector<double>;

struct TfidfConfig {
    int min_df = 1;
    int ngram_max = 1;
};

// Maximal runs of letters/digits, lowercased, followed by word n-grams up to
// `ngram_max` joined with a single space (all unigrams, then all bigrams...).
std::vector<std::string> tokenize(std::string_view text, int ngram_max = 1);

class TfidfModel {
public:
    TfidfModel() = default;

    // Rebuilds a model from (token, doc_freq) pairs; idf is recomputed.
    TfidfModel(std::vector<std::string> tokens, std::vector<std::int64_t> doc_freq,
               std::int64_t n_docs, TfidfConfig config);

    Eigen::Index dim() const { return static_cast<Eigen::Index>(tokens_.size()); }
    std::int64_t n_docs() const { return n_docs_; }
    const TfidfConfig& config() const { return config_; }
    const std::vector<std::string>& tokens() const { return tokens_; }
    const std::vector<std::int64_t>& doc_freq() const { return doc_freq_; }
    const Eigen::VectorXd& idf() const { return idf_; }

    // -1 when out of vocabulary.
    Eigen::Index index_of(const std::string& token) const;

    static double smoothed_idf(std::int64_t n_docs, std::int64_t doc_freq);

private:
    std::vector<std::string> tokens_;
    std::vector<std::int64_t> doc_freq_;
    Eigen::VectorXd idf_;
    std::unordered_map<std::string, Eigen::Index> lookup_;
    std::int64_t n_docs_ = 0;
    TfidfConfig config_;
};

TfidfModel fit_tfidf(const std::vector<std::string>& texts, const TfidfConfig& config = {});
TfidfModel fit_tfidf(const LabeledCorpus& corpus, const TfidfConfig& config = {});

// Raw counts times idf, L2-normalised; out-of-vocabulary tokens are ignored.
SparseVector transform_tfidf(const TfidfModel& model, std::string_view text);

} // namespace stacksent
