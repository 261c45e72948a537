#include "stacksent/text_features.hpp"

#include "stacksent/error.hpp"
#include "stacksent/utf8.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace stacksent {

std::vector<std::string> tokenize(std::string_view text, int ngram_max)
{
    std::vector<std::string> words;
    std::string current;
    for (char32_t cp : utf8::decode(text)) {
        if (utf8::is_alnum(cp)) {
            utf8::append(current, utf8::to_lower(cp));
        } else if (!current.empty()) {
            words.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) words.push_back(std::move(current));

    std::vector<std::string> tokens = words;
    for (int n = 2; n <= ngram_max; ++n) {
        for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= words.size(); ++i) {
            std::string gram = words[i];
            for (int j = 1; j < n; ++j) {
                gram.push_back(' ');
                gram += words[i + static_cast<std::size_t>(j)];
            }
            tokens.push_back(std::move(gram));
        }
    }
    return tokens;
}

TfidfModel::TfidfModel(std::vector<std::string> tokens, std::vector<std::int64_t> doc_freq,
                       std::int64_t n_docs, TfidfConfig config)
    : tokens_(std::move(tokens)), doc_freq_(std::move(doc_freq)), n_docs_(n_docs), config_(config)
{
    if (tokens_.size() != doc_freq_.size())
        fail(ErrorCode::LengthMismatch, "token and document-frequency lists differ in length");
    if (!std::is_sorted(tokens_.begin(), tokens_.end()) ||
        std::adjacent_find(tokens_.begin(), tokens_.end()) != tokens_.end())
        fail(ErrorCode::InvalidArgument, "vocabulary must be strictly lexicographic");
    idf_.resize(dim());
    lookup_.reserve(tokens_.size());
    for (Eigen::Index i = 0; i < dim(); ++i) {
        const auto u = static_cast<std::size_t>(i);
        if (doc_freq_[u] < 1 || doc_freq_[u] > n_docs_)
            fail(ErrorCode::InvalidArgument, "document frequency out of range for '" + tokens_[u] + "'");
        idf_(i) = smoothed_idf(n_docs_, doc_freq_[u]);
        lookup_.emplace(tokens_[u], i);
    }
}

Eigen::Index TfidfModel::index_of(const std::string& token) const
{
    const auto it = lookup_.find(token);
    return it == lookup_.end() ? -1 : it->second;
}

double TfidfModel::smoothed_idf(std::int64_t n_docs, std::int64_t doc_freq)
{
    return std::log((1.0 + static_cast<double>(n_docs)) / (1.0 + static_cast<double>(doc_freq))) +
           1.0;
}

TfidfModel fit_tfidf(const std::vector<std::string>& texts, const TfidfConfig& config)
{
    if (texts.empty()) fail(ErrorCode::EmptyVocabulary, "cannot fit TF-IDF on an empty corpus");
    if (config.min_df < 1 || config.ngram_max < 1)
        fail(ErrorCode::InvalidArgument, "min_df and ngram_max must be at least 1");

    std::map<std::string, std::int64_t> df;
    for (const auto& text : texts) {
        auto tokens = tokenize(text, config.ngram_max);
        std::sort(tokens.begin(), tokens.end());
        tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
        for (auto& t : tokens) ++df[std::move(t)];
    }

    std::vector<std::string> vocab;
    std::vector<std::int64_t> freq;
    for (const auto& [token, count] : df) {
        if (count >= config.min_df) {
            vocab.push_back(token);
            freq.push_back(count);
        }
    }
    if (vocab.empty())
        fail(ErrorCode::EmptyVocabulary,
             "no token reaches min_df=" + std::to_string(config.min_df));
    return TfidfModel(std::move(vocab), std::move(freq), static_cast<std::int64_t>(texts.size()),
                      config);
}

TfidfModel fit_tfidf(const LabeledCorpus& corpus, const TfidfConfig& config)
{
    return fit_tfidf(corpus.texts(), config);
}

SparseVector transform_tfidf(const TfidfModel& model, std::string_view text)
{
    std::map<Eigen::Index, double> counts;
    for (const auto& token : tokenize(text, model.config().ngram_max)) {
        const Eigen::Index idx = model.index_of(token);
        if (idx >= 0) counts[idx] += 1.0;
    }

    SparseVector out(model.dim());
    out.reserve(static_cast<Eigen::Index>(counts.size()));
    double norm2 = 0.0;
    for (auto& [idx, value] : counts) {
        value *= model.idf()(idx);
        norm2 += value * value;
    }
    const double scale = norm2 > 0.0 ? 1.0 / std::sqrt(norm2) : 0.0;
    for (const auto& [idx, value] : counts) out.insertBack(idx) = value * scale;
    return out;
}

} // namespace stacksent
