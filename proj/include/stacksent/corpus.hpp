#pragma once

#include "stacksent/label.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stacksent {

using DocId = std::uint64_t;

struct Document {
    DocId id = 0;
    std::string text;
    std::optional<Label> label;
};

struct CsvSchema {
    std::string text_column = "text";
    std::string label_column = "label";
};

struct Provenance {
    std::string source;
    bool preprocessed = false;
    std::size_t dropped_empty = 0;
    std::size_t dropped_unlabeled = 0;
    std::size_t dropped_duplicates = 0;
};

struct LabeledCorpus {
    std::vector<Document> documents;
    Provenance provenance;

    std::size_t size() const { return documents.size(); }
    bool empty() const { return documents.empty(); }
    std::vector<Label> labels() const;
    std::vector<std::string> texts() const;
    std::vector<DocId> ids() const;
};

// Lowercase, trim and collapse whitespace runs to a single ASCII space.
std::string normalize_text(std::string_view text);

DocId document_id(std::string_view normalized_text);

// Reads an RFC-4180 CSV with a header row. With `require_labels` false the
// label column may be absent (prediction input); otherwise every row must
// carry a recognised label.
LabeledCorpus load_corpus(const std::filesystem::path& path, const CsvSchema& schema = {},
                          bool require_labels = true);

LabeledCorpus preprocess(const LabeledCorpus& corpus);

// As preprocess, but keeps unlabeled rows (prediction input).
LabeledCorpus preprocess_unlabeled(const LabeledCorpus& corpus);

struct SplitPlan {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    double test_fraction = 0.2;
    std::uint64_t seed = 0;
    bool stratified = true;
};

SplitPlan split(std::span<const Label> labels, double test_fraction, std::uint64_t seed,
                bool stratified = true);
SplitPlan split(const LabeledCorpus& corpus, double test_fraction, std::uint64_t seed,
                bool stratified = true);

struct FoldPlan {
    int k = 5;
    // fold id of every position in the index list handed to make_folds
    std::vector<int> assignments;
    std::vector<std::size_t> indices;
    bool stratified = true;
    std::uint64_t seed = 0;

    std::vector<std::size_t> fold_members(int fold) const;
    std::vector<std::size_t> fold_complement(int fold) const;
};

FoldPlan make_folds(std::span<const std::size_t> indices, std::span<const Label> labels, int k,
                    bool stratified, std::uint64_t seed);

// Folds over 0..n-1.
FoldPlan make_folds(std::span<const Label> labels, int k, bool stratified, std::uint64_t seed);

} // namespace stacksent
