#pragma once

#include "stacksent/corpus.hpp"
#include "stacksent/embeddings.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace stacksent {

struct SyntheticOptions {
    std::size_t documents = 300;
    std::uint64_t seed = 20240601;
    Eigen::Index embedding_dim = 32;
    double label_noise = 0.03;
    // Extra raw rows that preprocessing removes (case/whitespace duplicates
    // and blank texts).
    std::size_t messy_rows = 8;
};

struct SyntheticCorpus {
    LabeledCorpus raw;         // as written to CSV, before preprocessing
    EmbeddingTable embeddings; // keyed by normalised-text id
};

// Customer-feedback style sentences about hotels and restaurants. Each
// document mixes sentiment cues of its own class with cues of other
// classes; pseudo-embeddings carry a noisy class direction plus a random
// projection of the document's words.
SyntheticCorpus generate_synthetic(const SyntheticOptions& options = {});

std::string corpus_to_csv(const LabeledCorpus& corpus);

void write_synthetic(const SyntheticCorpus& corpus, const std::filesystem::path& csv_path,
                     const std::filesystem::path& emb_path);

} // namespace stacksent
