#pragma once

#include "stacksent/classifier.hpp"
#include "stacksent/config.hpp"
#include "stacksent/features.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace stacksent {

// Bundle container, all integers little-endian:
//
//   "SSMB" | u16 format version | u32-prefixed manifest text |
//   u32 section count | per section: u32-prefixed name, u64 size,
//   u64 FNV-1a of the payload, payload bytes
//
// The manifest is "key=value" lines (format, version, byte order, real
// encoding, model kind, feature set, config hash, section list). Sections:
// "config" (the experiment INI), "pipeline", "model", "provenance".
inline constexpr std::uint16_t kBundleVersion = 1;

struct TrainingProvenance {
    std::uint64_t config_hash = 0;
    std::uint64_t split_seed = 0;
    std::uint64_t folds_seed = 0;
    std::uint64_t train_seed = 0;
    std::uint64_t corpus_fingerprint = 0;
    std::string embedding_model_id;
    std::uint64_t train_rows = 0;
    std::uint64_t test_rows = 0;

    bool operator==(const TrainingProvenance&) const = default;
};

struct ModelBundle {
    FeaturePipeline pipeline;
    Classifier model;
    std::string config_ini; // to_ini of the training config
    TrainingProvenance provenance;

    ModelKind kind() const { return kind_of(model); }
};

std::string serialize_bundle(const ModelBundle& bundle);

// Throws BadMagic, Truncated or BadBundle (version, checksum, config hash or
// payload inconsistencies).
ModelBundle parse_bundle(std::string_view bytes);

void save_bundle(const std::filesystem::path& path, const ModelBundle& bundle);
ModelBundle load_bundle(const std::filesystem::path& path);

// Manifest lines of a serialized bundle, for inspection.
std::string bundle_manifest(std::string_view bytes);

// Order-sensitive digest of document ids and labels.
std::uint64_t corpus_fingerprint(const std::vector<Document>& docs);

struct BundlePredictions {
    ProbMatrix probs;
    std::vector<Label> labels;
};

// Runs the bundled pipeline and model over documents. Throws
// FeatureSetMismatch when `requested` names another feature set or the
// embeddings come from a different encoder, MissingEmbedding when rows lack
// embeddings.
BundlePredictions predict_bundle(const ModelBundle& bundle, const std::vector<Document>& docs,
                                 const EmbeddingTable* table,
                                 std::optional<FeatureSet> requested = std::nullopt);

} // namespace stacksent
