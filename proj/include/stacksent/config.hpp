#pragma once

#include "stacksent/corpus.hpp"
#include "stacksent/evaluation.hpp"
#include "stacksent/features.hpp"
#include "stacksent/hyperparams.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stacksent {

// Everything one experiment needs. Stored as an INI file:
//
//   [data]        corpus, embeddings, text_col, label_col
//   [features]    set, min_df, ngram_max, standardize
//   [split]       test_fraction, seed, stratified
//   [folds]       k, stratified, seed
//   [model]       kind, seed
//   [hyperparams] one line per grid key, e.g. logreg__C = 0.1
//   [grid]        key = comma-separated values; metric
//   [compare]     models, feature_sets
//   [output]      dir, averaging
struct ExperimentConfig {
    std::filesystem::path corpus;
    std::optional<std::filesystem::path> embeddings;
    CsvSchema schema;

    PipelineOptions features;

    double test_fraction = 0.2;
    std::uint64_t split_seed = 42;
    bool split_stratified = true;

    int folds = 5;
    bool folds_stratified = true;
    std::uint64_t folds_seed = 42;

    ModelKind model = ModelKind::Cse;
    std::uint64_t train_seed = 42;
    Hyperparams hyperparams;

    GridSpec grid;
    SelectionMetric grid_metric = SelectionMetric::Accuracy;

    std::vector<ModelKind> compare_models{kAllModelKinds.begin(), kAllModelKinds.end()};
    std::vector<FeatureSet> compare_features{FeatureSet::Tfidf, FeatureSet::TfidfEmbeddings};

    std::filesystem::path out_dir = "out";
    Averaging averaging = Averaging::Weighted;

    // Sets every seed at once.
    void set_seed(std::uint64_t seed);

    // Throws Config when the feature set needs embeddings but none are
    // configured, when a number is out of range, and UnknownParameter when a
    // grid key does not apply to the model.
    void validate() const;
};

// Throws Config on malformed files or values and UnknownParameter on
// unknown hyperparameter keys.
ExperimentConfig parse_config(std::string_view ini_text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Every field in a fixed order; parse_config(to_ini(c)) reproduces c.
std::string to_ini(const ExperimentConfig& config);

// FNV-1a of to_ini(config).
std::uint64_t config_hash(const ExperimentConfig& config);

// "key=value" from the command line.
void apply_param_override(ExperimentConfig& config, std::string_view assignment);

} // namespace stacksent
