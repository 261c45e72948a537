#pragma once

#include "stacksent/config.hpp"
#include "stacksent/corpus.hpp"
#include "stacksent/embeddings.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace fixtures {

std::filesystem::path data_dir();
std::filesystem::path cli_path();

struct Dataset {
    Eigen::MatrixXd X;
    std::vector<stacksent::Label> y;
};

// Three Gaussian blobs centred at `separation` times the first three unit
// axes (dim >= 3).
Dataset blobs(int per_class, int dim, double separation, double noise, std::uint64_t seed);

// Points in the four quadrants of [-1,1]^2; label Positive when the signs
// agree, Negative otherwise.
Dataset xor_quadrants(int per_quadrant, std::uint64_t seed);

Dataset random_dataset(int rows, int dim, std::uint64_t seed);

// Preprocessed benchmark corpus and its embedding table.
stacksent::LabeledCorpus benchmark_corpus();
const stacksent::EmbeddingTable& benchmark_embeddings();

// data/benchmark.ini with absolute data paths and the given output dir.
stacksent::ExperimentConfig benchmark_config(const std::filesystem::path& out_dir);

// Fused feature matrix of the whole benchmark corpus.
Dataset benchmark_features(stacksent::FeatureSet set);

class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

struct CliRun {
    int exit_code = -1;
    std::string out;
    std::string err;
};
CliRun run_cli(const std::string& args, const std::filesystem::path& workdir);

std::string slurp(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

} // namespace fixtures
