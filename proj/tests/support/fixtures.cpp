#include "fixtures.hpp"

#include "stacksent/features.hpp"
#include "stacksent/random.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace fixtures {

using namespace stacksent;

std::filesystem::path data_dir() { return STACKSENT_DATA_DIR; }
std::filesystem::path cli_path() { return STACKSENT_CLI; }

Dataset blobs(int per_class, int dim, double separation, double noise, std::uint64_t seed)
{
    SplitMix64 rng(seed);
    Dataset d;
    d.X.resize(3 * per_class, dim);
    for (int k = 0; k < 3; ++k) {
        for (int i = 0; i < per_class; ++i) {
            const int r = k * per_class + i;
            for (int j = 0; j < dim; ++j) d.X(r, j) = noise * rng.normal();
            d.X(r, k) += separation;
            d.y.push_back(label_from_index(k));
        }
    }
    return d;
}

Dataset xor_quadrants(int per_quadrant, std::uint64_t seed)
{
    SplitMix64 rng(seed);
    Dataset d;
    d.X.resize(4 * per_quadrant, 2);
    int r = 0;
    for (int sx : {-1, 1}) {
        for (int sy : {-1, 1}) {
            for (int i = 0; i < per_quadrant; ++i, ++r) {
                d.X(r, 0) = sx * (0.1 + 0.9 * rng.uniform01());
                d.X(r, 1) = sy * (0.1 + 0.9 * rng.uniform01());
                d.y.push_back(sx == sy ? Label::Positive : Label::Negative);
            }
        }
    }
    return d;
}

Dataset random_dataset(int rows, int dim, std::uint64_t seed)
{
    SplitMix64 rng(seed);
    Dataset d;
    d.X.resize(rows, dim);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < dim; ++j) d.X(i, j) = rng.normal();
        d.y.push_back(label_from_index(i % 3));
    }
    return d;
}

LabeledCorpus benchmark_corpus() { return preprocess(load_corpus(data_dir() / "benchmark.csv")); }

const EmbeddingTable& benchmark_embeddings()
{
    static const EmbeddingTable table = load_embeddings(data_dir() / "benchmark.emb1");
    return table;
}

ExperimentConfig benchmark_config(const std::filesystem::path& out_dir)
{
    ExperimentConfig c = load_config(data_dir() / "benchmark.ini");
    c.corpus = data_dir() / "benchmark.csv";
    c.embeddings = data_dir() / "benchmark.emb1";
    c.out_dir = out_dir;
    return c;
}

Dataset benchmark_features(FeatureSet set)
{
    const auto corpus = benchmark_corpus();
    PipelineOptions options;
    options.feature_set = set;
    const auto pipeline = fit_pipeline(corpus.documents, options, &benchmark_embeddings());
    return {pipeline.transform(corpus.documents, &benchmark_embeddings()), corpus.labels()};
}

TempDir::TempDir(const std::string& tag)
{
    std::string pattern = (std::filesystem::temp_directory_path() / ("stacksent-" + tag + "-XXXXXX")).string();
    if (::mkdtemp(pattern.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    path_ = pattern;
}

TempDir::~TempDir()
{
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

std::string slurp(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream(path, std::ios::binary) << text;
}

CliRun run_cli(const std::string& args, const std::filesystem::path& workdir)
{
    const auto out = workdir / ".cli_stdout";
    const auto err = workdir / ".cli_stderr";
    const std::string cmd = "cd '" + workdir.string() + "' && '" + cli_path().string() + "' " +
                            args + " >'" + out.string() + "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    CliRun run;
    run.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    run.out = slurp(out);
    run.err = slurp(err);
    return run;
}

} // namespace fixtures
