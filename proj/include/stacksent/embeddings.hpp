#pragma once

#include "stacksent/corpus.hpp"
#include "stacksent/text_features.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace stacksent {

enum class Pooling : std::uint16_t { MeanPool = 0, FirstToken = 1 };

using DenseVector = Eigen::VectorXf;

// Precomputed document embeddings keyed by document id. Rows are kept in
// ascending id order, matching the EMB1 record order.
class EmbeddingTable {
public:
    EmbeddingTable() = default;
    EmbeddingTable(Eigen::Index dim, Pooling pooling, std::string model_id);

    // Throws DimMismatch / NonFinite / InvalidArgument (duplicate id).
    void add(DocId id, const DenseVector& values);

    Eigen::Index dim() const { return dim_; }
    Pooling pooling() const { return pooling_; }
    const std::string& model_id() const { return model_id_; }
    std::size_t size() const { return ids_.size(); }
    bool contains(DocId id) const { return lookup_.contains(id); }

    // Throws MissingEmbedding.
    DenseVector row(DocId id) const;

    // Ids in ascending order.
    std::vector<DocId> ids() const;

private:
    Eigen::Index dim_ = 0;
    Pooling pooling_ = Pooling::MeanPool;
    std::string model_id_;
    std::vector<DocId> ids_;
    std::vector<DenseVector> rows_;
    std::unordered_map<DocId, std::size_t> lookup_;
};

inline constexpr char kEmbeddingMagic[4] = {'E', 'M', 'B', '1'};
inline constexpr std::uint16_t kEmbeddingVersion = 1;

std::string serialize_embeddings(const EmbeddingTable& table);
EmbeddingTable parse_embeddings(std::string_view bytes);

EmbeddingTable load_embeddings(const std::filesystem::path& path);
void write_embeddings(const std::filesystem::path& path, const EmbeddingTable& table);

// Per-dimension z-score parameters fitted on training rows only.
struct DenseScaler {
    Eigen::VectorXd mean;
    Eigen::VectorXd stdev;

    static constexpr double kStdevFloor = 1e-12;

    Eigen::Index dim() const { return mean.size(); }

    // mean 0, stdev 1: leaves the block unscaled.
    static DenseScaler identity(Eigen::Index dim);

    template <typename Derived>
    Eigen::VectorXd apply(const Eigen::MatrixBase<Derived>& x) const
    {
        return ((x.template cast<double>() - mean).array() / stdev.array()).matrix();
    }
};

// Population mean and standard deviation; throws MissingEmbedding naming the
// first absent id.
DenseScaler fit_scaler(const EmbeddingTable& table, std::span<const DocId> train_ids);

// Logical concatenation [sparse | standardised dense].
struct FusedVector {
    SparseVector sparse_part;
    Eigen::VectorXd dense_part;

    Eigen::Index sparse_dim() const { return sparse_part.size(); }
    Eigen::Index total_dim() const { return sparse_part.size() + dense_part.size(); }
    double coeff(Eigen::Index i) const;

    // Writes into a row expression (matrix row, block or vector).
    template <typename Derived>
    void write_to(const Eigen::MatrixBase<Derived>& out) const
    {
        auto& row = const_cast<Eigen::MatrixBase<Derived>&>(out);
        row.setZero();
        for (SparseVector::InnerIterator it(sparse_part); it; ++it) row(it.index()) = it.value();
        row.tail(dense_part.size()) = dense_part.transpose();
    }

    Eigen::RowVectorXd to_dense() const;
};

// Throws LengthMismatch when the dense length differs from the scaler.
FusedVector fuse(const SparseVector& sparse, const DenseVector& dense, const DenseScaler& scaler);

} // namespace stacksent
