#include "stacksent/embeddings.hpp"

#include "stacksent/binary_io.hpp"
#include "stacksent/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stacksent {

EmbeddingTable::EmbeddingTable(Eigen::Index dim, Pooling pooling, std::string model_id)
    : dim_(dim), pooling_(pooling), model_id_(std::move(model_id))
{
    if (dim < 1) fail(ErrorCode::InvalidArgument, "embedding dimension must be positive");
}

void EmbeddingTable::add(DocId id, const DenseVector& values)
{
    if (values.size() != dim_)
        fail(ErrorCode::DimMismatch, "row of length " + std::to_string(values.size()) +
                                         " in a table of dim " + std::to_string(dim_));
    if (!values.allFinite())
        fail(ErrorCode::NonFinite, "non-finite value in embedding for id " + std::to_string(id));
    if (lookup_.contains(id))
        fail(ErrorCode::InvalidArgument, "duplicate embedding id " + std::to_string(id));
    lookup_.emplace(id, rows_.size());
    ids_.push_back(id);
    rows_.push_back(values);
}

DenseVector EmbeddingTable::row(DocId id) const
{
    const auto it = lookup_.find(id);
    if (it == lookup_.end())
        fail(ErrorCode::MissingEmbedding, "no embedding for document id " + std::to_string(id));
    return rows_[it->second];
}

std::vector<DocId> EmbeddingTable::ids() const
{
    auto out = ids_;
    std::sort(out.begin(), out.end());
    return out;
}

std::string serialize_embeddings(const EmbeddingTable& table)
{
    ByteWriter w;
    w.put_bytes(std::string_view(kEmbeddingMagic, 4));
    w.put(kEmbeddingVersion);
    w.put(static_cast<std::uint16_t>(table.pooling()));
    w.put(static_cast<std::uint32_t>(table.dim()));
    w.put(static_cast<std::uint32_t>(table.size()));
    w.put(static_cast<std::uint16_t>(table.model_id().size()));
    w.put_bytes(table.model_id());
    for (DocId id : table.ids()) {
        w.put(static_cast<std::uint64_t>(id));
        const DenseVector v = table.row(id);
        for (Eigen::Index j = 0; j < v.size(); ++j) w.put(v(j));
    }
    return w.take();
}

EmbeddingTable parse_embeddings(std::string_view bytes)
{
    ByteReader r(bytes);
    if (bytes.size() < 4 || bytes.substr(0, 4) != std::string_view(kEmbeddingMagic, 4))
        fail(ErrorCode::BadMagic, "not an EMB1 file");
    r.get_bytes(4);
    const auto version = r.get<std::uint16_t>();
    if (version != kEmbeddingVersion)
        fail(ErrorCode::Malformed, "unsupported EMB1 version " + std::to_string(version));
    const auto pooling = r.get<std::uint16_t>();
    if (pooling > 1) fail(ErrorCode::Malformed, "unknown pooling code " + std::to_string(pooling));
    const auto dim = r.get<std::uint32_t>();
    const auto count = r.get<std::uint32_t>();
    const auto id_len = r.get<std::uint16_t>();
    std::string model_id(r.get_bytes(id_len));
    if (dim == 0) fail(ErrorCode::DimMismatch, "header declares dim 0");

    const std::size_t record = 8 + 4 * static_cast<std::size_t>(dim);
    const std::size_t expected = record * count;
    const std::size_t remaining = r.remaining();
    if (remaining != expected) {
        // A payload that divides evenly into `count` records of another
        // length means the records disagree with the header dim.
        const bool other_length = count > 0 && remaining % count == 0 &&
                                  remaining / count >= 8 && (remaining / count - 8) % 4 == 0;
        if (remaining > expected || other_length)
            fail(ErrorCode::DimMismatch, "records are not " + std::to_string(dim) + " floats wide");
        fail(ErrorCode::Truncated, "payload holds " + std::to_string(remaining) + " of " +
                                       std::to_string(expected) + " bytes");
    }

    EmbeddingTable table(dim, static_cast<Pooling>(pooling), std::move(model_id));
    DocId previous = 0;
    DenseVector values(dim);
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto id = r.get<std::uint64_t>();
        if (i > 0 && id <= previous)
            fail(ErrorCode::Malformed, "record " + std::to_string(i) + " is not in ascending id order");
        previous = id;
        for (std::uint32_t j = 0; j < dim; ++j) values(j) = r.get<float>();
        if (!values.allFinite())
            fail(ErrorCode::NonFinite, "record " + std::to_string(i) + " (id " + std::to_string(id) +
                                           ") contains a non-finite value");
        table.add(id, values);
    }
    return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path)
{
    return parse_embeddings(read_file(path));
}

void write_embeddings(const std::filesystem::path& path, const EmbeddingTable& table)
{
    write_file_atomic(path, serialize_embeddings(table));
}

DenseScaler DenseScaler::identity(Eigen::Index dim)
{
    return DenseScaler{Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim)};
}

DenseScaler fit_scaler(const EmbeddingTable& table, std::span<const DocId> train_ids)
{
    if (train_ids.empty()) fail(ErrorCode::InvalidArgument, "scaler needs at least one row");
    const Eigen::Index dim = table.dim();
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
    for (DocId id : train_ids) sum += table.row(id).cast<double>();
    const double n = static_cast<double>(train_ids.size());
    DenseScaler scaler;
    scaler.mean = sum / n;
    Eigen::VectorXd sq = Eigen::VectorXd::Zero(dim);
    for (DocId id : train_ids) sq += (table.row(id).cast<double>() - scaler.mean).array().square().matrix();
    scaler.stdev = (sq / n).array().sqrt().max(DenseScaler::kStdevFloor).matrix();
    return scaler;
}

double FusedVector::coeff(Eigen::Index i) const
{
    if (i < sparse_part.size()) return sparse_part.coeff(i);
    return dense_part(i - sparse_part.size());
}

Eigen::RowVectorXd FusedVector::to_dense() const
{
    Eigen::RowVectorXd row(total_dim());
    write_to(row);
    return row;
}

FusedVector fuse(const SparseVector& sparse, const DenseVector& dense, const DenseScaler& scaler)
{
    if (dense.size() != scaler.dim())
        fail(ErrorCode::LengthMismatch, "dense block has " + std::to_string(dense.size()) +
                                            " values, scaler expects " + std::to_string(scaler.dim()));
    return FusedVector{sparse, scaler.apply(dense)};
}

} // namespace stacksent
