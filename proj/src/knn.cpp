#include "stacksent/knn.hpp"

#include "stacksent/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <utility>

namespace stacksent {

KnnModel train_knn(const Eigen::MatrixXd& X, std::span<const Label> y, int k)
{
    if (static_cast<std::size_t>(X.rows()) != y.size())
        fail(ErrorCode::LengthMismatch, "rows and labels differ in count");
    if (k < 1) fail(ErrorCode::InvalidArgument, "knn__n_neighbors must be at least 1");
    if (k > X.rows())
        fail(ErrorCode::KTooLarge, "knn__n_neighbors=" + std::to_string(k) + " exceeds " +
                                       std::to_string(X.rows()) + " training rows");
    return KnnModel{k, X, std::vector<Label>(y.begin(), y.end())};
}

KnnPrediction query_knn(const KnnModel& model, const RowRef& x)
{
    if (x.size() != model.points.cols())
        fail(ErrorCode::DimMismatch, "query has " + std::to_string(x.size()) +
                                         " features, model expects " +
                                         std::to_string(model.points.cols()));
    const Eigen::VectorXd dist2 = (model.points.rowwise() - x).rowwise().squaredNorm();

    std::vector<std::pair<double, std::size_t>> order(static_cast<std::size_t>(dist2.size()));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = {dist2(static_cast<Eigen::Index>(i)), i};
    const auto k = static_cast<std::size_t>(model.k);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end());

    KnnPrediction out;
    std::array<int, kNumClasses> votes{};
    std::array<double, kNumClasses> summed{};
    for (std::size_t j = 0; j < k; ++j) {
        const auto [d2, idx] = order[j];
        const int c = index_of(model.labels[idx]);
        ++votes[c];
        summed[c] += std::sqrt(d2);
        out.neighbors.push_back(idx);
    }
    int best = 0;
    for (int c = 1; c < kNumClasses; ++c) {
        if (votes[c] > votes[best] || (votes[c] == votes[best] && summed[c] < summed[best])) best = c;
    }
    for (int c = 0; c < kNumClasses; ++c) out.probs(c) = static_cast<double>(votes[c]) / model.k;
    out.label = label_from_index(best);
    return out;
}

ProbDist predict_knn(const KnnModel& model, const RowRef& x)
{
    return query_knn(model, x).probs;
}

ProbMatrix predict_knn_rows(const KnnModel& model, const Eigen::MatrixXd& X)
{
    ProbMatrix out(X.rows(), kNumClasses);
    for (Eigen::Index i = 0; i < X.rows(); ++i) out.row(i) = predict_knn(model, X.row(i)).transpose();
    return out;
}

} // namespace stacksent
