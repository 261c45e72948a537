#pragma once

#include "stacksent/label.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

namespace stacksent {

struct KnnModel {
    int k = 3; // `knn__n_neighbors`
    Eigen::MatrixXd points;
    std::vector<Label> labels;
};

struct KnnPrediction {
    ProbDist probs;
    Label label = Label::Negative;
    std::vector<std::size_t> neighbors; // nearest first
};

// Throws KTooLarge when k exceeds the number of training rows.
KnnModel train_knn(const Eigen::MatrixXd& X, std::span<const Label> y, int k);

// Euclidean distance; distance ties go to the lower training index. The
// label is the majority vote, ties broken by the smaller summed neighbour
// distance and then the lower label index.
KnnPrediction query_knn(const KnnModel& model, const RowRef& x);

ProbDist predict_knn(const KnnModel& model, const RowRef& x);
ProbMatrix predict_knn_rows(const KnnModel& model, const Eigen::MatrixXd& X);

} // namespace stacksent
