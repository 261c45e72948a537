#pragma once

#include "stacksent/hyperparams.hpp"
#include "stacksent/stacking.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace stacksent {

// A trained model of any of the five kinds.
using Classifier = std::variant<LogRegModel, KnnModel, BaggedModel, AdaBoostModel, StackedEnsemble>;

ModelKind kind_of(const Classifier& model);

// `seed` feeds the stochastic steps (bagging bootstraps, stacking folds).
Classifier train_classifier(ModelKind kind, const Eigen::MatrixXd& X, std::span<const Label> y,
                            const Hyperparams& hp, std::uint64_t seed,
                            BaseFitCache* cache = nullptr);

ProbMatrix predict_proba_rows(const Classifier& model, const Eigen::MatrixXd& X);
ProbDist predict_proba(const Classifier& model, const RowRef& x);

// Argmax with lower-index ties, except KNN which applies its own vote
// tie-break.
std::vector<Label> predict_labels(const Classifier& model, const Eigen::MatrixXd& X);
Label predict_label(const Classifier& model, const RowRef& x);

} // namespace stacksent
