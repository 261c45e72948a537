#include "stacksent/classifier.hpp"

#include "stacksent/random.hpp"

namespace stacksent {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

} // namespace

ModelKind kind_of(const Classifier& model)
{
    return std::visit(overloaded{
                          [](const LogRegModel&) { return ModelKind::LogReg; },
                          [](const KnnModel&) { return ModelKind::Knn; },
                          [](const BaggedModel&) { return ModelKind::BaggedGbdt; },
                          [](const AdaBoostModel&) { return ModelKind::AdaBoost; },
                          [](const StackedEnsemble&) { return ModelKind::Cse; },
                      },
                      model);
}

Classifier train_classifier(ModelKind kind, const Eigen::MatrixXd& X, std::span<const Label> y,
                            const Hyperparams& hp, std::uint64_t seed, BaseFitCache* cache)
{
    switch (kind) {
    case ModelKind::LogReg: return train_logreg(X, y, hp.logreg);
    case ModelKind::Knn: return train_knn(X, y, hp.knn_neighbors);
    case ModelKind::BaggedGbdt: return train_bagged_gbdt(X, y, hp.bagging, derive_seed(seed, "bagged"));
    case ModelKind::AdaBoost: return train_adaboost(X, y, hp.adaboost);
    case ModelKind::Cse: return train_stacked(X, y, hp, seed, cache);
    }
    return {};
}

ProbDist predict_proba(const Classifier& model, const RowRef& x)
{
    return std::visit(overloaded{
                          [&](const LogRegModel& m) { return predict_logreg(m, x); },
                          [&](const KnnModel& m) { return predict_knn(m, x); },
                          [&](const BaggedModel& m) { return predict_bagged(m, x); },
                          [&](const AdaBoostModel& m) { return predict_adaboost(m, x); },
                          [&](const StackedEnsemble& m) { return predict_stacked(m, x); },
                      },
                      model);
}

ProbMatrix predict_proba_rows(const Classifier& model, const Eigen::MatrixXd& X)
{
    if (const auto* m = std::get_if<LogRegModel>(&model)) return predict_logreg_rows(*m, X);
    ProbMatrix out(X.rows(), kNumClasses);
    for (Eigen::Index i = 0; i < X.rows(); ++i) out.row(i) = predict_proba(model, X.row(i)).transpose();
    return out;
}

Label predict_label(const Classifier& model, const RowRef& x)
{
    if (const auto* knn = std::get_if<KnnModel>(&model)) return query_knn(*knn, x).label;
    return argmax_label(predict_proba(model, x));
}

std::vector<Label> predict_labels(const Classifier& model, const Eigen::MatrixXd& X)
{
    std::vector<Label> out;
    out.reserve(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index i = 0; i < X.rows(); ++i) out.push_back(predict_label(model, X.row(i)));
    return out;
}

} // namespace stacksent
