#include "stacksent/boosting.hpp"

#include "stacksent/error.hpp"
#include "stacksent/logreg.hpp"

#include <cmath>

namespace stacksent {

namespace {

constexpr double kZeroError = 1e-10;

}

AdaBoostModel train_adaboost(const Eigen::MatrixXd& X, std::span<const Label> y,
                             const AdaBoostConfig& config)
{
    check_training_set(X.rows(), y, 2);
    if (config.n_estimators < 1) fail(ErrorCode::InvalidArgument, "adaboost__n_estimators must be >= 1");

    const std::size_t n = y.size();
    const double chance_error = 1.0 - 1.0 / kNumClasses;
    const ColumnIndex index(X);
    std::vector<double> w(n, 1.0 / static_cast<double>(n));

    AdaBoostModel model;
    model.config = config;
    const TreeConfig tree_config{config.max_depth, config.min_leaf};
    std::vector<char> missed(n);
    for (int stage = 0; stage < config.n_estimators; ++stage) {
        DecisionTree tree = fit_classification_tree(X, index, y, w, tree_config);
        double error = 0.0;
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Label predicted = argmax_label(tree.predict_distribution(X.row(static_cast<Eigen::Index>(i))));
            missed[i] = predicted != y[i];
            total += w[i];
            if (missed[i]) error += w[i];
        }
        error /= total;

        if (error >= chance_error) {
            if (model.stages.empty())
                fail(ErrorCode::DegenerateStage,
                     "first stage error " + std::to_string(error) + " does not beat chance");
            break;
        }
        const bool perfect = error <= kZeroError;
        const double e = perfect ? kZeroError : error;
        const double alpha = std::log((1.0 - e) / e) + std::log(kNumClasses - 1.0);
        model.stages.push_back(AdaBoostStage{std::move(tree), alpha, error});
        if (perfect) break;

        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (missed[i]) w[i] *= std::exp(alpha);
            sum += w[i];
        }
        for (double& wi : w) wi /= sum;
    }
    return model;
}

ProbDist predict_adaboost(const AdaBoostModel& model, const RowRef& x)
{
    ProbDist votes = ProbDist::Zero();
    double total = 0.0;
    for (const auto& stage : model.stages) {
        votes(index_of(argmax_label(stage.tree.predict_distribution(x)))) += stage.alpha;
        total += stage.alpha;
    }
    if (total <= 0.0) return ProbDist::Constant(1.0 / kNumClasses);
    return votes / total;
}

ProbMatrix predict_adaboost_rows(const AdaBoostModel& model, const Eigen::MatrixXd& X)
{
    ProbMatrix out(X.rows(), kNumClasses);
    for (Eigen::Index i = 0; i < X.rows(); ++i) out.row(i) = predict_adaboost(model, X.row(i)).transpose();
    return out;
}

} // namespace stacksent
