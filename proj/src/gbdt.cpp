#include "stacksent/boosting.hpp"

#include "stacksent/error.hpp"
#include "stacksent/logreg.hpp"
#include "stacksent/numeric.hpp"
#include "stacksent/random.hpp"

#include <cmath>
#include <optional>

namespace stacksent {

namespace {

// Weighted mean of -log p[y] from raw scores.
double mean_log_loss(const ProbMatrix& scores, std::span<const Label> y, std::span<const double> w)
{
    const Eigen::VectorXd lse = log_sum_exp_rows(scores);
    double loss = 0.0;
    double total = 0.0;
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        const auto u = static_cast<std::size_t>(i);
        if (w[u] == 0.0) continue;
        loss += w[u] * (lse(i) - scores(i, index_of(y[u])));
        total += w[u];
    }
    return loss / total;
}

// Halvings tried before a round that cannot lower the loss is dropped.
constexpr int kMaxStepHalvings = 30;
constexpr double kLossSlack = 1e-12;

} // namespace

GbdtModel train_gbdt(const Eigen::MatrixXd& X, std::span<const Label> y, const GbdtConfig& config,
                     std::span<const double> weights, const ColumnIndex* index)
{
    if (static_cast<std::size_t>(X.rows()) != y.size())
        fail(ErrorCode::LengthMismatch, "rows and labels differ in count");
    if (y.empty()) fail(ErrorCode::InvalidArgument, "empty training set");
    if (config.n_estimators < 1) fail(ErrorCode::InvalidArgument, "lgbm__n_estimators must be >= 1");
    if (!(config.learning_rate > 0.0))
        fail(ErrorCode::InvalidArgument, "lgbm__learning_rate must be positive");

    const std::size_t n = y.size();
    std::vector<double> w(weights.begin(), weights.end());
    if (w.empty()) w.assign(n, 1.0);
    if (w.size() != n) fail(ErrorCode::LengthMismatch, "one weight per row is required");

    std::optional<ColumnIndex> own_index;
    if (index == nullptr) index = &own_index.emplace(X);

    GbdtModel model;
    model.config = config;
    Eigen::Vector3d prior = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < n; ++i) prior(index_of(y[i])) += w[i];
    if (!(prior.sum() > 0.0)) fail(ErrorCode::InvalidArgument, "all sample weights are zero");
    prior /= prior.sum();
    model.initial_scores = prior.array().max(1e-12).log().matrix();

    ProbMatrix scores(X.rows(), kNumClasses);
    scores.rowwise() = model.initial_scores.transpose();
    double loss = mean_log_loss(scores, y, w);
    model.train_loss.push_back(loss);

    const ProbMatrix targets = one_hot(y);
    const TreeConfig tree_config{config.max_depth, config.min_leaf};
    const double newton_scale = (kNumClasses - 1.0) / kNumClasses;
    std::vector<double> residual(n), hessian(n);

    for (int round = 0; round < config.n_estimators; ++round) {
        const ProbMatrix probs = softmax_rows(scores);
        std::array<DecisionTree, kNumClasses> trees;
        ProbMatrix update(X.rows(), kNumClasses);
        for (int k = 0; k < kNumClasses; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                const auto r = static_cast<Eigen::Index>(i);
                residual[i] = targets(r, k) - probs(r, k);
                const double a = std::abs(residual[i]);
                hessian[i] = a * (1.0 - a);
            }
            trees[static_cast<std::size_t>(k)] =
                fit_regression_tree(X, *index, residual, hessian, w, tree_config);
            trees[static_cast<std::size_t>(k)].scale_values(newton_scale * config.learning_rate);
            for (Eigen::Index r = 0; r < X.rows(); ++r)
                update(r, k) = trees[static_cast<std::size_t>(k)].predict_value(X.row(r));
        }

        // Backtrack on the round's step so the training loss never rises.
        double step = 1.0;
        double new_loss = mean_log_loss(scores + update, y, w);
        int halvings = 0;
        while (!(new_loss <= loss + kLossSlack) && halvings < kMaxStepHalvings) {
            step *= 0.5;
            new_loss = mean_log_loss(scores + step * update, y, w);
            ++halvings;
        }
        if (!std::isfinite(new_loss)) fail(ErrorCode::NonFiniteLoss, "boosting loss diverged");
        if (!(new_loss <= loss + kLossSlack)) break;
        if (step != 1.0) {
            for (auto& tree : trees) tree.scale_values(step);
        }
        scores += step * update;
        loss = new_loss;
        model.train_loss.push_back(loss);
        model.rounds.push_back(std::move(trees));
    }
    return model;
}

Eigen::Vector3d gbdt_scores(const GbdtModel& model, const RowRef& x)
{
    Eigen::Vector3d scores = model.initial_scores;
    for (const auto& round : model.rounds) {
        for (int k = 0; k < kNumClasses; ++k)
            scores(k) += round[static_cast<std::size_t>(k)].predict_value(x);
    }
    return scores;
}

ProbDist predict_gbdt(const GbdtModel& model, const RowRef& x)
{
    return softmax_rows(gbdt_scores(model, x).transpose()).transpose();
}

ProbMatrix predict_gbdt_rows(const GbdtModel& model, const Eigen::MatrixXd& X)
{
    ProbMatrix out(X.rows(), kNumClasses);
    for (Eigen::Index i = 0; i < X.rows(); ++i) out.row(i) = predict_gbdt(model, X.row(i)).transpose();
    return out;
}

BaggedModel train_bagged_gbdt(const Eigen::MatrixXd& X, std::span<const Label> y,
                              const BaggingConfig& config, std::uint64_t seed)
{
    if (config.members < 1) fail(ErrorCode::InvalidArgument, "bagging needs at least one member");
    const std::size_t n = y.size();
    const ColumnIndex index(X);
    BaggedModel model;
    model.config = config;
    for (int m = 0; m < config.members; ++m) {
        const std::uint64_t member_seed = derive_seed(seed, "bagging", static_cast<std::uint64_t>(m));
        std::vector<double> w(n, 0.0);
        if (config.bootstrap) {
            SplitMix64 rng(member_seed);
            for (std::size_t draw = 0; draw < n; ++draw) w[rng.uniform(n)] += 1.0;
        } else {
            w.assign(n, 1.0);
        }
        model.members.push_back(train_gbdt(X, y, config.gbdt, w, &index));
        model.seeds.push_back(member_seed);
    }
    return model;
}

ProbDist predict_bagged(const BaggedModel& model, const RowRef& x)
{
    ProbDist mean = ProbDist::Zero();
    for (const auto& member : model.members) mean += predict_gbdt(member, x);
    return mean / static_cast<double>(model.members.size());
}

ProbMatrix predict_bagged_rows(const BaggedModel& model, const Eigen::MatrixXd& X)
{
    ProbMatrix out(X.rows(), kNumClasses);
    for (Eigen::Index i = 0; i < X.rows(); ++i) out.row(i) = predict_bagged(model, X.row(i)).transpose();
    return out;
}

} // namespace stacksent
