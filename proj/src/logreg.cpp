#include "stacksent/logreg.hpp"

#include "stacksent/error.hpp"

#include <set>

namespace stacksent {

ProbMatrix one_hot(std::span<const Label> y)
{
    ProbMatrix Y = ProbMatrix::Zero(static_cast<Eigen::Index>(y.size()), kNumClasses);
    for (std::size_t i = 0; i < y.size(); ++i) Y(static_cast<Eigen::Index>(i), index_of(y[i])) = 1.0;
    return Y;
}

void check_training_set(Eigen::Index rows, std::span<const Label> y, std::size_t min_rows)
{
    if (static_cast<std::size_t>(rows) != y.size())
        fail(ErrorCode::LengthMismatch, std::to_string(rows) + " rows but " +
                                            std::to_string(y.size()) + " labels");
    if (y.size() < min_rows)
        fail(ErrorCode::InvalidArgument, "need at least " + std::to_string(min_rows) + " rows");
    const std::set<Label> present(y.begin(), y.end());
    if (present.size() < 2) fail(ErrorCode::SingleClass, "training labels contain a single class");
}

double logreg_objective(const Eigen::Matrix<double, kNumClasses, Eigen::Dynamic>& weights,
                        const Eigen::Vector3d& bias, const Eigen::MatrixXd& X,
                        std::span<const Label> y, double c,
                        Eigen::Matrix<double, kNumClasses, Eigen::Dynamic>* grad_weights,
                        Eigen::Vector3d* grad_bias)
{
    const auto n = static_cast<double>(X.rows());
    ProbMatrix logits = X * weights.transpose();
    logits.rowwise() += bias.transpose();
    const Eigen::VectorXd lse = log_sum_exp_rows(logits);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        loss += lse(i) - logits(i, index_of(y[static_cast<std::size_t>(i)]));
    loss = loss / n + weights.squaredNorm() / (2.0 * c * n);

    if (grad_weights != nullptr || grad_bias != nullptr) {
        ProbMatrix residual = (logits.colwise() - lse).array().exp().matrix();
        residual -= one_hot(y);
        if (grad_weights != nullptr)
            *grad_weights = (residual.transpose() * X) / n + weights / (c * n);
        if (grad_bias != nullptr) *grad_bias = residual.colwise().sum().transpose() / n;
    }
    return loss;
}

LogRegModel train_logreg(const Eigen::MatrixXd& X, std::span<const Label> y,
                         const LogRegConfig& config)
{
    check_training_set(X.rows(), y, 3);
    if (!(config.c > 0.0)) fail(ErrorCode::InvalidArgument, "logreg__C must be positive");

    const Eigen::Index d = X.cols();
    const Eigen::Index n_weights = kNumClasses * d;
    auto objective = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& grad) {
        const Eigen::Map<const Eigen::Matrix<double, kNumClasses, Eigen::Dynamic>> W(theta.data(),
                                                                                    kNumClasses, d);
        const Eigen::Vector3d b = theta.tail<kNumClasses>();
        Eigen::Matrix<double, kNumClasses, Eigen::Dynamic> gW;
        Eigen::Vector3d gb;
        const double value = logreg_objective(W, b, X, y, config.c, &gW, &gb);
        grad.resize(theta.size());
        grad.head(n_weights) = Eigen::Map<const Eigen::VectorXd>(gW.data(), n_weights);
        grad.tail<kNumClasses>() = gb;
        return value;
    };

    DescentOptions options;
    options.tolerance = config.tolerance;
    options.max_iterations = config.max_iterations;
    const auto result = minimize_gradient_descent<double>(
        objective, Eigen::VectorXd::Zero(n_weights + kNumClasses), options);

    LogRegModel model;
    model.weights = Eigen::Map<const Eigen::Matrix<double, kNumClasses, Eigen::Dynamic>>(
        result.x.data(), kNumClasses, d);
    model.bias = result.x.tail<kNumClasses>();
    model.config = config;
    model.iterations = result.iterations;
    model.converged = result.converged;
    if (!model.weights.allFinite() || !model.bias.allFinite())
        fail(ErrorCode::NonFiniteLoss, "logistic regression parameters diverged");
    return model;
}

ProbDist predict_logreg(const LogRegModel& model, const RowRef& x)
{
    if (x.size() != model.dim())
        fail(ErrorCode::DimMismatch, "input has " + std::to_string(x.size()) +
                                         " features, model expects " + std::to_string(model.dim()));
    const Eigen::RowVector3d logits = x * model.weights.transpose() + model.bias.transpose();
    return softmax_rows(logits).transpose();
}

ProbMatrix predict_logreg_rows(const LogRegModel& model, const Eigen::MatrixXd& X)
{
    if (X.cols() != model.dim())
        fail(ErrorCode::DimMismatch, "input has " + std::to_string(X.cols()) +
                                         " features, model expects " + std::to_string(model.dim()));
    ProbMatrix logits = X * model.weights.transpose();
    logits.rowwise() += model.bias.transpose();
    return softmax_rows(logits);
}

} // namespace stacksent
