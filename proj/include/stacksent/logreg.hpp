#pragma once

#include "stacksent/label.hpp"
#include "stacksent/numeric.hpp"

#include <Eigen/Core>

#include <span>

namespace stacksent {

struct LogRegConfig {
    double c = 0.1; // inverse regularisation strength (`logreg__C`)
    double tolerance = 1e-6;
    int max_iterations = 5000;

    bool operator==(const LogRegConfig&) const = default;
};

struct LogRegModel {
    Eigen::Matrix<double, kNumClasses, Eigen::Dynamic> weights; // 3 x D
    Eigen::Vector3d bias = Eigen::Vector3d::Zero();
    LogRegConfig config;
    int iterations = 0;
    bool converged = false;

    Eigen::Index dim() const { return weights.cols(); }
};

// Mean softmax cross-entropy plus ||W||^2 / (2 c N); the bias is not
// penalised. Fills the gradients when non-null.
double logreg_objective(const Eigen::Matrix<double, kNumClasses, Eigen::Dynamic>& weights,
                        const Eigen::Vector3d& bias, const Eigen::MatrixXd& X,
                        std::span<const Label> y, double c,
                        Eigen::Matrix<double, kNumClasses, Eigen::Dynamic>* grad_weights = nullptr,
                        Eigen::Vector3d* grad_bias = nullptr);

// Throws SingleClass, NonFiniteLoss, InvalidArgument.
LogRegModel train_logreg(const Eigen::MatrixXd& X, std::span<const Label> y,
                         const LogRegConfig& config = {});

ProbDist predict_logreg(const LogRegModel& model, const RowRef& x);
ProbMatrix predict_logreg_rows(const LogRegModel& model, const Eigen::MatrixXd& X);

// One-hot targets, N x 3.
ProbMatrix one_hot(std::span<const Label> y);

// Shared precondition checks: sizes agree, at least `min_rows` rows and two
// distinct classes.
void check_training_set(Eigen::Index rows, std::span<const Label> y, std::size_t min_rows);

} // namespace stacksent
