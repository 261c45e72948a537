#pragma once

#include "stacksent/error.hpp"

#include <Eigen/Core>

#include <cmath>
#include <limits>

namespace stacksent {

// Row-wise softmax with max subtraction.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Derived::ColsAtCompileTime>
softmax_rows(const Eigen::MatrixBase<Derived>& logits)
{
    using Scalar = typename Derived::Scalar;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Derived::ColsAtCompileTime> out =
        (logits.colwise() - logits.rowwise().maxCoeff()).array().exp().matrix();
    out.array().colwise() /= out.rowwise().sum().array();
    return out;
}

// log(sum(exp(row))) per row.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>
log_sum_exp_rows(const Eigen::MatrixBase<Derived>& logits)
{
    const auto max = logits.rowwise().maxCoeff().eval();
    return (max.array() +
            (logits.colwise() - max).array().exp().rowwise().sum().log())
        .matrix();
}

template <typename Scalar>
Scalar sigmoid(Scalar z)
{
    if (z >= 0) return Scalar(1) / (Scalar(1) + std::exp(-z));
    const Scalar e = std::exp(z);
    return e / (Scalar(1) + e);
}

// log(1 + exp(z)) without overflow.
template <typename Scalar>
Scalar softplus(Scalar z)
{
    return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

struct DescentOptions {
    double tolerance = 1e-6; // on the gradient infinity norm
    int max_iterations = 5000;
    double armijo = 1e-4;
    double initial_step = 1.0;
};

template <typename Scalar>
struct DescentResult {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
    Scalar value{};
    Scalar gradient_norm{};
    int iterations = 0;
    bool converged = false;
};

// Full-batch gradient descent with Armijo backtracking. The trial step
// starts from twice the last accepted step and halves until sufficient
// decrease. `objective(x, grad)` returns the value and fills the gradient.
template <typename Scalar, typename Objective>
DescentResult<Scalar> minimize_gradient_descent(Objective&& objective,
                                                Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x,
                                                const DescentOptions& options = {})
{
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    Vector grad(x.size());
    Vector trial_grad(x.size());
    Scalar value = objective(x, grad);
    if (!std::isfinite(value)) fail(ErrorCode::NonFiniteLoss, "objective is not finite at the start");

    DescentResult<Scalar> result;
    Scalar step = static_cast<Scalar>(options.initial_step);
    int it = 0;
    for (; it < options.max_iterations; ++it) {
        const Scalar gnorm = grad.size() ? grad.template lpNorm<Eigen::Infinity>() : Scalar(0);
        if (gnorm < options.tolerance) {
            result.converged = true;
            break;
        }
        const Scalar g2 = grad.squaredNorm();
        step *= 2;
        Vector trial;
        Scalar trial_value = std::numeric_limits<Scalar>::infinity();
        for (int halving = 0; halving < 80; ++halving) {
            trial = x - step * grad;
            trial_value = objective(trial, trial_grad);
            if (std::isfinite(trial_value) &&
                trial_value <= value - static_cast<Scalar>(options.armijo) * step * g2)
                break;
            step /= 2;
        }
        if (!std::isfinite(trial_value))
            fail(ErrorCode::NonFiniteLoss, "objective diverged during line search");
        if (trial_value > value) break; // no descent possible at machine precision
        x.swap(trial);
        grad.swap(trial_grad);
        value = trial_value;
    }
    result.x = std::move(x);
    result.value = value;
    result.gradient_norm = grad.size() ? grad.template lpNorm<Eigen::Infinity>() : Scalar(0);
    result.iterations = it;
    if (result.gradient_norm < options.tolerance) result.converged = true;
    return result;
}

} // namespace stacksent
