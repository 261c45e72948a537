#pragma once

#include "stacksent/label.hpp"

#include <Eigen/Core>

#include <span>
#include <utility>
#include <vector>

namespace stacksent {

enum class TreeMode : std::uint8_t { Classification = 0, Regression = 1 };

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    ProbDist distribution = ProbDist::Zero(); // classification leaves
    double value = 0.0;                       // regression leaves

    bool is_leaf() const { return feature < 0; }
};

// Binary tree with axis-aligned splits; x[feature] <= threshold goes left.
struct DecisionTree {
    TreeMode mode = TreeMode::Classification;
    int max_depth = 1;
    std::vector<TreeNode> nodes; // nodes[0] is the root

    int depth() const;
    const TreeNode& leaf_for(const RowRef& x) const;
    ProbDist predict_distribution(const RowRef& x) const
    {
        return leaf_for(x).distribution;
    }
    double predict_value(const RowRef& x) const
    {
        return leaf_for(x).value;
    }
    void scale_values(double factor);
};

struct TreeConfig {
    int max_depth = 1;
    int min_leaf = 1; // minimum number of (distinct) training rows per leaf
};

// Per-feature nonzero entries sorted by value, built once per training
// matrix and shared by every tree fitted on it. Zeros are handled as one
// block, so split search costs O(nnz) per feature and level.
class ColumnIndex {
public:
    explicit ColumnIndex(const Eigen::MatrixXd& X);

    Eigen::Index rows() const { return rows_; }
    Eigen::Index cols() const { return static_cast<Eigen::Index>(negative_.size()); }

    // (value, row) pairs ascending by value, then row.
    const std::vector<std::pair<double, int>>& negative(Eigen::Index f) const
    {
        return negative_[static_cast<std::size_t>(f)];
    }
    const std::vector<std::pair<double, int>>& positive(Eigen::Index f) const
    {
        return positive_[static_cast<std::size_t>(f)];
    }
    const std::vector<Eigen::Index>& usable_features() const { return usable_; }

private:
    Eigen::Index rows_ = 0;
    std::vector<std::vector<std::pair<double, int>>> negative_;
    std::vector<std::vector<std::pair<double, int>>> positive_;
    std::vector<Eigen::Index> usable_;
};

// Weighted Gini splits. Rows with zero weight do not take part.
DecisionTree fit_classification_tree(const Eigen::MatrixXd& X, const ColumnIndex& index,
                                     std::span<const Label> y, std::span<const double> weights,
                                     const TreeConfig& config);

// Weighted variance-reduction splits on `target`. Leaf value is
// sum(w * target) / sum(w * hessian) when `hessian` is non-empty (Newton
// step), else the weighted mean.
DecisionTree fit_regression_tree(const Eigen::MatrixXd& X, const ColumnIndex& index,
                                 std::span<const double> target, std::span<const double> hessian,
                                 std::span<const double> weights, const TreeConfig& config);

} // namespace stacksent
