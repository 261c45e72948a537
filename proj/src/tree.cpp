#include "stacksent/tree.hpp"

#include "stacksent/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

namespace stacksent {

namespace {

// Weighted sums of M split targets plus the weighted hessian.
template <int M>
struct Stats {
    double w = 0.0;
    std::array<double, M> s{};
    double h = 0.0;
    int count = 0;

    Stats& operator+=(const Stats& o)
    {
        w += o.w;
        for (int j = 0; j < M; ++j) s[j] += o.s[j];
        h += o.h;
        count += o.count;
        return *this;
    }
    friend Stats operator-(Stats a, const Stats& b)
    {
        a.w -= b.w;
        for (int j = 0; j < M; ++j) a.s[j] -= b.s[j];
        a.h -= b.h;
        a.count -= b.count;
        return a;
    }
};

struct Candidate {
    double gain = 0.0;
    Eigen::Index feature = -1;
    double threshold = 0.0;
};

template <int M, typename LeafFn>
class Builder {
public:
    using Stats = stacksent::Stats<M>;

    Builder(const Eigen::MatrixXd& X, const ColumnIndex& index, const TreeConfig& config,
            LeafFn make_leaf)
        : X_(X), index_(index), config_(config), make_leaf_(std::move(make_leaf)),
          rows_(static_cast<std::size_t>(X.rows()))
    {
        if (config.max_depth < 0) fail(ErrorCode::InvalidArgument, "max_depth must be >= 0");
        if (config.min_leaf < 1) fail(ErrorCode::InvalidArgument, "min_leaf must be >= 1");
    }

    DecisionTree build(TreeMode mode)
    {
        DecisionTree tree;
        tree.mode = mode;
        tree.max_depth = config_.max_depth;
        tree.nodes.emplace_back();

        std::vector<int> node_of(rows_.size(), -1); // position in the current level
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            if (rows_[r].w > 0.0) node_of[r] = 0;
        }
        std::vector<int> level{0};

        for (int depth = 0; !level.empty(); ++depth) {
            const std::size_t L = level.size();
            std::vector<Stats> total(L);
            for (std::size_t r = 0; r < rows_.size(); ++r) {
                if (node_of[r] >= 0) total[static_cast<std::size_t>(node_of[r])] += rows_[r];
            }
            std::vector<char> splittable(L, 0);
            bool any = false;
            for (std::size_t n = 0; n < L; ++n) {
                splittable[n] = depth < config_.max_depth && total[n].count >= 2 * config_.min_leaf;
                any = any || splittable[n];
            }

            std::vector<Candidate> best(L);
            if (any) find_splits(node_of, total, splittable, best);

            std::vector<int> next_level;
            std::vector<int> left_pos(L, -1);
            for (std::size_t n = 0; n < L; ++n) {
                const int id = level[n];
                if (best[n].feature < 0) {
                    make_leaf_(tree.nodes[static_cast<std::size_t>(id)], total[n]);
                    continue;
                }
                const int left = static_cast<int>(tree.nodes.size());
                tree.nodes.emplace_back();
                tree.nodes.emplace_back();
                auto& node = tree.nodes[static_cast<std::size_t>(id)];
                node.feature = static_cast<int>(best[n].feature);
                node.threshold = best[n].threshold;
                node.left = left;
                node.right = left + 1;
                left_pos[n] = static_cast<int>(next_level.size());
                next_level.push_back(left);
                next_level.push_back(left + 1);
            }
            for (std::size_t r = 0; r < rows_.size(); ++r) {
                if (node_of[r] < 0) continue;
                const auto n = static_cast<std::size_t>(node_of[r]);
                if (left_pos[n] < 0) {
                    node_of[r] = -1;
                    continue;
                }
                const bool go_left =
                    X_(static_cast<Eigen::Index>(r), best[n].feature) <= best[n].threshold;
                node_of[r] = left_pos[n] + (go_left ? 0 : 1);
            }
            level = std::move(next_level);
        }
        return tree;
    }

private:
    double score(const Stats& st) const
    {
        if (st.w <= 1e-300) return 0.0;
        double sum = 0.0;
        for (int j = 0; j < M; ++j) sum += st.s[static_cast<std::size_t>(j)] * st.s[static_cast<std::size_t>(j)];
        return sum / st.w;
    }

    void find_splits(const std::vector<int>& node_of, const std::vector<Stats>& total,
                     const std::vector<char>& splittable, std::vector<Candidate>& best) const
    {
        const std::size_t L = total.size();
        std::vector<double> parent_score(L);
        for (std::size_t n = 0; n < L; ++n) parent_score[n] = score(total[n]);

        std::vector<Stats> left(L), nonzero(L);
        std::vector<double> prev(L);
        std::vector<char> has_prev(L);

        for (Eigen::Index f : index_.usable_features()) {
            std::fill(left.begin(), left.end(), Stats{});
            std::fill(nonzero.begin(), nonzero.end(), Stats{});
            std::fill(has_prev.begin(), has_prev.end(), 0);

            const auto& neg = index_.negative(f);
            const auto& pos = index_.positive(f);
            auto active = [&](int r) -> int {
                const int n = node_of[static_cast<std::size_t>(r)];
                return (n >= 0 && splittable[static_cast<std::size_t>(n)]) ? n : -1;
            };
            const bool has_zeros = static_cast<Eigen::Index>(neg.size() + pos.size()) < index_.rows();
            if (has_zeros) {
                for (const auto& entries : {std::cref(neg), std::cref(pos)}) {
                    for (const auto& [v, r] : entries.get()) {
                        const int n = active(r);
                        if (n >= 0) nonzero[static_cast<std::size_t>(n)] += rows_[static_cast<std::size_t>(r)];
                    }
                }
            }

            auto visit = [&](std::size_t n, double v, const Stats& st) {
                if (has_prev[n] && v > prev[n]) {
                    const Stats& lt = left[n];
                    const int right_count = total[n].count - lt.count;
                    if (lt.count >= config_.min_leaf && right_count >= config_.min_leaf) {
                        const double gain = score(lt) + score(total[n] - lt) - parent_score[n];
                        if (gain > best[n].gain + 1e-12) {
                            double thr = prev[n] + 0.5 * (v - prev[n]);
                            if (!(thr < v)) thr = prev[n];
                            best[n] = Candidate{gain, f, thr};
                        }
                    }
                }
                left[n] += st;
                prev[n] = v;
                has_prev[n] = 1;
            };

            for (const auto& [v, r] : neg) {
                const int n = active(r);
                if (n >= 0) visit(static_cast<std::size_t>(n), v, rows_[static_cast<std::size_t>(r)]);
            }
            for (std::size_t n = 0; n < L && has_zeros; ++n) {
                if (!splittable[n]) continue;
                const Stats zeros = total[n] - nonzero[n];
                if (zeros.count > 0) visit(n, 0.0, zeros);
            }
            for (const auto& [v, r] : pos) {
                const int n = active(r);
                if (n >= 0) visit(static_cast<std::size_t>(n), v, rows_[static_cast<std::size_t>(r)]);
            }
        }
    }

    const Eigen::MatrixXd& X_;
    const ColumnIndex& index_;
    TreeConfig config_;
    LeafFn make_leaf_;

public:
    // Per-row contributions, filled in by the caller before build().
    std::vector<Stats> rows_;
};

void check_lengths(const Eigen::MatrixXd& X, const ColumnIndex& index, std::size_t n_targets,
                   std::size_t n_weights)
{
    const auto n = static_cast<std::size_t>(X.rows());
    if (index.rows() != X.rows() || index.cols() != X.cols())
        fail(ErrorCode::DimMismatch, "column index was built for a different matrix");
    if (n_targets != n || n_weights != n)
        fail(ErrorCode::LengthMismatch, "targets and weights must have one entry per row");
}

} // namespace

int DecisionTree::depth() const
{
    if (nodes.empty()) return 0;
    std::vector<int> d(nodes.size(), 0);
    int deepest = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& node = nodes[i];
        if (node.is_leaf()) continue;
        d[static_cast<std::size_t>(node.left)] = d[i] + 1;
        d[static_cast<std::size_t>(node.right)] = d[i] + 1;
        deepest = std::max(deepest, d[i] + 1);
    }
    return deepest;
}

const TreeNode& DecisionTree::leaf_for(const RowRef& x) const
{
    const TreeNode* node = &nodes.front();
    while (!node->is_leaf()) {
        const int next = x(node->feature) <= node->threshold ? node->left : node->right;
        node = &nodes[static_cast<std::size_t>(next)];
    }
    return *node;
}

void DecisionTree::scale_values(double factor)
{
    for (auto& node : nodes) node.value *= factor;
}

ColumnIndex::ColumnIndex(const Eigen::MatrixXd& X)
    : rows_(X.rows()), negative_(static_cast<std::size_t>(X.cols())),
      positive_(static_cast<std::size_t>(X.cols()))
{
    for (Eigen::Index f = 0; f < X.cols(); ++f) {
        auto& neg = negative_[static_cast<std::size_t>(f)];
        auto& pos = positive_[static_cast<std::size_t>(f)];
        for (Eigen::Index r = 0; r < X.rows(); ++r) {
            const double v = X(r, f);
            if (v < 0.0) neg.emplace_back(v, static_cast<int>(r));
            else if (v > 0.0) pos.emplace_back(v, static_cast<int>(r));
        }
        std::sort(neg.begin(), neg.end());
        std::sort(pos.begin(), pos.end());
        const bool all_zero = neg.empty() && pos.empty();
        const bool constant_nonzero =
            static_cast<Eigen::Index>(neg.size() + pos.size()) == X.rows() &&
            ((neg.empty() && pos.front().first == pos.back().first) ||
             (pos.empty() && neg.front().first == neg.back().first));
        if (!all_zero && !constant_nonzero) usable_.push_back(f);
    }
}

DecisionTree fit_classification_tree(const Eigen::MatrixXd& X, const ColumnIndex& index,
                                     std::span<const Label> y, std::span<const double> weights,
                                     const TreeConfig& config)
{
    check_lengths(X, index, y.size(), weights.size());
    auto leaf = [](TreeNode& node, const Stats<kNumClasses>& st) {
        for (int k = 0; k < kNumClasses; ++k) node.distribution(k) = st.s[static_cast<std::size_t>(k)];
        const double sum = node.distribution.sum();
        node.distribution = sum > 0.0 ? ProbDist(node.distribution / sum)
                                      : ProbDist(ProbDist::Constant(1.0 / kNumClasses));
    };
    Builder<kNumClasses, decltype(leaf)> builder(X, index, config, leaf);
    for (std::size_t r = 0; r < y.size(); ++r) {
        if (!(weights[r] >= 0.0)) fail(ErrorCode::InvalidArgument, "sample weights must be >= 0");
        if (weights[r] == 0.0) continue;
        auto& st = builder.rows_[r];
        st.w = weights[r];
        st.s[static_cast<std::size_t>(index_of(y[r]))] = weights[r];
        st.count = 1;
    }
    return builder.build(TreeMode::Classification);
}

DecisionTree fit_regression_tree(const Eigen::MatrixXd& X, const ColumnIndex& index,
                                 std::span<const double> target, std::span<const double> hessian,
                                 std::span<const double> weights, const TreeConfig& config)
{
    check_lengths(X, index, target.size(), weights.size());
    const bool newton = !hessian.empty();
    if (newton && hessian.size() != target.size())
        fail(ErrorCode::LengthMismatch, "hessian must have one entry per row");
    auto leaf = [newton](TreeNode& node, const Stats<1>& st) {
        if (newton) node.value = std::abs(st.h) < 1e-150 ? 0.0 : st.s[0] / st.h;
        else node.value = st.w > 0.0 ? st.s[0] / st.w : 0.0;
    };
    Builder<1, decltype(leaf)> builder(X, index, config, leaf);
    for (std::size_t r = 0; r < target.size(); ++r) {
        if (!(weights[r] >= 0.0)) fail(ErrorCode::InvalidArgument, "sample weights must be >= 0");
        if (weights[r] == 0.0) continue;
        auto& st = builder.rows_[r];
        st.w = weights[r];
        st.s[0] = weights[r] * target[r];
        st.h = newton ? weights[r] * hessian[r] : 0.0;
        st.count = 1;
    }
    return builder.build(TreeMode::Regression);
}

} // namespace stacksent
