#include "oracles.hpp"

#include "stacksent/logreg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace oracle {

using stacksent::Label;

std::vector<std::string> ascii_tokens(const std::string& text)
{
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        char c = ch;
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
            cur.push_back(c);
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

DenseTfidf dense_tfidf(const std::vector<std::string>& docs)
{
    std::map<std::string, int> df;
    for (const auto& d : docs) {
        auto toks = ascii_tokens(d);
        std::sort(toks.begin(), toks.end());
        toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
        for (const auto& t : toks) df[t] += 1;
    }
    DenseTfidf out;
    const double n = static_cast<double>(docs.size());
    for (const auto& [t, f] : df) {
        out.vocabulary.push_back(t);
        out.idf.push_back(std::log((1.0 + n) / (1.0 + f)) + 1.0);
    }
    out.rows.resize(static_cast<Eigen::Index>(docs.size()),
                    static_cast<Eigen::Index>(out.vocabulary.size()));
    for (std::size_t i = 0; i < docs.size(); ++i)
        out.rows.row(static_cast<Eigen::Index>(i)) = dense_tfidf_row(out, docs[i]);
    return out;
}

Eigen::RowVectorXd dense_tfidf_row(const DenseTfidf& fitted, const std::string& text)
{
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(fitted.vocabulary.size()));
    for (const auto& t : ascii_tokens(text)) {
        for (std::size_t j = 0; j < fitted.vocabulary.size(); ++j) {
            if (fitted.vocabulary[j] == t) row(static_cast<Eigen::Index>(j)) += fitted.idf[j];
        }
    }
    double sq = 0.0;
    for (Eigen::Index j = 0; j < row.size(); ++j) sq += row(j) * row(j);
    if (sq > 0.0) row /= std::sqrt(sq);
    return row;
}

std::vector<std::size_t> nearest(const Eigen::MatrixXd& X, const Eigen::RowVectorXd& q, int k)
{
    std::vector<std::pair<double, std::size_t>> all;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        double d = 0.0;
        for (Eigen::Index j = 0; j < X.cols(); ++j) d += (X(i, j) - q(j)) * (X(i, j) - q(j));
        all.emplace_back(std::sqrt(d), static_cast<std::size_t>(i));
    }
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> out;
    for (int i = 0; i < k; ++i) out.push_back(all[static_cast<std::size_t>(i)].second);
    return out;
}

stacksent::ProbDist vote(std::span<const Label> labels, const std::vector<std::size_t>& neighbors)
{
    stacksent::ProbDist p = stacksent::ProbDist::Zero();
    for (auto i : neighbors) p(stacksent::index_of(labels[i])) += 1.0;
    return p / static_cast<double>(neighbors.size());
}

double logreg_gradient_error(const Eigen::Matrix<double, 3, Eigen::Dynamic>& W,
                             const Eigen::Vector3d& b, const Eigen::MatrixXd& X,
                             std::span<const Label> y, double c, double h)
{
    Eigen::Matrix<double, 3, Eigen::Dynamic> gW;
    Eigen::Vector3d gb;
    stacksent::logreg_objective(W, b, X, y, c, &gW, &gb);

    const Eigen::Index nw = W.size();
    Eigen::VectorXd analytic(nw + 3), numeric(nw + 3);
    for (Eigen::Index i = 0; i < nw; ++i) {
        auto Wp = W, Wm = W;
        Wp.data()[i] += h;
        Wm.data()[i] -= h;
        numeric(i) = (stacksent::logreg_objective(Wp, b, X, y, c) -
                      stacksent::logreg_objective(Wm, b, X, y, c)) / (2 * h);
        analytic(i) = gW.data()[i];
    }
    for (int k = 0; k < 3; ++k) {
        Eigen::Vector3d bp = b, bm = b;
        bp(k) += h;
        bm(k) -= h;
        numeric(nw + k) = (stacksent::logreg_objective(W, bp, X, y, c) -
                           stacksent::logreg_objective(W, bm, X, y, c)) / (2 * h);
        analytic(nw + k) = gb(k);
    }
    const double scale = std::max({analytic.norm(), numeric.norm(), 1e-12});
    return (analytic - numeric).norm() / scale;
}

namespace {

double purity(const std::array<double, 3>& s)
{
    const double w = s[0] + s[1] + s[2];
    return w > 0 ? (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]) / w : 0.0;
}

int heaviest(const std::array<double, 3>& s)
{
    int best = 0;
    for (int k = 1; k < 3; ++k)
        if (s[k] > s[best]) best = k;
    return best;
}

} // namespace

SammeRun samme_stumps(const Eigen::MatrixXd& X, std::span<const Label> y, int stages)
{
    const auto n = static_cast<std::size_t>(X.rows());
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    std::vector<std::array<double, 3>> votes(n, {0, 0, 0});
    SammeRun run;
    for (int stage = 0; stage < stages; ++stage) {
        std::array<double, 3> all{};
        for (std::size_t i = 0; i < n; ++i) all[stacksent::index_of(y[i])] += w[i];
        double best_gain = 0.0;
        Eigen::Index best_f = -1;
        double best_t = 0.0;
        for (Eigen::Index f = 0; f < X.cols(); ++f) {
            std::vector<double> values(X.col(f).data(), X.col(f).data() + n);
            std::sort(values.begin(), values.end());
            values.erase(std::unique(values.begin(), values.end()), values.end());
            for (std::size_t v = 0; v + 1 < values.size(); ++v) {
                const double t = values[v] + 0.5 * (values[v + 1] - values[v]);
                std::array<double, 3> left{}, right{};
                for (std::size_t i = 0; i < n; ++i)
                    (X(static_cast<Eigen::Index>(i), f) <= t ? left : right)[stacksent::index_of(y[i])] += w[i];
                const double gain = purity(left) + purity(right) - purity(all);
                if (gain > best_gain + 1e-12) {
                    best_gain = gain;
                    best_f = f;
                    best_t = t;
                }
            }
        }
        std::array<double, 3> left{}, right{};
        for (std::size_t i = 0; i < n; ++i) {
            const bool goes_left = best_f >= 0 && X(static_cast<Eigen::Index>(i), best_f) <= best_t;
            (goes_left ? left : right)[stacksent::index_of(y[i])] += w[i];
        }
        std::vector<int> pred(n);
        double error = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const bool goes_left = best_f >= 0 && X(static_cast<Eigen::Index>(i), best_f) <= best_t;
            pred[i] = heaviest(goes_left ? left : right);
            if (pred[i] != stacksent::index_of(y[i])) error += w[i];
        }
        if (error >= 2.0 / 3.0) break;
        const double e = std::max(error, 1e-10);
        const double alpha = std::log((1 - e) / e) + std::log(2.0);
        run.alphas.push_back(alpha);
        for (std::size_t i = 0; i < n; ++i) votes[i][static_cast<std::size_t>(pred[i])] += alpha;
        if (error <= 1e-10) break;
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (pred[i] != stacksent::index_of(y[i])) w[i] *= std::exp(alpha);
            sum += w[i];
        }
        for (double& wi : w) wi /= sum;
    }
    for (const auto& v : votes) run.train_labels.push_back(stacksent::label_from_index(heaviest(v)));
    return run;
}

CountedMetrics count_metrics(std::span<const Label> y_true, std::span<const Label> y_pred)
{
    CountedMetrics m;
    long correct = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        m.confusion(stacksent::index_of(y_true[i]), stacksent::index_of(y_pred[i])) += 1;
        if (y_true[i] == y_pred[i]) ++correct;
    }
    m.accuracy = y_true.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(y_true.size());
    for (int k = 0; k < 3; ++k) {
        long tp = 0, predicted = 0, actual = 0;
        for (std::size_t i = 0; i < y_true.size(); ++i) {
            const bool t = stacksent::index_of(y_true[i]) == k;
            const bool p = stacksent::index_of(y_pred[i]) == k;
            tp += t && p;
            predicted += p;
            actual += t;
        }
        m.support[k] = actual;
        m.precision[k] = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
        m.recall[k] = actual ? static_cast<double>(tp) / static_cast<double>(actual) : 0.0;
        const double s = m.precision[k] + m.recall[k];
        m.f1[k] = s > 0 ? 2 * m.precision[k] * m.recall[k] / s : 0.0;
    }
    return m;
}

} // namespace oracle
