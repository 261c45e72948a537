#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace stacksent {

enum class Label : std::uint8_t { Negative = 0, Neutral = 1, Positive = 2 };

inline constexpr int kNumClasses = 3;
inline constexpr std::array<Label, kNumClasses> kAllLabels{Label::Negative, Label::Neutral,
                                                          Label::Positive};

constexpr int index_of(Label label) { return static_cast<int>(label); }
constexpr Label label_from_index(int index) { return static_cast<Label>(index); }

std::string_view label_name(Label label);

// Case-insensitive; accepts English and Spanish names.
std::optional<Label> parse_label(std::string_view text);

// Class probabilities in Negative, Neutral, Positive order.
using ProbDist = Eigen::Vector3d;

// Row-per-sample probability matrix with one column per class.
using ProbMatrix = Eigen::Matrix<double, Eigen::Dynamic, kNumClasses>;

// Index of the largest component; ties go to the lower index.
template <typename Derived>
Label argmax_label(const Eigen::MatrixBase<Derived>& scores)
{
    int best = 0;
    for (int k = 1; k < kNumClasses; ++k) {
        if (scores(k) > scores(best)) best = k;
    }
    return label_from_index(best);
}

// A feature row; binds to rows of column-major matrices without copying.
using RowRef = Eigen::Ref<const Eigen::RowVectorXd, 0, Eigen::InnerStride<>>;

bool is_valid_prob_dist(const ProbDist& p, double tolerance = 1e-6);

} // namespace stacksent
