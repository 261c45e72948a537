#include "stacksent/label.hpp"

#include "stacksent/utf8.hpp"

#include <cmath>

namespace stacksent {

std::string_view label_name(Label label)
{
    switch (label) {
    case Label::Negative: return "negative";
    case Label::Neutral: return "neutral";
    case Label::Positive: return "positive";
    }
    return "?";
}

std::optional<Label> parse_label(std::string_view text)
{
    const std::string s = utf8::lowercase(text);
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return std::nullopt;
    const auto last = s.find_last_not_of(" \t\r\n");
    const std::string_view t = std::string_view(s).substr(first, last - first + 1);

    if (t == "negative" || t == "negativo" || t == "negativa") return Label::Negative;
    if (t == "neutral" || t == "neutro" || t == "neutra") return Label::Neutral;
    if (t == "positive" || t == "positivo" || t == "positiva") return Label::Positive;
    return std::nullopt;
}

bool is_valid_prob_dist(const ProbDist& p, double tolerance)
{
    for (int k = 0; k < kNumClasses; ++k) {
        if (!std::isfinite(p(k)) || p(k) < 0.0) return false;
    }
    return std::abs(p.sum() - 1.0) <= tolerance;
}

} // namespace stacksent
