#pragma once

#include "stacksent/boosting.hpp"
#include "stacksent/logreg.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace stacksent {

enum class ModelKind { LogReg, Knn, BaggedGbdt, AdaBoost, Cse };

inline constexpr std::array<ModelKind, 5> kAllModelKinds{
    ModelKind::LogReg, ModelKind::BaggedGbdt, ModelKind::Knn, ModelKind::AdaBoost, ModelKind::Cse};

std::string_view model_kind_name(ModelKind kind); // logreg, knn, bagged_gbdt, adaboost, cse
std::string_view model_display_name(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

// Every tunable of the five model kinds. Keys follow the grid naming
// `<estimator>__<param>`; the meta-model C is `final_estimator__estimator__C`.
struct Hyperparams {
    LogRegConfig logreg{0.1, 1e-6, 5000};
    int knn_neighbors = 3;
    AdaBoostConfig adaboost{50, 1, 1};
    BaggingConfig bagging{10, true, GbdtConfig{50, 0.01, 6, 5}};
    LogRegConfig meta{0.1, 1e-6, 5000};
    int cse_folds = 5;
    bool cse_stratified = true;

    // Throws UnknownParameter (listing the valid keys) or Config (bad value).
    void set(std::string_view key, double value);
    void set(std::string_view key, std::string_view value);
    double get(std::string_view key) const;

    // Every key with its current value, in canonical order.
    std::vector<std::pair<std::string, double>> items() const;

    // Keys valid for a model kind; cse accepts all.
    static std::vector<std::string> keys_for(ModelKind kind);
    static bool key_valid_for(ModelKind kind, std::string_view key);

    bool operator==(const Hyperparams&) const = default;
};

// Checks `key` against `kind`; throws UnknownParameter listing valid keys.
void require_key(ModelKind kind, std::string_view key);

} // namespace stacksent
