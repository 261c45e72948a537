#include "stacksent/hyperparams.hpp"

#include "stacksent/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace stacksent {

namespace {

struct KeySpec {
    const char* key;
    bool integral;
    // model kinds (besides cse) that accept the key
    std::vector<ModelKind> kinds;
};

const std::vector<KeySpec>& key_specs()
{
    static const std::vector<KeySpec> specs{
        {"logreg__C", false, {ModelKind::LogReg}},
        {"logreg__max_iter", true, {ModelKind::LogReg}},
        {"logreg__tol", false, {ModelKind::LogReg}},
        {"lgbm__n_estimators", true, {ModelKind::BaggedGbdt}},
        {"lgbm__learning_rate", false, {ModelKind::BaggedGbdt}},
        {"lgbm__max_depth", true, {ModelKind::BaggedGbdt}},
        {"lgbm__min_child_samples", true, {ModelKind::BaggedGbdt}},
        {"bagging__n_estimators", true, {ModelKind::BaggedGbdt}},
        {"bagging__bootstrap", true, {ModelKind::BaggedGbdt}},
        {"knn__n_neighbors", true, {ModelKind::Knn}},
        {"adaboost__n_estimators", true, {ModelKind::AdaBoost}},
        {"adaboost__max_depth", true, {ModelKind::AdaBoost}},
        {"final_estimator__estimator__C", false, {}},
        {"final_estimator__estimator__max_iter", true, {}},
        {"cv", true, {}},
        {"cv__stratified", true, {}},
    };
    return specs;
}

const KeySpec* find_spec(std::string_view key)
{
    for (const auto& spec : key_specs()) {
        if (key == spec.key) return &spec;
    }
    return nullptr;
}

std::string joined_keys(ModelKind kind)
{
    std::string out;
    for (const auto& k : Hyperparams::keys_for(kind)) out += (out.empty() ? "" : ", ") + k;
    return out;
}

int as_int(std::string_view key, double value, int min)
{
    if (!std::isfinite(value) || std::floor(value) != value || value < min || value > 1e9)
        fail(ErrorCode::Config, std::string(key) + " needs an integer >= " + std::to_string(min));
    return static_cast<int>(value);
}

double as_positive(std::string_view key, double value)
{
    if (!std::isfinite(value) || !(value > 0.0))
        fail(ErrorCode::Config, std::string(key) + " must be a positive number");
    return value;
}

} // namespace

std::string_view model_kind_name(ModelKind kind)
{
    switch (kind) {
    case ModelKind::LogReg: return "logreg";
    case ModelKind::Knn: return "knn";
    case ModelKind::BaggedGbdt: return "bagged_gbdt";
    case ModelKind::AdaBoost: return "adaboost";
    case ModelKind::Cse: return "cse";
    }
    return "?";
}

std::string_view model_display_name(ModelKind kind)
{
    switch (kind) {
    case ModelKind::LogReg: return "Logistic Regression";
    case ModelKind::Knn: return "KNN";
    case ModelKind::BaggedGbdt: return "Bagging Classifier with GBDT";
    case ModelKind::AdaBoost: return "AdaBoost";
    case ModelKind::Cse: return "CSE";
    }
    return "?";
}

ModelKind parse_model_kind(std::string_view name)
{
    for (ModelKind kind : kAllModelKinds) {
        if (model_kind_name(kind) == name) return kind;
    }
    fail(ErrorCode::Config,
         "unknown model '" + std::string(name) + "' (logreg, knn, bagged_gbdt, adaboost, cse)");
}

std::vector<std::string> Hyperparams::keys_for(ModelKind kind)
{
    std::vector<std::string> out;
    for (const auto& spec : key_specs()) {
        if (kind == ModelKind::Cse ||
            std::find(spec.kinds.begin(), spec.kinds.end(), kind) != spec.kinds.end())
            out.emplace_back(spec.key);
    }
    return out;
}

bool Hyperparams::key_valid_for(ModelKind kind, std::string_view key)
{
    const KeySpec* spec = find_spec(key);
    if (spec == nullptr) return false;
    return kind == ModelKind::Cse ||
           std::find(spec->kinds.begin(), spec->kinds.end(), kind) != spec->kinds.end();
}

void require_key(ModelKind kind, std::string_view key)
{
    if (!Hyperparams::key_valid_for(kind, key)) {
        fail(ErrorCode::UnknownParameter, "'" + std::string(key) + "' is not a parameter of " +
                                              std::string(model_kind_name(kind)) +
                                              "; valid keys: " + joined_keys(kind));
    }
}

void Hyperparams::set(std::string_view key, double value)
{
    if (key == "logreg__C") logreg.c = as_positive(key, value);
    else if (key == "logreg__max_iter") logreg.max_iterations = as_int(key, value, 1);
    else if (key == "logreg__tol") logreg.tolerance = as_positive(key, value);
    else if (key == "lgbm__n_estimators") bagging.gbdt.n_estimators = as_int(key, value, 1);
    else if (key == "lgbm__learning_rate") bagging.gbdt.learning_rate = as_positive(key, value);
    else if (key == "lgbm__max_depth") bagging.gbdt.max_depth = as_int(key, value, 0);
    else if (key == "lgbm__min_child_samples") bagging.gbdt.min_leaf = as_int(key, value, 1);
    else if (key == "bagging__n_estimators") bagging.members = as_int(key, value, 1);
    else if (key == "bagging__bootstrap") bagging.bootstrap = as_int(key, value, 0) != 0;
    else if (key == "knn__n_neighbors") knn_neighbors = as_int(key, value, 1);
    else if (key == "adaboost__n_estimators") adaboost.n_estimators = as_int(key, value, 1);
    else if (key == "adaboost__max_depth") adaboost.max_depth = as_int(key, value, 1);
    else if (key == "final_estimator__estimator__C") meta.c = as_positive(key, value);
    else if (key == "final_estimator__estimator__max_iter") meta.max_iterations = as_int(key, value, 1);
    else if (key == "cv") cse_folds = as_int(key, value, 2);
    else if (key == "cv__stratified") cse_stratified = as_int(key, value, 0) != 0;
    else require_key(ModelKind::Cse, key);
}

void Hyperparams::set(std::string_view key, std::string_view value)
{
    std::string_view v = value;
    while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
    while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.remove_suffix(1);
    if (v == "true") return set(key, 1.0);
    if (v == "false") return set(key, 0.0);
    double parsed = 0.0;
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), parsed);
    if (ec != std::errc{} || end != v.data() + v.size())
        fail(ErrorCode::Config, "value '" + std::string(value) + "' for " + std::string(key) +
                                    " is not a number");
    set(key, parsed);
}

double Hyperparams::get(std::string_view key) const
{
    for (const auto& [k, v] : items()) {
        if (k == key) return v;
    }
    require_key(ModelKind::Cse, key);
    return 0.0;
}

std::vector<std::pair<std::string, double>> Hyperparams::items() const
{
    return {
        {"logreg__C", logreg.c},
        {"logreg__max_iter", logreg.max_iterations},
        {"logreg__tol", logreg.tolerance},
        {"lgbm__n_estimators", bagging.gbdt.n_estimators},
        {"lgbm__learning_rate", bagging.gbdt.learning_rate},
        {"lgbm__max_depth", bagging.gbdt.max_depth},
        {"lgbm__min_child_samples", bagging.gbdt.min_leaf},
        {"bagging__n_estimators", bagging.members},
        {"bagging__bootstrap", bagging.bootstrap ? 1.0 : 0.0},
        {"knn__n_neighbors", knn_neighbors},
        {"adaboost__n_estimators", adaboost.n_estimators},
        {"adaboost__max_depth", adaboost.max_depth},
        {"final_estimator__estimator__C", meta.c},
        {"final_estimator__estimator__max_iter", meta.max_iterations},
        {"cv", cse_folds},
        {"cv__stratified", cse_stratified ? 1.0 : 0.0},
    };
}

} // namespace stacksent
