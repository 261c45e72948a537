#include "stacksent/stacking.hpp"

#include "stacksent/error.hpp"
#include "stacksent/random.hpp"

#include <sstream>

namespace stacksent {

namespace {

std::uint64_t bagging_seed(std::uint64_t seed, std::uint64_t fold)
{
    return derive_seed(seed, "cse-bagged", fold);
}

std::string base_key(BaseKind kind, const Hyperparams& hp, std::uint64_t seed)
{
    std::ostringstream key;
    key.precision(17);
    key << base_kind_name(kind) << '|';
    switch (kind) {
    case BaseKind::LogReg:
        key << hp.logreg.c << ',' << hp.logreg.tolerance << ',' << hp.logreg.max_iterations;
        break;
    case BaseKind::BaggedGbdt: {
        const auto& b = hp.bagging;
        key << b.members << ',' << b.bootstrap << ',' << b.gbdt.n_estimators << ','
            << b.gbdt.learning_rate << ',' << b.gbdt.max_depth << ',' << b.gbdt.min_leaf << ",seed="
            << seed;
        break;
    }
    case BaseKind::Knn:
        key << hp.knn_neighbors;
        break;
    case BaseKind::AdaBoost:
        key << hp.adaboost.n_estimators << ',' << hp.adaboost.max_depth << ','
            << hp.adaboost.min_leaf;
        break;
    }
    return key.str();
}

ProbMatrix fit_predict(BaseKind kind, const Eigen::MatrixXd& X_train, std::span<const Label> y_train,
                       const Eigen::MatrixXd& X_query, const Hyperparams& hp, std::uint64_t seed)
{
    switch (kind) {
    case BaseKind::LogReg:
        return predict_logreg_rows(train_logreg(X_train, y_train, hp.logreg), X_query);
    case BaseKind::BaggedGbdt:
        return predict_bagged_rows(train_bagged_gbdt(X_train, y_train, hp.bagging, seed), X_query);
    case BaseKind::Knn:
        return predict_knn_rows(train_knn(X_train, y_train, hp.knn_neighbors), X_query);
    case BaseKind::AdaBoost:
        return predict_adaboost_rows(train_adaboost(X_train, y_train, hp.adaboost), X_query);
    }
    return {};
}

template <typename Model, typename Train>
Model cached_fit(BaseFitCache* cache, const std::string& key, Train train)
{
    if (cache == nullptr) return train();
    if (const BaseModel* hit = cache->find_model(key)) return std::get<Model>(*hit);
    Model model = train();
    cache->store_model(key, model);
    return model;
}

} // namespace

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& X, const std::vector<std::size_t>& rows)
{
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(rows[i]));
    return out;
}

std::vector<Label> select_labels(std::span<const Label> y, const std::vector<std::size_t>& rows)
{
    std::vector<Label> out;
    out.reserve(rows.size());
    for (std::size_t r : rows) out.push_back(y[r]);
    return out;
}

std::string_view base_kind_name(BaseKind kind)
{
    switch (kind) {
    case BaseKind::LogReg: return "logreg";
    case BaseKind::BaggedGbdt: return "bagged_gbdt";
    case BaseKind::Knn: return "knn";
    case BaseKind::AdaBoost: return "adaboost";
    }
    return "?";
}

std::optional<ProbMatrix> BaseFitCache::find(const std::string& key) const
{
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    ++hits_;
    return it->second;
}

void BaseFitCache::store(const std::string& key, ProbMatrix value)
{
    entries_.insert_or_assign(key, std::move(value));
}

const BaseModel* BaseFitCache::find_model(const std::string& key) const
{
    const auto it = models_.find(key);
    if (it == models_.end()) return nullptr;
    ++hits_;
    return &it->second;
}

void BaseFitCache::store_model(const std::string& key, BaseModel model)
{
    models_.insert_or_assign(key, std::move(model));
}

std::uint64_t data_fingerprint(const Eigen::MatrixXd& X, std::span<const Label> y)
{
    std::uint64_t h = fnv1a64(std::string_view(reinterpret_cast<const char*>(X.data()),
                                               static_cast<std::size_t>(X.size()) * sizeof(double)));
    h ^= SplitMix64::mix(static_cast<std::uint64_t>(X.rows()) * 31 + static_cast<std::uint64_t>(X.cols()));
    h = SplitMix64::mix(h ^ fnv1a64(std::string_view(reinterpret_cast<const char*>(y.data()), y.size())));
    return h;
}

BaseModels train_base_models(const Eigen::MatrixXd& X, std::span<const Label> y,
                             const Hyperparams& hp, std::uint64_t seed, BaseFitCache* cache)
{
    const std::string data_key =
        cache != nullptr ? "|refit=" + std::to_string(data_fingerprint(X, y)) : std::string();
    auto key = [&](BaseKind kind) { return base_key(kind, hp, seed) + data_key; };
    BaseModels models;
    models.logreg = cached_fit<LogRegModel>(cache, key(BaseKind::LogReg),
                                            [&] { return train_logreg(X, y, hp.logreg); });
    models.bagged = cached_fit<BaggedModel>(cache, key(BaseKind::BaggedGbdt), [&] {
        return train_bagged_gbdt(X, y, hp.bagging, seed);
    });
    models.knn = cached_fit<KnnModel>(cache, key(BaseKind::Knn),
                                      [&] { return train_knn(X, y, hp.knn_neighbors); });
    models.adaboost = cached_fit<AdaBoostModel>(cache, key(BaseKind::AdaBoost),
                                                [&] { return train_adaboost(X, y, hp.adaboost); });
    return models;
}

ProbMatrix predict_base(const BaseModels& models, BaseKind kind, const Eigen::MatrixXd& X)
{
    switch (kind) {
    case BaseKind::LogReg: return predict_logreg_rows(models.logreg, X);
    case BaseKind::BaggedGbdt: return predict_bagged_rows(models.bagged, X);
    case BaseKind::Knn: return predict_knn_rows(models.knn, X);
    case BaseKind::AdaBoost: return predict_adaboost_rows(models.adaboost, X);
    }
    return {};
}

MetaFeatures meta_rows_for_fold(const Eigen::MatrixXd& X, std::span<const Label> y,
                                const FoldPlan& fold_plan, int fold, const Hyperparams& hp,
                                std::uint64_t seed, BaseFitCache* cache)
{
    const auto inside = fold_plan.fold_members(fold);
    const auto outside = fold_plan.fold_complement(fold);
    const Eigen::MatrixXd X_train = select_rows(X, outside);
    const auto y_train = select_labels(y, outside);
    const Eigen::MatrixXd X_query = select_rows(X, inside);
    const std::uint64_t member_seed = bagging_seed(seed, static_cast<std::uint64_t>(fold));

    std::string data_key;
    if (cache != nullptr) {
        data_key = "|train=" + std::to_string(data_fingerprint(X_train, y_train)) +
                   "|query=" + std::to_string(data_fingerprint(X_query, {}));
    }

    MetaFeatures rows(X_query.rows(), kMetaWidth);
    for (int b = 0; b < kNumBaseModels; ++b) {
        const BaseKind kind = kBaseOrder[static_cast<std::size_t>(b)];
        try {
            std::optional<ProbMatrix> probs;
            std::string key;
            if (cache != nullptr) {
                key = base_key(kind, hp, member_seed) + data_key;
                probs = cache->find(key);
            }
            if (!probs) {
                probs = fit_predict(kind, X_train, y_train, X_query, hp, member_seed);
                if (cache != nullptr) cache->store(key, *probs);
            }
            rows.middleCols<kNumClasses>(b * kNumClasses) = *probs;
        } catch (const Error& e) {
            throw Error(e.code(), "fold " + std::to_string(fold) + ", learner " +
                                      std::string(base_kind_name(kind)) + ": " + e.message());
        }
    }
    return rows;
}

MetaFeatures build_meta_features(const Eigen::MatrixXd& X, std::span<const Label> y,
                                 const FoldPlan& fold_plan, const Hyperparams& hp,
                                 std::uint64_t seed, BaseFitCache* cache)
{
    if (static_cast<std::size_t>(X.rows()) != y.size())
        fail(ErrorCode::LengthMismatch, "rows and labels differ in count");
    if (fold_plan.k < 2) fail(ErrorCode::InvalidArgument, "stacking needs k >= 2 folds");
    if (fold_plan.indices.size() != y.size())
        fail(ErrorCode::InvalidArgument, "fold plan does not cover every row");
    std::vector<char> covered(y.size(), 0);
    for (std::size_t idx : fold_plan.indices) {
        if (idx >= y.size() || covered[idx]) fail(ErrorCode::InvalidArgument, "fold plan must index each row once");
        covered[idx] = 1;
    }

    MetaFeatures meta(X.rows(), kMetaWidth);
    for (int fold = 0; fold < fold_plan.k; ++fold) {
        const auto inside = fold_plan.fold_members(fold);
        if (inside.empty()) continue;
        const MetaFeatures rows = meta_rows_for_fold(X, y, fold_plan, fold, hp, seed, cache);
        for (std::size_t i = 0; i < inside.size(); ++i)
            meta.row(static_cast<Eigen::Index>(inside[i])) = rows.row(static_cast<Eigen::Index>(i));
    }
    return meta;
}

double binary_logreg_objective(const Eigen::VectorXd& params, const Eigen::MatrixXd& X,
                               const Eigen::VectorXd& target, double c, Eigen::VectorXd* grad)
{
    const Eigen::Index d = X.cols();
    const auto n = static_cast<double>(X.rows());
    const auto w = params.head(d);
    const double b = params(d);
    const Eigen::VectorXd z = (X * w).array() + b;
    double loss = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        // -[t log s(z) + (1 - t) log(1 - s(z))] = softplus(z) - t z
        loss += softplus(z(i)) - target(i) * z(i);
    }
    loss = loss / n + w.squaredNorm() / (2.0 * c * n);
    if (grad != nullptr) {
        Eigen::VectorXd residual(z.size());
        for (Eigen::Index i = 0; i < z.size(); ++i) residual(i) = sigmoid(z(i)) - target(i);
        grad->resize(d + 1);
        grad->head(d) = X.transpose() * residual / n + w / (c * n);
        (*grad)(d) = residual.sum() / n;
    }
    return loss;
}

OvrLogReg train_ovr_logreg(const MetaFeatures& meta, std::span<const Label> y,
                           const LogRegConfig& config)
{
    check_training_set(meta.rows(), y, 3);
    if (!(config.c > 0.0))
        fail(ErrorCode::InvalidArgument, "final_estimator__estimator__C must be positive");
    const Eigen::MatrixXd X = meta;
    OvrLogReg model;
    model.config = config;
    DescentOptions options;
    options.tolerance = config.tolerance;
    options.max_iterations = config.max_iterations;
    for (int k = 0; k < kNumClasses; ++k) {
        Eigen::VectorXd target(X.rows());
        for (Eigen::Index i = 0; i < X.rows(); ++i)
            target(i) = index_of(y[static_cast<std::size_t>(i)]) == k ? 1.0 : 0.0;
        auto objective = [&](const Eigen::VectorXd& params, Eigen::VectorXd& grad) {
            return binary_logreg_objective(params, X, target, config.c, &grad);
        };
        const auto result = minimize_gradient_descent<double>(
            objective, Eigen::VectorXd::Zero(kMetaWidth + 1), options);
        model.weights.row(k) = result.x.head<kMetaWidth>().transpose();
        model.bias(k) = result.x(kMetaWidth);
    }
    if (!model.weights.allFinite() || !model.bias.allFinite())
        fail(ErrorCode::NonFiniteLoss, "meta-model parameters diverged");
    return model;
}

ProbDist predict_ovr(const OvrLogReg& model, const Eigen::Matrix<double, 1, kMetaWidth>& row)
{
    ProbDist scores;
    for (int k = 0; k < kNumClasses; ++k)
        scores(k) = sigmoid(model.weights.row(k).dot(row) + model.bias(k));
    const double total = scores.sum();
    if (!(total > 0.0)) return ProbDist::Constant(1.0 / kNumClasses);
    return scores / total;
}

StackedEnsemble train_stacked(const Eigen::MatrixXd& X, std::span<const Label> y,
                              const Hyperparams& hp, std::uint64_t seed, BaseFitCache* cache)
{
    check_training_set(X.rows(), y, 3);
    StackedEnsemble model;
    model.hyperparams = hp;
    model.seed = seed;
    model.fold_plan = make_folds(y, hp.cse_folds, hp.cse_stratified, derive_seed(seed, "cse-folds"));
    const MetaFeatures meta = build_meta_features(X, y, model.fold_plan, hp, seed, cache);
    model.meta = train_ovr_logreg(meta, y, hp.meta);
    model.base = train_base_models(X, y, hp, bagging_seed(seed, static_cast<std::uint64_t>(hp.cse_folds)),
                                   cache);
    return model;
}

Eigen::Matrix<double, 1, kMetaWidth> meta_row(const BaseModels& base, const RowRef& x)
{
    Eigen::Matrix<double, 1, kMetaWidth> row;
    row.segment<kNumClasses>(0) = predict_logreg(base.logreg, x).transpose();
    row.segment<kNumClasses>(3) = predict_bagged(base.bagged, x).transpose();
    row.segment<kNumClasses>(6) = predict_knn(base.knn, x).transpose();
    row.segment<kNumClasses>(9) = predict_adaboost(base.adaboost, x).transpose();
    return row;
}

ProbDist predict_stacked(const StackedEnsemble& model, const RowRef& x)
{
    return predict_ovr(model.meta, meta_row(model.base, x));
}

ProbMatrix predict_stacked_rows(const StackedEnsemble& model, const Eigen::MatrixXd& X)
{
    ProbMatrix out(X.rows(), kNumClasses);
    for (Eigen::Index i = 0; i < X.rows(); ++i) out.row(i) = predict_stacked(model, X.row(i)).transpose();
    return out;
}

CseModel train_cse(const std::vector<Document>& train_docs, const PipelineOptions& features,
                   const EmbeddingTable* table, const Hyperparams& hp, std::uint64_t seed)
{
    CseModel model;
    model.pipeline = fit_pipeline(train_docs, features, table);
    const Eigen::MatrixXd X = model.pipeline.transform(train_docs, table);
    std::vector<Label> y;
    y.reserve(train_docs.size());
    for (const auto& d : train_docs) {
        if (!d.label) fail(ErrorCode::InvalidArgument, "training document without a label");
        y.push_back(*d.label);
    }
    model.ensemble = train_stacked(X, y, hp, seed);
    return model;
}

std::pair<Label, ProbDist> predict_cse(const CseModel& model, std::string_view text,
                                       const DenseVector* embedding)
{
    const Eigen::RowVectorXd x = model.pipeline.fused(text, embedding).to_dense();
    const ProbDist probs = predict_stacked(model.ensemble, x);
    return {argmax_label(probs), probs};
}

} // namespace stacksent
