#pragma once

#include "stacksent/boosting.hpp"
#include "stacksent/corpus.hpp"
#include "stacksent/features.hpp"
#include "stacksent/hyperparams.hpp"
#include "stacksent/knn.hpp"
#include "stacksent/logreg.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>

namespace stacksent {

// Base learners of the stack, in meta-feature block order.
enum class BaseKind { LogReg = 0, BaggedGbdt = 1, Knn = 2, AdaBoost = 3 };

inline constexpr int kNumBaseModels = 4;
inline constexpr int kMetaWidth = kNumBaseModels * kNumClasses;
inline constexpr std::array<BaseKind, kNumBaseModels> kBaseOrder{
    BaseKind::LogReg, BaseKind::BaggedGbdt, BaseKind::Knn, BaseKind::AdaBoost};

std::string_view base_kind_name(BaseKind kind);

// Gathers rows (and their labels) in the order given.
Eigen::MatrixXd select_rows(const Eigen::MatrixXd& X, const std::vector<std::size_t>& rows);
std::vector<Label> select_labels(std::span<const Label> y, const std::vector<std::size_t>& rows);

using MetaFeatures = Eigen::Matrix<double, Eigen::Dynamic, kMetaWidth>;

struct BaseModels {
    LogRegModel logreg;
    BaggedModel bagged;
    KnnModel knn;
    AdaBoostModel adaboost;
};

using BaseModel = std::variant<LogRegModel, BaggedModel, KnnModel, AdaBoostModel>;

// Memoises base-model fits keyed by (learner, its hyperparameters, seed,
// training data): out-of-fold probability outputs (also keyed by the query
// data) and the full-data refits. Lets grid cells that share base
// hyperparameters reuse each other's fits.
class BaseFitCache {
public:
    std::optional<ProbMatrix> find(const std::string& key) const;
    void store(const std::string& key, ProbMatrix value);
    const BaseModel* find_model(const std::string& key) const;
    void store_model(const std::string& key, BaseModel model);
    void clear()
    {
        entries_.clear();
        models_.clear();
    }
    std::size_t size() const { return entries_.size() + models_.size(); }
    std::size_t hits() const { return hits_; }

private:
    std::map<std::string, ProbMatrix> entries_;
    std::map<std::string, BaseModel> models_;
    mutable std::size_t hits_ = 0;
};

// Trains one base learner. The bagged learner draws from `seed`.
BaseModels train_base_models(const Eigen::MatrixXd& X, std::span<const Label> y,
                             const Hyperparams& hp, std::uint64_t seed,
                             BaseFitCache* cache = nullptr);
ProbMatrix predict_base(const BaseModels& models, BaseKind kind, const Eigen::MatrixXd& X);

// Out-of-fold meta rows of one fold: the four learners are trained on the
// rows outside `fold` and predict the rows inside it (returned in
// fold_plan.fold_members order).
MetaFeatures meta_rows_for_fold(const Eigen::MatrixXd& X, std::span<const Label> y,
                                const FoldPlan& fold_plan, int fold, const Hyperparams& hp,
                                std::uint64_t seed, BaseFitCache* cache = nullptr);

// N x 12 matrix; row i comes from learners that never saw row i. The fold
// plan must index the rows of X. Training errors are rethrown annotated with
// fold and learner.
MetaFeatures build_meta_features(const Eigen::MatrixXd& X, std::span<const Label> y,
                                 const FoldPlan& fold_plan, const Hyperparams& hp,
                                 std::uint64_t seed, BaseFitCache* cache = nullptr);

// One binary logistic model per class over the 12 meta features.
struct OvrLogReg {
    Eigen::Matrix<double, kNumClasses, kMetaWidth> weights =
        Eigen::Matrix<double, kNumClasses, kMetaWidth>::Zero();
    Eigen::Vector3d bias = Eigen::Vector3d::Zero();
    LogRegConfig config;
};

// Mean binary cross-entropy plus ||w||^2 / (2 c N) for one class-vs-rest
// problem; fills the gradient (weights then bias) when non-null.
double binary_logreg_objective(const Eigen::VectorXd& params, const Eigen::MatrixXd& X,
                               const Eigen::VectorXd& target, double c,
                               Eigen::VectorXd* grad = nullptr);

OvrLogReg train_ovr_logreg(const MetaFeatures& meta, std::span<const Label> y,
                           const LogRegConfig& config);

// Per-class sigmoid scores divided by their sum.
ProbDist predict_ovr(const OvrLogReg& model, const Eigen::Matrix<double, 1, kMetaWidth>& row);

struct StackedEnsemble {
    BaseModels base;
    OvrLogReg meta;
    FoldPlan fold_plan; // plan used for the out-of-fold meta features
    Hyperparams hyperparams;
    std::uint64_t seed = 0;
};

StackedEnsemble train_stacked(const Eigen::MatrixXd& X, std::span<const Label> y,
                              const Hyperparams& hp, std::uint64_t seed,
                              BaseFitCache* cache = nullptr);

Eigen::Matrix<double, 1, kMetaWidth> meta_row(const BaseModels& base, const RowRef& x);
ProbDist predict_stacked(const StackedEnsemble& model, const RowRef& x);
ProbMatrix predict_stacked_rows(const StackedEnsemble& model, const Eigen::MatrixXd& X);

// Feature pipeline plus ensemble: the full text-in, label-out model.
struct CseModel {
    FeaturePipeline pipeline;
    StackedEnsemble ensemble;
};

CseModel train_cse(const std::vector<Document>& train_docs, const PipelineOptions& features,
                   const EmbeddingTable* table, const Hyperparams& hp, std::uint64_t seed);

// Label is the argmax with ties to the lower class index. Throws
// DimMismatch when the embedding does not fit the pipeline.
std::pair<Label, ProbDist> predict_cse(const CseModel& model, std::string_view text,
                                       const DenseVector* embedding);

// Fingerprint of a matrix and labels, used in cache keys.
std::uint64_t data_fingerprint(const Eigen::MatrixXd& X, std::span<const Label> y);

} // namespace stacksent
