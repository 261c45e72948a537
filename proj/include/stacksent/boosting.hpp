#pragma once

#include "stacksent/label.hpp"
#include "stacksent/tree.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace stacksent {

// ---- AdaBoost (multiclass SAMME) ----------------------------------------

struct AdaBoostConfig {
    int n_estimators = 50; // `adaboost__n_estimators`
    int max_depth = 1;
    int min_leaf = 1;

    bool operator==(const AdaBoostConfig&) const = default;
};

struct AdaBoostStage {
    DecisionTree tree;
    double alpha = 0.0;
    double error = 0.0; // weighted training error when the stage was fitted
};

struct AdaBoostModel {
    std::vector<AdaBoostStage> stages;
    AdaBoostConfig config;
};

// Stage error e, weight alpha = ln((1 - e) / e) + ln(K - 1). Stops early
// when e >= 1 - 1/K (stage dropped) or e == 0 (stage kept, alpha capped).
// Throws DegenerateStage when the first stage cannot beat chance.
AdaBoostModel train_adaboost(const Eigen::MatrixXd& X, std::span<const Label> y,
                             const AdaBoostConfig& config = {});

// Alpha-weighted vote shares.
ProbDist predict_adaboost(const AdaBoostModel& model, const RowRef& x);
ProbMatrix predict_adaboost_rows(const AdaBoostModel& model, const Eigen::MatrixXd& X);

// ---- Gradient-boosted trees (softmax cross-entropy) ----------------------

struct GbdtConfig {
    int n_estimators = 50;       // `lgbm__n_estimators`
    double learning_rate = 0.01; // `lgbm__learning_rate`
    int max_depth = 6;
    int min_leaf = 5;

    bool operator==(const GbdtConfig&) const = default;
};

struct GbdtModel {
    Eigen::Vector3d initial_scores = Eigen::Vector3d::Zero(); // class log-priors
    // One regression tree per class and round; leaf values already carry the
    // shrinkage, so scores are initial_scores + sum of leaf values.
    std::vector<std::array<DecisionTree, kNumClasses>> rounds;
    GbdtConfig config;
    // Weighted mean log-loss on the training rows: entry 0 before the first
    // round, entry r after round r.
    std::vector<double> train_loss;
};

// `weights` may be empty (all ones); bootstrap multiplicities otherwise.
GbdtModel train_gbdt(const Eigen::MatrixXd& X, std::span<const Label> y, const GbdtConfig& config,
                     std::span<const double> weights = {}, const ColumnIndex* index = nullptr);

Eigen::Vector3d gbdt_scores(const GbdtModel& model, const RowRef& x);
ProbDist predict_gbdt(const GbdtModel& model, const RowRef& x);
ProbMatrix predict_gbdt_rows(const GbdtModel& model, const Eigen::MatrixXd& X);

// ---- Bagging over GBDT members -----------------------------------------

struct BaggingConfig {
    int members = 10;
    bool bootstrap = true; // false: every member sees the full sample once
    GbdtConfig gbdt;

    bool operator==(const BaggingConfig&) const = default;
};

struct BaggedModel {
    std::vector<GbdtModel> members;
    std::vector<std::uint64_t> seeds;
    BaggingConfig config;
};

// Member m draws N rows with replacement from splitmix64 stream
// derive_seed(seed, "bagging", m).
BaggedModel train_bagged_gbdt(const Eigen::MatrixXd& X, std::span<const Label> y,
                              const BaggingConfig& config, std::uint64_t seed);

ProbDist predict_bagged(const BaggedModel& model, const RowRef& x);
ProbMatrix predict_bagged_rows(const BaggedModel& model, const Eigen::MatrixXd& X);

} // namespace stacksent
