#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "authprof/features.hpp"

namespace authprof {

// L2-regularized L1-loss (hinge) linear SVM. The bias is trained as an
// augmented constant feature of value 1, so it is regularized like any
// other weight.
struct BinaryLinearModel {
    std::vector<double> weights;
    double bias = 0;
    double C = 1;
};

// Sigmoid over decision scores: P(positive | s) = 1 / (1 + exp(A*s + B)).
// A is negative for any classifier whose scores rank positives higher.
struct PlattCalibrator {
    double A = -1;
    double B = 0;

    double probability(double score) const;
};

struct BinaryTrainOptions {
    double tol = 1e-4;      // max projected-gradient violation at convergence
    int max_epochs = 1000;
    std::uint64_t seed = 1; // coordinate-order shuffling
};

// Solver evidence for tests: dual variables, per-epoch dual objective.
struct BinaryTrainDiagnostics {
    std::vector<double> alpha;
    std::vector<double> dual_objective_by_epoch;
    int epochs = 0;
    bool converged = false;

    double primal_objective = 0; // 0.5*(||w||^2 + b^2) + C * sum hinge
    double dual_objective = 0;   // sum(alpha) - 0.5*||w_aug||^2
};

// Dual coordinate descent on the hinge-loss SVM dual: one pass visits
// every training point in a seeded random order and applies the
// closed-form clipped update; stops when the largest projected-gradient
// violation falls below tol.
BinaryLinearModel train_binary(const std::vector<SparseVector>& X, const std::vector<int>& y,
                               double C, const BinaryTrainOptions& opts = {},
                               BinaryTrainDiagnostics* diag = nullptr);

// w.x + b
double decision(const BinaryLinearModel& model, const SparseVector& x);

// Platt's sigmoid fit with regularized targets, optimized by Newton's
// method with backtracking line search. If every score is identical the
// slope is pinned to zero and only the offset is fit.
PlattCalibrator fit_platt(const std::vector<double>& scores, const std::vector<int>& y);

struct MulticlassTrainOptions {
    double tol = 1e-4;
    int max_epochs = 1000;
    int calibration_folds = 3;
    std::uint64_t seed = 1;
};

// One-vs-rest: a binary model per label plus a Platt calibrator fit on
// out-of-fold decision scores from an internal split of the training data.
struct CalibratedLinearModel {
    std::vector<std::string> labels;
    std::vector<BinaryLinearModel> models;      // parallel to labels
    std::vector<PlattCalibrator> calibrators;   // parallel to labels
    std::uint32_t dimension = 0;

    double C = 1;
};

CalibratedLinearModel train_multiclass(const std::vector<SparseVector>& X,
                                       const std::vector<std::string>& y,
                                       const std::vector<std::string>& labels, double C,
                                       const MulticlassTrainOptions& opts = {});

// Per-label Platt probabilities normalized to sum 1; uniform if they all
// underflow to zero.
std::vector<double> predict_proba(const CalibratedLinearModel& model, const SparseVector& x);

std::size_t predict_label_index(const CalibratedLinearModel& model, const SparseVector& x);

} // namespace authprof
