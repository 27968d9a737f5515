#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "authprof/corpus.hpp"
#include "authprof/features.hpp"
#include "authprof/linsvm.hpp"

namespace authprof {

// The 11-value regularization grid 10^-5 .. 10^5.
std::vector<double> default_c_grid();

struct EnsembleMember {
    FeatureScheme scheme;
    FeatureSpace space;
    CalibratedLinearModel model;
};

// Eight calibrated linear classifiers (char 1..6, word 1..2) fused by
// probability summation. Gender and variety get independent ensembles.
struct EnsembleModel {
    Task task = Task::gender;
    std::vector<std::string> labels;
    std::vector<EnsembleMember> members; // all_schemes() order
};

struct TuningGridPoint {
    double C = 0;
    std::vector<double> fold_accuracies;
    double mean_accuracy = 0;
};

struct MemberTuning {
    FeatureScheme scheme;
    std::vector<TuningGridPoint> grid; // grid order
    double chosen_C = 0;               // max mean accuracy, ties to the smaller C
};

struct TuningReport {
    Task task = Task::gender;
    int folds = 0;
    std::vector<MemberTuning> members; // all_schemes() order

    std::map<FeatureScheme, double> chosen() const;
};

struct TuneOptions {
    std::vector<double> c_grid = default_c_grid();
    double tol = 1e-4;
    int max_epochs = 1000;
    std::uint64_t seed = 1; // forwarded to the solver / calibration splits
};

// Cross-validates one member: for every C, fit the feature space and the
// model on each fold complement and average held-out accuracy. Training
// failures are rethrown annotated with (scheme, C, fold).
MemberTuning tune_member(const Corpus& corpus, const FeatureScheme& scheme, Task task,
                         const FoldAssignment& folds, const TuneOptions& opts = {});

TuningReport tune_all(const Corpus& corpus, Task task, const FoldAssignment& folds,
                      const TuneOptions& opts = {});

// Refits every member on the full corpus with its chosen C.
EnsembleModel train_ensemble(const Corpus& corpus, Task task,
                             const std::map<FeatureScheme, double>& tuned_Cs,
                             const TuneOptions& opts = {});

struct FusedPrediction {
    std::size_t label_index = 0;
    std::vector<double> fused;                      // element-wise sum, unnormalized
    std::vector<std::vector<double>> member_probs;  // one simplex vector per member
};

// Element-wise probability sum; predicted label is the argmax, ties going
// to the lexicographically smallest label. Per-label sums accumulate in
// value order so the result is bit-identical under member permutation.
FusedPrediction fuse(const std::vector<std::vector<double>>& member_probs,
                     const std::vector<std::string>& labels);

FusedPrediction predict(const EnsembleModel& model, const AuthorRecord& author);

const std::string& predicted_label(const EnsembleModel& model, const FusedPrediction& pred);

} // namespace authprof
