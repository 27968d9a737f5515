#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "authprof/corpus.hpp"

namespace authprof {

struct PredictionSet {
    std::string lang;
    struct Entry {
        std::optional<std::string> gender;
        std::optional<std::string> variety;
    };
    std::map<std::string, Entry> by_author; // author_id -> predictions

    const std::optional<std::string>& get(const std::string& author_id, Task task) const;
    void set(const std::string& author_id, Task task, std::string label);
};

// Row = true label, column = predicted label, over the union of observed
// label values (sorted).
struct ConfusionMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<std::size_t>> counts;

    std::size_t row_total(std::size_t row) const;
};

struct ScoreReport {
    double gender_acc = 0;
    double variety_acc = 0;
    double joint_acc = 0;   // both correct together
    double average_acc = 0; // (gender + variety + joint) / 3
    ConfusionMatrix gender_confusion;
    ConfusionMatrix variety_confusion;
    std::size_t author_count = 0;
};

// Requires predictions for both tasks on exactly the truth corpus's
// author ids; throws ValidationError listing the symmetric difference.
ScoreReport score(const Corpus& truth, const PredictionSet& preds);

// Accuracy for one task (used for the per-task baseline tables).
double task_accuracy(const Corpus& truth, const PredictionSet& preds, Task task);

// Majority-class predictor. Ties go to the lexicographically smallest
// label; its accuracy equals the test frequency of the chosen label.
PredictionSet stat_baseline(const Corpus& train, const std::vector<std::string>& test_ids);

// The `cap` most frequent word unigrams from the training corpus (ties at
// the cutoff keep the lexicographically smaller term), sorted
// lexicographically for index assignment.
std::vector<std::string> select_top_terms(const Corpus& train, std::size_t cap);

struct BowBaselineResult {
    PredictionSet preds;
    std::size_t vocabulary_size = 0;
    bool truncated = false; // false means fewer distinct terms than the cap existed
};

// Bag-of-words baseline: L2-normalized counts over the 1,000 most
// frequent word unigrams, one calibrated linear SVM with C=1, no ensemble.
BowBaselineResult bow_baseline(const Corpus& train, const Corpus& test, Task task,
                               std::size_t vocabulary_cap = 1000);

} // namespace authprof
