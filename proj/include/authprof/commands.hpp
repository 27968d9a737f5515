#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "authprof/corpus.hpp"
#include "authprof/ensemble.hpp"

namespace authprof {

// One flag set shared by every subcommand; each command reads the fields
// it needs and writes the exact config used under <out>/config/.
struct RunConfig {
    std::string command;
    std::optional<std::filesystem::path> train_dir;
    std::optional<std::filesystem::path> test_dir;
    std::optional<std::filesystem::path> truth;
    std::optional<std::filesystem::path> pred_dir;  // default <out>/predictions/<lang>
    std::optional<std::filesystem::path> model_dir; // default <out>/models/<lang>
    std::optional<std::filesystem::path> spec_path; // gen-corpus JSON spec
    std::string task = "both";                      // gender | variety | both
    std::optional<std::string> lang;
    std::filesystem::path out;
    std::uint64_t seed = 1;
    int folds = 3;
    std::vector<double> c_grid;        // empty = default 10^-5..10^5
    std::optional<double> c_fixed;     // train without a tuning run
    double tol = 1e-4;
    int max_epochs = 1000;
    bool baselines = false;
    bool strict = false;
    std::optional<double> train_fraction; // gen-corpus: write train/test split
    std::optional<int> demo_authors;      // gen-corpus: built-in demo spec
};

std::vector<Task> selected_tasks(const RunConfig& config);

// Output layout helpers (all below config.out).
std::filesystem::path tune_dir(const RunConfig& config, const std::string& lang, Task task);
std::filesystem::path models_dir(const RunConfig& config, const std::string& lang, Task task);
std::filesystem::path predictions_dir(const RunConfig& config, const std::string& lang);
std::filesystem::path report_path(const RunConfig& config, const std::string& lang);

// Loads a corpus for a command: explicit --truth wins, otherwise
// <dir>/truth.txt is picked up when present.
Corpus load_corpus_for(const RunConfig& config, const std::filesystem::path& dir);

void cmd_gen_corpus(const RunConfig& config);
void cmd_tune(const RunConfig& config);
void cmd_train(const RunConfig& config);

struct PredictOutcome {
    std::size_t written = 0;
    std::size_t skipped = 0; // unreadable author files in non-strict mode
};
PredictOutcome cmd_predict(const RunConfig& config);

void cmd_evaluate(const RunConfig& config);

} // namespace authprof
