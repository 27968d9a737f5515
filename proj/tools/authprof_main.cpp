#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "authprof/commands.hpp"
#include "authprof/errors.hpp"

namespace {

using authprof::RunConfig;

void add_common_flags(CLI::App* cmd, RunConfig& config) {
    cmd->add_option("--out", config.out, "Output directory")->required();
    cmd->add_option("--seed", config.seed, "Random seed (default 1)");
    cmd->add_option("--lang", config.lang, "Expected language code (ar|en|pt|es)");
}

void add_training_flags(CLI::App* cmd, RunConfig& config) {
    cmd->add_option("--train-dir", config.train_dir, "Directory of training author XML files");
    cmd->add_option("--truth", config.truth, "Truth file (default: truth.txt beside the corpus)");
    cmd->add_option("--task", config.task, "gender | variety | both (default both)");
    cmd->add_option("--c-grid", config.c_grid,
                    "Override the C grid (default 1e-5 1e-4 ... 1e5)");
    cmd->add_option("--tol", config.tol, "Solver tolerance (default 1e-4)");
    cmd->add_option("--max-epochs", config.max_epochs, "Solver epoch cap (default 1000)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Author profiling with an ensemble of calibrated linear SVMs"};
    app.require_subcommand(1);

    RunConfig config;

    auto* gen = app.add_subcommand("gen-corpus", "Generate a synthetic PAN-style corpus");
    add_common_flags(gen, config);
    gen->add_option("--spec", config.spec_path, "Synthetic corpus spec (JSON)");
    gen->add_option("--demo", config.demo_authors, "Use the built-in demo spec with N authors");
    gen->add_option("--train-fraction", config.train_fraction,
                    "Write a stratified train/test split instead of one corpus");

    auto* tune = app.add_subcommand("tune", "Cross-validate C for every ensemble member");
    add_common_flags(tune, config);
    add_training_flags(tune, config);
    tune->add_option("--folds", config.folds, "Cross-validation folds (default 3)");

    auto* train = app.add_subcommand("train", "Train the ensembles with tuned (or fixed) C");
    add_common_flags(train, config);
    add_training_flags(train, config);
    train->add_option("--c-fixed", config.c_fixed, "Use one C for all members instead of tuning output");

    auto* predict = app.add_subcommand("predict", "Annotate a test corpus with predictions");
    add_common_flags(predict, config);
    predict->add_option("--test-dir", config.test_dir, "Directory of test author XML files")->required();
    predict->add_option("--task", config.task, "gender | variety | both (default both)");
    predict->add_option("--model-dir", config.model_dir, "Model base directory (default <out>/models/<lang>)");
    predict->add_flag("--strict", config.strict, "Fail on the first unreadable author file");

    auto* evaluate = app.add_subcommand("evaluate", "Score predictions against a truth file");
    add_common_flags(evaluate, config);
    evaluate->add_option("--test-dir", config.test_dir, "Directory of test author XML files")->required();
    evaluate->add_option("--truth", config.truth, "Truth file for the test corpus");
    evaluate->add_option("--task", config.task, "Tasks for the baseline rows (default both)");
    evaluate->add_option("--pred-dir", config.pred_dir, "Predictions directory (default <out>/predictions/<lang>)");
    evaluate->add_option("--train-dir", config.train_dir, "Training corpus (required with --baselines)");
    evaluate->add_flag("--baselines", config.baselines, "Include BOW and STAT baseline rows");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            config.command = "gen-corpus";
            authprof::cmd_gen_corpus(config);
        } else if (tune->parsed()) {
            config.command = "tune";
            authprof::cmd_tune(config);
        } else if (train->parsed()) {
            config.command = "train";
            authprof::cmd_train(config);
        } else if (predict->parsed()) {
            config.command = "predict";
            const auto outcome = authprof::cmd_predict(config);
            if (outcome.skipped > 0) {
                std::cerr << "predict: skipped " << outcome.skipped << " unreadable author file(s)\n";
                return 2;
            }
        } else if (evaluate->parsed()) {
            config.command = "evaluate";
            authprof::cmd_evaluate(config);
        }
    } catch (const authprof::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const authprof::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
