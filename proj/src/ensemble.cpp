#include "authprof/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include "authprof/errors.hpp"
#include "authprof/parallel.hpp"

namespace authprof {

std::vector<double> default_c_grid() {
    std::vector<double> grid;
    for (int e = -5; e <= 5; ++e) grid.push_back(std::pow(10.0, e));
    return grid;
}

std::map<FeatureScheme, double> TuningReport::chosen() const {
    std::map<FeatureScheme, double> out;
    for (const auto& m : members) out[m.scheme] = m.chosen_C;
    return out;
}

namespace {

struct FoldData {
    std::vector<SparseVector> x_train, x_test;
    std::vector<std::string> y_train, y_test;
};

// Extracts n-gram counts once per author, then materializes the per-fold
// train/test matrices (feature space fitted on the fold complement only).
std::vector<FoldData> build_fold_data(const Corpus& corpus, const FeatureScheme& scheme,
                                      Task task, const FoldAssignment& folds) {
    std::vector<TermCounts> counts;
    counts.reserve(corpus.authors.size());
    for (const auto& a : corpus.authors) counts.push_back(extract_ngrams(author_text(a), scheme));

    std::vector<FoldData> out(folds.k);
    for (int f = 0; f < folds.k; ++f) {
        std::vector<TermCounts> train_counts;
        for (std::size_t i = 0; i < corpus.authors.size(); ++i) {
            if (folds.fold_of.at(corpus.authors[i].author_id) != f) train_counts.push_back(counts[i]);
        }
        const FeatureSpace space = fit_feature_space(train_counts, scheme);
        FoldData& data = out[f];
        for (std::size_t i = 0; i < corpus.authors.size(); ++i) {
            const auto& author = corpus.authors[i];
            if (folds.fold_of.at(author.author_id) == f) {
                data.x_test.push_back(vectorize(counts[i], space));
                data.y_test.push_back(task_label(author, task));
            } else {
                data.x_train.push_back(vectorize(counts[i], space));
                data.y_train.push_back(task_label(author, task));
            }
        }
    }
    return out;
}

MulticlassTrainOptions to_multiclass_opts(const TuneOptions& opts) {
    MulticlassTrainOptions mc;
    mc.tol = opts.tol;
    mc.max_epochs = opts.max_epochs;
    mc.seed = opts.seed;
    return mc;
}

} // namespace

MemberTuning tune_member(const Corpus& corpus, const FeatureScheme& scheme, Task task,
                         const FoldAssignment& folds, const TuneOptions& opts) {
    if (folds.k < 2) throw ValidationError("tuning needs at least 2 folds");
    if (opts.c_grid.empty()) throw ValidationError("empty C grid");
    const auto& labels = task_labels(corpus, task);
    const auto fold_data = build_fold_data(corpus, scheme, task, folds);
    const MulticlassTrainOptions mc_opts = to_multiclass_opts(opts);

    MemberTuning tuning;
    tuning.scheme = scheme;
    tuning.grid.resize(opts.c_grid.size());

    for (std::size_t ci = 0; ci < opts.c_grid.size(); ++ci) {
        TuningGridPoint& point = tuning.grid[ci];
        point.C = opts.c_grid[ci];
        double sum = 0;
        for (int f = 0; f < folds.k; ++f) {
            const FoldData& data = fold_data[f];
            CalibratedLinearModel model;
            try {
                model = train_multiclass(data.x_train, data.y_train, labels, point.C, mc_opts);
            } catch (const std::exception& e) {
                throw ValidationError("training failed for scheme " + to_string(scheme) +
                                      ", C=" + std::to_string(point.C) + ", fold " +
                                      std::to_string(f) + ": " + e.what());
            }
            std::size_t correct = 0;
            for (std::size_t i = 0; i < data.x_test.size(); ++i) {
                if (labels[predict_label_index(model, data.x_test[i])] == data.y_test[i]) ++correct;
            }
            const double acc = static_cast<double>(correct) / static_cast<double>(data.x_test.size());
            point.fold_accuracies.push_back(acc);
            sum += acc;
        }
        point.mean_accuracy = sum / static_cast<double>(folds.k);
    }

    // argmax of mean accuracy; strict improvement required, so ties keep
    // the smaller C (the grid is ascending).
    std::size_t best = 0;
    for (std::size_t ci = 1; ci < tuning.grid.size(); ++ci) {
        if (tuning.grid[ci].mean_accuracy > tuning.grid[best].mean_accuracy) best = ci;
    }
    tuning.chosen_C = tuning.grid[best].C;
    return tuning;
}

TuningReport tune_all(const Corpus& corpus, Task task, const FoldAssignment& folds,
                      const TuneOptions& opts) {
    TuningReport report;
    report.task = task;
    report.folds = folds.k;
    const auto& schemes = all_schemes();
    report.members.resize(schemes.size());
    parallel_for(schemes.size(), [&](std::size_t i) {
        report.members[i] = tune_member(corpus, schemes[i], task, folds, opts);
    });
    return report;
}

EnsembleModel train_ensemble(const Corpus& corpus, Task task,
                             const std::map<FeatureScheme, double>& tuned_Cs,
                             const TuneOptions& opts) {
    if (!corpus.labeled()) throw ValidationError("training requires a labeled corpus");
    const auto& schemes = all_schemes();
    for (const auto& scheme : schemes) {
        if (!tuned_Cs.count(scheme)) {
            throw ValidationError("no tuned C for scheme " + to_string(scheme));
        }
    }

    EnsembleModel model;
    model.task = task;
    model.labels = task_labels(corpus, task);

    std::vector<std::string> y;
    for (const auto& a : corpus.authors) y.push_back(task_label(a, task));
    const MulticlassTrainOptions mc_opts = to_multiclass_opts(opts);

    model.members.resize(schemes.size());
    parallel_for(schemes.size(), [&](std::size_t i) {
        EnsembleMember& member = model.members[i];
        member.scheme = schemes[i];
        member.space = fit_feature_space(corpus, schemes[i]);
        std::vector<SparseVector> x;
        x.reserve(corpus.authors.size());
        for (const auto& a : corpus.authors) x.push_back(vectorize(author_text(a), member.space));
        member.model = train_multiclass(x, y, model.labels, tuned_Cs.at(schemes[i]), mc_opts);
    });
    return model;
}

FusedPrediction fuse(const std::vector<std::vector<double>>& member_probs,
                     const std::vector<std::string>& labels) {
    if (member_probs.empty()) throw ValidationError("fuse: no member probabilities");
    for (const auto& probs : member_probs) {
        if (probs.size() != labels.size()) {
            throw ValidationError("fuse: probability vector length " + std::to_string(probs.size()) +
                                  " does not match label count " + std::to_string(labels.size()));
        }
    }

    FusedPrediction pred;
    pred.member_probs = member_probs;
    pred.fused.resize(labels.size());
    std::vector<double> column(member_probs.size());
    for (std::size_t li = 0; li < labels.size(); ++li) {
        for (std::size_t m = 0; m < member_probs.size(); ++m) column[m] = member_probs[m][li];
        // Summing in sorted order makes the total independent of member order.
        std::sort(column.begin(), column.end());
        double sum = 0;
        for (double v : column) sum += v;
        pred.fused[li] = sum;
    }

    std::size_t best = 0;
    for (std::size_t li = 1; li < labels.size(); ++li) {
        if (pred.fused[li] > pred.fused[best] ||
            (pred.fused[li] == pred.fused[best] && labels[li] < labels[best])) {
            best = li;
        }
    }
    pred.label_index = best;
    return pred;
}

FusedPrediction predict(const EnsembleModel& model, const AuthorRecord& author) {
    const std::string text = author_text(author);
    std::vector<std::vector<double>> member_probs(model.members.size());
    for (std::size_t m = 0; m < model.members.size(); ++m) {
        const EnsembleMember& member = model.members[m];
        member_probs[m] = predict_proba(member.model, vectorize(text, member.space));
    }
    return fuse(member_probs, model.labels);
}

const std::string& predicted_label(const EnsembleModel& model, const FusedPrediction& pred) {
    return model.labels[pred.label_index];
}

} // namespace authprof
