#include "authprof/eval.hpp"

#include <algorithm>
#include <set>

#include "authprof/errors.hpp"
#include "authprof/linsvm.hpp"

namespace authprof {

namespace {

std::string join(const std::vector<std::string>& items, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

void check_same_ids(const Corpus& truth, const PredictionSet& preds) {
    std::vector<std::string> missing, extra;
    for (const auto& a : truth.authors) {
        if (!preds.by_author.count(a.author_id)) missing.push_back(a.author_id);
    }
    for (const auto& [id, _] : preds.by_author) {
        if (!truth.find(id)) extra.push_back(id);
    }
    if (!missing.empty() || !extra.empty()) {
        std::string msg = "prediction/truth id mismatch";
        if (!missing.empty()) msg += "; missing predictions: " + join(missing, ", ");
        if (!extra.empty()) msg += "; unknown ids: " + join(extra, ", ");
        throw ValidationError(msg);
    }
}

ConfusionMatrix make_confusion(const Corpus& truth, const PredictionSet& preds, Task task) {
    std::set<std::string> label_set;
    for (const auto& a : truth.authors) {
        label_set.insert(task_label(a, task));
        label_set.insert(*preds.get(a.author_id, task));
    }
    ConfusionMatrix cm;
    cm.labels.assign(label_set.begin(), label_set.end());
    cm.counts.assign(cm.labels.size(), std::vector<std::size_t>(cm.labels.size(), 0));
    auto index_of = [&cm](const std::string& label) {
        return static_cast<std::size_t>(
            std::lower_bound(cm.labels.begin(), cm.labels.end(), label) - cm.labels.begin());
    };
    for (const auto& a : truth.authors) {
        cm.counts[index_of(task_label(a, task))][index_of(*preds.get(a.author_id, task))]++;
    }
    return cm;
}

std::string majority_label(const Corpus& train, Task task) {
    std::map<std::string, std::size_t> counts;
    for (const auto& a : train.authors) ++counts[task_label(a, task)];
    if (counts.empty()) throw ValidationError("majority baseline needs a labeled training corpus");
    // Map iterates labels in sorted order; strict inequality keeps the
    // lexicographically smallest label on ties.
    auto best = counts.begin();
    for (auto it = std::next(counts.begin()); it != counts.end(); ++it) {
        if (it->second > best->second) best = it;
    }
    return best->first;
}

} // namespace

const std::optional<std::string>& PredictionSet::get(const std::string& author_id, Task task) const {
    auto it = by_author.find(author_id);
    if (it == by_author.end()) {
        throw ValidationError("no prediction for author '" + author_id + "'");
    }
    return task == Task::gender ? it->second.gender : it->second.variety;
}

void PredictionSet::set(const std::string& author_id, Task task, std::string label) {
    auto& entry = by_author[author_id];
    (task == Task::gender ? entry.gender : entry.variety) = std::move(label);
}

std::size_t ConfusionMatrix::row_total(std::size_t row) const {
    std::size_t total = 0;
    for (std::size_t v : counts[row]) total += v;
    return total;
}

ScoreReport score(const Corpus& truth, const PredictionSet& preds) {
    if (truth.authors.empty()) throw ValidationError("empty evaluation corpus");
    check_same_ids(truth, preds);
    for (const auto& a : truth.authors) {
        if (!preds.get(a.author_id, Task::gender) || !preds.get(a.author_id, Task::variety)) {
            throw ValidationError("author '" + a.author_id +
                                  "' is missing a gender or variety prediction");
        }
    }

    std::size_t gender_ok = 0, variety_ok = 0, joint_ok = 0;
    for (const auto& a : truth.authors) {
        const bool g = *preds.get(a.author_id, Task::gender) == task_label(a, Task::gender);
        const bool v = *preds.get(a.author_id, Task::variety) == task_label(a, Task::variety);
        gender_ok += g;
        variety_ok += v;
        joint_ok += g && v;
    }

    ScoreReport report;
    report.author_count = truth.authors.size();
    const double n = static_cast<double>(truth.authors.size());
    report.gender_acc = static_cast<double>(gender_ok) / n;
    report.variety_acc = static_cast<double>(variety_ok) / n;
    report.joint_acc = static_cast<double>(joint_ok) / n;
    report.average_acc = (report.gender_acc + report.variety_acc + report.joint_acc) / 3.0;
    report.gender_confusion = make_confusion(truth, preds, Task::gender);
    report.variety_confusion = make_confusion(truth, preds, Task::variety);
    return report;
}

double task_accuracy(const Corpus& truth, const PredictionSet& preds, Task task) {
    if (truth.authors.empty()) throw ValidationError("empty evaluation corpus");
    check_same_ids(truth, preds);
    std::size_t correct = 0;
    for (const auto& a : truth.authors) {
        const auto& pred = preds.get(a.author_id, task);
        if (!pred) {
            throw ValidationError("author '" + a.author_id + "' has no " + to_string(task) +
                                  " prediction");
        }
        if (*pred == task_label(a, task)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(truth.authors.size());
}

PredictionSet stat_baseline(const Corpus& train, const std::vector<std::string>& test_ids) {
    const std::string gender = majority_label(train, Task::gender);
    const std::string variety = majority_label(train, Task::variety);
    PredictionSet preds;
    preds.lang = train.lang;
    for (const auto& id : test_ids) {
        preds.set(id, Task::gender, gender);
        preds.set(id, Task::variety, variety);
    }
    return preds;
}

std::vector<std::string> select_top_terms(const Corpus& train, std::size_t cap) {
    TermCounts totals;
    const FeatureScheme unigram = make_scheme(FeatureScheme::Kind::word, 1);
    for (const auto& a : train.authors) {
        for (const auto& [term, count] : extract_ngrams(author_text(a), unigram)) {
            totals[term] += count;
        }
    }
    std::vector<std::pair<std::string, std::uint64_t>> ranked(totals.begin(), totals.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        // By count descending; TermCounts already iterated lexicographically,
        // so stable sort keeps the smaller term first on ties.
        return a.second > b.second;
    });
    if (ranked.size() > cap) ranked.resize(cap);
    std::vector<std::string> terms;
    terms.reserve(ranked.size());
    for (auto& [term, _] : ranked) terms.push_back(std::move(term));
    std::sort(terms.begin(), terms.end());
    return terms;
}

BowBaselineResult bow_baseline(const Corpus& train, const Corpus& test, Task task,
                               std::size_t vocabulary_cap) {
    if (!train.labeled()) throw ValidationError("BOW baseline needs a labeled training corpus");

    const auto terms = select_top_terms(train, vocabulary_cap);
    FeatureSpace space;
    space.scheme = make_scheme(FeatureScheme::Kind::word, 1);
    space.terms = terms;
    for (std::uint32_t i = 0; i < space.terms.size(); ++i) space.index.emplace(space.terms[i], i);

    std::vector<SparseVector> x_train;
    std::vector<std::string> y_train;
    for (const auto& a : train.authors) {
        x_train.push_back(vectorize(author_text(a), space));
        y_train.push_back(task_label(a, task));
    }
    const CalibratedLinearModel model =
        train_multiclass(x_train, y_train, task_labels(train, task), /*C=*/1.0, {});

    BowBaselineResult result;
    result.vocabulary_size = terms.size();
    result.truncated = terms.size() == vocabulary_cap;
    result.preds.lang = test.lang;
    for (const auto& a : test.authors) {
        const auto idx = predict_label_index(model, vectorize(author_text(a), space));
        result.preds.set(a.author_id, task, model.labels[idx]);
    }
    return result;
}

} // namespace authprof
