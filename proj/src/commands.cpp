#include "authprof/commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "authprof/errors.hpp"
#include "authprof/eval.hpp"
#include "authprof/model_io.hpp"
#include "authprof/rng.hpp"
#include "authprof/synthetic.hpp"

namespace authprof {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write file: " + path.string());
    out << content;
    if (!out) throw ValidationError("write failed: " + path.string());
}

nlohmann::json config_json(const RunConfig& config) {
    nlohmann::json j;
    j["command"] = config.command;
    auto put_path = [&j](const char* key, const std::optional<fs::path>& p) {
        if (p) j[key] = p->string();
    };
    put_path("train_dir", config.train_dir);
    put_path("test_dir", config.test_dir);
    put_path("truth", config.truth);
    put_path("pred_dir", config.pred_dir);
    put_path("model_dir", config.model_dir);
    put_path("spec", config.spec_path);
    j["task"] = config.task;
    if (config.lang) j["lang"] = *config.lang;
    j["out"] = config.out.string();
    j["seed"] = config.seed;
    j["folds"] = config.folds;
    if (!config.c_grid.empty()) j["c_grid"] = config.c_grid;
    if (config.c_fixed) j["c_fixed"] = *config.c_fixed;
    j["tol"] = config.tol;
    j["max_epochs"] = config.max_epochs;
    j["baselines"] = config.baselines;
    j["strict"] = config.strict;
    if (config.train_fraction) j["train_fraction"] = *config.train_fraction;
    if (config.demo_authors) j["demo_authors"] = *config.demo_authors;
    return j;
}

void write_config(const RunConfig& config, const std::string& suffix) {
    const std::string name = config.command + (suffix.empty() ? "" : "_" + suffix) + ".json";
    write_file(config.out / "config" / name, config_json(config).dump(2) + "\n");
}

TuneOptions tune_options(const RunConfig& config) {
    TuneOptions opts;
    if (!config.c_grid.empty()) opts.c_grid = config.c_grid;
    opts.tol = config.tol;
    opts.max_epochs = config.max_epochs;
    opts.seed = config.seed;
    return opts;
}

std::string resolve_lang(const RunConfig& config, const Corpus& corpus) {
    if (config.lang && *config.lang != corpus.lang) {
        throw ValidationError("--lang is '" + *config.lang + "' but the corpus language is '" +
                              corpus.lang + "'");
    }
    return corpus.lang;
}

std::string fmt_acc(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

} // namespace

std::vector<Task> selected_tasks(const RunConfig& config) {
    if (config.task == "gender") return {Task::gender};
    if (config.task == "variety") return {Task::variety};
    if (config.task == "both") return {Task::gender, Task::variety};
    throw ValidationError("unknown task '" + config.task + "' (expected gender, variety or both)");
}

fs::path tune_dir(const RunConfig& config, const std::string& lang, Task task) {
    return config.out / "tune" / lang / to_string(task);
}

fs::path models_dir(const RunConfig& config, const std::string& lang, Task task) {
    if (config.model_dir) return *config.model_dir / to_string(task);
    return config.out / "models" / lang / to_string(task);
}

fs::path predictions_dir(const RunConfig& config, const std::string& lang) {
    if (config.pred_dir) return *config.pred_dir;
    return config.out / "predictions" / lang;
}

fs::path report_path(const RunConfig& config, const std::string& lang) {
    return config.out / "reports" / (lang + ".json");
}

Corpus load_corpus_for(const RunConfig& config, const fs::path& dir) {
    if (config.truth) return load_corpus(dir, config.truth);
    const fs::path bundled = dir / "truth.txt";
    if (fs::is_regular_file(bundled)) return load_corpus(dir, bundled);
    return load_corpus(dir);
}

void cmd_gen_corpus(const RunConfig& config) {
    SyntheticSpec spec;
    if (config.spec_path) {
        spec = load_synthetic_spec(*config.spec_path);
        spec.seed = config.seed;
    } else if (config.demo_authors) {
        spec = demo_synthetic_spec(*config.demo_authors, config.seed);
    } else {
        throw ValidationError("gen-corpus needs --spec FILE or --demo N");
    }
    const Corpus corpus = generate_synthetic_corpus(spec);

    if (config.train_fraction) {
        const double frac = *config.train_fraction;
        if (!(frac > 0 && frac < 1)) throw ValidationError("--train-fraction must be in (0, 1)");
        // Stratified split: shuffle each (gender, variety) cell and send
        // the first round(frac * n) authors to the training side.
        std::map<std::pair<std::string, std::string>, std::vector<std::string>> strata;
        for (const auto& a : corpus.authors) strata[{*a.gender, *a.variety}].push_back(a.author_id);
        std::set<std::string> train_ids;
        std::uint64_t stratum_index = 0;
        for (auto& [key, ids] : strata) {
            std::sort(ids.begin(), ids.end());
            Rng rng(mix_seed(config.seed, 0xA110C000 + stratum_index++));
            rng.shuffle(ids);
            const auto n_train = static_cast<std::size_t>(
                std::min<double>(static_cast<double>(ids.size() - 1),
                                 std::max(1.0, frac * static_cast<double>(ids.size()) + 0.5)));
            for (std::size_t i = 0; i < n_train; ++i) train_ids.insert(ids[i]);
        }

        Corpus train, test;
        train.lang = test.lang = corpus.lang;
        train.gender_labels = test.gender_labels = corpus.gender_labels;
        train.variety_labels = test.variety_labels = corpus.variety_labels;
        for (const auto& a : corpus.authors) {
            (train_ids.count(a.author_id) ? train : test).authors.push_back(a);
        }

        WriteCorpusOptions train_opts;
        train_opts.truth_path = config.out / "train" / "truth.txt";
        write_corpus(train, config.out / "train", train_opts);

        Corpus unlabeled = test;
        for (auto& a : unlabeled.authors) {
            a.gender.reset();
            a.variety.reset();
        }
        write_corpus(unlabeled, config.out / "test", {});
        std::string truth;
        for (const auto& a : test.authors) {
            truth += a.author_id + ":::" + *a.gender + ":::" + *a.variety + "\n";
        }
        write_file(config.out / "test-truth.txt", truth);
    } else {
        WriteCorpusOptions opts;
        opts.truth_path = config.out / "corpus" / "truth.txt";
        write_corpus(corpus, config.out / "corpus", opts);
    }
    save_synthetic_spec(spec, config.out / "synthetic-spec.json");
    write_config(config, "");
}

void cmd_tune(const RunConfig& config) {
    if (!config.train_dir) throw ValidationError("tune needs --train-dir");
    const Corpus corpus = load_corpus_for(config, *config.train_dir);
    if (!corpus.labeled()) throw ValidationError("tuning needs a labeled training corpus");
    const std::string lang = resolve_lang(config, corpus);
    const FoldAssignment folds = make_folds(corpus, config.folds, config.seed);
    const TuneOptions opts = tune_options(config);

    for (Task task : selected_tasks(config)) {
        const TuningReport report = tune_all(corpus, task, folds, opts);
        const fs::path dir = tune_dir(config, lang, task);
        fs::create_directories(dir);
        save_tuning_report(report, dir / "grid.tsv");
        nlohmann::json chosen = nlohmann::json::object();
        for (const auto& [scheme, c] : report.chosen()) chosen[to_string(scheme)] = c;
        write_file(dir / "chosen_c.json", chosen.dump(2) + "\n");
    }
    write_config(config, lang);
}

namespace {

std::map<FeatureScheme, double> chosen_cs_for(const RunConfig& config, const std::string& lang,
                                              Task task) {
    std::map<FeatureScheme, double> cs;
    if (config.c_fixed) {
        for (const auto& scheme : all_schemes()) cs[scheme] = *config.c_fixed;
        return cs;
    }
    const fs::path path = tune_dir(config, lang, task) / "chosen_c.json";
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("no tuning output at " + path.string() +
                              " and no --c-fixed given; run tune first");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string(), 0, std::string("invalid JSON: ") + e.what());
    }
    for (const auto& [name, c] : j.items()) cs[parse_scheme(name)] = c.get<double>();
    return cs;
}

} // namespace

void cmd_train(const RunConfig& config) {
    if (!config.train_dir) throw ValidationError("train needs --train-dir");
    const Corpus corpus = load_corpus_for(config, *config.train_dir);
    if (!corpus.labeled()) throw ValidationError("training needs a labeled corpus");
    const std::string lang = resolve_lang(config, corpus);
    const TuneOptions opts = tune_options(config);

    for (Task task : selected_tasks(config)) {
        const auto cs = chosen_cs_for(config, lang, task);
        const EnsembleModel model = train_ensemble(corpus, task, cs, opts);
        save_ensemble(model, cs, models_dir(config, lang, task));
    }
    write_config(config, lang);
}

PredictOutcome cmd_predict(const RunConfig& config) {
    if (!config.test_dir) throw ValidationError("predict needs --test-dir");

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(*config.test_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".xml") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ValidationError("no author files found in " + config.test_dir->string());

    PredictOutcome outcome;
    std::vector<AuthorRecord> authors;
    std::set<std::string> ids;
    std::string lang;
    for (const auto& f : files) {
        try {
            AuthorRecord rec = load_author_file(f);
            if (!ids.insert(rec.author_id).second) {
                throw ValidationError(f.string() + ": duplicate author id '" + rec.author_id + "'");
            }
            if (lang.empty()) {
                lang = rec.lang;
            } else if (rec.lang != lang) {
                throw ValidationError(f.string() + ": language '" + rec.lang +
                                      "' differs from corpus language '" + lang + "'");
            }
            authors.push_back(std::move(rec));
        } catch (const std::exception& e) {
            if (config.strict) throw;
            std::cerr << "warning: skipping author file: " << e.what() << "\n";
            ++outcome.skipped;
        }
    }
    if (authors.empty()) throw ValidationError("no readable author files in " + config.test_dir->string());
    if (config.lang && *config.lang != lang) {
        throw ValidationError("--lang is '" + *config.lang + "' but the corpus language is '" +
                              lang + "'");
    }

    const auto tasks = selected_tasks(config);
    std::map<Task, EnsembleModel> models;
    for (Task task : tasks) models[task] = load_ensemble(models_dir(config, lang, task));

    const fs::path out_dir = predictions_dir(config, lang);
    fs::create_directories(out_dir);
    for (const auto& author : authors) {
        std::optional<std::string> gender, variety;
        for (Task task : tasks) {
            const EnsembleModel& model = models.at(task);
            const FusedPrediction pred = predict(model, author);
            (task == Task::gender ? gender : variety) = predicted_label(model, pred);
        }
        write_prediction_file(out_dir / (author.author_id + ".xml"), author.author_id, lang,
                              gender, variety);
        ++outcome.written;
    }
    write_config(config, lang);
    return outcome;
}

namespace {

struct LangReport {
    std::string lang;
    std::size_t authors = 0;
    std::map<std::string, double> accuracy;                        // gender/variety/joint/average
    std::map<std::string, std::map<std::string, double>> baselines; // name -> task -> accuracy
};

nlohmann::json confusion_json(const ConfusionMatrix& cm) {
    nlohmann::json j;
    j["labels"] = cm.labels;
    j["counts"] = cm.counts;
    return j;
}

std::string render_confusion(const ConfusionMatrix& cm) {
    std::string out = "true \\ predicted";
    for (const auto& label : cm.labels) out += "\t" + label;
    out += "\n";
    for (std::size_t r = 0; r < cm.labels.size(); ++r) {
        out += cm.labels[r];
        for (std::size_t c = 0; c < cm.labels.size(); ++c) {
            out += "\t" + std::to_string(cm.counts[r][c]);
        }
        out += "\n";
    }
    return out;
}

LangReport read_lang_report(const fs::path& path) {
    std::ifstream in(path);
    nlohmann::json j;
    in >> j;
    LangReport report;
    report.lang = j.at("lang");
    report.authors = j.at("authors");
    for (const auto& [k, v] : j.at("accuracy").items()) report.accuracy[k] = v.get<double>();
    if (j.contains("baselines")) {
        for (const auto& [name, accs] : j.at("baselines").items()) {
            for (const auto& [task, acc] : accs.items()) {
                if (acc.is_number()) report.baselines[name][task] = acc.get<double>();
            }
        }
    }
    return report;
}

// Tables 2/3 layout: one row per system, one column per language, plus a
// cross-language average of the cells present.
std::string render_task_summary(const std::vector<LangReport>& reports, const std::string& task) {
    std::string out = "system";
    for (const auto& r : reports) out += "\t" + r.lang;
    out += "\taverage\n";
    auto row = [&reports, &out](const std::string& name, auto getter) {
        out += name;
        double sum = 0;
        std::size_t count = 0;
        for (const auto& r : reports) {
            const std::optional<double> v = getter(r);
            out += "\t" + (v ? fmt_acc(*v) : std::string("-"));
            if (v) {
                sum += *v;
                ++count;
            }
        }
        out += "\t" + (count ? fmt_acc(sum / static_cast<double>(count)) : std::string("-")) + "\n";
    };
    row("ensemble", [&task](const LangReport& r) -> std::optional<double> {
        auto it = r.accuracy.find(task);
        if (it == r.accuracy.end()) return std::nullopt;
        return it->second;
    });
    for (const std::string name : {"bow", "stat"}) {
        bool any = false;
        for (const auto& r : reports) any = any || r.baselines.count(name);
        if (!any) continue;
        row(name + "-baseline", [&name, &task](const LangReport& r) -> std::optional<double> {
            auto b = r.baselines.find(name);
            if (b == r.baselines.end()) return std::nullopt;
            auto it = b->second.find(task);
            if (it == b->second.end()) return std::nullopt;
            return it->second;
        });
    }
    return out;
}

// Table 1 layout plus both readings of the "average average".
std::string render_overview(const std::vector<LangReport>& reports) {
    const std::vector<std::string> cols = {"gender", "variety", "joint", "average"};
    std::string out = "lang";
    for (const auto& c : cols) out += "\t" + c;
    out += "\n";
    std::map<std::string, std::pair<double, std::size_t>> col_sums;
    double row_avg_sum = 0;
    std::size_t row_avg_count = 0;
    for (const auto& r : reports) {
        out += r.lang;
        for (const auto& c : cols) {
            auto it = r.accuracy.find(c);
            out += "\t" + (it != r.accuracy.end() ? fmt_acc(it->second) : std::string("-"));
            if (it != r.accuracy.end()) {
                col_sums[c].first += it->second;
                col_sums[c].second++;
            }
        }
        auto avg = r.accuracy.find("average");
        if (avg != r.accuracy.end()) {
            row_avg_sum += avg->second;
            ++row_avg_count;
        }
        out += "\n";
    }
    out += "mean";
    for (const auto& c : cols) {
        const auto& [sum, count] = col_sums[c];
        out += "\t" + (count ? fmt_acc(sum / static_cast<double>(count)) : std::string("-"));
    }
    out += "\n\n";
    if (row_avg_count) {
        out += "mean of per-language averages: " +
               fmt_acc(row_avg_sum / static_cast<double>(row_avg_count)) + "\n";
    }
    double col_mean_sum = 0;
    std::size_t col_mean_count = 0;
    for (const auto& c : cols) {
        if (c == "average") continue;
        const auto& [sum, count] = col_sums[c];
        if (count) {
            col_mean_sum += sum / static_cast<double>(count);
            ++col_mean_count;
        }
    }
    if (col_mean_count) {
        out += "mean of per-task means: " +
               fmt_acc(col_mean_sum / static_cast<double>(col_mean_count)) + "\n";
    }
    return out;
}

} // namespace

void cmd_evaluate(const RunConfig& config) {
    if (!config.test_dir) throw ValidationError("evaluate needs --test-dir");
    if (!config.truth && !fs::is_regular_file(*config.test_dir / "truth.txt")) {
        throw ValidationError("evaluate needs --truth (or a truth.txt beside the test corpus)");
    }
    const Corpus truth = load_corpus_for(config, *config.test_dir);
    if (!truth.labeled()) throw ValidationError("evaluation truth does not label every author");
    const std::string lang = resolve_lang(config, truth);
    const PredictionSet preds = load_predictions(predictions_dir(config, lang));

    // Which tasks do the prediction files cover?
    bool has_gender = true, has_variety = true;
    for (const auto& [id, entry] : preds.by_author) {
        has_gender = has_gender && entry.gender.has_value();
        has_variety = has_variety && entry.variety.has_value();
    }
    if (!has_gender && !has_variety) {
        throw ValidationError("prediction files carry neither gender nor variety attributes");
    }

    nlohmann::json j;
    j["lang"] = lang;
    j["authors"] = truth.authors.size();
    nlohmann::json acc = nlohmann::json::object();
    std::string text = "language: " + lang + "\nauthors: " + std::to_string(truth.authors.size()) +
                       "\n\n";
    if (has_gender && has_variety) {
        const ScoreReport report = score(truth, preds);
        acc["gender"] = report.gender_acc;
        acc["variety"] = report.variety_acc;
        acc["joint"] = report.joint_acc;
        acc["average"] = report.average_acc;
        text += "gender\tvariety\tjoint\taverage\n" + fmt_acc(report.gender_acc) + "\t" +
                fmt_acc(report.variety_acc) + "\t" + fmt_acc(report.joint_acc) + "\t" +
                fmt_acc(report.average_acc) + "\n\n";
        text += "gender confusion:\n" + render_confusion(report.gender_confusion) + "\n";
        text += "variety confusion:\n" + render_confusion(report.variety_confusion);
        j["confusion"]["gender"] = confusion_json(report.gender_confusion);
        j["confusion"]["variety"] = confusion_json(report.variety_confusion);
    } else {
        const Task task = has_gender ? Task::gender : Task::variety;
        const double a = task_accuracy(truth, preds, task);
        acc[to_string(task)] = a;
        text += to_string(task) + " accuracy: " + fmt_acc(a) + "\n";
    }
    j["accuracy"] = std::move(acc);

    if (config.baselines) {
        if (!config.train_dir) throw ValidationError("--baselines needs --train-dir");
        const Corpus train = load_corpus_for(config, *config.train_dir);
        if (!train.labeled()) throw ValidationError("baselines need a labeled training corpus");
        if (train.lang != lang) {
            throw ValidationError("baseline training corpus language '" + train.lang +
                                  "' does not match evaluation language '" + lang + "'");
        }
        std::vector<std::string> test_ids;
        for (const auto& a : truth.authors) test_ids.push_back(a.author_id);

        nlohmann::json baselines = nlohmann::json::object();
        const PredictionSet stat = stat_baseline(train, test_ids);
        nlohmann::json stat_json = nlohmann::json::object();
        nlohmann::json bow_json = nlohmann::json::object();
        text += "\nbaselines:\n";
        for (Task task : selected_tasks(config)) {
            const double stat_acc = task_accuracy(truth, stat, task);
            stat_json[to_string(task)] = stat_acc;
            const BowBaselineResult bow = bow_baseline(train, truth, task);
            if (!bow.truncated) {
                std::cerr << "warning: BOW baseline vocabulary has only "
                          << bow.vocabulary_size << " terms (cap 1000)\n";
            }
            const double bow_acc = task_accuracy(truth, bow.preds, task);
            bow_json[to_string(task)] = bow_acc;
            bow_json["vocabulary"] = bow.vocabulary_size;
            text += "  " + to_string(task) + ": stat " + fmt_acc(stat_acc) + ", bow " +
                    fmt_acc(bow_acc) + "\n";
        }
        baselines["stat"] = std::move(stat_json);
        baselines["bow"] = std::move(bow_json);
        j["baselines"] = std::move(baselines);
    }

    const fs::path json_path = report_path(config, lang);
    write_file(json_path, j.dump(2) + "\n");
    write_file(config.out / "reports" / (lang + ".txt"), text);

    // Cross-language summaries over every per-language report present.
    std::vector<LangReport> reports;
    for (const auto& entry : fs::directory_iterator(config.out / "reports")) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            reports.push_back(read_lang_report(entry.path()));
        }
    }
    std::sort(reports.begin(), reports.end(),
              [](const LangReport& a, const LangReport& b) { return a.lang < b.lang; });
    write_file(config.out / "summary_gender.txt", render_task_summary(reports, "gender"));
    write_file(config.out / "summary_variety.txt", render_task_summary(reports, "variety"));
    write_file(config.out / "summary_overview.txt", render_overview(reports));
    write_config(config, lang);
}

} // namespace authprof
