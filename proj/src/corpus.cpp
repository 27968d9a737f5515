#include "authprof/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "authprof/errors.hpp"
#include "authprof/rng.hpp"
#include "authprof/unicode.hpp"
#include "xml_lite.hpp"

namespace authprof {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write file: " + path.string());
    out << content;
    if (!out) throw ValidationError("write failed: " + path.string());
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

std::vector<std::string> sorted_unique(std::set<std::string> values) {
    return {values.begin(), values.end()};
}

} // namespace

bool Corpus::labeled() const {
    if (authors.empty()) return false;
    for (const auto& a : authors) {
        if (!a.gender || !a.variety) return false;
    }
    return true;
}

const AuthorRecord* Corpus::find(const std::string& author_id) const {
    auto it = std::lower_bound(authors.begin(), authors.end(), author_id,
                               [](const AuthorRecord& a, const std::string& id) { return a.author_id < id; });
    if (it != authors.end() && it->author_id == author_id) return &*it;
    return nullptr;
}

std::string to_string(Task task) {
    return task == Task::gender ? "gender" : "variety";
}

const std::string& task_label(const AuthorRecord& author, Task task) {
    const auto& label = task == Task::gender ? author.gender : author.variety;
    if (!label) {
        throw ValidationError("author '" + author.author_id + "' has no " + to_string(task) + " label");
    }
    return *label;
}

const std::vector<std::string>& task_labels(const Corpus& corpus, Task task) {
    return task == Task::gender ? corpus.gender_labels : corpus.variety_labels;
}

bool is_known_lang(const std::string& lang) {
    return lang == "ar" || lang == "en" || lang == "pt" || lang == "es";
}

const std::vector<std::string>& pan_varieties(const std::string& lang) {
    static const std::vector<std::string> ar = {"egypt", "gulf", "levantine", "maghrebi"};
    static const std::vector<std::string> en = {"australia", "canada", "great britain",
                                                "ireland", "new zealand", "united states"};
    static const std::vector<std::string> pt = {"brazil", "portugal"};
    static const std::vector<std::string> es = {"argentina", "chile", "colombia", "mexico",
                                                "peru", "spain", "venezuela"};
    if (lang == "ar") return ar;
    if (lang == "en") return en;
    if (lang == "pt") return pt;
    if (lang == "es") return es;
    throw ValidationError("unknown language code: " + lang);
}

std::vector<std::string> FoldAssignment::members_of(int fold) const {
    std::vector<std::string> out;
    for (const auto& [id, f] : fold_of) {
        if (f == fold) out.push_back(id);
    }
    return out;
}

AuthorRecord load_author_file(const fs::path& path) {
    const std::string content = read_file(path);
    const xml::Element root = xml::parse_document(content, path.string());
    if (root.name != "author") {
        throw ValidationError(path.string() + ": root element is '" + root.name + "', expected 'author'");
    }
    AuthorRecord rec;
    const std::string* id = root.attr("id");
    const std::string* lang = root.attr("lang");
    if (!id || id->empty()) throw ValidationError(path.string() + ": missing or empty 'id' attribute");
    if (!lang) throw ValidationError(path.string() + ": missing 'lang' attribute");
    rec.author_id = *id;
    rec.lang = unicode::lower_utf8(*lang);
    if (!is_known_lang(rec.lang)) {
        throw ValidationError(path.string() + ": unknown language code '" + rec.lang + "'");
    }
    if (const std::string* g = root.attr("gender")) rec.gender = unicode::lower_utf8(*g);
    if (const std::string* v = root.attr("variety")) rec.variety = unicode::lower_utf8(*v);

    // Prediction-style files are attribute-only; corpus files carry documents.
    const xml::Element* docs = root.child("documents");
    if (!docs) throw ValidationError(path.string() + ": missing <documents> element");
    for (const auto& child : docs->children) {
        if (child.name != "document") {
            throw ValidationError(path.string() + ": unexpected element <" + child.name + "> inside <documents>");
        }
        rec.documents.push_back(child.text);
    }
    if (rec.documents.empty()) {
        throw ValidationError(path.string() + ": author has no documents");
    }
    return rec;
}

std::vector<TruthRow> load_truth_file(const fs::path& path) {
    const std::string content = read_file(path);
    std::size_t bad = 0;
    if (!unicode::validate(content, bad)) throw ParseError(path.string(), bad, "invalid UTF-8");

    std::vector<TruthRow> rows;
    std::set<std::string> seen;
    std::size_t line_start = 0;
    int line_no = 0;
    while (line_start < content.size()) {
        std::size_t line_end = content.find('\n', line_start);
        if (line_end == std::string::npos) line_end = content.size();
        std::string line = content.substr(line_start, line_end - line_start);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) {
            const auto first = line.find(":::");
            const auto second = first == std::string::npos ? std::string::npos : line.find(":::", first + 3);
            if (first == std::string::npos || second == std::string::npos ||
                line.find(":::", second + 3) != std::string::npos) {
                throw ParseError(path.string(), line_start,
                                 "line " + std::to_string(line_no) +
                                     ": expected author_id:::gender:::variety");
            }
            TruthRow row;
            row.author_id = line.substr(0, first);
            row.gender = unicode::lower_utf8(line.substr(first + 3, second - first - 3));
            row.variety = unicode::lower_utf8(line.substr(second + 3));
            if (row.author_id.empty() || row.gender.empty() || row.variety.empty()) {
                throw ParseError(path.string(), line_start,
                                 "line " + std::to_string(line_no) + ": empty field");
            }
            if (!seen.insert(row.author_id).second) {
                throw ValidationError(path.string() + ": duplicate author id '" + row.author_id + "'");
            }
            rows.push_back(std::move(row));
        }
        line_start = line_end + 1;
    }
    return rows;
}

Corpus load_corpus(const fs::path& root_path, const std::optional<fs::path>& truth_path) {
    if (!fs::is_directory(root_path)) {
        throw ValidationError("not a directory: " + root_path.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(root_path)) {
        if (entry.is_regular_file() && entry.path().extension() == ".xml") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        throw ValidationError("no author files found in " + root_path.string());
    }

    Corpus corpus;
    std::set<std::string> ids;
    for (const auto& f : files) {
        AuthorRecord rec = load_author_file(f);
        if (!ids.insert(rec.author_id).second) {
            throw ValidationError(f.string() + ": duplicate author id '" + rec.author_id + "'");
        }
        if (corpus.authors.empty()) {
            corpus.lang = rec.lang;
        } else if (rec.lang != corpus.lang) {
            throw ValidationError(f.string() + ": language '" + rec.lang +
                                  "' differs from corpus language '" + corpus.lang + "'");
        }
        corpus.authors.push_back(std::move(rec));
    }
    std::sort(corpus.authors.begin(), corpus.authors.end(),
              [](const AuthorRecord& a, const AuthorRecord& b) { return a.author_id < b.author_id; });

    if (truth_path) {
        const auto rows = load_truth_file(*truth_path);
        std::map<std::string, const TruthRow*> by_id;
        for (const auto& row : rows) by_id[row.author_id] = &row;

        std::vector<std::string> orphans;
        for (const auto& a : corpus.authors) {
            if (!by_id.count(a.author_id)) orphans.push_back(a.author_id);
        }
        for (const auto& row : rows) {
            if (!ids.count(row.author_id)) orphans.push_back(row.author_id);
        }
        if (!orphans.empty()) {
            std::sort(orphans.begin(), orphans.end());
            throw ValidationError("truth file does not match author files; orphan ids: " +
                                  join(orphans, ", "));
        }
        std::set<std::string> genders, varieties;
        for (auto& a : corpus.authors) {
            const TruthRow& row = *by_id.at(a.author_id);
            if (a.gender && *a.gender != row.gender) {
                throw ValidationError("author '" + a.author_id + "': file gender '" + *a.gender +
                                      "' disagrees with truth '" + row.gender + "'");
            }
            if (a.variety && *a.variety != row.variety) {
                throw ValidationError("author '" + a.author_id + "': file variety '" + *a.variety +
                                      "' disagrees with truth '" + row.variety + "'");
            }
            a.gender = row.gender;
            a.variety = row.variety;
            genders.insert(row.gender);
            varieties.insert(row.variety);
        }
        corpus.gender_labels = sorted_unique(std::move(genders));
        corpus.variety_labels = sorted_unique(std::move(varieties));
    } else {
        std::set<std::string> genders, varieties;
        for (const auto& a : corpus.authors) {
            if (a.gender) genders.insert(*a.gender);
            if (a.variety) varieties.insert(*a.variety);
        }
        corpus.gender_labels = sorted_unique(std::move(genders));
        corpus.variety_labels = sorted_unique(std::move(varieties));
    }
    return corpus;
}

void write_corpus(const Corpus& corpus, const fs::path& dir, const WriteCorpusOptions& opts) {
    fs::create_directories(dir);
    for (const auto& a : corpus.authors) {
        std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        out += "<author id=\"" + xml::escape_attr(a.author_id) + "\" lang=\"" +
               xml::escape_attr(a.lang) + "\"";
        if (opts.label_attributes && a.variety) {
            out += " variety=\"" + xml::escape_attr(*a.variety) + "\"";
        }
        if (opts.label_attributes && a.gender) {
            out += " gender=\"" + xml::escape_attr(*a.gender) + "\"";
        }
        out += ">\n\t<documents>\n";
        for (const auto& doc : a.documents) {
            out += "\t\t<document>" + xml::escape_text(doc) + "</document>\n";
        }
        out += "\t</documents>\n</author>\n";
        write_file(dir / (a.author_id + ".xml"), out);
    }
    if (opts.truth_path) {
        std::string truth;
        for (const auto& a : corpus.authors) {
            if (!a.gender || !a.variety) {
                throw ValidationError("cannot write truth file: author '" + a.author_id +
                                      "' is unlabeled");
            }
            truth += a.author_id + ":::" + *a.gender + ":::" + *a.variety + "\n";
        }
        write_file(*opts.truth_path, truth);
    }
}

FoldAssignment make_folds(const Corpus& corpus, int k, std::uint64_t seed) {
    if (k < 2) throw ValidationError("fold count must be at least 2, got " + std::to_string(k));
    if (static_cast<std::size_t>(k) > corpus.authors.size()) {
        throw ValidationError("fold count " + std::to_string(k) + " exceeds author count " +
                              std::to_string(corpus.authors.size()));
    }
    if (!corpus.labeled()) {
        throw ValidationError("stratified folds require a fully labeled corpus");
    }

    // Strata keyed by (gender, variety); keys iterate in sorted order.
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> strata;
    for (const auto& a : corpus.authors) {
        strata[{*a.gender, *a.variety}].push_back(a.author_id);
    }

    FoldAssignment folds;
    folds.k = k;
    std::uint64_t stratum_index = 0;
    for (auto& [key, ids] : strata) {
        std::sort(ids.begin(), ids.end());
        Rng rng(mix_seed(seed, stratum_index++));
        rng.shuffle(ids);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            folds.fold_of[ids[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
        }
    }
    return folds;
}

} // namespace authprof
