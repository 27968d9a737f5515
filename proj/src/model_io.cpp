#include "authprof/model_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "authprof/errors.hpp"
#include "authprof/unicode.hpp"
#include "xml_lite.hpp"

namespace authprof {

namespace fs = std::filesystem;

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

namespace {

std::string escape(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string unescape(const std::string& path, std::size_t offset, std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] != '\\') {
            out.push_back(raw[i]);
            continue;
        }
        if (i + 1 >= raw.size()) throw ParseError(path, offset + i, "dangling escape");
        switch (raw[++i]) {
            case '\\': out.push_back('\\'); break;
            case 'n': out.push_back('\n'); break;
            case 'r': out.push_back('\r'); break;
            case 't': out.push_back('\t'); break;
            default: throw ParseError(path, offset + i, "unknown escape");
        }
    }
    return out;
}

double parse_double(const std::string& path, std::size_t offset, const std::string& token) {
    try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ParseError(path, offset, "bad number '" + token + "'");
    }
}

// Line reader that tracks byte offsets for error messages.
class LineReader {
public:
    LineReader(const fs::path& path) : path_(path.string()) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ValidationError("cannot open file: " + path_);
        std::ostringstream buf;
        buf << in.rdbuf();
        content_ = buf.str();
        std::size_t bad = 0;
        if (!unicode::validate(content_, bad)) throw ParseError(path_, bad, "invalid UTF-8");
    }

    bool next(std::string& line) {
        if (pos_ >= content_.size()) return false;
        line_offset_ = pos_;
        std::size_t end = content_.find('\n', pos_);
        if (end == std::string::npos) end = content_.size();
        line = content_.substr(pos_, end - pos_);
        pos_ = end + 1;
        return true;
    }

    std::string expect_line(const std::string& what) {
        std::string line;
        if (!next(line)) throw ParseError(path_, pos_, "unexpected end of file, expected " + what);
        return line;
    }

    std::size_t line_offset() const { return line_offset_; }
    const std::string& path() const { return path_; }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(path_, line_offset_, msg);
    }

private:
    std::string path_;
    std::string content_;
    std::size_t pos_ = 0;
    std::size_t line_offset_ = 0;
};

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write file: " + path.string());
    out << content;
    if (!out) throw ValidationError("write failed: " + path.string());
}

constexpr const char* kSpaceMagic = "authprof-space 1";
constexpr const char* kModelMagic = "authprof-linmodel 1";

std::string scheme_line(const FeatureScheme& scheme) {
    return std::string("scheme ") +
           (scheme.kind == FeatureScheme::Kind::character ? "char" : "word") + " " +
           std::to_string(scheme.n);
}

FeatureScheme parse_scheme_line(LineReader& reader, const std::string& line) {
    std::istringstream ss(line);
    std::string tag, kind;
    int n = 0;
    if (!(ss >> tag >> kind >> n) || tag != "scheme" || (kind != "char" && kind != "word")) {
        reader.fail("bad scheme line '" + line + "'");
    }
    try {
        return make_scheme(kind == "char" ? FeatureScheme::Kind::character : FeatureScheme::Kind::word,
                           n);
    } catch (const ValidationError& e) {
        reader.fail(e.what());
    }
}

} // namespace

void save_feature_space(const FeatureSpace& space, const fs::path& path) {
    std::string out = std::string(kSpaceMagic) + "\n" + scheme_line(space.scheme) + "\n";
    for (const auto& term : space.terms) {
        out += escape(term);
        out += '\n';
    }
    write_file(path, out);
}

FeatureSpace load_feature_space(const fs::path& path) {
    LineReader reader(path);
    if (reader.expect_line("header") != kSpaceMagic) reader.fail("bad magic");
    FeatureSpace space;
    space.scheme = parse_scheme_line(reader, reader.expect_line("scheme"));
    std::string line;
    while (reader.next(line)) {
        space.terms.push_back(unescape(reader.path(), reader.line_offset(), line));
    }
    if (!std::is_sorted(space.terms.begin(), space.terms.end())) {
        reader.fail("terms are not sorted");
    }
    space.index.reserve(space.terms.size());
    for (std::uint32_t i = 0; i < space.terms.size(); ++i) {
        if (!space.index.emplace(space.terms[i], i).second) reader.fail("duplicate term");
    }
    return space;
}

void save_model(const CalibratedLinearModel& model, const FeatureScheme& scheme,
                const fs::path& path) {
    std::string out = std::string(kModelMagic) + "\n" + scheme_line(scheme) + "\n";
    out += "dimension " + std::to_string(model.dimension) + "\n";
    out += "c " + format_double(model.C) + "\n";
    out += "labels";
    for (const auto& label : model.labels) {
        out += '\t';
        out += escape(label);
    }
    out += '\n';
    for (std::size_t li = 0; li < model.labels.size(); ++li) {
        out += "model\t" + escape(model.labels[li]) + "\n";
        out += "bias\t" + format_double(model.models[li].bias) + "\n";
        out += "platt\t" + format_double(model.calibrators[li].A) + "\t" +
               format_double(model.calibrators[li].B) + "\n";
        out += "weights";
        for (double w : model.models[li].weights) {
            out += '\t';
            out += format_double(w);
        }
        out += '\n';
    }
    write_file(path, out);
}

CalibratedLinearModel load_model(const fs::path& path, FeatureScheme* scheme_out) {
    LineReader reader(path);
    if (reader.expect_line("header") != kModelMagic) reader.fail("bad magic");
    const FeatureScheme scheme = parse_scheme_line(reader, reader.expect_line("scheme"));
    if (scheme_out) *scheme_out = scheme;

    CalibratedLinearModel model;
    {
        const auto fields = split_tabs(reader.expect_line("dimension"));
        std::istringstream ss(fields[0]);
        std::string tag;
        if (!(ss >> tag >> model.dimension) || tag != "dimension") reader.fail("bad dimension line");
    }
    {
        const auto fields = split_tabs(reader.expect_line("c"));
        std::istringstream ss(fields[0]);
        std::string tag, value;
        if (!(ss >> tag >> value) || tag != "c") reader.fail("bad c line");
        model.C = parse_double(reader.path(), reader.line_offset(), value);
    }
    {
        const auto fields = split_tabs(reader.expect_line("labels"));
        if (fields.empty() || fields[0] != "labels" || fields.size() < 3) {
            reader.fail("bad labels line");
        }
        for (std::size_t i = 1; i < fields.size(); ++i) {
            model.labels.push_back(unescape(reader.path(), reader.line_offset(), fields[i]));
        }
    }
    for (std::size_t li = 0; li < model.labels.size(); ++li) {
        auto fields = split_tabs(reader.expect_line("model"));
        if (fields.size() != 2 || fields[0] != "model" ||
            unescape(reader.path(), reader.line_offset(), fields[1]) != model.labels[li]) {
            reader.fail("expected model block for label '" + model.labels[li] + "'");
        }
        BinaryLinearModel bin;
        bin.C = model.C;
        fields = split_tabs(reader.expect_line("bias"));
        if (fields.size() != 2 || fields[0] != "bias") reader.fail("bad bias line");
        bin.bias = parse_double(reader.path(), reader.line_offset(), fields[1]);

        PlattCalibrator cal;
        fields = split_tabs(reader.expect_line("platt"));
        if (fields.size() != 3 || fields[0] != "platt") reader.fail("bad platt line");
        cal.A = parse_double(reader.path(), reader.line_offset(), fields[1]);
        cal.B = parse_double(reader.path(), reader.line_offset(), fields[2]);

        fields = split_tabs(reader.expect_line("weights"));
        if (fields.empty() || fields[0] != "weights" || fields.size() - 1 != model.dimension) {
            reader.fail("bad weights line");
        }
        bin.weights.reserve(model.dimension);
        for (std::size_t i = 1; i < fields.size(); ++i) {
            bin.weights.push_back(parse_double(reader.path(), reader.line_offset(), fields[i]));
        }
        model.models.push_back(std::move(bin));
        model.calibrators.push_back(cal);
    }
    std::string line;
    if (reader.next(line)) reader.fail("trailing content");
    return model;
}

void save_ensemble(const EnsembleModel& model, const std::map<FeatureScheme, double>& tuned_Cs,
                   const fs::path& dir) {
    fs::create_directories(dir);
    nlohmann::json manifest;
    manifest["format"] = "authprof-ensemble";
    manifest["version"] = 1;
    manifest["task"] = to_string(model.task);
    manifest["labels"] = model.labels;
    nlohmann::json members = nlohmann::json::array();
    for (const auto& member : model.members) {
        const std::string name = to_string(member.scheme);
        save_feature_space(member.space, dir / (name + ".space"));
        save_model(member.model, member.scheme, dir / (name + ".model"));
        nlohmann::json entry;
        entry["scheme"] = name;
        entry["c"] = tuned_Cs.at(member.scheme);
        entry["space"] = name + ".space";
        entry["model"] = name + ".model";
        members.push_back(std::move(entry));
    }
    manifest["members"] = std::move(members);
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

EnsembleModel load_ensemble(const fs::path& dir) {
    const fs::path manifest_path = dir / "manifest.json";
    std::ifstream in(manifest_path);
    if (!in) throw ValidationError("cannot open file: " + manifest_path.string());
    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(manifest_path.string(), 0, std::string("invalid JSON: ") + e.what());
    }
    try {
        if (manifest.at("format") != "authprof-ensemble" || manifest.at("version") != 1) {
            throw ValidationError(manifest_path.string() + ": unsupported container format");
        }
        EnsembleModel model;
        const std::string task = manifest.at("task");
        if (task == "gender") model.task = Task::gender;
        else if (task == "variety") model.task = Task::variety;
        else throw ValidationError(manifest_path.string() + ": unknown task '" + task + "'");
        model.labels = manifest.at("labels").get<std::vector<std::string>>();

        for (const auto& entry : manifest.at("members")) {
            EnsembleMember member;
            member.scheme = parse_scheme(entry.at("scheme").get<std::string>());
            member.space = load_feature_space(dir / entry.at("space").get<std::string>());
            FeatureScheme model_scheme;
            member.model = load_model(dir / entry.at("model").get<std::string>(), &model_scheme);
            if (!(model_scheme == member.scheme) || !(member.space.scheme == member.scheme)) {
                throw ValidationError(manifest_path.string() + ": member scheme mismatch for " +
                                      to_string(member.scheme));
            }
            if (member.model.dimension != member.space.dimension()) {
                throw ValidationError(manifest_path.string() + ": model/space dimension mismatch");
            }
            if (member.model.labels != model.labels) {
                throw ValidationError(manifest_path.string() + ": member label order mismatch");
            }
            model.members.push_back(std::move(member));
        }
        if (model.members.size() != all_schemes().size()) {
            throw ValidationError(manifest_path.string() + ": expected " +
                                  std::to_string(all_schemes().size()) + " members, found " +
                                  std::to_string(model.members.size()));
        }
        for (std::size_t i = 0; i < model.members.size(); ++i) {
            if (!(model.members[i].scheme == all_schemes()[i])) {
                throw ValidationError(manifest_path.string() + ": members out of scheme order");
            }
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(manifest_path.string() + ": bad manifest: " + e.what());
    }
}

void save_tuning_report(const TuningReport& report, const fs::path& path) {
    std::string out = "scheme\tC";
    for (int f = 0; f < report.folds; ++f) out += "\tfold" + std::to_string(f) + "_acc";
    out += "\tmean_acc\n";
    char buf[32];
    auto acc = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.6f", v);
        return std::string(buf);
    };
    for (const auto& member : report.members) {
        for (const auto& point : member.grid) {
            std::snprintf(buf, sizeof(buf), "%g", point.C);
            out += to_string(member.scheme) + "\t" + buf;
            for (double a : point.fold_accuracies) out += "\t" + acc(a);
            out += "\t" + acc(point.mean_accuracy) + "\n";
        }
    }
    write_file(path, out);
}

void write_prediction_file(const fs::path& path, const std::string& author_id,
                           const std::string& lang, const std::optional<std::string>& gender,
                           const std::optional<std::string>& variety) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<author id=\"" + xml::escape_attr(author_id) + "\" lang=\"" + xml::escape_attr(lang) + "\"";
    if (variety) out += " variety=\"" + xml::escape_attr(*variety) + "\"";
    if (gender) out += " gender=\"" + xml::escape_attr(*gender) + "\"";
    out += "/>\n";
    write_file(path, out);
}

PredictionSet load_predictions(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw ValidationError("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".xml") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ValidationError("no prediction files found in " + dir.string());

    PredictionSet preds;
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        if (!in) throw ValidationError("cannot open file: " + f.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        const xml::Element root = xml::parse_document(buf.str(), f.string());
        if (root.name != "author") {
            throw ValidationError(f.string() + ": root element is '" + root.name +
                                  "', expected 'author'");
        }
        const std::string* id = root.attr("id");
        const std::string* lang = root.attr("lang");
        if (!id || id->empty()) throw ValidationError(f.string() + ": missing 'id' attribute");
        if (!lang) throw ValidationError(f.string() + ": missing 'lang' attribute");
        if (preds.by_author.count(*id)) {
            throw ValidationError(f.string() + ": duplicate author id '" + *id + "'");
        }
        if (preds.lang.empty()) {
            preds.lang = *lang;
        } else if (preds.lang != *lang) {
            throw ValidationError(f.string() + ": language '" + *lang +
                                  "' differs from '" + preds.lang + "'");
        }
        PredictionSet::Entry entry;
        if (const std::string* g = root.attr("gender")) entry.gender = *g;
        if (const std::string* v = root.attr("variety")) entry.variety = *v;
        preds.by_author.emplace(*id, std::move(entry));
    }
    return preds;
}

} // namespace authprof
