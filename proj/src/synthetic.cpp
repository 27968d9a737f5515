#include "authprof/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "authprof/errors.hpp"
#include "authprof/rng.hpp"

namespace authprof {

namespace {

void check_dist(const std::string& what, const TokenDist& dist) {
    if (dist.tokens.empty()) throw ValidationError(what + ": empty token distribution");
    double sum = 0;
    for (const auto& [token, p] : dist.tokens) {
        if (token.empty()) throw ValidationError(what + ": empty token");
        if (!(p >= 0)) throw ValidationError(what + ": negative probability for '" + token + "'");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ValidationError(what + ": probabilities sum to " + std::to_string(sum) + ", expected 1");
    }
}

const std::string& sample(const TokenDist& dist, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0;
    for (const auto& [token, p] : dist.tokens) {
        acc += p;
        if (u < acc) return token;
    }
    return dist.tokens.back().first; // u landed in the rounding tail
}

TokenDist make_dist(const std::vector<std::pair<std::string, double>>& weighted) {
    TokenDist dist;
    double total = 0;
    for (const auto& [_, w] : weighted) total += w;
    for (const auto& [token, w] : weighted) dist.tokens.emplace_back(token, w / total);
    std::sort(dist.tokens.begin(), dist.tokens.end());
    return dist;
}

} // namespace

Corpus generate_synthetic_corpus(const SyntheticSpec& spec) {
    if (spec.n_authors < 1) throw ValidationError("n_authors must be positive");
    if (spec.docs_per_author < 1) throw ValidationError("docs_per_author must be positive");
    if (spec.tokens_per_doc < 1) throw ValidationError("tokens_per_doc must be positive");
    if (!is_known_lang(spec.lang)) throw ValidationError("unknown language code: " + spec.lang);
    if (spec.variety_defs.size() < 2) throw ValidationError("need at least 2 varieties");
    if (spec.gender_defs.size() != 2) throw ValidationError("need exactly 2 genders");
    if (!(spec.variety_token_rate >= 0 && spec.variety_token_rate <= 1)) {
        throw ValidationError("variety_token_rate must be in [0, 1]");
    }
    auto sorted_names = [](const auto& defs) {
        std::vector<std::string> names;
        for (const auto& [name, dist] : defs) names.push_back(name);
        if (!std::is_sorted(names.begin(), names.end()) ||
            std::adjacent_find(names.begin(), names.end()) != names.end()) {
            throw ValidationError("definition names must be sorted and unique");
        }
        return names;
    };
    const auto variety_names = sorted_names(spec.variety_defs);
    const auto gender_names = sorted_names(spec.gender_defs);
    for (const auto& [name, dist] : spec.variety_defs) check_dist("variety '" + name + "'", dist);
    for (const auto& [name, dist] : spec.gender_defs) check_dist("gender '" + name + "'", dist);

    Corpus corpus;
    corpus.lang = spec.lang;
    corpus.gender_labels = gender_names;
    corpus.variety_labels = variety_names;

    const std::size_t nv = spec.variety_defs.size();
    int id_width = 1;
    for (int v = spec.n_authors; v >= 10; v /= 10) ++id_width;

    for (int i = 0; i < spec.n_authors; ++i) {
        const std::size_t vi = static_cast<std::size_t>(i) % nv;
        const std::size_t gi = (static_cast<std::size_t>(i) / nv) % 2;
        AuthorRecord rec;
        std::string num = std::to_string(i);
        rec.author_id = "synth-" + std::string(id_width - num.size(), '0') + num;
        rec.lang = spec.lang;
        rec.variety = variety_names[vi];
        rec.gender = gender_names[gi];

        Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(i)));
        const TokenDist& vdist = spec.variety_defs[vi].second;
        const TokenDist& gdist = spec.gender_defs[gi].second;
        for (int d = 0; d < spec.docs_per_author; ++d) {
            std::string doc;
            for (int t = 0; t < spec.tokens_per_doc; ++t) {
                if (t) doc += ' ';
                doc += rng.uniform() < spec.variety_token_rate ? sample(vdist, rng)
                                                               : sample(gdist, rng);
            }
            rec.documents.push_back(std::move(doc));
        }
        corpus.authors.push_back(std::move(rec));
    }
    std::sort(corpus.authors.begin(), corpus.authors.end(),
              [](const AuthorRecord& a, const AuthorRecord& b) { return a.author_id < b.author_id; });
    return corpus;
}

SyntheticSpec load_synthetic_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string(), 0, std::string("invalid JSON: ") + e.what());
    }
    try {
        SyntheticSpec spec;
        spec.lang = j.value("lang", "en");
        spec.n_authors = j.at("n_authors").get<int>();
        spec.docs_per_author = j.value("docs_per_author", 1);
        spec.tokens_per_doc = j.value("tokens_per_doc", 12);
        spec.variety_token_rate = j.value("variety_token_rate", 0.5);
        spec.seed = j.value("seed", std::uint64_t{0});
        auto read_defs = [](const nlohmann::json& obj) {
            std::vector<std::pair<std::string, TokenDist>> defs;
            for (const auto& [name, dist_json] : obj.items()) {
                TokenDist dist;
                for (const auto& [token, p] : dist_json.items()) {
                    dist.tokens.emplace_back(token, p.get<double>());
                }
                std::sort(dist.tokens.begin(), dist.tokens.end());
                defs.emplace_back(name, std::move(dist));
            }
            std::sort(defs.begin(), defs.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            return defs;
        };
        spec.variety_defs = read_defs(j.at("varieties"));
        spec.gender_defs = read_defs(j.at("genders"));
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path.string() + ": bad synthetic spec: " + e.what());
    }
}

void save_synthetic_spec(const SyntheticSpec& spec, const std::filesystem::path& path) {
    nlohmann::json j;
    j["lang"] = spec.lang;
    j["n_authors"] = spec.n_authors;
    j["docs_per_author"] = spec.docs_per_author;
    j["tokens_per_doc"] = spec.tokens_per_doc;
    j["variety_token_rate"] = spec.variety_token_rate;
    j["seed"] = spec.seed;
    auto write_defs = [](const std::vector<std::pair<std::string, TokenDist>>& defs) {
        nlohmann::json obj = nlohmann::json::object();
        for (const auto& [name, dist] : defs) {
            nlohmann::json d = nlohmann::json::object();
            for (const auto& [token, p] : dist.tokens) d[token] = p;
            obj[name] = std::move(d);
        }
        return obj;
    };
    j["varieties"] = write_defs(spec.variety_defs);
    j["genders"] = write_defs(spec.gender_defs);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write file: " + path.string());
    out << j.dump(2) << "\n";
}

SyntheticSpec demo_synthetic_spec(int n_authors, std::uint64_t seed) {
    const std::vector<std::pair<std::string, double>> shared = {
        {"hoje", 4}, {"dia", 4},  {"bom", 3},  {"muito", 3}, {"ver", 2},
        {"casa", 2}, {"tempo", 2}, {"gente", 2}, {"ano", 1},  {"coisa", 1},
    };
    auto with_shared = [&shared](std::vector<std::pair<std::string, double>> own) {
        // Own tokens carry ~55% of the mass, shared fillers the rest.
        double own_total = 0, shared_total = 0;
        for (const auto& [_, w] : own) own_total += w;
        for (const auto& [_, w] : shared) shared_total += w;
        std::vector<std::pair<std::string, double>> all = std::move(own);
        for (const auto& [token, w] : shared) {
            all.emplace_back(token, w / shared_total * own_total * 0.8);
        }
        return make_dist(all);
    };

    SyntheticSpec spec;
    spec.lang = "pt";
    spec.n_authors = n_authors;
    spec.docs_per_author = 8;
    spec.tokens_per_doc = 12;
    spec.variety_token_rate = 0.5;
    spec.seed = seed;
    spec.variety_defs = {
        {"brazil", with_shared({{"praia", 3}, {"carnaval", 2}, {"acai", 2}, {"samba", 2},
                                {"onibus", 2}, {"legal", 3}, {"cara", 2}, {"beleza", 2}})},
        {"portugal", with_shared({{"fado", 3}, {"bacalhau", 2}, {"azulejo", 2}, {"miudos", 2},
                                  {"autocarro", 2}, {"giro", 3}, {"pa", 2}, {"fixe", 2}})},
    };
    spec.gender_defs = {
        {"female", with_shared({{"rosa", 3}, {"lua", 2}, {"flor", 2}, {"renda", 2},
                                {"amiga", 3}, {"vestido", 2}, {"danca", 2}, {"doce", 2}})},
        {"male", with_shared({{"bola", 3}, {"jogo", 2}, {"ferro", 2}, {"campo", 2},
                              {"amigo", 3}, {"boteco", 2}, {"placar", 2}, {"motor", 2}})},
    };
    return spec;
}

} // namespace authprof
