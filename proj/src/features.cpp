#include "authprof/features.hpp"

#include <cmath>
#include <set>

#include "authprof/errors.hpp"
#include "authprof/unicode.hpp"

namespace authprof {

FeatureScheme make_scheme(FeatureScheme::Kind kind, int n) {
    const bool ok = kind == FeatureScheme::Kind::character ? (n >= 1 && n <= 6) : (n >= 1 && n <= 2);
    if (!ok) {
        throw ValidationError("invalid feature scheme: " +
                              std::string(kind == FeatureScheme::Kind::character ? "char" : "word") +
                              " n=" + std::to_string(n));
    }
    return FeatureScheme{kind, n};
}

const std::vector<FeatureScheme>& all_schemes() {
    static const std::vector<FeatureScheme> schemes = [] {
        std::vector<FeatureScheme> v;
        for (int n = 1; n <= 6; ++n) v.push_back(make_scheme(FeatureScheme::Kind::character, n));
        for (int n = 1; n <= 2; ++n) v.push_back(make_scheme(FeatureScheme::Kind::word, n));
        return v;
    }();
    return schemes;
}

std::string to_string(const FeatureScheme& scheme) {
    return (scheme.kind == FeatureScheme::Kind::character ? "char_" : "word_") +
           std::to_string(scheme.n);
}

FeatureScheme parse_scheme(std::string_view name) {
    const auto sep = name.find('_');
    if (sep != std::string_view::npos) {
        const auto kind = name.substr(0, sep);
        const auto num = name.substr(sep + 1);
        if ((kind == "char" || kind == "word") && num.size() == 1 && num[0] >= '1' && num[0] <= '9') {
            return make_scheme(kind == "char" ? FeatureScheme::Kind::character : FeatureScheme::Kind::word,
                               num[0] - '0');
        }
    }
    throw ValidationError("cannot parse feature scheme '" + std::string(name) + "'");
}

double SparseVector::norm() const {
    double sq = 0;
    for (const auto& [_, v] : entries) sq += v * v;
    return std::sqrt(sq);
}

std::string author_text(const AuthorRecord& author) {
    if (author.documents.empty()) {
        throw ValidationError("author '" + author.author_id + "' has no documents");
    }
    std::string text;
    for (std::size_t i = 0; i < author.documents.size(); ++i) {
        if (i) text += '\n';
        text += author.documents[i];
    }
    return text;
}

TermCounts extract_ngrams(std::string_view text, const FeatureScheme& scheme) {
    make_scheme(scheme.kind, scheme.n);
    const std::size_t n = static_cast<std::size_t>(scheme.n);
    TermCounts counts;

    if (scheme.kind == FeatureScheme::Kind::character) {
        // Lowercase once, then slice by code point boundaries.
        const std::string lowered = unicode::lower_utf8(text);
        std::vector<std::size_t> boundaries;
        boundaries.reserve(lowered.size() + 1);
        std::size_t pos = 0;
        char32_t cp;
        boundaries.push_back(0);
        while (unicode::decode_next(lowered, pos, cp)) boundaries.push_back(pos);
        const std::size_t n_cps = boundaries.size() - 1;
        if (n_cps < n) return counts;
        for (std::size_t i = 0; i + n <= n_cps; ++i) {
            ++counts[lowered.substr(boundaries[i], boundaries[i + n] - boundaries[i])];
        }
        return counts;
    }

    // Word mode: tokenize the lowercased text on Unicode whitespace.
    std::vector<std::string> tokens;
    std::string current;
    std::size_t pos = 0;
    char32_t cp;
    while (pos < text.size()) {
        if (!unicode::decode_next(text, pos, cp)) {
            throw std::invalid_argument("malformed UTF-8 at byte offset " + std::to_string(pos));
        }
        if (unicode::is_space(cp)) {
            if (!current.empty()) tokens.push_back(std::move(current));
            current.clear();
        } else {
            unicode::append_utf8(current, unicode::to_lower(cp));
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));

    if (tokens.size() < n) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string gram = tokens[i];
        for (std::size_t j = 1; j < n; ++j) {
            gram += ' ';
            gram += tokens[i + j];
        }
        ++counts[gram];
    }
    return counts;
}

FeatureSpace fit_feature_space(const std::vector<TermCounts>& author_counts,
                               const FeatureScheme& scheme) {
    if (author_counts.empty()) throw ValidationError("cannot fit feature space on an empty corpus");
    std::set<std::string> vocab;
    for (const auto& counts : author_counts) {
        for (const auto& [term, _] : counts) vocab.insert(term);
    }
    FeatureSpace space;
    space.scheme = scheme;
    space.terms.assign(vocab.begin(), vocab.end());
    space.index.reserve(space.terms.size());
    for (std::uint32_t i = 0; i < space.terms.size(); ++i) space.index.emplace(space.terms[i], i);
    return space;
}

FeatureSpace fit_feature_space(const Corpus& corpus, const FeatureScheme& scheme) {
    if (corpus.authors.empty()) throw ValidationError("cannot fit feature space on an empty corpus");
    std::vector<TermCounts> counts;
    counts.reserve(corpus.authors.size());
    for (const auto& a : corpus.authors) counts.push_back(extract_ngrams(author_text(a), scheme));
    return fit_feature_space(counts, scheme);
}

SparseVector vectorize(const TermCounts& counts, const FeatureSpace& space) {
    SparseVector vec;
    vec.dimension = space.dimension();
    // TermCounts iterates lexicographically and indices were assigned in
    // lexicographic order, so indices come out strictly increasing.
    for (const auto& [term, count] : counts) {
        auto it = space.index.find(term);
        if (it != space.index.end()) {
            vec.entries.emplace_back(it->second, static_cast<double>(count));
        }
    }
    const double norm = vec.norm();
    if (norm > 0) {
        for (auto& [_, v] : vec.entries) v /= norm;
    }
    return vec;
}

SparseVector vectorize(std::string_view text, const FeatureSpace& space) {
    return vectorize(extract_ngrams(text, space.scheme), space);
}

} // namespace authprof
