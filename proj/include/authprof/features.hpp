#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "authprof/corpus.hpp"

namespace authprof {

// One of the eight ensemble feature schemes: character n-grams for
// n in 1..6, word n-grams for n in 1..2.
struct FeatureScheme {
    enum class Kind { character, word };
    Kind kind = Kind::character;
    int n = 1;

    bool operator==(const FeatureScheme&) const = default;
    bool operator<(const FeatureScheme& other) const {
        return kind != other.kind ? kind < other.kind : n < other.n;
    }
};

FeatureScheme make_scheme(FeatureScheme::Kind kind, int n); // validates the (kind, n) combination
const std::vector<FeatureScheme>& all_schemes();            // the eight, in char 1..6, word 1..2 order
std::string to_string(const FeatureScheme& scheme);         // e.g. "char_3", "word_1"
FeatureScheme parse_scheme(std::string_view name);

// Term -> occurrence count for one text under one scheme. Ordered map so
// iteration is lexicographic everywhere.
using TermCounts = std::map<std::string, std::uint64_t>;

struct FeatureSpace {
    FeatureScheme scheme;
    std::vector<std::string> terms; // lexicographically sorted; index = position
    std::unordered_map<std::string, std::uint32_t> index;

    std::uint32_t dimension() const { return static_cast<std::uint32_t>(terms.size()); }
};

struct SparseVector {
    std::vector<std::pair<std::uint32_t, double>> entries; // strictly increasing indices
    std::uint32_t dimension = 0;

    double norm() const;
    bool operator==(const SparseVector&) const = default;
};

// Documents joined with single newlines, in stored order.
std::string author_text(const AuthorRecord& author);

// Character mode: all contiguous n-code-point sequences of the lowercased
// text, whitespace included. Word mode: lowercase, split on Unicode
// whitespace, n-token windows joined with a single space. Short text
// yields an empty result.
TermCounts extract_ngrams(std::string_view text, const FeatureScheme& scheme);

// Vocabulary = every term seen in any training author's text, indexed in
// lexicographic order. Deterministic and independent of author order.
FeatureSpace fit_feature_space(const Corpus& corpus, const FeatureScheme& scheme);
FeatureSpace fit_feature_space(const std::vector<TermCounts>& author_counts,
                               const FeatureScheme& scheme);

// Counts of in-vocabulary terms, L2-normalized. All-OOV text gives the
// zero vector.
SparseVector vectorize(std::string_view text, const FeatureSpace& space);
SparseVector vectorize(const TermCounts& counts, const FeatureSpace& space);

} // namespace authprof
