#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "authprof/corpus.hpp"

namespace authprof {

// Discrete distribution over tokens; probabilities sum to 1.
struct TokenDist {
    std::vector<std::pair<std::string, double>> tokens; // sorted by token
};

// Desk-scale corpus generator. Authors are assigned labels round-robin
// over the (variety, gender) grid: author i gets variety i % n_varieties
// and gender (i / n_varieties) % 2, so the first labels take any
// remainder. Each document token is drawn from the author's variety
// distribution with probability variety_token_rate, otherwise from the
// gender distribution.
struct SyntheticSpec {
    std::string lang = "en";
    int n_authors = 0;
    int docs_per_author = 1;
    int tokens_per_doc = 12;
    double variety_token_rate = 0.5;
    std::vector<std::pair<std::string, TokenDist>> variety_defs; // sorted by name
    std::vector<std::pair<std::string, TokenDist>> gender_defs;  // exactly 2, sorted
    std::uint64_t seed = 0;
};

Corpus generate_synthetic_corpus(const SyntheticSpec& spec);

// JSON file form of SyntheticSpec (see README for the schema).
SyntheticSpec load_synthetic_spec(const std::filesystem::path& path);
void save_synthetic_spec(const SyntheticSpec& spec, const std::filesystem::path& path);

// Built-in Portuguese-flavored demo: two varieties and two genders with
// partially overlapping vocabularies, separable but not trivially so.
SyntheticSpec demo_synthetic_spec(int n_authors, std::uint64_t seed);

} // namespace authprof
