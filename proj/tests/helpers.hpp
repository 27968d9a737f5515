#pragma once

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "authprof/corpus.hpp"
#include "authprof/unicode.hpp"

namespace testutil {

// Temporary directory removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("authprof_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct AuthorSpec {
    std::string id;
    std::string gender;
    std::string variety;
    std::vector<std::string> docs;
};

inline authprof::Corpus make_corpus(const std::string& lang, const std::vector<AuthorSpec>& specs) {
    authprof::Corpus corpus;
    corpus.lang = lang;
    std::set<std::string> genders, varieties;
    for (const auto& spec : specs) {
        authprof::AuthorRecord rec;
        rec.author_id = spec.id;
        rec.lang = lang;
        rec.documents = spec.docs;
        if (!spec.gender.empty()) {
            rec.gender = spec.gender;
            genders.insert(spec.gender);
        }
        if (!spec.variety.empty()) {
            rec.variety = spec.variety;
            varieties.insert(spec.variety);
        }
        corpus.authors.push_back(std::move(rec));
    }
    std::sort(corpus.authors.begin(), corpus.authors.end(),
              [](const auto& a, const auto& b) { return a.author_id < b.author_id; });
    corpus.gender_labels.assign(genders.begin(), genders.end());
    corpus.variety_labels.assign(varieties.begin(), varieties.end());
    return corpus;
}

// Random text over a mix of scripts, whitespace and astral code points.
inline std::string random_unicode_string(std::mt19937_64& rng, std::size_t max_len) {
    static const std::vector<char32_t> pool = [] {
        std::vector<char32_t> cps;
        for (char32_t c = 0x20; c <= 0x7E; ++c) cps.push_back(c); // ASCII incl. punctuation
        cps.push_back(U'\t');
        cps.push_back(U'\n');
        for (char32_t c = 0xC0; c <= 0xFF; ++c) cps.push_back(c);     // Latin-1
        for (char32_t c = 0x391; c <= 0x3C9; ++c) cps.push_back(c);   // Greek
        for (char32_t c = 0x410; c <= 0x44F; ++c) cps.push_back(c);   // Cyrillic
        for (char32_t c = 0x627; c <= 0x63A; ++c) cps.push_back(c);   // Arabic
        for (char32_t c = 0x4E00; c <= 0x4E20; ++c) cps.push_back(c); // CJK
        cps.push_back(0x2028); // line separator
        cps.push_back(0x3000); // ideographic space
        cps.push_back(0x1F600); // astral: emoji
        cps.push_back(0x1D11E); // astral: musical symbol
        return cps;
    }();
    const std::size_t len = rng() % (max_len + 1);
    std::string out;
    for (std::size_t i = 0; i < len; ++i) {
        authprof::unicode::append_utf8(out, pool[rng() % pool.size()]);
    }
    return out;
}

} // namespace testutil
