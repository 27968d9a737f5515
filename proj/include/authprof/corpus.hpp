#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace authprof {

// One author's documents plus labels. The author is the classification
// unit; gender/variety are absent on unlabeled test data.
struct AuthorRecord {
    std::string author_id;
    std::string lang;
    std::vector<std::string> documents;
    std::optional<std::string> gender;
    std::optional<std::string> variety;
};

struct Corpus {
    std::string lang;
    std::vector<AuthorRecord> authors; // sorted by author_id
    std::vector<std::string> gender_labels;  // sorted, duplicate-free
    std::vector<std::string> variety_labels; // sorted, duplicate-free

    bool labeled() const;
    const AuthorRecord* find(const std::string& author_id) const;
};

enum class Task { gender, variety };

std::string to_string(Task task);
const std::string& task_label(const AuthorRecord& author, Task task); // throws if absent
const std::vector<std::string>& task_labels(const Corpus& corpus, Task task);

// The four PAN language codes and their variety label sets.
bool is_known_lang(const std::string& lang);
const std::vector<std::string>& pan_varieties(const std::string& lang);

struct FoldAssignment {
    int k = 0;
    std::map<std::string, int> fold_of; // author_id -> fold index in [0, k)

    std::vector<std::string> members_of(int fold) const;
};

// Reads one author XML file. Label attributes, when present, are
// lowercased. Throws ParseError on malformed XML / bad UTF-8 and
// ValidationError on schema violations.
AuthorRecord load_author_file(const std::filesystem::path& path);

// Reads every *.xml file under root_path (non-recursive, sorted by file
// name). When truth_path is given its rows must cover exactly the author
// ids found; labels and label sets then come from the truth file.
Corpus load_corpus(const std::filesystem::path& root_path,
                   const std::optional<std::filesystem::path>& truth_path = std::nullopt);

// Truth file rows: author_id:::gender:::variety (UTF-8, LF endings).
struct TruthRow {
    std::string author_id;
    std::string gender;
    std::string variety;
};
std::vector<TruthRow> load_truth_file(const std::filesystem::path& path);

struct WriteCorpusOptions {
    bool label_attributes = true;                          // write gender/variety attrs into author files
    std::optional<std::filesystem::path> truth_path = {};  // also write a truth file
};
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir,
                  const WriteCorpusOptions& opts = {});

// Stratified k-fold assignment: authors are grouped by (gender, variety),
// each group is shuffled by `seed` (after sorting by id) and dealt
// round-robin starting at fold 0, so fold sizes within a group differ by
// at most one and low-index folds take the remainders.
FoldAssignment make_folds(const Corpus& corpus, int k, std::uint64_t seed);

} // namespace authprof
