#pragma once
// Word embeddings, PoS tags and the substitution tables that define which
// words may replace which: synonym sets from embedding nearest neighbors,
// antonym and negation sets from lexicon files.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace batforge {

using WordId = std::int32_t;

inline constexpr std::string_view kUnknownWord = "<unk>";
inline constexpr std::string_view kWildcardTag = "X";

class Vocabulary {
 public:
  Vocabulary() = default;
  // Throws ParseError on duplicate words, non-finite entries, dim < 2 or a
  // vector buffer whose size is not words.size() * dim.
  Vocabulary(std::vector<std::string> words, std::vector<double> vectors, std::size_t dim);

  std::size_t size() const { return words_.size(); }
  std::size_t dim() const { return dim_; }

  // Out-of-vocabulary tokens map to this id. It is one past the last real
  // word; it has no vector of its own, no synonyms and no antonyms.
  WordId unk_id() const { return static_cast<WordId>(words_.size()); }
  bool is_unknown(WordId id) const { return id < 0 || static_cast<std::size_t>(id) >= size(); }

  std::optional<WordId> find(std::string_view word) const;
  WordId id_or_unk(std::string_view word) const;
  std::string_view word(WordId id) const;
  std::span<const double> vector(WordId id) const;

  const std::vector<std::string>& words() const { return words_; }
  std::span<const double> data() const { return vectors_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.dim_ == b.dim_ && a.words_ == b.words_ && a.vectors_ == b.vectors_;
  }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId> index_;
  std::vector<double> vectors_;
  std::size_t dim_ = 0;
};

struct LexiconConfig {
  std::size_t k = 8;
  double sim_threshold = 0.8;

  void validate() const;
};

// word id -> sorted ids
using WordSetTable = std::vector<std::vector<WordId>>;

struct SubstitutionTables {
  WordSetTable synonyms;  // contains the word itself
  WordSetTable antonyms;
  WordSetTable negations;  // add/remove-negation rewrites, both directions
  std::vector<std::string> pos;

  std::size_t size() const { return synonyms.size(); }

  // Unknown ids have empty sets and the wildcard tag.
  std::span<const WordId> synonyms_of(WordId id) const;
  std::span<const WordId> antonyms_of(WordId id) const;
  std::span<const WordId> negations_of(WordId id) const;
  std::string_view pos_of(WordId id) const;

  friend bool operator==(const SubstitutionTables&, const SubstitutionTables&) = default;
};

// Tags match when equal or when either side is the wildcard.
bool pos_compatible(std::string_view a, std::string_view b);

Vocabulary parse_embedding_table(std::istream& in);
Vocabulary load_embedding_table(const std::filesystem::path& path);
// Round-trips exactly through parse_embedding_table.
void write_embedding_table(std::ostream& out, const Vocabulary& vocab);

// dot(u,v) / (|u| |v|) clamped to [-1, 1]. Throws Error("degenerate vector")
// when either norm is zero and std::invalid_argument on a length mismatch.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

// synonyms[w] = {w} plus the top-k other words with similarity >= threshold,
// ranked by similarity with ties going to the lower id. Zero vectors have no
// neighbors.
WordSetTable build_synonym_sets(const Vocabulary& vocab, const LexiconConfig& cfg);

struct AntonymLexicon {
  WordSetTable antonyms;
  std::size_t warnings = 0;  // unknown head words and dropped antonyms
};

AntonymLexicon parse_antonym_lexicon(std::istream& in, const Vocabulary& vocab);
AntonymLexicon load_antonym_lexicon(const std::filesystem::path& path, const Vocabulary& vocab);

std::vector<std::string> parse_pos_lexicon(std::istream& in, const Vocabulary& vocab);
std::vector<std::string> load_pos_lexicon(const std::filesystem::path& path, const Vocabulary& vocab);

// Lines `token<TAB>negated`. Each pair is usable in both directions. Pairs
// with an out-of-vocabulary side are skipped.
WordSetTable parse_negation_lexicon(std::istream& in, const Vocabulary& vocab);
WordSetTable load_negation_lexicon(const std::filesystem::path& path, const Vocabulary& vocab);

}  // namespace batforge
