#include "batforge/lexicon.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>

#include "batforge/error.hpp"
#include "batforge/kernels.hpp"
#include "text_io.hpp"

namespace batforge {

Vocabulary::Vocabulary(std::vector<std::string> words, std::vector<double> vectors, std::size_t dim)
    : words_(std::move(words)), vectors_(std::move(vectors)), dim_(dim) {
  if (words_.empty()) throw ParseError("empty vocabulary");
  if (dim_ < 2) throw ParseError("embedding dimension must be at least 2");
  if (vectors_.size() != words_.size() * dim_) throw ParseError("vector buffer does not match vocabulary");
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i].empty()) throw ParseError("empty word at index " + std::to_string(i));
    if (!index_.emplace(words_[i], static_cast<WordId>(i)).second) {
      throw ParseError("duplicate word '" + words_[i] + "'");
    }
  }
  for (double x : vectors_) {
    if (!std::isfinite(x)) throw ParseError("non-finite embedding value");
  }
}

std::optional<WordId> Vocabulary::find(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

WordId Vocabulary::id_or_unk(std::string_view word) const { return find(word).value_or(unk_id()); }

std::string_view Vocabulary::word(WordId id) const {
  if (is_unknown(id)) return kUnknownWord;
  return words_[static_cast<std::size_t>(id)];
}

std::span<const double> Vocabulary::vector(WordId id) const {
  if (is_unknown(id)) throw std::out_of_range("no vector for unknown word");
  return {vectors_.data() + static_cast<std::size_t>(id) * dim_, dim_};
}

void LexiconConfig::validate() const {
  if (k < 1) throw ConfigError("lexicon.k must be at least 1");
  if (!(sim_threshold >= -1.0 && sim_threshold <= 1.0)) {
    throw ConfigError("lexicon.sim_threshold must lie in [-1, 1]");
  }
}

namespace {

std::span<const WordId> lookup(const WordSetTable& table, WordId id) {
  if (id < 0 || static_cast<std::size_t>(id) >= table.size()) return {};
  return table[static_cast<std::size_t>(id)];
}

}  // namespace

std::span<const WordId> SubstitutionTables::synonyms_of(WordId id) const { return lookup(synonyms, id); }
std::span<const WordId> SubstitutionTables::antonyms_of(WordId id) const { return lookup(antonyms, id); }
std::span<const WordId> SubstitutionTables::negations_of(WordId id) const { return lookup(negations, id); }

std::string_view SubstitutionTables::pos_of(WordId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= pos.size()) return kWildcardTag;
  return pos[static_cast<std::size_t>(id)];
}

bool pos_compatible(std::string_view a, std::string_view b) {
  return a == b || a == kWildcardTag || b == kWildcardTag;
}

Vocabulary parse_embedding_table(std::istream& in) {
  std::vector<std::string> words;
  std::vector<double> vectors;
  std::size_t dim = 0;
  std::set<std::string, std::less<>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = detail::split_whitespace(line);
    if (fields.empty()) continue;
    if (!seen.emplace(fields[0]).second) {
      detail::parse_fail(line_no, "duplicate word '" + std::string(fields[0]) + "'");
    }
    if (fields.size() < 3) detail::parse_fail(line_no, "expected a word followed by at least 2 values");
    const std::size_t this_dim = fields.size() - 1;
    if (dim == 0) {
      dim = this_dim;
    } else if (this_dim != dim) {
      detail::parse_fail(line_no, "inconsistent dimension " + std::to_string(this_dim) + " (expected " +
                                      std::to_string(dim) + ")");
    }
    for (std::size_t j = 1; j < fields.size(); ++j) {
      const auto v = detail::parse_double(fields[j]);
      if (!v) detail::parse_fail(line_no, "malformed value '" + std::string(fields[j]) + "'");
      if (!std::isfinite(*v)) detail::parse_fail(line_no, "non-finite value");
      vectors.push_back(*v);
    }
    words.emplace_back(fields[0]);
  }
  if (words.empty()) throw ParseError("empty vocabulary");
  return Vocabulary(std::move(words), std::move(vectors), dim);
}

Vocabulary load_embedding_table(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  try {
    return parse_embedding_table(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_embedding_table(std::ostream& out, const Vocabulary& vocab) {
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    out << vocab.words()[i];
    for (double x : vocab.vector(static_cast<WordId>(i))) out << ' ' << detail::format_double(x);
    out << '\n';
  }
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw std::invalid_argument("cosine_similarity: length mismatch");
  const double nu = kernels::dot(u, u);
  const double nv = kernels::dot(v, v);
  if (!(nu > 0.0) || !(nv > 0.0)) throw Error("degenerate vector");
  const double c = kernels::dot(u, v) / (std::sqrt(nu) * std::sqrt(nv));
  return std::clamp(c, -1.0, 1.0);
}

WordSetTable build_synonym_sets(const Vocabulary& vocab, const LexiconConfig& cfg) {
  cfg.validate();
  const std::size_t n = vocab.size();
  std::vector<bool> degenerate(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = vocab.vector(static_cast<WordId>(i));
    degenerate[i] = !(kernels::dot(v, v) > 0.0);
  }

  WordSetTable table(n);
  std::vector<std::pair<double, WordId>> scored;
  for (std::size_t w = 0; w < n; ++w) {
    scored.clear();
    if (!degenerate[w]) {
      const auto vw = vocab.vector(static_cast<WordId>(w));
      for (std::size_t o = 0; o < n; ++o) {
        if (o == w || degenerate[o]) continue;
        const double s = cosine_similarity(vw, vocab.vector(static_cast<WordId>(o)));
        if (s >= cfg.sim_threshold) scored.emplace_back(s, static_cast<WordId>(o));
      }
    }
    const std::size_t keep = std::min(cfg.k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(),
                      [](const auto& a, const auto& b) {
                        return a.first != b.first ? a.first > b.first : a.second < b.second;
                      });
    auto& set = table[w];
    set.reserve(keep + 1);
    set.push_back(static_cast<WordId>(w));
    for (std::size_t j = 0; j < keep; ++j) set.push_back(scored[j].second);
    std::sort(set.begin(), set.end());
  }
  return table;
}

AntonymLexicon parse_antonym_lexicon(std::istream& in, const Vocabulary& vocab) {
  AntonymLexicon result;
  result.antonyms.assign(vocab.size(), {});
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = detail::strip_cr(raw);
    if (detail::trim(line).empty()) continue;
    const auto cols = detail::split(line, '\t');
    if (cols.size() != 2) detail::parse_fail(line_no, "expected word<TAB>antonym,...");
    const auto head = detail::trim(cols[0]);
    if (head.empty() || detail::trim(cols[1]).empty()) detail::parse_fail(line_no, "empty field");
    const auto head_id = vocab.find(head);
    if (!head_id) {
      ++result.warnings;
      continue;
    }
    auto& set = result.antonyms[static_cast<std::size_t>(*head_id)];
    for (const auto item : detail::split(cols[1], ',')) {
      const auto word = detail::trim(item);
      if (word.empty()) detail::parse_fail(line_no, "empty antonym");
      const auto id = vocab.find(word);
      if (!id || *id == *head_id) {
        ++result.warnings;
        continue;
      }
      set.push_back(*id);
    }
  }
  for (auto& set : result.antonyms) {
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
  }
  return result;
}

AntonymLexicon load_antonym_lexicon(const std::filesystem::path& path, const Vocabulary& vocab) {
  auto in = detail::open_input(path);
  try {
    return parse_antonym_lexicon(in, vocab);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::vector<std::string> parse_pos_lexicon(std::istream& in, const Vocabulary& vocab) {
  std::vector<std::string> pos(vocab.size(), std::string(kWildcardTag));
  std::vector<bool> assigned(vocab.size(), false);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = detail::strip_cr(raw);
    if (detail::trim(line).empty()) continue;
    const auto cols = detail::split(line, '\t');
    if (cols.size() != 2) detail::parse_fail(line_no, "expected word<TAB>tag");
    const auto word = detail::trim(cols[0]);
    const auto tag = detail::trim(cols[1]);
    if (word.empty() || tag.empty()) detail::parse_fail(line_no, "empty field");
    const auto id = vocab.find(word);
    if (!id) continue;
    const auto i = static_cast<std::size_t>(*id);
    if (assigned[i] && pos[i] != tag) {
      detail::parse_fail(line_no, "conflicting tag for '" + std::string(word) + "': " + pos[i] + " vs " +
                                      std::string(tag));
    }
    pos[i] = std::string(tag);
    assigned[i] = true;
  }
  return pos;
}

std::vector<std::string> load_pos_lexicon(const std::filesystem::path& path, const Vocabulary& vocab) {
  auto in = detail::open_input(path);
  try {
    return parse_pos_lexicon(in, vocab);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

WordSetTable parse_negation_lexicon(std::istream& in, const Vocabulary& vocab) {
  WordSetTable table(vocab.size());
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = detail::strip_cr(raw);
    if (detail::trim(line).empty()) continue;
    const auto cols = detail::split(line, '\t');
    if (cols.size() != 2) detail::parse_fail(line_no, "expected token<TAB>negated");
    const auto a = vocab.find(detail::trim(cols[0]));
    const auto b = vocab.find(detail::trim(cols[1]));
    if (!a || !b || *a == *b) continue;
    table[static_cast<std::size_t>(*a)].push_back(*b);
    table[static_cast<std::size_t>(*b)].push_back(*a);
  }
  for (auto& set : table) {
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
  }
  return table;
}

WordSetTable load_negation_lexicon(const std::filesystem::path& path, const Vocabulary& vocab) {
  auto in = detail::open_input(path);
  try {
    return parse_negation_lexicon(in, vocab);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace batforge
