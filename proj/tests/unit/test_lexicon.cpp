#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "batforge/error.hpp"
#include "batforge/lexicon.hpp"

using namespace batforge;

namespace {

Vocabulary vocab_from(const std::string& text) {
  std::istringstream in(text);
  return parse_embedding_table(in);
}

std::string parse_error(const std::string& text) {
  try {
    vocab_from(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

// O(V^2) reference: all similarities, sorted by (sim desc, id asc).
WordSetTable brute_force_synonyms(const Vocabulary& v, std::size_t k, double threshold) {
  WordSetTable out(v.size());
  for (std::size_t w = 0; w < v.size(); ++w) {
    const auto a = v.vector(static_cast<WordId>(w));
    double na = 0;
    for (double x : a) na += x * x;
    std::vector<std::pair<double, std::size_t>> cands;
    for (std::size_t o = 0; o < v.size(); ++o) {
      if (o == w) continue;
      const auto b = v.vector(static_cast<WordId>(o));
      double nb = 0, d = 0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        nb += b[i] * b[i];
        d += a[i] * b[i];
      }
      if (na == 0 || nb == 0) continue;
      const double s = std::clamp(d / std::sqrt(na * nb), -1.0, 1.0);
      if (s >= threshold) cands.emplace_back(-s, o);
    }
    std::sort(cands.begin(), cands.end());
    out[w].push_back(static_cast<WordId>(w));
    for (std::size_t i = 0; i < std::min(k, cands.size()); ++i) out[w].push_back(static_cast<WordId>(cands[i].second));
    std::sort(out[w].begin(), out[w].end());
  }
  return out;
}

}  // namespace

TEST_CASE("embedding table parse") {
  const auto v = vocab_from("cat 1 0\ndog 0.5 0.5\nrun 0 1\n");
  CHECK(v.size() == 3);
  CHECK(v.dim() == 2);
  CHECK(v.find("dog") == 1);
  CHECK(v.unk_id() == 3);
  CHECK(v.id_or_unk("zebra") == 3);
  CHECK(v.vector(2)[1] == 1.0);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v.find(v.word(static_cast<WordId>(i))) == static_cast<WordId>(i));
}

TEST_CASE("embedding table errors") {
  CHECK(parse_error("") == "empty vocabulary");
  CHECK(parse_error("cat 1.0 x\n").find("line 1") != std::string::npos);
  CHECK(parse_error("cat 1 2\ndog 1 2 3\n").find("line 2") != std::string::npos);
  CHECK(parse_error("cat 1 2\ncat 1 2\n").find("duplicate") != std::string::npos);
  CHECK(parse_error("cat 1 nan\n").find("non-finite") != std::string::npos);
  CHECK(parse_error("cat 1\n").find("line 1") != std::string::npos);
}

TEST_CASE("embedding table round trip is exact") {
  std::mt19937_64 g(3);
  std::normal_distribution<double> n;
  std::vector<std::string> words;
  std::vector<double> vecs;
  for (int i = 0; i < 20; ++i) {
    words.push_back("w" + std::to_string(i));
    for (int j = 0; j < 5; ++j) vecs.push_back(n(g) * 1e-3 + (j == 0 ? 1e10 : 0.0));
  }
  const Vocabulary v(words, vecs, 5);
  std::ostringstream out;
  write_embedding_table(out, v);
  CHECK(vocab_from(out.str()) == v);
}

TEST_CASE("cosine similarity") {
  const std::vector<double> x{1, 0}, y{0, 1}, a{1, 2}, b{2, 4};
  CHECK(cosine_similarity(x, x) == doctest::Approx(1.0));
  CHECK(cosine_similarity(x, y) == doctest::Approx(0.0));
  CHECK(cosine_similarity(a, b) == doctest::Approx(1.0));
  CHECK(cosine_similarity(a, b) <= 1.0);
  const std::vector<double> zero{0, 0};
  CHECK_THROWS_WITH_AS(cosine_similarity(zero, x), "degenerate vector", Error);
  CHECK_THROWS_AS(cosine_similarity(x, std::vector<double>{1, 2, 3}), std::invalid_argument);

  std::mt19937_64 g(4);
  std::normal_distribution<double> n;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> u(6), v(6);
    for (auto& e : u) e = n(g);
    for (auto& e : v) e = n(g);
    std::vector<double> su = u;
    for (auto& e : su) e *= 3.7;
    CHECK(std::abs(cosine_similarity(u, v) - cosine_similarity(v, u)) < 1e-9);
    CHECK(std::abs(cosine_similarity(u, v) - cosine_similarity(su, v)) < 1e-9);
  }
}

TEST_CASE("synonym sets on hand-placed vectors") {
  // 5 words, k = 2, threshold 0: checked against the exhaustive reference.
  const auto v = vocab_from("a 1 0\nb 0.9 0.1\nc 0.8 0.3\nd -1 0.1\ne 0 1\n");
  const auto syn = build_synonym_sets(v, {2, 0.0});
  CHECK(syn == brute_force_synonyms(v, 2, 0.0));
  CHECK(syn[0] == std::vector<WordId>{0, 1, 2});
  // Threshold above the best neighbor leaves the word alone.
  const auto far = vocab_from("a 1 0\nb 0.5 0.866025403784\n");
  const auto strict = build_synonym_sets(far, {8, 0.8});
  CHECK(strict[0] == std::vector<WordId>{0});
  CHECK(LexiconConfig{}.sim_threshold == 0.8);
}

TEST_CASE("synonym sets equal the brute-force reference on random vocabularies") {
  std::mt19937_64 g(5);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t size = 5 + trial * 3;  // up to 62 words
    const std::size_t dim = 2 + trial % 4;
    std::vector<std::string> words;
    std::vector<double> vecs;
    for (std::size_t i = 0; i < size; ++i) {
      words.push_back("w" + std::to_string(i));
      for (std::size_t j = 0; j < dim; ++j) vecs.push_back(n(g));
    }
    // Exact duplicates exercise tie breaking.
    if (size > 6) std::copy(vecs.begin(), vecs.begin() + dim, vecs.begin() + 3 * dim);
    const Vocabulary v(words, vecs, dim);
    for (double thr : {-1.0, 0.0, 0.5, 0.8}) {
      for (std::size_t k : {1, 3, 8}) {
        const auto syn = build_synonym_sets(v, {k, thr});
        CHECK(syn == brute_force_synonyms(v, k, thr));
        for (std::size_t w = 0; w < syn.size(); ++w) {
          CHECK(std::binary_search(syn[w].begin(), syn[w].end(), static_cast<WordId>(w)));
        }
      }
    }
  }
}

TEST_CASE("lexicon config validation") {
  CHECK_THROWS_AS((LexiconConfig{0, 0.8}).validate(), ConfigError);
  CHECK_THROWS_AS((LexiconConfig{8, 1.5}).validate(), ConfigError);
  CHECK_NOTHROW((LexiconConfig{8, -1.0}).validate());
}

TEST_CASE("antonym lexicon") {
  const auto v = vocab_from("hot 1 0\ncold -1 0\nwarm 0.9 0.1\n");
  {
    std::istringstream in("hot\tcold\n");
    const auto lex = parse_antonym_lexicon(in, v);
    CHECK(lex.antonyms[0] == std::vector<WordId>{1});
    CHECK(lex.antonyms[1].empty());  // not symmetrized
    CHECK(lex.warnings == 0);
  }
  {
    std::istringstream in("hot\tfreezing\n");
    const auto lex = parse_antonym_lexicon(in, v);
    CHECK(lex.antonyms[0].empty());
    CHECK(lex.warnings == 1);
  }
  {
    std::istringstream in("lukewarm\tcold\nhot\thot,cold\n");
    const auto lex = parse_antonym_lexicon(in, v);
    CHECK(lex.warnings == 2);
    CHECK(lex.antonyms[0] == std::vector<WordId>{1});
  }
  {
    std::istringstream in("");
    const auto lex = parse_antonym_lexicon(in, v);
    for (const auto& s : lex.antonyms) CHECK(s.empty());
  }
  {
    std::istringstream in("hot cold\n");
    CHECK_THROWS_AS(parse_antonym_lexicon(in, v), ParseError);
  }
}

TEST_CASE("pos lexicon") {
  const auto v = vocab_from("run 1 0\ncat 0 1\n");
  {
    std::istringstream in("run\tVERB\n");
    const auto pos = parse_pos_lexicon(in, v);
    CHECK(pos[0] == "VERB");
    CHECK(pos[1] == kWildcardTag);
    CHECK(pos_compatible(pos[1], "NOUN"));
    CHECK_FALSE(pos_compatible(pos[0], "NOUN"));
  }
  {
    std::istringstream in("run\tVERB\nrun\tNOUN\n");
    try {
      parse_pos_lexicon(in, v);
      FAIL("expected a conflict");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("conflicting tag") != std::string::npos);
    }
  }
}

TEST_CASE("negation lexicon is usable in both directions") {
  const auto v = vocab_from("can 1 0\ncannot 0 1\nis 1 1\n");
  std::istringstream in("can\tcannot\nis\tisnt\n");
  const auto neg = parse_negation_lexicon(in, v);
  CHECK(neg[0] == std::vector<WordId>{1});
  CHECK(neg[1] == std::vector<WordId>{0});
  CHECK(neg[2].empty());
}

TEST_CASE("substitution tables treat unknown ids as empty") {
  SubstitutionTables t;
  t.synonyms = {{0}};
  t.antonyms = {{}};
  t.negations = {{}};
  t.pos = {"NOUN"};
  CHECK(t.synonyms_of(1).empty());
  CHECK(t.antonyms_of(-1).empty());
  CHECK(t.pos_of(5) == kWildcardTag);
}
