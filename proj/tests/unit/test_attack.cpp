#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "batforge/attack.hpp"
#include "batforge/data.hpp"
#include "batforge/error.hpp"
#include "batforge/model.hpp"
#include "batforge/rng.hpp"

using namespace batforge;

namespace {

class ConstantClassifier final : public Classifier {
 public:
  explicit ConstantClassifier(std::vector<double> probs) : probs_(std::move(probs)) {}
  std::size_t num_classes() const override { return probs_.size(); }
  std::vector<double> probabilities(const Example&) const override { return probs_; }

 private:
  std::vector<double> probs_;
};

class CountingClassifier final : public Classifier {
 public:
  explicit CountingClassifier(const Classifier& inner) : inner_(inner) {}
  std::size_t num_classes() const override { return inner_.num_classes(); }
  std::vector<double> probabilities(const Example& ex) const override {
    ++calls;
    return inner_.probabilities(ex);
  }
  mutable std::atomic<std::size_t> calls{0};

 private:
  const Classifier& inner_;
};

ToyWorld small_world(TaskKind task, std::uint64_t seed = 3) {
  ToyTaskSpec s;
  s.task = task;
  s.n_clusters = 8;
  s.cluster_size = 3;
  s.n_filler = 12;
  s.sentence_len = 3;
  s.dim = 16;
  s.seed = seed;
  return generate_toy_dataset(s, 300, 10);
}

// Random but sharp model so predictions vary across inputs.
ModelParams sharp_model(const ToyWorld& w, std::uint64_t seed) {
  auto p = init_model(w.vocab, 6, num_classes(w.spec.task), seed);
  for (auto& x : p.w1) x *= 4.0;
  for (auto& x : p.w2) x *= 4.0;
  return p;
}

// The example relabeled with the model's own prediction, so the attack runs.
Example as_predicted(const Classifier& model, Example ex) {
  ex.label = argmax(model.probabilities(ex));
  return ex;
}

// Every input reachable by replacing each position with a member of its
// candidate set (the original word included).
void enumerate_space(const PerturbationSpace& space, AttackKind kind, const Example& ex,
                     const std::function<void(const Example&)>& visit) {
  std::vector<Position> positions;
  for (const Side side : {Side::premise, Side::hypothesis}) {
    for (std::size_t i = 0; i < ex.sentence(side).size(); ++i) positions.push_back({side, i});
  }
  std::function<void(std::size_t, Example&)> rec = [&](std::size_t k, Example& cur) {
    if (k == positions.size()) {
      visit(cur);
      return;
    }
    const Position pos = positions[k];
    const WordId orig = ex.sentence(pos.side)[pos.index];
    rec(k + 1, cur);
    for (WordId c : space.candidates(kind, orig)) {
      cur.sentence(pos.side)[pos.index] = c;
      rec(k + 1, cur);
    }
    cur.sentence(pos.side)[pos.index] = orig;
  };
  Example cur = ex;
  rec(0, cur);
}

std::size_t space_size(const PerturbationSpace& space, AttackKind kind, const Example& ex) {
  std::size_t n = 1;
  for (const Side side : {Side::premise, Side::hypothesis}) {
    for (WordId w : ex.sentence(side)) n *= 1 + space.candidates(kind, w).size();
  }
  return n;
}

void check_valid_success(const AttackOutcome& o, const Example& ex, const PerturbationSpace& space,
                         const AttackConfig& cfg, const Classifier& model) {
  REQUIRE(o.success);
  REQUIRE(o.adversarial);
  CHECK(apply_substitutions(ex, o.substitutions) == *o.adversarial);
  for (const auto& s : o.substitutions) {
    const auto cands = space.candidates(o.kind, s.old_word);
    CHECK(std::find(cands.begin(), cands.end(), s.new_word) != cands.end());
    if (cfg.pos_constraint && o.kind != AttackKind::negation) {
      CHECK(pos_compatible(space.tables().pos_of(s.old_word), space.tables().pos_of(s.new_word)));
    }
  }
  const int pred = argmax(model.probabilities(ex));
  const int adv = argmax(model.probabilities(*o.adversarial));
  if (o.kind == AttackKind::synonym) {
    CHECK(space.sentence_similarity(ex, *o.adversarial) >= cfg.sem_threshold);
    CHECK(adv != pred);
  } else {
    CHECK(o.substitutions.size() == 1);
    CHECK(adv == pred);
  }
}

}  // namespace

TEST_CASE("names round trip") {
  for (auto k : {AttackKind::synonym, AttackKind::antonym, AttackKind::negation}) {
    CHECK(parse_attack(attack_name(k)) == k);
  }
  for (auto r : {FailureReason::none, FailureReason::ineligible, FailureReason::no_candidates,
                 FailureReason::constraints_exhausted, FailureReason::prediction_unchanged,
                 FailureReason::prediction_changed}) {
    CHECK(parse_failure(failure_name(r)) == r);
  }
  CHECK_THROWS_AS(parse_attack("typo"), ConfigError);
  CHECK_THROWS_AS(parse_failure("typo"), ParseError);
  CHECK_THROWS_AS((AttackConfig{TaskKind::nli, 0, 1.5}).validate(), ConfigError);
}

TEST_CASE("task eligibility") {
  CHECK(task_eligible(AttackKind::synonym, TaskKind::nli, nli_label::neutral));
  CHECK(task_eligible(AttackKind::antonym, TaskKind::nli, nli_label::entail));
  CHECK(task_eligible(AttackKind::antonym, TaskKind::nli, nli_label::contradict));
  CHECK_FALSE(task_eligible(AttackKind::antonym, TaskKind::nli, nli_label::neutral));
  CHECK_FALSE(task_eligible(AttackKind::negation, TaskKind::nli, nli_label::neutral));
  CHECK(task_eligible(AttackKind::antonym, TaskKind::paraphrase, paraphrase_label::duplicate));
  CHECK_FALSE(task_eligible(AttackKind::antonym, TaskKind::paraphrase, paraphrase_label::not_duplicate));
  CHECK(task_eligible(AttackKind::synonym, TaskKind::paraphrase, paraphrase_label::not_duplicate));
}

TEST_CASE("apply substitutions") {
  const Example ex{0, {1, 2}, {3}, 0};
  CHECK(apply_substitutions(ex, std::vector<Substitution>{{Side::hypothesis, 0, 3, 7}}).hypothesis ==
        std::vector<WordId>{7});
  CHECK_THROWS_AS(apply_substitutions(ex, std::vector<Substitution>{{Side::hypothesis, 1, 3, 7}}), std::out_of_range);
  CHECK_THROWS_AS(apply_substitutions(ex, std::vector<Substitution>{{Side::premise, 0, 2, 7}}),
                  std::invalid_argument);
}

TEST_CASE("candidate sets respect the PoS constraint") {
  std::istringstream emb("hot 1 0\ncold -1 0\nfreeze -1 0.1\nwarm 0.9 0.1\ncan 0 1\ncannot 0 -1\n");
  const auto v = parse_embedding_table(emb);
  SubstitutionTables t;
  t.synonyms = {{0, 3}, {1}, {2}, {0, 3}, {4}, {5}};
  t.antonyms = {{1, 2}, {0}, {}, {}, {}, {}};
  t.negations = {{}, {}, {}, {}, {5}, {4}};
  t.pos = {"ADJ", "ADJ", "VERB", "X", "AUX", "VERB"};
  const PerturbationSpace space(v, t, true);
  CHECK(space.candidates(AttackKind::antonym, 0) == std::vector<WordId>{1});
  CHECK(space.candidates(AttackKind::synonym, 0) == std::vector<WordId>{3});  // wildcard tag
  CHECK(space.candidates(AttackKind::synonym, 1).empty());
  // Negation rewrites ignore tags.
  CHECK(space.candidates(AttackKind::negation, 4) == std::vector<WordId>{5});
  CHECK(space.candidates(AttackKind::synonym, v.unk_id()).empty());
  const PerturbationSpace loose(v, t, false);
  CHECK(loose.candidates(AttackKind::antonym, 0) == std::vector<WordId>{1, 2});
  CHECK(space.has_candidates(AttackKind::negation, Example{0, {0}, {4}, 0}));
  CHECK_FALSE(space.has_candidates(AttackKind::negation, Example{0, {0}, {1}, 0}));
  CHECK(space.sentence_similarity(Example{0, {0}, {4}, 0}, Example{0, {4}, {0}, 0}) == doctest::Approx(1.0));
  CHECK(space.sentence_similarity(Example{0, {v.unk_id()}, {v.unk_id()}, 0}, Example{0, {0}, {4}, 0}) == -1.0);
}

TEST_CASE("importance ranking matches independent recomputation") {
  const auto w = small_world(TaskKind::nli);
  const auto params = sharp_model(w, 1);
  const ModelClassifier model(params);
  for (std::size_t e = 0; e < 40; ++e) {
    const Example& ex = w.train.examples[e];
    const auto ranking = word_importance_ranking(model, ex, w.vocab.unk_id());
    CHECK(ranking.queries == 1 + ex.premise.size() + ex.hypothesis.size());
    const double p0 = model.probabilities(ex)[static_cast<std::size_t>(ex.label)];
    std::vector<ImportanceEntry> expected;
    for (const Side side : {Side::premise, Side::hypothesis}) {
      for (std::size_t i = 0; i < ex.sentence(side).size(); ++i) {
        Example r = ex;
        r.sentence(side).erase(r.sentence(side).begin() + static_cast<std::ptrdiff_t>(i));
        const double p = model.probabilities(r)[static_cast<std::size_t>(ex.label)];
        expected.push_back({{side, i}, p0 - p});
      }
    }
    REQUIRE(ranking.ranked.size() == expected.size());
    for (std::size_t i = 0; i < ranking.ranked.size(); ++i) {
      if (i > 0) CHECK(ranking.ranked[i - 1].score >= ranking.ranked[i].score);
      const auto& entry = ranking.ranked[i];
      const auto it = std::find_if(expected.begin(), expected.end(),
                                   [&](const ImportanceEntry& x) { return x.position == entry.position; });
      REQUIRE(it != expected.end());
      CHECK(entry.score == it->score);
    }
  }
}

TEST_CASE("importance ranking special cases") {
  // A single content word: its removal is the only change that matters.
  class KeyDetector final : public Classifier {
   public:
    std::size_t num_classes() const override { return 2; }
    std::vector<double> probabilities(const Example& ex) const override {
      const bool key = std::count(ex.premise.begin(), ex.premise.end(), 7) > 0;
      return key ? std::vector<double>{0.1, 0.9} : std::vector<double>{0.6, 0.4};
    }
  } detector;
  const Example ex{0, {1, 7, 2}, {3, 4}, 1};
  const auto r = word_importance_ranking(detector, ex, 99);
  CHECK(r.ranked[0].position == Position{Side::premise, 1});
  CHECK(r.ranked[0].score == doctest::Approx(0.5));
  // Remaining ties keep joint order.
  CHECK(r.ranked[1].position == Position{Side::premise, 0});
  CHECK(r.ranked[2].position == Position{Side::premise, 2});
  CHECK(r.ranked[3].position == Position{Side::hypothesis, 0});
  CHECK(r.ranked[4].position == Position{Side::hypothesis, 1});

  // A one-word sentence is scored by substituting the unknown word.
  const Example single{0, {7}, {3}, 1};
  const auto s = word_importance_ranking(detector, single, 99, 0.9);
  CHECK(s.queries == 2);
  CHECK(s.ranked[0].position == Position{Side::premise, 0});

  const ConstantClassifier flat({0.5, 0.5});
  const Example dup{0, {1, 2}, {1, 2}, 0};
  const auto d = word_importance_ranking(flat, dup, 99);
  for (std::size_t i = 0; i < 4; ++i) CHECK(d.ranked[i].position == Position{i < 2 ? Side::premise : Side::hypothesis, i % 2});
}

TEST_CASE("attacks against a constant classifier") {
  const auto w = small_world(TaskKind::nli);
  const PerturbationSpace space(w.vocab, w.tables, true);
  const ConstantClassifier constant({0.2, 0.1, 0.7});
  AttackConfig cfg;
  cfg.sem_threshold = -1.0;
  std::size_t checked = 0;
  for (const auto& ex : w.train.examples) {
    if (ex.label != nli_label::contradict) continue;
    const auto syn = synonym_attack(constant, ex, cfg, space);
    CHECK_FALSE(syn.success);
    CHECK(syn.failure_reason == FailureReason::prediction_unchanged);
    const auto ant = antonym_attack(constant, ex, cfg, space);
    CHECK(ant.success);
    CHECK(ant.substitutions.size() == 1);
    check_valid_success(ant, ex, space, cfg, constant);
    ++checked;
  }
  CHECK(checked > 50);

  // Misclassified and neutral examples are ineligible.
  const Example wrong{0, w.train.examples[0].premise, w.train.examples[0].hypothesis, 0};
  CHECK(synonym_attack(constant, wrong, cfg, space).failure_reason == FailureReason::ineligible);
  const ConstantClassifier neutral({0.2, 0.7, 0.1});
  const Example n{0, wrong.premise, wrong.hypothesis, nli_label::neutral};
  CHECK(antonym_attack(neutral, n, cfg, space).failure_reason == FailureReason::ineligible);
  CHECK(synonym_attack(neutral, n, cfg, space).failure_reason != FailureReason::ineligible);

  // Fillers only: no antonyms.
  const WordId f = *w.vocab.find("f8");
  const Example fillers{0, {f, f}, {f}, nli_label::contradict};
  CHECK(antonym_attack(constant, fillers, cfg, space).failure_reason == FailureReason::no_candidates);
  CHECK(negation_attack(constant, fillers, cfg, space).failure_reason == FailureReason::no_candidates);
  const WordId mod = *w.vocab.find("mod1");
  const Example modal{0, {f, mod}, {f}, nli_label::contradict};
  CHECK(space.has_candidates(AttackKind::negation, modal));
  const auto neg = negation_attack(constant, modal, cfg, space);
  CHECK(neg.success);
  CHECK(neg.substitutions[0].new_word == *w.vocab.find("mod1_not"));
}

TEST_CASE("unreachable similarity threshold exhausts the constraints") {
  const auto w = small_world(TaskKind::nli);
  const PerturbationSpace space(w.vocab, w.tables, true);
  const ConstantClassifier constant({0.2, 0.1, 0.7});
  AttackConfig cfg;
  cfg.sem_threshold = 1.0;
  const auto& ex = *std::find_if(w.train.examples.begin(), w.train.examples.end(),
                                 [](const Example& e) { return e.label == nli_label::contradict; });
  const auto out = synonym_attack(constant, ex, cfg, space);
  CHECK(out.failure_reason == FailureReason::constraints_exhausted);
  CHECK(out.substitutions.empty());
}

TEST_CASE("query counts equal forward calls") {
  const auto w = small_world(TaskKind::nli);
  const auto params = sharp_model(w, 2);
  const ModelClassifier inner(params);
  const PerturbationSpace space(w.vocab, w.tables, true);
  AttackConfig cfg;
  for (std::size_t e = 0; e < 60; ++e) {
    for (auto kind : {AttackKind::synonym, AttackKind::antonym, AttackKind::negation}) {
      for (bool relabel : {false, true}) {
        const Example ex = relabel ? as_predicted(inner, w.train.examples[e]) : w.train.examples[e];
        CountingClassifier counted(inner);
        const auto out = run_attack(kind, counted, ex, cfg, space);
        CHECK(out.queries == counted.calls.load());
        CHECK(out.kind == kind);
        CHECK(out.example_id == ex.id);
      }
    }
  }
}

TEST_CASE("synonym attack agrees with exhaustive search") {
  std::size_t single_flip_cases = 0, successes = 0, compared = 0;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto w = small_world(TaskKind::paraphrase, 10 + seed);
    const auto params = sharp_model(w, seed);
    const ModelClassifier model(params);
    const PerturbationSpace space(w.vocab, w.tables, true);
    AttackConfig cfg;
    cfg.task = TaskKind::paraphrase;
    cfg.sem_threshold = -1.0;
    for (const auto& raw : w.train.examples) {
      const Example ex = as_predicted(model, raw);
      if (space_size(space, AttackKind::synonym, ex) > 512) continue;
      const int pred = ex.label;
      bool any_flip = false;
      std::size_t single_flips = 0;
      enumerate_space(space, AttackKind::synonym, ex, [&](const Example& x) {
        if (argmax(model.probabilities(x)) == pred) return;
        any_flip = true;
        std::size_t diff = 0;
        for (const Side side : {Side::premise, Side::hypothesis}) {
          for (std::size_t i = 0; i < x.sentence(side).size(); ++i) diff += x.sentence(side)[i] != ex.sentence(side)[i];
        }
        if (diff == 1) ++single_flips;
      });
      const auto out = synonym_attack(model, ex, cfg, space);
      ++compared;
      if (!any_flip) CHECK_FALSE(out.success);
      if (out.success) {
        ++successes;
        CHECK(any_flip);
        check_valid_success(out, ex, space, cfg, model);
        // A one-word success is a single-substitution flip, which the
        // exhaustive search must also have seen.
        if (out.substitutions.size() == 1) CHECK(single_flips > 0);
        if (out.substitutions.size() == 1) ++single_flip_cases;
      }
    }
  }
  MESSAGE("compared " << compared << ", successes " << successes << ", single " << single_flip_cases);
  CHECK(compared > 100);
  CHECK(successes > 0);
  CHECK(single_flip_cases > 0);
}

TEST_CASE("antonym attack is complete over single substitutions") {
  std::size_t successes = 0, failures = 0;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto w = small_world(TaskKind::nli, 20 + seed);
    const auto params = sharp_model(w, seed);
    const ModelClassifier model(params);
    const PerturbationSpace space(w.vocab, w.tables, true);
    for (bool reverse : {false, true}) {
      AttackConfig cfg;
      cfg.reverse_importance = reverse;
      for (const auto& raw : w.train.examples) {
        const Example ex = as_predicted(model, raw);
        if (!task_eligible(AttackKind::antonym, TaskKind::nli, ex.label)) continue;
        bool exists = false;
        for (const Side side : {Side::premise, Side::hypothesis}) {
          for (std::size_t i = 0; i < ex.sentence(side).size(); ++i) {
            for (WordId c : space.candidates(AttackKind::antonym, ex.sentence(side)[i])) {
              Example x = ex;
              x.sentence(side)[i] = c;
              exists = exists || argmax(model.probabilities(x)) == ex.label;
            }
          }
        }
        const auto out = antonym_attack(model, ex, cfg, space);
        CHECK(out.success == exists);
        if (out.success) {
          ++successes;
          check_valid_success(out, ex, space, cfg, model);
        } else {
          ++failures;
          CHECK(out.failure_reason == FailureReason::prediction_changed);
        }
      }
    }
  }
  CHECK(successes > 0);
  CHECK(failures > 0);
}

TEST_CASE("oracle check: obstinate successes flip the oracle label") {
  const auto w = small_world(TaskKind::nli, 5);
  const auto params = sharp_model(w, 7);
  const ModelClassifier model(params);
  const PerturbationSpace space(w.vocab, w.tables, true);
  AttackConfig cfg;
  cfg.oracle_check = true;
  cfg.sem_threshold = -1.0;
  // Independent oracle over word names: k<c>_<j>, partner c xor 1.
  auto cluster = [&](const std::vector<WordId>& s) {
    for (WordId id : s) {
      const auto name = w.vocab.word(id);
      if (name[0] == 'k') return std::stoi(std::string(name.substr(1, name.find('_') - 1)));
    }
    return -1;
  };
  auto label = [&](const Example& ex) {
    const int a = cluster(ex.premise), b = cluster(ex.hypothesis);
    return a == b ? 0 : ((a ^ 1) == b ? 2 : 1);
  };
  std::size_t attacks = 0, successes = 0, fickle = 0;
  for (const auto& raw : w.train.examples) {
    const Example ex = as_predicted(model, raw);
    const int truth = label(raw);
    const auto ant = antonym_attack(model, ex, cfg, space, &w.oracle);
    ++attacks;
    if (ant.success) {
      ++successes;
      CHECK(label(*ant.adversarial) != truth);
    }
    const auto syn = synonym_attack(model, ex, cfg, space, &w.oracle);
    if (syn.success) {
      ++fickle;
      CHECK(label(*syn.adversarial) == truth);
    }
    if (attacks == 500) break;
  }
  CHECK(attacks >= 300);
  CHECK(successes > 0);
  MESSAGE("obstinate successes " << successes << ", fickle " << fickle);
  CHECK_THROWS_AS(antonym_attack(model, w.train.examples[0], cfg, space), ConfigError);
}

TEST_CASE("random synonym perturbation") {
  SubstitutionTables t;
  t.synonyms = {{0, 1, 2, 3}, {0, 1, 2, 3}, {0, 1, 2, 3}, {0, 1, 2, 3}, {4}};
  t.antonyms.assign(5, {});
  t.negations.assign(5, {});
  t.pos.assign(5, "X");
  Rng rng = make_rng(1, "perturb");
  std::map<WordId, int> counts;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const auto p = random_synonym_perturb(Example{0, {2, 4}, {4}, 0}, t, rng);
    ++counts[p.example.premise[0]];
    CHECK(p.example.premise[1] == 4);
    CHECK(p.substitutions.size() == (p.example.premise[0] != 2 ? 1u : 0u));
  }
  const double sigma = std::sqrt(n * 0.25 * 0.75);
  for (WordId w = 0; w < 4; ++w) CHECK(std::abs(counts[w] - n / 4.0) < 4 * sigma);

  SubstitutionTables singles = t;
  for (std::size_t w = 0; w < 5; ++w) singles.synonyms[w] = {static_cast<WordId>(w)};
  const Example ex{0, {0, 1, 2}, {3, 4}, 1};
  const auto same = random_synonym_perturb(ex, singles, rng);
  CHECK(same.example == ex);
  CHECK(same.substitutions.empty());

  Rng a = make_rng(5, "perturb"), b = make_rng(5, "perturb");
  CHECK(random_synonym_perturb(ex, t, a).example == random_synonym_perturb(ex, t, b).example);
}

TEST_CASE("random antonym perturbation") {
  SubstitutionTables t;
  t.synonyms = {{0}, {1}, {2}, {3}};
  t.antonyms = {{1}, {0}, {}, {}};
  t.negations.assign(4, {});
  t.pos.assign(4, "X");
  Rng rng = make_rng(2, "perturb");
  CHECK_FALSE(random_antonym_perturb(Example{0, {2, 3}, {3}, 0}, t, rng));
  for (int i = 0; i < 100; ++i) {
    const auto p = random_antonym_perturb(Example{0, {2, 0}, {3}, 0}, t, rng);
    REQUIRE(p);
    CHECK(p->substitutions.size() == 1);
    CHECK(p->example.premise == std::vector<WordId>{2, 1});
  }
  int first = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const auto p = random_antonym_perturb(Example{0, {0, 2}, {1}, 0}, t, rng);
    first += p->substitutions[0].side == Side::premise;
  }
  CHECK(std::abs(first - n / 2.0) < 4 * std::sqrt(n * 0.25));
}

TEST_CASE("attack log round trip") {
  std::vector<AttackOutcome> outcomes(3);
  outcomes[0] = {7, AttackKind::synonym, true, std::nullopt,
                 {{Side::premise, 1, 4, 5}, {Side::hypothesis, 0, 9, 10}}, 31, FailureReason::none};
  outcomes[1] = {8, AttackKind::antonym, false, std::nullopt, {}, 1, FailureReason::ineligible};
  outcomes[2] = {9, AttackKind::negation, false, std::nullopt, {}, 12, FailureReason::prediction_changed};
  std::ostringstream out;
  write_attack_log(out, outcomes);
  const std::string text = out.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
  CHECK(text.find("\"failure_reason\":null") != std::string::npos);
  std::istringstream in(text);
  const auto back = read_attack_log(in);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].example_id == outcomes[i].example_id);
    CHECK(back[i].kind == outcomes[i].kind);
    CHECK(back[i].success == outcomes[i].success);
    CHECK(back[i].substitutions == outcomes[i].substitutions);
    CHECK(back[i].queries == outcomes[i].queries);
    CHECK(back[i].failure_reason == outcomes[i].failure_reason);
  }
  std::istringstream bad("{\"id\": 1}\n");
  CHECK_THROWS_AS(read_attack_log(bad), ParseError);
}
