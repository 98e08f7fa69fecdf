#pragma once
// Sentence-pair examples, the synthetic oracle-labeled task, and TSV I/O.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "batforge/lexicon.hpp"

namespace batforge {

// nli: entail / neutral / contradict. paraphrase: not duplicate / duplicate.
enum class TaskKind { nli, paraphrase };

namespace nli_label {
inline constexpr int entail = 0;
inline constexpr int neutral = 1;
inline constexpr int contradict = 2;
}  // namespace nli_label

namespace paraphrase_label {
inline constexpr int not_duplicate = 0;
inline constexpr int duplicate = 1;
}  // namespace paraphrase_label

std::size_t num_classes(TaskKind task);
std::string_view task_name(TaskKind task);
TaskKind parse_task(std::string_view name);

enum class Side { premise, hypothesis };

struct Example {
  std::int64_t id = 0;
  std::vector<WordId> premise;
  std::vector<WordId> hypothesis;
  int label = 0;

  const std::vector<WordId>& sentence(Side side) const { return side == Side::premise ? premise : hypothesis; }
  std::vector<WordId>& sentence(Side side) { return side == Side::premise ? premise : hypothesis; }

  friend bool operator==(const Example&, const Example&) = default;
};

struct Dataset {
  TaskKind task = TaskKind::nli;
  std::vector<Example> examples;

  std::size_t num_classes() const { return batforge::num_classes(task); }
  std::size_t size() const { return examples.size(); }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct ToyTaskSpec {
  std::size_t n_clusters = 16;
  std::size_t cluster_size = 4;
  // Partner cluster of each cluster. Empty means 0<->1, 2<->3, ...
  std::vector<std::size_t> antonym_pairing;
  std::size_t n_filler = 40;
  std::size_t sentence_len = 5;
  std::size_t dim = 24;
  TaskKind task = TaskKind::nli;
  // Cosine between the centers of two antonym clusters.
  double partner_similarity = 0.3;
  // Noise scale around a cluster center; keeps same-cluster cosine >= 0.9.
  double cluster_spread = 0.2;
  // Key words inside a cluster are drawn with probability ~ 1/(j+1)^key_skew.
  double key_skew = 0.0;
  // Filler pairs that form the negation map (e.g. a modal and its negation).
  std::size_t n_negation_pairs = 2;
  // Probability that a contradict (nli) or not-duplicate (paraphrase)
  // hypothesis carries a negated modal filler: a label-correlated cue the
  // oracle ignores.
  double label_cue = 0.0;
  std::uint64_t seed = 7;

  // Throws ConfigError naming the infeasible field.
  void validate() const;
  std::vector<std::size_t> pairing() const;
};

// The labeling oracle of the toy task. A key word belongs to a synonym
// cluster; every other word is a label-irrelevant filler.
class ToyOracle {
 public:
  ToyOracle() = default;
  ToyOracle(TaskKind task, std::vector<int> cluster_of, std::vector<std::size_t> partner);

  TaskKind task() const { return task_; }
  bool is_key(WordId id) const;
  int cluster_of(WordId id) const;
  const std::vector<std::size_t>& partner() const { return partner_; }
  const std::vector<int>& clusters() const { return cluster_of_; }

  // Throws Error("oracle undefined") unless each sentence holds exactly one
  // key word.
  int label(const Example& ex) const;
  int label_for_clusters(std::size_t premise_cluster, std::size_t hypothesis_cluster) const;

  friend bool operator==(const ToyOracle&, const ToyOracle&) = default;

 private:
  TaskKind task_ = TaskKind::nli;
  std::vector<int> cluster_of_;  // -1 for fillers
  std::vector<std::size_t> partner_;
};

inline int oracle_label(const ToyOracle& oracle, const Example& ex) { return oracle.label(ex); }

struct ToyWorld {
  ToyTaskSpec spec;
  Vocabulary vocab;
  SubstitutionTables tables;
  ToyOracle oracle;
  Dataset train;
  Dataset eval;
};

ToyWorld generate_toy_dataset(const ToyTaskSpec& spec, std::size_t n_train, std::size_t n_eval);

// `label<TAB>sentence1<TAB>sentence2`, whitespace-tokenized. Ids are the
// 0-based example index. Unknown tokens become vocab.unk_id().
Dataset parse_dataset_tsv(std::istream& in, const Vocabulary& vocab, TaskKind task);
Dataset load_dataset_tsv(const std::filesystem::path& path, const Vocabulary& vocab, TaskKind task);
void write_dataset_tsv(std::ostream& out, const Dataset& data, const Vocabulary& vocab);

void write_antonym_lexicon(std::ostream& out, const SubstitutionTables& tables, const Vocabulary& vocab);
// Wildcard tags are omitted.
void write_pos_lexicon(std::ostream& out, const SubstitutionTables& tables, const Vocabulary& vocab);
void write_negation_lexicon(std::ostream& out, const SubstitutionTables& tables, const Vocabulary& vocab);

}  // namespace batforge
