#include "batforge/data.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "batforge/error.hpp"
#include "batforge/kernels.hpp"
#include "batforge/rng.hpp"
#include "text_io.hpp"

namespace batforge {

std::size_t num_classes(TaskKind task) { return task == TaskKind::nli ? 3 : 2; }

std::string_view task_name(TaskKind task) { return task == TaskKind::nli ? "nli" : "paraphrase"; }

TaskKind parse_task(std::string_view name) {
  if (name == "nli") return TaskKind::nli;
  if (name == "paraphrase") return TaskKind::paraphrase;
  throw ConfigError("unknown task '" + std::string(name) + "' (expected nli or paraphrase)");
}

std::vector<std::size_t> ToyTaskSpec::pairing() const {
  if (!antonym_pairing.empty()) return antonym_pairing;
  std::vector<std::size_t> p(n_clusters);
  for (std::size_t c = 0; c < n_clusters; ++c) p[c] = c ^ 1U;
  return p;
}

void ToyTaskSpec::validate() const {
  if (n_clusters < 2) throw ConfigError("toy.n_clusters must be at least 2");
  if (task == TaskKind::nli && n_clusters < 4) {
    throw ConfigError("toy.n_clusters must be at least 4 for the nli task (neutral pairs need a third cluster)");
  }
  if (cluster_size < 1) throw ConfigError("toy.cluster_size must be at least 1");
  if (n_filler < 1) throw ConfigError("toy.n_filler must be at least 1");
  if (sentence_len < 1) throw ConfigError("toy.sentence_len must be at least 1");
  if (dim < n_clusters) throw ConfigError("toy.dim must be at least toy.n_clusters");
  if (2 * n_negation_pairs > n_filler) throw ConfigError("toy.n_negation_pairs needs 2 fillers per pair");
  if (!(partner_similarity > -0.5 && partner_similarity < 0.45)) {
    throw ConfigError("toy.partner_similarity must lie in (-0.5, 0.45) to keep clusters apart");
  }
  if (!(cluster_spread >= 0.0 && cluster_spread <= 0.3)) {
    throw ConfigError("toy.cluster_spread must lie in [0, 0.3]");
  }
  if (!(key_skew >= 0.0) || !std::isfinite(key_skew)) throw ConfigError("toy.key_skew must be >= 0");
  if (!(label_cue >= 0.0 && label_cue <= 1.0)) throw ConfigError("toy.label_cue must lie in [0, 1]");
  if (label_cue > 0.0 && (n_negation_pairs == 0 || sentence_len < 2)) {
    throw ConfigError("toy.label_cue needs toy.n_negation_pairs >= 1 and toy.sentence_len >= 2");
  }
  if (antonym_pairing.empty() && n_clusters % 2 != 0) {
    throw ConfigError("toy.n_clusters must be even for the default antonym pairing");
  }
  const auto p = pairing();
  if (p.size() != n_clusters) throw ConfigError("toy.antonym_pairing must have one entry per cluster");
  for (std::size_t c = 0; c < n_clusters; ++c) {
    if (p[c] >= n_clusters || p[c] == c || p[p[c]] != c) {
      throw ConfigError("toy.antonym_pairing must be an involution without fixed points");
    }
  }
}

ToyOracle::ToyOracle(TaskKind task, std::vector<int> cluster_of, std::vector<std::size_t> partner)
    : task_(task), cluster_of_(std::move(cluster_of)), partner_(std::move(partner)) {}

bool ToyOracle::is_key(WordId id) const { return cluster_of(id) >= 0; }

int ToyOracle::cluster_of(WordId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= cluster_of_.size()) return -1;
  return cluster_of_[static_cast<std::size_t>(id)];
}

int ToyOracle::label_for_clusters(std::size_t a, std::size_t b) const {
  if (task_ == TaskKind::paraphrase) {
    return a == b ? paraphrase_label::duplicate : paraphrase_label::not_duplicate;
  }
  if (a == b) return nli_label::entail;
  if (partner_.at(a) == b) return nli_label::contradict;
  return nli_label::neutral;
}

int ToyOracle::label(const Example& ex) const {
  auto key_cluster = [&](const std::vector<WordId>& sentence) {
    int found = -1;
    int count = 0;
    for (WordId w : sentence) {
      const int c = cluster_of(w);
      if (c >= 0) {
        found = c;
        ++count;
      }
    }
    if (count != 1) throw Error("oracle undefined: example " + std::to_string(ex.id) + " has " +
                                std::to_string(count) + " key words in one sentence");
    return static_cast<std::size_t>(found);
  };
  return label_for_clusters(key_cluster(ex.premise), key_cluster(ex.hypothesis));
}

namespace {

std::vector<double> gaussian_vector(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  for (auto& x : v) x = standard_normal(rng);
  return v;
}

void normalize(std::vector<double>& v) {
  const double n = std::sqrt(kernels::dot(v, v));
  for (auto& x : v) x /= n;
}

// Orthonormal basis of `count` directions by Gram-Schmidt on Gaussian draws.
std::vector<std::vector<double>> random_orthonormal(Rng& rng, std::size_t count, std::size_t dim) {
  std::vector<std::vector<double>> basis;
  while (basis.size() < count) {
    auto v = gaussian_vector(rng, dim);
    for (const auto& b : basis) kernels::axpy(-kernels::dot(v, b), b, v);
    const double n = std::sqrt(kernels::dot(v, v));
    if (n < 1e-6) continue;
    for (auto& x : v) x /= n;
    basis.push_back(std::move(v));
  }
  return basis;
}

constexpr double kSameClusterMin = 0.9;
constexpr double kCrossMax = 0.5;
constexpr int kMaxRejections = 10000;

}  // namespace

ToyWorld generate_toy_dataset(const ToyTaskSpec& spec, std::size_t n_train, std::size_t n_eval) {
  spec.validate();
  Rng rng = make_rng(spec.seed, "toy");
  const auto partner = spec.pairing();
  const std::size_t n_keys = spec.n_clusters * spec.cluster_size;
  const std::size_t vocab_size = n_keys + spec.n_filler;
  const std::size_t dim = spec.dim;

  // Cluster centers: each antonym pair spans its own 2D slice of an
  // orthonormal frame, at the requested cosine from each other.
  const auto frame = random_orthonormal(rng, spec.n_clusters, dim);
  std::vector<std::vector<double>> centers(spec.n_clusters);
  std::size_t next_axis = 0;
  const double rho = spec.partner_similarity;
  for (std::size_t c = 0; c < spec.n_clusters; ++c) {
    if (!centers[c].empty()) continue;
    const std::size_t p = partner[c];
    const auto& e0 = frame[next_axis++];
    const auto& e1 = frame[next_axis++];
    centers[c] = e0;
    centers[p].assign(dim, 0.0);
    kernels::axpy(rho, e0, centers[p]);
    kernels::axpy(std::sqrt(1.0 - rho * rho), e1, centers[p]);
  }

  std::vector<std::string> words;
  std::vector<std::vector<double>> vecs;
  words.reserve(vocab_size);
  std::vector<int> cluster_of(vocab_size, -1);

  auto acceptable = [&](const std::vector<double>& v, int cluster) {
    for (std::size_t i = 0; i < vecs.size(); ++i) {
      const double s = cosine_similarity(v, vecs[i]);
      if (cluster >= 0 && cluster_of[i] == cluster) {
        if (s < kSameClusterMin) return false;
      } else if (s >= kCrossMax) {
        return false;
      }
    }
    return true;
  };

  const double noise_scale = spec.cluster_spread / std::sqrt(static_cast<double>(dim));
  for (std::size_t c = 0; c < spec.n_clusters; ++c) {
    for (std::size_t j = 0; j < spec.cluster_size; ++j) {
      std::vector<double> v;
      int tries = 0;
      do {
        if (++tries > kMaxRejections) throw ConfigError("infeasible toy spec: cannot place cluster words");
        v = centers[c];
        const auto noise = gaussian_vector(rng, dim);
        kernels::axpy(noise_scale, noise, v);
        normalize(v);
      } while (!acceptable(v, static_cast<int>(c)));
      cluster_of[vecs.size()] = static_cast<int>(c);
      vecs.push_back(std::move(v));
      words.push_back("k" + std::to_string(c) + "_" + std::to_string(j));
    }
  }
  for (std::size_t f = 0; f < spec.n_filler; ++f) {
    std::vector<double> v;
    int tries = 0;
    do {
      if (++tries > kMaxRejections) throw ConfigError("infeasible toy spec: cannot place filler words (raise toy.dim)");
      v = gaussian_vector(rng, dim);
      normalize(v);
    } while (!acceptable(v, -1));
    vecs.push_back(std::move(v));
    if (f < 2 * spec.n_negation_pairs) {
      const std::size_t pair = f / 2;
      words.push_back(f % 2 == 0 ? "mod" + std::to_string(pair) : "mod" + std::to_string(pair) + "_not");
    } else {
      words.push_back("f" + std::to_string(f));
    }
  }

  std::vector<double> flat;
  flat.reserve(vocab_size * dim);
  for (const auto& v : vecs) flat.insert(flat.end(), v.begin(), v.end());

  ToyWorld world;
  world.spec = spec;
  world.vocab = Vocabulary(words, std::move(flat), dim);
  world.oracle = ToyOracle(spec.task, cluster_of, partner);

  auto& t = world.tables;
  t.synonyms.assign(vocab_size, {});
  t.antonyms.assign(vocab_size, {});
  t.negations.assign(vocab_size, {});
  t.pos.assign(vocab_size, std::string(kWildcardTag));
  static constexpr std::string_view kKeyTags[] = {"ADJ", "VERB", "NOUN"};
  std::vector<std::size_t> pair_index(spec.n_clusters);
  {
    std::size_t next = 0;
    std::vector<bool> seen(spec.n_clusters, false);
    for (std::size_t c = 0; c < spec.n_clusters; ++c) {
      if (seen[c]) continue;
      seen[c] = seen[partner[c]] = true;
      pair_index[c] = pair_index[partner[c]] = next++;
    }
  }
  auto key_id = [&](std::size_t c, std::size_t j) { return static_cast<WordId>(c * spec.cluster_size + j); };
  for (std::size_t c = 0; c < spec.n_clusters; ++c) {
    for (std::size_t j = 0; j < spec.cluster_size; ++j) {
      const auto w = static_cast<std::size_t>(key_id(c, j));
      for (std::size_t o = 0; o < spec.cluster_size; ++o) t.synonyms[w].push_back(key_id(c, o));
      for (std::size_t o = 0; o < spec.cluster_size; ++o) t.antonyms[w].push_back(key_id(partner[c], o));
      t.pos[w] = std::string(kKeyTags[pair_index[c] % 3]);
    }
  }
  for (std::size_t f = 0; f < spec.n_filler; ++f) {
    const std::size_t w = n_keys + f;
    t.synonyms[w] = {static_cast<WordId>(w)};
    if (f < 2 * spec.n_negation_pairs) {
      const std::size_t other = f % 2 == 0 ? w + 1 : w - 1;
      t.negations[w] = {static_cast<WordId>(other)};
      t.pos[w] = "AUX";
    } else if (f % 2 == 0) {
      t.pos[w] = "DET";
    }
  }

  // Key-word sampling weights inside a cluster.
  std::vector<double> cdf(spec.cluster_size);
  {
    double total = 0.0;
    for (std::size_t j = 0; j < spec.cluster_size; ++j) {
      total += 1.0 / std::pow(static_cast<double>(j + 1), spec.key_skew);
      cdf[j] = total;
    }
    for (auto& x : cdf) x /= total;
    cdf.back() = 1.0;
  }
  auto draw_key = [&](std::size_t cluster) {
    const double u = uniform01(rng);
    std::size_t j = 0;
    while (j + 1 < cdf.size() && u >= cdf[j]) ++j;
    return key_id(cluster, j);
  };
  std::size_t key_pos = 0;
  auto make_sentence = [&](WordId key) {
    std::vector<WordId> s(spec.sentence_len);
    key_pos = uniform_index(rng, spec.sentence_len);
    for (std::size_t i = 0; i < spec.sentence_len; ++i) {
      s[i] = i == key_pos ? key : static_cast<WordId>(n_keys + uniform_index(rng, spec.n_filler));
    }
    return s;
  };
  auto add_cue = [&](std::vector<WordId>& s) {
    std::size_t pos = uniform_index(rng, spec.sentence_len - 1);
    if (pos >= key_pos) ++pos;
    s[pos] = static_cast<WordId>(n_keys + 2 * uniform_index(rng, spec.n_negation_pairs) + 1);
  };
  const std::size_t classes = num_classes(spec.task);
  auto make_split = [&](std::size_t n) {
    Dataset d;
    d.task = spec.task;
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % classes);
    shuffle_range(labels.begin(), labels.end(), rng);
    d.examples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const int label = labels[i];
      const std::size_t a = uniform_index(rng, spec.n_clusters);
      std::size_t b = a;
      const bool same = spec.task == TaskKind::nli ? label == nli_label::entail : label == paraphrase_label::duplicate;
      if (same) {
        b = a;
      } else if (spec.task == TaskKind::nli && label == nli_label::contradict) {
        b = partner[a];
      } else if (spec.task == TaskKind::nli) {
        do {
          b = uniform_index(rng, spec.n_clusters);
        } while (b == a || b == partner[a]);
      } else {
        do {
          b = uniform_index(rng, spec.n_clusters);
        } while (b == a);
      }
      Example ex;
      ex.id = static_cast<std::int64_t>(i);
      ex.premise = make_sentence(draw_key(a));
      ex.hypothesis = make_sentence(draw_key(b));
      if (spec.label_cue > 0.0 && !same && (spec.task == TaskKind::paraphrase || label == nli_label::contradict) &&
          uniform01(rng) < spec.label_cue) {
        add_cue(ex.hypothesis);
      }
      ex.label = world.oracle.label(ex);
      d.examples.push_back(std::move(ex));
    }
    return d;
  };
  world.train = make_split(n_train);
  world.eval = make_split(n_eval);
  return world;
}

Dataset parse_dataset_tsv(std::istream& in, const Vocabulary& vocab, TaskKind task) {
  Dataset d;
  d.task = task;
  const auto classes = static_cast<long long>(num_classes(task));
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = detail::strip_cr(raw);
    if (detail::trim(line).empty()) continue;
    const auto cols = detail::split(line, '\t');
    if (cols.size() != 3) detail::parse_fail(line_no, "expected label<TAB>sentence1<TAB>sentence2");
    const auto label = detail::parse_int(detail::trim(cols[0]));
    if (!label) detail::parse_fail(line_no, "malformed label '" + std::string(cols[0]) + "'");
    if (*label < 0 || *label >= classes) {
      detail::parse_fail(line_no, "label " + std::to_string(*label) + " out of range for " +
                                      std::to_string(classes) + " classes");
    }
    Example ex;
    ex.id = static_cast<std::int64_t>(d.examples.size());
    ex.label = static_cast<int>(*label);
    for (const Side side : {Side::premise, Side::hypothesis}) {
      const auto tokens = detail::split_whitespace(cols[side == Side::premise ? 1 : 2]);
      if (tokens.empty()) detail::parse_fail(line_no, "empty sentence");
      auto& s = ex.sentence(side);
      s.reserve(tokens.size());
      for (const auto tok : tokens) s.push_back(vocab.id_or_unk(tok));
    }
    d.examples.push_back(std::move(ex));
  }
  return d;
}

Dataset load_dataset_tsv(const std::filesystem::path& path, const Vocabulary& vocab, TaskKind task) {
  auto in = detail::open_input(path);
  try {
    return parse_dataset_tsv(in, vocab, task);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_dataset_tsv(std::ostream& out, const Dataset& data, const Vocabulary& vocab) {
  auto write_sentence = [&](const std::vector<WordId>& s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i) out << ' ';
      out << vocab.word(s[i]);
    }
  };
  for (const auto& ex : data.examples) {
    out << ex.label << '\t';
    write_sentence(ex.premise);
    out << '\t';
    write_sentence(ex.hypothesis);
    out << '\n';
  }
}

void write_antonym_lexicon(std::ostream& out, const SubstitutionTables& tables, const Vocabulary& vocab) {
  for (std::size_t w = 0; w < tables.antonyms.size(); ++w) {
    const auto& set = tables.antonyms[w];
    if (set.empty()) continue;
    out << vocab.word(static_cast<WordId>(w)) << '\t';
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (i) out << ',';
      out << vocab.word(set[i]);
    }
    out << '\n';
  }
}

void write_pos_lexicon(std::ostream& out, const SubstitutionTables& tables, const Vocabulary& vocab) {
  for (std::size_t w = 0; w < tables.pos.size(); ++w) {
    if (tables.pos[w] == kWildcardTag) continue;
    out << vocab.word(static_cast<WordId>(w)) << '\t' << tables.pos[w] << '\n';
  }
}

void write_negation_lexicon(std::ostream& out, const SubstitutionTables& tables, const Vocabulary& vocab) {
  for (std::size_t w = 0; w < tables.negations.size(); ++w) {
    for (WordId other : tables.negations[w]) {
      if (static_cast<std::size_t>(other) > w) {
        out << vocab.word(static_cast<WordId>(w)) << '\t' << vocab.word(other) << '\n';
      }
    }
  }
}

}  // namespace batforge
