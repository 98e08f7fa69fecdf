#pragma once
// Sentence-pair classifier: mean-pooled word embeddings u, v, the feature
// [u; v; |u-v|; u*v], one tanh hidden layer (the representation used for
// distances) and a softmax output layer. Gradients are derived by hand.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "batforge/data.hpp"
#include "batforge/lexicon.hpp"
#include "batforge/losses.hpp"

namespace batforge {

struct ModelShape {
  std::size_t vocab_rows = 0;  // vocabulary size + 1 for <unk>
  std::size_t dim = 0;
  std::size_t hidden = 0;
  std::size_t classes = 0;

  std::size_t feature_size() const { return 4 * dim; }
  friend bool operator==(const ModelShape&, const ModelShape&) = default;
};

struct ModelParams {
  ModelShape shape;
  bool train_embeddings = true;
  std::vector<double> embedding;  // vocab_rows x dim, last row is <unk>
  std::vector<double> w1;         // hidden x feature_size
  std::vector<double> b1;         // hidden
  std::vector<double> w2;         // hidden x classes
  std::vector<double> b2;         // classes

  static ModelParams zeros(const ModelShape& shape);

  std::array<std::span<double>, 5> buffers();
  std::array<std::span<const double>, 5> buffers() const;
  std::size_t parameter_count() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Hidden and output weights ~ U(-a, a), a = sqrt(6 / (fan_in + fan_out));
// biases zero; embeddings copied from the vocabulary, <unk> row zero.
ModelParams init_model(const Vocabulary& vocab, std::size_t hidden_size, std::size_t classes,
                       std::uint64_t seed);

// Throws Error("shape mismatch: ...") when params were built for another
// vocabulary size, embedding dimension or class count.
void check_compatible(const ModelParams& params, const Vocabulary& vocab, std::size_t classes);

struct ForwardOutput {
  std::vector<double> representation;
  std::vector<double> logits;
  std::vector<double> probs;

  int predicted() const;
};

// Throws Error on an empty sentence, std::out_of_range on a bad token id.
ForwardOutput forward(const ModelParams& params, const Example& ex);

// Anything that maps an example to class probabilities. Implementations must
// be safe to call concurrently.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual std::size_t num_classes() const = 0;
  virtual std::vector<double> probabilities(const Example& ex) const = 0;
};

int argmax(std::span<const double> values);

class ModelClassifier final : public Classifier {
 public:
  explicit ModelClassifier(const ModelParams& params) : params_(&params) {}
  std::size_t num_classes() const override { return params_->shape.classes; }
  std::vector<double> probabilities(const Example& ex) const override { return forward(*params_, ex).probs; }
  const ModelParams& params() const { return *params_; }

 private:
  const ModelParams* params_;
};

enum class LossKind { cross_entropy, bat_pair, bat_triplet };

struct LossSpec {
  LossKind kind = LossKind::cross_entropy;
  double alpha = 1.0;
  double beta = 1.2;
  double lambda = 1.0;
  double margin = 1.0;
};

// One training example with its optional perturbed variants. An absent
// variant is masked.
struct TrainingItem {
  Example original;
  std::optional<Example> fickle;
  std::optional<Example> obstinate;
};

struct GradientResult {
  double loss = 0.0;
  BatchTerms terms;
  ModelParams grad;
};

// Mean batch loss and its exact gradient. Per-example contributions are
// accumulated in batch order. Throws Error naming the example id when the
// loss is not finite.
GradientResult compute_gradients(const ModelParams& params, std::span<const TrainingItem> batch,
                                 const LossSpec& spec);

// Forward-only version of the same loss.
double evaluate_loss(const ModelParams& params, std::span<const TrainingItem> batch, const LossSpec& spec);

// Binary format: magic "BATFCKPT", u32 version, shape table, then every
// buffer as little-endian IEEE-754 doubles and a trailing FNV-1a checksum.
void write_checkpoint(std::ostream& out, const ModelParams& params);
ModelParams read_checkpoint(std::istream& in);
void save_checkpoint(const ModelParams& params, const std::filesystem::path& path);
ModelParams load_checkpoint(const std::filesystem::path& path);

}  // namespace batforge
