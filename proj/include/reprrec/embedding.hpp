#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "reprrec/corpus.hpp"
#include "reprrec/rng.hpp"

namespace reprrec {

enum class ModelKind { Cbow, SkipGram };
enum class LossKind { NegativeSampling, HierarchicalSoftmax, ExactSoftmax };

struct EmbeddingConfig {
  ModelKind model = ModelKind::Cbow;
  LossKind loss = LossKind::NegativeSampling;
  int dim = 100;
  int window = 10;  // sentences are attribute bags, so the window spans them
  int epochs = 5;
  int negatives = 5;
  std::optional<double> lr_initial;  // defaults: 0.05 CBOW, 0.025 Skip-gram
  double lr_final = 1e-4;
  double noise_exponent = 0.75;
  std::uint64_t seed = 1;
  int workers = 1;

  double initial_lr() const {
    if (lr_initial) return *lr_initial;
    return model == ModelKind::Cbow ? 0.05 : 0.025;
  }
  void validate() const;  // throws Error on bad field combinations
};

// exact softmax materializes all V output activations; keep it to test sizes
inline constexpr int kExactSoftmaxMaxVocab = 10000;

// cumulative distribution over vocabulary indices proportional to count^exponent
class NoiseTable {
 public:
  NoiseTable(const std::vector<std::int64_t>& counts, double exponent);

  int sample(Rng& rng) const;
  int sample_excluding(int target, Rng& rng) const;  // redraws on collision
  double probability(int index) const;
  int size() const { return static_cast<int>(cumulative_.size()); }

 private:
  std::vector<double> cumulative_;
};

// Binary Huffman code over vocabulary counts: V leaves, V-1 internal nodes.
// Equal-weight merges prefer the node containing the lowest vocabulary index,
// so trees are deterministic.
class HuffmanTree {
 public:
  explicit HuffmanTree(const std::vector<std::int64_t>& counts);

  // root-to-leaf internal node ids and branch bits; equal lengths
  std::span<const std::int32_t> path(int token) const;
  std::span<const std::uint8_t> code(int token) const;
  int internal_count() const { return internal_count_; }
  int leaf_count() const { return static_cast<int>(offsets_.size()) - 1; }
  std::int64_t total_code_length() const;  // sum over tokens of count * code length

 private:
  std::vector<std::int64_t> counts_;
  std::vector<std::size_t> offsets_;  // per-token slice into the flat arrays
  std::vector<std::int32_t> paths_;
  std::vector<std::uint8_t> codes_;
  int internal_count_ = 0;
};

struct EmbeddingModel {
  Vocabulary vocab;
  EmbeddingConfig config;
  int dim = 0;
  std::vector<double> input;     // V x R projection weights, row-major
  std::vector<double> output;    // V x R output weights (NS / exact softmax)
  std::vector<double> internal;  // (V-1) x R Huffman internal node vectors

  int vocab_size() const { return vocab.size(); }
  std::span<double> input_row(int i) { return {input.data() + std::size_t(i) * dim, std::size_t(dim)}; }
  std::span<const double> input_row(int i) const { return {input.data() + std::size_t(i) * dim, std::size_t(dim)}; }
  std::span<double> output_row(int i) { return {output.data() + std::size_t(i) * dim, std::size_t(dim)}; }
  std::span<const double> output_row(int i) const { return {output.data() + std::size_t(i) * dim, std::size_t(dim)}; }
  std::span<double> internal_row(int i) { return {internal.data() + std::size_t(i) * dim, std::size_t(dim)}; }
  std::span<const double> internal_row(int i) const { return {internal.data() + std::size_t(i) * dim, std::size_t(dim)}; }
};

// Input weights uniform in [-0.5/R, +0.5/R] under the config seed; output and
// Huffman internal vectors start at zero. Deterministic for a fixed seed.
EmbeddingModel init_model(Vocabulary vocab, const EmbeddingConfig& config);

// softmax with max-subtraction; output sums to 1 for any finite input
std::vector<double> softmax_distribution(std::span<const double> activations);

// arithmetic mean of the context tokens' input vectors
std::vector<double> cbow_hidden(std::span<const int> context, const EmbeddingModel& model);

struct LossGrads {
  double loss = 0.0;
  std::vector<double> grad_hidden;
  // touched rows of the output matrix (NS, exact) or internal matrix (HS),
  // listed in update order; duplicate indices accumulate
  std::vector<std::pair<int, std::vector<double>>> row_grads;
};

// loss = -log sigma(h.o_t) - sum_k log sigma(-h.o_nk), negatives drawn from
// the noise table excluding the target
LossGrads ns_loss_and_grads(std::span<const double> hidden, int target,
                            const EmbeddingModel& model, const NoiseTable& noise,
                            int negatives, Rng& rng);

// loss = -sum_j log sigma(s_j h.v_pj) over the target's root-to-leaf path,
// sign +1 on code bit 0 and -1 on code bit 1
LossGrads hs_loss_and_grads(std::span<const double> hidden, int target,
                            const EmbeddingModel& model, const HuffmanTree& tree);

// loss = -log softmax(h.Oᵀ)[target]; touches every output row
LossGrads exact_softmax_loss_and_grads(std::span<const double> hidden, int target,
                                       const EmbeddingModel& model);

// One optimizer step at a single target position: CBOW averages the window
// context to predict the target, Skip-gram predicts each context token from
// the center. Returns the summed loss for the position.
double train_step(EmbeddingModel& model, std::span<const int> sentence, int position,
                  double lr, const NoiseTable* noise, const HuffmanTree* tree, Rng& rng);

// Full training over the corpus: the learning rate decays linearly from
// lr_initial to lr_final over epochs * total position count. With workers > 1
// updates are hogwild-style and unsynchronized; determinism holds for
// workers == 1.
EmbeddingModel train(const std::vector<Sentence>& sentences, Vocabulary vocab,
                     EmbeddingConfig config);

}  // namespace reprrec
