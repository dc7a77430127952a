#include "reprrec/embedding.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace reprrec {

namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

// -log sigma(x), stable for large |x|
double nls(double x) {
  if (x >= 0.0) return std::log1p(std::exp(-x));
  return -x + std::log1p(std::exp(x));
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

}  // namespace

void EmbeddingConfig::validate() const {
  if (dim < 1) throw Error("embedding dim must be >= 1");
  if (window < 1) throw Error("window must be >= 1");
  if (epochs < 0) throw Error("epochs must be >= 0");
  if (workers < 1) throw Error("workers must be >= 1");
  if (loss == LossKind::NegativeSampling && negatives < 1) {
    throw Error("negative sampling needs negatives >= 1");
  }
  if (initial_lr() <= 0.0) throw Error("lr_initial must be positive");
  if (lr_final < 0.0) throw Error("lr_final must be non-negative");
  if (lr_final > initial_lr()) throw Error("lr_final must not exceed lr_initial");
}

NoiseTable::NoiseTable(const std::vector<std::int64_t>& counts, double exponent) {
  if (counts.empty()) throw Error("noise table needs a non-empty vocabulary");
  cumulative_.resize(counts.size());
  double total = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 1) throw Error("noise table counts must be positive");
    total += std::pow(static_cast<double>(counts[i]), exponent);
    cumulative_[i] = total;
  }
  for (double& c : cumulative_) c /= total;
  cumulative_.back() = 1.0;
}

int NoiseTable::sample(Rng& rng) const {
  double u = rng.next_double();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return static_cast<int>(it - cumulative_.begin());
}

int NoiseTable::sample_excluding(int target, Rng& rng) const {
  if (size() < 2) throw Error("cannot sample a negative: vocabulary has one token");
  int s;
  do {
    s = sample(rng);
  } while (s == target);
  return s;
}

double NoiseTable::probability(int index) const {
  return index == 0 ? cumulative_[0] : cumulative_[index] - cumulative_[index - 1];
}

EmbeddingModel init_model(Vocabulary vocab, const EmbeddingConfig& config) {
  config.validate();
  const int v = vocab.size();
  if (v < 2) throw Error("training vocabulary must have at least 2 tokens");

  EmbeddingModel model;
  model.dim = config.dim;
  model.config = config;
  const double bound = 0.5 / config.dim;
  Rng rng(derive_seed(config.seed, "init"));
  model.input.resize(std::size_t(v) * config.dim);
  for (double& w : model.input) w = rng.uniform(-bound, bound);
  model.output.assign(std::size_t(v) * config.dim, 0.0);
  model.internal.assign(std::size_t(v - 1) * config.dim, 0.0);
  model.vocab = std::move(vocab);
  return model;
}

std::vector<double> softmax_distribution(std::span<const double> activations) {
  if (activations.empty()) throw Error("softmax needs a non-empty input");
  double peak = *std::max_element(activations.begin(), activations.end());
  std::vector<double> probs(activations.size());
  double total = 0.0;
  for (std::size_t i = 0; i < activations.size(); ++i) {
    probs[i] = std::exp(activations[i] - peak);
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

std::vector<double> cbow_hidden(std::span<const int> context, const EmbeddingModel& model) {
  if (context.empty()) throw Error("CBOW context must be non-empty");
  std::vector<double> hidden(model.dim, 0.0);
  for (int idx : context) axpy(1.0, model.input_row(idx), hidden);
  const double inv = 1.0 / static_cast<double>(context.size());
  for (double& h : hidden) h *= inv;
  return hidden;
}

LossGrads ns_loss_and_grads(std::span<const double> hidden, int target,
                            const EmbeddingModel& model, const NoiseTable& noise,
                            int negatives, Rng& rng) {
  if (negatives < 1) throw Error("negative sampling needs negatives >= 1");
  LossGrads out;
  out.grad_hidden.assign(hidden.size(), 0.0);
  out.row_grads.reserve(static_cast<std::size_t>(negatives) + 1);

  auto accumulate = [&](int row, double label) {
    // label 1 for the target, 0 for negatives; g = sigma(h.o) - label
    auto o = model.output_row(row);
    double a = dot(hidden, o);
    out.loss += label > 0.5 ? nls(a) : nls(-a);
    double g = sigmoid(a) - label;
    axpy(g, o, out.grad_hidden);
    std::vector<double> row_grad(hidden.size());
    for (std::size_t i = 0; i < hidden.size(); ++i) row_grad[i] = g * hidden[i];
    out.row_grads.emplace_back(row, std::move(row_grad));
  };

  accumulate(target, 1.0);
  for (int k = 0; k < negatives; ++k) accumulate(noise.sample_excluding(target, rng), 0.0);
  return out;
}

LossGrads hs_loss_and_grads(std::span<const double> hidden, int target,
                            const EmbeddingModel& model, const HuffmanTree& tree) {
  LossGrads out;
  out.grad_hidden.assign(hidden.size(), 0.0);
  auto path = tree.path(target);
  auto code = tree.code(target);
  out.row_grads.reserve(path.size());
  for (std::size_t j = 0; j < path.size(); ++j) {
    auto v = model.internal_row(path[j]);
    double sign = code[j] == 0 ? 1.0 : -1.0;
    double a = dot(hidden, v);
    out.loss += nls(sign * a);
    double g = sign * (sigmoid(sign * a) - 1.0);
    axpy(g, v, out.grad_hidden);
    std::vector<double> row_grad(hidden.size());
    for (std::size_t i = 0; i < hidden.size(); ++i) row_grad[i] = g * hidden[i];
    out.row_grads.emplace_back(path[j], std::move(row_grad));
  }
  return out;
}

LossGrads exact_softmax_loss_and_grads(std::span<const double> hidden, int target,
                                       const EmbeddingModel& model) {
  const int v = model.vocab_size();
  std::vector<double> activations(v);
  for (int n = 0; n < v; ++n) activations[n] = dot(hidden, model.output_row(n));
  std::vector<double> probs = softmax_distribution(activations);

  LossGrads out;
  double peak = *std::max_element(activations.begin(), activations.end());
  double total = 0.0;
  for (double a : activations) total += std::exp(a - peak);
  out.loss = -(activations[target] - peak - std::log(total));
  out.grad_hidden.assign(hidden.size(), 0.0);
  out.row_grads.reserve(v);
  for (int n = 0; n < v; ++n) {
    double g = probs[n] - (n == target ? 1.0 : 0.0);
    axpy(g, model.output_row(n), out.grad_hidden);
    std::vector<double> row_grad(hidden.size());
    for (std::size_t i = 0; i < hidden.size(); ++i) row_grad[i] = g * hidden[i];
    out.row_grads.emplace_back(n, std::move(row_grad));
  }
  return out;
}

namespace {

LossGrads position_loss(std::span<const double> hidden, int target, const EmbeddingModel& model,
                        const NoiseTable* noise, const HuffmanTree* tree, int negatives,
                        Rng& rng) {
  switch (model.config.loss) {
    case LossKind::NegativeSampling:
      return ns_loss_and_grads(hidden, target, model, *noise, negatives, rng);
    case LossKind::HierarchicalSoftmax:
      return hs_loss_and_grads(hidden, target, model, *tree);
    case LossKind::ExactSoftmax:
      return exact_softmax_loss_and_grads(hidden, target, model);
  }
  throw Error("unknown loss kind");
}

void apply_row_grads(EmbeddingModel& model, const LossGrads& lg, double lr) {
  const bool hs = model.config.loss == LossKind::HierarchicalSoftmax;
  for (const auto& [row, grad] : lg.row_grads) {
    auto w = hs ? model.internal_row(row) : model.output_row(row);
    axpy(-lr, grad, w);
  }
}

}  // namespace

double train_step(EmbeddingModel& model, std::span<const int> sentence, int position,
                  double lr, const NoiseTable* noise, const HuffmanTree* tree, Rng& rng) {
  const int n = static_cast<int>(sentence.size());
  const int window = model.config.window;
  const int lo = std::max(0, position - window);
  const int hi = std::min(n - 1, position + window);

  std::vector<int> context;
  context.reserve(hi - lo);
  for (int j = lo; j <= hi; ++j) {
    if (j != position) context.push_back(sentence[j]);
  }
  if (context.empty()) return 0.0;

  double loss = 0.0;
  if (model.config.model == ModelKind::Cbow) {
    std::vector<double> hidden = cbow_hidden(context, model);
    LossGrads lg = position_loss(hidden, sentence[position], model, noise, tree,
                                 model.config.negatives, rng);
    apply_row_grads(model, lg, lr);
    // word2vec convention: the hidden layer is the context mean, but each
    // context row receives the full (undivided) hidden gradient
    for (int idx : context) axpy(-lr, lg.grad_hidden, model.input_row(idx));
    loss = lg.loss;
  } else {
    const int center = sentence[position];
    for (int target : context) {
      auto hidden = model.input_row(center);
      LossGrads lg = position_loss(hidden, target, model, noise, tree,
                                   model.config.negatives, rng);
      apply_row_grads(model, lg, lr);
      axpy(-lr, lg.grad_hidden, model.input_row(center));
      loss += lg.loss;
    }
  }
  return loss;
}

EmbeddingModel train(const std::vector<Sentence>& sentences, Vocabulary vocab,
                     EmbeddingConfig config) {
  config.validate();
  if (config.loss == LossKind::ExactSoftmax && vocab.size() > kExactSoftmaxMaxVocab) {
    throw Error("exact softmax is limited to vocabularies of at most " +
                std::to_string(kExactSoftmaxMaxVocab) + " tokens");
  }

  std::vector<std::vector<int>> encoded;
  encoded.reserve(sentences.size());
  std::size_t total_positions = 0;
  for (const auto& s : sentences) {
    auto e = vocab.encode(s);
    if (e.size() < 2) continue;
    total_positions += e.size();
    encoded.push_back(std::move(e));
  }
  if (encoded.empty()) throw Error("no in-vocabulary sentence of length >= 2");

  EmbeddingModel model = init_model(std::move(vocab), config);
  if (config.epochs == 0) return model;

  std::optional<NoiseTable> noise;
  std::optional<HuffmanTree> tree;
  if (config.loss == LossKind::NegativeSampling) {
    noise.emplace(model.vocab.counts(), config.noise_exponent);
  } else if (config.loss == LossKind::HierarchicalSoftmax) {
    tree.emplace(model.vocab.counts());
  }

  const double lr0 = config.initial_lr();
  const double lr1 = config.lr_final;
  const double total_ticks = static_cast<double>(total_positions) * config.epochs;
  std::atomic<std::uint64_t> tick{0};

  auto worker = [&](int worker_id) {
    Rng rng(derive_seed(config.seed, "train", static_cast<std::uint64_t>(worker_id)));
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      for (std::size_t s = worker_id; s < encoded.size(); s += config.workers) {
        const auto& sent = encoded[s];
        for (int pos = 0; pos < static_cast<int>(sent.size()); ++pos) {
          double t = static_cast<double>(tick.fetch_add(1, std::memory_order_relaxed));
          double lr = lr0 + (lr1 - lr0) * (t / total_ticks);
          train_step(model, sent, pos, lr, noise ? &*noise : nullptr,
                     tree ? &*tree : nullptr, rng);
        }
      }
    }
  };

  if (config.workers == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(config.workers);
    for (int w = 0; w < config.workers; ++w) threads.emplace_back(worker, w);
    for (auto& t : threads) t.join();
  }
  return model;
}

}  // namespace reprrec
