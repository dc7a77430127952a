#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "reprrec/corpus.hpp"
#include "reprrec/embedding.hpp"
#include "reprrec/embedding_io.hpp"
#include "reprrec/error.hpp"
#include "reprrec/rng.hpp"
#include "reprrec/vectorspace.hpp"

using namespace reprrec;

namespace {

// v tokens with strictly decreasing counts, so vocabulary index i is "t:w<i>"
Vocabulary make_vocab(int v) {
  Sentence s;
  for (int i = 0; i < v; ++i) {
    for (int rep = 0; rep < v - i; ++rep) s.push_back(tag_token("w" + std::to_string(i)));
  }
  return Vocabulary::build({s}, 1);
}

EmbeddingConfig small_config(int dim) {
  EmbeddingConfig cfg;
  cfg.dim = dim;
  cfg.window = 10;
  cfg.negatives = 3;
  cfg.seed = 11;
  return cfg;
}

void randomize(std::vector<double>& values, Rng& rng, double bound) {
  for (double& v : values) v = rng.uniform(-bound, bound);
}

// row gradients with duplicate indices folded together
std::map<int, std::vector<double>> fold_rows(const LossGrads& lg, int dim) {
  std::map<int, std::vector<double>> folded;
  for (const auto& [row, grad] : lg.row_grads) {
    auto& acc = folded.try_emplace(row, std::vector<double>(dim, 0.0)).first->second;
    for (int d = 0; d < dim; ++d) acc[d] += grad[d];
  }
  return folded;
}

void check_close(double analytic, double numeric) {
  double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  CHECK(std::abs(analytic - numeric) / denom < 1e-4);
}

// central finite differences at step 1e-5 against the analytic gradients,
// for both the hidden vector and the touched weight rows
template <typename LossFn, typename Matrix>
void gradcheck(const EmbeddingModel& model, const std::vector<double>& hidden, LossFn&& loss_of,
               const LossGrads& lg, Matrix matrix) {
  const double step = 1e-5;
  std::vector<double> h = hidden;
  for (std::size_t d = 0; d < h.size(); ++d) {
    double keep = h[d];
    h[d] = keep + step;
    double lp = loss_of(model, h);
    h[d] = keep - step;
    double lm = loss_of(model, h);
    h[d] = keep;
    check_close(lg.grad_hidden[d], (lp - lm) / (2 * step));
  }
  EmbeddingModel probe = model;
  std::vector<double>& weights = matrix == 'o' ? probe.output : probe.internal;
  for (const auto& [row, grad] : fold_rows(lg, model.dim)) {
    for (int d = 0; d < model.dim; ++d) {
      std::size_t at = std::size_t(row) * model.dim + d;
      double keep = weights[at];
      weights[at] = keep + step;
      double lp = loss_of(probe, hidden);
      weights[at] = keep - step;
      double lm = loss_of(probe, hidden);
      weights[at] = keep;
      check_close(grad[d], (lp - lm) / (2 * step));
    }
  }
}

std::set<int> changed_rows(const std::vector<double>& before, const std::vector<double>& after,
                           int dim) {
  std::set<int> rows;
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (before[i] != after[i]) rows.insert(static_cast<int>(i / dim));
  }
  return rows;
}

// minimal weighted merge cost over every possible pairing order; equals the
// optimal prefix-code cost sum(count * code length)
std::int64_t brute_min_merge_cost(std::vector<std::int64_t> weights) {
  if (weights.size() <= 1) return 0;
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    for (std::size_t j = i + 1; j < weights.size(); ++j) {
      std::vector<std::int64_t> rest;
      rest.reserve(weights.size() - 1);
      for (std::size_t t = 0; t < weights.size(); ++t) {
        if (t != i && t != j) rest.push_back(weights[t]);
      }
      rest.push_back(weights[i] + weights[j]);
      best = std::min(best, weights[i] + weights[j] + brute_min_merge_cost(std::move(rest)));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("softmax_distribution matches closed forms and never overflows") {
  auto uniform = softmax_distribution(std::vector<double>{0.0, 0.0, 0.0, 0.0});
  for (double p : uniform) CHECK(p == doctest::Approx(0.25).epsilon(1e-15));

  auto two = softmax_distribution(std::vector<double>{1.0, 0.0});
  CHECK(two[0] == doctest::Approx(std::exp(1.0) / (std::exp(1.0) + 1.0)).epsilon(1e-12));
  CHECK(two[1] == doctest::Approx(1.0 / (std::exp(1.0) + 1.0)).epsilon(1e-12));

  auto big = softmax_distribution(std::vector<double>{1000.0, 1000.0});
  CHECK(big[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(big[1] == doctest::Approx(0.5).epsilon(1e-12));

  auto spread = softmax_distribution(std::vector<double>{-1000.0, 0.0, 1000.0});
  double sum = 0.0;
  for (double p : spread) {
    CHECK(p >= 0.0);
    CHECK(std::isfinite(p));
    sum += p;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(softmax_distribution(std::vector<double>{}), Error);
}

TEST_CASE("cbow_hidden is the arithmetic mean of the context input rows") {
  EmbeddingModel model = init_model(make_vocab(4), small_config(3));
  std::vector<std::vector<double>> rows{
      {1.0, 2.0, 3.0}, {-1.0, -2.0, -3.0}, {0.5, 0.0, 1.5}, {4.0, 4.0, 4.0}};
  for (int i = 0; i < 4; ++i) {
    std::copy(rows[i].begin(), rows[i].end(), model.input_row(i).begin());
  }
  std::vector<int> one{3};
  auto h1 = cbow_hidden(one, model);
  CHECK(h1 == rows[3]);

  std::vector<int> opposite{0, 1};
  auto h2 = cbow_hidden(opposite, model);
  for (double c : h2) CHECK(c == 0.0);

  std::vector<int> three{0, 2, 3};
  auto h3 = cbow_hidden(three, model);
  for (int d = 0; d < 3; ++d) {
    CHECK(h3[d] == doctest::Approx((rows[0][d] + rows[2][d] + rows[3][d]) / 3.0).epsilon(1e-15));
  }
  CHECK_THROWS_AS(cbow_hidden(std::vector<int>{}, model), Error);
}

TEST_CASE("negative-sampling loss is (K+1) ln 2 on all-zero output rows") {
  EmbeddingModel model = init_model(make_vocab(6), small_config(4));
  NoiseTable noise(model.vocab.counts(), 0.75);
  std::vector<double> hidden{0.3, -0.2, 0.9, 0.1};
  for (int k : {1, 3, 5}) {
    Rng rng(5);
    LossGrads lg = ns_loss_and_grads(hidden, 2, model, noise, k, rng);
    CHECK(lg.loss == doctest::Approx((k + 1) * std::log(2.0)).epsilon(1e-12));
    CHECK(static_cast<int>(lg.row_grads.size()) == k + 1);
    CHECK(lg.row_grads.front().first == 2);  // target first
  }
}

TEST_CASE("negative-sampling loss vanishes when the target is certain") {
  EmbeddingModel model = init_model(make_vocab(2), small_config(2));
  NoiseTable noise(model.vocab.counts(), 0.75);
  auto o0 = model.output_row(0);
  o0[0] = 40.0;
  auto o1 = model.output_row(1);
  o1[0] = -40.0;
  std::vector<double> hidden{1.0, 0.0};
  Rng rng(5);
  LossGrads lg = ns_loss_and_grads(hidden, 0, model, noise, 1, rng);
  CHECK(lg.loss >= 0.0);
  CHECK(lg.loss < 1e-12);
  CHECK(lg.row_grads.size() == 2);
  CHECK(lg.row_grads[1].first == 1);  // only possible negative in a 2-token vocabulary
}

TEST_CASE("hierarchical-softmax loss is ln 2 on a two-token tree with zero vectors") {
  EmbeddingModel model = init_model(make_vocab(2), small_config(4));
  HuffmanTree tree(model.vocab.counts());
  std::vector<double> hidden{0.4, -0.1, 0.0, 2.0};
  LossGrads lg = hs_loss_and_grads(hidden, 0, model, tree);
  CHECK(lg.loss == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(lg.row_grads.size() == 1);  // path length 1
}

TEST_CASE("hierarchical-softmax leaf probabilities sum to one") {
  Vocabulary vocab = make_vocab(8);
  EmbeddingConfig cfg = small_config(5);
  cfg.loss = LossKind::HierarchicalSoftmax;
  EmbeddingModel model = init_model(vocab, cfg);
  Rng rng(21);
  randomize(model.internal, rng, 0.8);
  HuffmanTree tree(model.vocab.counts());
  std::vector<double> hidden(5);
  randomize(hidden, rng, 0.8);
  double total = 0.0;
  for (int leaf = 0; leaf < 8; ++leaf) {
    total += std::exp(-hs_loss_and_grads(hidden, leaf, model, tree).loss);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("exact-softmax loss equals the negative log softmax probability of the target") {
  EmbeddingModel model = init_model(make_vocab(6), small_config(4));
  Rng rng(31);
  randomize(model.output, rng, 0.9);
  std::vector<double> hidden(4);
  randomize(hidden, rng, 0.9);
  std::vector<double> acts(6);
  for (int n = 0; n < 6; ++n) {
    double a = 0.0;
    auto row = model.output_row(n);
    for (int d = 0; d < 4; ++d) a += hidden[d] * row[d];
    acts[n] = a;
  }
  auto probs = softmax_distribution(acts);
  for (int target = 0; target < 6; ++target) {
    LossGrads lg = exact_softmax_loss_and_grads(hidden, target, model);
    CHECK(lg.loss == doctest::Approx(-std::log(probs[target])).epsilon(1e-12));
    REQUIRE(lg.row_grads.size() == 6);  // touches every output row once
    for (int n = 0; n < 6; ++n) CHECK(lg.row_grads[n].first == n);
  }
}

TEST_CASE("analytic gradients match central finite differences at 100 random points") {
  Vocabulary vocab = make_vocab(6);
  const int dim = 4;
  NoiseTable noise(vocab.counts(), 0.75);
  HuffmanTree tree(vocab.counts());
  Rng rng(77);
  for (int point = 0; point < 100; ++point) {
    EmbeddingConfig cfg = small_config(dim);
    cfg.seed = 1000 + point;
    EmbeddingModel model = init_model(vocab, cfg);
    randomize(model.output, rng, 0.7);
    randomize(model.internal, rng, 0.7);
    std::vector<double> hidden(dim);
    randomize(hidden, rng, 0.7);
    int target = static_cast<int>(rng.next_below(6));
    std::uint64_t draw_seed = rng.next_u64();

    {
      // negative sampling: replaying the rng seed fixes the drawn negatives
      auto loss_of = [&](const EmbeddingModel& m, const std::vector<double>& h) {
        Rng r(draw_seed);
        return ns_loss_and_grads(h, target, m, noise, 3, r).loss;
      };
      Rng r(draw_seed);
      LossGrads lg = ns_loss_and_grads(hidden, target, model, noise, 3, r);
      gradcheck(model, hidden, loss_of, lg, 'o');
    }
    {
      auto loss_of = [&](const EmbeddingModel& m, const std::vector<double>& h) {
        return hs_loss_and_grads(h, target, m, tree).loss;
      };
      LossGrads lg = hs_loss_and_grads(hidden, target, model, tree);
      gradcheck(model, hidden, loss_of, lg, 'i');
    }
    {
      auto loss_of = [&](const EmbeddingModel& m, const std::vector<double>& h) {
        return exact_softmax_loss_and_grads(h, target, m).loss;
      };
      LossGrads lg = exact_softmax_loss_and_grads(hidden, target, model);
      gradcheck(model, hidden, loss_of, lg, 'o');
    }
  }
}

TEST_CASE("full-batch exact-softmax CBOW loss decreases monotonically") {
  Vocabulary vocab = make_vocab(6);
  EmbeddingConfig cfg = small_config(3);
  cfg.loss = LossKind::ExactSoftmax;
  EmbeddingModel model = init_model(vocab, cfg);

  std::vector<std::vector<int>> sentences{{0, 1, 2}, {3, 4, 5}, {0, 2, 4}, {1, 3, 5}};
  struct Sample {
    std::vector<int> context;
    int target;
  };
  std::vector<Sample> samples;
  for (const auto& sent : sentences) {
    for (std::size_t pos = 0; pos < sent.size(); ++pos) {
      Sample s;
      s.target = sent[pos];
      for (std::size_t j = 0; j < sent.size(); ++j) {
        if (j != pos) s.context.push_back(sent[j]);
      }
      samples.push_back(std::move(s));
    }
  }

  const double lr = 1e-2;
  auto batch_loss_and_step = [&]() {
    std::vector<double> input_grad(model.input.size(), 0.0);
    std::vector<double> output_grad(model.output.size(), 0.0);
    double total = 0.0;
    for (const Sample& s : samples) {
      auto hidden = cbow_hidden(s.context, model);
      LossGrads lg = exact_softmax_loss_and_grads(hidden, s.target, model);
      total += lg.loss;
      // chain rule through the context mean: each row gets grad_hidden / |C|
      double inv = 1.0 / static_cast<double>(s.context.size());
      for (int idx : s.context) {
        for (int d = 0; d < model.dim; ++d) {
          input_grad[std::size_t(idx) * model.dim + d] += inv * lg.grad_hidden[d];
        }
      }
      for (const auto& [row, g] : lg.row_grads) {
        for (int d = 0; d < model.dim; ++d) {
          output_grad[std::size_t(row) * model.dim + d] += g[d];
        }
      }
    }
    for (std::size_t i = 0; i < model.input.size(); ++i) model.input[i] -= lr * input_grad[i];
    for (std::size_t i = 0; i < model.output.size(); ++i) model.output[i] -= lr * output_grad[i];
    return total;
  };

  double previous = batch_loss_and_step();
  for (int step = 0; step < 10; ++step) {
    double current = batch_loss_and_step();
    CHECK(current < previous);
    previous = current;
  }
}

TEST_CASE("CBOW negative-sampling step touches only context input rows and sampled output rows") {
  Vocabulary vocab = make_vocab(8);
  EmbeddingConfig cfg = small_config(5);
  EmbeddingModel model = init_model(vocab, cfg);
  Rng fill(3);
  randomize(model.output, fill, 0.5);

  std::vector<int> sentence{0, 3, 5, 7};
  const int position = 1;  // context {0, 5, 7}, target 3
  NoiseTable noise(model.vocab.counts(), cfg.noise_exponent);
  EmbeddingModel before = model;

  Rng rng(99);
  train_step(model, sentence, position, 0.02, &noise, nullptr, rng);

  Rng replay(99);
  std::set<int> expected_output{3};
  for (int k = 0; k < cfg.negatives; ++k) expected_output.insert(noise.sample_excluding(3, replay));

  CHECK(changed_rows(before.input, model.input, model.dim) == std::set<int>{0, 5, 7});
  CHECK(changed_rows(before.output, model.output, model.dim) == expected_output);
  CHECK(before.internal == model.internal);
}

TEST_CASE("skip-gram negative-sampling step touches only the center input row") {
  Vocabulary vocab = make_vocab(8);
  EmbeddingConfig cfg = small_config(5);
  cfg.model = ModelKind::SkipGram;
  EmbeddingModel model = init_model(vocab, cfg);
  Rng fill(4);
  randomize(model.output, fill, 0.5);

  std::vector<int> sentence{2, 6, 4};
  const int position = 1;  // center 6, targets {2, 4}
  NoiseTable noise(model.vocab.counts(), cfg.noise_exponent);
  EmbeddingModel before = model;

  Rng rng(123);
  train_step(model, sentence, position, 0.02, &noise, nullptr, rng);

  Rng replay(123);
  std::set<int> expected_output;
  for (int target : {2, 4}) {
    expected_output.insert(target);
    for (int k = 0; k < cfg.negatives; ++k) {
      expected_output.insert(noise.sample_excluding(target, replay));
    }
  }

  CHECK(changed_rows(before.input, model.input, model.dim) == std::set<int>{6});
  CHECK(changed_rows(before.output, model.output, model.dim) == expected_output);
  CHECK(before.internal == model.internal);
}

TEST_CASE("hierarchical-softmax step touches only the target's path internal rows") {
  Vocabulary vocab = make_vocab(8);
  EmbeddingConfig cfg = small_config(5);
  cfg.loss = LossKind::HierarchicalSoftmax;
  EmbeddingModel model = init_model(vocab, cfg);
  Rng fill(6);
  randomize(model.internal, fill, 0.5);

  std::vector<int> sentence{1, 4, 2};
  const int position = 0;  // context {4, 2}, target 1
  HuffmanTree tree(model.vocab.counts());
  EmbeddingModel before = model;

  Rng rng(7);
  train_step(model, sentence, position, 0.02, nullptr, &tree, rng);

  auto path = tree.path(1);
  std::set<int> expected_internal(path.begin(), path.end());
  CHECK(changed_rows(before.input, model.input, model.dim) == std::set<int>{4, 2});
  CHECK(changed_rows(before.internal, model.internal, model.dim) == expected_internal);
  CHECK(before.output == model.output);
}

TEST_CASE("the window truncates the context at the sentence bounds") {
  Vocabulary vocab = make_vocab(8);
  EmbeddingConfig cfg = small_config(4);
  cfg.window = 1;
  EmbeddingModel model = init_model(vocab, cfg);
  Rng fill(8);
  randomize(model.output, fill, 0.5);
  NoiseTable noise(model.vocab.counts(), cfg.noise_exponent);
  EmbeddingModel before = model;

  std::vector<int> sentence{0, 1, 2, 3, 4};
  Rng rng(15);
  train_step(model, sentence, 2, 0.02, &noise, nullptr, rng);
  // window 1 around position 2 exposes only tokens 1 and 3
  CHECK(changed_rows(before.input, model.input, model.dim) == std::set<int>{1, 3});
}

TEST_CASE("training with zero epochs returns the initialized model unchanged") {
  Vocabulary vocab = make_vocab(5);
  EmbeddingConfig cfg = small_config(4);
  cfg.epochs = 0;
  std::vector<Sentence> sentences{{tag_token("w0"), tag_token("w1"), tag_token("w2")}};
  EmbeddingModel trained = train(sentences, vocab, cfg);
  EmbeddingModel fresh = init_model(vocab, cfg);
  CHECK(trained.input == fresh.input);
  CHECK(trained.output == fresh.output);
  CHECK(trained.internal == fresh.internal);
}

TEST_CASE("single-worker training is bit-identical across runs") {
  Vocabulary vocab = make_vocab(8);
  std::vector<Sentence> sentences;
  Rng rng(17);
  for (int s = 0; s < 30; ++s) {
    Sentence sent;
    for (int t = 0; t < 4; ++t) {
      sent.push_back(tag_token("w" + std::to_string(rng.next_below(8))));
    }
    sentences.push_back(std::move(sent));
  }
  for (LossKind loss : {LossKind::NegativeSampling, LossKind::HierarchicalSoftmax}) {
    EmbeddingConfig cfg = small_config(8);
    cfg.loss = loss;
    cfg.epochs = 3;
    cfg.model = loss == LossKind::NegativeSampling ? ModelKind::Cbow : ModelKind::SkipGram;
    EmbeddingModel a = train(sentences, vocab, cfg);
    EmbeddingModel b = train(sentences, vocab, cfg);
    CHECK(a.input == b.input);
    CHECK(a.output == b.output);
    CHECK(a.internal == b.internal);

    cfg.seed = 999;
    EmbeddingModel c = train(sentences, vocab, cfg);
    CHECK(a.input != c.input);
  }
}

TEST_CASE("skip-gram with negative sampling separates a two-cluster corpus") {
  // tokens 0..5 only ever co-occur with each other, as do tokens 6..11
  std::vector<Sentence> sentences;
  Rng rng(23);
  for (int s = 0; s < 60; ++s) {
    int cluster = s % 2;
    Sentence sent;
    std::set<int> used;
    while (static_cast<int>(used.size()) < 3) {
      used.insert(cluster * 6 + static_cast<int>(rng.next_below(6)));
    }
    for (int t : used) sent.push_back(tag_token("w" + std::to_string(t)));
    sentences.push_back(std::move(sent));
  }
  Vocabulary vocab = Vocabulary::build(sentences, 1);
  EmbeddingConfig cfg;
  cfg.model = ModelKind::SkipGram;
  cfg.loss = LossKind::NegativeSampling;
  cfg.dim = 16;
  cfg.epochs = 30;
  cfg.negatives = 5;
  cfg.seed = 2;
  EmbeddingModel model = train(sentences, vocab, cfg);

  auto cluster_of = [&](const std::string& raw) { return std::stoi(raw.substr(1)) / 6; };
  double intra = 0.0, inter = 0.0;
  int n_intra = 0, n_inter = 0;
  for (int i = 0; i < vocab.size(); ++i) {
    for (int j = i + 1; j < vocab.size(); ++j) {
      double c = cosine(model.input_row(i), model.input_row(j));
      bool same = cluster_of(vocab.token(i).raw) == cluster_of(vocab.token(j).raw);
      (same ? intra : inter) += c;
      (same ? n_intra : n_inter) += 1;
    }
  }
  intra /= n_intra;
  inter /= n_inter;
  CHECK(intra - inter >= 0.2);
}

TEST_CASE("training rejects corpora without a usable sentence") {
  Vocabulary vocab = make_vocab(4);
  EmbeddingConfig cfg = small_config(4);
  std::vector<Sentence> singletons{{tag_token("w0")}, {tag_token("w1")}};
  CHECK_THROWS_AS(train(singletons, vocab, cfg), Error);
  // out-of-vocabulary tokens drop out before the length check
  std::vector<Sentence> oov{{tag_token("w0"), tag_token("unknown"), tag_token("also unknown")}};
  CHECK_THROWS_AS(train(oov, vocab, cfg), Error);
}

TEST_CASE("exact softmax refuses vocabularies beyond the supported size") {
  CHECK(kExactSoftmaxMaxVocab == 10000);
  Sentence giant;
  for (int i = 0; i < kExactSoftmaxMaxVocab + 1; ++i) {
    giant.push_back(tag_token("w" + std::to_string(i)));
  }
  Vocabulary vocab = Vocabulary::build({giant}, 1);
  REQUIRE(vocab.size() == kExactSoftmaxMaxVocab + 1);
  EmbeddingConfig cfg = small_config(2);
  cfg.loss = LossKind::ExactSoftmax;
  CHECK_THROWS_AS(train({giant}, vocab, cfg), Error);
}

TEST_CASE("embedding config validation and learning-rate defaults") {
  EmbeddingConfig cfg;
  CHECK(cfg.initial_lr() == 0.05);  // CBOW default
  cfg.model = ModelKind::SkipGram;
  CHECK(cfg.initial_lr() == 0.025);
  cfg.lr_initial = 0.1;
  CHECK(cfg.initial_lr() == 0.1);

  auto expect_invalid = [](auto&& mutate) {
    EmbeddingConfig c;
    mutate(c);
    CHECK_THROWS_AS(c.validate(), Error);
  };
  expect_invalid([](EmbeddingConfig& c) { c.dim = 0; });
  expect_invalid([](EmbeddingConfig& c) { c.window = 0; });
  expect_invalid([](EmbeddingConfig& c) { c.epochs = -1; });
  expect_invalid([](EmbeddingConfig& c) { c.workers = 0; });
  expect_invalid([](EmbeddingConfig& c) { c.negatives = 0; });
  expect_invalid([](EmbeddingConfig& c) { c.lr_initial = -0.5; });
  expect_invalid([](EmbeddingConfig& c) { c.lr_final = 1.0; });  // exceeds lr_initial
}

TEST_CASE("init_model draws inputs uniformly within +-0.5/R and zeroes the rest") {
  Vocabulary vocab = make_vocab(6);
  EmbeddingConfig cfg = small_config(10);
  EmbeddingModel model = init_model(vocab, cfg);
  const double bound = 0.5 / cfg.dim;
  for (double w : model.input) {
    CHECK(w >= -bound);
    CHECK(w <= bound);
  }
  for (double w : model.output) CHECK(w == 0.0);
  for (double w : model.internal) CHECK(w == 0.0);
  CHECK(model.input.size() == std::size_t(6) * 10);
  CHECK(model.internal.size() == std::size_t(5) * 10);

  EmbeddingModel again = init_model(vocab, cfg);
  CHECK(model.input == again.input);
  cfg.seed = 77;
  EmbeddingModel other = init_model(vocab, cfg);
  CHECK(model.input != other.input);

  CHECK_THROWS_AS(init_model(make_vocab(1), cfg), Error);
}

TEST_CASE("noise table frequencies track count^0.75 within one percent") {
  std::vector<std::int64_t> counts{100, 80, 60, 50, 40, 30, 20, 10, 5, 1};
  NoiseTable noise(counts, 0.75);
  double prob_sum = 0.0;
  double norm = 0.0;
  for (std::int64_t c : counts) norm += std::pow(static_cast<double>(c), 0.75);
  for (int i = 0; i < noise.size(); ++i) {
    prob_sum += noise.probability(i);
    CHECK(noise.probability(i) ==
          doctest::Approx(std::pow(static_cast<double>(counts[i]), 0.75) / norm).epsilon(1e-9));
  }
  CHECK(prob_sum == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<int> hits(counts.size(), 0);
  Rng rng(7);
  const int draws = 1000000;
  for (int d = 0; d < draws; ++d) hits[noise.sample(rng)] += 1;
  for (int i = 0; i < noise.size(); ++i) {
    double freq = static_cast<double>(hits[i]) / draws;
    CHECK(std::abs(freq - noise.probability(i)) < 0.01);
  }
}

TEST_CASE("noise table rejects bad inputs and never samples the excluded target") {
  CHECK_THROWS_AS(NoiseTable({}, 0.75), Error);
  CHECK_THROWS_AS(NoiseTable({3, 0, 2}, 0.75), Error);

  NoiseTable lonely({5}, 0.75);
  Rng rng(9);
  CHECK_THROWS_AS(lonely.sample_excluding(0, rng), Error);

  NoiseTable pair_table({90, 10}, 0.75);
  for (int d = 0; d < 10000; ++d) {
    CHECK(pair_table.sample_excluding(0, rng) == 1);
  }
}

TEST_CASE("Huffman codes are prefix-free and have minimal weighted length") {
  std::vector<std::vector<std::int64_t>> cases{
      {8, 4, 2, 1, 1},
      {5, 5, 5, 5},
      {21, 13, 8, 5, 3, 2, 1, 1},
      {7, 7, 6, 6, 5, 5},
  };
  for (const auto& counts : cases) {
    CAPTURE(counts.size());
    HuffmanTree tree(counts);
    const int v = static_cast<int>(counts.size());
    CHECK(tree.leaf_count() == v);
    CHECK(tree.internal_count() == v - 1);

    std::vector<std::vector<std::uint8_t>> codes;
    std::int64_t manual_total = 0;
    for (int i = 0; i < v; ++i) {
      auto c = tree.code(i);
      REQUIRE(c.size() == tree.path(i).size());
      codes.emplace_back(c.begin(), c.end());
      manual_total += counts[i] * static_cast<std::int64_t>(c.size());
    }
    CHECK(tree.total_code_length() == manual_total);
    CHECK(tree.total_code_length() == brute_min_merge_cost(counts));

    for (int i = 0; i < v; ++i) {
      for (int j = 0; j < v; ++j) {
        if (i == j) continue;
        const auto& a = codes[i];
        const auto& b = codes[j];
        bool prefix = a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
        CHECK_FALSE(prefix);
      }
    }
  }
}

TEST_CASE("Huffman equal-weight ties resolve deterministically toward low indices") {
  HuffmanTree tree({1, 1, 1, 1});
  // leaves 0,1 merge first, then 2,3, then the two internal nodes
  auto as_vec = [](auto span) { return std::vector<int>(span.begin(), span.end()); };
  CHECK(as_vec(tree.path(0)) == std::vector<int>{2, 0});
  CHECK(as_vec(tree.path(1)) == std::vector<int>{2, 0});
  CHECK(as_vec(tree.path(2)) == std::vector<int>{2, 1});
  CHECK(as_vec(tree.path(3)) == std::vector<int>{2, 1});
  CHECK(as_vec(tree.code(0)) == std::vector<int>{0, 0});
  CHECK(as_vec(tree.code(1)) == std::vector<int>{0, 1});
  CHECK(as_vec(tree.code(2)) == std::vector<int>{1, 0});
  CHECK(as_vec(tree.code(3)) == std::vector<int>{1, 1});

  HuffmanTree again({1, 1, 1, 1});
  for (int i = 0; i < 4; ++i) {
    CHECK(as_vec(tree.path(i)) == as_vec(again.path(i)));
    CHECK(as_vec(tree.code(i)) == as_vec(again.code(i)));
  }

  CHECK_THROWS_AS(HuffmanTree({5}), Error);
  CHECK_THROWS_AS(HuffmanTree({5, 0}), Error);
}

TEST_CASE("embeddings save/load round-trips tokens with spaces and percents") {
  std::vector<Sentence> sentences{
      {director_token("john woo"), actor_token("50% off"), tag_token("plain")},
      {director_token("john woo"), actor_token("50% off"), tag_token("plain")}};
  Vocabulary vocab = Vocabulary::build(sentences, 1);
  EmbeddingConfig cfg = small_config(3);
  cfg.seed = 9;
  EmbeddingModel model = init_model(vocab, cfg);

  std::stringstream ss;
  save_embeddings(model, ss);
  std::string text = ss.str();
  CHECK(text.substr(0, 4) == "3 3\n");
  CHECK(text.find("d:john%20woo") != std::string::npos);
  CHECK(text.find("a:50%25%20off") != std::string::npos);
  CHECK(text.find("john woo") == std::string::npos);  // no raw space inside a token field

  RepresentationStore store = load_embeddings(ss);
  CHECK(store.size() == 3);
  CHECK(store.dim() == 3);
  for (int i = 0; i < vocab.size(); ++i) {
    const StoreEntry* entry = store.find(vocab.token(i));
    REQUIRE(entry != nullptr);
    auto original = model.input_row(i);
    for (int d = 0; d < 3; ++d) {
      CHECK(std::abs(entry->vec[d] - original[d]) <= 1e-8);
    }
    CHECK(cosine(entry->vec, original) > 1.0 - 1e-12);
  }

  // a second save/load cycle is an exact fixed point of the text format
  std::stringstream second, third;
  save_embeddings(store, second);
  RepresentationStore reloaded = load_embeddings(second);
  save_embeddings(reloaded, third);
  CHECK(second.str() == third.str());
}

TEST_CASE("store_from_model exposes exactly the input vectors") {
  Vocabulary vocab = make_vocab(4);
  EmbeddingModel model = init_model(vocab, small_config(5));
  RepresentationStore store = store_from_model(model);
  CHECK(store.size() == 4);
  CHECK(store.dim() == 5);
  for (int i = 0; i < 4; ++i) {
    const StoreEntry* entry = store.find(vocab.token(i));
    REQUIRE(entry != nullptr);
    auto row = model.input_row(i);
    CHECK(std::equal(entry->vec.begin(), entry->vec.end(), row.begin(), row.end()));
  }
}

TEST_CASE("embeddings load rejects malformed files") {
  {
    std::stringstream ss("2 3\nt:a 1 2 3 4\nt:b 1 2 3\n");
    CHECK_THROWS_AS(load_embeddings(ss), ParseError);
  }
  {
    std::stringstream ss("2 3\nt:a 1 2\nt:b 1 2 3\n");
    CHECK_THROWS_AS(load_embeddings(ss), ParseError);
  }
  {
    std::stringstream ss("2 3\nt:a 1 2 3\nt:a 1 2 3\n");
    CHECK_THROWS_AS(load_embeddings(ss), ParseError);
  }
  {
    std::stringstream ss("x 3\nt:a 1 2 3\n");
    CHECK_THROWS_AS(load_embeddings(ss), ParseError);
  }
  {
    std::stringstream ss("2 3\nt:a 1 2 nope\nt:b 1 2 3\n");
    CHECK_THROWS_AS(load_embeddings(ss), ParseError);
  }
  {
    std::stringstream ss("3 3\nt:a 1 2 3\nt:b 1 2 3\n");
    CHECK_THROWS_AS(load_embeddings(ss), Error);  // header promised one more row
  }
  {
    std::stringstream ss("");
    CHECK_THROWS_AS(load_embeddings(ss), Error);
  }
}

TEST_CASE("a single-token embeddings file loads for query-only use") {
  std::stringstream ss("1 3\nt:solo 0 0 2\n");
  RepresentationStore store = load_embeddings(ss);
  CHECK(store.size() == 1);
  const StoreEntry* entry = store.find(tag_token("solo"));
  REQUIRE(entry != nullptr);
  CHECK(entry->norm == doctest::Approx(2.0).epsilon(1e-12));
  auto neighbors = nearest(store, std::vector<double>{0.0, 0.0, 1.0}, 5);
  REQUIRE(neighbors.size() == 1);
  CHECK(neighbors[0].similarity == doctest::Approx(1.0).epsilon(1e-12));
}
