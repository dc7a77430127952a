#include "reprrec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "reprrec/embedding_io.hpp"
#include "reprrec/error.hpp"
#include "reprrec/log.hpp"
#include "reprrec/rng.hpp"
#include "reprrec/vectorspace.hpp"

namespace reprrec {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt_rmse(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::vector<RatingRecord> select_events(const Dataset& data,
                                        std::span<const std::size_t> ids) {
  std::vector<RatingRecord> out;
  out.reserve(ids.size());
  for (std::size_t id : ids) out.push_back(data.ratings[id]);
  return out;
}

struct TestSet {
  std::vector<std::pair<EntityToken, EntityToken>> pairs;
  std::vector<double> truths;
};

TestSet test_set_for(const Dataset& data, std::span<const std::size_t> ids) {
  TestSet t;
  t.pairs.reserve(ids.size());
  t.truths.reserve(ids.size());
  for (std::size_t id : ids) {
    const RatingRecord& r = data.ratings[id];
    t.pairs.emplace_back(r.user, r.movie);
    t.truths.push_back(r.rating);
  }
  return t;
}

std::vector<double> prediction_values(const TestSet& t, const PredictorSpec& spec,
                                      const RatingsStore& store) {
  std::vector<double> out;
  out.reserve(t.pairs.size());
  for (const Prediction& p : predict_batch(t.pairs, spec, store)) out.push_back(p.value);
  return out;
}

PredictorSpec spec_for(ModelId m, int k, bool filter_first, const RepresentationStore* emb) {
  PredictorSpec spec;
  spec.target = model_target(m);
  spec.source = model_source(m);
  spec.embeddings = emb;
  spec.k = k;
  spec.filter_first = filter_first;
  return spec;
}

// CBOW and Skip-gram stores for one (dim, epochs) grid point
struct EmbeddingPair {
  std::optional<RepresentationStore> cbow, sg;
};

RepresentationStore train_store_for(ModelKind kind, const std::vector<Sentence>& sentences,
                                    const Vocabulary& vocab, const EvalConfig& config, int dim,
                                    int epochs, std::uint64_t seed) {
  EmbeddingConfig cfg;
  cfg.model = kind;
  cfg.loss = config.loss;
  cfg.dim = dim;
  cfg.window = config.window;
  cfg.epochs = epochs;
  cfg.negatives = config.negatives;
  cfg.seed = seed;
  cfg.workers = config.workers;
  return store_from_model(train(sentences, vocab, cfg));
}

const RepresentationStore* store_for(const EmbeddingPair& pair, ModelKind kind) {
  return kind == ModelKind::Cbow ? &*pair.cbow : &*pair.sg;
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double squared_error(std::span<const double> preds, std::span<const double> truths) {
  double se = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    double d = preds[i] - truths[i];
    se += d * d;
  }
  return se;
}

}  // namespace

const char* model_name(ModelId m) {
  switch (m) {
    case ModelId::UBCF: return "UBCF";
    case ModelId::IBCF: return "IBCF";
    case ModelId::UBCB: return "UBCB";
    case ModelId::UBSG: return "UBSG";
    case ModelId::IBCB: return "IBCB";
    case ModelId::IBSG: return "IBSG";
  }
  return "?";
}

std::optional<ModelId> parse_model_id(const std::string& name) {
  for (ModelId m : {ModelId::UBCF, ModelId::IBCF, ModelId::UBCB, ModelId::UBSG, ModelId::IBCB,
                    ModelId::IBSG}) {
    if (name == model_name(m)) return m;
  }
  return std::nullopt;
}

PredictTarget model_target(ModelId m) {
  switch (m) {
    case ModelId::UBCF:
    case ModelId::UBCB:
    case ModelId::UBSG: return PredictTarget::UserBased;
    default: return PredictTarget::ItemBased;
  }
}

SimilaritySource model_source(ModelId m) {
  return model_uses_embeddings(m) ? SimilaritySource::Embeddings
                                  : SimilaritySource::RatingVectors;
}

ModelKind model_embedding_kind(ModelId m) {
  return (m == ModelId::UBCB || m == ModelId::IBCB) ? ModelKind::Cbow : ModelKind::SkipGram;
}

bool model_uses_embeddings(ModelId m) { return m != ModelId::UBCF && m != ModelId::IBCF; }

std::vector<std::size_t> FoldAssignment::events_in_fold(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::training_events(int excluded_fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == kTuningFold || fold_of[i] == excluded_fold) continue;
    out.push_back(i);
  }
  return out;
}

FoldAssignment partition(std::span<const RatingRecord> events, std::uint64_t seed) {
  FoldAssignment a;
  a.seed = seed;
  a.fold_of.assign(events.size(), 0);

  std::unordered_map<EntityToken, std::vector<std::size_t>> by_user;
  for (std::size_t i = 0; i < events.size(); ++i) by_user[events[i].user].push_back(i);

  for (auto& [user, ids] : by_user) {
    Rng rng(derive_seed(seed, "partition", fnv1a64(user.canonical())));
    rng.shuffle(ids);
    int start = static_cast<int>(rng.next_below(FoldAssignment::kFolds));
    for (std::size_t j = 0; j < ids.size(); ++j) {
      a.fold_of[ids[j]] = (start + static_cast<int>(j)) % FoldAssignment::kFolds;
    }
  }
  return a;
}

double rmse(std::span<const double> predictions, std::span<const double> truths) {
  if (predictions.empty()) throw Error("rmse: empty prediction list");
  if (predictions.size() != truths.size())
    throw Error("rmse: " + std::to_string(predictions.size()) + " predictions vs " +
                std::to_string(truths.size()) + " truths");
  return std::sqrt(squared_error(predictions, truths) / static_cast<double>(predictions.size()));
}

std::vector<Sentence> sentences_for_events(const Dataset& data,
                                           std::span<const std::size_t> event_ids,
                                           int max_actors) {
  std::vector<RatingRecord> selected = select_events(data, event_ids);
  return build_sentences(selected, data.tags, data.metadata, max_actors);
}

void EvalConfig::validate() const {
  if (models.empty()) throw Error("eval config: no models selected");
  if (ks.empty()) throw Error("eval config: empty neighborhood grid");
  for (int k : ks) {
    if (k <= 0) throw Error("eval config: neighborhood sizes must be positive");
  }
  bool any_embedding = std::any_of(models.begin(), models.end(), model_uses_embeddings);
  if (any_embedding) {
    if (dims.empty()) throw Error("eval config: empty dimension grid");
    if (epoch_grid.empty()) throw Error("eval config: empty epoch grid");
    for (int d : dims) {
      if (d <= 0) throw Error("eval config: dimensions must be positive");
    }
    for (int e : epoch_grid) {
      if (e < 0) throw Error("eval config: epochs must be non-negative");
    }
    if (window <= 0) throw Error("eval config: window must be positive");
    if (min_count < 1) throw Error("eval config: min_count must be at least 1");
    if (max_actors < 0) throw Error("eval config: max_actors must be non-negative");
  }
  if (workers < 1) throw Error("eval config: workers must be at least 1");
}

TuneResult tune(const Dataset& data, const FoldAssignment& assignment, const EvalConfig& config) {
  config.validate();
  if (assignment.fold_of.size() != data.ratings.size())
    throw Error("tune: fold assignment does not match the rating list");

  TuneResult result;
  result.train_events = assignment.training_events(-1);
  result.tuning_events = assignment.events_in_fold(FoldAssignment::kTuningFold);
  if (result.tuning_events.empty()) throw Error("tune: the tuning fold is empty");
  if (result.train_events.empty()) throw Error("tune: the training folds are empty");

  RatingsStore store(select_events(data, result.train_events), data.scale);
  TestSet tuning = test_set_for(data, result.tuning_events);

  bool needs_cbow = false, needs_sg = false;
  for (ModelId m : config.models) {
    if (!model_uses_embeddings(m)) continue;
    (model_embedding_kind(m) == ModelKind::Cbow ? needs_cbow : needs_sg) = true;
  }

  std::map<std::pair<int, int>, EmbeddingPair> trained;  // (dim, epochs) -> stores
  if (needs_cbow || needs_sg) {
    std::vector<Sentence> sentences =
        sentences_for_events(data, result.train_events, config.max_actors);
    Vocabulary vocab = Vocabulary::build(sentences, config.min_count);
    for (int dim : config.dims) {
      for (int epochs : config.epoch_grid) {
        std::uint64_t salt =
            static_cast<std::uint64_t>(dim) * 1000003ull + static_cast<std::uint64_t>(epochs);
        std::uint64_t seed = derive_seed(config.seed, "tune-embed", salt);
        EmbeddingPair& pair = trained[{dim, epochs}];
        if (needs_cbow)
          pair.cbow = train_store_for(ModelKind::Cbow, sentences, vocab, config, dim, epochs, seed);
        if (needs_sg)
          pair.sg = train_store_for(ModelKind::SkipGram, sentences, vocab, config, dim, epochs, seed);
        log::debug("tuned embeddings at dim=" + std::to_string(dim) +
                   " epochs=" + std::to_string(epochs));
      }
    }
  }

  for (ModelId m : config.models) {
    ModelChoice choice;
    choice.model = m;
    bool first = true;
    if (!model_uses_embeddings(m)) {
      for (int k : config.ks) {
        double r = rmse(prediction_values(tuning, spec_for(m, k, config.filter_first, nullptr),
                                          store),
                        tuning.truths);
        if (first || r < choice.tuning_rmse) {
          choice.k = k;
          choice.tuning_rmse = r;
          first = false;
        }
      }
    } else {
      ModelKind kind = model_embedding_kind(m);
      for (int dim : config.dims) {
        for (int epochs : config.epoch_grid) {
          const RepresentationStore* emb = store_for(trained.at({dim, epochs}), kind);
          for (int k : config.ks) {
            double r = rmse(
                prediction_values(tuning, spec_for(m, k, config.filter_first, emb), store),
                tuning.truths);
            if (first || r < choice.tuning_rmse) {
              choice.k = k;
              choice.dim = dim;
              choice.epochs = epochs;
              choice.tuning_rmse = r;
              first = false;
            }
          }
        }
      }
    }
    log::info(std::string("tuned ") + model_name(m) + ": k=" + std::to_string(choice.k) +
              (model_uses_embeddings(m)
                   ? " dim=" + std::to_string(choice.dim) +
                         " epochs=" + std::to_string(choice.epochs)
                   : std::string()) +
              " rmse=" + fmt_rmse(choice.tuning_rmse));
    result.choices.push_back(choice);
  }

  if (config.include_hybrid) {
    std::vector<std::vector<double>> rows(tuning.pairs.size(),
                                          std::vector<double>(config.models.size()));
    std::vector<std::string> names;
    for (std::size_t j = 0; j < config.models.size(); ++j) {
      const ModelChoice& choice = result.choices[j];
      const RepresentationStore* emb =
          model_uses_embeddings(choice.model)
              ? store_for(trained.at({choice.dim, choice.epochs}),
                          model_embedding_kind(choice.model))
              : nullptr;
      std::vector<double> preds = prediction_values(
          tuning, spec_for(choice.model, choice.k, config.filter_first, emb), store);
      for (std::size_t t = 0; t < preds.size(); ++t) rows[t][j] = preds[t];
      names.emplace_back(model_name(choice.model));
    }
    FitResult fit = fit_weights(rows, tuning.truths, std::move(names));
    result.weights = std::move(fit.weights);
    result.hybrid_tuning_rmse = fit.rmse;
    result.has_hybrid = true;
    log::info("fitted hybrid weights, tuning rmse=" + fmt_rmse(fit.rmse));
  }
  return result;
}

EvalReport cross_validate(const Dataset& data, const FoldAssignment& assignment,
                          const TuneResult& tuned, const EvalConfig& config) {
  config.validate();
  if (assignment.fold_of.size() != data.ratings.size())
    throw Error("cross_validate: fold assignment does not match the rating list");
  if (tuned.choices.size() != config.models.size())
    throw Error("cross_validate: tuned choices do not match the configured models");

  const int rounds = FoldAssignment::kTuningFold;  // folds 0..3 rotate as test sets
  const std::size_t n_ks = config.ks.size();
  const std::size_t n_models = config.models.size();

  EvalReport report;
  report.ks = config.ks;
  report.has_hybrid = tuned.has_hybrid;
  report.weights = tuned.weights;
  report.hybrid_tuning_rmse = tuned.hybrid_tuning_rmse;
  for (std::size_t j = 0; j < n_models; ++j) {
    SeriesReport series;
    series.name = model_name(config.models[j]);
    series.choice = tuned.choices[j];
    report.models.push_back(std::move(series));
  }

  std::vector<std::vector<double>> model_se(n_models, std::vector<double>(n_ks, 0.0));
  double hybrid_se = 0.0, baseline_se = 0.0;
  std::int64_t total_pairs = 0;

  for (int f = 0; f < rounds; ++f) {
    std::vector<std::size_t> train_ids = assignment.training_events(f);
    std::vector<std::size_t> test_ids = assignment.events_in_fold(f);
    if (test_ids.empty())
      throw Error("cross_validate: fold " + std::to_string(f + 1) + " has no test events");
    if (train_ids.empty())
      throw Error("cross_validate: fold " + std::to_string(f + 1) + " has no training events");

    RatingsStore store(select_events(data, train_ids), data.scale);
    TestSet test = test_set_for(data, test_ids);
    total_pairs += static_cast<std::int64_t>(test.pairs.size());

    // retrain embeddings for this round on training-fold sentences only
    std::map<std::pair<int, int>, EmbeddingPair> trained;
    {
      bool needs_cbow = false, needs_sg = false;
      std::vector<std::pair<int, int>> points;
      for (std::size_t j = 0; j < n_models; ++j) {
        const ModelChoice& choice = tuned.choices[j];
        if (!model_uses_embeddings(choice.model)) continue;
        (model_embedding_kind(choice.model) == ModelKind::Cbow ? needs_cbow : needs_sg) = true;
        points.emplace_back(choice.dim, choice.epochs);
      }
      if (!points.empty()) {
        std::vector<Sentence> sentences =
            sentences_for_events(data, train_ids, config.max_actors);
        Vocabulary vocab = Vocabulary::build(sentences, config.min_count);
        std::sort(points.begin(), points.end());
        points.erase(std::unique(points.begin(), points.end()), points.end());
        for (auto [dim, epochs] : points) {
          std::uint64_t salt = static_cast<std::uint64_t>(f) * 1000000007ull +
                               static_cast<std::uint64_t>(dim) * 1000003ull +
                               static_cast<std::uint64_t>(epochs);
          std::uint64_t seed = derive_seed(config.seed, "cv-embed", salt);
          EmbeddingPair& pair = trained[{dim, epochs}];
          if (needs_cbow)
            pair.cbow =
                train_store_for(ModelKind::Cbow, sentences, vocab, config, dim, epochs, seed);
          if (needs_sg)
            pair.sg =
                train_store_for(ModelKind::SkipGram, sentences, vocab, config, dim, epochs, seed);
        }
      }
    }

    auto embedding_for = [&](const ModelChoice& choice) -> const RepresentationStore* {
      if (!model_uses_embeddings(choice.model)) return nullptr;
      return store_for(trained.at({choice.dim, choice.epochs}),
                       model_embedding_kind(choice.model));
    };

    // the per-k series: chosen dim/epochs, k swept over the grid
    std::vector<std::vector<double>> chosen_preds(n_models);
    for (std::size_t j = 0; j < n_models; ++j) {
      const ModelChoice& choice = tuned.choices[j];
      const RepresentationStore* emb = embedding_for(choice);
      std::vector<double> fold_rmse(n_ks);
      for (std::size_t ki = 0; ki < n_ks; ++ki) {
        std::vector<double> preds = prediction_values(
            test, spec_for(choice.model, config.ks[ki], config.filter_first, emb), store);
        double se = squared_error(preds, test.truths);
        model_se[j][ki] += se;
        fold_rmse[ki] = std::sqrt(se / static_cast<double>(preds.size()));
        if (config.ks[ki] == choice.k) chosen_preds[j] = std::move(preds);
      }
      if (chosen_preds[j].empty()) {
        chosen_preds[j] = prediction_values(
            test, spec_for(choice.model, choice.k, config.filter_first, emb), store);
      }
      report.models[j].per_fold.push_back(std::move(fold_rmse));
    }

    if (tuned.has_hybrid) {
      std::vector<double> blended(test.pairs.size());
      std::vector<double> components(n_models);
      for (std::size_t t = 0; t < test.pairs.size(); ++t) {
        for (std::size_t j = 0; j < n_models; ++j) components[j] = chosen_preds[j][t];
        blended[t] = blend(components, tuned.weights, data.scale);
      }
      double se = squared_error(blended, test.truths);
      hybrid_se += se;
      report.hybrid.per_fold.push_back(std::sqrt(se / static_cast<double>(blended.size())));
    }

    std::vector<double> constant(test.pairs.size(), store.global_mean());
    double base_se = squared_error(constant, test.truths);
    baseline_se += base_se;
    report.global_mean.per_fold.push_back(
        std::sqrt(base_se / static_cast<double>(constant.size())));

    report.round_train_events.push_back(std::move(train_ids));
    report.round_test_events.push_back(std::move(test_ids));
    log::info("cross-validation round " + std::to_string(f + 1) + "/" + std::to_string(rounds) +
              " scored");
  }

  report.n_test_pairs = total_pairs;
  for (std::size_t j = 0; j < n_models; ++j) {
    SeriesReport& series = report.models[j];
    series.averaged.resize(n_ks);
    series.pooled.resize(n_ks);
    for (std::size_t ki = 0; ki < n_ks; ++ki) {
      double sum = 0.0;
      for (int f = 0; f < rounds; ++f) sum += series.per_fold[f][ki];
      series.averaged[ki] = sum / rounds;
      series.pooled[ki] = std::sqrt(model_se[j][ki] / static_cast<double>(total_pairs));
    }
  }
  if (tuned.has_hybrid) {
    report.hybrid.averaged = mean_of(report.hybrid.per_fold);
    report.hybrid.pooled = std::sqrt(hybrid_se / static_cast<double>(total_pairs));
  }
  report.global_mean.averaged = mean_of(report.global_mean.per_fold);
  report.global_mean.pooled = std::sqrt(baseline_se / static_cast<double>(total_pairs));
  return report;
}

EvalReport evaluate(const Dataset& data, const EvalConfig& config) {
  FoldAssignment assignment = partition(data.ratings, config.seed);
  TuneResult tuned = tune(data, assignment, config);
  return cross_validate(data, assignment, tuned, config);
}

std::string EvalReport::to_json() const {
  ordered_json j;
  j["ks"] = ks;
  j["n_test_pairs"] = n_test_pairs;
  j["models"] = ordered_json::array();
  for (const SeriesReport& s : models) {
    ordered_json m;
    m["name"] = s.name;
    ordered_json chosen;
    chosen["k"] = s.choice.k;
    if (s.choice.dim > 0) {
      chosen["dim"] = s.choice.dim;
      chosen["epochs"] = s.choice.epochs;
    }
    chosen["tuning_rmse"] = s.choice.tuning_rmse;
    m["chosen"] = chosen;
    m["per_fold"] = s.per_fold;
    m["averaged"] = s.averaged;
    m["pooled"] = s.pooled;
    j["models"].push_back(m);
  }
  if (has_hybrid) {
    ordered_json h;
    h["weights"] = ordered_json::array();
    for (std::size_t i = 0; i < weights.names.size(); ++i) {
      h["weights"].push_back({{"name", weights.names[i]}, {"alpha", weights.alpha[i]}});
    }
    h["tuning_rmse"] = hybrid_tuning_rmse;
    h["per_fold"] = hybrid.per_fold;
    h["averaged"] = hybrid.averaged;
    h["pooled"] = hybrid.pooled;
    j["hybrid"] = h;
  } else {
    j["hybrid"] = nullptr;
  }
  j["baseline_global_mean"] = {{"per_fold", global_mean.per_fold},
                               {"averaged", global_mean.averaged},
                               {"pooled", global_mean.pooled}};
  ordered_json rounds = ordered_json::array();
  for (std::size_t f = 0; f < round_test_events.size(); ++f) {
    rounds.push_back({{"train_events", round_train_events[f].size()},
                      {"test_events", round_test_events[f].size()}});
  }
  j["protocol"] = {{"rounds", rounds}};
  return j.dump(2) + "\n";
}

std::string EvalReport::to_table() const {
  std::ostringstream out;
  out << "model  chosen                         tuning";
  for (int k : ks) out << "    k=" << k << (k < 10 ? "  " : k < 100 ? " " : "");
  out << "\n";
  for (const SeriesReport& s : models) {
    char chosen[40];
    if (s.choice.dim > 0) {
      std::snprintf(chosen, sizeof(chosen), "k=%-3d dim=%-3d epochs=%-3d", s.choice.k,
                    s.choice.dim, s.choice.epochs);
    } else {
      std::snprintf(chosen, sizeof(chosen), "k=%-3d                  ", s.choice.k);
    }
    out << s.name << "   " << chosen << "   " << fmt_rmse(s.choice.tuning_rmse);
    for (double v : s.averaged) out << "  " << fmt_rmse(v);
    out << "\n";
  }
  if (has_hybrid) {
    out << "HYBRID tuning rmse " << fmt_rmse(hybrid_tuning_rmse) << ", averaged "
        << fmt_rmse(hybrid.averaged) << ", pooled " << fmt_rmse(hybrid.pooled) << "\n";
    out << "weights:";
    for (std::size_t i = 0; i < weights.names.size(); ++i) {
      char buf[48];
      std::snprintf(buf, sizeof(buf), " %s=%.3f", weights.names[i].c_str(), weights.alpha[i]);
      out << buf;
    }
    out << "\n";
  }
  out << "GLOBAL_MEAN baseline averaged " << fmt_rmse(global_mean.averaged) << ", pooled "
      << fmt_rmse(global_mean.pooled) << "\n";
  out << "test pairs: " << n_test_pairs << "\n";
  return out.str();
}

}  // namespace reprrec
