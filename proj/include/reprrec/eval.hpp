#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reprrec/corpus.hpp"
#include "reprrec/embedding.hpp"
#include "reprrec/hybrid.hpp"
#include "reprrec/ratings.hpp"
#include "reprrec/recommender.hpp"

namespace reprrec {

// The six predictors: rating-vector CF plus the CBOW/Skip-gram infused
// variants on either side.
enum class ModelId { UBCF, IBCF, UBCB, UBSG, IBCB, IBSG };

const char* model_name(ModelId m);
std::optional<ModelId> parse_model_id(const std::string& name);
PredictTarget model_target(ModelId m);
SimilaritySource model_source(ModelId m);
// CBOW for *CB, Skip-gram for *SG; meaningless for UBCF/IBCF
ModelKind model_embedding_kind(ModelId m);
bool model_uses_embeddings(ModelId m);

struct Dataset {
  std::vector<RatingRecord> ratings;
  std::vector<TagRecord> tags;
  std::vector<ItemMetadata> metadata;
  RatingScale scale;
};

// Per-event fold labels (0..4, fold 4 is the tuning fold). Events are indexed
// by position in the rating list handed to partition().
struct FoldAssignment {
  static constexpr int kFolds = 5;
  static constexpr int kTuningFold = kFolds - 1;

  std::uint64_t seed = 0;
  std::vector<int> fold_of;

  // event indices with the given fold label, ascending
  std::vector<std::size_t> events_in_fold(int fold) const;
  // event indices whose label is in [0, kTuningFold) and != excluded_fold
  std::vector<std::size_t> training_events(int excluded_fold) const;
};

// Per user: seeded shuffle of the user's events, then a round-robin deal
// starting at a seeded fold offset, so fold sizes differ by at most one.
FoldAssignment partition(std::span<const RatingRecord> events, std::uint64_t seed);

// root of the mean squared prediction error; throws on empty or mismatched lists
double rmse(std::span<const double> predictions, std::span<const double> truths);

// The sentence corpus an evaluation round may train embeddings on: exactly
// one sentence per listed rating event. Tags ride along only when their
// (user, movie) pair is among those events, so test-fold pairs never leak in.
std::vector<Sentence> sentences_for_events(const Dataset& data,
                                           std::span<const std::size_t> event_ids,
                                           int max_actors);

struct EvalConfig {
  std::vector<ModelId> models{ModelId::UBCF, ModelId::IBCF, ModelId::UBCB,
                              ModelId::UBSG, ModelId::IBCB, ModelId::IBSG};
  std::vector<int> ks{5, 10, 20, 50, 100};
  std::vector<int> dims{100};
  std::vector<int> epoch_grid{5};
  int window = 10;
  int negatives = 5;
  std::int64_t min_count = 1;
  int max_actors = 5;
  LossKind loss = LossKind::NegativeSampling;
  std::uint64_t seed = 1;
  int workers = 1;
  bool include_hybrid = true;
  bool filter_first = true;

  void validate() const;
};

struct ModelChoice {
  ModelId model;
  int k = 0;
  int dim = 0;     // 0 for the rating-vector models
  int epochs = 0;  // likewise
  double tuning_rmse = 0.0;
};

struct TuneResult {
  std::vector<ModelChoice> choices;  // parallel to config.models
  HybridWeights weights;             // fitted on the tuning fold; empty when hybrid disabled
  double hybrid_tuning_rmse = 0.0;
  bool has_hybrid = false;
  // audit trail for protocol checks
  std::vector<std::size_t> train_events;   // folds 0..3
  std::vector<std::size_t> tuning_events;  // fold 4
};

// Trains candidates on folds 0..3, scores them on the tuning fold, returns
// per-model argmin configurations (grid ties broken by enumeration order:
// dims, then epochs, then ks) plus hybrid weights fitted at those choices.
TuneResult tune(const Dataset& data, const FoldAssignment& assignment, const EvalConfig& config);

struct SeriesReport {
  std::string name;
  ModelChoice choice;
  std::vector<std::vector<double>> per_fold;  // [round][k index]
  std::vector<double> averaged;               // mean of per-fold, per k
  std::vector<double> pooled;                 // single RMSE over all rounds' residuals, per k
};

struct ScalarSeries {
  std::vector<double> per_fold;
  double averaged = 0.0;
  double pooled = 0.0;
};

struct EvalReport {
  std::vector<int> ks;
  std::vector<SeriesReport> models;
  bool has_hybrid = false;
  HybridWeights weights;
  double hybrid_tuning_rmse = 0.0;
  ScalarSeries hybrid;       // components at their chosen configurations
  ScalarSeries global_mean;  // constant-prediction baseline, reported alongside
  std::int64_t n_test_pairs = 0;
  // audit trail: event indices per cross-validation round
  std::vector<std::vector<std::size_t>> round_train_events;
  std::vector<std::vector<std::size_t>> round_test_events;

  std::string to_json() const;
  std::string to_table() const;
};

// Four rounds over folds 0..3 (fold 4 stays discarded): train ratings and the
// embedding sentence corpus come from the three training folds only, the
// remaining fold is scored at every k in config.ks per model, plus one hybrid
// and one global-mean figure per round.
EvalReport cross_validate(const Dataset& data, const FoldAssignment& assignment,
                          const TuneResult& tuned, const EvalConfig& config);

// partition + tune + cross_validate under config.seed
EvalReport evaluate(const Dataset& data, const EvalConfig& config);

}  // namespace reprrec
