#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "reprrec/ratings.hpp"
#include "reprrec/vectorspace.hpp"

namespace reprrec {

enum class PredictTarget { UserBased, ItemBased };
enum class SimilaritySource { RatingVectors, Embeddings };

// Chain order on an empty neighborhood: item mean, then user mean, then global mean.
enum class Fallback { None, GlobalMean, UserMean, ItemMean };

const char* fallback_name(Fallback f);

struct PredictorSpec {
  PredictTarget target = PredictTarget::UserBased;
  SimilaritySource source = SimilaritySource::RatingVectors;
  const RepresentationStore* embeddings = nullptr;  // required when source == Embeddings
  int k = 5;
  // true: restrict to qualifying raters first, then truncate to the k most similar;
  // false: take the k most similar overall, then drop the ones that do not qualify.
  bool filter_first = true;

  void validate() const;
};

struct Prediction {
  double value = 0.0;
  int neighborhood_used = 0;
  Fallback fallback = Fallback::None;
};

// Cosine between two users (spec.target UserBased) or two items (ItemBased),
// over rating vectors or embeddings per spec.source. Throws Error when an
// entity is unknown to the chosen source or has a zero-norm vector.
double similarity(const EntityToken& a, const EntityToken& b, const PredictorSpec& spec,
                  const RatingsStore& ratings);

// Similarity to the query entity, keyed by the candidate's id in the ratings
// store. Both similarity sources reduce to one of these, so the neighborhood
// logic below is the single shared code path.
using SimilarityFn = std::function<double(int)>;

Prediction predict_user_based_with(int uid, int iid, const SimilarityFn& sim, int k,
                                   bool filter_first, const RatingsStore& ratings);
Prediction predict_item_based_with(int uid, int iid, const SimilarityFn& sim, int k,
                                   bool filter_first, const RatingsStore& ratings);

// Similarity-weighted neighborhood predictions. Throw Error on unknown user or
// item; an unqueryable query entity degrades to the fallback chain instead.
Prediction predict_user_based(const EntityToken& user, const EntityToken& item,
                              const PredictorSpec& spec, const RatingsStore& ratings);
Prediction predict_item_based(const EntityToken& user, const EntityToken& item,
                              const PredictorSpec& spec, const RatingsStore& ratings);
Prediction predict(const EntityToken& user, const EntityToken& item, const PredictorSpec& spec,
                   const RatingsStore& ratings);

// Element-wise predict with order preserved. Per-pair failures are logged and
// downgraded to fallback predictions; the batch never aborts.
std::vector<Prediction> predict_batch(std::span<const std::pair<EntityToken, EntityToken>> pairs,
                                      const PredictorSpec& spec, const RatingsStore& ratings);

}  // namespace reprrec
