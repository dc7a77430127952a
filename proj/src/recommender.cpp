#include "reprrec/recommender.hpp"

#include <algorithm>
#include <cmath>

#include "reprrec/error.hpp"
#include "reprrec/log.hpp"

namespace reprrec {

namespace {

struct Cand {
  double sim;
  int id;  // ids are canonical-sorted in the store, so id order == canonical order
  double rating;
};

void rank_and_truncate(std::vector<Cand>& cands, int k) {
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.sim != b.sim) return a.sim > b.sim;
    return a.id < b.id;
  });
  if (static_cast<int>(cands.size()) > k) cands.resize(k);
}

Prediction fallback_prediction(int uid, int iid, const RatingsStore& ratings) {
  Prediction p;
  if (iid >= 0) {
    if (auto m = ratings.item_mean(iid)) {
      p.value = ratings.scale().clamp(*m);
      p.fallback = Fallback::ItemMean;
      return p;
    }
  }
  if (uid >= 0) {
    if (auto m = ratings.user_mean(uid)) {
      p.value = ratings.scale().clamp(*m);
      p.fallback = Fallback::UserMean;
      return p;
    }
  }
  p.value = ratings.scale().clamp(ratings.global_mean());
  p.fallback = Fallback::GlobalMean;
  return p;
}

Prediction weighted_mean_or_fallback(const std::vector<Cand>& neighborhood, int uid, int iid,
                                     const RatingsStore& ratings) {
  if (neighborhood.empty()) return fallback_prediction(uid, iid, ratings);
  double num = 0.0, den = 0.0;
  for (const Cand& c : neighborhood) {
    num += c.sim * c.rating;
    den += c.sim;
  }
  Prediction p;
  p.value = ratings.scale().clamp(num / den);
  p.neighborhood_used = static_cast<int>(neighborhood.size());
  p.fallback = Fallback::None;
  return p;
}

// k most similar candidates among all ids in [0, n) except self, sim > 0
std::vector<std::pair<double, int>> top_k_overall(int self, int n, const SimilarityFn& sim,
                                                  int k) {
  std::vector<std::pair<double, int>> ranked;
  for (int id = 0; id < n; ++id) {
    if (id == self) continue;
    double s = sim(id);
    if (s > 0.0) ranked.emplace_back(s, id);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  if (static_cast<int>(ranked.size()) > k) ranked.resize(k);
  return ranked;
}

double cosine_rows(std::span<const std::pair<int, double>> a, double na,
                   std::span<const std::pair<int, double>> b, double nb) {
  if (na == 0.0 || nb == 0.0) return 0.0;
  return sparse_dot(a, b) / (na * nb);
}

// similarity of candidate users to user uid, via the spec's source; entities
// missing from an embedding store contribute similarity 0 (they simply never
// qualify as neighbors)
SimilarityFn user_similarity_fn(int uid, const PredictorSpec& spec, const RatingsStore& ratings) {
  if (spec.source == SimilaritySource::RatingVectors) {
    return [uid, &ratings](int other) {
      return cosine_rows(ratings.user_row(uid), ratings.user_norm(uid), ratings.user_row(other),
                         ratings.user_norm(other));
    };
  }
  const RepresentationStore* store = spec.embeddings;
  const StoreEntry* self = store->find(ratings.user_token(uid));
  if (!self || self->norm == 0.0) {
    return [](int) { return 0.0; };
  }
  return [self, store, &ratings](int other) {
    const StoreEntry* e = store->find(ratings.user_token(other));
    if (!e || e->norm == 0.0) return 0.0;
    double dot = 0.0;
    for (std::size_t d = 0; d < self->vec.size(); ++d) dot += self->vec[d] * e->vec[d];
    return dot / (self->norm * e->norm);
  };
}

SimilarityFn item_similarity_fn(int iid, const PredictorSpec& spec, const RatingsStore& ratings) {
  if (spec.source == SimilaritySource::RatingVectors) {
    return [iid, &ratings](int other) {
      return cosine_rows(ratings.item_col(iid), ratings.item_norm(iid), ratings.item_col(other),
                         ratings.item_norm(other));
    };
  }
  const RepresentationStore* store = spec.embeddings;
  const StoreEntry* self = store->find(ratings.item_token(iid));
  if (!self || self->norm == 0.0) {
    return [](int) { return 0.0; };
  }
  return [self, store, &ratings](int other) {
    const StoreEntry* e = store->find(ratings.item_token(other));
    if (!e || e->norm == 0.0) return 0.0;
    double dot = 0.0;
    for (std::size_t d = 0; d < self->vec.size(); ++d) dot += self->vec[d] * e->vec[d];
    return dot / (self->norm * e->norm);
  };
}

std::pair<int, int> resolve_pair(const EntityToken& user, const EntityToken& item,
                                 const RatingsStore& ratings) {
  int uid = ratings.user_id(user);
  if (uid < 0) throw Error("unknown user '" + user.canonical() + "'");
  int iid = ratings.item_id(item);
  if (iid < 0) throw Error("unknown item '" + item.canonical() + "'");
  return {uid, iid};
}

}  // namespace

const char* fallback_name(Fallback f) {
  switch (f) {
    case Fallback::None: return "none";
    case Fallback::GlobalMean: return "global_mean";
    case Fallback::UserMean: return "user_mean";
    case Fallback::ItemMean: return "item_mean";
  }
  return "none";
}

void PredictorSpec::validate() const {
  if (k <= 0) throw Error("neighborhood size k must be positive");
  if (source == SimilaritySource::Embeddings && embeddings == nullptr)
    throw Error("embedding-sourced predictor requires a representation store");
}

double similarity(const EntityToken& a, const EntityToken& b, const PredictorSpec& spec,
                  const RatingsStore& ratings) {
  spec.validate();
  if (spec.source == SimilaritySource::Embeddings) {
    const StoreEntry* ea = spec.embeddings->find(a);
    const StoreEntry* eb = spec.embeddings->find(b);
    if (!ea) throw Error("no embedding for '" + a.canonical() + "'");
    if (!eb) throw Error("no embedding for '" + b.canonical() + "'");
    return cosine(ea->vec, eb->vec);
  }
  if (spec.target == PredictTarget::UserBased) {
    int ia = ratings.user_id(a), ib = ratings.user_id(b);
    if (ia < 0) throw Error("unknown user '" + a.canonical() + "'");
    if (ib < 0) throw Error("unknown user '" + b.canonical() + "'");
    if (ratings.user_norm(ia) == 0.0) throw Error("user '" + a.canonical() + "' has a zero rating vector");
    if (ratings.user_norm(ib) == 0.0) throw Error("user '" + b.canonical() + "' has a zero rating vector");
    return cosine_rows(ratings.user_row(ia), ratings.user_norm(ia), ratings.user_row(ib),
                       ratings.user_norm(ib));
  }
  int ia = ratings.item_id(a), ib = ratings.item_id(b);
  if (ia < 0) throw Error("unknown item '" + a.canonical() + "'");
  if (ib < 0) throw Error("unknown item '" + b.canonical() + "'");
  if (ratings.item_norm(ia) == 0.0) throw Error("item '" + a.canonical() + "' has a zero rating vector");
  if (ratings.item_norm(ib) == 0.0) throw Error("item '" + b.canonical() + "' has a zero rating vector");
  return cosine_rows(ratings.item_col(ia), ratings.item_norm(ia), ratings.item_col(ib),
                     ratings.item_norm(ib));
}

Prediction predict_user_based_with(int uid, int iid, const SimilarityFn& sim, int k,
                                   bool filter_first, const RatingsStore& ratings) {
  std::vector<Cand> neigh;
  if (filter_first) {
    // every rater of the item is eligible; rank those
    for (const auto& [nuid, r] : ratings.item_col(iid)) {
      if (nuid == uid) continue;
      double s = sim(nuid);
      if (s > 0.0) neigh.push_back({s, nuid, r});
    }
    rank_and_truncate(neigh, k);
  } else {
    // rank all users first, then keep the top-k members that rated the item
    for (const auto& [s, nuid] : top_k_overall(uid, ratings.n_users(), sim, k)) {
      if (auto r = ratings.rating(nuid, iid)) neigh.push_back({s, nuid, *r});
    }
  }
  return weighted_mean_or_fallback(neigh, uid, iid, ratings);
}

Prediction predict_item_based_with(int uid, int iid, const SimilarityFn& sim, int k,
                                   bool filter_first, const RatingsStore& ratings) {
  std::vector<Cand> neigh;
  if (filter_first) {
    for (const auto& [niid, r] : ratings.user_row(uid)) {
      if (niid == iid) continue;
      double s = sim(niid);
      if (s > 0.0) neigh.push_back({s, niid, r});
    }
    rank_and_truncate(neigh, k);
  } else {
    for (const auto& [s, niid] : top_k_overall(iid, ratings.n_items(), sim, k)) {
      if (auto r = ratings.rating(uid, niid)) neigh.push_back({s, niid, *r});
    }
  }
  return weighted_mean_or_fallback(neigh, uid, iid, ratings);
}

Prediction predict_user_based(const EntityToken& user, const EntityToken& item,
                              const PredictorSpec& spec, const RatingsStore& ratings) {
  spec.validate();
  if (spec.target != PredictTarget::UserBased) throw Error("predictor target is not user-based");
  auto [uid, iid] = resolve_pair(user, item, ratings);
  return predict_user_based_with(uid, iid, user_similarity_fn(uid, spec, ratings), spec.k,
                                 spec.filter_first, ratings);
}

Prediction predict_item_based(const EntityToken& user, const EntityToken& item,
                              const PredictorSpec& spec, const RatingsStore& ratings) {
  spec.validate();
  if (spec.target != PredictTarget::ItemBased) throw Error("predictor target is not item-based");
  auto [uid, iid] = resolve_pair(user, item, ratings);
  return predict_item_based_with(uid, iid, item_similarity_fn(iid, spec, ratings), spec.k,
                                 spec.filter_first, ratings);
}

Prediction predict(const EntityToken& user, const EntityToken& item, const PredictorSpec& spec,
                   const RatingsStore& ratings) {
  return spec.target == PredictTarget::UserBased ? predict_user_based(user, item, spec, ratings)
                                                 : predict_item_based(user, item, spec, ratings);
}

std::vector<Prediction> predict_batch(std::span<const std::pair<EntityToken, EntityToken>> pairs,
                                      const PredictorSpec& spec, const RatingsStore& ratings) {
  spec.validate();
  std::vector<Prediction> out;
  out.reserve(pairs.size());
  for (const auto& [user, item] : pairs) {
    try {
      out.push_back(predict(user, item, spec, ratings));
    } catch (const std::exception& e) {
      log::debug("prediction for (" + user.canonical() + ", " + item.canonical() +
                 ") fell back: " + e.what());
      out.push_back(
          fallback_prediction(ratings.user_id(user), ratings.item_id(item), ratings));
    }
  }
  return out;
}

}  // namespace reprrec
