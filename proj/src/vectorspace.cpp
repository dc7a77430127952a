#include "reprrec/vectorspace.hpp"

#include <algorithm>
#include <cmath>

namespace reprrec {

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("cosine: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw Error("cosine: zero vector");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

void RepresentationStore::add(EntityToken token, std::vector<double> vec) {
  if (static_cast<int>(vec.size()) != dim_) {
    throw Error("representation for '" + token.canonical() + "' has " +
                std::to_string(vec.size()) + " components, expected " + std::to_string(dim_));
  }
  auto [it, inserted] = index_.emplace(token, static_cast<int>(entries_.size()));
  if (!inserted) throw Error("duplicate token '" + token.canonical() + "'");
  double sq = 0.0;
  for (double x : vec) sq += x * x;
  entries_.push_back({std::move(token), std::move(vec), std::sqrt(sq)});
}

const StoreEntry* RepresentationStore::find(const EntityToken& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

bool RepresentationStore::queryable(const EntityToken& token) const {
  const StoreEntry* e = find(token);
  return e != nullptr && e->norm > 0.0;
}

std::vector<Neighbor> nearest(const RepresentationStore& store, std::span<const double> query,
                              int k, std::optional<EntityKind> filter,
                              const std::unordered_set<EntityToken>& exclude) {
  if (k < 1) throw Error("nearest: k must be >= 1");
  if (static_cast<int>(query.size()) != store.dim()) throw Error("nearest: dimension mismatch");
  double qsq = 0.0;
  for (double x : query) qsq += x * x;
  if (qsq == 0.0) throw Error("nearest: zero query vector");
  const double qnorm = std::sqrt(qsq);

  std::vector<Neighbor> hits;
  for (const auto& e : store.entries()) {
    if (e.norm == 0.0) continue;
    if (filter && e.token.kind != *filter) continue;
    if (exclude.contains(e.token)) continue;
    double dot = 0.0;
    for (std::size_t i = 0; i < query.size(); ++i) dot += query[i] * e.vec[i];
    hits.push_back({e.token, dot / (qnorm * e.norm)});
  }
  std::sort(hits.begin(), hits.end(), [](const Neighbor& a, const Neighbor& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.token < b.token;
  });
  if (static_cast<int>(hits.size()) > k) hits.resize(k);
  return hits;
}

CombineResult combine(const ArithmeticQuery& query, const RepresentationStore& store) {
  if (query.plus.empty()) throw Error("combine: plus operands must be non-empty");
  if (query.k < 1) throw Error("combine: k must be >= 1");

  std::vector<double> result(store.dim(), 0.0);
  auto apply = [&](const EntityToken& token, double sign) {
    const StoreEntry* e = store.find(token);
    if (e == nullptr) throw Error("unknown token '" + token.canonical() + "'");
    if (e->norm == 0.0) throw Error("token '" + token.canonical() + "' has a zero vector");
    for (std::size_t i = 0; i < result.size(); ++i) result[i] += sign * e->vec[i] / e->norm;
  };
  for (const auto& t : query.plus) apply(t, 1.0);
  for (const auto& t : query.minus) apply(t, -1.0);

  double sq = 0.0;
  for (double x : result) sq += x * x;
  if (sq < 1e-24) throw Error("combine: operands cancel to a zero vector");

  std::unordered_set<EntityToken> exclude;
  if (query.exclude_operands) {
    exclude.insert(query.plus.begin(), query.plus.end());
    exclude.insert(query.minus.begin(), query.minus.end());
  }
  auto neighbors = nearest(store, result, query.k, query.filter, exclude);
  return {std::move(result), std::move(neighbors)};
}

}  // namespace reprrec
