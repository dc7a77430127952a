#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "reprrec/entity.hpp"
#include "reprrec/error.hpp"

namespace reprrec {

double cosine(std::span<const double> a, std::span<const double> b);  // throws on zero vector

struct StoreEntry {
  EntityToken token;
  std::vector<double> vec;
  double norm = 0.0;  // L2; zero-norm entries are unqueryable
};

// Immutable after load; queries are read-only and safe to run concurrently.
class RepresentationStore {
 public:
  explicit RepresentationStore(int dim) : dim_(dim) {}

  void add(EntityToken token, std::vector<double> vec);  // throws on duplicate/shape
  int dim() const { return dim_; }
  int size() const { return static_cast<int>(entries_.size()); }
  std::span<const StoreEntry> entries() const { return entries_; }

  const StoreEntry* find(const EntityToken& token) const;
  bool queryable(const EntityToken& token) const;

 private:
  int dim_;
  std::vector<StoreEntry> entries_;
  std::unordered_map<EntityToken, int> index_;
};

struct Neighbor {
  EntityToken token;
  double similarity;
};

// Brute-force scan ranked by descending cosine, ties by canonical string.
// Zero-norm entries never qualify.
std::vector<Neighbor> nearest(const RepresentationStore& store, std::span<const double> query,
                              int k, std::optional<EntityKind> filter = std::nullopt,
                              const std::unordered_set<EntityToken>& exclude = {});

struct ArithmeticQuery {
  std::vector<EntityToken> plus;   // non-empty
  std::vector<EntityToken> minus;
  std::optional<EntityKind> filter;
  int k = 5;
  bool exclude_operands = true;
};

struct CombineResult {
  std::vector<double> vector;
  std::vector<Neighbor> neighbors;
};

// result = sum of normalized plus operands minus sum of normalized minus
// operands; throws when an operand is unknown or the result degenerates to zero
CombineResult combine(const ArithmeticQuery& query, const RepresentationStore& store);

}  // namespace reprrec
