#pragma once

#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "reprrec/corpus.hpp"

namespace reprrec {

// Sparse user x item rating matrix with both row (user over items) and column
// (item over users) views. Immutable once built; ids are canonical-sorted so
// identical input sets produce identical stores regardless of record order.
class RatingsStore {
 public:
  RatingsStore(std::span<const RatingRecord> records, RatingScale scale);

  int n_users() const { return static_cast<int>(users_.size()); }
  int n_items() const { return static_cast<int>(items_.size()); }
  std::int64_t n_ratings() const { return n_ratings_; }
  RatingScale scale() const { return scale_; }

  int user_id(const EntityToken& user) const;  // -1 when unknown
  int item_id(const EntityToken& item) const;
  const EntityToken& user_token(int uid) const { return users_[uid]; }
  const EntityToken& item_token(int iid) const { return items_[iid]; }

  // entries sorted by the other side's id
  std::span<const std::pair<int, double>> user_row(int uid) const { return rows_[uid]; }
  std::span<const std::pair<int, double>> item_col(int iid) const { return cols_[iid]; }
  double user_norm(int uid) const { return row_norm_[uid]; }
  double item_norm(int iid) const { return col_norm_[iid]; }

  std::optional<double> rating(int uid, int iid) const;

  // scale midpoint when the store is empty
  double global_mean() const { return global_mean_; }
  std::optional<double> user_mean(int uid) const;
  std::optional<double> item_mean(int iid) const;

 private:
  RatingScale scale_;
  std::vector<EntityToken> users_, items_;
  std::unordered_map<EntityToken, int> user_index_, item_index_;
  std::vector<std::vector<std::pair<int, double>>> rows_, cols_;
  std::vector<double> row_norm_, col_norm_;
  double global_mean_ = 0.0;
  std::int64_t n_ratings_ = 0;
};

// dot over the shared dimensions of two sorted sparse vectors
double sparse_dot(std::span<const std::pair<int, double>> a,
                  std::span<const std::pair<int, double>> b);

}  // namespace reprrec
