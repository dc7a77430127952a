#include "reprrec/ratings.hpp"

#include <algorithm>
#include <cmath>

namespace reprrec {

RatingsStore::RatingsStore(std::span<const RatingRecord> records, RatingScale scale)
    : scale_(scale) {
  for (const auto& r : records) {
    if (!scale.contains(r.rating)) {
      throw Error("rating " + std::to_string(r.rating) + " for (" + r.user.canonical() + ", " +
                  r.movie.canonical() + ") outside scale");
    }
    if (user_index_.emplace(r.user, 0).second) users_.push_back(r.user);
    if (item_index_.emplace(r.movie, 0).second) items_.push_back(r.movie);
  }
  std::sort(users_.begin(), users_.end());
  std::sort(items_.begin(), items_.end());
  for (int i = 0; i < n_users(); ++i) user_index_[users_[i]] = i;
  for (int i = 0; i < n_items(); ++i) item_index_[items_[i]] = i;

  rows_.resize(users_.size());
  cols_.resize(items_.size());
  // duplicate (user, item) pairs: the later record wins
  std::unordered_map<std::int64_t, double> cells;
  cells.reserve(records.size());
  for (const auto& r : records) {
    int uid = user_index_[r.user];
    int iid = item_index_[r.movie];
    cells[static_cast<std::int64_t>(uid) * n_items() + iid] = r.rating;
  }
  for (const auto& [cell, rating] : cells) {
    int uid = static_cast<int>(cell / n_items());
    int iid = static_cast<int>(cell % n_items());
    rows_[uid].emplace_back(iid, rating);
    cols_[iid].emplace_back(uid, rating);
    ++n_ratings_;
  }
  for (auto& row : rows_) std::sort(row.begin(), row.end());
  for (auto& col : cols_) std::sort(col.begin(), col.end());

  double total = 0.0;  // accumulate in sorted order so the sum is order-independent
  for (const auto& row : rows_) {
    for (const auto& [id, r] : row) total += r;
  }

  auto norm_of = [](const std::vector<std::pair<int, double>>& v) {
    double sq = 0.0;
    for (const auto& [id, r] : v) sq += r * r;
    return std::sqrt(sq);
  };
  row_norm_.resize(rows_.size());
  col_norm_.resize(cols_.size());
  for (std::size_t i = 0; i < rows_.size(); ++i) row_norm_[i] = norm_of(rows_[i]);
  for (std::size_t i = 0; i < cols_.size(); ++i) col_norm_[i] = norm_of(cols_[i]);

  global_mean_ = n_ratings_ > 0 ? total / static_cast<double>(n_ratings_) : scale.midpoint();
}

int RatingsStore::user_id(const EntityToken& user) const {
  auto it = user_index_.find(user);
  return it == user_index_.end() ? -1 : it->second;
}

int RatingsStore::item_id(const EntityToken& item) const {
  auto it = item_index_.find(item);
  return it == item_index_.end() ? -1 : it->second;
}

std::optional<double> RatingsStore::rating(int uid, int iid) const {
  const auto& row = rows_[uid];
  auto it = std::lower_bound(row.begin(), row.end(), iid,
                             [](const std::pair<int, double>& e, int id) { return e.first < id; });
  if (it == row.end() || it->first != iid) return std::nullopt;
  return it->second;
}

std::optional<double> RatingsStore::user_mean(int uid) const {
  if (rows_[uid].empty()) return std::nullopt;
  double total = 0.0;
  for (const auto& [id, r] : rows_[uid]) total += r;
  return total / static_cast<double>(rows_[uid].size());
}

std::optional<double> RatingsStore::item_mean(int iid) const {
  if (cols_[iid].empty()) return std::nullopt;
  double total = 0.0;
  for (const auto& [id, r] : cols_[iid]) total += r;
  return total / static_cast<double>(cols_[iid].size());
}

double sparse_dot(std::span<const std::pair<int, double>> a,
                  std::span<const std::pair<int, double>> b) {
  double dot = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      ++i;
    } else if (a[i].first > b[j].first) {
      ++j;
    } else {
      dot += a[i].second * b[j].second;
      ++i;
      ++j;
    }
  }
  return dot;
}

}  // namespace reprrec
