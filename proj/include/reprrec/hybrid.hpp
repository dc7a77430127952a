#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "reprrec/corpus.hpp"

namespace reprrec {

// Non-negative blend coefficients over named component recommenders, summing
// to one (within 1e-9).
struct HybridWeights {
  std::vector<std::string> names;
  std::vector<double> alpha;

  void validate() const;

  // flat key-value text: "UBCF = 0.032" per line
  void save(std::ostream& out) const;
  static HybridWeights load(std::istream& in);
};

// weighted sum of component predictions, clamped to the rating scale
double blend(std::span<const double> components, const HybridWeights& weights, RatingScale scale);

// Euclidean projection onto the probability simplex
std::vector<double> project_to_simplex(std::vector<double> v);

struct FitResult {
  HybridWeights weights;
  double rmse;  // RMSE of the unclamped blend on the fitting rows
};

// Least-squares weight fit over the simplex: projected gradient (tolerance
// 1e-8 on the gradient mapping, at most 10000 iterations, 1e-12 ridge toward
// the uniform point to break flat ties) followed by an exact active-set solve
// on the identified support, kept only when it strictly improves the
// objective. rows[t] holds one prediction per component; truths[t] the rating.
FitResult fit_weights(const std::vector<std::vector<double>>& rows,
                      const std::vector<double>& truths, std::vector<std::string> names);

}  // namespace reprrec
