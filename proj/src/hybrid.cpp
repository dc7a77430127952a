#include "reprrec/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>

#include "reprrec/error.hpp"

namespace reprrec {

namespace {

constexpr double kRidge = 1e-12;
constexpr double kGradTol = 1e-8;
constexpr int kMaxIters = 10000;

std::string trimmed(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// solve A x = b in place by Gaussian elimination with partial pivoting;
// false when A is numerically singular
bool solve_linear(std::vector<std::vector<double>>& a, std::vector<double>& b,
                  std::vector<double>& x) {
  int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < 1e-300) return false;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (int r = col + 1; r < n; ++r) {
      double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  x.assign(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return true;
}

}  // namespace

void HybridWeights::validate() const {
  if (names.size() != alpha.size())
    throw Error("hybrid weights: component name/value count mismatch");
  if (alpha.empty()) throw Error("hybrid weights: no components");
  double sum = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (!(alpha[i] >= 0.0))
      throw Error("hybrid weights: negative weight for '" + names[i] + "'");
    sum += alpha[i];
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw Error("hybrid weights: weights sum to " + std::to_string(sum) + ", expected 1");
}

void HybridWeights::save(std::ostream& out) const {
  validate();
  char buf[64];
  for (std::size_t i = 0; i < names.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.12g", alpha[i]);
    out << names[i] << " = " << buf << '\n';
  }
}

HybridWeights HybridWeights::load(std::istream& in) {
  HybridWeights w;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = trimmed(line);
    if (s.empty()) continue;
    std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected 'NAME = value'", line_no);
    std::string name = trimmed(s.substr(0, eq));
    std::string value = trimmed(s.substr(eq + 1));
    if (name.empty()) throw ParseError("empty component name", line_no);
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      throw ParseError("invalid weight value '" + value + "'", line_no);
    }
    if (used != value.size()) throw ParseError("invalid weight value '" + value + "'", line_no);
    w.names.push_back(name);
    w.alpha.push_back(v);
  }
  w.validate();
  return w;
}

double blend(std::span<const double> components, const HybridWeights& weights, RatingScale scale) {
  weights.validate();
  if (components.size() != weights.alpha.size())
    throw Error("blend: " + std::to_string(components.size()) + " component predictions for " +
                std::to_string(weights.alpha.size()) + " weights");
  double s = 0.0;
  for (std::size_t i = 0; i < components.size(); ++i) s += weights.alpha[i] * components[i];
  return scale.clamp(s);
}

std::vector<double> project_to_simplex(std::vector<double> v) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cum += u[i];
    double t = (cum - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  for (double& x : v) x = std::max(x - theta, 0.0);
  return v;
}

FitResult fit_weights(const std::vector<std::vector<double>>& rows,
                      const std::vector<double>& truths, std::vector<std::string> names) {
  const std::size_t n = rows.size();
  if (n == 0) throw Error("fit_weights: no tuning rows");
  if (truths.size() != n) throw Error("fit_weights: row/truth count mismatch");
  const std::size_t m = rows[0].size();
  if (m == 0) throw Error("fit_weights: no components");
  for (const auto& row : rows) {
    if (row.size() != m) throw Error("fit_weights: ragged prediction rows");
  }
  if (names.size() != m) throw Error("fit_weights: component name count mismatch");

  auto pure_rmse = [&](const std::vector<double>& alpha) {
    double se = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      double p = 0.0;
      for (std::size_t j = 0; j < m; ++j) p += rows[t][j] * alpha[j];
      double d = p - truths[t];
      se += d * d;
    }
    return std::sqrt(se / static_cast<double>(n));
  };

  if (m == 1) {
    std::vector<double> one{1.0};
    return {HybridWeights{std::move(names), one}, pure_rmse(one)};
  }

  // f(a) = (1/n)|Xa - y|^2 + ridge*|a - u|^2, grad = H a - c
  const double uniform = 1.0 / static_cast<double>(m);
  std::vector<std::vector<double>> h(m, std::vector<double>(m, 0.0));
  std::vector<double> c(m, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t i = 0; i < m; ++i) {
      c[i] += 2.0 * rows[t][i] * truths[t] / static_cast<double>(n);
      for (std::size_t j = 0; j < m; ++j)
        h[i][j] += 2.0 * rows[t][i] * rows[t][j] / static_cast<double>(n);
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    h[i][i] += 2.0 * kRidge;
    c[i] += 2.0 * kRidge * uniform;
  }

  auto objective = [&](const std::vector<double>& alpha) {
    double f = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      double p = 0.0;
      for (std::size_t j = 0; j < m; ++j) p += rows[t][j] * alpha[j];
      double d = p - truths[t];
      f += d * d / static_cast<double>(n);
    }
    for (std::size_t j = 0; j < m; ++j) {
      double d = alpha[j] - uniform;
      f += kRidge * d * d;
    }
    return f;
  };

  // Gershgorin bound on the largest Hessian eigenvalue fixes the step size
  double lips = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) row_sum += std::abs(h[i][j]);
    lips = std::max(lips, row_sum);
  }
  const double step = 1.0 / lips;

  std::vector<double> alpha(m, uniform);
  for (int iter = 0; iter < kMaxIters; ++iter) {
    std::vector<double> trial(m);
    for (std::size_t i = 0; i < m; ++i) {
      double g = -c[i];
      for (std::size_t j = 0; j < m; ++j) g += h[i][j] * alpha[j];
      trial[i] = alpha[i] - step * g;
    }
    trial = project_to_simplex(std::move(trial));
    double moved = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double d = trial[i] - alpha[i];
      moved += d * d;
    }
    alpha = std::move(trial);
    if (std::sqrt(moved) / step <= kGradTol) break;
  }

  // Exact equality-constrained solve on the support found by the projected
  // gradient; negative coordinates are dropped one at a time. Accepted only
  // when it strictly improves the (ridged) objective.
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < m; ++i) {
    if (alpha[i] > 1e-10) support.push_back(i);
  }
  if (support.empty()) {
    support.resize(m);
    std::iota(support.begin(), support.end(), 0);
  }
  while (support.size() >= 1) {
    const std::size_t s = support.size();
    std::vector<double> beta;
    if (s == 1) {
      beta.assign(1, 1.0);
    } else {
      std::vector<std::vector<double>> kkt(s + 1, std::vector<double>(s + 1, 0.0));
      std::vector<double> rhs(s + 1, 0.0);
      for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t j = 0; j < s; ++j) kkt[i][j] = h[support[i]][support[j]];
        kkt[i][s] = 1.0;
        kkt[s][i] = 1.0;
        rhs[i] = c[support[i]];
      }
      rhs[s] = 1.0;
      std::vector<double> sol;
      if (!solve_linear(kkt, rhs, sol)) break;
      beta.assign(sol.begin(), sol.begin() + s);
    }
    double lowest = *std::min_element(beta.begin(), beta.end());
    if (lowest < -1e-12) {
      std::size_t worst = std::min_element(beta.begin(), beta.end()) - beta.begin();
      support.erase(support.begin() + worst);
      continue;
    }
    std::vector<double> polished(m, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
      polished[support[i]] = std::max(beta[i], 0.0);
      total += polished[support[i]];
    }
    for (double& x : polished) x /= total;
    // accept only a strict improvement beyond rounding noise: on flat
    // (tied) objectives the KKT system is nearly singular and its solution
    // would drift off the uniform tie-break point
    double obj_alpha = objective(alpha);
    if (objective(polished) < obj_alpha - 1e-14 * (1.0 + std::abs(obj_alpha))) {
      alpha = std::move(polished);
    }
    break;
  }

  // Never return worse than the best single component: order candidates by
  // data misfit first, ridge distance from uniform as the tie-break.
  auto pure_mse = [&](const std::vector<double>& a) {
    double se = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      double p = 0.0;
      for (std::size_t j = 0; j < m; ++j) p += rows[t][j] * a[j];
      double d = p - truths[t];
      se += d * d;
    }
    return se / static_cast<double>(n);
  };
  auto ridge_term = [&](const std::vector<double>& a) {
    double r = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      double d = a[j] - uniform;
      r += d * d;
    }
    return r;
  };
  double best_mse = pure_mse(alpha);
  double best_ridge = ridge_term(alpha);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> vertex(m, 0.0);
    vertex[j] = 1.0;
    double mse = pure_mse(vertex);
    double rid = ridge_term(vertex);
    if (mse < best_mse || (mse == best_mse && rid < best_ridge)) {
      best_mse = mse;
      best_ridge = rid;
      alpha = std::move(vertex);
    }
  }

  double fitted_rmse = pure_rmse(alpha);
  HybridWeights w{std::move(names), std::move(alpha)};
  w.validate();
  return {std::move(w), fitted_rmse};
}

}  // namespace reprrec
