#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "reprrec/corpus.hpp"
#include "reprrec/error.hpp"
#include "reprrec/hybrid.hpp"

using namespace reprrec;

namespace {

const RatingScale kScale{};  // 0.5 .. 5.0

double oracle_rmse(const std::vector<std::vector<double>>& rows, const std::vector<double>& truths,
                   const std::vector<double>& alpha) {
  double se = 0.0;
  for (std::size_t t = 0; t < rows.size(); ++t) {
    double p = 0.0;
    for (std::size_t j = 0; j < alpha.size(); ++j) p += rows[t][j] * alpha[j];
    se += (p - truths[t]) * (p - truths[t]);
  }
  return std::sqrt(se / static_cast<double>(rows.size()));
}

}  // namespace

TEST_CASE("blend with all weight on one component returns that component exactly") {
  HybridWeights w{{"A", "B", "C"}, {0.0, 1.0, 0.0}};
  std::vector<double> preds{1.5, 3.25, 4.75};
  CHECK(blend(preds, w, kScale) == 3.25);
}

TEST_CASE("blend of identical component predictions returns that prediction") {
  HybridWeights w{{"A", "B", "C"}, {0.2, 0.3, 0.5}};
  std::vector<double> preds{4.0, 4.0, 4.0};
  CHECK(blend(preds, w, kScale) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("blend reproduces the six-component hand-computed example") {
  HybridWeights w{{"UBCF", "IBCF", "UBCB", "UBSG", "IBCB", "IBSG"},
                  {0.032, 0.058, 0.144, 0.419, 0.122, 0.225}};
  std::vector<double> preds{3.0, 3.0, 3.0, 4.0, 3.0, 4.0};
  CHECK(blend(preds, w, kScale) == doctest::Approx(3.644).epsilon(1e-12));
}

TEST_CASE("blend is invariant under permutation of component/weight pairs") {
  HybridWeights w{{"A", "B", "C"}, {0.1, 0.6, 0.3}};
  std::vector<double> preds{2.0, 3.5, 4.5};
  double base = blend(preds, w, kScale);
  HybridWeights wp{{"C", "A", "B"}, {0.3, 0.1, 0.6}};
  std::vector<double> predsp{4.5, 2.0, 3.5};
  CHECK(blend(predsp, wp, kScale) == doctest::Approx(base).epsilon(1e-15));
}

TEST_CASE("blend clamps the weighted sum to the rating scale") {
  HybridWeights w{{"A"}, {1.0}};
  std::vector<double> high{9.0};
  std::vector<double> low{0.1};
  CHECK(blend(high, w, kScale) == 5.0);
  CHECK(blend(low, w, kScale) == 0.5);
}

TEST_CASE("blend rejects a component/weight count mismatch") {
  HybridWeights w{{"A", "B"}, {0.5, 0.5}};
  std::vector<double> preds{1.0, 2.0, 3.0};
  CHECK_THROWS_AS(blend(preds, w, kScale), Error);
}

TEST_CASE("blend validates the weights it is given") {
  HybridWeights bad_sum{{"A", "B"}, {0.5, 0.6}};
  HybridWeights negative{{"A", "B"}, {-0.1, 1.1}};
  std::vector<double> preds{1.0, 2.0};
  CHECK_THROWS_AS(blend(preds, bad_sum, kScale), Error);
  CHECK_THROWS_AS(blend(preds, negative, kScale), Error);
}

TEST_CASE("project_to_simplex matches hand-worked projections") {
  auto p1 = project_to_simplex({2.0, 0.0});
  CHECK(p1[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p1[1] == 0.0);

  auto p2 = project_to_simplex({0.6, 0.6});
  CHECK(p2[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p2[1] == doctest::Approx(0.5).epsilon(1e-15));

  auto p3 = project_to_simplex({-1.0, 1.0});
  CHECK(p3[0] == 0.0);
  CHECK(p3[1] == doctest::Approx(1.0).epsilon(1e-15));

  auto p4 = project_to_simplex({0.25, 0.25, 0.5});
  CHECK(p4[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(p4[1] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(p4[2] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("project_to_simplex always lands on the simplex") {
  std::vector<std::vector<double>> inputs{
      {3.0, -2.0, 0.5, 0.5}, {-1.0, -2.0, -3.0}, {100.0, 100.0}, {0.0, 0.0, 0.0}};
  for (auto& v : inputs) {
    auto p = project_to_simplex(v);
    double sum = 0.0;
    for (double x : p) {
      CHECK(x >= 0.0);
      sum += x;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("fit_weights recovers an exact 0.3/0.7 mixture") {
  std::vector<std::vector<double>> rows{{1.0, 5.0}, {2.0, 3.0}, {3.0, 1.0},
                                        {4.0, 2.0}, {5.0, 4.0}, {0.5, 4.5}};
  std::vector<double> truths;
  for (const auto& r : rows) truths.push_back(0.3 * r[0] + 0.7 * r[1]);
  FitResult fit = fit_weights(rows, truths, {"A", "B"});
  REQUIRE(fit.weights.alpha.size() == 2);
  CHECK(fit.weights.alpha[0] == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(fit.weights.alpha[1] == doctest::Approx(0.7).epsilon(1e-6));
  CHECK(fit.rmse < 1e-6);
  CHECK_NOTHROW(fit.weights.validate());
}

TEST_CASE("fit_weights breaks the tie between identical components toward uniform") {
  std::vector<std::vector<double>> rows{{3.0, 3.0}, {4.0, 4.0}, {2.5, 2.5}};
  std::vector<double> truths{3.1, 3.9, 2.4};
  FitResult fit = fit_weights(rows, truths, {"A", "B"});
  CHECK(fit.weights.alpha[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(fit.weights.alpha[1] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("fit_weights with a single component returns weight one") {
  std::vector<std::vector<double>> rows{{2.0}, {4.0}};
  std::vector<double> truths{2.5, 3.5};
  FitResult fit = fit_weights(rows, truths, {"ONLY"});
  REQUIRE(fit.weights.alpha.size() == 1);
  CHECK(fit.weights.alpha[0] == 1.0);
  CHECK(fit.rmse == doctest::Approx(oracle_rmse(rows, truths, {1.0})).epsilon(1e-15));
}

TEST_CASE("fit_weights rejects degenerate inputs") {
  CHECK_THROWS_AS(fit_weights({}, {}, {}), Error);
  CHECK_THROWS_AS(fit_weights({{1.0, 2.0}}, {1.0, 2.0}, {"A", "B"}), Error);
  CHECK_THROWS_AS(fit_weights({{1.0, 2.0}, {1.0}}, {1.0, 2.0}, {"A", "B"}), Error);
  CHECK_THROWS_AS(fit_weights({{1.0, 2.0}}, {1.0}, {"A"}), Error);
}

TEST_CASE("fitted rmse matches an independent recomputation of its own weights") {
  std::vector<std::vector<double>> rows{{3.0, 4.1, 2.2}, {2.5, 2.0, 3.8}, {4.8, 3.3, 3.0},
                                        {1.0, 2.6, 2.9}, {3.7, 4.4, 4.0}, {2.2, 1.8, 1.5}};
  std::vector<double> truths{3.5, 2.5, 4.0, 2.0, 4.5, 2.0};
  FitResult fit = fit_weights(rows, truths, {"A", "B", "C"});
  CHECK(fit.rmse == doctest::Approx(oracle_rmse(rows, truths, fit.weights.alpha)).epsilon(1e-12));
}

TEST_CASE("fitted rmse never exceeds the best single component") {
  std::vector<std::vector<double>> rows{{3.0, 4.1, 2.2}, {2.5, 2.0, 3.8}, {4.8, 3.3, 3.0},
                                        {1.0, 2.6, 2.9}, {3.7, 4.4, 4.0}, {2.2, 1.8, 1.5},
                                        {4.4, 5.0, 4.1}, {1.9, 1.1, 2.4}};
  std::vector<double> truths{3.5, 2.5, 4.0, 2.0, 4.5, 2.0, 4.8, 1.6};
  FitResult fit = fit_weights(rows, truths, {"A", "B", "C"});
  for (std::size_t j = 0; j < 3; ++j) {
    std::vector<double> vertex(3, 0.0);
    vertex[j] = 1.0;
    CHECK(fit.rmse <= oracle_rmse(rows, truths, vertex) + 1e-12);
  }
  CHECK_NOTHROW(fit.weights.validate());
}

TEST_CASE("weights save/load round-trips names and values") {
  HybridWeights w{{"UBCF", "IBCF", "UBCB", "UBSG", "IBCB", "IBSG"},
                  {0.032, 0.058, 0.144, 0.419, 0.122, 0.225}};
  std::stringstream ss;
  w.save(ss);
  HybridWeights back = HybridWeights::load(ss);
  REQUIRE(back.names == w.names);
  REQUIRE(back.alpha.size() == w.alpha.size());
  for (std::size_t i = 0; i < w.alpha.size(); ++i) {
    CHECK(back.alpha[i] == doctest::Approx(w.alpha[i]).epsilon(1e-9));
  }
}

TEST_CASE("weights file format is one 'NAME = value' line per component") {
  HybridWeights w{{"A", "B"}, {0.25, 0.75}};
  std::stringstream ss;
  w.save(ss);
  CHECK(ss.str() == "A = 0.25\nB = 0.75\n");
}

TEST_CASE("weights load tolerates blank lines and surrounding whitespace") {
  std::stringstream ss("\n  A =  0.25 \n\nB= 0.75\n");
  HybridWeights w = HybridWeights::load(ss);
  REQUIRE(w.names == std::vector<std::string>{"A", "B"});
  CHECK(w.alpha[0] == 0.25);
  CHECK(w.alpha[1] == 0.75);
}

TEST_CASE("weights load rejects malformed and invalid inputs") {
  {
    std::stringstream ss("A 0.5\n");
    CHECK_THROWS_AS(HybridWeights::load(ss), ParseError);
  }
  {
    std::stringstream ss("= 0.5\n");
    CHECK_THROWS_AS(HybridWeights::load(ss), ParseError);
  }
  {
    std::stringstream ss("A = abc\n");
    CHECK_THROWS_AS(HybridWeights::load(ss), ParseError);
  }
  {
    std::stringstream ss("A = 0.5x\n");
    CHECK_THROWS_AS(HybridWeights::load(ss), ParseError);
  }
  {
    // parse error messages carry the 1-based line number
    std::stringstream ss("A = 0.5\nbroken line\n");
    try {
      HybridWeights::load(ss);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line_number == 2);
    }
  }
  {
    // well-formed but sums to 1.1
    std::stringstream ss("A = 0.5\nB = 0.6\n");
    CHECK_THROWS_AS(HybridWeights::load(ss), Error);
  }
  {
    // well-formed but negative
    std::stringstream ss("A = -0.2\nB = 1.2\n");
    CHECK_THROWS_AS(HybridWeights::load(ss), Error);
  }
  {
    std::stringstream ss("");
    CHECK_THROWS_AS(HybridWeights::load(ss), Error);
  }
}
