#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "reprrec/entity.hpp"
#include "reprrec/error.hpp"
#include "reprrec/vectorspace.hpp"

using namespace reprrec;

TEST_CASE("cosine matches hand-computed values") {
  std::vector<double> e1{1.0, 0.0};
  std::vector<double> e2{0.0, 1.0};
  CHECK(cosine(e1, e1) == doctest::Approx(1.0));
  CHECK(cosine(e1, e2) == doctest::Approx(0.0));
  std::vector<double> a{1.0, 2.0, 3.0};
  std::vector<double> b{4.0, 5.0, 6.0};
  // 32 / (sqrt(14) * sqrt(77))
  CHECK(cosine(a, b) == doctest::Approx(0.9746318461970762).epsilon(1e-12));
  CHECK(cosine(a, b) == doctest::Approx(cosine(b, a)));
}

TEST_CASE("cosine is scale invariant and rejects zero vectors") {
  std::vector<double> a{0.3, -0.7, 2.0};
  std::vector<double> scaled{0.6, -1.4, 4.0};
  CHECK(cosine(a, scaled) == doctest::Approx(1.0));
  std::vector<double> zero{0.0, 0.0, 0.0};
  CHECK_THROWS_AS(cosine(a, zero), Error);
  CHECK_THROWS_AS(cosine(zero, a), Error);
}

static RepresentationStore basis_store() {
  RepresentationStore store(3);
  store.add(movie_token("1"), {1.0, 0.0, 0.0});
  store.add(movie_token("2"), {0.0, 1.0, 0.0});
  store.add(director_token("doe"), {0.0, 0.0, 1.0});
  return store;
}

TEST_CASE("store rejects duplicates and wrong shapes; flags zero-norm entries") {
  RepresentationStore store(2);
  store.add(movie_token("1"), {1.0, 0.0});
  CHECK_THROWS_AS(store.add(movie_token("1"), {0.0, 1.0}), Error);
  CHECK_THROWS_AS(store.add(movie_token("2"), {1.0, 0.0, 0.0}), Error);
  store.add(movie_token("3"), {0.0, 0.0});
  CHECK(store.queryable(movie_token("1")));
  CHECK_FALSE(store.queryable(movie_token("3")));
  CHECK_FALSE(store.queryable(movie_token("missing")));
  REQUIRE(store.find(movie_token("3")) != nullptr);
  CHECK(store.find(movie_token("3"))->norm == 0.0);
}

TEST_CASE("nearest finds the self-match on an orthonormal basis") {
  auto store = basis_store();
  std::vector<double> query{1.0, 0.0, 0.0};
  auto hits = nearest(store, query, 1);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].token == movie_token("1"));
  CHECK(hits[0].similarity == doctest::Approx(1.0));
}

TEST_CASE("nearest applies kind filters and exclusions") {
  auto store = basis_store();
  std::vector<double> query{1.0, 1.0, 1.0};
  CHECK(nearest(store, query, 5, EntityKind::Actor).empty());
  auto directors = nearest(store, query, 5, EntityKind::Director);
  REQUIRE(directors.size() == 1);
  CHECK(directors[0].token == director_token("doe"));
  auto without_m1 = nearest(store, query, 5, std::nullopt, {movie_token("1")});
  for (const auto& hit : without_m1) CHECK(hit.token != movie_token("1"));
  CHECK(without_m1.size() == 2);
}

TEST_CASE("nearest ranks by similarity with canonical-string tie-break") {
  RepresentationStore store(2);
  // identical directions tie at cosine 1; order must be canonical ascending
  store.add(movie_token("9"), {2.0, 0.0});
  store.add(movie_token("10"), {1.0, 0.0});
  store.add(movie_token("2"), {4.0, 0.0});
  store.add(user_token("1"), {-1.0, 0.0});
  std::vector<double> query{1.0, 0.0};
  auto hits = nearest(store, query, 4);
  REQUIRE(hits.size() == 4);
  CHECK(hits[0].token == movie_token("10"));  // "m:10" < "m:2" < "m:9"
  CHECK(hits[1].token == movie_token("2"));
  CHECK(hits[2].token == movie_token("9"));
  CHECK(hits[3].token == user_token("1"));
  CHECK(hits[3].similarity == doctest::Approx(-1.0));
}

TEST_CASE("nearest ranking is invariant under positive query scaling") {
  auto store = basis_store();
  std::vector<double> q1{0.2, 0.5, 0.1};
  std::vector<double> q2{2.0, 5.0, 1.0};
  auto a = nearest(store, q1, 3);
  auto b = nearest(store, q2, 3);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].token == b[i].token);
    CHECK(a[i].similarity == doctest::Approx(b[i].similarity));
  }
}

TEST_CASE("nearest with no filter and k=V returns every queryable token once") {
  RepresentationStore store(2);
  store.add(movie_token("1"), {1.0, 0.0});
  store.add(movie_token("2"), {0.0, 1.0});
  store.add(movie_token("zero"), {0.0, 0.0});
  std::vector<double> query{1.0, 1.0};
  auto hits = nearest(store, query, store.size());
  CHECK(hits.size() == 2);  // the zero-norm entry never qualifies
}

TEST_CASE("nearest rejects a zero query") {
  auto store = basis_store();
  std::vector<double> zero{0.0, 0.0, 0.0};
  CHECK_THROWS_AS(nearest(store, zero, 1), Error);
}

TEST_CASE("combine normalizes operands so repetition does not change ranking") {
  RepresentationStore store(2);
  store.add(movie_token("x"), {3.0, 1.0});
  store.add(movie_token("a"), {1.0, 0.1});
  store.add(movie_token("b"), {0.0, 1.0});

  ArithmeticQuery single;
  single.plus = {movie_token("x")};
  ArithmeticQuery doubled;
  doubled.plus = {movie_token("x"), movie_token("x")};

  auto r1 = combine(single, store);
  auto r2 = combine(doubled, store);
  REQUIRE(r1.neighbors.size() == r2.neighbors.size());
  for (std::size_t i = 0; i < r1.neighbors.size(); ++i) {
    CHECK(r1.neighbors[i].token == r2.neighbors[i].token);
    CHECK(r1.neighbors[i].similarity == doctest::Approx(r2.neighbors[i].similarity));
  }
  // operands excluded by default: x itself never appears
  for (const auto& hit : r1.neighbors) CHECK(hit.token != movie_token("x"));
}

TEST_CASE("combine computes normalized sum minus normalized sum") {
  RepresentationStore store(2);
  store.add(movie_token("p"), {2.0, 0.0});
  store.add(movie_token("q"), {0.0, 5.0});
  store.add(movie_token("r"), {10.0, 10.0});
  ArithmeticQuery query;
  query.plus = {movie_token("p"), movie_token("q")};
  query.minus = {movie_token("r")};
  auto result = combine(query, store);
  double inv = 1.0 / std::sqrt(2.0);
  CHECK(result.vector[0] == doctest::Approx(1.0 - inv));
  CHECK(result.vector[1] == doctest::Approx(1.0 - inv));
}

TEST_CASE("combine errors name unknown operands and reject degenerate results") {
  auto store = basis_store();
  ArithmeticQuery unknown;
  unknown.plus = {movie_token("404")};
  CHECK_THROWS_WITH_AS(combine(unknown, store), doctest::Contains("m:404"), Error);

  ArithmeticQuery cancel;
  cancel.plus = {movie_token("1")};
  cancel.minus = {movie_token("1")};
  CHECK_THROWS_AS(combine(cancel, store), Error);
}

TEST_CASE("combine can keep operands in the neighbor list when asked") {
  auto store = basis_store();
  ArithmeticQuery query;
  query.plus = {movie_token("1")};
  query.exclude_operands = false;
  auto result = combine(query, store);
  REQUIRE_FALSE(result.neighbors.empty());
  CHECK(result.neighbors[0].token == movie_token("1"));
  CHECK(result.neighbors[0].similarity == doctest::Approx(1.0));
}
