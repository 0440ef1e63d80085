#include <random>
#include <set>

#include "doctest.h"
#include "oowm/embedding.hpp"
#include "oowm/error.hpp"
#include "oracles.hpp"

using namespace oowm;

namespace {
EmbeddingVector one_hot(int dim, int k) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  v[k] = 1.0;
  return EmbeddingVector(v);
}
}  // namespace

TEST_CASE("fnv1a64 published values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(fnv1a64("pick") == oracle::fnv1a("pick"));
}

TEST_CASE("offline embedding matches the hashing oracle") {
  const OfflineEmbedder e;
  for (const char* text : {"Pick up toys", "Fold the CLOTHES, then stack 3 books!", "x", "a a a b"}) {
    CAPTURE(text);
    const auto got = e.embed_one(text);
    const auto want = oracle::hashed_embedding(text, 384);
    REQUIRE(got.dimension() == 384);
    for (int k = 0; k < 384; ++k) CHECK(got.values[k] == doctest::Approx(want[k]).epsilon(1e-15));
    CHECK(got.norm == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("identical texts give identical vectors") {
  const OfflineEmbedder e;
  const auto v = embed_batch(e, std::vector<std::string>{"pick up toys", "pick up toys"});
  REQUIRE(v.size() == 2);
  CHECK(v[0].values == v[1].values);
  CHECK(cosine(v[0], v[1]) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("case and punctuation do not matter") {
  const OfflineEmbedder e;
  CHECK(e.embed_one("Pick-up TOYS!").values == e.embed_one("pick up toys").values);
}

TEST_CASE("empty text is the zero vector") {
  const OfflineEmbedder e;
  const auto v = embed_batch(e, std::vector<std::string>{""});
  REQUIRE(v.size() == 1);
  CHECK(v[0].norm == 0.0);
  CHECK(v[0].dimension() == 384);
  CHECK(cosine(v[0], e.embed_one("anything")) == 0.0);
  CHECK(cosine(v[0], v[0]) == 0.0);
}

TEST_CASE("cosine conventions") {
  const auto a = one_hot(4, 0);
  const auto b = one_hot(4, 1);
  CHECK(cosine(a, a) == 1.0);
  CHECK(cosine(a, b) == 0.0);
  CHECK(cosine(a, EmbeddingVector(Eigen::VectorXd::Zero(4))) == 0.0);
  Eigen::VectorXd neg(4);
  neg << -2, 0, 0, 0;
  CHECK(cosine(a, EmbeddingVector(neg)) == -1.0);
  CHECK_THROWS_AS(cosine(a, one_hot(5, 0)), Error);
}

TEST_CASE("cosine is symmetric and bounded") {
  const OfflineEmbedder e;
  std::mt19937 rng(7);
  const std::vector<std::string> words{"sweep", "floor", "fold", "shirt", "wipe", "desk", "stack", "books"};
  for (int t = 0; t < 200; ++t) {
    std::string x, y;
    for (int k = 0; k < 3; ++k) x += words[rng() % words.size()] + " ";
    for (int k = 0; k < 3; ++k) y += words[rng() % words.size()] + " ";
    const double c1 = cosine(e.embed_one(x), e.embed_one(y));
    const double c2 = cosine(e.embed_one(y), e.embed_one(x));
    CHECK(c1 == c2);
    CHECK(c1 <= 1.0);
    CHECK(c1 >= -1.0);
  }
}

TEST_CASE("token-disjoint texts are nearly orthogonal") {
  const OfflineEmbedder e;
  std::mt19937 rng(42);
  auto token = [&] {
    std::string s;
    for (int k = 0; k < 6; ++k) s.push_back(static_cast<char>('a' + rng() % 26));
    return s;
  };
  int over = 0;
  for (int t = 0; t < 1000; ++t) {
    std::set<std::string> seen;
    std::string x, y;
    for (int k = 0; k < 4; ++k) {
      auto w = token();
      seen.insert(w);
      x += w + " ";
    }
    for (int k = 0; k < 4;) {
      auto w = token();
      if (seen.contains(w)) continue;
      y += w + " ";
      ++k;
    }
    if (std::abs(cosine(e.embed_one(x), e.embed_one(y))) >= 0.5) ++over;
  }
  CHECK(over == 0);
}

TEST_CASE("embed_batch input validation") {
  const OfflineEmbedder e;
  CHECK_THROWS_AS(embed_batch(e, std::vector<std::string>{}), Error);
  try {
    embed_batch(e, std::vector<std::string>{std::string(e.max_text_length() + 1, 'a')});
    FAIL("expected text_too_long");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::text_too_long);
  }
}

TEST_CASE("custom dimension") {
  const OfflineEmbedder e(16);
  CHECK(e.embed_one("a b c").dimension() == 16);
}
