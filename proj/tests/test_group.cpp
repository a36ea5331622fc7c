#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "freeprod/group.hpp"
#include "freeprod/word_io.hpp"

using namespace freeprod;
using freeprod::testing::w;

TEST_CASE("normalize cancels, merges and cascades") {
  const auto f2 = testing::free_group(2);
  const FactorElement a1{0, 1}, am1{0, -1}, b1{1, 1}, bm1{1, -1};

  std::vector<FactorElement> raw = {a1, am1};
  CHECK(f2.normalize(raw).is_identity());

  raw = {a1, b1, bm1, a1};
  const auto r = f2.normalize(raw);
  REQUIRE(r.type_size() == 1);
  CHECK(r[0] == FactorElement{0, 2});

  const auto z23 = testing::cyclic_product(2, 3);
  raw = {{0, 1}, {0, 1}};
  CHECK(z23.normalize(raw).is_identity());

  raw = {{0, 0}, {1, 0}};
  CHECK(z23.normalize(raw).is_identity());
}

TEST_CASE("normalize rejects malformed letters") {
  const auto z23 = testing::cyclic_product(2, 3);
  std::vector<FactorElement> raw = {{2, 1}};
  CHECK_THROWS_AS(z23.normalize(raw), MalformedInput);
  raw = {{1, 3}};
  CHECK_THROWS_AS(z23.normalize(raw), MalformedInput);
  CHECK_THROWS_AS(z23.from_reduced({{0, 1}, {0, 1}}), MalformedInput);
  CHECK_THROWS_AS(z23.from_reduced({{1, 0}}), MalformedInput);
}

TEST_CASE("multiply, inverse and length on documented examples") {
  const auto f2 = testing::free_group(2);
  CHECK(f2.multiply(w(f2, "a b"), w(f2, "b^-1 a")) == w(f2, "a^2"));
  CHECK(f2.multiply(ReducedWord{}, w(f2, "a b^3")) == w(f2, "a b^3"));

  const auto aba = w(f2, "a b a");
  const auto sq = f2.multiply(aba, aba);
  CHECK(sq == w(f2, "a b a^2 b a"));
  CHECK(f2.length(sq) == 6);

  CHECK(f2.inverse(w(f2, "a b")) == w(f2, "b^-1 a^-1"));
  CHECK(f2.inverse(ReducedWord{}).is_identity());
  CHECK(f2.inverse(w(f2, "a^2 b^-1")) == w(f2, "b a^-2"));

  CHECK(f2.length(ReducedWord{}) == 0);
  CHECK(f2.length(w(f2, "a^3 b^-1")) == 4);

  const GroupContext z3({FactorDescriptor::cyclic("c", 3), FactorDescriptor::integer("a")});
  CHECK(z3.length(w(z3, "c^2")) == 1);
  CHECK(w(z3, "c^-1") == w(z3, "c^2"));
}

TEST_CASE("type size") {
  const auto f2 = testing::free_group(2);
  CHECK(type_size(ReducedWord{}) == 0);
  CHECK(type_size(w(f2, "a^5")) == 1);
  CHECK(type_size(w(f2, "a b a b^-1 a^-1")) == 5);
}

TEST_CASE("starts_with and ends_with truncate at min(d, floor(m/2))") {
  const auto f2 = testing::free_group(2);
  CHECK(starts_with(w(f2, "a b a b"), w(f2, "a b")));
  CHECK(ends_with(w(f2, "a b a b"), w(f2, "a b")));
  CHECK(ends_with(w(f2, "a b a b^-1 a^-1"), w(f2, "b^-1 a^-1")));
  CHECK(starts_with(w(f2, "a b a b^-1 a^-1"), w(f2, "a b a^-1")));
  CHECK(starts_with(w(f2, "a b a b^-1 a^-1"), w(f2, "a b a b")));
  CHECK_FALSE(starts_with(w(f2, "a b a b^-1 a^-1"), w(f2, "b a")));

  const auto single = starts_with(w(f2, "a"), w(f2, "a"));
  CHECK_FALSE(single.matches);
  CHECK(single.short_word);
  CHECK(ends_with(ReducedWord{}, w(f2, "a")).short_word);
  CHECK_THROWS_AS(starts_with(w(f2, "a b"), ReducedWord{}), MalformedInput);
}

TEST_CASE("ball enumeration") {
  const auto f2 = testing::free_group(2);
  const auto b1 = f2.ball(1);
  CHECK(b1.size() == 5);
  CHECK(f2.ball(2).size() == 17);
  CHECK(f2.ball(2.7).size() == 17);
  CHECK(f2.ball(0).size() == 1);

  const auto z22 = testing::cyclic_product(2, 2);
  const auto ball = z22.ball(2);
  const std::set<ReducedWord> got(ball.begin(), ball.end());
  const std::set<ReducedWord> expected = {ReducedWord{}, w(z22, "x"), w(z22, "y"), w(z22, "x y"),
                                          w(z22, "y x")};
  CHECK(got == expected);

  CHECK_THROWS_AS(f2.ball(8, 1000), ResourceLimit);
}

TEST_CASE("ball sizes of free groups match 1 + sum of 2r(2r-1)^(k-1)") {
  for (int r = 1; r <= 3; ++r) {
    const auto ctx = testing::free_group(r);
    double expected = 1.0;
    for (int t = 0; t <= 6; ++t) {
      if (t > 0) expected += 2.0 * r * std::pow(2.0 * r - 1.0, t - 1);
      const auto ball = ctx.ball(t);
      CHECK(static_cast<double>(ball.size()) == expected);
      const std::set<ReducedWord> unique(ball.begin(), ball.end());
      CHECK(unique.size() == ball.size());
      for (const auto& g : ball) CHECK(ctx.length(g) <= t);
    }
  }
}

TEST_CASE("syllable sphere counts agree with enumeration") {
  for (const auto& ctx : {testing::free_group(2), testing::cyclic_product(2, 3),
                          GroupContext({testing::s3_factor(), FactorDescriptor::integer("a")})}) {
    const auto counts = ctx.sphere_counts(6);
    const auto ball = ctx.ball(6);
    std::vector<double> observed(7, 0.0);
    for (const auto& g : ball) observed[static_cast<std::size_t>(ctx.length(g))] += 1.0;
    CHECK(counts == observed);
  }
}

TEST_CASE("theta") {
  const auto f2 = testing::free_group(2);
  CHECK(f2.theta(3) == 7);
  CHECK(f2.theta(0) == 1);
  const GroupContext z32({FactorDescriptor::cyclic("x", 3), FactorDescriptor::cyclic("y", 2)});
  CHECK(z32.theta(1) == 3);
  CHECK(z32.theta(0) == 1);
  CHECK(z32.theta(10) == 3);
}

TEST_CASE("growth estimates") {
  const auto f2 = testing::free_group(2);
  const auto seq = growth_estimate(f2, 12);
  REQUIRE(seq.size() == 12);
  for (std::size_t i = 1; i < seq.size(); ++i) CHECK(seq[i] < seq[i - 1]);
  CHECK(seq.back() > 3.0);
  CHECK(seq.back() < 3.2);

  const auto z = FactorDescriptor::integer("a");
  const auto zs = growth_estimate(z, 50);
  for (std::size_t i = 1; i < zs.size(); ++i) CHECK(zs[i] < zs[i - 1]);
  CHECK(zs.back() == doctest::Approx(std::pow(101.0, 1.0 / 50)));

  const auto fin = growth_estimate(FactorDescriptor::cyclic("x", 5), 40);
  CHECK(fin.back() == doctest::Approx(std::pow(5.0, 1.0 / 40)));

  CHECK_THROWS_AS(growth_estimate(f2, 20), ResourceLimit);
}

TEST_CASE("table factors") {
  const auto s3 = testing::s3_factor();
  CHECK(s3.order() == 6);
  CHECK(s3.diameter() == 3);
  CHECK(s3.ball_size(1) == 3);
  CHECK(s3.length(4) == 2);

  const GroupContext ctx({s3, FactorDescriptor::integer("a")});
  const auto g = w(ctx, "s t a s");
  CHECK(ctx.length(g) == 4);
  CHECK(parse_word(format_word(g, ctx), ctx) == g);

  // Not associative: a Latin square that is not a group table.
  const std::vector<std::vector<int>> bad = {{0, 1, 2}, {1, 0, 2}, {2, 2, 0}};
  CHECK_THROWS_AS(FactorDescriptor::table("B", bad, {1}, {"u"}), MalformedInput);
  // Generator does not generate.
  const std::vector<std::vector<int>> klein = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
  CHECK_THROWS_AS(FactorDescriptor::table("V", klein, {1}, {"u"}), MalformedInput);
  CHECK_NOTHROW(FactorDescriptor::table("V", klein, {1, 2}, {"u", "v"}));
}

TEST_CASE("word text syntax") {
  const auto f2 = testing::free_group(2);
  const auto g = w(f2, "a^2 b^-1 a");
  CHECK(format_word(g, f2) == "a^2 b^-1 a");
  CHECK(format_word(ReducedWord{}, f2) == "e");
  CHECK(w(f2, "e").is_identity());
  CHECK(w(f2, "").is_identity());
  CHECK(w(f2, "a b b^-1 a^-1").is_identity());
  CHECK_THROWS_AS(w(f2, "c"), MalformedInput);
  CHECK_THROWS_AS(w(f2, "a^x"), MalformedInput);
  CHECK(deserialize_word(serialize_word(g), f2) == g);
}

TEST_CASE("group-law properties on sampled elements") {
  std::mt19937_64 rng(20240611);
  for (const auto& ctx : {testing::free_group(2), testing::cyclic_product(2, 3),
                          GroupContext({testing::s3_factor(), FactorDescriptor::integer("a"),
                                        FactorDescriptor::cyclic("x", 4)})}) {
    const auto ball = ctx.ball(6);
    std::uniform_int_distribution<std::size_t> pick(0, ball.size() - 1);
    for (int trial = 0; trial < 10000; ++trial) {
      const auto& u = ball[pick(rng)];
      const auto& v = ball[pick(rng)];
      const auto& t = ball[pick(rng)];
      CHECK(ctx.multiply(ctx.multiply(u, v), t) == ctx.multiply(u, ctx.multiply(v, t)));

      const auto uv = ctx.multiply(u, v);
      const auto lu = ctx.length(u), lv = ctx.length(v), luv = ctx.length(uv);
      CHECK(luv <= lu + lv);
      CHECK(std::abs(lu - lv) <= luv);
      CHECK(ctx.product_length(u, v) == luv);
      CHECK(ctx.length(ctx.inverse(u)) == lu);
      CHECK(ctx.multiply(u, ctx.inverse(u)).is_identity());
      if (!u.is_identity() && !v.is_identity() && u.back().factor != v.front().factor)
        CHECK(luv == lu + lv);

      std::vector<FactorElement> concat(u.letters().begin(), u.letters().end());
      concat.insert(concat.end(), v.letters().begin(), v.letters().end());
      const auto n1 = ctx.normalize(concat);
      CHECK(n1 == uv);
      CHECK(ctx.normalize(n1.letters()) == n1);
    }
  }
}
