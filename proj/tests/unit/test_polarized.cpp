#include "doctest.h"

#include <random>
#include <set>

#include "hl/error.hpp"
#include "hl/polarized.hpp"
#include "oracles.hpp"

using namespace hl;

namespace {

std::vector<TreeSpace> box(int d, int b, int n) { return std::vector<TreeSpace>(static_cast<size_t>(d), TreeSpace::uniform(b, n)); }

// Colors of height_permutation_coloring over every distinct-height tuple of actual nodes.
std::set<int> realized_by_enumeration(const std::vector<SubtreeReport>& subs, int d) {
  auto f = height_permutation_coloring(d);
  std::set<int> out;
  std::vector<std::vector<Node>> factors;
  for (const auto& s : subs) factors.push_back(s.nodes);
  for_each_product(factors, [&](const std::vector<Node>& t) {
    std::set<int> hs;
    for (const Node& x : t) hs.insert(x.height());
    if (hs.size() == t.size()) out.insert(f(t));
    return true;
  });
  return out;
}

}  // namespace

TEST_CASE("tangent numbers match alternating permutation counts") {
  const long long expected[] = {1, 2, 16, 272, 7936};
  for (int n = 1; n <= 5; ++n) {
    CHECK(tangent(n) == expected[n - 1]);
    CHECK(tangent(n) == oracle::alternating_permutations(2 * n - 1));
  }
  CHECK(tangent(10) == BigInt("29088885112832"));
  CHECK_THROWS_AS(tangent(0), Error);
}

TEST_CASE("devlin lower bounds") {
  CHECK(devlin_lower_bound(2) == 2);
  CHECK(devlin_lower_bound(3) == 20);
  CHECK(devlin_lower_bound(4) == 360);
  for (int d = 2; d <= 7; ++d) {
    CHECK(devlin_lower_bound(d) == oracle::devlin_bound(static_cast<long long>(tangent(d)), d));
    CHECK(devlin_lower_bound(d) >= tangent(d));
  }
  CHECK_THROWS_AS(devlin_lower_bound(1), Error);
}

TEST_CASE("degree table") {
  auto t = degree_table(4);
  auto j = t.to_json();
  REQUIRE(j["rows"].size() == 4);
  CHECK(j["rows"][3]["tangent"] == "272");
  CHECK(j["rows"][3]["devlin_lower_bound"] == "360");
  CHECK(j["rows"][0]["devlin_lower_bound"].is_null());
}

TEST_CASE("height permutation coloring examples") {
  auto f1 = height_permutation_coloring(1);
  CHECK(f1({Node("0"), Node("010")}) == permutation_index({0, 1}));
  CHECK(f1({Node("010"), Node("0")}) == permutation_index({1, 0}));
  auto f2 = height_permutation_coloring(2);
  CHECK(f2({Node("01"), Node(""), Node("1")}) == permutation_index({1, 2, 0}));
  CHECK(f2.colors() == 6);
  for (int k = 1; k <= 4; ++k) {
    for (int i = 0; i < factorial(k); ++i) CHECK(permutation_index(permutation_from_index(i, k)) == i);
  }
}

TEST_CASE("tuple types break height ties by coordinate") {
  auto t = tuple_type({Node("0"), Node("1"), Node("")});
  CHECK(t.perm == std::vector<int>{2, 0, 1});
  CHECK(t.tie_mask == std::vector<bool>{true, true, false});
}

TEST_CASE("verify_lower_bound") {
  auto t3 = TreeSpace::uniform(2, 3);
  auto t4 = TreeSpace::uniform(2, 4);
  auto r1 = verify_lower_bound({full_subtree(t3, 3), full_subtree(t3, 3)}, 1);
  CHECK(r1.all_realized);
  auto r2 = verify_lower_bound({full_subtree(t4, 4), full_subtree(t4, 4), full_subtree(t4, 4)}, 2);
  CHECK(r2.all_realized);
  CHECK(r2.realized.size() == 6);
  auto root = make_report({Node("")}, {0});
  try {
    verify_lower_bound({root, root}, 1);
    FAIL("expected insufficient spread");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientSpread);
  }
}

TEST_CASE("verify_lower_bound agrees with tuple enumeration") {
  auto space = TreeSpace::uniform(2, 5);
  std::mt19937_64 rng(21);
  std::vector<std::vector<int>> sets{{0, 1, 2}, {0, 2, 4}, {1, 3, 4}, {0, 1, 3, 4}, {2, 3, 4}};
  for (int trial = 0; trial < 60; ++trial) {
    int d = 1 + trial % 2;
    std::vector<SubtreeReport> subs;
    for (int j = 0; j <= d; ++j) {
      auto all = enumerate_strong_subtrees(space, sets[rng() % sets.size()]);
      subs.push_back(all[rng() % all.size()]);
    }
    auto rep = verify_lower_bound(subs, d);
    std::set<int> realized;
    for (const auto& p : rep.realized) realized.insert(permutation_index(p));
    CHECK(realized == realized_by_enumeration(subs, d));
    CHECK(rep.all_realized == (static_cast<long long>(realized.size()) == factorial(d + 1)));
  }
}

TEST_CASE("fractions are exact") {
  CHECK(parse_fraction("1/10") == Fraction(1, 10));
  CHECK(parse_fraction("0.1") == Fraction(1, 10));
  CHECK(parse_fraction("2") == Fraction(2, 1));
  CHECK(fraction_string(Fraction(2, 20)) == "1/10");
  CHECK_THROWS_AS(parse_fraction("x"), Error);
  CHECK_THROWS_AS(parse_fraction("1/0"), Error);
}

TEST_CASE("almost_all_homogenize") {
  auto spaces = box(2, 2, 6);
  auto constant = Coloring::named("constant", {{"color", 1}}, 2);
  auto rc = almost_all_homogenize(constant, spaces);
  CHECK(rc.within_budget);
  CHECK(rc.violations == 0);
  CHECK(rc.gamma == 1);

  auto first = Coloring::named("level-parity", {{"coordinate", 0}}, 2);
  AlmostAllOptions o;
  o.pattern = {0, 1};
  auto rp = almost_all_homogenize(first, spaces, o);
  CHECK(rp.violations == 0);
  auto recount = count_exceptions(first, rp.subtrees, rp.pattern, rp.gamma);
  CHECK(recount.first == rp.violations);
  CHECK(recount.second == rp.total);
}

TEST_CASE("precedence types") {
  CHECK(precedence_type({2, 0, 1}) == std::vector<int>{1, 2, 0});
  CHECK(precedence_type({1, 1, 0}) == std::vector<int>{2, 0, 1});
}

TEST_CASE("polarized_search on structured colorings") {
  auto spaces2 = box(2, 2, 10);
  auto constant = Coloring::named("constant", {{"color", 0}}, 2);
  auto rc = polarized_search(constant, spaces2);
  REQUIRE(rc.found);
  CHECK(rc.colors.size() == 1);

  for (int d = 1; d <= 2; ++d) {
    auto f = height_permutation_coloring(d);
    auto spaces = box(d + 1, 2, 10);
    auto r = polarized_search(f, spaces);
    CAPTURE(d);
    REQUIRE(r.found);
    CHECK(static_cast<long long>(r.colors.size()) == factorial(d + 1));
    CHECK(realized_colors(f, r.trees) == r.colors);
    for (size_t j = 0; j < r.trees.size(); ++j) CHECK(validate_nice_subtree(r.trees[j], spaces[j], 3).valid);
  }
}

TEST_CASE("nice subtree validator") {
  auto space = TreeSpace::uniform(2, 5);
  CHECK(validate_nice_subtree({Node("0"), Node("00"), Node("011")}, space, 1).valid);
  CHECK_FALSE(validate_nice_subtree({Node("0"), Node("00"), Node("001")}, space, 1).valid);
}
