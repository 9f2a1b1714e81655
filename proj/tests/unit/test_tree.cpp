#include "doctest.h"

#include "hl/error.hpp"
#include "hl/tree.hpp"
#include "oracles.hpp"

using namespace hl;

namespace {

std::vector<Node> binary_nodes(int n) {
  std::vector<Node> out;
  for (int h = 0; h < n; ++h) {
    auto lv = oracle::level_nodes(2, h);
    out.insert(out.end(), lv.begin(), lv.end());
  }
  return out;
}

std::vector<std::string> strs(const std::vector<Node>& v) {
  std::vector<std::string> out;
  for (const auto& t : v) out.push_back(t.str());
  return out;
}

}  // namespace

TEST_CASE("lex_compare examples") {
  CHECK(lex_compare(Node("0"), Node("")) == LexOrder::Less);
  CHECK(lex_compare(Node(""), Node("1")) == LexOrder::Less);
  CHECK(lex_compare(Node("01"), Node("00")) == LexOrder::Greater);
  CHECK(lex_compare(Node("01"), Node("01")) == LexOrder::Equal);
}

TEST_CASE("lex_compare refuses non-binary digits") {
  try {
    lex_compare(Node("2"), Node("0"));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnsupportedAlphabet);
  }
}

TEST_CASE("lex order is a strict total order on binary nodes up to height 5") {
  auto nodes = binary_nodes(5);
  for (const Node& s : nodes) {
    for (const Node& t : nodes) {
      LexOrder st = lex_compare(s, t);
      LexOrder ts = lex_compare(t, s);
      CHECK((st == LexOrder::Equal) == (s == t));
      if (st == LexOrder::Less) CHECK(ts == LexOrder::Greater);
      if (st == LexOrder::Greater) CHECK(ts == LexOrder::Less);
    }
  }
  for (const Node& a : nodes) {
    for (const Node& b : nodes) {
      if (!lex_less(a, b)) continue;
      for (const Node& c : nodes) {
        if (lex_less(b, c)) CHECK(lex_less(a, c));
      }
    }
  }
}

TEST_CASE("children straddle their parent in lex order") {
  for (const Node& x : binary_nodes(4)) {
    CHECK(lex_compare(x.child(0), x) == LexOrder::Less);
    CHECK(lex_compare(x, x.child(1)) == LexOrder::Less);
  }
}

TEST_CASE("restrict examples and tower law") {
  auto space = TreeSpace::uniform(2, 5);
  CHECK(restrict({Node("0110")}, 2, space) == LevelSequence{Node("01")});
  CHECK(restrict({Node("0110")}, 4, space) == LevelSequence{Node("0110")});
  CHECK(restrict({Node("01"), Node("10")}, 0) == LevelSequence{Node(""), Node("")});
  for (const Node& a : space.level(4)) {
    for (const Node& b : space.level(4)) {
      LevelSequence t{a, b};
      for (int zeta = 0; zeta <= 4; ++zeta) {
        CHECK(sequence_height(restrict(t, zeta)) == zeta);
        for (int xi = 0; xi <= zeta; ++xi) CHECK(restrict(restrict(t, zeta), xi) == restrict(t, xi));
      }
    }
  }
  CHECK_THROWS_AS(restrict({Node("01")}, 3), Error);
}

TEST_CASE("levels and successors") {
  auto t23 = TreeSpace::uniform(2, 3);
  CHECK(strs(t23.level(1)) == std::vector<std::string>{"0", "1"});
  CHECK(strs(t23.level(2)) == std::vector<std::string>{"00", "01", "10", "11"});
  CHECK(strs(t23.successors(Node(""))) == std::vector<std::string>{"0", "1"});
  CHECK(strs(TreeSpace::uniform(3, 2).successors(Node(""))) == std::vector<std::string>{"0", "1", "2"});

  auto ex = TreeSpace::from_nodes({Node(""), Node("0"), Node("00"), Node("01")});
  CHECK(strs(ex.level(2)) == std::vector<std::string>{"00", "01"});
  auto chain = TreeSpace::from_nodes({Node(""), Node("0"), Node("00")});
  CHECK(strs(chain.successors(Node("0"))) == std::vector<std::string>{"00"});

  for (int b = 2; b <= 3; ++b) {
    auto s = TreeSpace::uniform(b, 4);
    long long expect = 1;
    for (int a = 0; a < 4; ++a, expect *= b) CHECK(static_cast<long long>(s.level(a).size()) == expect);
  }
}

TEST_CASE("tree errors") {
  auto t = TreeSpace::uniform(2, 3);
  CHECK_THROWS_AS(t.level(3), Error);
  CHECK_THROWS_AS(t.successors(Node("2")), Error);
  CHECK_THROWS_AS(TreeSpace::from_nodes({Node(""), Node("01")}), Error);
  CHECK_THROWS_AS(TreeSpace::uniform(1, 3), Error);
}

TEST_CASE("tuple keys round-trip") {
  std::vector<Node> t{Node(""), Node("01"), Node("1")};
  CHECK(parse_tuple_key(tuple_key(t)) == t);
}
