#include "doctest.h"

#include <numeric>
#include <random>

#include "hl/error.hpp"
#include "hl/tailcone.hpp"
#include "hl/witness.hpp"
#include "oracles.hpp"

using namespace hl;

namespace {

std::vector<TreeSpace> box(int d, int b, int n) { return std::vector<TreeSpace>(static_cast<size_t>(d), TreeSpace::uniform(b, n)); }

Coloring expr(const std::string& e, int arity, int colors = 2) {
  return Coloring::named("expression", {{"expr", e}, {"colors", colors}}, arity);
}

}  // namespace

TEST_CASE("check_tail_cone examples") {
  auto spaces = box(1, 2, 5);
  auto parity = Coloring::named("level-parity", {}, 1);
  auto full = full_subtree(spaces[0], 3);
  CHECK_FALSE(check_tail_cone(make_certificate({full}, {parity}), {parity}, spaces).valid);

  auto odd_above = trim(full_subtree(spaces[0], 5), spaces[0], {0, 1, 3});
  CHECK(check_tail_cone(make_certificate({odd_above}, {parity}), {parity}, spaces).valid);

  ColoringFamily constants{Coloring::named("constant", {{"color", 0}}, 2), Coloring::named("constant", {{"color", 1}}, 2)};
  auto two = box(2, 2, 4);
  auto f4 = full_subtree(two[0], 4);
  CHECK(check_tail_cone(make_certificate({f4, f4}, constants), constants, two).valid);
  CHECK_THROWS_AS(check_tail_cone(make_certificate({f4}, constants), constants, two), Error);
}

TEST_CASE("fuse on constant and parity families") {
  ColoringFamily constants{Coloring::named("constant", {{"color", 0}}, 1)};
  auto spaces = box(1, 2, 5);
  for (int h = 2; h <= 5; ++h) {
    auto r = fuse(constants, spaces, h);
    REQUIRE(r.outcome == BuildOutcome::Found);
    std::vector<int> expect(static_cast<size_t>(h));
    std::iota(expect.begin(), expect.end(), 0);
    CHECK(r.certificate->level_set == expect);
    CHECK(check_tail_cone(*r.certificate, constants, spaces).valid);
  }

  auto parity = Coloring::named("level-parity", {}, 1);
  auto pr = fuse({parity, parity}, spaces, 3);
  REQUIRE(pr.outcome == BuildOutcome::Found);
  CHECK(check_tail_cone(*pr.certificate, {parity, parity}, spaces).valid);
  CHECK(pr.transcript.size() == 2);
}

TEST_CASE("fuse with no colorings builds a plain strong subtree") {
  auto spaces = box(2, 2, 4);
  auto r = fuse({}, spaces, 4);
  REQUIRE(r.outcome == BuildOutcome::Found);
  for (size_t j = 0; j < spaces.size(); ++j) CHECK(validate_strong_subtree(r.certificate->subtrees[j], spaces[j]).valid);
}

TEST_CASE("fuse reports exhaustion and caps") {
  auto spaces = box(1, 2, 4);
  auto parity = Coloring::named("level-parity", {}, 1);
  // With h = n the level set is forced to 0..3, and level 2 breaks the color of level 1.
  auto r = fuse({parity}, spaces, 4);
  CHECK(r.outcome == BuildOutcome::Exhausted);
  CHECK_FALSE(r.failure.message.empty());
  StageCaps tiny{1, 1};
  auto c = fuse({parity}, box(1, 2, 8), 4, tiny);
  CHECK(c.outcome == BuildOutcome::Cap);
  CHECK_THROWS_AS(fuse({parity}, spaces, 1), Error);
}

TEST_CASE("tail-cone identity survives trimming") {
  std::mt19937_64 rng(5);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    auto spaces = box(1, 2, 8);
    ColoringFamily fam{Coloring::named("random", {{"seed", rng()}, {"colors", 2}}, 1)};
    auto r = fuse(fam, spaces, 4);
    if (r.outcome != BuildOutcome::Found) continue;
    ++checked;
    const auto& A = r.certificate->level_set;
    std::vector<int> keep{A[0], A[1], A[3]};
    std::vector<SubtreeReport> trimmed;
    for (size_t j = 0; j < spaces.size(); ++j) trimmed.push_back(trim(r.certificate->subtrees[j], spaces[j], keep));
    CHECK(check_tail_cone(make_certificate(trimmed, fam), fam, spaces).valid);
  }
  CHECK(checked > 0);
}

TEST_CASE("fuse transcripts are deterministic") {
  auto spaces = box(2, 2, 7);
  ColoringFamily fam{Coloring::named("random", {{"seed", 17}, {"colors", 2}}, 2)};
  auto a = fuse(fam, spaces, 3);
  auto b = fuse(fam, spaces, 3);
  CHECK(a.transcript == b.transcript);
  CHECK(a.steps == b.steps);
}

TEST_CASE("apply_tailcone_partial") {
  auto spaces = box(2, 2, 8);
  auto constant = Coloring::named("constant", {{"color", 0}}, 2);
  auto rc = apply_tailcone_partial(constant, {0}, spaces, 3);
  REQUIRE(rc.outcome == BuildOutcome::Found);
  CHECK(rc.verdict.valid);

  auto parity = expr("ht(1) % 2", 2);
  auto rp = apply_tailcone_partial(parity, {0}, spaces, 4);
  REQUIRE(rp.outcome == BuildOutcome::Found);
  CHECK(rp.verdict.valid);
  CHECK(verify_partial_identity(parity, {0}, rp.subtrees).valid);

  CHECK_THROWS_AS(apply_tailcone_partial(parity, {0, 1}, spaces, 3), Error);
  CHECK_THROWS_AS(apply_tailcone_partial(parity, {}, spaces, 3), Error);
}

TEST_CASE("dimension_induction successes pass the SDHL' checker") {
  auto spaces = box(2, 2, 9);
  for (const char* e : {"0", "ht(0) % 2"}) {
    auto f = expr(e, 2);
    auto r = dimension_induction(f, spaces, 7);
    CAPTURE(e);
    REQUIRE(r.outcome == BuildOutcome::Found);
    REQUIRE(r.witness);
    CHECK(check_sdhl_prime_witness(*r.witness, f, spaces).valid);
    CHECK_FALSE(r.transcript.empty());
  }
}
