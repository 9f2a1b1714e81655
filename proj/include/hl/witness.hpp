#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hl/coloring.hpp"
#include "hl/error.hpp"
#include "hl/subtree.hpp"
#include "hl/tree.hpp"

namespace hl {

using Matrix = std::vector<std::vector<Node>>;

// Base tuple, density level xi and a matrix monochromatic in `color`.
// For the leveled variant the base is a level sequence and xi = ht(base) + 1.
struct SdhlWitness {
  LevelSequence base;
  int xi = 0;
  Matrix matrix;
  int color = 0;

  bool operator==(const SdhlWitness& other) const = default;
};

constexpr unsigned long long kDefaultSearchCap = 50'000'000ULL;

// Every node of T_j(xi) above base_j has an extension in matrix_j.
bool is_dense(const LevelSequence& base, int xi, const Matrix& matrix, const std::vector<TreeSpace>& spaces);

Verdict check_sdhl_witness(const SdhlWitness& w, const Coloring& f, const std::vector<TreeSpace>& spaces);
std::optional<SdhlWitness> sdhl_search(const Coloring& f, const std::vector<TreeSpace>& spaces,
                                       unsigned long long cap = kDefaultSearchCap);

Verdict check_sdhl_prime_witness(const SdhlWitness& w, const Coloring& f, const std::vector<TreeSpace>& spaces);
std::optional<SdhlWitness> sdhl_prime_search(const Coloring& f, const std::vector<TreeSpace>& spaces,
                                             unsigned long long cap = kDefaultSearchCap);

struct DshlVerdict {
  Verdict verdict;
  // False only when gamma = 0 and the roots do not also work with color 0.
  bool asym = true;
  // One dense matrix per eta, in increasing eta.
  std::vector<SdhlWitness> matrices;
};

DshlVerdict check_dshl_witness(const LevelSequence& base, int gamma, const Coloring& f,
                               const std::vector<TreeSpace>& spaces, unsigned long long cap = kDefaultSearchCap);

struct DshlWitness {
  LevelSequence base;
  int color = 0;
};

std::optional<DshlWitness> dshl_search(const Coloring& f, const std::vector<TreeSpace>& spaces,
                                       unsigned long long cap = kDefaultSearchCap);

Verdict check_hl_strong_subtree(const std::vector<SubtreeReport>& reports, const Coloring& f);

// Least monochromatic dense level matrix at `level` for the slots T_j(xi)[base_j].
std::optional<SdhlWitness> find_level_matrix(const Coloring& f, const std::vector<TreeSpace>& spaces,
                                             const LevelSequence& base, int xi, int level,
                                             std::optional<int> gamma, Budget& budget);

struct FhlOptions {
  int d = 1;
  int b = 2;
  int r = 2;
  int max_n = 6;
  bool randomized = false;
  int samples = 100;
  unsigned long long seed = 0;
  unsigned long long cap = kDefaultSearchCap;
};

struct FhlResult {
  std::string mode;
  // Exhaustive mode: the least n at which every coloring has a witness.
  std::optional<int> value;
  // Every n below this has a known counterexample.
  int lower_bound = 1;
  std::optional<int> counterexample_n;
  std::optional<Coloring> counterexample;
  // Randomized mode: least n where no sampled coloring failed.
  std::optional<int> clean_n;
  int samples = 0;
  unsigned long long seed = 0;
  std::string report;
};

FhlResult finite_hl_number(const FhlOptions& opts);

// All r-colorings of the level sequences of height-n truncations, as a hypergraph search.
// Returns a counterexample coloring (no witness) or nullopt.
std::optional<Coloring> find_counterexample(int d, int b, int r, int n, Budget& budget);

struct LargenessOracle {
  std::string name;
  std::function<bool(const Node&, int)> large;
  // A level >= min_level where every node has an extension of the given color, if any.
  std::function<std::optional<int>(const std::vector<Node>&, int, int)> select_level;
};

// A_{q,g} is large iff q has a g-colored extension on the top level.
LargenessOracle top_level_oracle(const Coloring& f, const TreeSpace& space);
// A_{q,g} is large iff q has g-colored extensions on every level in the top half at or above ht(q).
LargenessOracle top_half_oracle(const Coloring& f, const TreeSpace& space);

struct MonoSubtreeResult {
  SubtreeReport report;
  int color = 0;
  std::string case_label;
  std::vector<std::string> transcript;
  bool complete = true;
  std::string failure;
};

MonoSubtreeResult build_monochromatic_subtree(const Coloring& f, const TreeSpace& space,
                                              const LargenessOracle& oracle,
                                              std::optional<int> target_height = std::nullopt);

}  // namespace hl
