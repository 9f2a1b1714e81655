#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include "json.hpp"

#include "hl/coloring.hpp"
#include "hl/subtree.hpp"
#include "hl/tree.hpp"

namespace hl {

using BigInt = boost::multiprecision::cpp_int;
using Fraction = boost::rational<long long>;

BigInt tangent(int n);
BigInt devlin_lower_bound(int d);

struct DegreeTable {
  int k = 0;
  std::vector<BigInt> tangent;   // tangent[i] = t_{i+1}
  std::vector<BigInt> devlin;    // devlin[i] = lower bound for d = i+2
  std::vector<BigInt> factorial; // factorial[i] = (i+2)!
  nlohmann::json to_json() const;
  std::string to_text() const;
};

DegreeTable degree_table(int k);

struct TupleType {
  std::vector<int> perm;
  std::vector<bool> tie_mask;
  int index() const;
};

TupleType tuple_type(const std::vector<Node>& tuple);

// Maps a tuple to a permutation of its coordinates; a coloring by permutation index.
using TypeFunction = std::function<std::vector<int>(const std::vector<Node>&)>;
Coloring height_permutation_coloring(int d);
Coloring type_coloring(int d, TypeFunction type, std::string label = "type");

struct LowerBoundReport {
  bool all_realized = false;
  std::vector<std::vector<int>> realized;
  std::vector<std::vector<int>> missing;
  nlohmann::json to_json() const;
};

// Throws InsufficientSpread when some subtree meets fewer than d+1 ambient levels.
LowerBoundReport verify_lower_bound(const std::vector<SubtreeReport>& subtrees, int d);

Fraction parse_fraction(const std::string& text);
std::string fraction_string(const Fraction& q);

struct AlmostAllOptions {
  int height = 3;
  Fraction epsilon{1, 10};
  // Height order: ht(x_pattern[0]) < ... < ht(x_pattern[d-1]). Empty means identity.
  std::vector<int> pattern;
  unsigned long long cap = 50'000'000;
};

struct AlmostAllResult {
  bool within_budget = false;
  std::vector<SubtreeReport> subtrees;
  std::vector<int> level_set;
  std::vector<int> pattern;
  int gamma = 0;
  long long violations = 0;
  long long total = 0;
  Fraction fraction{0, 1};
  Fraction epsilon{1, 10};
  nlohmann::json to_json() const;
};

// Counts every tuple of the product whose heights increase along the pattern.
std::pair<long long, long long> count_exceptions(const Coloring& f, const std::vector<SubtreeReport>& subtrees,
                                                 const std::vector<int>& pattern, int gamma);

AlmostAllResult almost_all_homogenize(const Coloring& f, const std::vector<TreeSpace>& spaces,
                                      const AlmostAllOptions& opts = {});

// Rooted, splitting and of the given depth; strong-subtree level clauses are not required.
Verdict validate_nice_subtree(const std::vector<Node>& nodes, const TreeSpace& space, int splitting_depth);

struct PolarizedOptions {
  int splitting_depth = 3;
  unsigned long long per_stage_cap = 2'000'000;
  unsigned long long cap = 50'000'000;
};

struct PolarizedResult {
  bool found = false;
  bool capped = false;
  std::vector<std::vector<Node>> trees;
  std::map<int, int> gamma;  // permutation index -> color
  std::vector<int> colors;   // realized on the product
  std::vector<nlohmann::json> transcript;
  std::string failure;
  unsigned long long steps = 0;
  nlohmann::json to_json() const;
};

// Precedence type of a tuple: coordinates ordered by (stage, tree).
std::vector<int> precedence_type(const std::vector<int>& stages);

PolarizedResult polarized_search(const Coloring& f, const std::vector<TreeSpace>& spaces,
                                 const PolarizedOptions& opts = {});

// Distinct colors of f on the product of the given node sets.
std::vector<int> realized_colors(const Coloring& f, const std::vector<std::vector<Node>>& trees);

}  // namespace hl
