#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "hl/tree.hpp"

namespace hl {

// A total map from d-tuples of nodes to colors 0..colors-1.
class Coloring {
 public:
  using Fn = std::function<int(const std::vector<Node>&)>;

  static Coloring table(int arity, int colors, const std::map<std::vector<Node>, int>& entries);
  static Coloring named(const std::string& name, const nlohmann::json& params, int arity = -1, int colors = -1);
  static Coloring custom(int arity, int colors, Fn fn, std::string label = "custom");

  int arity() const { return arity_; }
  int colors() const { return colors_; }
  const std::string& kind() const { return kind_; }
  const std::string& name() const { return name_; }

  int operator()(const std::vector<Node>& tuple) const;
  // False only for tables without an entry for the tuple.
  bool defines(const std::vector<Node>& tuple) const;

  // Table entries in canonical tuple order; empty for non-table colorings.
  std::map<std::vector<Node>, int> entries() const;
  nlohmann::json to_json() const;
  static Coloring from_json(const nlohmann::json& j);

 private:
  Coloring() = default;

  int arity_ = 1;
  int colors_ = 1;
  std::string kind_;
  std::string name_;
  nlohmann::json params_;
  std::shared_ptr<const std::unordered_map<std::string, int>> table_;
  Fn fn_;
};

using ColoringFamily = std::vector<Coloring>;

// Index of a permutation of {0..k-1} in lexicographic order (identity is 0).
int permutation_index(const std::vector<int>& perm);
std::vector<int> permutation_from_index(int index, int k);
long long factorial(int k);
// Positions sorted by height, ties broken by position.
std::vector<int> height_sorting_permutation(const std::vector<Node>& tuple);

// Seeded pseudo-random table; stable across runs and platforms.
int hashed_color(unsigned long long seed, const std::vector<Node>& tuple, int colors);

// Materialised random table over all level sequences of the given spaces.
Coloring random_level_table(const std::vector<TreeSpace>& spaces, int colors, unsigned long long seed);

}  // namespace hl
