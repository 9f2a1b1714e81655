#pragma once

#include <compare>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace hl {

// A finite sequence of digits. Height is the length; the empty node is the root.
class Node {
 public:
  Node() = default;
  explicit Node(std::string digits);

  const std::string& str() const { return digits_; }
  int height() const { return static_cast<int>(digits_.size()); }
  int digit(int i) const { return digits_[static_cast<size_t>(i)] - '0'; }
  int max_digit() const;

  Node prefix(int len) const;
  Node child(int digit) const;

  // s.is_prefix_of(t) means s is an initial segment of t (s == t allowed).
  bool is_prefix_of(const Node& other) const;
  bool comparable(const Node& other) const;

  bool operator==(const Node& other) const = default;
  // Canonical order: height first, then digits.
  std::strong_ordering operator<=>(const Node& other) const;

 private:
  std::string digits_;
};

enum class LexOrder { Less, Equal, Greater };

std::string_view lex_order_name(LexOrder o);

// Lexicographic order on binary sequences: x0 < x < x1.
LexOrder lex_compare(const Node& s, const Node& t);
bool lex_less(const Node& s, const Node& t);

class TreeSpace {
 public:
  static TreeSpace uniform(int branching, int height);
  static TreeSpace from_nodes(const std::vector<Node>& nodes);

  int branching() const { return branching_; }
  int height() const { return height_; }
  bool is_uniform() const { return !explicit_; }

  bool contains(const Node& t) const;
  void require(const Node& t) const;
  Node root() const { return Node(); }

  std::vector<Node> level(int alpha) const;
  std::vector<Node> successors(const Node& t) const;
  // Nodes of level `alpha` extending t (t itself when alpha == ht(t)).
  std::vector<Node> extensions_at(const Node& t, int alpha) const;
  // All extensions of t including t, canonical order.
  std::vector<Node> extensions(const Node& t) const;
  std::vector<Node> nodes() const;
  size_t size() const;
  // Explicit node set, empty in uniform mode.
  const std::set<Node>& explicit_nodes() const { return nodes_; }

  bool operator==(const TreeSpace& other) const;

 private:
  TreeSpace() = default;

  int branching_ = 2;
  int height_ = 1;
  bool explicit_ = false;
  std::set<Node> nodes_;
  std::vector<std::vector<Node>> levels_;
};

using LevelSequence = std::vector<Node>;

// Common height of a level sequence; throws InvalidInput when heights differ.
int sequence_height(const LevelSequence& seq);
LevelSequence restrict(const LevelSequence& seq, int xi, const TreeSpace& space);
LevelSequence restrict(const LevelSequence& seq, int xi);

std::string tuple_key(const std::vector<Node>& tuple);
std::vector<Node> parse_tuple_key(std::string_view key);
std::vector<Node> sorted_canonical(std::vector<Node> nodes);

// Cartesian product of node lists in lexicographic (first coordinate slowest) order.
template <typename Fn>
bool for_each_product(const std::vector<std::vector<Node>>& factors, Fn&& fn) {
  for (const auto& f : factors) {
    if (f.empty()) return true;
  }
  std::vector<size_t> idx(factors.size(), 0);
  std::vector<Node> tuple(factors.size());
  for (size_t j = 0; j < factors.size(); ++j) tuple[j] = factors[j][0];
  while (true) {
    if (!fn(static_cast<const std::vector<Node>&>(tuple))) return false;
    size_t j = factors.size();
    while (j > 0) {
      --j;
      if (++idx[j] < factors[j].size()) {
        tuple[j] = factors[j][idx[j]];
        break;
      }
      idx[j] = 0;
      tuple[j] = factors[j][0];
      if (j == 0) return true;
    }
    if (factors.empty()) return true;
  }
}

}  // namespace hl
