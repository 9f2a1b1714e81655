#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hl/tree.hpp"

namespace hl {

struct SubtreeReport {
  std::vector<Node> nodes;  // canonical order
  std::vector<int> level_set;

  int subtree_height() const { return static_cast<int>(level_set.size()); }
  // Nodes lying on subtree level xi, canonical order.
  std::vector<Node> level_nodes(int xi) const;
  // Subtree level of t, or nullopt if t is not a member.
  std::optional<int> subtree_level(const Node& t) const;
  bool contains(const Node& t) const;
  Node root() const;

  bool operator==(const SubtreeReport& other) const = default;
};

SubtreeReport make_report(std::vector<Node> nodes, std::vector<int> level_set);

struct Verdict {
  bool valid = true;
  std::vector<std::string> violations;

  void fail(std::string message) {
    valid = false;
    violations.push_back(std::move(message));
  }
};

Verdict validate_strong_subtree(const SubtreeReport& report, const TreeSpace& space);

// Calls fn on every strong subtree with the given witnessing level set, in deterministic order.
// Stops early when fn returns false.
void for_each_strong_subtree(const TreeSpace& space, const std::vector<int>& level_set,
                             const std::function<bool(const SubtreeReport&)>& fn);
std::vector<SubtreeReport> enumerate_strong_subtrees(const TreeSpace& space,
                                                     const std::vector<int>& level_set);

// Thins a strong subtree to the sub-level-set A, keeping least extensions.
SubtreeReport trim(const SubtreeReport& report, const TreeSpace& space, const std::vector<int>& A);

// Coordinatewise predecessor at subtree level i.
LevelSequence subtree_restrict(const LevelSequence& seq, int i,
                               const std::vector<SubtreeReport>& reports);
Node subtree_restrict(const Node& t, int i, const SubtreeReport& report);

// The whole space as a strong subtree with level set (0, 1, ..., n-1) truncated to h levels.
SubtreeReport full_subtree(const TreeSpace& space, int h);

// A strong subtree seen as a tree in its own right: subtree level xi becomes height xi and
// each step records which ambient successor was taken.
class SubtreeView {
 public:
  SubtreeView(const SubtreeReport& report, const TreeSpace& ambient);

  const TreeSpace& space() const { return space_; }
  const SubtreeReport& report() const { return report_; }
  Node compress(const Node& ambient_node) const;
  Node expand(const Node& compressed) const;
  std::vector<Node> expand_all(const std::vector<Node>& compressed) const;

 private:
  SubtreeReport report_;
  std::map<Node, Node> to_compressed_;
  std::map<Node, Node> to_ambient_;
  TreeSpace space_;
};

}  // namespace hl
