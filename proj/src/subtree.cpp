#include "hl/subtree.hpp"

#include <algorithm>
#include <set>

#include "hl/error.hpp"

namespace hl {

namespace {

void check_level_set(const std::vector<int>& level_set, const TreeSpace& space) {
  if (level_set.empty()) throw Error(ErrorKind::InvalidInput, "level set is empty");
  for (size_t i = 0; i < level_set.size(); ++i) {
    if (level_set[i] < 0 || level_set[i] >= space.height()) {
      throw Error(ErrorKind::InvalidInput,
                  "level " + std::to_string(level_set[i]) + " is outside the truncation");
    }
    if (i > 0 && level_set[i] <= level_set[i - 1]) {
      throw Error(ErrorKind::InvalidInput, "level set is not strictly increasing");
    }
  }
}

std::string quoted(const Node& t) { return "\"" + t.str() + "\""; }

}  // namespace

std::vector<Node> SubtreeReport::level_nodes(int xi) const {
  std::vector<Node> out;
  if (xi < 0 || xi >= subtree_height()) return out;
  int a = level_set[static_cast<size_t>(xi)];
  for (const Node& t : nodes) {
    if (t.height() == a) out.push_back(t);
  }
  return out;
}

std::optional<int> SubtreeReport::subtree_level(const Node& t) const {
  if (!contains(t)) return std::nullopt;
  auto it = std::find(level_set.begin(), level_set.end(), t.height());
  if (it == level_set.end()) return std::nullopt;
  return static_cast<int>(it - level_set.begin());
}

bool SubtreeReport::contains(const Node& t) const {
  return std::binary_search(nodes.begin(), nodes.end(), t);
}

Node SubtreeReport::root() const {
  if (nodes.empty()) throw Error(ErrorKind::InvalidInput, "subtree has no nodes");
  return nodes.front();
}

SubtreeReport make_report(std::vector<Node> nodes, std::vector<int> level_set) {
  return SubtreeReport{sorted_canonical(std::move(nodes)), std::move(level_set)};
}

Verdict validate_strong_subtree(const SubtreeReport& report, const TreeSpace& space) {
  Verdict v;
  for (const Node& t : report.nodes) space.require(t);
  if (report.nodes.empty()) {
    v.fail("subtree has no nodes");
    return v;
  }
  if (report.level_set.empty()) {
    v.fail("level set is empty");
    return v;
  }
  for (size_t i = 0; i < report.level_set.size(); ++i) {
    if (i > 0 && report.level_set[i] <= report.level_set[i - 1]) {
      v.fail("level set is not strictly increasing");
      return v;
    }
  }
  std::set<int> levels(report.level_set.begin(), report.level_set.end());
  for (const Node& t : report.nodes) {
    if (!levels.count(t.height())) {
      v.fail("node " + quoted(t) + " lies on level " + std::to_string(t.height()) +
             ", which is not in the level set");
    }
  }
  int h = report.subtree_height();
  std::vector<std::vector<Node>> by_level(static_cast<size_t>(h));
  for (int xi = 0; xi < h; ++xi) by_level[static_cast<size_t>(xi)] = report.level_nodes(xi);
  if (by_level[0].size() != 1) {
    v.fail("subtree has " + std::to_string(by_level[0].size()) + " nodes on its root level " +
           std::to_string(report.level_set[0]) + "; expected exactly one");
  }
  for (int xi = 0; xi + 1 < h; ++xi) {
    const auto& cur = by_level[static_cast<size_t>(xi)];
    const auto& next = by_level[static_cast<size_t>(xi + 1)];
    int a_next = report.level_set[static_cast<size_t>(xi + 1)];
    for (const Node& s : cur) {
      for (const Node& t : space.successors(s)) {
        size_t count = 0;
        for (const Node& u : next) count += t.is_prefix_of(u) ? 1 : 0;
        if (count == 0) {
          v.fail("successor " + quoted(t) + " of " + quoted(s) + " has no extension at level " +
                 std::to_string(a_next));
        } else if (count > 1) {
          v.fail("successor " + quoted(t) + " of " + quoted(s) + " has " + std::to_string(count) +
                 " extensions at level " + std::to_string(a_next));
        }
      }
    }
    for (const Node& u : next) {
      bool covered = false;
      for (const Node& s : cur) covered = covered || s.is_prefix_of(u);
      if (!covered) {
        v.fail("node " + quoted(u) + " extends no subtree node on level " +
               std::to_string(report.level_set[static_cast<size_t>(xi)]));
      }
    }
  }
  return v;
}

void for_each_strong_subtree(const TreeSpace& space, const std::vector<int>& level_set,
                             const std::function<bool(const SubtreeReport&)>& fn) {
  check_level_set(level_set, space);
  const int h = static_cast<int>(level_set.size());
  std::vector<std::vector<Node>> levels(static_cast<size_t>(h));

  // Returns false when the consumer asked to stop.
  std::function<bool(int)> grow = [&](int xi) -> bool {
    if (xi + 1 == h) {
      std::vector<Node> all;
      for (const auto& lv : levels) all.insert(all.end(), lv.begin(), lv.end());
      return fn(make_report(std::move(all), level_set));
    }
    std::vector<std::vector<Node>> choices;
    for (const Node& s : levels[static_cast<size_t>(xi)]) {
      for (const Node& t : space.successors(s)) {
        choices.push_back(space.extensions_at(t, level_set[static_cast<size_t>(xi + 1)]));
        if (choices.back().empty()) return true;
      }
    }
    bool keep_going = true;
    for_each_product(choices, [&](const std::vector<Node>& pick) {
      levels[static_cast<size_t>(xi + 1)] = sorted_canonical(pick);
      keep_going = grow(xi + 1);
      return keep_going;
    });
    return keep_going;
  };

  for (const Node& root : space.level(level_set[0])) {
    levels[0] = {root};
    if (!grow(0)) return;
  }
}

std::vector<SubtreeReport> enumerate_strong_subtrees(const TreeSpace& space,
                                                     const std::vector<int>& level_set) {
  std::vector<SubtreeReport> out;
  for_each_strong_subtree(space, level_set, [&](const SubtreeReport& r) {
    out.push_back(r);
    return true;
  });
  return out;
}

SubtreeReport trim(const SubtreeReport& report, const TreeSpace& space, const std::vector<int>& A) {
  if (A.empty()) throw Error(ErrorKind::InvalidInput, "trim target level set is empty");
  size_t pos = 0;
  for (size_t k = 0; k < A.size(); ++k) {
    if (k > 0 && A[k] <= A[k - 1]) {
      throw Error(ErrorKind::InvalidInput, "trim target level set is not strictly increasing");
    }
    while (pos < report.level_set.size() && report.level_set[pos] != A[k]) ++pos;
    if (pos == report.level_set.size()) {
      throw Error(ErrorKind::InvalidInput,
                  "level " + std::to_string(A[k]) + " is not in the subtree's level set");
    }
  }
  auto on_level = [&](int a) {
    std::vector<Node> out;
    for (const Node& t : report.nodes) {
      if (t.height() == a) out.push_back(t);
    }
    return out;
  };
  std::vector<Node> first = on_level(A[0]);
  if (first.empty()) throw Error(ErrorKind::InvalidInput, "subtree has no node on level " + std::to_string(A[0]));
  std::vector<Node> current = {first.front()};
  std::vector<Node> all = current;
  for (size_t k = 0; k + 1 < A.size(); ++k) {
    std::vector<Node> pool = on_level(A[k + 1]);
    std::vector<Node> next;
    for (const Node& s : current) {
      for (const Node& t : space.successors(s)) {
        auto it = std::find_if(pool.begin(), pool.end(), [&](const Node& u) { return t.is_prefix_of(u); });
        if (it == pool.end()) {
          throw Error(ErrorKind::InvalidInput, "successor \"" + t.str() + "\" has no extension on level " +
                                                   std::to_string(A[k + 1]) + " inside the subtree");
        }
        next.push_back(*it);
      }
    }
    next = sorted_canonical(std::move(next));
    all.insert(all.end(), next.begin(), next.end());
    current = std::move(next);
  }
  return make_report(std::move(all), A);
}

Node subtree_restrict(const Node& t, int i, const SubtreeReport& report) {
  auto lv = report.subtree_level(t);
  if (!lv) throw Error(ErrorKind::UnknownNode, "node \"" + t.str() + "\" is not in the subtree");
  if (i < 0 || i > *lv) {
    throw Error(ErrorKind::OutOfRange, "subtree level " + std::to_string(i) + " exceeds the height of \"" +
                                           t.str() + "\"");
  }
  Node p = t.prefix(report.level_set[static_cast<size_t>(i)]);
  if (!report.contains(p)) {
    throw Error(ErrorKind::UnknownNode, "predecessor \"" + p.str() + "\" is missing from the subtree");
  }
  return p;
}

LevelSequence subtree_restrict(const LevelSequence& seq, int i, const std::vector<SubtreeReport>& reports) {
  if (seq.size() != reports.size()) {
    throw Error(ErrorKind::InvalidInput, "one subtree per coordinate is required");
  }
  LevelSequence out;
  out.reserve(seq.size());
  for (size_t j = 0; j < seq.size(); ++j) out.push_back(subtree_restrict(seq[j], i, reports[j]));
  return out;
}

SubtreeReport full_subtree(const TreeSpace& space, int h) {
  if (h < 1 || h > space.height()) throw Error(ErrorKind::OutOfRange, "subtree height out of range");
  std::vector<Node> all;
  std::vector<int> ls;
  for (int a = 0; a < h; ++a) {
    auto lv = space.level(a);
    all.insert(all.end(), lv.begin(), lv.end());
    ls.push_back(a);
  }
  return make_report(std::move(all), std::move(ls));
}

namespace {

TreeSpace build_view(const SubtreeReport& report, const TreeSpace& ambient, std::map<Node, Node>& down,
                     std::map<Node, Node>& up) {
  int h = report.subtree_height();
  if (h == 0 || report.nodes.empty()) throw Error(ErrorKind::InvalidInput, "empty subtree");
  Node root = report.level_nodes(0).at(0);
  down[root] = Node();
  up[Node()] = root;
  std::vector<Node> compressed = {Node()};
  for (int xi = 0; xi + 1 < h; ++xi) {
    auto next = report.level_nodes(xi + 1);
    for (const Node& s : report.level_nodes(xi)) {
      if (!down.count(s)) continue;
      for (const Node& u : next) {
        if (!s.is_prefix_of(u)) continue;
        Node c = down[s].child(u.digit(s.height()));
        if (up.count(c)) {
          throw Error(ErrorKind::InvalidInput, "subtree is not strong at \"" + u.str() + "\"");
        }
        down[u] = c;
        up[c] = u;
        compressed.push_back(c);
      }
    }
  }
  (void)ambient;
  return TreeSpace::from_nodes(compressed);
}

}  // namespace

SubtreeView::SubtreeView(const SubtreeReport& report, const TreeSpace& ambient)
    : report_(report), space_(build_view(report_, ambient, to_compressed_, to_ambient_)) {}

Node SubtreeView::compress(const Node& ambient_node) const {
  auto it = to_compressed_.find(ambient_node);
  if (it == to_compressed_.end()) {
    throw Error(ErrorKind::UnknownNode, "node \"" + ambient_node.str() + "\" is not in the subtree");
  }
  return it->second;
}

Node SubtreeView::expand(const Node& compressed) const {
  auto it = to_ambient_.find(compressed);
  if (it == to_ambient_.end()) {
    throw Error(ErrorKind::UnknownNode, "node \"" + compressed.str() + "\" is not in the subtree view");
  }
  return it->second;
}

std::vector<Node> SubtreeView::expand_all(const std::vector<Node>& compressed) const {
  std::vector<Node> out;
  out.reserve(compressed.size());
  for (const Node& c : compressed) out.push_back(expand(c));
  return out;
}

}  // namespace hl
