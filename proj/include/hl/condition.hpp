#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "hl/tree.hpp"

namespace hl {

using Index = long long;
using IndexSet = std::vector<Index>;  // sorted, no repeats

IndexSet make_index_set(std::vector<Index> xs);
IndexSet set_intersection(const IndexSet& a, const IndexSet& b);
IndexSet set_union(const IndexSet& a, const IndexSet& b);
bool is_subset(const IndexSet& a, const IndexSet& b);
std::string show_set(const IndexSet& s);

struct Condition {
  std::map<Index, std::vector<Node>> assign;

  IndexSet support() const;
  bool operator==(const Condition& other) const = default;

  nlohmann::json to_json() const;
  static Condition from_json(const nlohmann::json& j);
};

Condition restrict_condition(const Condition& p, const IndexSet& B);

// q extends p: support(p) within support(q) and every node of p is below the matching node of q.
bool extends(const Condition& q, const Condition& p);

// Throws Incompatibility naming the first clashing (index, coordinate).
Condition glb(const std::vector<Condition>& conditions);

// Order isomorphism W0 -> W1 applied to an index.
Index transport_index(Index i, const IndexSet& W0, const IndexSet& W1);
IndexSet transport_set(const IndexSet& s, const IndexSet& W0, const IndexSet& W1);
Condition copying_action(const Condition& p, const IndexSet& W0, const IndexSet& W1);

struct DeltaSystem {
  std::vector<size_t> members;  // indices into the family
  IndexSet root;
};

std::optional<DeltaSystem> delta_system(const std::vector<IndexSet>& family, size_t target);

// All subsets of `ground` of size at most k (exactly k when exact is set), in lexicographic order.
std::vector<IndexSet> subsets_up_to(const IndexSet& ground, int k, bool exact = false);

struct WMap {
  IndexSet E;
  std::map<IndexSet, IndexSet> W;

  const IndexSet& at(const IndexSet& u) const;
  nlohmann::json to_json() const;
  static WMap from_json(const nlohmann::json& j);
};

enum class XBound { Bounded, Unbounded };

// W(u) = union of the intersections of W'(v) over X within [E']^d with the intersection of X inside u.
// Bounded search takes |X| <= d+1.
WMap build_w_map(const WMap& raw, int d, int stride = -1, XBound bound = XBound::Bounded);

// Raw-map hypotheses: containment and monotonicity. Empty when both hold.
std::vector<std::string> check_raw_preconditions(const WMap& raw, int d);

// Isomorphism-type coherence for k-tuples of d-sets, k <= kmax.
std::vector<std::string> check_raw_coherence(const WMap& raw, int d, int kmax = 3);

struct ClReport {
  std::vector<std::string> containment;
  std::vector<std::string> type;
  std::vector<std::string> cl3;
  std::vector<std::string> cl4;
  bool pass() const { return containment.empty() && type.empty() && cl3.empty() && cl4.empty(); }
  nlohmann::json to_json() const;
};

ClReport verify_cl(const WMap& wmap, int d);

// For each condition p supported in W(u): label(u, p) == label(v, h_{W(u),W(v)}(p)).
using Labelling = std::function<int(const IndexSet&, const Condition&)>;
std::vector<std::string> check_transport(const WMap& wmap, const IndexSet& u, const IndexSet& v,
                                         const std::vector<Condition>& conditions, const Labelling& label);

}  // namespace hl
