#include "hl/condition.hpp"

#include <algorithm>

#include "hl/error.hpp"

namespace hl {

using nlohmann::json;

IndexSet make_index_set(std::vector<Index> xs) {
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

IndexSet set_intersection(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

IndexSet set_union(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool is_subset(const IndexSet& a, const IndexSet& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

std::string show_set(const IndexSet& s) {
  std::string out = "{";
  for (size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "}";
}

IndexSet Condition::support() const {
  IndexSet out;
  for (const auto& [i, t] : assign) out.push_back(i);
  return out;
}

json Condition::to_json() const {
  json a = json::object();
  for (const auto& [i, t] : assign) {
    json tuple = json::array();
    for (const Node& x : t) tuple.push_back(x.str());
    a[std::to_string(i)] = tuple;
  }
  return {{"support", support()}, {"assign", a}};
}

Condition Condition::from_json(const json& j) {
  if (!j.is_object() || !j.contains("assign") || !j.at("assign").is_object()) {
    throw Error(ErrorKind::InvalidInput, "condition needs an 'assign' object");
  }
  Condition p;
  size_t arity = 0;
  for (const auto& [key, val] : j.at("assign").items()) {
    Index i = 0;
    try {
      size_t used = 0;
      i = std::stoll(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::InvalidInput, "condition index '" + key + "' is not an integer");
    }
    if (i < 0) throw Error(ErrorKind::InvalidInput, "condition index " + key + " is negative");
    if (!val.is_array() || val.empty()) throw Error(ErrorKind::InvalidInput, "value at " + key + " must be a non-empty node tuple");
    std::vector<Node> tuple;
    for (const auto& s : val) tuple.emplace_back(s.get<std::string>());
    if (arity != 0 && tuple.size() != arity) throw Error(ErrorKind::InvalidInput, "condition tuples have different lengths");
    arity = tuple.size();
    p.assign[i] = std::move(tuple);
  }
  if (j.contains("support")) {
    IndexSet declared = make_index_set(j.at("support").get<std::vector<Index>>());
    if (declared != p.support()) {
      throw Error(ErrorKind::InvalidInput, "support " + show_set(declared) + " does not match the assignment keys " +
                                               show_set(p.support()));
    }
  }
  return p;
}

Condition restrict_condition(const Condition& p, const IndexSet& B) {
  Condition out;
  for (const auto& [i, t] : p.assign) {
    if (std::binary_search(B.begin(), B.end(), i)) out.assign[i] = t;
  }
  return out;
}

bool extends(const Condition& q, const Condition& p) {
  for (const auto& [i, t] : p.assign) {
    auto it = q.assign.find(i);
    if (it == q.assign.end() || it->second.size() != t.size()) return false;
    for (size_t j = 0; j < t.size(); ++j) {
      if (!t[j].is_prefix_of(it->second[j])) return false;
    }
  }
  return true;
}

Condition glb(const std::vector<Condition>& conditions) {
  Condition out;
  for (const Condition& p : conditions) {
    for (const auto& [i, t] : p.assign) {
      auto it = out.assign.find(i);
      if (it == out.assign.end()) {
        out.assign[i] = t;
        continue;
      }
      if (it->second.size() != t.size()) {
        throw Error(ErrorKind::InvalidInput, "tuples at index " + std::to_string(i) + " have different lengths");
      }
      for (size_t j = 0; j < t.size(); ++j) {
        Node& cur = it->second[j];
        if (cur.is_prefix_of(t[j])) {
          cur = t[j];
        } else if (!t[j].is_prefix_of(cur)) {
          throw Error(ErrorKind::Incompatibility, "incompatible at index " + std::to_string(i) + ", coordinate " +
                                                      std::to_string(j) + ": \"" + cur.str() + "\" vs \"" +
                                                      t[j].str() + "\"");
        }
      }
    }
  }
  return out;
}

Index transport_index(Index i, const IndexSet& W0, const IndexSet& W1) {
  if (W0.size() != W1.size()) {
    throw Error(ErrorKind::InvalidInput, "index sets " + show_set(W0) + " and " + show_set(W1) + " differ in size");
  }
  auto it = std::lower_bound(W0.begin(), W0.end(), i);
  if (it == W0.end() || *it != i) throw Error(ErrorKind::InvalidInput, "index " + std::to_string(i) + " is outside " + show_set(W0));
  return W1[static_cast<size_t>(it - W0.begin())];
}

IndexSet transport_set(const IndexSet& s, const IndexSet& W0, const IndexSet& W1) {
  IndexSet out;
  for (Index i : s) out.push_back(transport_index(i, W0, W1));
  return out;
}

Condition copying_action(const Condition& p, const IndexSet& W0, const IndexSet& W1) {
  if (W0.size() != W1.size()) {
    throw Error(ErrorKind::InvalidInput, "index sets " + show_set(W0) + " and " + show_set(W1) + " differ in size");
  }
  if (!is_subset(p.support(), W0)) {
    throw Error(ErrorKind::InvalidInput, "support " + show_set(p.support()) + " is not inside " + show_set(W0));
  }
  Condition out;
  for (const auto& [i, t] : p.assign) out.assign[transport_index(i, W0, W1)] = t;
  return out;
}

std::optional<DeltaSystem> delta_system(const std::vector<IndexSet>& family, size_t target) {
  if (target == 0) throw Error(ErrorKind::InvalidInput, "target must be positive");
  if (target > family.size()) {
    throw Error(ErrorKind::InvalidInput, "target " + std::to_string(target) + " exceeds the family size " +
                                             std::to_string(family.size()));
  }
  if (target == 1) return DeltaSystem{{0}, family[0]};
  std::vector<size_t> chosen;
  IndexSet root;
  std::function<bool(size_t)> grow = [&](size_t from) -> bool {
    if (chosen.size() == target) return true;
    for (size_t i = from; i < family.size(); ++i) {
      if (chosen.size() == 1) {
        root = set_intersection(family[chosen[0]], family[i]);
      } else {
        bool ok = std::all_of(chosen.begin(), chosen.end(),
                              [&](size_t c) { return set_intersection(family[c], family[i]) == root; });
        if (!ok) continue;
      }
      chosen.push_back(i);
      if (grow(i + 1)) return true;
      chosen.pop_back();
    }
    return false;
  };
  for (size_t first = 0; first + target <= family.size(); ++first) {
    chosen = {first};
    if (grow(first + 1)) return DeltaSystem{chosen, root};
  }
  return std::nullopt;
}

std::vector<IndexSet> subsets_up_to(const IndexSet& ground, int k, bool exact) {
  std::vector<IndexSet> out;
  IndexSet cur;
  std::function<void(size_t)> rec = [&](size_t from) {
    if (!exact || static_cast<int>(cur.size()) == k) out.push_back(cur);
    if (static_cast<int>(cur.size()) == k) return;
    for (size_t i = from; i < ground.size(); ++i) {
      cur.push_back(ground[i]);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  std::sort(out.begin(), out.end(), [](const IndexSet& a, const IndexSet& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

const IndexSet& WMap::at(const IndexSet& u) const {
  auto it = W.find(u);
  if (it == W.end()) throw Error(ErrorKind::InvalidInput, "W is not defined at " + show_set(u));
  return it->second;
}

json WMap::to_json() const {
  json entries = json::array();
  for (const auto& [u, w] : W) entries.push_back({{"u", u}, {"W", w}});
  return {{"E", E}, {"entries", entries}};
}

WMap WMap::from_json(const json& j) {
  if (!j.is_object() || !j.contains("E") || !j.contains("entries")) {
    throw Error(ErrorKind::InvalidInput, "W-map needs 'E' and 'entries'");
  }
  WMap m;
  auto E = j.at("E").get<std::vector<Index>>();
  m.E = make_index_set(E);
  if (m.E.size() != E.size()) throw Error(ErrorKind::InvalidInput, "E has repeated elements");
  for (const auto& e : j.at("entries")) {
    IndexSet u = make_index_set(e.at("u").get<std::vector<Index>>());
    if (!is_subset(u, m.E)) throw Error(ErrorKind::InvalidInput, "entry " + show_set(u) + " is not a subset of E");
    if (!m.W.emplace(u, make_index_set(e.at("W").get<std::vector<Index>>())).second) {
      throw Error(ErrorKind::InvalidInput, "entry " + show_set(u) + " appears twice");
    }
  }
  return m;
}

std::vector<std::string> check_raw_preconditions(const WMap& raw, int d) {
  std::vector<std::string> out;
  for (const IndexSet& u : subsets_up_to(raw.E, d)) {
    auto it = raw.W.find(u);
    if (it == raw.W.end()) {
      out.push_back("W' is not defined at " + show_set(u));
      continue;
    }
    if (!is_subset(u, it->second)) out.push_back("containment fails at " + show_set(u));
    for (Index x : raw.E) {
      if (std::binary_search(u.begin(), u.end(), x) || static_cast<int>(u.size()) >= d) continue;
      IndexSet v = make_index_set([&] { auto c = u; c.push_back(x); return c; }());
      auto jt = raw.W.find(v);
      if (jt != raw.W.end() && !is_subset(it->second, jt->second)) {
        out.push_back("monotonicity fails at " + show_set(u) + " inside " + show_set(v));
      }
    }
  }
  return out;
}

namespace {

// Membership pattern of each member set, read along the sorted union.
std::vector<unsigned> signature(const std::vector<const IndexSet*>& sets) {
  IndexSet all;
  for (const IndexSet* s : sets) all = set_union(all, *s);
  std::vector<unsigned> sig;
  sig.reserve(all.size());
  for (Index x : all) {
    unsigned mask = 0;
    for (size_t i = 0; i < sets.size(); ++i) {
      if (std::binary_search(sets[i]->begin(), sets[i]->end(), x)) mask |= 1u << i;
    }
    sig.push_back(mask);
  }
  return sig;
}

}  // namespace

std::vector<std::string> check_raw_coherence(const WMap& raw, int d, int kmax) {
  std::vector<std::string> out;
  auto dsets = subsets_up_to(raw.E, d, true);
  for (int k = 1; k <= kmax; ++k) {
    std::map<std::vector<unsigned>, std::pair<std::vector<unsigned>, std::string>> seen;
    std::vector<size_t> idx(static_cast<size_t>(k), 0);
    if (dsets.empty()) break;
    while (true) {
      std::vector<const IndexSet*> us;
      std::vector<const IndexSet*> ws;
      std::string label;
      for (size_t i : idx) {
        us.push_back(&dsets[i]);
        ws.push_back(&raw.at(dsets[i]));
        label += show_set(dsets[i]);
      }
      auto su = signature(us);
      auto sw = signature(ws);
      auto [it, fresh] = seen.emplace(su, std::make_pair(sw, label));
      if (!fresh && it->second.first != sw) {
        out.push_back("k=" + std::to_string(k) + ": " + it->second.second + " and " + label +
                      " are isomorphic but their W' images are not");
        if (out.size() >= 32) return out;
      }
      size_t p = idx.size();
      while (p > 0 && ++idx[p - 1] == dsets.size()) idx[--p] = 0;
      if (p == 0) break;
    }
  }
  return out;
}

WMap build_w_map(const WMap& raw, int d, int stride, XBound bound) {
  if (d < 1) throw Error(ErrorKind::InvalidInput, "d must be at least 1");
  if (stride < 0) stride = d + 2;
  if (stride < 1) throw Error(ErrorKind::InvalidInput, "stride must be positive");
  auto problems = check_raw_preconditions(raw, d);
  if (!problems.empty()) throw Error(ErrorKind::PreconditionViolation, problems.front());

  auto dsets = subsets_up_to(raw.E, d, true);
  if (bound == XBound::Unbounded && dsets.size() > 20) {
    throw Error(ErrorKind::InvalidInput, "unbounded X search is limited to 20 d-sets");
  }
  const size_t max_x = bound == XBound::Bounded ? static_cast<size_t>(d + 1) : dsets.size();
  // (intersection of X, intersection of W' over X) for every admissible X.
  std::vector<std::pair<IndexSet, IndexSet>> blocks;
  std::function<void(size_t, size_t, const IndexSet&, const IndexSet&)> rec =
      [&](size_t from, size_t size, const IndexSet& cap_x, const IndexSet& cap_w) {
        for (size_t i = from; i < dsets.size(); ++i) {
          IndexSet cx = size == 0 ? dsets[i] : set_intersection(cap_x, dsets[i]);
          IndexSet cw = size == 0 ? raw.at(dsets[i]) : set_intersection(cap_w, raw.at(dsets[i]));
          blocks.emplace_back(cx, cw);
          if (size + 1 < max_x) rec(i + 1, size + 1, cx, cw);
        }
      };
  rec(0, 0, {}, {});

  WMap out;
  for (size_t i = 0; i < raw.E.size(); i += static_cast<size_t>(stride)) out.E.push_back(raw.E[i]);
  for (const IndexSet& u : subsets_up_to(out.E, d)) {
    IndexSet w;
    for (const auto& [cx, cw] : blocks) {
      if (is_subset(cx, u)) w = set_union(w, cw);
    }
    out.W[u] = w;
  }
  return out;
}

json ClReport::to_json() const {
  return {{"pass", pass()}, {"containment", containment}, {"type", type}, {"cl3", cl3}, {"cl4", cl4}};
}

ClReport verify_cl(const WMap& wmap, int d) {
  ClReport r;
  auto dsets = subsets_up_to(wmap.E, d, true);
  for (const IndexSet& u : dsets) {
    if (!is_subset(u, wmap.at(u))) r.containment.push_back(show_set(u) + " is not inside W(u)");
  }
  for (const IndexSet& u : dsets) {
    for (const IndexSet& v : dsets) {
      const IndexSet& wu = wmap.at(u);
      const IndexSet& wv = wmap.at(v);
      if (wu.size() != wv.size()) {
        r.type.push_back("W" + show_set(u) + " and W" + show_set(v) + " have different order types");
        continue;
      }
      if (is_subset(u, wu) && transport_set(u, wu, wv) != v) {
        r.type.push_back("transport W" + show_set(u) + " -> W" + show_set(v) + " does not carry u to v");
      }
      IndexSet lhs = set_intersection(wu, wv);
      const IndexSet& rhs = wmap.at(set_intersection(u, v));
      if (lhs != rhs) {
        r.cl3.push_back("(u,v)=(" + show_set(u) + "," + show_set(v) + "): W(u)nW(v)=" + show_set(lhs) +
                        " but W(unv)=" + show_set(rhs));
      }
      for (const IndexSet& u1 : subsets_up_to(u, d)) {
        IndexSet v1 = transport_set(u1, u, v);
        const IndexSet& w1 = wmap.at(u1);
        if (!is_subset(w1, wu)) {
          r.cl4.push_back("W" + show_set(u1) + " is not inside W" + show_set(u));
          continue;
        }
        IndexSet moved = transport_set(w1, wu, wv);
        if (moved != wmap.at(v1)) {
          r.cl4.push_back("(u2,u1,u2',u1')=(" + show_set(u) + "," + show_set(u1) + "," + show_set(v) + "," +
                          show_set(v1) + "): h(W(u1))=" + show_set(moved) + " but W(u1')=" + show_set(wmap.at(v1)));
        }
      }
    }
  }
  return r;
}

std::vector<std::string> check_transport(const WMap& wmap, const IndexSet& u, const IndexSet& v,
                                         const std::vector<Condition>& conditions, const Labelling& label) {
  std::vector<std::string> out;
  const IndexSet& wu = wmap.at(u);
  const IndexSet& wv = wmap.at(v);
  for (const Condition& p : conditions) {
    if (!is_subset(p.support(), wu)) continue;
    Condition q = copying_action(p, wu, wv);
    int a = label(u, p);
    int b = label(v, q);
    if (a != b) {
      out.push_back("label " + std::to_string(a) + " at " + show_set(u) + " becomes " + std::to_string(b) + " at " +
                    show_set(v) + " for " + p.to_json().dump());
    }
  }
  return out;
}

}  // namespace hl
