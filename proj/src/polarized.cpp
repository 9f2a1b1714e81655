#include "hl/polarized.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

#include "hl/error.hpp"

namespace hl {

using nlohmann::json;

namespace {

BigInt binomial(int n, int k) {
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

std::string big_str(const BigInt& v) { return v.str(); }

json perms_json(const std::vector<std::vector<int>>& ps) {
  json out = json::array();
  for (const auto& p : ps) out.push_back(p);
  return out;
}

std::vector<int> identity(int k) {
  std::vector<int> p(static_cast<size_t>(k));
  std::iota(p.begin(), p.end(), 0);
  return p;
}

void require_permutation(const std::vector<int>& p, int k) {
  std::vector<int> s = p;
  std::sort(s.begin(), s.end());
  if (s != identity(k)) throw Error(ErrorKind::InvalidInput, "pattern is not a permutation of 0.." + std::to_string(k - 1));
}

}  // namespace

BigInt tangent(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "tangent numbers start at n = 1");
  std::vector<BigInt> t(static_cast<size_t>(n) + 1);
  t[1] = 1;
  for (int m = 2; m <= n; ++m) {
    BigInt sum = 0;
    for (int i = 1; i <= m - 1; ++i) sum += binomial(2 * m - 2, 2 * i - 1) * t[static_cast<size_t>(i)] * t[static_cast<size_t>(m - i)];
    t[static_cast<size_t>(m)] = sum;
  }
  return t[static_cast<size_t>(n)];
}

BigInt devlin_lower_bound(int d) {
  if (d < 2) throw Error(ErrorKind::InvalidInput, "the Devlin bound is defined for d >= 2");
  BigInt prod = 1;
  BigInt fact = 1;
  for (int i = 0; i < d; ++i) {
    if (i > 0) fact *= i;
    prod *= fact;
  }
  BigInt pow2 = BigInt(1) << (d - 1);
  return tangent(d) + pow2 * (prod - 1);
}

DegreeTable degree_table(int k) {
  if (k < 1) throw Error(ErrorKind::InvalidInput, "degree table needs k >= 1");
  DegreeTable t;
  t.k = k;
  BigInt fact = 1;
  for (int d = 1; d <= k; ++d) {
    t.tangent.push_back(tangent(d));
    if (d >= 2) t.devlin.push_back(devlin_lower_bound(d));
    fact *= d + 1;
    t.factorial.push_back(fact);
  }
  return t;
}

json DegreeTable::to_json() const {
  json rows = json::array();
  for (int d = 1; d <= k; ++d) {
    auto i = static_cast<size_t>(d - 1);
    json row = {{"d", d}, {"tangent", big_str(tangent[i])}, {"polarized", big_str(factorial[i])}};
    row["devlin_lower_bound"] = d >= 2 ? json(big_str(devlin[i - 1])) : json(nullptr);
    rows.push_back(row);
  }
  return {{"k", k}, {"rows", rows}};
}

std::string DegreeTable::to_text() const {
  std::vector<std::vector<std::string>> cells = {{"d", "t_d", "t_d+ >=", "(d+1)!"}};
  for (int d = 1; d <= k; ++d) {
    auto i = static_cast<size_t>(d - 1);
    cells.push_back({std::to_string(d), big_str(tangent[i]), d >= 2 ? big_str(devlin[i - 1]) : "-", big_str(factorial[i])});
  }
  std::vector<size_t> width(4, 0);
  for (const auto& row : cells) {
    for (size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  for (const auto& row : cells) {
    for (size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out << "  ";
      out << std::setw(static_cast<int>(width[c])) << row[c];
    }
    out << "\n";
  }
  return out.str();
}

int TupleType::index() const { return permutation_index(perm); }

TupleType tuple_type(const std::vector<Node>& tuple) {
  TupleType t;
  t.perm = height_sorting_permutation(tuple);
  t.tie_mask.assign(tuple.size(), false);
  for (size_t i = 0; i < tuple.size(); ++i) {
    for (size_t j = 0; j < tuple.size(); ++j) {
      if (i != j && tuple[i].height() == tuple[j].height()) t.tie_mask[i] = true;
    }
  }
  return t;
}

Coloring height_permutation_coloring(int d) {
  return Coloring::named("height-permutation", {{"d", d}}, d + 1);
}

Coloring type_coloring(int d, TypeFunction type, std::string label) {
  if (d < 1) throw Error(ErrorKind::InvalidInput, "type coloring needs d >= 1");
  return Coloring::custom(d + 1, static_cast<int>(factorial(d + 1)),
                          [type = std::move(type)](const std::vector<Node>& t) { return permutation_index(type(t)); },
                          std::move(label));
}

json LowerBoundReport::to_json() const {
  return {{"all_realized", all_realized}, {"realized", perms_json(realized)}, {"missing", perms_json(missing)}};
}

LowerBoundReport verify_lower_bound(const std::vector<SubtreeReport>& subtrees, int d) {
  if (d < 1) throw Error(ErrorKind::InvalidInput, "d must be at least 1");
  if (subtrees.size() != static_cast<size_t>(d + 1)) {
    throw Error(ErrorKind::InvalidInput, "expected " + std::to_string(d + 1) + " subtrees, got " +
                                             std::to_string(subtrees.size()));
  }
  // Types depend on heights only, so one representative per ambient level suffices.
  std::vector<std::vector<int>> heights;
  for (size_t j = 0; j < subtrees.size(); ++j) {
    std::set<int> hs;
    for (const Node& t : subtrees[j].nodes) hs.insert(t.height());
    if (static_cast<int>(hs.size()) < d + 1) {
      throw Error(ErrorKind::InsufficientSpread, "subtree " + std::to_string(j) + " meets only " +
                                                     std::to_string(hs.size()) + " levels, need " +
                                                     std::to_string(d + 1));
    }
    heights.emplace_back(hs.begin(), hs.end());
  }
  std::set<std::vector<int>> seen;
  std::vector<size_t> idx(heights.size(), 0);
  while (true) {
    std::vector<int> hs;
    for (size_t j = 0; j < heights.size(); ++j) hs.push_back(heights[j][idx[j]]);
    std::set<int> distinct(hs.begin(), hs.end());
    if (distinct.size() == hs.size()) {
      std::vector<int> perm = identity(d + 1);
      std::sort(perm.begin(), perm.end(), [&](int a, int b) { return hs[static_cast<size_t>(a)] < hs[static_cast<size_t>(b)]; });
      seen.insert(perm);
    }
    size_t j = heights.size();
    while (j > 0 && ++idx[j - 1] == heights[j - 1].size()) idx[--j] = 0;
    if (j == 0) break;
  }
  LowerBoundReport r;
  for (int i = 0; i < factorial(d + 1); ++i) {
    auto p = permutation_from_index(i, d + 1);
    (seen.count(p) ? r.realized : r.missing).push_back(p);
  }
  r.all_realized = r.missing.empty();
  return r;
}

Fraction parse_fraction(const std::string& text) {
  try {
    auto slash = text.find('/');
    if (slash != std::string::npos) {
      long long num = std::stoll(text.substr(0, slash));
      long long den = std::stoll(text.substr(slash + 1));
      if (den == 0) throw Error(ErrorKind::InvalidInput, "zero denominator in '" + text + "'");
      return Fraction(num, den);
    }
    auto dot = text.find('.');
    if (dot == std::string::npos) return Fraction(std::stoll(text), 1);
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    long long den = 1;
    for (size_t i = dot + 1; i < text.size(); ++i) den *= 10;
    return Fraction(std::stoll(digits), den);
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::InvalidInput, "cannot parse '" + text + "' as a fraction");
  }
}

std::string fraction_string(const Fraction& q) {
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

json AlmostAllResult::to_json() const {
  json subs = json::array();
  for (const auto& r : subtrees) {
    json nodes = json::array();
    for (const Node& t : r.nodes) nodes.push_back(t.str());
    subs.push_back({{"nodes", nodes}, {"level_set", r.level_set}});
  }
  return {{"within_budget", within_budget},
          {"subtrees", subs},
          {"level_set", level_set},
          {"pattern", pattern},
          {"gamma", gamma},
          {"violations", violations},
          {"total", total},
          {"fraction", fraction_string(fraction)},
          {"epsilon", fraction_string(epsilon)}};
}

std::pair<long long, long long> count_exceptions(const Coloring& f, const std::vector<SubtreeReport>& subtrees,
                                                 const std::vector<int>& pattern, int gamma) {
  std::vector<std::vector<Node>> factors;
  for (const auto& r : subtrees) factors.push_back(r.nodes);
  long long bad = 0;
  long long total = 0;
  for_each_product(factors, [&](const std::vector<Node>& t) {
    for (size_t k = 1; k < pattern.size(); ++k) {
      if (t[static_cast<size_t>(pattern[k - 1])].height() >= t[static_cast<size_t>(pattern[k])].height()) return true;
    }
    ++total;
    if (f(t) != gamma) ++bad;
    return true;
  });
  return {bad, total};
}

AlmostAllResult almost_all_homogenize(const Coloring& f, const std::vector<TreeSpace>& spaces,
                                      const AlmostAllOptions& opts) {
  const int d = static_cast<int>(spaces.size());
  if (d < 2) throw Error(ErrorKind::InvalidInput, "almost-all homogenization needs d >= 2");
  if (f.arity() != d) throw Error(ErrorKind::InvalidInput, "coloring arity does not match the number of factor trees");
  std::vector<int> pattern = opts.pattern.empty() ? identity(d) : opts.pattern;
  require_permutation(pattern, d);
  int n = spaces[0].height();
  for (const auto& s : spaces) n = std::min(n, s.height());
  const int H = opts.height;
  if (H < d) throw Error(ErrorKind::InvalidInput, "subtree height must be at least d so that increasing tuples exist");
  if (H > n) throw Error(ErrorKind::InvalidInput, "subtree height exceeds the truncation");
  if (opts.epsilon < Fraction(0)) throw Error(ErrorKind::InvalidInput, "epsilon must be non-negative");

  const auto top = static_cast<size_t>(pattern.back());
  Budget budget(opts.cap);
  std::optional<AlmostAllResult> best;

  std::vector<int> A = {0};
  std::function<void(int)> levels = [&](int next) {
    if (static_cast<int>(A.size()) == H) {
      // by_level[j][k]: nodes of subtree j on level A[k].
      std::vector<std::vector<std::vector<Node>>> by_level(static_cast<size_t>(d));
      for (size_t j = 0; j < static_cast<size_t>(d); ++j) {
        by_level[j].push_back({Node()});
        if (j == top) continue;
        for (size_t k = 1; k < A.size(); ++k) {
          std::vector<Node> lv;
          for (const Node& s : by_level[j][k - 1]) {
            for (const Node& u : spaces[j].successors(s)) {
              auto ext = spaces[j].extensions_at(u, A[k]);
              if (ext.empty()) return;
              lv.push_back(ext.front());
            }
          }
          by_level[j].push_back(sorted_canonical(std::move(lv)));
        }
      }
      // Chains of lower levels for the non-top coordinates, increasing along the pattern.
      auto count_for = [&](const Node& y, size_t k, int gamma, long long& bad, long long& total) {
        std::vector<size_t> lv(pattern.size() - 1);
        std::function<void(size_t, size_t)> chain = [&](size_t pos, size_t min_level) {
          if (pos == lv.size()) {
            std::vector<std::vector<Node>> factors(static_cast<size_t>(d));
            for (size_t q = 0; q < lv.size(); ++q) {
              auto j = static_cast<size_t>(pattern[q]);
              factors[j] = by_level[j][lv[q]];
            }
            factors[top] = {y};
            for_each_product(factors, [&](const std::vector<Node>& t) {
              budget.tick("almost-all homogenization");
              ++total;
              if (f(t) != gamma) ++bad;
              return true;
            });
            return;
          }
          for (size_t l = min_level; l < k; ++l) {
            lv[pos] = l;
            chain(pos + 1, l + 1);
          }
        };
        chain(0, 0);
      };
      for (int gamma = 0; gamma < f.colors(); ++gamma) {
        auto levels_top = by_level;
        long long bad = 0;
        long long total = 0;
        bool ok = true;
        for (size_t k = 1; k < A.size() && ok; ++k) {
          std::vector<Node> lv;
          for (const Node& s : levels_top[top][k - 1]) {
            for (const Node& u : spaces[top].successors(s)) {
              auto ext = spaces[top].extensions_at(u, A[k]);
              if (ext.empty()) {
                ok = false;
                break;
              }
              long long best_bad = -1;
              long long best_total = 0;
              Node pick;
              for (const Node& y : ext) {
                long long b = 0;
                long long t = 0;
                count_for(y, k, gamma, b, t);
                if (best_bad < 0 || b < best_bad) {
                  best_bad = b;
                  best_total = t;
                  pick = y;
                }
                if (b == 0) break;
              }
              bad += best_bad;
              total += best_total;
              lv.push_back(pick);
            }
            if (!ok) break;
          }
          levels_top[top].push_back(sorted_canonical(std::move(lv)));
        }
        if (!ok || total == 0) continue;
        Fraction frac(bad, total);
        if (best && !(frac < best->fraction)) continue;
        AlmostAllResult r;
        for (size_t j = 0; j < static_cast<size_t>(d); ++j) {
          std::vector<Node> all;
          for (const auto& lv : levels_top[j]) all.insert(all.end(), lv.begin(), lv.end());
          r.subtrees.push_back(make_report(std::move(all), A));
        }
        r.level_set = A;
        r.pattern = pattern;
        r.gamma = gamma;
        r.violations = bad;
        r.total = total;
        r.fraction = frac;
        best = std::move(r);
      }
      return;
    }
    for (int a = next; a < n; ++a) {
      A.push_back(a);
      levels(a + 1);
      A.pop_back();
      if (best && best->violations == 0) return;
    }
  };
  levels(1);
  if (!best) throw Error(ErrorKind::InvalidInput, "no strong subtree of the requested height fits in the factor trees");

  auto [bad, total] = count_exceptions(f, best->subtrees, pattern, best->gamma);
  if (bad != best->violations || total != best->total) {
    throw Error(ErrorKind::Internal, "exception count mismatch: search found " + std::to_string(best->violations) + "/" +
                                         std::to_string(best->total) + ", recount gives " + std::to_string(bad) + "/" +
                                         std::to_string(total));
  }
  best->epsilon = opts.epsilon;
  best->within_budget = !(opts.epsilon < best->fraction);
  return *best;
}

Verdict validate_nice_subtree(const std::vector<Node>& nodes, const TreeSpace& space, int splitting_depth) {
  Verdict v;
  if (nodes.empty()) {
    v.fail("empty node set");
    return v;
  }
  std::set<Node> set;
  for (const Node& t : nodes) {
    if (!space.contains(t)) v.fail("node \"" + t.str() + "\" is not in the ambient tree");
    if (!set.insert(t).second) v.fail("node \"" + t.str() + "\" is listed twice");
  }
  if (!v.valid) return v;
  const Node root = *set.begin();
  for (const Node& t : set) {
    if (!root.is_prefix_of(t)) {
      v.fail("not rooted: \"" + t.str() + "\" does not extend \"" + root.str() + "\"");
      return v;
    }
  }
  std::map<Node, std::vector<Node>> children;
  for (const Node& t : set) {
    if (t == root) continue;
    // Immediate predecessor inside the picked set.
    std::optional<Node> parent;
    for (int len = t.height() - 1; len >= 0; --len) {
      Node p = t.prefix(len);
      if (set.count(p)) {
        parent = p;
        break;
      }
    }
    children[*parent].push_back(t);
  }
  std::function<int(const Node&)> depth = [&](const Node& t) {
    auto it = children.find(t);
    if (it == children.end()) return 0;
    if (it->second.size() < 2) v.fail("node \"" + t.str() + "\" has a single successor and does not split");
    int m = -1;
    for (const Node& c : it->second) {
      int dc = depth(c);
      m = m < 0 ? dc : std::min(m, dc);
    }
    return m + 1;
  };
  int dep = depth(root);
  if (dep < splitting_depth) {
    v.fail("splitting depth " + std::to_string(dep) + " is below " + std::to_string(splitting_depth));
  }
  return v;
}

std::vector<int> precedence_type(const std::vector<int>& stages) {
  std::vector<int> perm = identity(static_cast<int>(stages.size()));
  std::stable_sort(perm.begin(), perm.end(),
                   [&](int a, int b) { return stages[static_cast<size_t>(a)] < stages[static_cast<size_t>(b)]; });
  return perm;
}

std::vector<int> realized_colors(const Coloring& f, const std::vector<std::vector<Node>>& trees) {
  std::set<int> colors;
  for_each_product(trees, [&](const std::vector<Node>& t) {
    colors.insert(f(t));
    return true;
  });
  return {colors.begin(), colors.end()};
}

json PolarizedResult::to_json() const {
  json ts = json::array();
  for (const auto& t : trees) {
    json nodes = json::array();
    for (const Node& x : t) nodes.push_back(x.str());
    ts.push_back(nodes);
  }
  json g = json::object();
  for (const auto& [pi, c] : gamma) g[std::to_string(pi)] = c;
  json out = {{"found", found}, {"capped", capped}, {"trees", ts}, {"gamma", g}, {"colors", colors}, {"steps", steps}};
  if (!failure.empty()) out["failure"] = failure;
  return out;
}

namespace {

class PolarizedBuilder {
 public:
  PolarizedBuilder(const Coloring& f, const std::vector<TreeSpace>& spaces, const PolarizedOptions& opts)
      : f_(f), spaces_(spaces), opts_(opts), D_(spaces.size()), budget_(opts.cap),
        gamma_(static_cast<size_t>(factorial(static_cast<int>(spaces.size()))), -1),
        picked_(spaces.size()) {}

  bool run() { return stage(0, 0); }

  std::vector<std::vector<Node>> trees() const {
    std::vector<std::vector<Node>> out;
    for (const auto& tree : picked_) {
      std::vector<Node> nodes;
      for (const auto& [t, a] : tree) nodes.push_back(t);
      out.push_back(sorted_canonical(std::move(nodes)));
    }
    return out;
  }
  std::map<int, int> gamma() const {
    std::map<int, int> out;
    for (size_t i = 0; i < gamma_.size(); ++i) {
      if (gamma_[i] >= 0) out[static_cast<int>(i)] = gamma_[i];
    }
    return out;
  }
  std::vector<json>& transcript() { return transcript_; }
  unsigned long long steps() const { return budget_.used(); }
  bool abandoned() const { return abandoned_; }
  std::pair<int, size_t> deepest() const { return deepest_; }
  // Color and precedence type of every product tuple against the table.
  void verify() const {
    std::vector<std::vector<std::pair<Node, int>>> pools(picked_.begin(), picked_.end());
    std::vector<size_t> idx(D_, 0);
    while (true) {
      std::vector<Node> t;
      std::vector<int> st;
      for (size_t j = 0; j < D_; ++j) {
        t.push_back(pools[j][idx[j]].first);
        st.push_back(pools[j][idx[j]].second);
      }
      int want = gamma_[static_cast<size_t>(permutation_index(precedence_type(st)))];
      if (f_(t) != want) {
        throw Error(ErrorKind::Internal, "tuple (" + tuple_key(t) + ") breaks the type table");
      }
      size_t j = D_;
      while (j > 0 && ++idx[j - 1] == pools[j - 1].size()) idx[--j] = 0;
      if (j == 0) return;
    }
  }

 private:
  struct StageAbandoned {};

  // Checks every tuple completed by y on tree p at stage alpha; y is last in precedence.
  bool admissible(const Node& y, size_t p, int alpha, std::vector<size_t>& assigned) {
    std::vector<std::vector<std::pair<Node, int>>> pools;
    for (size_t j = 0; j < D_; ++j) {
      if (j == p) {
        pools.push_back({{y, alpha}});
      } else if (picked_[j].empty()) {
        return true;
      } else {
        pools.push_back(picked_[j]);
      }
    }
    std::vector<size_t> idx(D_, 0);
    std::vector<Node> t(D_);
    std::vector<int> st(D_);
    while (true) {
      for (size_t j = 0; j < D_; ++j) {
        t[j] = pools[j][idx[j]].first;
        st[j] = pools[j][idx[j]].second;
      }
      auto pi = static_cast<size_t>(permutation_index(precedence_type(st)));
      int c = f_(t);
      if (gamma_[pi] < 0) {
        gamma_[pi] = c;
        assigned.push_back(pi);
      } else if (gamma_[pi] != c) {
        ++forbidden_;
        return false;
      }
      size_t j = D_;
      while (j > 0 && ++idx[j - 1] == pools[j - 1].size()) idx[--j] = 0;
      if (j == 0) return true;
    }
  }

  void undo(const std::vector<size_t>& assigned) {
    for (size_t pi : assigned) gamma_[pi] = -1;
  }

  bool try_node(const Node& y, size_t p, int alpha, unsigned long long& local, const std::function<bool()>& next) {
    budget_.tick("polarized search");
    if (++local > opts_.per_stage_cap) throw StageAbandoned{};
    std::vector<size_t> assigned;
    if (admissible(y, p, alpha, assigned)) {
      picked_[p].emplace_back(y, alpha);
      if (next()) return true;
      picked_[p].pop_back();
    }
    undo(assigned);
    return false;
  }

  bool stage(int alpha, size_t p) {
    if (alpha > opts_.splitting_depth) return true;
    if (std::make_pair(alpha, p) > deepest_) deepest_ = {alpha, p};
    int next_alpha = p + 1 == D_ ? alpha + 1 : alpha;
    size_t next_p = p + 1 == D_ ? 0 : p + 1;
    unsigned long long local = 0;
    size_t forbidden_before = forbidden_;
    size_t mark = picked_[p].size();
    auto record = [&]() {
      json picks = json::array();
      for (size_t i = mark; i < picked_[p].size(); ++i) picks.push_back(picked_[p][i].first.str());
      transcript_.push_back({{"stage", alpha}, {"tree", p}, {"picked", picks}, {"checks", local},
                             {"forbidden", forbidden_ - forbidden_before}});
      if (stage(next_alpha, next_p)) return true;
      transcript_.pop_back();
      return false;
    };
    try {
      if (alpha == 0) {
        for (const Node& y : spaces_[p].nodes()) {
          if (try_node(y, p, alpha, local, record)) return true;
        }
        return false;
      }
      std::vector<Node> terminals;
      for (const auto& [t, a] : picked_[p]) {
        if (a == alpha - 1) terminals.push_back(t);
      }
      std::function<bool(size_t)> pick_pair = [&](size_t i) -> bool {
        if (i == terminals.size()) return record();
        std::vector<Node> above = spaces_[p].extensions(terminals[i]);
        above.erase(above.begin());
        for (size_t a = 0; a < above.size(); ++a) {
          auto second = [&, a]() {
            for (size_t b = a + 1; b < above.size(); ++b) {
              if (above[a].comparable(above[b])) continue;
              if (try_node(above[b], p, alpha, local, [&]() { return pick_pair(i + 1); })) return true;
            }
            return false;
          };
          if (try_node(above[a], p, alpha, local, second)) return true;
        }
        return false;
      };
      return pick_pair(0);
    } catch (const StageAbandoned&) {
      abandoned_ = true;
      return false;
    }
  }

  const Coloring& f_;
  const std::vector<TreeSpace>& spaces_;
  PolarizedOptions opts_;
  size_t D_;
  Budget budget_;
  std::vector<int> gamma_;
  std::vector<std::vector<std::pair<Node, int>>> picked_;
  std::vector<json> transcript_;
  size_t forbidden_ = 0;
  bool abandoned_ = false;
  std::pair<int, size_t> deepest_{0, 0};
};

}  // namespace

PolarizedResult polarized_search(const Coloring& f, const std::vector<TreeSpace>& spaces,
                                 const PolarizedOptions& opts) {
  if (spaces.size() < 2) throw Error(ErrorKind::InvalidInput, "polarized search needs at least two factor trees");
  if (f.arity() != static_cast<int>(spaces.size())) {
    throw Error(ErrorKind::InvalidInput, "coloring arity does not match the number of factor trees");
  }
  if (opts.splitting_depth < 0) throw Error(ErrorKind::InvalidInput, "splitting depth must be non-negative");
  PolarizedBuilder builder(f, spaces, opts);
  PolarizedResult res;
  bool ok = false;
  try {
    ok = builder.run();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::CapExceeded) throw;
    res.capped = true;
  }
  res.steps = builder.steps();
  res.transcript = builder.transcript();
  auto [da, dp] = builder.deepest();
  std::string where = "stage (" + std::to_string(da) + ", tree " + std::to_string(dp) + ")";
  if (!ok) {
    res.capped = res.capped || builder.abandoned();
    res.failure = res.capped ? "cap reached; deepest " + where
                             : "forbidden-set saturation; every candidate at " + where + " is forbidden";
    return res;
  }
  builder.verify();
  res.found = true;
  res.trees = builder.trees();
  res.gamma = builder.gamma();
  res.colors = realized_colors(f, res.trees);
  for (size_t j = 0; j < res.trees.size(); ++j) {
    Verdict v = validate_nice_subtree(res.trees[j], spaces[j], opts.splitting_depth);
    if (!v.valid) throw Error(ErrorKind::Internal, "tree " + std::to_string(j) + ": " + v.violations.front());
  }
  if (res.colors.size() > static_cast<size_t>(factorial(static_cast<int>(spaces.size())))) {
    throw Error(ErrorKind::Internal, "more colors realized than permutation types");
  }
  return res;
}

}  // namespace hl
