#include "hl/witness.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <unordered_map>

#include "hl/error.hpp"
#include "sat.hpp"

namespace hl {

namespace {

void require_arity(const Coloring& f, const std::vector<TreeSpace>& spaces) {
  if (spaces.empty()) throw Error(ErrorKind::InvalidInput, "at least one factor tree is required");
  if (f.arity() != static_cast<int>(spaces.size())) {
    throw Error(ErrorKind::InvalidInput, "coloring has arity " + std::to_string(f.arity()) + " but " +
                                             std::to_string(spaces.size()) + " factor trees were given");
  }
}

int common_height(const std::vector<TreeSpace>& spaces) {
  int n = spaces.at(0).height();
  for (const auto& s : spaces) n = std::min(n, s.height());
  return n;
}

std::string show(const std::vector<Node>& tuple) { return "(" + tuple_key(tuple) + ")"; }

struct Slot {
  size_t coord;
  std::vector<Node> candidates;
};

// First choice vector (lexicographic over slots) whose per-coordinate sets form a monochromatic product.
class MonoMatrixSearch {
 public:
  MonoMatrixSearch(const Coloring& f, size_t d, const std::vector<Slot>& slots, std::optional<int> gamma,
                   Budget& budget)
      : f_(f), slots_(slots), sets_(d), color_(gamma ? *gamma : -1), budget_(budget) {}

  std::optional<std::pair<Matrix, int>> run() {
    for (size_t j = 0; j < sets_.size(); ++j) {
      bool has_slot = std::any_of(slots_.begin(), slots_.end(), [&](const Slot& s) { return s.coord == j; });
      if (!has_slot) return std::nullopt;
    }
    if (!dfs(0)) return std::nullopt;
    Matrix m = sets_;
    for (auto& mj : m) mj = sorted_canonical(std::move(mj));
    return std::make_pair(std::move(m), color_);
  }

 private:
  bool dfs(size_t i) {
    if (i == slots_.size()) return true;
    const Slot& slot = slots_[i];
    for (const Node& cand : slot.candidates) {
      budget_.tick("matrix search");
      int saved = color_;
      sets_[slot.coord].push_back(cand);
      if (consistent(slot.coord, cand) && dfs(i + 1)) return true;
      sets_[slot.coord].pop_back();
      color_ = saved;
    }
    return false;
  }

  bool consistent(size_t coord, const Node& added) {
    std::vector<std::vector<Node>> factors = sets_;
    factors[coord] = {added};
    for (const auto& fj : factors) {
      if (fj.empty()) return true;
    }
    bool ok = true;
    for_each_product(factors, [&](const std::vector<Node>& t) {
      if (!f_.defines(t)) {
        ok = false;
        return false;
      }
      int c = f_(t);
      if (color_ < 0) color_ = c;
      ok = c == color_;
      return ok;
    });
    return ok;
  }

  const Coloring& f_;
  const std::vector<Slot>& slots_;
  Matrix sets_;
  int color_;
  Budget& budget_;
};

bool all_same_height(const LevelSequence& seq) {
  return std::all_of(seq.begin(), seq.end(), [&](const Node& t) { return t.height() == seq.front().height(); });
}

void check_monochromatic(const Matrix& matrix, int color, const Coloring& f, Verdict& v) {
  for_each_product(matrix, [&](const std::vector<Node>& t) {
    if (!f.defines(t)) {
      v.fail("tuple " + show(t) + " is outside the coloring's domain");
      return false;
    }
    int c = f(t);
    if (c != color) {
      v.fail("tuple " + show(t) + " has color " + std::to_string(c) + ", expected " + std::to_string(color));
      return false;
    }
    return true;
  });
}

void check_shape(const SdhlWitness& w, const Coloring& f, const std::vector<TreeSpace>& spaces) {
  require_arity(f, spaces);
  if (w.base.size() != spaces.size() || w.matrix.size() != spaces.size()) {
    throw Error(ErrorKind::InvalidInput, "witness arity does not match the coloring arity " +
                                             std::to_string(f.arity()));
  }
  for (size_t j = 0; j < spaces.size(); ++j) {
    spaces[j].require(w.base[j]);
    for (const Node& t : w.matrix[j]) spaces[j].require(t);
  }
}

void check_density(const SdhlWitness& w, const std::vector<TreeSpace>& spaces, Verdict& v) {
  for (size_t j = 0; j < spaces.size(); ++j) {
    for (const Node& t : spaces[j].extensions_at(w.base[j], w.xi)) {
      bool hit = std::any_of(w.matrix[j].begin(), w.matrix[j].end(), [&](const Node& u) { return t.is_prefix_of(u); });
      if (!hit) {
        v.fail("coordinate " + std::to_string(j) + ": node \"" + t.str() + "\" on level " + std::to_string(w.xi) +
               " has no extension in the matrix");
      }
    }
  }
}

}  // namespace

bool is_dense(const LevelSequence& base, int xi, const Matrix& matrix, const std::vector<TreeSpace>& spaces) {
  for (size_t j = 0; j < spaces.size(); ++j) {
    for (const Node& t : spaces[j].extensions_at(base[j], xi)) {
      if (std::none_of(matrix[j].begin(), matrix[j].end(), [&](const Node& u) { return t.is_prefix_of(u); })) {
        return false;
      }
    }
  }
  return true;
}

std::optional<SdhlWitness> find_level_matrix(const Coloring& f, const std::vector<TreeSpace>& spaces,
                                             const LevelSequence& base, int xi, int level,
                                             std::optional<int> gamma, Budget& budget) {
  std::vector<Slot> slots;
  for (size_t j = 0; j < spaces.size(); ++j) {
    for (const Node& t : spaces[j].extensions_at(base[j], xi)) {
      Slot s{j, spaces[j].extensions_at(t, level)};
      if (s.candidates.empty()) return std::nullopt;
      slots.push_back(std::move(s));
    }
  }
  auto found = MonoMatrixSearch(f, spaces.size(), slots, gamma, budget).run();
  if (!found) return std::nullopt;
  return SdhlWitness{base, xi, std::move(found->first), found->second};
}

Verdict check_sdhl_witness(const SdhlWitness& w, const Coloring& f, const std::vector<TreeSpace>& spaces) {
  check_shape(w, f, spaces);
  Verdict v;
  if (!all_same_height(w.base)) {
    v.fail("base " + show(w.base) + " is not a level sequence");
    return v;
  }
  int h = w.base.front().height();
  if (w.xi != h + 1) {
    v.fail("density level " + std::to_string(w.xi) + " must be ht(base)+1 = " + std::to_string(h + 1));
  }
  if (w.color < 0 || w.color >= f.colors()) v.fail("color " + std::to_string(w.color) + " is out of range");
  std::optional<int> level;
  for (const auto& mj : w.matrix) {
    if (mj.empty()) {
      v.fail("matrix has an empty coordinate");
      return v;
    }
    for (const Node& t : mj) {
      if (!level) level = t.height();
      if (t.height() != *level) {
        v.fail("matrix is not a level matrix: \"" + t.str() + "\" is off level " + std::to_string(*level));
        return v;
      }
    }
  }
  if (*level < w.xi) v.fail("matrix level " + std::to_string(*level) + " is below the density level");
  if (!v.valid) return v;
  check_density(w, spaces, v);
  check_monochromatic(w.matrix, w.color, f, v);
  return v;
}

std::optional<SdhlWitness> sdhl_search(const Coloring& f, const std::vector<TreeSpace>& spaces,
                                       unsigned long long cap) {
  require_arity(f, spaces);
  int n = common_height(spaces);
  if (n < 2) throw Error(ErrorKind::InvalidInput, "truncation height must be at least 2");
  Budget budget(cap);
  std::optional<SdhlWitness> out;
  for (int h = 0; h + 1 < n && !out; ++h) {
    std::vector<std::vector<Node>> factors;
    for (const auto& s : spaces) factors.push_back(s.level(h));
    for_each_product(factors, [&](const std::vector<Node>& base) {
      for (int level = h + 1; level < n; ++level) {
        out = find_level_matrix(f, spaces, base, h + 1, level, std::nullopt, budget);
        if (out) return false;
      }
      return true;
    });
  }
  return out;
}

Verdict check_sdhl_prime_witness(const SdhlWitness& w, const Coloring& f, const std::vector<TreeSpace>& spaces) {
  check_shape(w, f, spaces);
  Verdict v;
  int top = 0;
  for (const Node& x : w.base) top = std::max(top, x.height());
  if (w.xi <= top) v.fail("density level " + std::to_string(w.xi) + " must exceed the base height " + std::to_string(top));
  if (w.xi >= common_height(spaces)) v.fail("density level " + std::to_string(w.xi) + " is outside the truncation");
  if (w.color < 0 || w.color >= f.colors()) v.fail("color " + std::to_string(w.color) + " is out of range");
  for (const auto& mj : w.matrix) {
    if (mj.empty()) v.fail("matrix has an empty coordinate");
  }
  if (!v.valid) return v;
  check_density(w, spaces, v);
  check_monochromatic(w.matrix, w.color, f, v);
  return v;
}

std::optional<SdhlWitness> sdhl_prime_search(const Coloring& f, const std::vector<TreeSpace>& spaces,
                                             unsigned long long cap) {
  require_arity(f, spaces);
  int n = common_height(spaces);
  if (n < 2) throw Error(ErrorKind::InvalidInput, "truncation height must be at least 2");
  Budget budget(cap);
  std::optional<SdhlWitness> out;
  for (int m = 0; m + 1 < n && !out; ++m) {
    std::vector<std::vector<Node>> factors;
    for (const auto& s : spaces) {
      std::vector<Node> below;
      for (int a = 0; a <= m; ++a) {
        auto lv = s.level(a);
        below.insert(below.end(), lv.begin(), lv.end());
      }
      factors.push_back(std::move(below));
    }
    for_each_product(factors, [&](const std::vector<Node>& base) {
      bool reaches = std::any_of(base.begin(), base.end(), [&](const Node& x) { return x.height() == m; });
      if (!reaches) return true;
      for (int xi = m + 1; xi < n; ++xi) {
        std::vector<Slot> slots;
        for (size_t j = 0; j < spaces.size(); ++j) {
          for (const Node& t : spaces[j].extensions_at(base[j], xi)) slots.push_back({j, spaces[j].extensions(t)});
        }
        auto found = MonoMatrixSearch(f, spaces.size(), slots, std::nullopt, budget).run();
        if (found) {
          out = SdhlWitness{base, xi, std::move(found->first), found->second};
          return false;
        }
      }
      return true;
    });
  }
  return out;
}

DshlVerdict check_dshl_witness(const LevelSequence& base, int gamma, const Coloring& f,
                               const std::vector<TreeSpace>& spaces, unsigned long long cap) {
  require_arity(f, spaces);
  if (base.size() != spaces.size()) throw Error(ErrorKind::InvalidInput, "base arity does not match the coloring");
  for (size_t j = 0; j < spaces.size(); ++j) spaces[j].require(base[j]);
  DshlVerdict out;
  if (!all_same_height(base)) {
    out.verdict.fail("base " + show(base) + " is not a level sequence");
    return out;
  }
  if (gamma < 0 || gamma >= f.colors()) {
    out.verdict.fail("color " + std::to_string(gamma) + " is out of range");
    return out;
  }
  int n = common_height(spaces);
  Budget budget(cap);
  for (int eta = base.front().height() + 1; eta < n; ++eta) {
    std::optional<SdhlWitness> found;
    for (int level = eta; level < n && !found; ++level) {
      found = find_level_matrix(f, spaces, base, eta, level, gamma, budget);
    }
    if (found) {
      out.matrices.push_back(std::move(*found));
    } else {
      out.verdict.fail("no monochromatic " + std::to_string(eta) + "-dense level matrix of color " +
                       std::to_string(gamma) + " above " + show(base));
    }
  }
  if (gamma == 0) {
    bool at_roots = std::all_of(base.begin(), base.end(), [](const Node& t) { return t.height() == 0; });
    if (at_roots) {
      out.asym = out.verdict.valid;
    } else {
      LevelSequence roots(base.size());
      out.asym = check_dshl_witness(roots, 0, f, spaces, cap).verdict.valid;
    }
  }
  return out;
}

std::optional<DshlWitness> dshl_search(const Coloring& f, const std::vector<TreeSpace>& spaces,
                                       unsigned long long cap) {
  require_arity(f, spaces);
  int n = common_height(spaces);
  if (n < 2) throw Error(ErrorKind::InvalidInput, "truncation height must be at least 2");
  std::optional<DshlWitness> out;
  for (int h = 0; h + 1 < n && !out; ++h) {
    std::vector<std::vector<Node>> factors;
    for (const auto& s : spaces) factors.push_back(s.level(h));
    for_each_product(factors, [&](const std::vector<Node>& base) {
      for (int gamma = 0; gamma < f.colors(); ++gamma) {
        if (check_dshl_witness(base, gamma, f, spaces, cap).verdict.valid) {
          out = DshlWitness{base, gamma};
          return false;
        }
      }
      return true;
    });
  }
  return out;
}

Verdict check_hl_strong_subtree(const std::vector<SubtreeReport>& reports, const Coloring& f) {
  if (static_cast<int>(reports.size()) != f.arity()) {
    throw Error(ErrorKind::InvalidInput, "one subtree per coordinate is required");
  }
  auto show_levels = [](const std::vector<int>& ls) {
    std::string s;
    for (int a : ls) s += (s.empty() ? "" : ",") + std::to_string(a);
    return "(" + s + ")";
  };
  for (size_t j = 1; j < reports.size(); ++j) {
    if (reports[j].level_set != reports[0].level_set) {
      throw Error(ErrorKind::InvalidInput, "level sets differ: subtree 0 has " + show_levels(reports[0].level_set) +
                                               ", subtree " + std::to_string(j) + " has " +
                                               show_levels(reports[j].level_set));
    }
  }
  Verdict v;
  std::optional<int> color;
  std::vector<Node> first;
  for (int xi = 0; xi < reports[0].subtree_height() && v.valid; ++xi) {
    std::vector<std::vector<Node>> factors;
    for (const auto& r : reports) factors.push_back(r.level_nodes(xi));
    for_each_product(factors, [&](const std::vector<Node>& t) {
      int c = f(t);
      if (!color) {
        color = c;
        first = t;
        return true;
      }
      if (c != *color) {
        v.fail("tuple " + show(t) + " has color " + std::to_string(c) + " but " + show(first) + " has color " +
               std::to_string(*color));
        return false;
      }
      return true;
    });
  }
  return v;
}

std::optional<Coloring> find_counterexample(int d, int b, int r, int n, Budget& budget) {
  if (d < 1 || r < 1 || n < 1) throw Error(ErrorKind::InvalidInput, "d, r and n must be positive");
  std::vector<TreeSpace> spaces(static_cast<size_t>(d), TreeSpace::uniform(b, n));
  std::vector<LevelSequence> verts;
  std::unordered_map<std::string, int> id;
  for (int h = 0; h < n; ++h) {
    std::vector<std::vector<Node>> factors(static_cast<size_t>(d), spaces[0].level(h));
    for_each_product(factors, [&](const std::vector<Node>& t) {
      id[tuple_key(t)] = static_cast<int>(verts.size());
      verts.push_back(t);
      return true;
    });
  }
  const size_t V = verts.size();
  auto as_table = [&](const std::vector<int>& colors) {
    std::map<std::vector<Node>, int> entries;
    for (size_t v = 0; v < V; ++v) entries[verts[v]] = colors[v];
    return Coloring::table(d, r, entries);
  };
  if (n == 1) return as_table(std::vector<int>(V, 0));

  std::set<std::vector<int>> edges;
  for (int h = 0; h + 1 < n; ++h) {
    std::vector<std::vector<Node>> bases(static_cast<size_t>(d), spaces[0].level(h));
    for_each_product(bases, [&](const std::vector<Node>& base) {
      for (int level = h + 1; level < n; ++level) {
        std::vector<size_t> owner;
        std::vector<std::vector<Node>> choices;
        for (size_t j = 0; j < base.size(); ++j) {
          for (const Node& u : spaces[j].successors(base[j])) {
            owner.push_back(j);
            choices.push_back(spaces[j].extensions_at(u, level));
          }
        }
        for_each_product(choices, [&](const std::vector<Node>& pick) {
          budget.tick("hypergraph construction");
          Matrix m(static_cast<size_t>(d));
          for (size_t s = 0; s < pick.size(); ++s) m[owner[s]].push_back(pick[s]);
          std::vector<int> e;
          for_each_product(m, [&](const std::vector<Node>& t) {
            e.push_back(id.at(tuple_key(t)));
            return true;
          });
          std::sort(e.begin(), e.end());
          edges.insert(std::move(e));
          return true;
        });
      }
      return true;
    });
  }

  std::vector<bool> in_edge(V, false);
  for (const auto& e : edges) {
    for (int v : e) in_edge[static_cast<size_t>(v)] = true;
  }
  sat::Solver solver;
  std::vector<int> base_var(V);
  for (size_t v = 0; v < V; ++v) {
    base_var[v] = solver.num_vars() + 1;
    for (int c = 0; c < r; ++c) solver.new_var();
  }
  auto x = [&](size_t v, int c) { return base_var[v] + c; };
  for (size_t v = 0; v < V; ++v) {
    std::vector<int> some;
    for (int c = 0; c < r; ++c) some.push_back(x(v, c));
    solver.add_clause(some);
    for (int c = 0; c < r; ++c) {
      for (int c2 = c + 1; c2 < r; ++c2) solver.add_clause({-x(v, c), -x(v, c2)});
    }
  }
  for (const auto& e : edges) {
    for (int c = 0; c < r; ++c) {
      std::vector<int> clause;
      for (int v : e) clause.push_back(-x(static_cast<size_t>(v), c));
      solver.add_clause(clause);
    }
  }
  auto first = std::find(in_edge.begin(), in_edge.end(), true);
  if (first != in_edge.end()) solver.add_clause({x(static_cast<size_t>(first - in_edge.begin()), 0)});
  if (solver.solve({}, budget) == sat::Solver::Result::Unsat) return std::nullopt;

  auto color_in_model = [&](size_t v) {
    for (int c = 0; c < r; ++c) {
      if (solver.model(x(v, c))) return c;
    }
    throw Error(ErrorKind::Internal, "model leaves a vertex uncolored");
  };
  std::vector<int> color(V, 0);
  std::vector<int> fixed;
  for (size_t v = 0; v < V; ++v) {
    if (!in_edge[v]) continue;
    int chosen = color_in_model(v);
    for (int c = 0; c < chosen; ++c) {
      std::vector<int> trial = fixed;
      trial.push_back(x(v, c));
      if (solver.solve(trial, budget) == sat::Solver::Result::Sat) {
        chosen = c;
        break;
      }
    }
    if (chosen != color_in_model(v)) {
      std::vector<int> trial = fixed;
      trial.push_back(x(v, chosen));
      solver.solve(trial, budget);
    }
    color[v] = chosen;
    fixed.push_back(x(v, chosen));
  }
  return as_table(color);
}

FhlResult finite_hl_number(const FhlOptions& opts) {
  if (opts.d < 1 || opts.r < 1 || opts.max_n < 1) {
    throw Error(ErrorKind::InvalidInput, "d, r and max_n must be positive");
  }
  if (opts.b < 2 || opts.b > 10) throw Error(ErrorKind::InvalidInput, "branching must lie in [2, 10]");
  FhlResult res;
  res.seed = opts.seed;
  Budget budget(opts.cap);
  if (!opts.randomized) {
    res.mode = "exhaustive";
    for (int n = 1; n <= opts.max_n; ++n) {
      std::optional<Coloring> ce;
      try {
        ce = find_counterexample(opts.d, opts.b, opts.r, n, budget);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::CapExceeded) throw;
        throw Error(ErrorKind::CapExceeded, std::string(e.what()) + " while deciding n=" + std::to_string(n) +
                                                "; partial bound: value >= " + std::to_string(res.lower_bound));
      }
      if (!ce) {
        res.value = n;
        res.report = "least n = " + std::to_string(n);
        return res;
      }
      res.lower_bound = n + 1;
      res.counterexample_n = n;
      res.counterexample = std::move(ce);
    }
    throw Error(ErrorKind::CapExceeded, "no value up to max_n=" + std::to_string(opts.max_n) +
                                            "; partial bound: value >= " + std::to_string(res.lower_bound));
  }

  res.mode = "randomized";
  res.samples = opts.samples;
  std::mt19937_64 rng(opts.seed);
  for (int n = 1; n <= opts.max_n; ++n) {
    std::vector<TreeSpace> spaces(static_cast<size_t>(opts.d), TreeSpace::uniform(opts.b, n));
    if (n == 1) {
      Budget trivial(1);
      res.counterexample = find_counterexample(opts.d, opts.b, opts.r, 1, trivial);
      res.counterexample_n = 1;
      res.lower_bound = 2;
      continue;
    }
    std::optional<Coloring> ce;
    for (int k = 0; k < opts.samples && !ce; ++k) {
      std::map<std::vector<Node>, int> entries;
      for (int h = 0; h < n; ++h) {
        std::vector<std::vector<Node>> factors(static_cast<size_t>(opts.d), spaces[0].level(h));
        for_each_product(factors, [&](const std::vector<Node>& t) {
          entries[t] = static_cast<int>(rng() % static_cast<unsigned long long>(opts.r));
          return true;
        });
      }
      Coloring f = Coloring::table(opts.d, opts.r, entries);
      if (!sdhl_search(f, spaces, opts.cap)) ce = std::move(f);
    }
    if (!ce) {
      res.clean_n = n;
      res.report = "no counterexample found at n=" + std::to_string(n) + " among " + std::to_string(opts.samples) +
                   " samples";
      return res;
    }
    res.counterexample = std::move(ce);
    res.counterexample_n = n;
    res.lower_bound = n + 1;
  }
  res.report = "every n up to " + std::to_string(opts.max_n) + " has a sampled counterexample";
  return res;
}

namespace {

bool has_extension_of_color(const Coloring& f, const TreeSpace& space, const Node& q, int gamma, int level) {
  for (const Node& t : space.extensions_at(q, level)) {
    if (f({t}) == gamma) return true;
  }
  return false;
}

std::function<std::optional<int>(const std::vector<Node>&, int, int)> least_common_level(const Coloring& f,
                                                                                          const TreeSpace& space) {
  return [f, space](const std::vector<Node>& nodes, int gamma, int min_level) -> std::optional<int> {
    for (int eta = std::max(min_level, 0); eta < space.height(); ++eta) {
      bool all = std::all_of(nodes.begin(), nodes.end(),
                             [&](const Node& q) { return has_extension_of_color(f, space, q, gamma, eta); });
      if (all) return eta;
    }
    return std::nullopt;
  };
}

std::optional<Node> least_extension_of_color(const Coloring& f, const TreeSpace& space, const Node& q, int gamma) {
  for (const Node& t : space.extensions(q)) {
    if (f({t}) == gamma) return t;
  }
  return std::nullopt;
}

}  // namespace

LargenessOracle top_level_oracle(const Coloring& f, const TreeSpace& space) {
  LargenessOracle o;
  o.name = "top-level";
  o.large = [f, space](const Node& q, int gamma) {
    return has_extension_of_color(f, space, q, gamma, space.height() - 1);
  };
  o.select_level = least_common_level(f, space);
  return o;
}

LargenessOracle top_half_oracle(const Coloring& f, const TreeSpace& space) {
  LargenessOracle o;
  o.name = "top-half";
  o.large = [f, space](const Node& q, int gamma) {
    for (int a = std::max(space.height() / 2, q.height()); a < space.height(); ++a) {
      if (!has_extension_of_color(f, space, q, gamma, a)) return false;
    }
    return true;
  };
  o.select_level = least_common_level(f, space);
  return o;
}

MonoSubtreeResult build_monochromatic_subtree(const Coloring& f, const TreeSpace& space,
                                              const LargenessOracle& oracle, std::optional<int> target_height) {
  if (f.arity() != 1) throw Error(ErrorKind::InvalidInput, "monochromatic subtree construction needs arity 1");
  if (target_height && *target_height < 1) throw Error(ErrorKind::InvalidInput, "target height must be positive");
  MonoSubtreeResult res;
  auto contradiction = [](const Node& q, int gamma, const std::string& level, const std::string& what) {
    return Error(ErrorKind::OracleContradiction, "oracle contradiction at (q=\"" + q.str() + "\", gamma=" +
                                                     std::to_string(gamma) + ", level=" + level + "): " + what);
  };

  const std::vector<Node> all = space.nodes();
  Node root;
  int gamma = 0;
  bool case1 = std::all_of(all.begin(), all.end(), [&](const Node& q) { return oracle.large(q, 0); });
  if (case1) {
    res.case_label = "case-1";
    res.transcript.push_back("case 1: A_{q,0} is large for every q; root is the ambient root");
    if (f({root}) != 0) {
      auto shifted = least_extension_of_color(f, space, root, 0);
      if (!shifted) throw contradiction(root, 0, "any", "no node has color 0");
      root = *shifted;
      res.transcript.push_back("root has color " + std::to_string(f({Node()})) + "; moved to least 0-colored node \"" +
                               root.str() + "\"");
    }
  } else {
    res.case_label = "case-2";
    Node q_star = *std::find_if(all.begin(), all.end(), [&](const Node& q) { return !oracle.large(q, 0); });
    res.transcript.push_back("case 2: A_{q*,0} is small at q* = \"" + q_star.str() + "\"");
    std::optional<Node> q;
    for (const Node& cand : space.extensions(q_star)) {
      auto above = space.extensions(cand);
      for (int g = 1; g < f.colors() && !q; ++g) {
        if (std::all_of(above.begin(), above.end(), [&](const Node& x) { return oracle.large(x, g); })) {
          q = cand;
          gamma = g;
        }
      }
      if (q) break;
    }
    if (!q) throw contradiction(q_star, 0, "any", "no extension q and nonzero color make every A_{q',g} large");
    auto r = least_extension_of_color(f, space, *q, gamma);
    if (!r) throw contradiction(*q, gamma, "any", "A_{q,g} declared large but no extension has the color");
    root = *r;
    res.transcript.push_back("q = \"" + q->str() + "\", color " + std::to_string(gamma) + ", root = \"" + root.str() +
                             "\"");
  }
  res.color = gamma;

  std::vector<Node> nodes = {root};
  std::vector<int> levels = {root.height()};
  std::vector<Node> current = {root};
  res.transcript.push_back("stage 0: level " + std::to_string(root.height()) + ", root \"" + root.str() + "\"");
  while (!target_height || static_cast<int>(levels.size()) < *target_height) {
    std::vector<Node> succ;
    for (const Node& s : current) {
      auto sv = space.successors(s);
      succ.insert(succ.end(), sv.begin(), sv.end());
    }
    int stage = static_cast<int>(levels.size());
    if (succ.empty()) {
      if (target_height) {
        res.complete = false;
        res.failure = "stage " + std::to_string(stage) + ": node \"" + current.front().str() +
                      "\" has no successor inside the truncation";
      }
      break;
    }
    for (const Node& u : succ) {
      if (!oracle.large(u, gamma)) {
        throw contradiction(u, gamma, std::to_string(u.height()), "A_{u,g} is small above the chosen root");
      }
    }
    auto eta = oracle.select_level(succ, gamma, levels.back() + 1);
    if (!eta) {
      if (target_height) {
        res.complete = false;
        auto blocked = std::find_if(succ.begin(), succ.end(), [&](const Node& u) {
          return !oracle.select_level({u}, gamma, levels.back() + 1);
        });
        res.failure = "stage " + std::to_string(stage) + ": node \"" +
                      (blocked == succ.end() ? succ.front() : *blocked).str() +
                      "\" cannot be extended in color " + std::to_string(gamma) + " below the cap";
      }
      break;
    }
    std::vector<Node> next;
    for (const Node& u : succ) {
      std::optional<Node> pick;
      for (const Node& t : space.extensions_at(u, *eta)) {
        if (f({t}) == gamma) {
          pick = t;
          break;
        }
      }
      if (!pick) throw contradiction(u, gamma, std::to_string(*eta), "selected level has no extension of the color");
      next.push_back(*pick);
    }
    next = sorted_canonical(std::move(next));
    std::string names;
    for (const Node& t : next) names += (names.empty() ? "\"" : ", \"") + t.str() + "\"";
    res.transcript.push_back("stage " + std::to_string(stage) + ": level " + std::to_string(*eta) + ", nodes " + names);
    nodes.insert(nodes.end(), next.begin(), next.end());
    levels.push_back(*eta);
    current = std::move(next);
  }
  res.report = make_report(std::move(nodes), std::move(levels));
  Verdict shape = validate_strong_subtree(res.report, space);
  Verdict mono = check_hl_strong_subtree({res.report}, f);
  if (!shape.valid || !mono.valid) {
    throw Error(ErrorKind::Internal, "constructed subtree failed validation: " +
                                         (shape.valid ? mono.violations.front() : shape.violations.front()));
  }
  return res;
}

}  // namespace hl
