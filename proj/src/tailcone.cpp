#include "hl/tailcone.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "hl/error.hpp"

namespace hl {

using nlohmann::json;

namespace {

std::string show(const std::vector<Node>& tuple) { return "(" + tuple_key(tuple) + ")"; }

json nodes_json(const std::vector<Node>& nodes) {
  json out = json::array();
  for (const Node& t : nodes) out.push_back(t.str());
  return out;
}

std::vector<Node> restrict_to(const std::vector<Node>& tuple, int height) {
  std::vector<Node> out;
  out.reserve(tuple.size());
  for (const Node& t : tuple) out.push_back(t.prefix(height));
  return out;
}

void require_family(const ColoringFamily& fam, const std::vector<TreeSpace>& spaces) {
  if (spaces.empty()) throw Error(ErrorKind::InvalidInput, "at least one factor tree is required");
  for (size_t i = 0; i < fam.size(); ++i) {
    if (fam[i].arity() != static_cast<int>(spaces.size())) {
      throw Error(ErrorKind::InvalidInput, "coloring " + std::to_string(i) + " has arity " +
                                               std::to_string(fam[i].arity()) + " but " +
                                               std::to_string(spaces.size()) + " factor trees were given");
    }
  }
}

int common_height(const std::vector<TreeSpace>& spaces) {
  int n = spaces.at(0).height();
  for (const auto& s : spaces) n = std::min(n, s.height());
  return n;
}

// nodes[j][xi]: nodes of subtree j on subtree level xi.
using Levels = std::vector<std::vector<std::vector<Node>>>;

struct StageView {
  int alpha;
  const Levels& built;
  const std::vector<int>& level_set;
  const std::vector<std::vector<Node>>& fresh;
};

// Returns false and sets `why` when adding y to coordinate j breaks a constraint.
using StageCheck = std::function<bool(const StageView&, size_t j, const Node& y, std::string& why)>;

struct StageAbandoned {};

class StagedBuilder {
 public:
  StagedBuilder(const std::vector<TreeSpace>& spaces, int h, StageCaps caps, StageCheck check)
      : spaces_(spaces), h_(h), caps_(caps), check_(std::move(check)), global_(caps.global) {}

  BuildOutcome run() {
    levels_.assign(spaces_.size(), {{Node()}});
    level_set_ = {0};
    try {
      if (stage(0)) return BuildOutcome::Found;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::CapExceeded) throw;
      failure_.message = e.what();
      finish_failure();
      return BuildOutcome::Cap;
    }
    finish_failure();
    if (abandoned_) {
      failure_.message = "per-stage cap of " + std::to_string(caps_.per_stage) + " nodes exhausted at least once";
      return BuildOutcome::Cap;
    }
    failure_.message = "search space exhausted below the truncation";
    return BuildOutcome::Exhausted;
  }

  std::vector<SubtreeReport> reports() const {
    std::vector<SubtreeReport> out;
    for (const auto& lv : levels_) {
      std::vector<Node> all;
      for (const auto& nodes : lv) all.insert(all.end(), nodes.begin(), nodes.end());
      out.push_back(make_report(std::move(all), level_set_));
    }
    return out;
  }
  const std::vector<int>& level_set() const { return level_set_; }
  std::vector<json>& transcript() { return transcript_; }
  const StagedFailure& failure() const { return failure_; }
  unsigned long long steps() const { return global_.used(); }

 private:
  bool stage(int alpha) {
    if (alpha + 1 == h_) return true;
    int stage_no = alpha + 1;
    if (stage_no > failure_.deepest_stage) {
      failure_.deepest_stage = stage_no;
      blocking_.clear();
    }
    struct Slot {
      size_t coord;
      Node succ;
    };
    std::vector<Slot> slots;
    for (size_t j = 0; j < spaces_.size(); ++j) {
      for (const Node& s : levels_[j][static_cast<size_t>(alpha)]) {
        for (const Node& u : spaces_[j].successors(s)) slots.push_back({j, u});
      }
    }
    if (slots.empty()) {
      note(stage_no, "no successors below the truncation");
      return false;
    }
    unsigned long long local = 0;
    const int n = common_height(spaces_);
    std::vector<std::vector<Node>> fresh(spaces_.size());
    int chi = 0;

    std::function<bool(size_t)> dfs = [&](size_t i) -> bool {
      if (i == slots.size()) {
        for (size_t j = 0; j < spaces_.size(); ++j) levels_[j].push_back(sorted_canonical(fresh[j]));
        level_set_.push_back(chi);
        json rec = {{"stage", stage_no}, {"level", chi}, {"search_nodes", local}};
        json nodes = json::array();
        for (size_t j = 0; j < spaces_.size(); ++j) nodes.push_back(nodes_json(levels_[j].back()));
        rec["nodes"] = nodes;
        transcript_.push_back(rec);
        if (stage(alpha + 1)) return true;
        transcript_.pop_back();
        level_set_.pop_back();
        for (auto& lv : levels_) lv.pop_back();
        return false;
      }
      const Slot& slot = slots[i];
      for (const Node& cand : spaces_[slot.coord].extensions_at(slot.succ, chi)) {
        global_.tick("staged construction");
        if (++local > caps_.per_stage) throw StageAbandoned{};
        fresh[slot.coord].push_back(cand);
        std::string why;
        StageView view{alpha, levels_, level_set_, fresh};
        if (check_(view, slot.coord, cand, why)) {
          if (dfs(i + 1)) return true;
        } else {
          note(stage_no, why);
        }
        fresh[slot.coord].pop_back();
      }
      return false;
    };

    try {
      for (chi = level_set_.back() + 1; chi < n; ++chi) {
        for (auto& fj : fresh) fj.clear();
        if (dfs(0)) return true;
      }
    } catch (const StageAbandoned&) {
      abandoned_ = true;
      note(stage_no, "per-stage cap reached");
      for (size_t j = 0; j < spaces_.size(); ++j) {
        while (levels_[j].size() > static_cast<size_t>(alpha + 1)) levels_[j].pop_back();
      }
      while (level_set_.size() > static_cast<size_t>(alpha + 1)) level_set_.pop_back();
      while (transcript_.size() > static_cast<size_t>(alpha)) transcript_.pop_back();
    }
    return false;
  }

  void note(int stage_no, const std::string& why) {
    if (stage_no == failure_.deepest_stage && blocking_.size() < 16) blocking_.insert(why);
  }

  void finish_failure() {
    failure_.blocking.assign(blocking_.begin(), blocking_.end());
    json rec = {{"stage", failure_.deepest_stage}, {"outcome", "failed"}, {"blocking", failure_.blocking}};
    transcript_.push_back(rec);
  }

  const std::vector<TreeSpace>& spaces_;
  int h_;
  StageCaps caps_;
  StageCheck check_;
  Budget global_;
  Levels levels_;
  std::vector<int> level_set_;
  std::vector<json> transcript_;
  StagedFailure failure_;
  std::set<std::string> blocking_;
  bool abandoned_ = false;
};

}  // namespace

std::string_view outcome_name(BuildOutcome o) {
  switch (o) {
    case BuildOutcome::Found: return "found";
    case BuildOutcome::Cap: return "cap";
    case BuildOutcome::Exhausted: return "exhausted";
  }
  return "unknown";
}

TailConeCertificate make_certificate(const std::vector<SubtreeReport>& subtrees, const ColoringFamily& fam) {
  if (subtrees.empty()) throw Error(ErrorKind::InvalidInput, "certificate needs at least one subtree");
  TailConeCertificate cert;
  cert.subtrees = subtrees;
  cert.level_set = subtrees[0].level_set;
  int h = static_cast<int>(cert.level_set.size());
  for (int i = 0; i < static_cast<int>(fam.size()) && i + 1 < h; ++i) {
    std::vector<std::vector<Node>> factors;
    for (const auto& r : subtrees) factors.push_back(r.level_nodes(i + 1));
    auto& table = cert.colors[i];
    for_each_product(factors, [&](const std::vector<Node>& v) {
      table[tuple_key(v)] = fam[static_cast<size_t>(i)](v);
      return true;
    });
  }
  return cert;
}

Verdict check_tail_cone(const TailConeCertificate& cert, const ColoringFamily& fam,
                        const std::vector<TreeSpace>& spaces) {
  require_family(fam, spaces);
  if (cert.subtrees.size() != spaces.size()) {
    throw Error(ErrorKind::InvalidInput, "certificate has " + std::to_string(cert.subtrees.size()) +
                                             " subtrees for " + std::to_string(spaces.size()) + " factor trees");
  }
  Verdict v;
  const int m = static_cast<int>(fam.size());
  const int h = static_cast<int>(cert.level_set.size());
  for (size_t j = 0; j < cert.subtrees.size(); ++j) {
    if (cert.subtrees[j].level_set != cert.level_set) {
      v.fail("subtree " + std::to_string(j) + " does not use the certificate's level set");
    }
    Verdict sv = validate_strong_subtree(cert.subtrees[j], spaces[j]);
    for (const auto& msg : sv.violations) v.fail("subtree " + std::to_string(j) + ": " + msg);
  }
  if (h < m + 1) v.fail("height " + std::to_string(h) + " is below m+1 = " + std::to_string(m + 1));
  if (!v.valid) return v;

  for (const auto& [i, table] : cert.colors) {
    if (i < 0 || i >= m) v.fail("color table for index " + std::to_string(i) + " has no coloring");
  }
  for (int i = 0; i < m; ++i) {
    const auto& f = fam[static_cast<size_t>(i)];
    auto tit = cert.colors.find(i);
    std::vector<std::vector<Node>> top;
    for (const auto& r : cert.subtrees) top.push_back(r.level_nodes(i + 1));
    size_t expected = 0;
    for_each_product(top, [&](const std::vector<Node>& vt) {
      ++expected;
      if (tit == cert.colors.end()) return true;
      auto e = tit->second.find(tuple_key(vt));
      if (e == tit->second.end()) {
        v.fail("index " + std::to_string(i) + ": no recorded color for " + show(vt));
      } else if (e->second != f(vt)) {
        v.fail("index " + std::to_string(i) + ": recorded color " + std::to_string(e->second) + " for " + show(vt) +
               " but f_" + std::to_string(i) + " gives " + std::to_string(f(vt)));
      }
      return true;
    });
    if (tit == cert.colors.end()) {
      v.fail("index " + std::to_string(i) + ": color table missing");
    } else if (tit->second.size() != expected) {
      v.fail("index " + std::to_string(i) + ": color table has " + std::to_string(tit->second.size()) +
             " entries, expected " + std::to_string(expected));
    }
    for (int xi = i + 2; xi < h; ++xi) {
      std::vector<std::vector<Node>> factors;
      for (const auto& r : cert.subtrees) factors.push_back(r.level_nodes(xi));
      int cone = cert.level_set[static_cast<size_t>(i + 1)];
      for_each_product(factors, [&](const std::vector<Node>& t) {
        auto below = restrict_to(t, cone);
        int a = f(t);
        int b = f(below);
        if (a != b) {
          v.fail("i=" + std::to_string(i) + ", xi=" + std::to_string(xi) + ", t=" + show(t) + ": color " +
                 std::to_string(a) + " differs from " + std::to_string(b) + " at " + show(below));
        }
        return v.violations.size() < 64;
      });
    }
  }
  return v;
}

FuseResult fuse(const ColoringFamily& fam, const std::vector<TreeSpace>& spaces, int h, StageCaps caps) {
  require_family(fam, spaces);
  const int m = static_cast<int>(fam.size());
  if (h < m + 1) throw Error(ErrorKind::InvalidInput, "target height must be at least m+1 = " + std::to_string(m + 1));
  if (h > common_height(spaces)) throw Error(ErrorKind::InvalidInput, "target height exceeds the truncation");

  StageCheck check = [&](const StageView& sv, size_t j, const Node& y, std::string& why) {
    int limit = std::min(sv.alpha, m);
    if (limit == 0) return true;
    std::vector<std::vector<Node>> factors = sv.fresh;
    factors[j] = {y};
    bool ok = true;
    for_each_product(factors, [&](const std::vector<Node>& t) {
      for (int beta = 0; beta < limit; ++beta) {
        auto below = restrict_to(t, sv.level_set[static_cast<size_t>(beta + 1)]);
        const auto& f = fam[static_cast<size_t>(beta)];
        if (f(t) != f(below)) {
          why = "f_" + std::to_string(beta) + " must equal j_{" + std::to_string(beta) + "," + show(below) + "}";
          ok = false;
          return false;
        }
      }
      return true;
    });
    return ok;
  };

  StagedBuilder builder(spaces, h, caps, check);
  FuseResult res;
  res.outcome = builder.run();
  res.steps = builder.steps();
  res.transcript = builder.transcript();
  if (res.outcome == BuildOutcome::Found) {
    res.certificate = make_certificate(builder.reports(), fam);
  } else {
    res.failure = builder.failure();
  }
  return res;
}

Verdict verify_partial_identity(const Coloring& f, const std::vector<int>& B,
                                const std::vector<SubtreeReport>& subtrees) {
  const size_t d = subtrees.size();
  std::vector<bool> in_b(d, false);
  for (int j : B) in_b.at(static_cast<size_t>(j)) = true;
  const int h = subtrees.at(0).subtree_height();
  const auto& ls = subtrees[0].level_set;
  Verdict v;
  std::vector<std::vector<Node>> b_pool;
  for (size_t j = 0; j < d; ++j) {
    if (in_b[j]) b_pool.push_back(subtrees[j].nodes);
  }
  for_each_product(b_pool, [&](const std::vector<Node>& t) {
    int xi = 0;
    size_t k = 0;
    for (size_t j = 0; j < d; ++j) {
      if (in_b[j]) xi = std::max(xi, *subtrees[j].subtree_level(t[k++]));
    }
    for (int zeta = xi + 2; zeta < h; ++zeta) {
      std::vector<std::vector<Node>> factors;
      for (size_t j = 0; j < d; ++j) {
        factors.push_back(in_b[j] ? std::vector<Node>{} : subtrees[j].level_nodes(zeta));
      }
      k = 0;
      for (size_t j = 0; j < d; ++j) {
        if (in_b[j]) factors[j] = {t[k++]};
      }
      for_each_product(factors, [&](const std::vector<Node>& full) {
        std::vector<Node> cut = full;
        for (size_t j = 0; j < d; ++j) {
          if (!in_b[j]) cut[j] = full[j].prefix(ls[static_cast<size_t>(xi + 1)]);
        }
        int a = f(full);
        int b = f(cut);
        if (a != b) {
          v.fail("tuple " + show(full) + " has color " + std::to_string(a) + " but " + show(cut) + " has " +
                 std::to_string(b));
        }
        return v.violations.size() < 64;
      });
    }
    return v.violations.size() < 64;
  });
  return v;
}

PartialResult apply_tailcone_partial(const Coloring& f, const std::vector<int>& B,
                                     const std::vector<TreeSpace>& spaces, int h, StageCaps caps) {
  const size_t d = spaces.size();
  if (f.arity() != static_cast<int>(d)) {
    throw Error(ErrorKind::InvalidInput, "coloring arity does not match the number of factor trees");
  }
  std::vector<bool> in_b(d, false);
  for (int j : B) {
    if (j < 0 || j >= static_cast<int>(d)) throw Error(ErrorKind::InvalidInput, "coordinate " + std::to_string(j) + " is out of range");
    in_b[static_cast<size_t>(j)] = true;
  }
  size_t b_count = static_cast<size_t>(std::count(in_b.begin(), in_b.end(), true));
  if (b_count == 0 || b_count == d) {
    throw Error(ErrorKind::InvalidInput, "B and its complement must both be nonempty");
  }
  if (h < 2 || h > common_height(spaces)) throw Error(ErrorKind::InvalidInput, "target height out of range");

  StageCheck check = [&](const StageView& sv, size_t j, const Node& y, std::string& why) {
    if (in_b[j] || sv.alpha < 1) return true;
    std::vector<std::vector<Node>> c_fresh;
    for (size_t k = 0; k < d; ++k) {
      if (in_b[k]) continue;
      if (k == j) {
        c_fresh.push_back({y});
      } else if (sv.fresh[k].empty()) {
        return true;
      } else {
        c_fresh.push_back(sv.fresh[k]);
      }
    }
    std::vector<std::vector<std::pair<Node, int>>> b_pool;
    for (size_t k = 0; k < d; ++k) {
      if (!in_b[k]) continue;
      std::vector<std::pair<Node, int>> pool;
      for (int xi = 0; xi < sv.alpha; ++xi) {
        for (const Node& t : sv.built[k][static_cast<size_t>(xi)]) pool.emplace_back(t, xi);
      }
      b_pool.push_back(std::move(pool));
    }
    std::vector<size_t> idx(b_pool.size(), 0);
    std::vector<Node> full(d);
    while (true) {
      int xi = 0;
      size_t bi = 0;
      for (size_t k = 0; k < d; ++k) {
        if (in_b[k]) {
          const auto& [t, lv] = b_pool[bi][idx[bi]];
          full[k] = t;
          xi = std::max(xi, lv);
          ++bi;
        }
      }
      int cone = sv.level_set[static_cast<size_t>(xi + 1)];
      bool ok = true;
      for_each_product(c_fresh, [&](const std::vector<Node>& s) {
        std::vector<Node> cut = full;
        size_t ci = 0;
        for (size_t k = 0; k < d; ++k) {
          if (in_b[k]) continue;
          full[k] = s[ci];
          cut[k] = s[ci].prefix(cone);
          ++ci;
        }
        if (f(full) != f(cut)) {
          why = "f(s u t) must equal f(s|" + std::to_string(cone) + " u t) for t = " + show(cut);
          ok = false;
        }
        return ok;
      });
      if (!ok) return false;
      size_t p = b_pool.size();
      while (p > 0) {
        --p;
        if (++idx[p] < b_pool[p].size()) break;
        idx[p] = 0;
        if (p == 0) return true;
      }
      if (b_pool.empty()) return true;
    }
  };

  StagedBuilder builder(spaces, h, caps, check);
  PartialResult res;
  res.outcome = builder.run();
  res.steps = builder.steps();
  res.transcript = builder.transcript();
  if (res.outcome == BuildOutcome::Found) {
    res.subtrees = builder.reports();
    res.level_set = builder.level_set();
    for (size_t j = 0; j < d; ++j) {
      Verdict sv = validate_strong_subtree(res.subtrees[j], spaces[j]);
      for (const auto& msg : sv.violations) res.verdict.fail("subtree " + std::to_string(j) + ": " + msg);
    }
    Verdict idv = verify_partial_identity(f, B, res.subtrees);
    for (const auto& msg : idv.violations) res.verdict.fail(msg);
  } else {
    res.failure = builder.failure();
    res.verdict.fail(res.failure.message);
  }
  return res;
}

DimResult dimension_induction(const Coloring& f, const std::vector<TreeSpace>& spaces, int h, StageCaps caps) {
  const size_t D = spaces.size();
  if (D < 2) throw Error(ErrorKind::InvalidInput, "dimension induction needs at least two factor trees");
  if (f.arity() != static_cast<int>(D)) {
    throw Error(ErrorKind::InvalidInput, "coloring arity does not match the number of factor trees");
  }
  DimResult res;
  auto fail = [&](BuildOutcome o, const std::string& msg) {
    res.outcome = o;
    res.message = msg;
    res.verdict.fail(msg);
    res.transcript.push_back({{"step", "failed"}, {"outcome", outcome_name(o)}, {"message", msg}});
    return res;
  };

  PartialResult part = apply_tailcone_partial(f, {0}, spaces, h, caps);
  res.transcript.push_back({{"step", "partial"},
                            {"outcome", outcome_name(part.outcome)},
                            {"level_set", part.level_set},
                            {"steps", part.steps}});
  if (part.outcome != BuildOutcome::Found) return fail(part.outcome, "partial tail-cone: " + part.failure.message);
  if (!part.verdict.valid) {
    throw Error(ErrorKind::Internal, "partial tail-cone output failed verification: " + part.verdict.violations.front());
  }
  const auto& A = part.level_set;
  const SubtreeReport& T0 = part.subtrees[0];
  std::vector<int> shifted(A.begin() + 1, A.end());

  std::vector<SubtreeView> views;
  std::vector<TreeSpace> view_spaces;
  for (size_t j = 1; j < D; ++j) {
    views.emplace_back(trim(part.subtrees[j], spaces[j], shifted), spaces[j]);
    view_spaces.push_back(views.back().space());
  }
  const int star_h = h - 1;
  auto expand = [&](const std::vector<Node>& ys) {
    std::vector<Node> out;
    for (size_t j = 0; j < ys.size(); ++j) out.push_back(views[j].expand(ys[j]));
    return out;
  };
  auto with_head = [&](const Node& x, const std::vector<Node>& ys) {
    std::vector<Node> t = {x};
    auto e = expand(ys);
    t.insert(t.end(), e.begin(), e.end());
    return t;
  };

  Budget budget(caps.global);
  struct Vote {
    std::vector<Node> base;
    int color;
    std::vector<Node> leaves;
  };
  std::vector<Vote> votes;
  try {
    for (const Node& leaf : T0.level_nodes(h - 1)) {
      Coloring fx = Coloring::custom(static_cast<int>(D - 1), f.colors(), [&, leaf](const std::vector<Node>& ys) {
        int chi = ys.front().height();
        return f(with_head(leaf.prefix(A[static_cast<size_t>(chi)]), ys));
      }, "branch");
      auto w = dshl_search(fx, view_spaces, caps.global);
      json rec = {{"step", "branch"}, {"leaf", leaf.str()}};
      if (!w) {
        rec["dshl"] = nullptr;
        res.transcript.push_back(rec);
        continue;
      }
      rec["base"] = nodes_json(expand(w->base));
      rec["color"] = w->color;
      res.transcript.push_back(rec);
      auto it = std::find_if(votes.begin(), votes.end(),
                             [&](const Vote& v) { return v.base == w->base && v.color == w->color; });
      if (it == votes.end()) {
        votes.push_back({w->base, w->color, {leaf}});
      } else {
        it->leaves.push_back(leaf);
      }
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::CapExceeded) throw;
    return fail(BuildOutcome::Cap, std::string("branch search: ") + e.what());
  }
  if (votes.empty()) return fail(BuildOutcome::Exhausted, "no branch admits a dense-set witness below the truncation");
  std::stable_sort(votes.begin(), votes.end(), [](const Vote& a, const Vote& b) {
    if (a.leaves.size() != b.leaves.size()) return a.leaves.size() > b.leaves.size();
    if (a.base != b.base) return a.base < b.base;
    return a.color < b.color;
  });

  for (size_t rank = 0; rank < votes.size(); ++rank) {
    const Vote& vote = votes[rank];
    const int beta = vote.base.front().height();
    const int gamma = vote.color;
    if (beta + 1 >= h) continue;
    std::vector<std::pair<Node, size_t>> s_choices;
    for (const Node& s : T0.level_nodes(beta + 1)) {
      size_t good = static_cast<size_t>(std::count_if(vote.leaves.begin(), vote.leaves.end(),
                                                      [&](const Node& leaf) { return s.is_prefix_of(leaf); }));
      if (good > 0) s_choices.emplace_back(s, good);
    }
    std::stable_sort(s_choices.begin(), s_choices.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    res.transcript.push_back({{"step", "vote"},
                              {"rank", rank},
                              {"base", nodes_json(expand(vote.base))},
                              {"color", gamma},
                              {"branches", vote.leaves.size()}});

    for (const auto& [s, good] : s_choices) {
      std::vector<Node> succ;
      for (const Node& u : T0.level_nodes(beta + 2)) {
        if (s.is_prefix_of(u)) succ.push_back(u);
      }
      if (succ.empty()) continue;
      std::vector<Node> s_prime;
      std::vector<int> lambdas;
      std::vector<Matrix> mats;
      std::function<bool(size_t, int)> build = [&](size_t k, int prev) -> bool {
        if (k == succ.size()) return true;
        int alpha_bar = k == 0 ? beta + 1 : prev;
        int first = k == 0 ? beta + 2 : prev + 1;
        for (int lambda = first; lambda < star_h; ++lambda) {
          for (const Node& x : T0.level_nodes(lambda)) {
            if (!succ[k].is_prefix_of(x)) continue;
            Coloring g = Coloring::custom(static_cast<int>(D - 1), f.colors(), [&, x](const std::vector<Node>& ys) {
              return f(with_head(x, ys));
            }, "slice");
            auto m = find_level_matrix(g, view_spaces, vote.base, alpha_bar, lambda, gamma, budget);
            if (!m) continue;
            s_prime.push_back(x);
            lambdas.push_back(lambda);
            mats.push_back(m->matrix);
            if (build(k + 1, lambda)) return true;
            s_prime.pop_back();
            lambdas.pop_back();
            mats.pop_back();
          }
        }
        return false;
      };
      bool built = false;
      try {
        built = build(0, 0);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::CapExceeded) throw;
        return fail(BuildOutcome::Cap, std::string("successor matrices: ") + e.what());
      }
      res.transcript.push_back({{"step", "root"}, {"s", s.str()}, {"good_branches", good}, {"built", built}});
      if (!built) continue;
      for (size_t k = 0; k < succ.size(); ++k) {
        json mj = json::array();
        for (size_t j = 0; j < mats[k].size(); ++j) mj.push_back(nodes_json(views[j].expand_all(mats[k][j])));
        res.transcript.push_back({{"step", "successor"},
                                  {"k", k},
                                  {"s_prime", s_prime[k].str()},
                                  {"level", lambdas[k]},
                                  {"matrix", mj}});
      }
      Matrix N(D - 1);
      for (size_t j = 0; j + 1 < D; ++j) {
        for (const Node& u : view_spaces[j].extensions_at(vote.base[j], beta + 1)) {
          Node w = u;
          for (const auto& mk : mats) {
            auto hit = std::find_if(mk[j].begin(), mk[j].end(), [&](const Node& z) { return w.is_prefix_of(z); });
            if (hit == mk[j].end()) throw Error(ErrorKind::Internal, "dense matrix chain broke at \"" + w.str() + "\"");
            w = *hit;
          }
          N[j].push_back(views[j].expand(w));
        }
        N[j] = sorted_canonical(std::move(N[j]));
      }
      SdhlWitness w;
      w.base = {s};
      auto tb = expand(vote.base);
      w.base.insert(w.base.end(), tb.begin(), tb.end());
      w.xi = A[static_cast<size_t>(beta + 1)] + 1;
      w.matrix.push_back(sorted_canonical(s_prime));
      w.matrix.insert(w.matrix.end(), N.begin(), N.end());
      w.color = gamma;
      res.verdict = check_sdhl_prime_witness(w, f, spaces);
      if (!res.verdict.valid) {
        throw Error(ErrorKind::Internal, "assembled matrix failed the somewhere-dense check: " +
                                             res.verdict.violations.front());
      }
      json mj = json::array();
      for (const auto& col : w.matrix) mj.push_back(nodes_json(col));
      res.transcript.push_back({{"step", "assemble"},
                                {"base", nodes_json(w.base)},
                                {"xi", w.xi},
                                {"matrix", mj},
                                {"color", w.color}});
      res.outcome = BuildOutcome::Found;
      res.witness = std::move(w);
      return res;
    }
  }
  return fail(BuildOutcome::Exhausted, "no vote leads to a complete chain of successor matrices below the truncation");
}

}  // namespace hl
