// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero if any criterion fails.
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "hl/cli.hpp"
#include "hl/condition.hpp"
#include "hl/error.hpp"
#include "hl/polarized.hpp"
#include "hl/subtree.hpp"
#include "hl/tailcone.hpp"
#include "hl/witness.hpp"
#include "oracles.hpp"

using namespace hl;
using nlohmann::json;

namespace {

// Pinned budgets (seconds) and sample sizes.
constexpr double kDegreeSeconds = 1.0;
constexpr double kFhlSeconds = 10.0;
constexpr double kWitnessSeconds = 300.0;
constexpr double kPolarizedSeconds = 600.0;
constexpr int kRandomWitnessColorings = 10000;
constexpr int kRandomFamilies = 1000;
constexpr int kRandomPolarized = 100;
constexpr int kRawMaps = 200;

struct Result {
  bool pass = true;
  std::ostringstream detail;
  Result() { detail << std::fixed << std::setprecision(2); }
  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "first failure: " << what << "; ";
      pass = false;
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<TreeSpace> box(int d, int b, int n) { return std::vector<TreeSpace>(static_cast<size_t>(d), TreeSpace::uniform(b, n)); }

void degree_numerics(Result& r) {
  auto t0 = Clock::now();
  const long long expected[] = {1, 2, 16, 272, 7936};
  for (int n = 1; n <= 5; ++n) r.require(tangent(n) == expected[n - 1], "tangent(" + std::to_string(n) + ")");
  for (int n = 1; n <= 4; ++n) {
    r.require(tangent(n) == oracle::alternating_permutations(2 * n - 1), "alternating count " + std::to_string(n));
  }
  r.require(devlin_lower_bound(2) == 2, "devlin(2)");
  r.require(devlin_lower_bound(3) == 20, "devlin(3)");
  double s = seconds_since(t0);
  r.require(s < kDegreeSeconds, "time budget");
  r.detail << "t_1..t_5 = 1,2,16,272,7936; devlin(2,3) = 2,20; " << s << "s";
}

void finite_hl(Result& r) {
  auto t0 = Clock::now();
  FhlOptions o;
  o.d = 1;
  o.b = 2;
  o.r = 2;
  FhlResult res = finite_hl_number(o);
  r.require(res.value == 3, "value is 3");
  r.require(res.counterexample_n == 2, "counterexample at n=2");
  if (res.counterexample) {
    const Coloring& f = *res.counterexample;
    r.require(!sdhl_search(f, box(1, 2, 2)).has_value(), "library search finds no witness on the counterexample");
    r.require(!oracle::sdhl_exists(f, 1, 2, 2), "brute force finds no witness on the counterexample");
    r.require(f({Node("0")}) != f({Node("1")}), "counterexample splits the successors");
  } else {
    r.require(false, "counterexample emitted");
  }
  double s = seconds_since(t0);
  r.require(s < kFhlSeconds, "time budget");
  r.detail << "n = " << (res.value ? std::to_string(*res.value) : "none") << ", counterexample at "
           << (res.counterexample_n ? std::to_string(*res.counterexample_n) : "none") << "; " << s << "s";
}

void witness_equivalence(Result& r) {
  auto t0 = Clock::now();
  long long disagreements = 0, unsound = 0, with_witness = 0, total = 0;
  auto one = [&](const Coloring& f, int d, int n) {
    auto spaces = box(d, 2, n);
    auto w = sdhl_search(f, spaces);
    bool brute = oracle::sdhl_exists(f, d, 2, n);
    ++total;
    if (w.has_value() != brute) ++disagreements;
    if (w) {
      ++with_witness;
      if (!check_sdhl_witness(*w, f, spaces).valid) ++unsound;
    }
  };
  // Every 2-coloring of the 7 nodes of the binary tree of height 3.
  auto space = TreeSpace::uniform(2, 3);
  auto nodes = space.nodes();
  for (int mask = 0; mask < (1 << nodes.size()); ++mask) {
    std::map<std::vector<Node>, int> entries;
    for (size_t i = 0; i < nodes.size(); ++i) entries[{nodes[i]}] = mask >> i & 1;
    one(Coloring::table(1, 2, entries), 1, 3);
  }
  std::mt19937_64 rng(20240611);
  for (int k = 0; k < kRandomWitnessColorings; ++k) {
    int n = 2 + static_cast<int>(rng() % 3);
    int colors = 1 + static_cast<int>(rng() % 3);
    one(oracle::random_level_coloring(2, 2, n, colors, rng), 2, n);
  }
  r.require(disagreements == 0, "search and brute force agree");
  r.require(unsound == 0, "every witness checks");
  double s = seconds_since(t0);
  r.require(s < kWitnessSeconds, "time budget");
  r.detail << total << " colorings, " << with_witness << " with witness, " << disagreements << " disagreements, "
           << unsound << " unsound; " << s << "s";
}

void tail_cone_round_trip(Result& r) {
  std::mt19937_64 rng(77);
  int found = 0, capped = 0, exhausted = 0, unsound = 0, mutation_missed = 0;
  for (int k = 0; k < kRandomFamilies; ++k) {
    int d = 1 + static_cast<int>(rng() % 2);
    int m = 1 + static_cast<int>(rng() % 2);
    int n = 4 + static_cast<int>(rng() % 5);
    auto spaces = box(d, 2, n);
    ColoringFamily fam;
    for (int i = 0; i < m; ++i) {
      int delta = 1 + static_cast<int>(rng() % 2);
      fam.push_back(oracle::random_level_coloring(d, 2, n, delta, rng));
    }
    auto res = fuse(fam, spaces, 3);
    if (res.outcome == BuildOutcome::Cap) ++capped;
    if (res.outcome == BuildOutcome::Exhausted) ++exhausted;
    if (res.outcome != BuildOutcome::Found) continue;
    ++found;
    const auto& cert = *res.certificate;
    if (!check_tail_cone(cert, fam, spaces).valid) ++unsound;
    std::vector<std::pair<int, std::string>> keys;
    for (const auto& [i, table] : cert.colors) {
      for (const auto& [key, c] : table) keys.emplace_back(i, key);
    }
    auto [i, key] = keys[rng() % keys.size()];
    auto bad = cert;
    int& c = bad.colors[i][key];
    c = (c + 1) % std::max(2, fam[static_cast<size_t>(i)].colors());
    if (check_tail_cone(bad, fam, spaces).valid) ++mutation_missed;
  }
  r.require(unsound == 0, "every certificate checks");
  r.require(mutation_missed == 0, "every mutated certificate fails");
  r.require(found > 0, "at least one success");
  r.detail << kRandomFamilies << " families: " << found << " found, " << capped << " capped (cap rate "
           << 100.0 * capped / kRandomFamilies << "%), " << exhausted << " exhausted; " << unsound << " unsound, "
           << mutation_missed << " mutations accepted";
}

void dimension_induction_soundness(Result& r) {
  int found = 0, capped = 0, exhausted = 0, unsound = 0;
  StageCaps caps{20000, 1000000};
  auto run = [&](const Coloring& f, int n) {
    auto spaces = box(2, 2, n);
    auto res = dimension_induction(f, spaces, 7, caps);
    if (res.outcome == BuildOutcome::Cap) ++capped;
    if (res.outcome == BuildOutcome::Exhausted) ++exhausted;
    if (res.outcome != BuildOutcome::Found) return;
    ++found;
    if (!res.witness || !check_sdhl_prime_witness(*res.witness, f, spaces).valid) ++unsound;
  };
  const char* exprs[] = {"0", "1", "ht(0) % 2", "ht(1) % 2", "maxht % 2", "minht % 2", "sumht % 2",
                         "digit(0,0)", "digit(1,0)", "(ht(0) + 1) / 2 % 2", "ht(0) / 3 % 2"};
  for (int n : {9, 13}) {
    for (const char* e : exprs) run(Coloring::named("expression", {{"expr", e}, {"colors", 2}}, 2), n);
  }
  for (unsigned long long seed = 0; seed < 20; ++seed) {
    run(Coloring::named("random", {{"seed", seed}, {"colors", 2}}, 2), 9);
  }
  r.require(unsound == 0, "every success passes the SDHL' checker");
  r.require(found > 0, "at least one success");
  r.detail << found << " found, " << capped << " capped, " << exhausted << " exhausted, " << unsound << " unsound";
}

void polarized_tightness(Result& r) {
  auto t0 = Clock::now();
  for (int d = 1; d <= 2; ++d) {
    auto f = height_permutation_coloring(d);
    auto spaces = box(d + 1, 2, 10);
    auto res = polarized_search(f, spaces);
    r.require(res.found, "height-permutation search succeeds for d=" + std::to_string(d));
    r.require(static_cast<long long>(res.colors.size()) == factorial(d + 1),
              "exactly (d+1)! colors for d=" + std::to_string(d));
    for (size_t j = 0; j < res.trees.size(); ++j) {
      r.require(validate_nice_subtree(res.trees[j], spaces[j], 3).valid, "nice subtree");
    }
    r.detail << "height-permutation d=" << d << ": " << res.colors.size() << " colors; ";
  }
  auto random_sweep = [&](int depth, PolarizedOptions o) {
    o.splitting_depth = depth;
    int found = 0, capped = 0, over = 0;
    auto spaces = box(2, 2, 10);
    for (int k = 0; k < kRandomPolarized; ++k) {
      auto f = Coloring::named("random", {{"seed", 1000 + k}, {"colors", 3}}, 2);
      auto res = polarized_search(f, spaces, o);
      if (res.capped) ++capped;
      if (!res.found) continue;
      ++found;
      if (res.colors.size() > 2 || realized_colors(f, res.trees) != res.colors) ++over;
      for (size_t j = 0; j < res.trees.size(); ++j) {
        if (!validate_nice_subtree(res.trees[j], spaces[j], depth).valid) ++over;
      }
    }
    r.require(over == 0, "random successes realize at most 2 colors at depth " + std::to_string(depth));
    r.detail << "random depth " << depth << ": " << found << "/" << kRandomPolarized << " found, " << capped
             << " capped; ";
    return found;
  };
  PolarizedOptions o;
  o.per_stage_cap = 200000;
  o.cap = 2000000;
  random_sweep(3, o);
  int shallow = random_sweep(1, o);
  r.require(shallow > 0, "random successes at depth 1");
  double s = seconds_since(t0);
  r.require(s < kPolarizedSeconds, "time budget");
  r.detail << s << "s";
}

void strong_subtree_algebra(Result& r) {
  long long checked = 0, mismatch = 0, trim_bad = 0, tower_bad = 0;
  for (int n = 1; n <= 4; ++n) {
    auto space = TreeSpace::uniform(2, n);
    for (int mask = 1; mask < (1 << n); ++mask) {
      std::vector<int> A;
      for (int i = 0; i < n; ++i) {
        if (mask >> i & 1) A.push_back(i);
      }
      std::set<std::vector<Node>> enumerated;
      auto reports = enumerate_strong_subtrees(space, A);
      for (const auto& rep : reports) {
        if (!validate_strong_subtree(rep, space).valid) ++mismatch;
        auto nodes = rep.nodes;
        std::sort(nodes.begin(), nodes.end());
        enumerated.insert(nodes);
      }
      auto brute = oracle::strong_subtrees_by_subsets(2, n, A);
      if (brute != enumerated) ++mismatch;
      checked += static_cast<long long>(brute.size());
      for (const auto& rep : reports) {
        for (int sub = 1; sub < (1 << A.size()); ++sub) {
          std::vector<int> B;
          for (size_t i = 0; i < A.size(); ++i) {
            if (sub >> i & 1) B.push_back(A[i]);
          }
          auto t = trim(rep, space, B);
          if (t.level_set != B || !validate_strong_subtree(t, space).valid) ++trim_bad;
        }
        int h = rep.subtree_height();
        for (const Node& top : rep.level_nodes(h - 1)) {
          for (int i = 0; i < h; ++i) {
            Node once = subtree_restrict(top, i, rep);
            for (int k = 0; k <= i; ++k) {
              if (subtree_restrict(once, k, rep) != subtree_restrict(top, k, rep)) ++tower_bad;
            }
          }
        }
      }
    }
  }
  r.require(mismatch == 0, "validator, enumerator and subset enumeration agree");
  r.require(trim_bad == 0, "trim output validates");
  r.require(tower_bad == 0, "restriction tower law");
  r.detail << checked << " subtrees over all level sets with n <= 4; " << mismatch << " mismatches, " << trim_bad
           << " bad trims, " << tower_bad << " tower failures";
}

void condition_algebra(Result& r) {
  std::vector<Node> pool;
  for (int h = 0; h < 4; ++h) {
    auto lv = oracle::level_nodes(2, h);
    pool.insert(pool.end(), lv.begin(), lv.end());
  }
  auto conditions = [&](const IndexSet& ground, int k, size_t pool_size) {
    std::vector<Condition> out;
    for (const auto& s : subsets_up_to(ground, k)) {
      std::vector<size_t> idx(s.size(), 0);
      while (true) {
        Condition c;
        for (size_t i = 0; i < s.size(); ++i) c.assign[s[i]] = {pool[idx[i]]};
        out.push_back(c);
        size_t i = s.size();
        while (i > 0 && ++idx[i - 1] == pool_size) idx[--i] = 0;
        if (i == 0) break;
      }
    }
    return out;
  };
  long long law_bad = 0, glb_bad = 0, cl_bad = 0, cross_bad = 0, hyp_bad = 0;
  auto ws = subsets_up_to({0, 1, 2, 3, 4}, 3, true);
  for (const auto& w0 : ws) {
    for (const auto& p : conditions(w0, 3, 7)) {
      for (const auto& w1 : ws) {
        Condition q = copying_action(p, w0, w1);
        if (q.support().size() != p.support().size() || copying_action(q, w1, w0) != p) ++law_bad;
        if (w0 == w1 && q != p) ++law_bad;
        for (const auto& w2 : ws) {
          if (copying_action(q, w1, w2) != copying_action(p, w0, w2)) ++law_bad;
        }
      }
    }
  }
  auto space = conditions({0, 1}, 2, pool.size());
  for (const auto& p : space) {
    for (const auto& q : space) {
      std::optional<Condition> g;
      try {
        g = glb({p, q});
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Incompatibility) ++glb_bad;
      }
      if (g && (!extends(*g, p) || !extends(*g, q))) ++glb_bad;
      for (const auto& x : space) {
        if (extends(x, p) && extends(x, q) && (!g || !extends(x, *g))) ++glb_bad;
      }
    }
  }
  std::mt19937_64 rng(7);
  for (int k = 0; k < kRawMaps; ++k) {
    int d = 1 + static_cast<int>(rng() % 2);
    int m = 2 + static_cast<int>(rng() % 5);
    auto raw = oracle::random_raw_map(rng, d, m);
    if (!check_raw_preconditions(raw, d).empty()) ++hyp_bad;
    auto w = build_w_map(raw, d);
    if (w.W != build_w_map(raw, d, -1, XBound::Unbounded).W) ++cross_bad;
    if (!verify_cl(w, d).pass()) ++cl_bad;
  }
  r.require(law_bad == 0, "copying action laws");
  r.require(glb_bad == 0, "glb is the greatest lower bound");
  r.require(hyp_bad == 0, "generator meets the raw-map hypotheses");
  r.require(cross_bad == 0, "bounded and unbounded X agree");
  r.require(cl_bad == 0, "CL.3 and CL.4 hold");
  r.detail << law_bad << " law failures, " << glb_bad << " glb failures over " << space.size() << "^2 pairs; "
           << kRawMaps << " raw maps: " << cross_bad << " bounded/unbounded mismatches, " << cl_bad << " CL failures";
}

void replay_determinism(Result& r) {
  unsetenv("HL_LAB_WORKERS");
  std::string dir = HL_FIXTURE_DIR;
  std::ifstream cf(dir + "/cases.json");
  if (!cf) {
    r.require(false, "fixture list readable");
    return;
  }
  json cases = json::parse(cf)["cases"];
  auto slurp = [](const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
  };
  int identical = 0, golden = 0;
  for (const auto& c : cases) {
    std::string name = c["name"];
    std::string input = c["stdin"].is_null() ? "" : slurp(dir + "/inputs/" + c["stdin"].get<std::string>());
    auto args = c["args"].get<std::vector<std::string>>();
    std::string outs[2], errs[2];
    int codes[2];
    for (int k = 0; k < 2; ++k) {
      std::istringstream in(input);
      std::ostringstream out, err;
      codes[k] = cli::dispatch(args, in, out, err);
      outs[k] = out.str();
      errs[k] = err.str();
    }
    bool same = outs[0] == outs[1] && errs[0] == errs[1] && codes[0] == codes[1];
    r.require(same, name + " differs between runs");
    identical += same;
    std::string base = dir + "/expected/" + name;
    bool matches = outs[0] == slurp(base + ".out") && errs[0] == slurp(base + ".err") &&
                   std::to_string(codes[0]) + "\n" == slurp(base + ".code");
    r.require(matches, name + " differs from its frozen output");
    golden += matches;
  }
  r.detail << identical << "/" << cases.size() << " fixtures byte-identical across two runs, " << golden << "/"
           << cases.size() << " match frozen outputs";
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  struct Criterion {
    int id;
    const char* name;
    std::function<void(Result&)> run;
  };
  std::vector<Criterion> all = {
      {1, "degree numerics", degree_numerics},
      {2, "finite HL number", finite_hl},
      {3, "witness search equivalence", witness_equivalence},
      {4, "tail-cone round trip", tail_cone_round_trip},
      {5, "dimension induction soundness", dimension_induction_soundness},
      {6, "polarized tightness", polarized_tightness},
      {7, "strong-subtree algebra", strong_subtree_algebra},
      {8, "condition algebra", condition_algebra},
      {9, "replay determinism", replay_determinism},
  };
  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    Result r;
    try {
      c.run(r);
    } catch (const std::exception& e) {
      r.require(false, std::string("exception: ") + e.what());
    }
    std::cout << "criterion " << c.id << " (" << c.name << "): " << (r.pass ? "PASS" : "FAIL") << "  "
              << r.detail.str() << std::endl;
    failed += !r.pass;
  }
  return failed == 0 ? 0 : 1;
}
