#include "oracles.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace oracle {

using hl::Node;

long long alternating_permutations(int len) {
  std::vector<int> p(static_cast<size_t>(len));
  std::iota(p.begin(), p.end(), 0);
  long long count = 0;
  do {
    bool ok = true;
    for (int i = 0; i + 1 < len && ok; ++i) ok = (i % 2 == 0) ? p[i] < p[i + 1] : p[i] > p[i + 1];
    count += ok;
  } while (std::next_permutation(p.begin(), p.end()));
  return count;
}

long long devlin_bound(long long tangent_d, int d) {
  long long prod = 1;
  for (int i = 0; i < d; ++i) {
    long long fact = 1;
    for (int k = 2; k <= i; ++k) fact *= k;
    prod *= fact;
  }
  return tangent_d + (1LL << (d - 1)) * (prod - 1);
}

std::vector<Node> level_nodes(int b, int height) {
  std::vector<Node> out;
  long long total = 1;
  for (int i = 0; i < height; ++i) total *= b;
  for (long long x = 0; x < total; ++x) {
    std::string s(static_cast<size_t>(height), '0');
    long long y = x;
    for (int i = height - 1; i >= 0; --i) {
      s[static_cast<size_t>(i)] = static_cast<char>('0' + y % b);
      y /= b;
    }
    out.emplace_back(s);
  }
  return out;
}

namespace {

std::vector<Node> above(const Node& t, int b, int level) {
  std::vector<Node> out;
  for (const Node& u : level_nodes(b, level)) {
    if (u.str().compare(0, t.str().size(), t.str()) == 0) out.push_back(u);
  }
  return out;
}

bool monochromatic_choice(const hl::Coloring& f, int d, const std::vector<int>& owner,
                          const std::vector<std::vector<Node>>& slots, std::vector<size_t>& pick, size_t k) {
  if (k == slots.size()) {
    std::vector<std::vector<Node>> sets(static_cast<size_t>(d));
    for (size_t s = 0; s < slots.size(); ++s) sets[static_cast<size_t>(owner[s])].push_back(slots[s][pick[s]]);
    int color = -1;
    std::vector<size_t> idx(static_cast<size_t>(d), 0);
    while (true) {
      std::vector<Node> t;
      for (int j = 0; j < d; ++j) t.push_back(sets[static_cast<size_t>(j)][idx[static_cast<size_t>(j)]]);
      int c = f(t);
      if (color >= 0 && c != color) return false;
      color = c;
      int j = d - 1;
      while (j >= 0 && ++idx[static_cast<size_t>(j)] == sets[static_cast<size_t>(j)].size()) idx[static_cast<size_t>(j--)] = 0;
      if (j < 0) return true;
    }
  }
  for (pick[k] = 0; pick[k] < slots[k].size(); ++pick[k]) {
    if (monochromatic_choice(f, d, owner, slots, pick, k + 1)) return true;
  }
  return false;
}

}  // namespace

bool sdhl_exists(const hl::Coloring& f, int d, int b, int n) {
  for (int h = 0; h + 1 < n; ++h) {
    auto lvl = level_nodes(b, h);
    std::vector<size_t> base_idx(static_cast<size_t>(d), 0);
    while (true) {
      for (int level = h + 1; level < n; ++level) {
        std::vector<std::vector<Node>> slots;
        std::vector<int> owner;
        for (int j = 0; j < d; ++j) {
          const Node& t = lvl[base_idx[static_cast<size_t>(j)]];
          for (int digit = 0; digit < b; ++digit) {
            slots.push_back(above(Node(t.str() + static_cast<char>('0' + digit)), b, level));
            owner.push_back(j);
          }
        }
        std::vector<size_t> pick(slots.size(), 0);
        if (monochromatic_choice(f, d, owner, slots, pick, 0)) return true;
      }
      int j = d - 1;
      while (j >= 0 && ++base_idx[static_cast<size_t>(j)] == lvl.size()) base_idx[static_cast<size_t>(j--)] = 0;
      if (j < 0) break;
    }
  }
  return false;
}

std::set<std::vector<Node>> strong_subtrees_by_subsets(int b, int n, const std::vector<int>& levels) {
  std::vector<Node> pool;
  for (int a : levels) {
    auto lv = level_nodes(b, a);
    pool.insert(pool.end(), lv.begin(), lv.end());
  }
  std::set<std::vector<Node>> out;
  const size_t k = levels.size();
  for (unsigned long mask = 1; mask < (1UL << pool.size()); ++mask) {
    std::vector<std::vector<Node>> by_level(k);
    std::vector<Node> picked;
    for (size_t i = 0; i < pool.size(); ++i) {
      if (!(mask >> i & 1UL)) continue;
      picked.push_back(pool[i]);
      size_t li = static_cast<size_t>(std::find(levels.begin(), levels.end(), pool[i].height()) - levels.begin());
      by_level[li].push_back(pool[i]);
    }
    if (by_level[0].size() != 1) continue;
    bool ok = true;
    for (size_t li = 1; li < k && ok; ++li) {
      for (const Node& u : by_level[li]) {
        bool has_parent = std::any_of(by_level[li - 1].begin(), by_level[li - 1].end(),
                                      [&](const Node& s) { return u.str().compare(0, s.str().size(), s.str()) == 0; });
        ok = ok && has_parent;
      }
    }
    for (size_t li = 0; li + 1 < k && ok; ++li) {
      for (const Node& s : by_level[li]) {
        if (s.height() + 1 >= n) continue;
        for (int digit = 0; digit < b && ok; ++digit) {
          std::string succ = s.str() + static_cast<char>('0' + digit);
          long long hits = std::count_if(by_level[li + 1].begin(), by_level[li + 1].end(),
                                         [&](const Node& u) { return u.str().compare(0, succ.size(), succ) == 0; });
          ok = hits == 1;
        }
      }
    }
    if (!ok) continue;
    std::sort(picked.begin(), picked.end());
    out.insert(picked);
  }
  return out;
}

hl::Coloring random_level_coloring(int d, int b, int n, int colors, std::mt19937_64& rng) {
  std::map<std::vector<Node>, int> entries;
  std::uniform_int_distribution<int> pick(0, colors - 1);
  for (int h = 0; h < n; ++h) {
    auto lv = level_nodes(b, h);
    std::vector<size_t> idx(static_cast<size_t>(d), 0);
    while (true) {
      std::vector<Node> t;
      for (int j = 0; j < d; ++j) t.push_back(lv[idx[static_cast<size_t>(j)]]);
      entries[t] = pick(rng);
      int j = d - 1;
      while (j >= 0 && ++idx[static_cast<size_t>(j)] == lv.size()) idx[static_cast<size_t>(j--)] = 0;
      if (j < 0) break;
    }
  }
  return hl::Coloring::table(d, colors, entries);
}

hl::WMap random_raw_map(std::mt19937_64& rng, int d, int m) {
  using hl::Index;
  hl::WMap raw;
  for (int i = 0; i < m; ++i) raw.E.push_back(1000 * (i + 1));
  int r0 = static_cast<int>(rng() % 3);
  int b1 = static_cast<int>(rng() % 3);
  int b2 = static_cast<int>(rng() % 3);
  hl::IndexSet root;
  for (int i = 0; i < r0; ++i) root.push_back(1 + i);
  std::vector<Index> single_offsets;
  for (int t = 0; t < b1; ++t) single_offsets.push_back(rng() % 2 ? 10 + t : -(10 + t));
  std::vector<std::pair<int, int>> pair_spec;  // (anchor, side)
  for (int t = 0; t < b2; ++t) pair_spec.emplace_back(static_cast<int>(rng() % 2), static_cast<int>(rng() % 2));
  for (const auto& u : hl::subsets_up_to(raw.E, d)) {
    hl::IndexSet w = root;
    for (Index x : u) {
      w.push_back(x);
      for (Index o : single_offsets) w.push_back(x + o);
    }
    if (u.size() == 2) {
      for (size_t t = 0; t < pair_spec.size(); ++t) {
        auto [a, side] = pair_spec[t];
        Index anchor = a ? u[1] : u[0];
        Index other = a ? u[0] : u[1];
        Index off = 100 + 20 * (other / 1000 - 1) + static_cast<Index>(t);
        w.push_back(side ? anchor + off : anchor - off);
      }
    }
    raw.W[u] = hl::make_index_set(w);
  }
  return raw;
}

}  // namespace oracle
