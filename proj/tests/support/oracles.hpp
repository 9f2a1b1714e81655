#pragma once

#include <random>
#include <set>
#include <vector>

#include "hl/coloring.hpp"
#include "hl/condition.hpp"
#include "hl/subtree.hpp"
#include "hl/tree.hpp"

// Independent reference implementations used to cross-check the library.
namespace oracle {

// Counts up-down permutations of {0..len-1} by enumerating all of them.
long long alternating_permutations(int len);

// Product over i<d of i!, then t + 2^{d-1} (product - 1), evaluated without the library.
long long devlin_bound(long long tangent_d, int d);

// Nodes of a uniform tree at one height, built by counting in base b.
std::vector<hl::Node> level_nodes(int b, int height);

// True iff some base tuple, some level above it and some choice of one extension per successor
// give a monochromatic matrix.
bool sdhl_exists(const hl::Coloring& f, int d, int b, int n);

// Every subset of nodes on the given levels that satisfies both strong-subtree clauses,
// found by testing all subsets directly.
std::set<std::vector<hl::Node>> strong_subtrees_by_subsets(int b, int n, const std::vector<int>& levels);

// Uniformly random coloring of every level tuple of a uniform d-fold product.
hl::Coloring random_level_coloring(int d, int b, int n, int colors, std::mt19937_64& rng);

// Raw W-maps built from a root, per-point blocks and per-pair blocks; they satisfy the
// containment, monotonicity and coherence hypotheses by construction.
hl::WMap random_raw_map(std::mt19937_64& rng, int d, int m);

}  // namespace oracle
