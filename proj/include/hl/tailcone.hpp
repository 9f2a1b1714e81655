#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "hl/coloring.hpp"
#include "hl/subtree.hpp"
#include "hl/witness.hpp"

namespace hl {

struct TailConeCertificate {
  std::vector<SubtreeReport> subtrees;
  std::vector<int> level_set;
  // colors[i][tuple_key(v)] = f_i(v) for v on subtree level i+1.
  std::map<int, std::map<std::string, int>> colors;
};

// Fills the color tables for the first m = fam.size() indices.
TailConeCertificate make_certificate(const std::vector<SubtreeReport>& subtrees, const ColoringFamily& fam);

Verdict check_tail_cone(const TailConeCertificate& cert, const ColoringFamily& fam,
                        const std::vector<TreeSpace>& spaces);

struct StageCaps {
  unsigned long long per_stage = 200'000;
  unsigned long long global = 20'000'000;
};

enum class BuildOutcome { Found, Cap, Exhausted };
std::string_view outcome_name(BuildOutcome o);

struct StagedFailure {
  int deepest_stage = 0;
  std::vector<std::string> blocking;
  std::string message;
};

struct FuseResult {
  BuildOutcome outcome = BuildOutcome::Exhausted;
  std::optional<TailConeCertificate> certificate;
  std::vector<nlohmann::json> transcript;
  StagedFailure failure;
  unsigned long long steps = 0;
};

FuseResult fuse(const ColoringFamily& fam, const std::vector<TreeSpace>& spaces, int h, StageCaps caps = {});

struct PartialResult {
  BuildOutcome outcome = BuildOutcome::Exhausted;
  std::vector<SubtreeReport> subtrees;
  std::vector<int> level_set;
  Verdict verdict;
  std::vector<nlohmann::json> transcript;
  StagedFailure failure;
  unsigned long long steps = 0;
};

// For every tuple t over the coordinates in B with top subtree level xi and every level sequence s
// over the other coordinates above xi+1: f(s u t) = f((s restricted to level xi+1) u t).
Verdict verify_partial_identity(const Coloring& f, const std::vector<int>& B,
                                const std::vector<SubtreeReport>& subtrees);

PartialResult apply_tailcone_partial(const Coloring& f, const std::vector<int>& B,
                                     const std::vector<TreeSpace>& spaces, int h, StageCaps caps = {});

struct DimResult {
  BuildOutcome outcome = BuildOutcome::Exhausted;
  std::optional<SdhlWitness> witness;
  Verdict verdict;
  std::vector<nlohmann::json> transcript;
  std::string message;
};

// Builds a somewhere dense monochromatic matrix for a coloring of arity d+1 through a partial
// tail-cone subtree family of height h on coordinate 0.
DimResult dimension_induction(const Coloring& f, const std::vector<TreeSpace>& spaces, int h, StageCaps caps = {});

}  // namespace hl
