#pragma once

#include <vector>

#include "hl/error.hpp"

namespace hl::sat {

// Small CDCL solver. Literals are DIMACS style: +v / -v for variable v >= 1.
class Solver {
 public:
  int new_var();
  int num_vars() const { return static_cast<int>(value_.size()); }
  void add_clause(const std::vector<int>& lits);

  enum class Result { Sat, Unsat };
  // Conflicts are charged to the budget.
  Result solve(const std::vector<int>& assumptions, Budget& budget);
  // Model value after Sat.
  bool model(int var) const { return model_[static_cast<size_t>(var - 1)]; }

 private:
  using Lit = int;
  static Lit encode(int dimacs) { return dimacs > 0 ? 2 * (dimacs - 1) : 2 * (-dimacs - 1) + 1; }
  static int var_of(Lit l) { return l >> 1; }
  static Lit neg(Lit l) { return l ^ 1; }

  signed char lit_value(Lit l) const;
  void assign(Lit l, int reason);
  int propagate();
  void analyze(int conflict, std::vector<Lit>& learnt, int& back_level);
  void backtrack(int level);
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }
  int pick_branch() const;
  void bump(int var);
  int attach(std::vector<Lit> lits);

  std::vector<std::vector<Lit>> clauses_;
  std::vector<std::vector<int>> watches_;
  std::vector<signed char> value_;  // -1 unassigned, 0 false, 1 true
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<double> activity_;
  std::vector<bool> phase_;
  std::vector<bool> seen_;
  std::vector<Lit> trail_;
  std::vector<size_t> trail_lim_;
  std::vector<bool> model_;
  size_t qhead_ = 0;
  double inc_ = 1.0;
  bool inconsistent_ = false;
};

}  // namespace hl::sat
