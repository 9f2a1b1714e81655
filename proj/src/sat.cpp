#include "sat.hpp"

#include <algorithm>

namespace hl::sat {

int Solver::new_var() {
  value_.push_back(-1);
  level_.push_back(0);
  reason_.push_back(-1);
  activity_.push_back(0.0);
  phase_.push_back(false);
  seen_.push_back(false);
  watches_.emplace_back();
  watches_.emplace_back();
  return num_vars();
}

signed char Solver::lit_value(Lit l) const {
  signed char v = value_[static_cast<size_t>(var_of(l))];
  if (v < 0) return -1;
  return (l & 1) ? static_cast<signed char>(1 - v) : v;
}

void Solver::assign(Lit l, int reason) {
  auto v = static_cast<size_t>(var_of(l));
  value_[v] = (l & 1) ? 0 : 1;
  level_[v] = decision_level();
  reason_[v] = reason;
  trail_.push_back(l);
}

int Solver::attach(std::vector<Lit> lits) {
  int idx = static_cast<int>(clauses_.size());
  watches_[static_cast<size_t>(neg(lits[0]))].push_back(idx);
  watches_[static_cast<size_t>(neg(lits[1]))].push_back(idx);
  clauses_.push_back(std::move(lits));
  return idx;
}

void Solver::add_clause(const std::vector<int>& dimacs) {
  if (inconsistent_) return;
  backtrack(0);
  std::vector<Lit> lits;
  for (int d : dimacs) {
    if (d == 0 || std::abs(d) > num_vars()) throw Error(ErrorKind::Internal, "literal out of range");
    lits.push_back(encode(d));
  }
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  std::vector<Lit> kept;
  for (size_t i = 0; i < lits.size(); ++i) {
    if (i + 1 < lits.size() && lits[i + 1] == neg(lits[i])) return;
    signed char v = lit_value(lits[i]);
    if (v == 1) return;
    if (v < 0) kept.push_back(lits[i]);
  }
  if (kept.empty()) {
    inconsistent_ = true;
  } else if (kept.size() == 1) {
    assign(kept[0], -1);
    if (propagate() >= 0) inconsistent_ = true;
  } else {
    attach(std::move(kept));
  }
}

int Solver::propagate() {
  while (qhead_ < trail_.size()) {
    Lit p = trail_[qhead_++];
    Lit false_lit = neg(p);
    auto& ws = watches_[static_cast<size_t>(p)];
    size_t keep = 0;
    for (size_t i = 0; i < ws.size(); ++i) {
      int ci = ws[i];
      auto& c = clauses_[static_cast<size_t>(ci)];
      if (c[0] == false_lit) std::swap(c[0], c[1]);
      if (lit_value(c[0]) == 1) {
        ws[keep++] = ci;
        continue;
      }
      bool moved = false;
      for (size_t k = 2; k < c.size(); ++k) {
        if (lit_value(c[k]) != 0) {
          std::swap(c[1], c[k]);
          watches_[static_cast<size_t>(neg(c[1]))].push_back(ci);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[keep++] = ci;
      if (lit_value(c[0]) == 0) {
        for (size_t j = i + 1; j < ws.size(); ++j) ws[keep++] = ws[j];
        ws.resize(keep);
        qhead_ = trail_.size();
        return ci;
      }
      assign(c[0], ci);
    }
    ws.resize(keep);
  }
  return -1;
}

void Solver::bump(int var) {
  auto v = static_cast<size_t>(var);
  activity_[v] += inc_;
  if (activity_[v] > 1e100) {
    for (double& a : activity_) a *= 1e-100;
    inc_ *= 1e-100;
  }
}

void Solver::analyze(int conflict, std::vector<Lit>& learnt, int& back_level) {
  learnt.assign(1, 0);
  int pending = 0;
  Lit p = -1;
  size_t index = trail_.size();
  int ci = conflict;
  do {
    const auto& c = clauses_[static_cast<size_t>(ci)];
    for (size_t k = (p == -1 ? 0 : 1); k < c.size(); ++k) {
      Lit q = c[k];
      auto v = static_cast<size_t>(var_of(q));
      if (seen_[v] || level_[v] == 0) continue;
      seen_[v] = true;
      bump(var_of(q));
      if (level_[v] == decision_level()) {
        ++pending;
      } else {
        learnt.push_back(q);
      }
    }
    while (!seen_[static_cast<size_t>(var_of(trail_[--index]))]) {
    }
    p = trail_[index];
    ci = reason_[static_cast<size_t>(var_of(p))];
    seen_[static_cast<size_t>(var_of(p))] = false;
    --pending;
    if (pending > 0 && ci >= 0) {
      auto& rc = clauses_[static_cast<size_t>(ci)];
      if (rc[0] != p) std::swap(rc[0], rc[1]);
    }
  } while (pending > 0);
  learnt[0] = neg(p);
  back_level = 0;
  size_t max_i = 1;
  for (size_t i = 1; i < learnt.size(); ++i) {
    int lv = level_[static_cast<size_t>(var_of(learnt[i]))];
    if (lv > back_level) {
      back_level = lv;
      max_i = i;
    }
  }
  if (learnt.size() > 1) std::swap(learnt[1], learnt[max_i]);
  for (Lit l : learnt) seen_[static_cast<size_t>(var_of(l))] = false;
  inc_ /= 0.95;
}

void Solver::backtrack(int level) {
  if (decision_level() <= level) return;
  for (size_t i = trail_.size(); i > trail_lim_[static_cast<size_t>(level)]; --i) {
    auto v = static_cast<size_t>(var_of(trail_[i - 1]));
    phase_[v] = value_[v] == 1;
    value_[v] = -1;
    reason_[v] = -1;
  }
  trail_.resize(trail_lim_[static_cast<size_t>(level)]);
  trail_lim_.resize(static_cast<size_t>(level));
  qhead_ = trail_.size();
}

int Solver::pick_branch() const {
  int best = -1;
  for (size_t v = 0; v < value_.size(); ++v) {
    if (value_[v] < 0 && (best < 0 || activity_[v] > activity_[static_cast<size_t>(best)])) best = static_cast<int>(v);
  }
  return best;
}

Solver::Result Solver::solve(const std::vector<int>& assumptions, Budget& budget) {
  if (inconsistent_) return Result::Unsat;
  backtrack(0);
  if (propagate() >= 0) {
    inconsistent_ = true;
    return Result::Unsat;
  }
  std::vector<Lit> assume;
  for (int d : assumptions) assume.push_back(encode(d));
  unsigned long long conflicts = 0;
  unsigned long long restart_at = 100;
  std::vector<Lit> learnt;
  while (true) {
    int conflict = propagate();
    if (conflict >= 0) {
      budget.tick("sat search");
      if (decision_level() == 0) {
        inconsistent_ = true;
        return Result::Unsat;
      }
      int back_level = 0;
      analyze(conflict, learnt, back_level);
      backtrack(back_level);
      if (learnt.size() == 1) {
        assign(learnt[0], -1);
      } else {
        int ci = attach(learnt);
        assign(clauses_[static_cast<size_t>(ci)][0], ci);
      }
      if (++conflicts >= restart_at) {
        restart_at += restart_at / 2;
        backtrack(0);
      }
      continue;
    }
    Lit next = -1;
    while (decision_level() < static_cast<int>(assume.size())) {
      Lit a = assume[static_cast<size_t>(decision_level())];
      signed char v = lit_value(a);
      if (v == 0) {
        backtrack(0);
        return Result::Unsat;
      }
      if (v == 1) {
        trail_lim_.push_back(trail_.size());
        continue;
      }
      next = a;
      break;
    }
    if (next < 0) {
      int var = pick_branch();
      if (var < 0) {
        model_.assign(value_.size(), false);
        for (size_t v = 0; v < value_.size(); ++v) model_[v] = value_[v] == 1;
        backtrack(0);
        return Result::Sat;
      }
      next = 2 * var + (phase_[static_cast<size_t>(var)] ? 0 : 1);
    }
    trail_lim_.push_back(trail_.size());
    assign(next, -1);
  }
}

}  // namespace hl::sat
