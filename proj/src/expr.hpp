#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hl/tree.hpp"

namespace hl::expr {

// Integer expressions over a node tuple. Functions: ht(j), digit(j,k), maxht, minht, sumht, d.
// Operators: + - * / % < <= > >= == != && || ! and c ? a : b.
class Program {
 public:
  static Program compile(const std::string& source);
  long long eval(const std::vector<Node>& tuple) const;

  struct Ast;

 private:
  std::shared_ptr<const Ast> root_;
};

}  // namespace hl::expr
