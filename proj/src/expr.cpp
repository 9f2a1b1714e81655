#include "expr.hpp"

#include <algorithm>
#include <cctype>

#include "hl/error.hpp"

namespace hl::expr {

struct Program::Ast {
  enum class Op { Num, Ht, Digit, MaxHt, MinHt, SumHt, Arity, Neg, Not, Bin, Cond };
  Op op = Op::Num;
  long long value = 0;
  std::string bin;
  std::vector<std::shared_ptr<const Ast>> kids;
};

namespace {

using AstPtr = std::shared_ptr<const Program::Ast>;
using Op = Program::Ast::Op;

[[noreturn]] void bad(const std::string& msg) {
  throw Error(ErrorKind::InvalidInput, "expression: " + msg);
}

class Parser {
 public:
  explicit Parser(const std::string& src) : s_(src) {}

  AstPtr parse() {
    AstPtr e = conditional();
    skip();
    if (pos_ != s_.size()) bad("unexpected '" + s_.substr(pos_, 1) + "'");
    return e;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(const std::string& tok) {
    skip();
    if (s_.compare(pos_, tok.size(), tok) == 0) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  void expect(const std::string& tok) {
    if (!accept(tok)) bad("expected '" + tok + "'");
  }

  static AstPtr make(Op op, long long value = 0, std::string bin = {}, std::vector<AstPtr> kids = {}) {
    auto a = std::make_shared<Program::Ast>();
    a->op = op;
    a->value = value;
    a->bin = std::move(bin);
    a->kids = std::move(kids);
    return a;
  }

  AstPtr conditional() {
    AstPtr c = binary(0);
    if (accept("?")) {
      AstPtr a = conditional();
      expect(":");
      AstPtr b = conditional();
      return make(Op::Cond, 0, {}, {c, a, b});
    }
    return c;
  }

  // Precedence climbing over the binary operator table.
  AstPtr binary(int level) {
    static const std::vector<std::vector<std::string>> table = {
        {"||"}, {"&&"}, {"==", "!="}, {"<=", ">=", "<", ">"}, {"+", "-"}, {"*", "/", "%"}};
    if (level == static_cast<int>(table.size())) return unary();
    AstPtr lhs = binary(level + 1);
    while (true) {
      bool matched = false;
      for (const std::string& op : table[static_cast<size_t>(level)]) {
        skip();
        if (s_.compare(pos_, op.size(), op) == 0) {
          pos_ += op.size();
          AstPtr rhs = binary(level + 1);
          lhs = make(Op::Bin, 0, op, {lhs, rhs});
          matched = true;
          break;
        }
      }
      if (!matched) return lhs;
    }
  }

  AstPtr unary() {
    if (accept("-")) return make(Op::Neg, 0, {}, {unary()});
    skip();
    if (pos_ < s_.size() && s_[pos_] == '!' && s_.compare(pos_, 2, "!=") != 0) {
      ++pos_;
      return make(Op::Not, 0, {}, {unary()});
    }
    return primary();
  }

  long long int_arg() {
    skip();
    size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) bad("expected an integer argument");
    return std::stoll(s_.substr(start, pos_ - start));
  }

  AstPtr primary() {
    skip();
    if (accept("(")) {
      AstPtr e = conditional();
      expect(")");
      return e;
    }
    if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      return make(Op::Num, int_arg());
    }
    size_t start = pos_;
    while (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    std::string id = s_.substr(start, pos_ - start);
    if (id.empty()) bad("unexpected end of input");
    if (id == "ht") {
      expect("(");
      long long j = int_arg();
      expect(")");
      return make(Op::Ht, j);
    }
    if (id == "digit") {
      expect("(");
      long long j = int_arg();
      expect(",");
      long long k = int_arg();
      expect(")");
      return make(Op::Digit, j, std::to_string(k));
    }
    if (id == "maxht") return make(Op::MaxHt);
    if (id == "minht") return make(Op::MinHt);
    if (id == "sumht") return make(Op::SumHt);
    if (id == "d") return make(Op::Arity);
    bad("unknown identifier '" + id + "'");
  }

  std::string s_;
  size_t pos_ = 0;
};

const Node& coord(const std::vector<Node>& tuple, long long j) {
  if (j < 0 || j >= static_cast<long long>(tuple.size())) bad("coordinate " + std::to_string(j) + " out of range");
  return tuple[static_cast<size_t>(j)];
}

long long eval_node(const Program::Ast& a, const std::vector<Node>& t) {
  switch (a.op) {
    case Op::Num: return a.value;
    case Op::Ht: return coord(t, a.value).height();
    case Op::Digit: {
      const Node& n = coord(t, a.value);
      long long k = std::stoll(a.bin);
      return k < n.height() ? n.digit(static_cast<int>(k)) : -1;
    }
    case Op::MaxHt: {
      long long m = 0;
      for (const Node& n : t) m = std::max<long long>(m, n.height());
      return m;
    }
    case Op::MinHt: {
      long long m = t.empty() ? 0 : t[0].height();
      for (const Node& n : t) m = std::min<long long>(m, n.height());
      return m;
    }
    case Op::SumHt: {
      long long m = 0;
      for (const Node& n : t) m += n.height();
      return m;
    }
    case Op::Arity: return static_cast<long long>(t.size());
    case Op::Neg: return -eval_node(*a.kids[0], t);
    case Op::Not: return eval_node(*a.kids[0], t) == 0 ? 1 : 0;
    case Op::Cond: return eval_node(*a.kids[0], t) != 0 ? eval_node(*a.kids[1], t) : eval_node(*a.kids[2], t);
    case Op::Bin: {
      long long x = eval_node(*a.kids[0], t);
      if (a.bin == "&&") return x != 0 && eval_node(*a.kids[1], t) != 0 ? 1 : 0;
      if (a.bin == "||") return x != 0 || eval_node(*a.kids[1], t) != 0 ? 1 : 0;
      long long y = eval_node(*a.kids[1], t);
      if (a.bin == "+") return x + y;
      if (a.bin == "-") return x - y;
      if (a.bin == "*") return x * y;
      if (a.bin == "/" || a.bin == "%") {
        if (y == 0) bad("division by zero");
        return a.bin == "/" ? x / y : x % y;
      }
      if (a.bin == "==") return x == y;
      if (a.bin == "!=") return x != y;
      if (a.bin == "<") return x < y;
      if (a.bin == "<=") return x <= y;
      if (a.bin == ">") return x > y;
      if (a.bin == ">=") return x >= y;
      bad("unknown operator " + a.bin);
    }
  }
  bad("malformed expression");
}

}  // namespace

Program Program::compile(const std::string& source) {
  Program p;
  p.root_ = Parser(source).parse();
  return p;
}

long long Program::eval(const std::vector<Node>& tuple) const { return eval_node(*root_, tuple); }

}  // namespace hl::expr
