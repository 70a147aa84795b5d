#pragma once

#include <cctype>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sepvol/error.hpp"

namespace sepvol::expr {

enum class Op {
  Num, Var, Neg, Add, Sub, Mul, Div, Pow, Call,
  Lt, Le, Gt, Ge, Eq, And, Or, True,
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Op op = Op::Num;
  double value = 0;  // Num
  std::string name;  // Var, Call
  NodePtr lhs, rhs;  // Call uses lhs
};

/// Variable bindings for evaluation.
class Env {
 public:
  void set(const std::string& name, double v) {
    for (auto& [k, x] : vars_)
      if (k == name) {
        x = v;
        return;
      }
    vars_.emplace_back(name, v);
  }
  std::optional<double> get(std::string_view name) const {
    for (const auto& [k, x] : vars_)
      if (k == name) return x;
    return std::nullopt;
  }

 private:
  std::vector<std::pair<std::string, double>> vars_;
};

inline const std::set<std::string, std::less<>>& functions() {
  static const std::set<std::string, std::less<>> f{"sqrt", "log", "arccos", "arcsin", "arcsec", "arccsc", "abs"};
  return f;
}

namespace detail {

inline NodePtr make(Op op, NodePtr l = nullptr, NodePtr r = nullptr) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return n;
}

// Recursive-descent parser. Precedence, loosest first:
// or, and, comparison, + -, * /, unary -, ^ (right-assoc), atoms.
class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  NodePtr parse_all() {
    NodePtr n = parse_or();
    skip();
    if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(Errc::ParseError, msg + " at offset " + std::to_string(i_) + " in \"" + std::string(s_) + "\"");
  }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eat(std::string_view tok) {
    skip();
    if (s_.substr(i_, tok.size()) == tok) {
      // keywords must not run into an identifier
      if (std::isalpha(static_cast<unsigned char>(tok.back())) && i_ + tok.size() < s_.size() &&
          (std::isalnum(static_cast<unsigned char>(s_[i_ + tok.size()])) || s_[i_ + tok.size()] == '_'))
        return false;
      i_ += tok.size();
      return true;
    }
    return false;
  }

  NodePtr parse_or() {
    NodePtr l = parse_and();
    while (eat("or")) l = make(Op::Or, l, parse_and());
    return l;
  }
  NodePtr parse_and() {
    NodePtr l = parse_cmp();
    while (eat("and")) l = make(Op::And, l, parse_cmp());
    return l;
  }
  NodePtr parse_cmp() {
    NodePtr l = parse_sum();
    static constexpr std::pair<std::string_view, Op> ops[] = {
        {"<=", Op::Le}, {">=", Op::Ge}, {"==", Op::Eq}, {"<", Op::Lt}, {">", Op::Gt}};
    for (const auto& [tok, op] : ops)
      if (eat(tok)) return make(op, l, parse_sum());
    return l;
  }
  NodePtr parse_sum() {
    NodePtr l = parse_prod();
    for (;;) {
      if (eat("+")) l = make(Op::Add, l, parse_prod());
      else if (eat("-")) l = make(Op::Sub, l, parse_prod());
      else return l;
    }
  }
  NodePtr parse_prod() {
    NodePtr l = parse_unary();
    for (;;) {
      if (eat("*")) l = make(Op::Mul, l, parse_unary());
      else if (eat("/")) l = make(Op::Div, l, parse_unary());
      else return l;
    }
  }
  NodePtr parse_unary() {
    if (eat("-")) return make(Op::Neg, parse_unary());
    if (eat("+")) return parse_unary();
    return parse_pow();
  }
  NodePtr parse_pow() {
    NodePtr base = parse_atom();
    if (eat("^")) return make(Op::Pow, base, parse_unary());
    return base;
  }
  NodePtr parse_atom() {
    skip();
    if (i_ >= s_.size()) fail("unexpected end of input");
    const char ch = s_[i_];
    if (ch == '(') {
      ++i_;
      NodePtr n = parse_or();
      if (!eat(")")) fail("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
      const std::size_t b = i_;
      while (i_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[i_])) || s_[i_] == '.')) ++i_;
      if (i_ < s_.size() && (s_[i_] == 'e' || s_[i_] == 'E')) {
        std::size_t k = i_ + 1;
        if (k < s_.size() && (s_[k] == '+' || s_[k] == '-')) ++k;
        if (k < s_.size() && std::isdigit(static_cast<unsigned char>(s_[k]))) {
          i_ = k;
          while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        }
      }
      auto n = std::make_shared<Node>();
      n->op = Op::Num;
      try {
        std::size_t used = 0;
        n->value = std::stod(std::string(s_.substr(b, i_ - b)), &used);
        if (used != i_ - b) fail("malformed number");
      } catch (const std::logic_error&) {
        fail("malformed number");
      }
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      const std::size_t b = i_;
      while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
      std::string id(s_.substr(b, i_ - b));
      if (id == "true") return make(Op::True);
      if (id == "pi") {
        auto n = std::make_shared<Node>();
        n->op = Op::Num;
        n->value = std::numbers::pi;
        n->name = "pi";
        return n;
      }
      if (id == "and" || id == "or") fail("misplaced '" + id + "'");
      if (functions().count(id)) {
        if (!eat("(")) fail("expected '(' after " + id);
        NodePtr arg = parse_sum();
        if (!eat(")")) fail("expected ')'");
        auto n = std::make_shared<Node>();
        n->op = Op::Call;
        n->name = id;
        n->lhs = arg;
        return n;
      }
      auto n = std::make_shared<Node>();
      n->op = Op::Var;
      n->name = id;
      return n;
    }
    fail("unexpected '" + std::string(1, ch) + "'");
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

inline double call(const std::string& f, double x) {
  if (f == "sqrt") return std::sqrt(x);
  if (f == "log") return std::log(x);
  if (f == "arccos") return std::acos(x);
  if (f == "arcsin") return std::asin(x);
  if (f == "arcsec") return std::acos(1 / x);
  if (f == "arccsc") return std::asin(1 / x);
  return std::abs(x);
}

}  // namespace detail

inline NodePtr parse(std::string_view text) { return detail::Parser(text).parse_all(); }

inline bool is_predicate(const Node& n) {
  switch (n.op) {
    case Op::Lt: case Op::Le: case Op::Gt: case Op::Ge: case Op::Eq: case Op::And: case Op::Or: case Op::True:
      return true;
    default:
      return false;
  }
}

/// Numeric value; predicates give 1 or 0.
inline double eval(const Node& n, const Env& env) {
  switch (n.op) {
    case Op::Num: return n.value;
    case Op::Var: {
      auto v = env.get(n.name);
      if (!v) throw Error(Errc::DomainError, "unbound variable '" + n.name + "'");
      return *v;
    }
    case Op::Neg: return -eval(*n.lhs, env);
    case Op::Add: return eval(*n.lhs, env) + eval(*n.rhs, env);
    case Op::Sub: return eval(*n.lhs, env) - eval(*n.rhs, env);
    case Op::Mul: return eval(*n.lhs, env) * eval(*n.rhs, env);
    case Op::Div: return eval(*n.lhs, env) / eval(*n.rhs, env);
    case Op::Pow: return std::pow(eval(*n.lhs, env), eval(*n.rhs, env));
    case Op::Call: return detail::call(n.name, eval(*n.lhs, env));
    case Op::Lt: return eval(*n.lhs, env) < eval(*n.rhs, env);
    case Op::Le: return eval(*n.lhs, env) <= eval(*n.rhs, env);
    case Op::Gt: return eval(*n.lhs, env) > eval(*n.rhs, env);
    case Op::Ge: return eval(*n.lhs, env) >= eval(*n.rhs, env);
    case Op::Eq: return eval(*n.lhs, env) == eval(*n.rhs, env);
    case Op::And: return eval(*n.lhs, env) != 0 && eval(*n.rhs, env) != 0;
    case Op::Or: return eval(*n.lhs, env) != 0 || eval(*n.rhs, env) != 0;
    case Op::True: return 1;
  }
  return 0;
}

inline double eval(std::string_view text, const Env& env = {}) { return eval(*parse(text), env); }

/// Evaluates a closed constant expression (no variables).
inline double constant(std::string_view text) { return eval(text, Env{}); }

inline void free_variables(const Node& n, std::set<std::string>& out) {
  if (n.op == Op::Var) out.insert(n.name);
  if (n.lhs) free_variables(*n.lhs, out);
  if (n.rhs) free_variables(*n.rhs, out);
}

inline std::set<std::string> free_variables(const Node& n) {
  std::set<std::string> s;
  free_variables(n, s);
  return s;
}

/// coef * prod var^exp
struct Monomial {
  double coef = 1;
  std::map<std::string, double> exps;
};

inline std::optional<Monomial> monomial(const Node& n) {
  switch (n.op) {
    case Op::Num: return Monomial{n.value, {}};
    case Op::Var: return Monomial{1, {{n.name, 1.0}}};
    case Op::Neg: {
      auto m = monomial(*n.lhs);
      if (m) m->coef = -m->coef;
      return m;
    }
    case Op::Mul:
    case Op::Div: {
      auto a = monomial(*n.lhs), b = monomial(*n.rhs);
      if (!a || !b) return std::nullopt;
      const double sgn = n.op == Op::Mul ? 1.0 : -1.0;
      a->coef = n.op == Op::Mul ? a->coef * b->coef : a->coef / b->coef;
      for (const auto& [k, e] : b->exps) a->exps[k] += sgn * e;
      for (auto it = a->exps.begin(); it != a->exps.end();)
        it = it->second == 0 ? a->exps.erase(it) : std::next(it);
      return a;
    }
    case Op::Pow: {
      auto a = monomial(*n.lhs);
      if (!a || n.rhs->op != Op::Num) return std::nullopt;
      const double p = n.rhs->value;
      a->coef = std::pow(a->coef, p);
      for (auto& [k, e] : a->exps) e *= p;
      return a;
    }
    case Op::Call: {
      if (n.name != "sqrt") return std::nullopt;
      auto a = monomial(*n.lhs);
      if (!a || a->coef < 0) return std::nullopt;
      a->coef = std::sqrt(a->coef);
      for (auto& [k, e] : a->exps) e *= 0.5;
      return a;
    }
    default:
      return std::nullopt;
  }
}

/// Fully parenthesized text that parses back to the same tree.
inline std::string to_string(const Node& n) {
  auto bin = [&](const char* op) { return "(" + to_string(*n.lhs) + " " + op + " " + to_string(*n.rhs) + ")"; };
  switch (n.op) {
    case Op::Num: {
      if (n.name == "pi") return "pi";
      std::ostringstream os;
      os.precision(17);
      os << n.value;
      return os.str();
    }
    case Op::Var: return n.name;
    case Op::Neg: return "(-" + to_string(*n.lhs) + ")";
    case Op::Add: return bin("+");
    case Op::Sub: return bin("-");
    case Op::Mul: return bin("*");
    case Op::Div: return bin("/");
    case Op::Pow: return bin("^");
    case Op::Call: return n.name + "(" + to_string(*n.lhs) + ")";
    case Op::Lt: return bin("<");
    case Op::Le: return bin("<=");
    case Op::Gt: return bin(">");
    case Op::Ge: return bin(">=");
    case Op::Eq: return bin("==");
    case Op::And: return bin("and");
    case Op::Or: return bin("or");
    case Op::True: return "true";
  }
  return {};
}

inline bool same_tree(const Node& a, const Node& b) {
  if (a.op != b.op || a.name != b.name) return false;
  if (a.op == Op::Num && !(a.value == b.value)) return false;
  if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs) || static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs))
    return false;
  return (!a.lhs || same_tree(*a.lhs, *b.lhs)) && (!a.rhs || same_tree(*a.rhs, *b.rhs));
}

}  // namespace sepvol::expr
