#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "spinconn/point.hpp"

namespace spinconn {

/// Syntax error with the byte offset where parsing stopped and what would have been accepted there.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, std::set<std::string> expected, const std::string& found)
      : std::runtime_error(format(offset, expected, found)), offset_(offset), expected_(std::move(expected)) {}

  std::size_t offset() const { return offset_; }
  const std::set<std::string>& expected() const { return expected_; }

 private:
  static std::string format(std::size_t offset, const std::set<std::string>& expected, const std::string& found) {
    std::string msg = "at byte " + std::to_string(offset) + ": unexpected " + found + ", expected one of {";
    bool first = true;
    for (const auto& e : expected) {
      msg += (first ? "" : ", ") + e;
      first = false;
    }
    return msg + "}";
  }

  std::size_t offset_;
  std::set<std::string> expected_;
};

class UnknownIdentifier : public ParseError {
 public:
  UnknownIdentifier(std::size_t offset, const std::string& name)
      : ParseError(offset, {"x0", "x1", "x2", "x3", "function name"}, "identifier '" + name + "'") {}
};

/// Raised when an expression has no finite value at a point.
class EvaluationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/**
 * @brief Parsed arithmetic expression over x0..x3.
 *
 * Grammar (whitespace ignored):
 *   sum     := product (('+'|'-') product)*
 *   product := unary (('*'|'/') unary)*
 *   unary   := ('-'|'+') unary | power
 *   power   := primary ('^' unary)?          right associative
 *   primary := number | x0..x3 | func '(' sum ')' | '(' sum ')'
 */
class Expression {
 public:
  enum class Op { num, var, neg, add, sub, mul, div, pow, sin, cos, exp, sqrt, cosh, sinh };

  struct Node {
    Op op;
    double value = 0.0;  // literal or variable index
    int lhs = -1, rhs = -1;
  };

  static Expression parse(std::string_view text) {
    Parser p{text, {}, 0};
    Expression e;
    e.nodes_ = std::make_shared<std::vector<Node>>();
    p.nodes = e.nodes_.get();
    p.skip_ws();
    if (p.pos >= text.size()) throw ParseError(p.pos, {"number", "variable", "function", "(", "-"}, "end of input");
    e.root_ = p.sum();
    p.skip_ws();
    if (p.pos < text.size()) throw ParseError(p.pos, {"operator", "end of input"}, p.describe());
    e.text_ = std::string(text);
    return e;
  }

  double operator()(const Point& x) const {
    const double v = eval(root_, x);
    if (!std::isfinite(v)) throw EvaluationError("expression '" + text_ + "' is not finite at this point");
    return v;
  }

  const std::string& source() const { return text_; }

  /// Canonical text form; parsing it again yields the same tree.
  std::string to_string() const { return print(root_, 0); }

 private:
  struct Parser {
    std::string_view s;
    std::vector<Node>* nodes;
    std::size_t pos;

    void skip_ws() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    std::string describe() const {
      if (pos >= s.size()) return "end of input";
      return std::string("'") + s[pos] + "'";
    }
    int add(Node n) {
      nodes->push_back(n);
      return static_cast<int>(nodes->size()) - 1;
    }
    bool accept(char c) {
      skip_ws();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    int sum() {
      int lhs = product();
      for (;;) {
        if (accept('+')) lhs = add({Op::add, 0.0, lhs, product()});
        else if (accept('-')) lhs = add({Op::sub, 0.0, lhs, product()});
        else return lhs;
      }
    }
    int product() {
      int lhs = unary();
      for (;;) {
        if (accept('*')) lhs = add({Op::mul, 0.0, lhs, unary()});
        else if (accept('/')) lhs = add({Op::div, 0.0, lhs, unary()});
        else return lhs;
      }
    }
    int unary() {
      if (accept('-')) return add({Op::neg, 0.0, unary(), -1});
      if (accept('+')) return unary();
      return power();
    }
    int power() {
      const int base = primary();
      if (accept('^')) return add({Op::pow, 0.0, base, unary()});
      return base;
    }
    int primary() {
      skip_ws();
      const std::size_t start = pos;
      if (pos >= s.size()) throw ParseError(pos, {"number", "variable", "function", "("}, "end of input");
      const char c = s[pos];
      if (c == '(') {
        ++pos;
        const int inner = sum();
        if (!accept(')')) throw ParseError(pos, {")", "operator"}, describe());
        return inner;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) ++pos;
        const std::string name(s.substr(start, pos - start));
        if (name.size() == 2 && name[0] == 'x' && name[1] >= '0' && name[1] <= '3')
          return add({Op::var, static_cast<double>(name[1] - '0'), -1, -1});
        Op f;
        if (name == "sin") f = Op::sin;
        else if (name == "cos") f = Op::cos;
        else if (name == "exp") f = Op::exp;
        else if (name == "sqrt") f = Op::sqrt;
        else if (name == "cosh") f = Op::cosh;
        else if (name == "sinh") f = Op::sinh;
        else throw UnknownIdentifier(start, name);
        if (!accept('(')) throw ParseError(pos, {"("}, describe());
        const int arg = sum();
        if (!accept(')')) throw ParseError(pos, {")", "operator"}, describe());
        return add({f, 0.0, arg, -1});
      }
      throw ParseError(pos, {"number", "variable", "function", "(", "-"}, describe());
    }
    int number() {
      const std::size_t start = pos;
      bool digits = false;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos, digits = true;
      if (pos < s.size() && s[pos] == '.') {
        ++pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos, digits = true;
      }
      if (!digits) throw ParseError(start, {"digit"}, describe());
      if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
        std::size_t q = pos + 1;
        if (q < s.size() && (s[q] == '+' || s[q] == '-')) ++q;
        if (q >= s.size() || !std::isdigit(static_cast<unsigned char>(s[q])))
          throw ParseError(q, {"exponent digit"}, q < s.size() ? std::string("'") + s[q] + "'" : "end of input");
        pos = q;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      }
      const std::string lit(s.substr(start, pos - start));
      const double v = std::strtod(lit.c_str(), nullptr);
      if (!std::isfinite(v)) throw ParseError(start, {"finite number"}, "'" + lit + "'");
      return add({Op::num, v, -1, -1});
    }
  };

  double eval(int i, const Point& x) const {
    const Node& n = (*nodes_)[i];
    switch (n.op) {
      case Op::num: return n.value;
      case Op::var: return x[static_cast<std::size_t>(n.value)];
      case Op::neg: return -eval(n.lhs, x);
      case Op::add: return eval(n.lhs, x) + eval(n.rhs, x);
      case Op::sub: return eval(n.lhs, x) - eval(n.rhs, x);
      case Op::mul: return eval(n.lhs, x) * eval(n.rhs, x);
      case Op::div: {
        const double d = eval(n.rhs, x);
        if (d == 0.0) throw EvaluationError("division by zero in '" + text_ + "'");
        return eval(n.lhs, x) / d;
      }
      case Op::pow: return std::pow(eval(n.lhs, x), eval(n.rhs, x));
      case Op::sin: return std::sin(eval(n.lhs, x));
      case Op::cos: return std::cos(eval(n.lhs, x));
      case Op::exp: return std::exp(eval(n.lhs, x));
      case Op::sqrt: {
        const double a = eval(n.lhs, x);
        if (a < 0.0) throw EvaluationError("sqrt of negative value in '" + text_ + "'");
        return std::sqrt(a);
      }
      case Op::cosh: return std::cosh(eval(n.lhs, x));
      case Op::sinh: return std::sinh(eval(n.lhs, x));
    }
    return 0.0;
  }

  static int precedence(Op op) {
    switch (op) {
      case Op::add:
      case Op::sub: return 1;
      case Op::mul:
      case Op::div: return 2;
      case Op::neg: return 3;
      case Op::pow: return 4;
      default: return 5;
    }
  }

  std::string print(int i, int ctx) const {
    const Node& n = (*nodes_)[i];
    std::string out;
    switch (n.op) {
      case Op::num: {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, n.value);
        out.assign(buf, res.ptr);
        break;
      }
      case Op::var: out = "x" + std::to_string(static_cast<int>(n.value)); break;
      case Op::neg: out = "-" + print(n.lhs, 3); break;
      case Op::add: out = print(n.lhs, 1) + " + " + print(n.rhs, 2); break;
      case Op::sub: out = print(n.lhs, 1) + " - " + print(n.rhs, 2); break;
      case Op::mul: out = print(n.lhs, 2) + "*" + print(n.rhs, 3); break;
      case Op::div: out = print(n.lhs, 2) + "/" + print(n.rhs, 3); break;
      case Op::pow: out = print(n.lhs, 5) + "^" + print(n.rhs, 3); break;
      default: {
        static const char* names[] = {"sin", "cos", "exp", "sqrt", "cosh", "sinh"};
        out = std::string(names[static_cast<int>(n.op) - static_cast<int>(Op::sin)]) + "(" + print(n.lhs, 0) + ")";
        return out;
      }
    }
    return precedence(n.op) < ctx ? "(" + out + ")" : out;
  }

  std::shared_ptr<std::vector<Node>> nodes_;
  int root_ = -1;
  std::string text_;
};

inline Expression parse_expression(std::string_view text) { return Expression::parse(text); }

}  // namespace spinconn
