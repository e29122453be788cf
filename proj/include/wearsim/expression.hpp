#pragma once

// Small arithmetic expression language for spatial/temporal data:
//   variables x y z t, constant pi, operators + - * / ^ (right-associative),
//   functions sin cos exp abs (one argument) and max (two arguments).

#include "wearsim/common.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

namespace wearsim {

class ExpressionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Expression {
 public:
  Expression() : Expression(constant_node(0.0), "0") {}

  static Expression parse(const std::string& text) {
    Parser p{text, 0};
    auto root = p.expression();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("unexpected '" + std::string(1, text[p.pos]) + "'");
    return Expression(std::move(root), text);
  }

  static Expression constant(double v) { return Expression(constant_node(v), format(v)); }

  double operator()(double x, double y, double z, double t) const {
    const double vars[4] = {x, y, z, t};
    return eval(*root_, vars);
  }

  double operator()(const Vec3& p, double t = 0.0) const { return (*this)(p.x(), p.y(), p.z(), t); }

  const std::string& source() const { return source_; }

  bool depends_on_time() const { return uses_var(*root_, 3); }

 private:
  enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Abs, Max };

  struct Node {
    Op op = Op::Const;
    double value = 0.0;
    int var = 0;
    std::shared_ptr<const Node> a, b;
  };
  using NodePtr = std::shared_ptr<const Node>;

  Expression(NodePtr root, std::string source) : root_(std::move(root)), source_(std::move(source)) {}

  static std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

  static NodePtr constant_node(double v) {
    auto n = std::make_shared<Node>();
    n->value = v;
    return n;
  }

  static NodePtr make(Op op, NodePtr a, NodePtr b = nullptr) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  static double eval(const Node& n, const double* vars) {
    switch (n.op) {
      case Op::Const: return n.value;
      case Op::Var: return vars[n.var];
      case Op::Add: return eval(*n.a, vars) + eval(*n.b, vars);
      case Op::Sub: return eval(*n.a, vars) - eval(*n.b, vars);
      case Op::Mul: return eval(*n.a, vars) * eval(*n.b, vars);
      case Op::Div: return eval(*n.a, vars) / eval(*n.b, vars);
      case Op::Pow: return std::pow(eval(*n.a, vars), eval(*n.b, vars));
      case Op::Neg: return -eval(*n.a, vars);
      case Op::Sin: return std::sin(eval(*n.a, vars));
      case Op::Cos: return std::cos(eval(*n.a, vars));
      case Op::Exp: return std::exp(eval(*n.a, vars));
      case Op::Abs: return std::abs(eval(*n.a, vars));
      case Op::Max: return std::max(eval(*n.a, vars), eval(*n.b, vars));
    }
    return 0.0;
  }

  static bool uses_var(const Node& n, int var) {
    if (n.op == Op::Var) return n.var == var;
    return (n.a && uses_var(*n.a, var)) || (n.b && uses_var(*n.b, var));
  }

  struct Parser {
    const std::string& s;
    std::size_t pos;

    [[noreturn]] void fail(const std::string& msg) const {
      throw ExpressionError("expression '" + s + "' at column " + std::to_string(pos + 1) + ": " + msg);
    }

    void skip_ws() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool accept(char c) {
      skip_ws();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    NodePtr expression() {
      auto lhs = term();
      for (;;) {
        if (accept('+')) lhs = make(Op::Add, lhs, term());
        else if (accept('-')) lhs = make(Op::Sub, lhs, term());
        else return lhs;
      }
    }

    NodePtr term() {
      auto lhs = unary();
      for (;;) {
        if (accept('*')) lhs = make(Op::Mul, lhs, unary());
        else if (accept('/')) lhs = make(Op::Div, lhs, unary());
        else return lhs;
      }
    }

    NodePtr unary() {
      if (accept('-')) return make(Op::Neg, unary());
      if (accept('+')) return unary();
      return power();
    }

    NodePtr power() {
      auto base = primary();
      if (accept('^')) return make(Op::Pow, base, unary());
      return base;
    }

    NodePtr primary() {
      skip_ws();
      if (pos >= s.size()) fail("unexpected end of expression");
      const char c = s[pos];
      if (accept('(')) {
        auto e = expression();
        if (!accept(')')) fail("expected ')'");
        return e;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        const char* begin = s.c_str() + pos;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos += static_cast<std::size_t>(end - begin);
        return constant_node(v);
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        const std::size_t start = pos;
        while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) ++pos;
        const std::string id = s.substr(start, pos - start);
        if (id == "x" || id == "y" || id == "z" || id == "t") {
          auto n = std::make_shared<Node>();
          n->op = Op::Var;
          n->var = id == "x" ? 0 : id == "y" ? 1 : id == "z" ? 2 : 3;
          return n;
        }
        if (id == "pi") return constant_node(std::numbers::pi);
        Op op;
        int arity = 1;
        if (id == "sin") op = Op::Sin;
        else if (id == "cos") op = Op::Cos;
        else if (id == "exp") op = Op::Exp;
        else if (id == "abs") op = Op::Abs;
        else if (id == "max") op = Op::Max, arity = 2;
        else {
          pos = start;
          fail("unknown identifier '" + id + "'");
        }
        if (!accept('(')) fail("expected '(' after " + id);
        auto a = expression();
        NodePtr b;
        if (arity == 2) {
          if (!accept(',')) fail("expected ',' in max");
          b = expression();
        }
        if (!accept(')')) fail("expected ')'");
        return make(op, a, b);
      }
      fail("unexpected '" + std::string(1, c) + "'");
    }
  };

  NodePtr root_;
  std::string source_;
};

}  // namespace wearsim
