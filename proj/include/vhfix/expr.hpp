#pragma once

/* Arithmetic expressions over named real variables.
 *
 * Grammar (precedence low to high; '^' is right-associative and binds
 * tighter than unary minus, so "-t^2" parses as -(t^2)):
 *
 *   expr   := term (('+' | '-') term)*
 *   term   := factor (('*' | '/') factor)*
 *   factor := '-' factor | power
 *   power  := atom ('^' factor)?
 *   atom   := NUMBER | IDENT | IDENT '(' expr (',' expr)* ')' | '(' expr ')'
 *
 * Builtins: sin cos tan exp ln abs sqrt (arity 1), min max pow (arity 2).
 * ln of a non-positive value, division by zero and sqrt of a negative value
 * raise EvalError instead of producing a non-finite result. All errors carry
 * 0-based character positions into the source string.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vhfix/numfmt.hpp"

namespace vhfix {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " (at position " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class EvalError : public std::runtime_error {
 public:
  EvalError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " (at position " + std::to_string(position) + ")"),
        raw_(what),
        position_(position) {}
  std::size_t position() const { return position_; }
  const std::string& raw() const { return raw_; }  // message without the position suffix

 private:
  std::string raw_;
  std::size_t position_;
};

enum class TokenKind : std::uint8_t { Number, Identifier, Operator, LParen, RParen, Comma };

struct Token {
  TokenKind kind;
  std::string lexeme;
  std::size_t position;  // 0-based character offset
};

inline std::vector<Token> tokenize(std::string_view source) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  auto is_alpha = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  };
  while (i < source.size()) {
    char c = source[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (is_digit(c)) {
      while (i < source.size() && is_digit(source[i])) ++i;
      if (i < source.size() && source[i] == '.') {
        ++i;
        while (i < source.size() && is_digit(source[i])) ++i;
      }
      if (i < source.size() && (source[i] == 'e' || source[i] == 'E')) {
        std::size_t epos = i;
        ++i;
        if (i < source.size() && (source[i] == '+' || source[i] == '-')) ++i;
        if (i >= source.size() || !is_digit(source[i]))
          throw ParseError("malformed exponent in numeric literal", epos);
        while (i < source.size() && is_digit(source[i])) ++i;
      }
      tokens.push_back({TokenKind::Number, std::string(source.substr(start, i - start)), start});
      continue;
    }
    if (is_alpha(c)) {
      while (i < source.size() && (is_alpha(source[i]) || is_digit(source[i]))) ++i;
      tokens.push_back({TokenKind::Identifier, std::string(source.substr(start, i - start)), start});
      continue;
    }
    switch (c) {
      case '+': case '-': case '*': case '/': case '^':
        tokens.push_back({TokenKind::Operator, std::string(1, c), start});
        break;
      case '(':
        tokens.push_back({TokenKind::LParen, "(", start});
        break;
      case ')':
        tokens.push_back({TokenKind::RParen, ")", start});
        break;
      case ',':
        tokens.push_back({TokenKind::Comma, ",", start});
        break;
      default:
        throw ParseError(std::string("illegal character '") + c + "'", start);
    }
    ++i;
  }
  return tokens;
}

enum class Builtin : std::uint8_t { Sin, Cos, Tan, Exp, Ln, Abs, Sqrt, Min, Max, Pow };

struct BuiltinInfo {
  std::string_view name;
  Builtin fn;
  int arity;
};

inline constexpr std::array<BuiltinInfo, 10> kBuiltins{{
    {"sin", Builtin::Sin, 1}, {"cos", Builtin::Cos, 1}, {"tan", Builtin::Tan, 1},
    {"exp", Builtin::Exp, 1}, {"ln", Builtin::Ln, 1},   {"abs", Builtin::Abs, 1},
    {"sqrt", Builtin::Sqrt, 1}, {"min", Builtin::Min, 2}, {"max", Builtin::Max, 2},
    {"pow", Builtin::Pow, 2},
}};

inline const BuiltinInfo* find_builtin(std::string_view name) {
  for (const auto& b : kBuiltins)
    if (b.name == name) return &b;
  return nullptr;
}

struct Binding {
  std::string_view name;
  double value;
};

class Program;

// Immutable expression tree stored as an index arena; the last node is the root.
class Expr {
 public:
  enum class NodeKind : std::uint8_t {
    Constant, Variable, Negate, Add, Sub, Mul, Div, Pow, Call
  };

  struct Node {
    NodeKind kind;
    std::size_t position = 0;
    double value = 0.0;       // Constant
    std::string name;         // Variable
    Builtin fn{};             // Call
    int arity = 0;            // Call
    int child[2] = {-1, -1};
  };

  const std::vector<Node>& nodes() const { return nodes_; }
  int root() const { return root_; }
  const std::string& source() const { return source_; }

  double eval(std::span<const Binding> env) const { return eval_node(root_, env); }
  double eval(std::initializer_list<Binding> env) const {
    return eval(std::span<const Binding>(env.begin(), env.size()));
  }

  Program compile(std::span<const std::string_view> variables) const;

  // Canonical fully parenthesized form; re-parses to a structurally equal tree.
  std::string to_string() const { return print_node(root_); }

  bool structurally_equal(const Expr& other) const {
    return equal_nodes(*this, root_, other, other.root_);
  }

  friend Expr parse_expr(std::string_view source);

  // Programmatic construction (used by tests and generators).
  static Expr constant(double v) {
    Expr e;
    e.root_ = e.add({NodeKind::Constant, 0, v, "", Builtin{}, 0, {-1, -1}});
    return e;
  }
  static Expr variable(std::string name) {
    Expr e;
    Node n{NodeKind::Variable, 0, 0.0, std::move(name), Builtin{}, 0, {-1, -1}};
    e.root_ = e.add(std::move(n));
    return e;
  }
  static Expr negate(const Expr& a) { return combine(NodeKind::Negate, &a, nullptr); }
  static Expr binary(NodeKind op, const Expr& a, const Expr& b) { return combine(op, &a, &b); }
  static Expr call(Builtin fn, const Expr& a, const Expr* b = nullptr) {
    const BuiltinInfo* info = nullptr;
    for (const auto& bi : kBuiltins)
      if (bi.fn == fn) info = &bi;
    Expr e = combine(NodeKind::Call, &a, info->arity == 2 ? b : nullptr);
    e.nodes_.back().fn = fn;
    e.nodes_.back().arity = info->arity;
    return e;
  }

 private:
  std::vector<Node> nodes_;
  int root_ = -1;
  std::string source_;

  int add(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }

  static Expr combine(NodeKind op, const Expr* a, const Expr* b) {
    Expr e;
    int ra = e.graft(*a);
    int rb = b ? e.graft(*b) : -1;
    e.root_ = e.add({op, 0, 0.0, "", Builtin{}, b ? 2 : 1, {ra, rb}});
    return e;
  }

  int graft(const Expr& src) {
    int base = static_cast<int>(nodes_.size());
    for (const Node& n : src.nodes_) {
      Node copy = n;
      if (copy.child[0] >= 0) copy.child[0] += base;
      if (copy.child[1] >= 0) copy.child[1] += base;
      nodes_.push_back(std::move(copy));
    }
    return base + src.root_;
  }

  double eval_node(int idx, std::span<const Binding> env) const {
    const Node& n = nodes_[idx];
    switch (n.kind) {
      case NodeKind::Constant:
        return n.value;
      case NodeKind::Variable:
        for (const Binding& b : env)
          if (b.name == n.name) return b.value;
        throw EvalError("unbound variable '" + n.name + "'", n.position);
      case NodeKind::Negate:
        return -eval_node(n.child[0], env);
      case NodeKind::Add:
        return eval_node(n.child[0], env) + eval_node(n.child[1], env);
      case NodeKind::Sub:
        return eval_node(n.child[0], env) - eval_node(n.child[1], env);
      case NodeKind::Mul:
        return eval_node(n.child[0], env) * eval_node(n.child[1], env);
      case NodeKind::Div: {
        double a = eval_node(n.child[0], env);
        double b = eval_node(n.child[1], env);
        if (b == 0.0) throw EvalError("division by zero", n.position);
        return a / b;
      }
      case NodeKind::Pow:
        return std::pow(eval_node(n.child[0], env), eval_node(n.child[1], env));
      case NodeKind::Call: {
        double a = eval_node(n.child[0], env);
        double b = n.arity == 2 ? eval_node(n.child[1], env) : 0.0;
        return apply_builtin(n.fn, a, b, n.position);
      }
    }
    throw EvalError("corrupt expression node", n.position);
  }

  static double apply_builtin(Builtin fn, double a, double b, std::size_t pos) {
    switch (fn) {
      case Builtin::Sin: return std::sin(a);
      case Builtin::Cos: return std::cos(a);
      case Builtin::Tan: return std::tan(a);
      case Builtin::Exp: return std::exp(a);
      case Builtin::Ln:
        if (a <= 0.0) throw EvalError("ln of non-positive argument", pos);
        return std::log(a);
      case Builtin::Abs: return std::fabs(a);
      case Builtin::Sqrt:
        if (a < 0.0) throw EvalError("sqrt of negative argument", pos);
        return std::sqrt(a);
      case Builtin::Min: return std::fmin(a, b);
      case Builtin::Max: return std::fmax(a, b);
      case Builtin::Pow: return std::pow(a, b);
    }
    throw EvalError("corrupt builtin", pos);
  }

  std::string print_node(int idx) const {
    const Node& n = nodes_[idx];
    switch (n.kind) {
      case NodeKind::Constant: return fmt17(n.value);
      case NodeKind::Variable: return n.name;
      case NodeKind::Negate: return "(-" + print_node(n.child[0]) + ")";
      case NodeKind::Add: return "(" + print_node(n.child[0]) + "+" + print_node(n.child[1]) + ")";
      case NodeKind::Sub: return "(" + print_node(n.child[0]) + "-" + print_node(n.child[1]) + ")";
      case NodeKind::Mul: return "(" + print_node(n.child[0]) + "*" + print_node(n.child[1]) + ")";
      case NodeKind::Div: return "(" + print_node(n.child[0]) + "/" + print_node(n.child[1]) + ")";
      case NodeKind::Pow: return "(" + print_node(n.child[0]) + "^" + print_node(n.child[1]) + ")";
      case NodeKind::Call: {
        std::string out;
        for (const auto& b : kBuiltins)
          if (b.fn == n.fn) out = std::string(b.name);
        out += "(" + print_node(n.child[0]);
        if (n.arity == 2) out += "," + print_node(n.child[1]);
        out += ")";
        return out;
      }
    }
    return "";
  }

  static bool equal_nodes(const Expr& x, int xi, const Expr& y, int yi) {
    const Node& a = x.nodes_[xi];
    const Node& b = y.nodes_[yi];
    if (a.kind != b.kind) return false;
    switch (a.kind) {
      case NodeKind::Constant: return a.value == b.value;
      case NodeKind::Variable: return a.name == b.name;
      case NodeKind::Call:
        if (a.fn != b.fn || a.arity != b.arity) return false;
        [[fallthrough]];
      default:
        for (int k = 0; k < 2; ++k) {
          if ((a.child[k] >= 0) != (b.child[k] >= 0)) return false;
          if (a.child[k] >= 0 && !equal_nodes(x, a.child[k], y, b.child[k])) return false;
        }
        return true;
    }
  }

  friend class Parser;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::size_t source_size)
      : tokens_(std::move(tokens)), end_pos_(source_size) {}

  Expr run(std::string source) {
    Expr e;
    e.source_ = std::move(source);
    e.root_ = parse_sum(e);
    if (pos_ < tokens_.size())
      throw ParseError("unexpected token '" + tokens_[pos_].lexeme + "'", tokens_[pos_].position);
    return e;
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t end_pos_;

  const Token* peek() const { return pos_ < tokens_.size() ? &tokens_[pos_] : nullptr; }
  bool at_operator(char c) const {
    const Token* t = peek();
    return t && t->kind == TokenKind::Operator && t->lexeme[0] == c;
  }

  int parse_sum(Expr& e) {
    int lhs = parse_term(e);
    while (at_operator('+') || at_operator('-')) {
      Token op = tokens_[pos_++];
      int rhs = parse_term(e);
      auto kind = op.lexeme[0] == '+' ? Expr::NodeKind::Add : Expr::NodeKind::Sub;
      lhs = e.add({kind, op.position, 0.0, "", Builtin{}, 2, {lhs, rhs}});
    }
    return lhs;
  }

  int parse_term(Expr& e) {
    int lhs = parse_factor(e);
    while (at_operator('*') || at_operator('/')) {
      Token op = tokens_[pos_++];
      int rhs = parse_factor(e);
      auto kind = op.lexeme[0] == '*' ? Expr::NodeKind::Mul : Expr::NodeKind::Div;
      lhs = e.add({kind, op.position, 0.0, "", Builtin{}, 2, {lhs, rhs}});
    }
    return lhs;
  }

  int parse_factor(Expr& e) {
    if (at_operator('-')) {
      Token op = tokens_[pos_++];
      int operand = parse_factor(e);
      return e.add({Expr::NodeKind::Negate, op.position, 0.0, "", Builtin{}, 1, {operand, -1}});
    }
    return parse_power(e);
  }

  int parse_power(Expr& e) {
    int base = parse_atom(e);
    if (at_operator('^')) {
      Token op = tokens_[pos_++];
      int exponent = parse_factor(e);
      return e.add({Expr::NodeKind::Pow, op.position, 0.0, "", Builtin{}, 2, {base, exponent}});
    }
    return base;
  }

  int parse_atom(Expr& e) {
    const Token* t = peek();
    if (!t) throw ParseError("unexpected end of input", end_pos_);
    switch (t->kind) {
      case TokenKind::Number: {
        ++pos_;
        double v = std::stod(t->lexeme);
        return e.add({Expr::NodeKind::Constant, t->position, v, "", Builtin{}, 0, {-1, -1}});
      }
      case TokenKind::Identifier: {
        Token ident = *t;
        ++pos_;
        if (peek() && peek()->kind == TokenKind::LParen) {
          const BuiltinInfo* info = find_builtin(ident.lexeme);
          if (!info)
            throw ParseError("unknown function '" + ident.lexeme + "'", ident.position);
          ++pos_;  // '('
          std::vector<int> args;
          args.push_back(parse_sum(e));
          while (peek() && peek()->kind == TokenKind::Comma) {
            ++pos_;
            args.push_back(parse_sum(e));
          }
          expect_rparen();
          if (static_cast<int>(args.size()) != info->arity)
            throw ParseError("function '" + ident.lexeme + "' expects " +
                                 std::to_string(info->arity) + " argument(s), got " +
                                 std::to_string(args.size()),
                             ident.position);
          Expr::Node n{Expr::NodeKind::Call, ident.position, 0.0, "", info->fn, info->arity,
                       {args[0], info->arity == 2 ? args[1] : -1}};
          return e.add(std::move(n));
        }
        Expr::Node n{Expr::NodeKind::Variable, ident.position, 0.0, ident.lexeme, Builtin{}, 0,
                     {-1, -1}};
        return e.add(std::move(n));
      }
      case TokenKind::LParen: {
        ++pos_;
        int inner = parse_sum(e);
        expect_rparen();
        return inner;
      }
      default:
        throw ParseError("unexpected token '" + t->lexeme + "'", t->position);
    }
  }

  void expect_rparen() {
    const Token* t = peek();
    if (!t) throw ParseError("expected ')' before end of input", end_pos_);
    if (t->kind != TokenKind::RParen)
      throw ParseError("expected ')', found '" + t->lexeme + "'", t->position);
    ++pos_;
  }
};

inline Expr parse_expr(std::string_view source) {
  Parser p(tokenize(source), source.size());
  return p.run(std::string(source));
}

// Flat postfix form of an Expr with variable names resolved to slot indices.
// This is the hot evaluation path; slot resolution happens once.
class Program {
 public:
  double eval(std::span<const double> values) const {
    double stack[kMaxDepth];
    int sp = 0;
    for (const Op& op : ops_) {
      switch (op.code) {
        case Code::PushConst: stack[sp++] = op.value; break;
        case Code::PushVar: stack[sp++] = values[op.slot]; break;
        case Code::Neg: stack[sp - 1] = -stack[sp - 1]; break;
        case Code::Add: --sp; stack[sp - 1] += stack[sp]; break;
        case Code::Sub: --sp; stack[sp - 1] -= stack[sp]; break;
        case Code::Mul: --sp; stack[sp - 1] *= stack[sp]; break;
        case Code::Div:
          --sp;
          if (stack[sp] == 0.0) throw EvalError("division by zero", op.position);
          stack[sp - 1] /= stack[sp];
          break;
        case Code::Pow: --sp; stack[sp - 1] = std::pow(stack[sp - 1], stack[sp]); break;
        case Code::Sin: stack[sp - 1] = std::sin(stack[sp - 1]); break;
        case Code::Cos: stack[sp - 1] = std::cos(stack[sp - 1]); break;
        case Code::Tan: stack[sp - 1] = std::tan(stack[sp - 1]); break;
        case Code::Exp: stack[sp - 1] = std::exp(stack[sp - 1]); break;
        case Code::Ln:
          if (stack[sp - 1] <= 0.0) throw EvalError("ln of non-positive argument", op.position);
          stack[sp - 1] = std::log(stack[sp - 1]);
          break;
        case Code::Abs: stack[sp - 1] = std::fabs(stack[sp - 1]); break;
        case Code::Sqrt:
          if (stack[sp - 1] < 0.0) throw EvalError("sqrt of negative argument", op.position);
          stack[sp - 1] = std::sqrt(stack[sp - 1]);
          break;
        case Code::Min: --sp; stack[sp - 1] = std::fmin(stack[sp - 1], stack[sp]); break;
        case Code::Max: --sp; stack[sp - 1] = std::fmax(stack[sp - 1], stack[sp]); break;
      }
    }
    return stack[0];
  }

  int variable_count() const { return n_vars_; }

 private:
  friend class Expr;
  static constexpr int kMaxDepth = 64;

  enum class Code : std::uint8_t {
    PushConst, PushVar, Neg, Add, Sub, Mul, Div, Pow,
    Sin, Cos, Tan, Exp, Ln, Abs, Sqrt, Min, Max
  };

  struct Op {
    Code code;
    std::uint16_t slot = 0;
    std::uint32_t position = 0;
    double value = 0.0;
  };

  std::vector<Op> ops_;
  int n_vars_ = 0;
};

inline Program Expr::compile(std::span<const std::string_view> variables) const {
  Program prog;
  prog.n_vars_ = static_cast<int>(variables.size());
  int depth = 0, max_depth = 0;
  auto push = [&](Program::Op op, int delta) {
    prog.ops_.push_back(op);
    depth += delta;
    max_depth = std::max(max_depth, depth);
  };
  auto emit = [&](auto&& self, int idx) -> void {
    const Node& n = nodes_[idx];
    auto pos = static_cast<std::uint32_t>(n.position);
    using Code = Program::Code;
    switch (n.kind) {
      case NodeKind::Constant:
        push({Code::PushConst, 0, pos, n.value}, +1);
        return;
      case NodeKind::Variable: {
        for (std::size_t k = 0; k < variables.size(); ++k) {
          if (variables[k] == n.name) {
            push({Code::PushVar, static_cast<std::uint16_t>(k), pos, 0.0}, +1);
            return;
          }
        }
        throw EvalError("variable '" + n.name + "' is not in the declared variable set",
                        n.position);
      }
      case NodeKind::Negate:
        self(self, n.child[0]);
        push({Code::Neg, 0, pos, 0.0}, 0);
        return;
      case NodeKind::Add: case NodeKind::Sub: case NodeKind::Mul:
      case NodeKind::Div: case NodeKind::Pow: {
        self(self, n.child[0]);
        self(self, n.child[1]);
        Code c = n.kind == NodeKind::Add   ? Code::Add
                 : n.kind == NodeKind::Sub ? Code::Sub
                 : n.kind == NodeKind::Mul ? Code::Mul
                 : n.kind == NodeKind::Div ? Code::Div
                                           : Code::Pow;
        push({c, 0, pos, 0.0}, -1);
        return;
      }
      case NodeKind::Call: {
        self(self, n.child[0]);
        if (n.arity == 2) self(self, n.child[1]);
        Code c = Code::Sin;
        switch (n.fn) {
          case Builtin::Sin: c = Code::Sin; break;
          case Builtin::Cos: c = Code::Cos; break;
          case Builtin::Tan: c = Code::Tan; break;
          case Builtin::Exp: c = Code::Exp; break;
          case Builtin::Ln: c = Code::Ln; break;
          case Builtin::Abs: c = Code::Abs; break;
          case Builtin::Sqrt: c = Code::Sqrt; break;
          case Builtin::Min: c = Code::Min; break;
          case Builtin::Max: c = Code::Max; break;
          case Builtin::Pow: c = Code::Pow; break;
        }
        push({c, 0, pos, 0.0}, n.arity == 2 ? -1 : 0);
        return;
      }
    }
  };
  emit(emit, root_);
  if (max_depth > Program::kMaxDepth)
    throw EvalError("expression too deeply nested to compile", 0);
  return prog;
}

}  // namespace vhfix
