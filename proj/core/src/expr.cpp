#include "liesect/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <type_traits>
#include <utility>

namespace liesect::expr {

std::string VarRef::name() const {
  return std::string(1, prefix) + std::to_string(index);
}

Ast::Ast(NodePtr root, std::string source)
    : root_(std::move(root)), source_(std::move(source)) {}

namespace {

int max_index_of(const Node& node, char prefix) {
  int best = 0;
  if (node.kind == NodeKind::Variable && node.var.prefix == prefix) {
    best = node.var.index;
  }
  for (const auto& child : node.children) {
    best = std::max(best, max_index_of(*child, prefix));
  }
  return best;
}

}  // namespace

int Ast::max_index(char prefix) const { return max_index_of(*root_, prefix); }

// ---------------------------------------------------------------------------
// Dual arithmetic

DualScalar operator+(DualScalar a, DualScalar b) {
  return {a.value + b.value, a.derivative + b.derivative};
}

DualScalar operator-(DualScalar a, DualScalar b) {
  return {a.value - b.value, a.derivative - b.derivative};
}

DualScalar operator*(DualScalar a, DualScalar b) {
  return {a.value * b.value, a.derivative * b.value + a.value * b.derivative};
}

DualScalar operator/(DualScalar a, DualScalar b) {
  const double q = a.value / b.value;
  return {q, (a.derivative - q * b.derivative) / b.value};
}

DualScalar operator-(DualScalar a) { return {-a.value, -a.derivative}; }

DualScalar pow(DualScalar a, DualScalar b) {
  const double v = std::pow(a.value, b.value);
  double d = 0.0;
  if (a.derivative != 0.0) {
    d += b.value * std::pow(a.value, b.value - 1.0) * a.derivative;
  }
  if (b.derivative != 0.0) {
    d += std::log(a.value) * v * b.derivative;
  }
  return {v, d};
}

DualScalar exp(DualScalar a) {
  const double v = std::exp(a.value);
  return {v, v * a.derivative};
}

DualScalar log(DualScalar a) {
  return {std::log(a.value), a.derivative / a.value};
}

namespace {

// Out of line so the compiler cannot fuse a sin/cos pair into sincos, whose
// results may differ from separate calls in the last bit.
[[gnu::noinline]] double plain_sin(double x) { return std::sin(x); }
[[gnu::noinline]] double plain_cos(double x) { return std::cos(x); }

}  // namespace

DualScalar sin(DualScalar a) {
  return {plain_sin(a.value), plain_cos(a.value) * a.derivative};
}

DualScalar cos(DualScalar a) {
  return {plain_cos(a.value), -plain_sin(a.value) * a.derivative};
}

DualScalar sqrt(DualScalar a) {
  const double v = std::sqrt(a.value);
  return {v, a.derivative == 0.0 ? 0.0 : a.derivative / (2.0 * v)};
}

// ---------------------------------------------------------------------------
// Parser

namespace {

constexpr int kMaxDepth = 200;

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse_all() {
    auto node = parse_sum();
    skip_space();
    if (pos_ < text_.size()) {
      throw ParseError(pos_, "unexpected '" + std::string(1, text_[pos_]) + "'");
    }
    return node;
  }

 private:
  struct DepthGuard {
    explicit DepthGuard(Parser& p) : parser(p) {
      if (++parser.depth_ > kMaxDepth) {
        throw ParseError(parser.pos_, "expression nested too deeply");
      }
    }
    ~DepthGuard() { --parser.depth_; }
    Parser& parser;
  };

  void skip_space() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
            text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool peek(char c) {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  static NodePtr binary(BinaryOp op, NodePtr lhs, NodePtr rhs) {
    auto node = std::make_shared<Node>();
    node->kind = NodeKind::Binary;
    node->op = op;
    node->span = {lhs->span.begin, rhs->span.end};
    node->children = {std::move(lhs), std::move(rhs)};
    return node;
  }

  NodePtr parse_sum() {
    DepthGuard guard(*this);
    auto lhs = parse_product();
    for (;;) {
      if (peek('+')) {
        ++pos_;
        lhs = binary(BinaryOp::Add, std::move(lhs), parse_product());
      } else if (peek('-')) {
        ++pos_;
        lhs = binary(BinaryOp::Sub, std::move(lhs), parse_product());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_product() {
    auto lhs = parse_power();
    for (;;) {
      if (peek('*')) {
        ++pos_;
        lhs = binary(BinaryOp::Mul, std::move(lhs), parse_power());
      } else if (peek('/')) {
        ++pos_;
        lhs = binary(BinaryOp::Div, std::move(lhs), parse_power());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_power() {
    DepthGuard guard(*this);
    auto base = parse_unary();
    if (peek('^')) {
      ++pos_;
      return binary(BinaryOp::Pow, std::move(base), parse_power());
    }
    return base;
  }

  NodePtr parse_unary() {
    DepthGuard guard(*this);
    if (peek('-')) {
      const std::size_t start = pos_++;
      auto operand = parse_unary();
      auto node = std::make_shared<Node>();
      node->kind = NodeKind::Unary;
      node->span = {start, operand->span.end};
      node->children = {std::move(operand)};
      return node;
    }
    return parse_primary();
  }

  NodePtr parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) {
      throw ParseError(pos_, "unexpected end of input");
    }
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto inner = parse_sum();
      expect_close();
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return parse_number();
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      return parse_identifier();
    }
    throw ParseError(pos_, "unexpected '" + std::string(1, c) + "'");
  }

  void expect_close() {
    skip_space();
    if (pos_ >= text_.size()) {
      throw ParseError(pos_, "expected ')' before end of input");
    }
    if (text_[pos_] != ')') {
      throw ParseError(pos_, "expected ')'");
    }
    ++pos_;
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    auto is_digit = [&](std::size_t i) {
      return i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]));
    };
    std::size_t end = pos_;
    while (is_digit(end)) ++end;
    if (end < text_.size() && text_[end] == '.') {
      ++end;
      while (is_digit(end)) ++end;
    }
    if (end == start + 1 && text_[start] == '.') {
      throw ParseError(start, "malformed number");
    }
    if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
      std::size_t exp_end = end + 1;
      if (exp_end < text_.size() && (text_[exp_end] == '+' || text_[exp_end] == '-')) {
        ++exp_end;
      }
      if (!is_digit(exp_end)) {
        throw ParseError(exp_end, "malformed exponent");
      }
      while (is_digit(exp_end)) ++exp_end;
      end = exp_end;
    }
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(text_.data() + start, text_.data() + end, value);
    if (ec != std::errc() || ptr != text_.data() + end || !std::isfinite(value)) {
      throw ParseError(start, "malformed number");
    }
    pos_ = end;
    auto node = std::make_shared<Node>();
    node->kind = NodeKind::Constant;
    node->constant = value;
    node->span = {start, end};
    return node;
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    while (end < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) {
      ++end;
    }
    const std::string_view word = text_.substr(start, end - start);
    pos_ = end;

    if (peek('(')) {
      Function fn;
      if (word == "exp") {
        fn = Function::Exp;
      } else if (word == "log") {
        fn = Function::Log;
      } else if (word == "sin") {
        fn = Function::Sin;
      } else if (word == "cos") {
        fn = Function::Cos;
      } else if (word == "sqrt") {
        fn = Function::Sqrt;
      } else {
        throw ParseError(start, "unknown function '" + std::string(word) + "'");
      }
      ++pos_;
      auto arg = parse_sum();
      expect_close();
      auto node = std::make_shared<Node>();
      node->kind = NodeKind::Call;
      node->function = fn;
      node->span = {start, pos_};
      node->children = {std::move(arg)};
      return node;
    }

    auto node = std::make_shared<Node>();
    node->kind = NodeKind::Variable;
    node->span = {start, end};
    if (!parse_variable(word, node->var)) {
      throw ParseError(start, "unknown identifier '" + std::string(word) + "'");
    }
    return node;
  }

  static bool parse_variable(std::string_view word, VarRef& out) {
    if (word.size() < 2) return false;
    const char prefix = word[0];
    if (prefix != 'g' && prefix != 'h' && prefix != 'x') return false;
    if (word[1] == '0') return false;
    int index = 0;
    const auto [ptr, ec] =
        std::from_chars(word.data() + 1, word.data() + word.size(), index);
    if (ec != std::errc() || ptr != word.data() + word.size() || index < 1) {
      return false;
    }
    out = {prefix, index};
    return true;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

// ---------------------------------------------------------------------------
// Evaluation

const char* function_name(Function fn) {
  switch (fn) {
    case Function::Exp: return "exp";
    case Function::Log: return "log";
    case Function::Sin: return "sin";
    case Function::Cos: return "cos";
    case Function::Sqrt: return "sqrt";
  }
  return "?";
}

char op_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return '+';
    case BinaryOp::Sub: return '-';
    case BinaryOp::Mul: return '*';
    case BinaryOp::Div: return '/';
    case BinaryOp::Pow: return '^';
  }
  return '?';
}

template <typename T>
double value_of(const T& v) {
  if constexpr (std::is_same_v<T, DualScalar>) {
    return v.value;
  } else {
    return v;
  }
}

template <typename T, typename Lookup>
T eval_node(const Node& node, const Lookup& lookup) {
  switch (node.kind) {
    case NodeKind::Constant:
      return T{node.constant};
    case NodeKind::Variable:
      return lookup(node);
    case NodeKind::Unary:
      return -eval_node<T>(*node.children[0], lookup);
    case NodeKind::Call: {
      const T arg = eval_node<T>(*node.children[0], lookup);
      const double a = value_of(arg);
      T result{};
      switch (node.function) {
        case Function::Exp:
          using std::exp;
          result = exp(arg);
          break;
        case Function::Log:
          if (!(a > 0.0)) throw DomainError(node.span, "log of non-positive value");
          using std::log;
          result = log(arg);
          break;
        case Function::Sin:
          using std::sin;
          result = sin(arg);
          break;
        case Function::Cos:
          using std::cos;
          result = cos(arg);
          break;
        case Function::Sqrt:
          if (a < 0.0) throw DomainError(node.span, "sqrt of negative value");
          using std::sqrt;
          result = sqrt(arg);
          break;
      }
      if (!std::isfinite(value_of(result))) {
        throw DomainError(node.span, std::string("non-finite result of ") +
                                         function_name(node.function));
      }
      if constexpr (std::is_same_v<T, DualScalar>) {
        if (!std::isfinite(result.derivative)) {
          throw DomainError(node.span, std::string("derivative of ") +
                                           function_name(node.function) +
                                           " is undefined here");
        }
      }
      return result;
    }
    case NodeKind::Binary: {
      const T lhs = eval_node<T>(*node.children[0], lookup);
      const T rhs = eval_node<T>(*node.children[1], lookup);
      const double a = value_of(lhs);
      const double b = value_of(rhs);
      T result{};
      switch (node.op) {
        case BinaryOp::Add: result = lhs + rhs; break;
        case BinaryOp::Sub: result = lhs - rhs; break;
        case BinaryOp::Mul: result = lhs * rhs; break;
        case BinaryOp::Div:
          if (b == 0.0) throw DomainError(node.span, "division by zero");
          result = lhs / rhs;
          break;
        case BinaryOp::Pow:
          if (a < 0.0 && b != std::trunc(b)) {
            throw DomainError(node.span, "negative base with non-integer exponent");
          }
          if (a == 0.0 && b < 0.0) {
            throw DomainError(node.span, "zero raised to a negative power");
          }
          if constexpr (std::is_same_v<T, DualScalar>) {
            if (rhs.derivative != 0.0 && !(a > 0.0)) {
              throw DomainError(node.span,
                                "varying exponent requires a positive base");
            }
          }
          using std::pow;
          result = pow(lhs, rhs);
          break;
      }
      if (!std::isfinite(value_of(result))) {
        throw DomainError(node.span, std::string("non-finite result of '") +
                                         op_symbol(node.op) + "'");
      }
      if constexpr (std::is_same_v<T, DualScalar>) {
        if (!std::isfinite(result.derivative)) {
          throw DomainError(node.span, "derivative is undefined here");
        }
      }
      return result;
    }
  }
  return T{};
}

std::span<const double> env_values(const Env& env, char prefix) {
  switch (prefix) {
    case 'g': return env.g;
    case 'h': return env.h;
    default: return env.x;
  }
}

std::span<const double> env_seeds(const Env& env, char prefix) {
  switch (prefix) {
    case 'g': return env.dg;
    case 'h': return env.dh;
    default: return env.dx;
  }
}

double lookup_env(const Env& env, const Node& node) {
  const auto values = env_values(env, node.var.prefix);
  const auto i = static_cast<std::size_t>(node.var.index - 1);
  if (i >= values.size()) {
    throw DomainError(node.span, "unbound variable " + node.var.name());
  }
  return values[i];
}

double lookup_map(const Bindings& bindings, const Node& node) {
  const auto it = bindings.find(node.var.name());
  if (it == bindings.end()) {
    throw DomainError(node.span, "unbound variable " + node.var.name());
  }
  return it->second;
}

void render(const Node& node, std::string& out) {
  switch (node.kind) {
    case NodeKind::Constant: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", node.constant);
      out += buf;
      return;
    }
    case NodeKind::Variable:
      out += node.var.name();
      return;
    case NodeKind::Unary:
      out += "(-";
      render(*node.children[0], out);
      out += ')';
      return;
    case NodeKind::Call:
      out += function_name(node.function);
      out += '(';
      render(*node.children[0], out);
      out += ')';
      return;
    case NodeKind::Binary:
      out += '(';
      render(*node.children[0], out);
      out += ' ';
      out += op_symbol(node.op);
      out += ' ';
      render(*node.children[1], out);
      out += ')';
      return;
  }
}

}  // namespace

Ast parse(std::string_view text) {
  Parser parser(text);
  return Ast(parser.parse_all(), std::string(text));
}

std::string to_string(const Ast& ast) {
  std::string out;
  render(ast.root(), out);
  return out;
}

double evaluate(const Ast& ast, const Bindings& bindings) {
  return eval_node<double>(ast.root(), [&](const Node& node) {
    return lookup_map(bindings, node);
  });
}

DualScalar evaluate_dual(const Ast& ast, const Bindings& bindings,
                         const Bindings& seed) {
  return eval_node<DualScalar>(ast.root(), [&](const Node& node) {
    const double v = lookup_map(bindings, node);
    const auto it = seed.find(node.var.name());
    return DualScalar{v, it == seed.end() ? 0.0 : it->second};
  });
}

double evaluate(const Ast& ast, const Env& env) {
  return eval_node<double>(ast.root(), [&](const Node& node) {
    return lookup_env(env, node);
  });
}

DualScalar evaluate_dual(const Ast& ast, const Env& env) {
  return eval_node<DualScalar>(ast.root(), [&](const Node& node) {
    const double v = lookup_env(env, node);
    const auto seeds = env_seeds(env, node.var.prefix);
    const auto i = static_cast<std::size_t>(node.var.index - 1);
    return DualScalar{v, i < seeds.size() ? seeds[i] : 0.0};
  });
}

}  // namespace liesect::expr
