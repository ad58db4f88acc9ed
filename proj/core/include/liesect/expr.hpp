#pragma once

// Scalar expression language used to describe custom group products and
// fibrations.
//
// Grammar (lowest to highest precedence):
//
//   sum     := product (('+' | '-') product)*
//   product := power (('*' | '/') power)*
//   power   := unary ('^' power)?          right associative
//   unary   := '-' unary | primary
//   primary := number | variable | function '(' sum ')' | '(' sum ')'
//
// Unary minus binds tighter than '^', so "-g1^2" is (-g1)^2.
// Variables are g<k>, h<k> (first/second product argument) or x<k>
// (single-argument expressions), with k >= 1.  Functions: exp log sin cos sqrt.

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "liesect/error.hpp"

namespace liesect::expr {

enum class NodeKind { Constant, Variable, Unary, Binary, Call };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Function { Exp, Log, Sin, Cos, Sqrt };

/// Variable reference such as g3: prefix 'g', 1-based index 3.
struct VarRef {
  char prefix = 'x';
  int index = 1;

  std::string name() const;
  friend bool operator==(const VarRef&, const VarRef&) = default;
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind = NodeKind::Constant;
  double constant = 0.0;
  VarRef var;
  BinaryOp op = BinaryOp::Add;
  Function function = Function::Exp;
  std::vector<NodePtr> children;
  Span span;
};

/// Immutable parsed expression. Copies share the node tree.
class Ast {
 public:
  Ast(NodePtr root, std::string source);

  const Node& root() const { return *root_; }
  const std::string& source() const { return source_; }

  /// Largest index used with the given prefix, 0 if the prefix is unused.
  int max_index(char prefix) const;

 private:
  NodePtr root_;
  std::string source_;
};

/// Value plus directional derivative along a seed direction.
struct DualScalar {
  double value = 0.0;
  double derivative = 0.0;
};

DualScalar operator+(DualScalar a, DualScalar b);
DualScalar operator-(DualScalar a, DualScalar b);
DualScalar operator*(DualScalar a, DualScalar b);
DualScalar operator/(DualScalar a, DualScalar b);
DualScalar operator-(DualScalar a);
DualScalar pow(DualScalar a, DualScalar b);
DualScalar exp(DualScalar a);
DualScalar log(DualScalar a);
DualScalar sin(DualScalar a);
DualScalar cos(DualScalar a);
DualScalar sqrt(DualScalar a);

/// Throws ParseError with the byte offset of the first problem.
Ast parse(std::string_view text);

/// Fully parenthesized rendering that parses back to an equivalent tree.
std::string to_string(const Ast& ast);

using Bindings = std::map<std::string, double, std::less<>>;

/// Throws DomainError for unbound variables and domain violations.
double evaluate(const Ast& ast, const Bindings& bindings);

/// Seeds missing from `seed` are zero. The value is bit-identical to
/// evaluate(ast, bindings).
DualScalar evaluate_dual(const Ast& ast, const Bindings& bindings,
                         const Bindings& seed);

/// Positional bindings for the hot path: g<k> reads g[k-1] and so on.
/// Derivative spans may be empty, meaning a zero seed.
struct Env {
  std::span<const double> g;
  std::span<const double> h;
  std::span<const double> x;
  std::span<const double> dg;
  std::span<const double> dh;
  std::span<const double> dx;
};

double evaluate(const Ast& ast, const Env& env);
DualScalar evaluate_dual(const Ast& ast, const Env& env);

}  // namespace liesect::expr
