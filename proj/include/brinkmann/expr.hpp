#pragma once

// Expression language for metric coefficients.
//
// Grammar (lowest to highest precedence):
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right associative
//   primary := number | name | func '(' sum ')' | '(' sum ')'
//
// Functions: sin cos exp log sqrt tanh. The constant `pi` is predefined.
// Every other name must be one of the declared coordinates.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "brinkmann/dual.hpp"
#include "brinkmann/errors.hpp"

namespace brinkmann::dsl {

enum class NodeKind { Constant, Variable, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Function { Sin, Cos, Exp, Log, Sqrt, Tanh };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind = NodeKind::Constant;
  double value = 0.0;               // Constant
  int variable = -1;                // Variable: index into the coordinate list
  Function function = Function::Sin;  // Call
  std::size_t offset = 0;           // byte offset in the source text
  NodePtr lhs;                      // operand of Neg/Call, left of binary nodes
  NodePtr rhs;                      // right of binary nodes
};

const char* function_name(Function f);

/// Immutable expression tree over a declared coordinate list.
class Expr {
 public:
  Expr() = default;
  Expr(NodePtr root, std::vector<std::string> coords);

  const Node& root() const { return *root_; }
  NodePtr root_ptr() const { return root_; }
  const std::vector<std::string>& coords() const { return coords_; }
  bool empty() const { return !root_; }

  /// Fully parenthesized text that parses back to the same tree.
  std::string to_string() const;

  bool structurally_equal(const Expr& other) const;

  /// True when no variable node occurs.
  bool is_constant() const;
  /// True when the coordinate with this index occurs.
  bool depends_on(int coordinate) const;

  static Expr constant(double value, std::vector<std::string> coords);
  static Expr variable(int index, std::vector<std::string> coords);

 private:
  NodePtr root_;
  std::vector<std::string> coords_;
};

/// Parses `text` against the coordinate names. Throws ParseError (with byte
/// offset) or UnknownIdentifierError.
Expr parse_expr(std::string_view text, const std::vector<std::string>& coords);

/// Value and partial derivatives of an expression at a point.
struct Jet {
  double value = 0.0;
  std::vector<double> partials;  // one per chart coordinate
};

/// Evaluation mode: plain (value only) or dual over a set of coordinate
/// directions. An empty direction list in dual mode means "all coordinates".
struct EvalMode {
  bool dual = false;
  std::vector<int> directions;

  static EvalMode plain() { return {}; }
  static EvalMode all_partials() { return {true, {}}; }
};

/// Flat postfix program compiled from an Expr; the evaluation workhorse.
class Program {
 public:
  Program() = default;
  explicit Program(const Expr& expr);

  int dim() const { return dim_; }
  bool is_constant() const { return constant_; }
  double constant_value() const { return constant_value_; }

  /// Evaluates with one scalar per coordinate. T is double, Dual1 or Dual2.
  template <class T>
  T eval(std::span<const T> vars) const;

 private:
  enum class Op : unsigned char {
    Const, Var, Neg, Add, Sub, Mul, Div, PowConst, Pow, Sin, Cos, Exp, Log, Sqrt, Tanh
  };
  struct Instr {
    Op op;
    int index;
    double value;
    std::size_t offset;
  };
  void emit(const Node& node);

  std::vector<Instr> code_;
  int dim_ = 0;
  int depth_ = 0;
  bool constant_ = true;
  double constant_value_ = 0.0;
};

/// Evaluates `e` at `bindings` (one value per coordinate).
Jet eval_expr(const Expr& e, std::span<const double> bindings, const EvalMode& mode = EvalMode::plain());

extern template double Program::eval<double>(std::span<const double>) const;
extern template Dual1 Program::eval<Dual1>(std::span<const Dual1>) const;
extern template Dual2 Program::eval<Dual2>(std::span<const Dual2>) const;

}  // namespace brinkmann::dsl
