#pragma once

// Small closed-form expression language for warp functions phi(omega, r):
// infix grammar over {+,-,*,/,^}, unary minus, and the function table
// {sin, cos, sinh, cosh, exp, log, sqrt, abs}. Expressions are immutable
// trees; differentiation is exact and structural (no simplification pass).

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ends {

enum class ExprKind : std::uint8_t {
  Number,
  Variable,
  Negate,
  Add,
  Subtract,
  Multiply,
  Divide,
  Power,
  Call,
};

enum class Func : std::uint8_t { Sin, Cos, Sinh, Cosh, Exp, Log, Sqrt, Abs };

std::string_view func_name(Func f);

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  ExprKind kind;
  double number = 0.0;        // Number
  std::string name;           // Variable
  Func func = Func::Sin;      // Call
  ExprPtr lhs, rhs;           // children (unary ops use lhs only)
};

/// Parse failure with the byte offset of the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, const std::string& message)
      : std::runtime_error(message + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Evaluation failure (log of non-positive argument, division by zero, ...)
/// carrying the offending sub-expression in serialized form.
class EvalError : public std::runtime_error {
 public:
  EvalError(const std::string& message, std::string subexpr)
      : std::runtime_error(message + " in `" + subexpr + "`"),
        subexpr_(std::move(subexpr)) {}
  const std::string& subexpression() const { return subexpr_; }

 private:
  std::string subexpr_;
};

/// An expression over the radial variable `r` and the declared angular
/// coordinates of a cross-section (S^1: theta; T^2: u, v; radial-only: none).
class Expr {
 public:
  Expr() = default;
  explicit Expr(ExprPtr root) : root_(std::move(root)) {}

  const ExprPtr& root() const { return root_; }
  bool empty() const { return root_ == nullptr; }

  bool structurally_equal(const Expr& other) const;
  bool depends_on(std::string_view var) const;

 private:
  ExprPtr root_;
};

// Node constructors. Numbers are kept nonnegative; negative constants are
// represented as Negate(Number) so that serialization round-trips exactly.
Expr make_number(double v);
Expr make_variable(std::string name);
Expr make_negate(Expr e);
Expr make_binary(ExprKind op, Expr a, Expr b);
Expr make_call(Func f, Expr arg);

/// Parse `text` against the published grammar. `coords` lists the angular
/// coordinate names admissible besides `r`. Unknown identifiers and function
/// names used without arguments are rejected.
Expr parse_expr(std::string_view text, std::span<const std::string> coords);

/// Precedence-aware serialization; parse(serialize(e)) is structurally
/// identical to e.
std::string serialize(const Expr& e);

/// Exact symbolic partial derivative with respect to `var`. The result is
/// un-simplified. d(abs f)/dx is emitted as f/abs(f) * df, so evaluating it
/// at f == 0 raises the documented division-by-zero domain error.
Expr differentiate(const Expr& e, std::string_view var);

/// Flattened postfix form of an expression with variable slots resolved,
/// for fast repeated evaluation. Slot 0 is `r`; slots 1, 2 are the angular
/// coordinates in declaration order.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  CompiledExpr(const Expr& e, std::span<const std::string> coords);

  /// Fast evaluation; overflow and domain violations yield inf/NaN.
  double eval_unchecked(double r, double w0 = 0.0, double w1 = 0.0) const noexcept;

  /// Checked evaluation: throws EvalError naming the offending
  /// sub-expression on any domain violation or non-finite result.
  double eval(double r, double w0 = 0.0, double w1 = 0.0) const;

  const Expr& source() const { return source_; }
  bool valid() const { return !source_.empty(); }

 private:
  struct Instr {
    std::uint8_t code;
    double imm;
  };
  Expr source_;
  std::vector<std::string> coords_;
  std::vector<Instr> tape_;
  std::size_t stack_depth_ = 0;
};

}  // namespace ends
