#include "ends/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace ends {

namespace {

constexpr std::array<std::string_view, 8> kFuncNames = {
    "sin", "cos", "sinh", "cosh", "exp", "log", "sqrt", "abs"};

ExprPtr node(ExprKind kind) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  return n;
}

}  // namespace

std::string_view func_name(Func f) { return kFuncNames[static_cast<std::size_t>(f)]; }

Expr make_number(double v) {
  if (std::signbit(v)) return make_negate(make_number(-v));
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Number;
  n->number = v;
  return Expr(n);
}

Expr make_variable(std::string name) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Variable;
  n->name = std::move(name);
  return Expr(n);
}

Expr make_negate(Expr e) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Negate;
  n->lhs = e.root();
  return Expr(n);
}

Expr make_binary(ExprKind op, Expr a, Expr b) {
  auto n = std::make_shared<ExprNode>();
  n->kind = op;
  n->lhs = a.root();
  n->rhs = b.root();
  return Expr(n);
}

Expr make_call(Func f, Expr arg) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Call;
  n->func = f;
  n->lhs = arg.root();
  return Expr(n);
}

bool Expr::structurally_equal(const Expr& other) const {
  struct Cmp {
    static bool eq(const ExprPtr& a, const ExprPtr& b) {
      if (a == b) return true;
      if (!a || !b) return false;
      if (a->kind != b->kind) return false;
      switch (a->kind) {
        case ExprKind::Number:
          return a->number == b->number;
        case ExprKind::Variable:
          return a->name == b->name;
        case ExprKind::Call:
          if (a->func != b->func) return false;
          return eq(a->lhs, b->lhs);
        case ExprKind::Negate:
          return eq(a->lhs, b->lhs);
        default:
          return eq(a->lhs, b->lhs) && eq(a->rhs, b->rhs);
      }
    }
  };
  return Cmp::eq(root_, other.root_);
}

bool Expr::depends_on(std::string_view var) const {
  struct Walk {
    static bool dep(const ExprPtr& n, std::string_view v) {
      if (!n) return false;
      if (n->kind == ExprKind::Variable) return n->name == v;
      return dep(n->lhs, v) || dep(n->rhs, v);
    }
  };
  return Walk::dep(root_, var);
}

// ---------------------------------------------------------------------------
// Parser.
//
//   expr   := term   (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := unary  ('^' factor)?
//   unary  := '-'? atom
//   atom   := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'

namespace {

class Parser {
 public:
  Parser(std::string_view text, std::span<const std::string> coords)
      : text_(text), coords_(coords) {}

  Expr parse() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size())
      throw ParseError(pos_, "unexpected trailing input");
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool peek_char(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool consume_char(char c) {
    if (!peek_char(c)) return false;
    ++pos_;
    return true;
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      if (consume_char('+'))
        lhs = make_binary(ExprKind::Add, lhs, parse_term());
      else if (consume_char('-'))
        lhs = make_binary(ExprKind::Subtract, lhs, parse_term());
      else
        return lhs;
    }
  }

  Expr parse_term() {
    Expr lhs = parse_factor();
    for (;;) {
      if (consume_char('*'))
        lhs = make_binary(ExprKind::Multiply, lhs, parse_factor());
      else if (consume_char('/'))
        lhs = make_binary(ExprKind::Divide, lhs, parse_factor());
      else
        return lhs;
    }
  }

  Expr parse_factor() {
    Expr base = parse_unary();
    if (consume_char('^'))  // right-associative
      return make_binary(ExprKind::Power, base, parse_factor());
    return base;
  }

  Expr parse_unary() {
    if (consume_char('-')) return make_negate(parse_atom());
    return parse_atom();
  }

  Expr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError(pos_, "unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = parse_expr();
      if (!consume_char(')')) throw ParseError(pos_, "expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return parse_ident();
    throw ParseError(pos_, std::string("unexpected character '") + c + "'");
  }

  Expr parse_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
    }
    if (pos_ - start == 0 ||
        (pos_ - start == 1 && text_[start] == '.'))
      throw ParseError(start, "malformed number");
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-'))
        ++pos_;
      if (pos_ >= text_.size() ||
          !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        pos_ = mark;  // the 'e' belongs to something else (or is an error)
      } else {
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_])))
          ++pos_;
      }
    }
    double value = 0.0;
    auto piece = text_.substr(start, pos_ - start);
    auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), value);
    if (ec != std::errc() || ptr != piece.data() + piece.size())
      throw ParseError(start, "malformed number");
    return make_number(value);
  }

  Expr parse_ident() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_'))
      ++pos_;
    std::string_view name = text_.substr(start, pos_ - start);
    for (std::size_t i = 0; i < kFuncNames.size(); ++i) {
      if (name == kFuncNames[i]) {
        if (!consume_char('('))
          throw ParseError(start, "function '" + std::string(name) +
                                      "' requires a parenthesized argument");
        Expr arg = parse_expr();
        if (!consume_char(')')) throw ParseError(pos_, "expected ')'");
        return make_call(static_cast<Func>(i), arg);
      }
    }
    if (name == "r") return make_variable("r");
    for (const auto& coord : coords_)
      if (name == coord) return make_variable(std::string(name));
    throw ParseError(start, "unknown identifier '" + std::string(name) + "'");
  }

  std::string_view text_;
  std::span<const std::string> coords_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text, std::span<const std::string> coords) {
  return Parser(text, coords).parse();
}

// ---------------------------------------------------------------------------
// Serialization. Parenthesization is driven by precedence levels
// (add = 1, mul = 2, pow/unary = 3, atom = 4) so the output re-parses to the
// identical tree.

namespace {

int precedence(const ExprPtr& n) {
  switch (n->kind) {
    case ExprKind::Add:
    case ExprKind::Subtract:
      return 1;
    case ExprKind::Multiply:
    case ExprKind::Divide:
      return 2;
    case ExprKind::Negate:
    case ExprKind::Power:
      return 3;
    default:
      return 4;
  }
}

void format_number(std::ostringstream& out, double v) {
  // Shortest digit string that round-trips; integers print bare.
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out << std::string_view(buf.data(), static_cast<std::size_t>(ptr - buf.data()));
}

void print(std::ostringstream& out, const ExprPtr& n, int min_prec) {
  const int prec = precedence(n);
  const bool parens = prec < min_prec;
  if (parens) out << '(';
  switch (n->kind) {
    case ExprKind::Number:
      format_number(out, n->number);
      break;
    case ExprKind::Variable:
      out << n->name;
      break;
    case ExprKind::Call:
      out << func_name(n->func) << '(';
      print(out, n->lhs, 0);
      out << ')';
      break;
    case ExprKind::Negate:
      out << '-';
      print(out, n->lhs, 4);  // operand of unary minus is an atom
      break;
    case ExprKind::Add:
      print(out, n->lhs, 1);
      out << " + ";
      print(out, n->rhs, 2);
      break;
    case ExprKind::Subtract:
      print(out, n->lhs, 1);
      out << " - ";
      print(out, n->rhs, 2);
      break;
    case ExprKind::Multiply:
      print(out, n->lhs, 2);
      out << " * ";
      print(out, n->rhs, 3);
      break;
    case ExprKind::Divide:
      print(out, n->lhs, 2);
      out << " / ";
      print(out, n->rhs, 3);
      break;
    case ExprKind::Power:
      // '^' is right-associative and binds tighter than unary minus on the
      // left: -x^2 parses as -(x^2) only at the unary level, so a Negate
      // base must keep its own '-' outside explicit parens.
      if (n->lhs->kind == ExprKind::Negate || n->lhs->kind == ExprKind::Power)
        print(out, n->lhs, 4);
      else
        print(out, n->lhs, 3);
      out << '^';
      print(out, n->rhs, 3);
      break;
  }
  if (parens) out << ')';
}

}  // namespace

std::string serialize(const Expr& e) {
  if (e.empty()) return "";
  std::ostringstream out;
  print(out, e.root(), 0);
  return out.str();
}

// ---------------------------------------------------------------------------
// Differentiation.

namespace {

Expr D(const ExprPtr& n, std::string_view var);

Expr expr_of(const ExprPtr& n) { return Expr(n); }

Expr D(const ExprPtr& n, std::string_view var) {
  switch (n->kind) {
    case ExprKind::Number:
      return make_number(0.0);
    case ExprKind::Variable:
      return make_number(n->name == var ? 1.0 : 0.0);
    case ExprKind::Negate:
      return make_negate(D(n->lhs, var));
    case ExprKind::Add:
      return make_binary(ExprKind::Add, D(n->lhs, var), D(n->rhs, var));
    case ExprKind::Subtract:
      return make_binary(ExprKind::Subtract, D(n->lhs, var), D(n->rhs, var));
    case ExprKind::Multiply:
      return make_binary(
          ExprKind::Add,
          make_binary(ExprKind::Multiply, D(n->lhs, var), expr_of(n->rhs)),
          make_binary(ExprKind::Multiply, expr_of(n->lhs), D(n->rhs, var)));
    case ExprKind::Divide:
      // (f/g)' = (f'g - fg') / g^2
      return make_binary(
          ExprKind::Divide,
          make_binary(
              ExprKind::Subtract,
              make_binary(ExprKind::Multiply, D(n->lhs, var), expr_of(n->rhs)),
              make_binary(ExprKind::Multiply, expr_of(n->lhs), D(n->rhs, var))),
          make_binary(ExprKind::Power, expr_of(n->rhs), make_number(2.0)));
    case ExprKind::Power: {
      const Expr f = expr_of(n->lhs);
      const Expr g = expr_of(n->rhs);
      if (!g.depends_on(var)) {
        // (f^c)' = c * f^(c-1) * f'
        Expr power = make_binary(
            ExprKind::Power, f,
            make_binary(ExprKind::Subtract, g, make_number(1.0)));
        return make_binary(
            ExprKind::Multiply,
            make_binary(ExprKind::Multiply, g, power), D(n->lhs, var));
      }
      // general: f^g * (g' log f + g f'/f)
      Expr self = make_binary(ExprKind::Power, f, g);
      Expr term1 =
          make_binary(ExprKind::Multiply, D(n->rhs, var), make_call(Func::Log, f));
      Expr term2 = make_binary(
          ExprKind::Multiply, g, make_binary(ExprKind::Divide, D(n->lhs, var), f));
      return make_binary(ExprKind::Multiply, self,
                         make_binary(ExprKind::Add, term1, term2));
    }
    case ExprKind::Call: {
      const Expr arg = expr_of(n->lhs);
      const Expr darg = D(n->lhs, var);
      Expr outer;
      switch (n->func) {
        case Func::Sin:
          outer = make_call(Func::Cos, arg);
          break;
        case Func::Cos:
          outer = make_negate(make_call(Func::Sin, arg));
          break;
        case Func::Sinh:
          outer = make_call(Func::Cosh, arg);
          break;
        case Func::Cosh:
          outer = make_call(Func::Sinh, arg);
          break;
        case Func::Exp:
          outer = make_call(Func::Exp, arg);
          break;
        case Func::Log:
          outer = make_binary(ExprKind::Divide, make_number(1.0), arg);
          break;
        case Func::Sqrt:
          outer = make_binary(
              ExprKind::Divide, make_number(1.0),
              make_binary(ExprKind::Multiply, make_number(2.0),
                          make_call(Func::Sqrt, arg)));
          break;
        case Func::Abs:
          // sign(f) written as f/abs(f); evaluating at f == 0 raises the
          // division-by-zero domain error, which is the intended behaviour
          // at the kink.
          outer = make_binary(ExprKind::Divide, arg, make_call(Func::Abs, arg));
          break;
      }
      return make_binary(ExprKind::Multiply, outer, darg);
    }
  }
  return make_number(0.0);  // unreachable
}

}  // namespace

Expr differentiate(const Expr& e, std::string_view var) {
  if (e.empty()) return Expr();
  return D(e.root(), var);
}

// ---------------------------------------------------------------------------
// Compiled tape.

namespace {

enum Code : std::uint8_t {
  kPushNum,
  kPushR,
  kPushW0,
  kPushW1,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kPow,
  kNeg,
  kSin,
  kCos,
  kSinh,
  kCosh,
  kExp,
  kLog,
  kSqrt,
  kAbs,
};

}  // namespace

CompiledExpr::CompiledExpr(const Expr& e, std::span<const std::string> coords)
    : source_(e), coords_(coords.begin(), coords.end()) {
  struct Builder {
    std::vector<Instr>& tape;
    std::span<const std::string> coords;
    std::size_t depth = 0, max_depth = 0;

    void push(std::uint8_t code, double imm = 0.0) {
      tape.push_back({code, imm});
    }
    void enter() { max_depth = std::max(max_depth, ++depth); }
    void leave(std::size_t n) { depth -= n; }

    void emit(const ExprPtr& n) {
      switch (n->kind) {
        case ExprKind::Number:
          push(kPushNum, n->number);
          enter();
          break;
        case ExprKind::Variable: {
          std::uint8_t code = kPushR;
          if (n->name != "r") {
            code = (coords.size() > 0 && n->name == coords[0]) ? kPushW0 : kPushW1;
          }
          push(code);
          enter();
          break;
        }
        case ExprKind::Negate:
          emit(n->lhs);
          push(kNeg);
          break;
        case ExprKind::Call:
          emit(n->lhs);
          push(static_cast<std::uint8_t>(kSin + static_cast<int>(n->func)));
          break;
        default:
          emit(n->lhs);
          emit(n->rhs);
          switch (n->kind) {
            case ExprKind::Add:      push(kAdd); break;
            case ExprKind::Subtract: push(kSub); break;
            case ExprKind::Multiply: push(kMul); break;
            case ExprKind::Divide:   push(kDiv); break;
            case ExprKind::Power:    push(kPow); break;
            default: break;
          }
          leave(1);
          break;
      }
    }
  };
  if (e.empty()) return;
  Builder b{tape_, coords};
  b.emit(e.root());
  stack_depth_ = b.max_depth;
}

double CompiledExpr::eval_unchecked(double r, double w0, double w1) const noexcept {
  double local[32];
  std::vector<double> heap;
  double* stack = local;
  if (stack_depth_ > 32) {
    heap.resize(stack_depth_);
    stack = heap.data();
  }
  std::size_t top = 0;
  for (const Instr& ins : tape_) {
    switch (ins.code) {
      case kPushNum: stack[top++] = ins.imm; break;
      case kPushR:   stack[top++] = r; break;
      case kPushW0:  stack[top++] = w0; break;
      case kPushW1:  stack[top++] = w1; break;
      case kAdd:  --top; stack[top - 1] += stack[top]; break;
      case kSub:  --top; stack[top - 1] -= stack[top]; break;
      case kMul:  --top; stack[top - 1] *= stack[top]; break;
      case kDiv:  --top; stack[top - 1] /= stack[top]; break;
      case kPow:  --top; stack[top - 1] = std::pow(stack[top - 1], stack[top]); break;
      case kNeg:  stack[top - 1] = -stack[top - 1]; break;
      case kSin:  stack[top - 1] = std::sin(stack[top - 1]); break;
      case kCos:  stack[top - 1] = std::cos(stack[top - 1]); break;
      case kSinh: stack[top - 1] = std::sinh(stack[top - 1]); break;
      case kCosh: stack[top - 1] = std::cosh(stack[top - 1]); break;
      case kExp:  stack[top - 1] = std::exp(stack[top - 1]); break;
      case kLog:  stack[top - 1] = std::log(stack[top - 1]); break;
      case kSqrt: stack[top - 1] = std::sqrt(stack[top - 1]); break;
      case kAbs:  stack[top - 1] = std::abs(stack[top - 1]); break;
    }
  }
  return stack[0];
}

namespace {

// Slow path: re-walk the tree to attribute a non-finite result to the
// sub-expression that produced it.
double eval_tree(const ExprPtr& n, double r, double w0, double w1,
                 std::span<const std::string> coords) {
  auto fail = [&](const char* msg) -> double {
    throw EvalError(msg, serialize(Expr(n)));
  };
  switch (n->kind) {
    case ExprKind::Number:
      return n->number;
    case ExprKind::Variable:
      if (n->name == "r") return r;
      if (!coords.empty() && n->name == coords[0]) return w0;
      return w1;
    case ExprKind::Negate:
      return -eval_tree(n->lhs, r, w0, w1, coords);
    case ExprKind::Add:
      return eval_tree(n->lhs, r, w0, w1, coords) +
             eval_tree(n->rhs, r, w0, w1, coords);
    case ExprKind::Subtract:
      return eval_tree(n->lhs, r, w0, w1, coords) -
             eval_tree(n->rhs, r, w0, w1, coords);
    case ExprKind::Multiply: {
      double v = eval_tree(n->lhs, r, w0, w1, coords) *
                 eval_tree(n->rhs, r, w0, w1, coords);
      if (!std::isfinite(v)) fail("non-finite product");
      return v;
    }
    case ExprKind::Divide: {
      double den = eval_tree(n->rhs, r, w0, w1, coords);
      if (den == 0.0) fail("division by zero");
      double v = eval_tree(n->lhs, r, w0, w1, coords) / den;
      if (!std::isfinite(v)) fail("non-finite quotient");
      return v;
    }
    case ExprKind::Power: {
      double base = eval_tree(n->lhs, r, w0, w1, coords);
      double expo = eval_tree(n->rhs, r, w0, w1, coords);
      if (base < 0.0 && expo != std::floor(expo))
        fail("negative base with non-integer exponent");
      if (base == 0.0 && expo < 0.0) fail("zero base with negative exponent");
      double v = std::pow(base, expo);
      if (!std::isfinite(v)) fail("non-finite power");
      return v;
    }
    case ExprKind::Call: {
      double a = eval_tree(n->lhs, r, w0, w1, coords);
      double v = 0.0;
      switch (n->func) {
        case Func::Sin:  v = std::sin(a); break;
        case Func::Cos:  v = std::cos(a); break;
        case Func::Sinh: v = std::sinh(a); break;
        case Func::Cosh: v = std::cosh(a); break;
        case Func::Exp:  v = std::exp(a); break;
        case Func::Log:
          if (a <= 0.0) fail("log of non-positive argument");
          v = std::log(a);
          break;
        case Func::Sqrt:
          if (a < 0.0) fail("sqrt of negative argument");
          v = std::sqrt(a);
          break;
        case Func::Abs:  v = std::abs(a); break;
      }
      if (!std::isfinite(v)) fail("non-finite function value");
      return v;
    }
  }
  return 0.0;  // unreachable
}

}  // namespace

double CompiledExpr::eval(double r, double w0, double w1) const {
  double v = eval_unchecked(r, w0, w1);
  if (std::isfinite(v)) return v;
  // Locate the offending sub-expression (throws).
  eval_tree(source_.root(), r, w0, w1, coords_);
  throw EvalError("non-finite value", serialize(source_));
}

}  // namespace ends
