#pragma once

// Expression DSL used for every representative, curve, predicate and
// perturbation in the library.
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := atom ('^' factor)?
//   atom   := number | ident | ident '(' expr ')' | '(' expr ')' | '-' atom
//
// Identifiers are [a-z][a-z0-9]*. `i` is the imaginary unit and `pi` the
// constant; `eps` is always declared. Note that unary minus binds tighter
// than '^': "-x^2" is (-x)^2.

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mcalc {

enum class Op : std::uint8_t {
  Num, Imag, Var, Neg, Add, Sub, Mul, Div, Pow,
  Sin, Cos, Exp, Log, Sqrt, Abs, Re, Im
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Op op;
  double value = 0.0;  // Num
  int var = -1;        // Var: index into the owning variable list
  NodePtr lhs;         // unary operand or left operand
  NodePtr rhs;
};

/// Result of a name-keyed evaluation; `complex` records the inferred mode.
struct Value {
  std::complex<double> z;
  bool complex = false;
  double real() const { return z.real(); }
};

using Env = std::map<std::string, std::complex<double>, std::less<>>;

class Program;

/// Immutable expression tree over a fixed variable list. Cheap to copy.
class Expr {
 public:
  Expr();

  const std::vector<std::string>& variables() const { return *vars_; }
  /// Index of `name` in variables(), or -1.
  int index_of(std::string_view name) const;

  /// Real-mode evaluation; env is indexed like variables().
  /// Throws DomainError if the tree needs complex arithmetic.
  double eval(std::span<const double> env) const;
  /// Complex-mode evaluation; env is indexed like variables().
  std::complex<double> eval(std::span<const std::complex<double>> env) const;
  /// Name-keyed evaluation; complex mode when the tree uses `i`/re/im or
  /// any binding has a nonzero imaginary part, or `force_complex` is set.
  Value eval(const Env& env, bool force_complex = false) const;

  /// Exact symbolic derivative with constant folding.
  Expr differentiate(std::string_view var) const;

  bool depends_on(std::string_view var) const;
  /// True if the tree contains `i`, re or im.
  bool uses_complex() const;
  bool is_constant() const;
  /// True when the tree is the literal 0.
  bool is_zero() const;

  std::string str() const;
  const NodePtr& root() const { return root_; }

  Expr(std::shared_ptr<const std::vector<std::string>> vars, NodePtr root);

 private:
  std::shared_ptr<const std::vector<std::string>> vars_;
  NodePtr root_;
  std::shared_ptr<const Program> program_;
};

/// Parses `text` with declared variables `vars`; "eps" is appended to the
/// variable list when not already present.
Expr parse(std::string_view text, std::vector<std::string> vars = {});

std::string print(const Expr& e);

/// Substitutes inner[i] for the i-th variable of `outer`; the outer `eps`
/// maps to the inner `eps`. All inner expressions must share one variable
/// list, and `outer` must have exactly inner.size() variables before `eps`.
Expr compose(const Expr& outer, std::span<const Expr> inner);

/// a `op` b with constant folding; op is one of Add, Sub, Mul, Div, Pow.
/// Both operands must share one variable list.
Expr combine(Op op, const Expr& a, const Expr& b);

}  // namespace mcalc
