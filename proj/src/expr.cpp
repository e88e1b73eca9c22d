#include "mcalc/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <set>

#include "mcalc/errors.hpp"

namespace mcalc {

namespace {

constexpr int kPrecAdd = 1;
constexpr int kPrecMul = 2;
constexpr int kPrecPow = 3;
constexpr int kPrecAtom = 4;

const char* function_name(Op op) {
  switch (op) {
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sqrt: return "sqrt";
    case Op::Abs: return "abs";
    case Op::Re: return "re";
    case Op::Im: return "im";
    default: return nullptr;
  }
}

bool lookup_function(std::string_view name, Op& op) {
  static constexpr std::array<std::pair<std::string_view, Op>, 8> table{{
      {"sin", Op::Sin}, {"cos", Op::Cos}, {"exp", Op::Exp}, {"log", Op::Log},
      {"sqrt", Op::Sqrt}, {"abs", Op::Abs}, {"re", Op::Re}, {"im", Op::Im}}};
  for (const auto& [n, o] : table) {
    if (n == name) {
      op = o;
      return true;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Node construction

NodePtr leaf_num(double v) { return std::make_shared<const Node>(Node{Op::Num, v, -1, nullptr, nullptr}); }
NodePtr leaf_var(int idx) { return std::make_shared<const Node>(Node{Op::Var, 0.0, idx, nullptr, nullptr}); }
NodePtr leaf_imag() { return std::make_shared<const Node>(Node{Op::Imag, 0.0, -1, nullptr, nullptr}); }
NodePtr raw_unary(Op op, NodePtr a) {
  return std::make_shared<const Node>(Node{op, 0.0, -1, std::move(a), nullptr});
}
NodePtr raw_binary(Op op, NodePtr a, NodePtr b) {
  return std::make_shared<const Node>(Node{op, 0.0, -1, std::move(a), std::move(b)});
}

bool is_num(const NodePtr& n) { return n->op == Op::Num; }
bool is_num(const NodePtr& n, double v) { return n->op == Op::Num && n->value == v; }

// Folding constructors used by differentiation. They never fold into a
// non-finite literal or across a domain error.
NodePtr fold_neg(NodePtr a) {
  if (is_num(a)) return leaf_num(-a->value);
  if (a->op == Op::Neg) return a->lhs;
  return raw_unary(Op::Neg, std::move(a));
}

NodePtr fold_add(NodePtr a, NodePtr b) {
  if (is_num(a) && is_num(b)) return leaf_num(a->value + b->value);
  if (is_num(a, 0.0)) return b;
  if (is_num(b, 0.0)) return a;
  return raw_binary(Op::Add, std::move(a), std::move(b));
}

NodePtr fold_sub(NodePtr a, NodePtr b) {
  if (is_num(a) && is_num(b)) return leaf_num(a->value - b->value);
  if (is_num(b, 0.0)) return a;
  if (is_num(a, 0.0)) return fold_neg(std::move(b));
  return raw_binary(Op::Sub, std::move(a), std::move(b));
}

NodePtr fold_div(NodePtr a, NodePtr b);

NodePtr fold_mul(NodePtr a, NodePtr b) {
  if (is_num(a) && is_num(b)) return leaf_num(a->value * b->value);
  if (is_num(a, 0.0) || is_num(b, 0.0)) return leaf_num(0.0);
  if (is_num(a, 1.0)) return b;
  if (is_num(b, 1.0)) return a;
  if (is_num(a, -1.0)) return fold_neg(std::move(b));
  if (is_num(b, -1.0)) return fold_neg(std::move(a));
  if (b->op == Op::Div && is_num(b->lhs, 1.0)) return fold_div(std::move(a), b->rhs);
  return raw_binary(Op::Mul, std::move(a), std::move(b));
}

NodePtr fold_div(NodePtr a, NodePtr b) {
  if (is_num(a) && is_num(b) && b->value != 0.0) return leaf_num(a->value / b->value);
  if (is_num(a, 0.0) && !is_num(b, 0.0)) return leaf_num(0.0);
  if (is_num(b, 1.0)) return a;
  return raw_binary(Op::Div, std::move(a), std::move(b));
}

NodePtr fold_pow(NodePtr a, NodePtr b) {
  if (is_num(b, 0.0)) return leaf_num(1.0);
  if (is_num(b, 1.0)) return a;
  if (is_num(a) && is_num(b)) {
    const double base = a->value, ex = b->value;
    const bool integral = ex == std::floor(ex);
    if (base > 0.0 || (base < 0.0 && integral)) {
      const double r = std::pow(base, ex);
      if (std::isfinite(r)) return leaf_num(r);
    }
  }
  return raw_binary(Op::Pow, std::move(a), std::move(b));
}

NodePtr fold_func(Op op, NodePtr a) {
  if (is_num(a)) {
    const double v = a->value;
    double r = 0.0;
    bool ok = true;
    switch (op) {
      case Op::Sin: r = std::sin(v); break;
      case Op::Cos: r = std::cos(v); break;
      case Op::Exp: r = std::exp(v); break;
      case Op::Log: ok = v > 0.0; if (ok) r = std::log(v); break;
      case Op::Sqrt: ok = v >= 0.0; if (ok) r = std::sqrt(v); break;
      case Op::Abs: r = std::fabs(v); break;
      case Op::Re: r = v; break;
      case Op::Im: r = 0.0; break;
      default: ok = false;
    }
    if (ok && std::isfinite(r)) return leaf_num(r);
  }
  return raw_unary(op, std::move(a));
}

bool depends(const NodePtr& n, int idx) {
  if (!n) return false;
  if (n->op == Op::Var) return n->var == idx;
  return depends(n->lhs, idx) || depends(n->rhs, idx);
}

bool any_complex(const NodePtr& n) {
  if (!n) return false;
  if (n->op == Op::Imag || n->op == Op::Re || n->op == Op::Im) return true;
  return any_complex(n->lhs) || any_complex(n->rhs);
}

void collect_vars(const NodePtr& n, std::set<int>& out) {
  if (!n) return;
  if (n->op == Op::Var) out.insert(n->var);
  collect_vars(n->lhs, out);
  collect_vars(n->rhs, out);
}

NodePtr derive(const NodePtr& n, int idx) {
  if (!depends(n, idx)) return leaf_num(0.0);
  const NodePtr& u = n->lhs;
  const NodePtr& v = n->rhs;
  switch (n->op) {
    case Op::Var: return leaf_num(1.0);
    case Op::Neg: return fold_neg(derive(u, idx));
    case Op::Add: return fold_add(derive(u, idx), derive(v, idx));
    case Op::Sub: return fold_sub(derive(u, idx), derive(v, idx));
    case Op::Mul:
      return fold_add(fold_mul(derive(u, idx), v), fold_mul(u, derive(v, idx)));
    case Op::Div:
      if (!depends(v, idx)) return fold_div(derive(u, idx), v);
      if (!depends(u, idx))
        return fold_neg(fold_div(fold_mul(u, derive(v, idx)), fold_pow(v, leaf_num(2.0))));
      return fold_div(fold_sub(fold_mul(derive(u, idx), v), fold_mul(u, derive(v, idx))),
                      fold_pow(v, leaf_num(2.0)));
    case Op::Pow:
      if (!depends(v, idx)) {
        NodePtr ex = is_num(v) ? leaf_num(v->value - 1.0) : fold_sub(v, leaf_num(1.0));
        return fold_mul(fold_mul(v, fold_pow(u, ex)), derive(u, idx));
      }
      if (!depends(u, idx)) return fold_mul(fold_mul(n, fold_func(Op::Log, u)), derive(v, idx));
      return fold_mul(n, fold_add(fold_mul(derive(v, idx), fold_func(Op::Log, u)),
                                  fold_div(fold_mul(v, derive(u, idx)), u)));
    case Op::Sin: return fold_mul(fold_func(Op::Cos, u), derive(u, idx));
    case Op::Cos: return fold_mul(fold_neg(fold_func(Op::Sin, u)), derive(u, idx));
    case Op::Exp: return fold_mul(n, derive(u, idx));
    case Op::Log: return fold_div(derive(u, idx), u);
    case Op::Sqrt: return fold_div(derive(u, idx), fold_mul(leaf_num(2.0), n));
    // d|u| = u' * u / |u|; evaluating at u = 0 is a division by exact zero.
    case Op::Abs: return fold_div(fold_mul(derive(u, idx), u), n);
    case Op::Re: return fold_func(Op::Re, derive(u, idx));
    case Op::Im: return fold_func(Op::Im, derive(u, idx));
    default: return leaf_num(0.0);
  }
}

// ---------------------------------------------------------------------------
// Printing

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  if (std::strtod(buf, nullptr) != v) std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int precedence(const Node& n) {
  switch (n.op) {
    case Op::Add: case Op::Sub: return kPrecAdd;
    case Op::Mul: case Op::Div: return kPrecMul;
    case Op::Pow: return kPrecPow;
    default: return kPrecAtom;
  }
}

void render(const Node& n, const std::vector<std::string>& vars, std::string& out);

void render_wrapped(const Node& n, bool wrap, const std::vector<std::string>& vars,
                    std::string& out) {
  if (wrap) out += '(';
  render(n, vars, out);
  if (wrap) out += ')';
}

void render(const Node& n, const std::vector<std::string>& vars, std::string& out) {
  switch (n.op) {
    case Op::Num:
      if (n.value < 0.0 || (n.value == 0.0 && std::signbit(n.value))) {
        out += '-';
        out += format_number(-n.value);
      } else {
        out += format_number(n.value);
      }
      return;
    case Op::Imag: out += 'i'; return;
    case Op::Var: out += vars.at(static_cast<std::size_t>(n.var)); return;
    case Op::Neg:
      out += '-';
      render_wrapped(*n.lhs, precedence(*n.lhs) < kPrecAtom, vars, out);
      return;
    case Op::Add: case Op::Sub: case Op::Mul: case Op::Div: {
      const int p = precedence(n);
      render_wrapped(*n.lhs, precedence(*n.lhs) < p, vars, out);
      if (p == kPrecAdd) out += n.op == Op::Add ? " + " : " - ";
      else out += n.op == Op::Mul ? "*" : "/";
      render_wrapped(*n.rhs, precedence(*n.rhs) <= p, vars, out);
      return;
    }
    case Op::Pow:
      render_wrapped(*n.lhs, precedence(*n.lhs) <= kPrecPow, vars, out);
      out += '^';
      render_wrapped(*n.rhs, precedence(*n.rhs) < kPrecPow, vars, out);
      return;
    default:
      out += function_name(n.op);
      out += '(';
      render(*n.lhs, vars, out);
      out += ')';
      return;
  }
}

std::string render(const Node& n, const std::vector<std::string>& vars) {
  std::string s;
  render(n, vars, s);
  return s;
}

// ---------------------------------------------------------------------------
// Parsing

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& vars) : text_(text), vars_(vars) {}

  NodePtr run() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ < text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(what, pos_ + 1); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) lhs = raw_binary(Op::Add, lhs, term());
      else if (accept('-')) lhs = raw_binary(Op::Sub, lhs, term());
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      if (accept('*')) lhs = raw_binary(Op::Mul, lhs, factor());
      else if (accept('/')) lhs = raw_binary(Op::Div, lhs, factor());
      else return lhs;
    }
  }

  NodePtr factor() {
    NodePtr base = atom();
    if (accept('^')) return raw_binary(Op::Pow, base, factor());
    return base;
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '-') {
      ++pos_;
      return raw_unary(Op::Neg, atom());
    }
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c >= 'a' && c <= 'z') return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_, ++n;
      return n;
    };
    std::size_t nd = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      nd += digits();
    }
    if (nd == 0) {
      pos_ = start;
      fail("malformed number");
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        digits();
      }
    }
    const std::string lexeme(text_.substr(start, pos_ - start));
    const double v = std::strtod(lexeme.c_str(), nullptr);
    if (!std::isfinite(v)) {
      pos_ = start;
      fail("number out of range");
    }
    return leaf_num(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           ((text_[pos_] >= 'a' && text_[pos_] <= 'z') || std::isdigit(static_cast<unsigned char>(text_[pos_]))))
      ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      Op op{};
      if (!lookup_function(name, op)) {
        pos_ = start;
        fail("unknown function '" + std::string(name) + "'");
      }
      ++pos_;
      NodePtr arg = expr();
      if (!accept(')')) fail("expected ')'");
      return raw_unary(op, arg);
    }
    if (name == "i") return leaf_imag();
    if (name == "pi") return leaf_num(std::numbers::pi);
    for (std::size_t k = 0; k < vars_.size(); ++k)
      if (vars_[k] == name) return leaf_var(static_cast<int>(k));
    throw UndeclaredVariable(std::string(name));
  }

  std::string_view text_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

}  // namespace

// ---------------------------------------------------------------------------
// Compiled postfix program

struct Instr {
  Op op;
  int var;
  double value;
  const Node* src;
};

class Program {
 public:
  explicit Program(const NodePtr& root) {
    std::size_t depth = 0;
    emit(root, depth);
  }

  template <class T>
  T run(std::span<const T> env, const std::vector<std::string>& vars) const;

 private:
  void emit(const NodePtr& n, std::size_t& depth) {
    if (n->lhs) emit(n->lhs, depth);
    if (n->rhs) emit(n->rhs, depth);
    code_.push_back(Instr{n->op, n->var, n->value, n.get()});
    if (!n->lhs) ++depth;
    else if (n->rhs) --depth;
    max_depth_ = std::max(max_depth_, depth);
  }

  std::vector<Instr> code_;
  std::size_t max_depth_ = 0;
};

namespace {

[[noreturn]] void domain_fail(const char* what, const Node* src, const std::vector<std::string>& vars) {
  throw DomainError(std::string(what) + " in '" + render(*src, vars) + "'");
}

bool is_integral(double x) { return std::isfinite(x) && x == std::floor(x); }

inline double real_op(const Instr& in, double a, double b, const std::vector<std::string>& vars) {
  switch (in.op) {
    case Op::Neg: return -a;
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div:
      if (b == 0.0) domain_fail("division by exact zero", in.src, vars);
      return a / b;
    case Op::Pow:
      if (a == 0.0 && b < 0.0) domain_fail("division by exact zero", in.src, vars);
      if (b == 2.0) return a * a;
      if (a < 0.0 && !is_integral(b)) domain_fail("non-integer power of negative base", in.src, vars);
      return std::pow(a, b);
    case Op::Sin: return std::sin(a);
    case Op::Cos: return std::cos(a);
    case Op::Exp: return std::exp(a);
    case Op::Log:
      if (!(a > 0.0)) domain_fail("log of non-positive value", in.src, vars);
      return std::log(a);
    case Op::Sqrt:
      if (a < 0.0) domain_fail("sqrt of negative value", in.src, vars);
      return std::sqrt(a);
    case Op::Abs: return std::fabs(a);
    case Op::Re: return a;
    case Op::Im: return 0.0;
    default: return 0.0;
  }
}

using cplx = std::complex<double>;

cplx int_power(cplx base, long long n) {
  const bool invert = n < 0;
  unsigned long long m = invert ? static_cast<unsigned long long>(-n) : static_cast<unsigned long long>(n);
  cplx acc(1.0, 0.0);
  while (m) {
    if (m & 1ULL) acc *= base;
    base *= base;
    m >>= 1;
  }
  return invert ? cplx(1.0, 0.0) / acc : acc;
}

cplx complex_op(const Instr& in, cplx a, cplx b, const std::vector<std::string>& vars) {
  switch (in.op) {
    case Op::Neg: return -a;
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div:
      if (b == cplx(0.0, 0.0)) domain_fail("division by exact zero", in.src, vars);
      return a / b;
    case Op::Pow:
      if (b.imag() == 0.0 && is_integral(b.real()) && std::fabs(b.real()) <= 1024.0) {
        if (a == cplx(0.0, 0.0) && b.real() < 0.0) domain_fail("division by exact zero", in.src, vars);
        return int_power(a, static_cast<long long>(b.real()));
      }
      if (a == cplx(0.0, 0.0)) {
        if (b.imag() == 0.0 && b.real() > 0.0) return cplx(0.0, 0.0);
        domain_fail("power of zero with non-positive exponent", in.src, vars);
      }
      return std::pow(a, b);
    case Op::Sin: return std::sin(a);
    case Op::Cos: return std::cos(a);
    case Op::Exp: return std::exp(a);
    case Op::Log:
      if (a == cplx(0.0, 0.0)) domain_fail("log of zero", in.src, vars);
      return std::log(a);
    case Op::Sqrt: return std::sqrt(a);
    case Op::Abs: return std::abs(a);
    case Op::Re: return a.real();
    case Op::Im: return a.imag();
    default: return 0.0;
  }
}

}  // namespace

template <class T>
T Program::run(std::span<const T> env, const std::vector<std::string>& vars) const {
  std::array<T, 48> small{};
  std::vector<T> big;
  T* stack = small.data();
  if (max_depth_ > small.size()) {
    big.resize(max_depth_);
    stack = big.data();
  }
  std::size_t sp = 0;
  for (const Instr& in : code_) {
    switch (in.op) {
      case Op::Num: stack[sp++] = T(in.value); break;
      case Op::Imag:
        if constexpr (std::is_same_v<T, double>) {
          throw DomainError("imaginary unit in real-mode evaluation");
        } else {
          stack[sp++] = T(0.0, 1.0);
        }
        break;
      case Op::Var: stack[sp++] = env[static_cast<std::size_t>(in.var)]; break;
      case Op::Add: case Op::Sub: case Op::Mul: case Op::Div: case Op::Pow: {
        const T b = stack[--sp];
        const T a = stack[sp - 1];
        if constexpr (std::is_same_v<T, double>) stack[sp - 1] = real_op(in, a, b, vars);
        else stack[sp - 1] = complex_op(in, a, b, vars);
        break;
      }
      default: {
        const T a = stack[sp - 1];
        if constexpr (std::is_same_v<T, double>) stack[sp - 1] = real_op(in, a, 0.0, vars);
        else stack[sp - 1] = complex_op(in, a, T(0.0), vars);
      }
    }
  }
  return stack[0];
}

// ---------------------------------------------------------------------------
// Expr

Expr::Expr() : Expr(std::make_shared<const std::vector<std::string>>(std::vector<std::string>{"eps"}), leaf_num(0.0)) {}

Expr::Expr(std::shared_ptr<const std::vector<std::string>> vars, NodePtr root)
    : vars_(std::move(vars)), root_(std::move(root)), program_(std::make_shared<const Program>(root_)) {}

int Expr::index_of(std::string_view name) const {
  for (std::size_t k = 0; k < vars_->size(); ++k)
    if ((*vars_)[k] == name) return static_cast<int>(k);
  return -1;
}

double Expr::eval(std::span<const double> env) const {
  if (env.size() < vars_->size()) throw Error("evaluation environment is shorter than the variable list");
  return program_->run<double>(env, *vars_);
}

std::complex<double> Expr::eval(std::span<const std::complex<double>> env) const {
  if (env.size() < vars_->size()) throw Error("evaluation environment is shorter than the variable list");
  return program_->run<std::complex<double>>(env, *vars_);
}

Value Expr::eval(const Env& env, bool force_complex) const {
  std::set<int> used;
  collect_vars(root_, used);
  bool complex = force_complex || uses_complex();
  for (int idx : used) {
    auto it = env.find((*vars_)[static_cast<std::size_t>(idx)]);
    if (it == env.end()) throw Error("variable '" + (*vars_)[static_cast<std::size_t>(idx)] + "' is not bound");
    if (it->second.imag() != 0.0) complex = true;
  }
  if (complex) {
    std::vector<std::complex<double>> slots(vars_->size());
    for (int idx : used) slots[static_cast<std::size_t>(idx)] = env.find((*vars_)[static_cast<std::size_t>(idx)])->second;
    return {eval(std::span<const std::complex<double>>(slots)), true};
  }
  std::vector<double> slots(vars_->size());
  for (int idx : used) slots[static_cast<std::size_t>(idx)] = env.find((*vars_)[static_cast<std::size_t>(idx)])->second.real();
  return {eval(std::span<const double>(slots)), false};
}

Expr Expr::differentiate(std::string_view var) const {
  const int idx = index_of(var);
  if (idx < 0) throw UndeclaredVariable(std::string(var));
  return Expr(vars_, derive(root_, idx));
}

bool Expr::depends_on(std::string_view var) const {
  const int idx = index_of(var);
  return idx >= 0 && depends(root_, idx);
}

bool Expr::uses_complex() const { return any_complex(root_); }

bool Expr::is_constant() const {
  std::set<int> used;
  collect_vars(root_, used);
  return used.empty();
}

bool Expr::is_zero() const { return is_num(root_, 0.0); }

std::string Expr::str() const { return render(*root_, *vars_); }

std::string print(const Expr& e) { return e.str(); }

namespace {

NodePtr rewrite(const NodePtr& n, std::span<const Expr> inner, int eps_outer, int eps_inner) {
  if (n->op == Op::Var) {
    if (n->var == eps_outer) return leaf_var(eps_inner);
    return inner[static_cast<std::size_t>(n->var)].root();
  }
  if (!n->lhs) return n;
  NodePtr a = rewrite(n->lhs, inner, eps_outer, eps_inner);
  if (!n->rhs) return raw_unary(n->op, std::move(a));
  return raw_binary(n->op, std::move(a), rewrite(n->rhs, inner, eps_outer, eps_inner));
}

}  // namespace

Expr combine(Op op, const Expr& a, const Expr& b) {
  if (a.variables() != b.variables()) throw Error("combine: operands must share a variable list");
  NodePtr r;
  switch (op) {
    case Op::Add: r = fold_add(a.root(), b.root()); break;
    case Op::Sub: r = fold_sub(a.root(), b.root()); break;
    case Op::Mul: r = fold_mul(a.root(), b.root()); break;
    case Op::Div: r = fold_div(a.root(), b.root()); break;
    case Op::Pow: r = fold_pow(a.root(), b.root()); break;
    default: throw Error("combine: not a binary operator");
  }
  return Expr(std::make_shared<const std::vector<std::string>>(a.variables()), std::move(r));
}

Expr compose(const Expr& outer, std::span<const Expr> inner) {
  const auto& ov = outer.variables();
  if (ov.size() != inner.size() + 1 || ov.back() != "eps")
    throw Error("compose: outer expression must take one argument per inner expression plus eps");
  if (inner.empty()) return outer;
  const auto& iv = inner[0].variables();
  for (const auto& e : inner)
    if (e.variables() != iv) throw Error("compose: inner expressions must share a variable list");
  const int eps_inner = inner[0].index_of("eps");
  auto vars = std::make_shared<const std::vector<std::string>>(iv);
  return Expr(std::move(vars), rewrite(outer.root(), inner, static_cast<int>(ov.size() - 1), eps_inner));
}

Expr parse(std::string_view text, std::vector<std::string> vars) {
  for (const auto& v : vars) {
    if (v.empty() || v[0] < 'a' || v[0] > 'z' || v == "i" || v == "pi")
      throw InputError("invalid variable name '" + v + "'");
    Op op{};
    if (lookup_function(v, op)) throw InputError("variable name '" + v + "' shadows a function");
  }
  if (std::find(vars.begin(), vars.end(), "eps") == vars.end()) vars.emplace_back("eps");
  bool blank = true;
  for (char c : text) blank = blank && std::isspace(static_cast<unsigned char>(c));
  if (blank) throw SyntaxError("empty expression", 1);
  auto shared = std::make_shared<const std::vector<std::string>>(std::move(vars));
  NodePtr root = Parser(text, *shared).run();
  return Expr(std::move(shared), std::move(root));
}

}  // namespace mcalc
