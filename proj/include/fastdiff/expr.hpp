#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fastdiff {

/// Named variable bindings for pointwise evaluation.
using Point = std::map<std::string, double, std::less<>>;

enum class Op : std::uint8_t {
  Constant,
  Variable,
  Add,
  Mul,
  Div,
  Pow,
  Neg,
  Exp,
  Ln,
  Sin,
  Cos,
  Tan,
  Sinh,
  Cosh,
  Tanh,
  Coth,
  Sec,
  Sech,
  Acos,
  Asin,
  Sqrt,
  Abs,
  Apply,
};

std::string_view op_name(Op op);

/// Opaque univariate function with derivatives up to max_order(), e.g. a
/// tabulated ODE trajectory composed into a field.
class UnaryFunction {
 public:
  virtual ~UnaryFunction() = default;
  virtual std::string name() const = 0;
  virtual int max_order() const = 0;
  virtual double evaluate(int order, double x) const = 0;
};

struct ExprNode;

/// Immutable scalar expression tree. Copies share structure.
class Expr {
 public:
  Expr();
  explicit Expr(double constant);

  static Expr variable(std::string name);

  Op op() const noexcept;
  double constant_value() const noexcept;
  const std::string& name() const noexcept;
  const std::vector<Expr>& children() const noexcept;
  const std::shared_ptr<const UnaryFunction>& function() const noexcept;
  int order() const noexcept;

  bool is_constant() const noexcept;
  bool is_constant(double v) const noexcept;

  /// Node identity; equal ids imply equal trees.
  const ExprNode* id() const noexcept { return node_.get(); }

  static Expr make(ExprNode node);

 private:
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const ExprNode> node_;
};

struct ExprNode {
  Op op = Op::Constant;
  double value = 0.0;
  std::string name;
  std::vector<Expr> children;
  std::shared_ptr<const UnaryFunction> fn;
  int order = 0;
};

Expr var(std::string name);
Expr constant(double c);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

Expr operator+(const Expr& a, double b);
Expr operator+(double a, const Expr& b);
Expr operator-(const Expr& a, double b);
Expr operator-(double a, const Expr& b);
Expr operator*(const Expr& a, double b);
Expr operator*(double a, const Expr& b);
Expr operator/(const Expr& a, double b);
Expr operator/(double a, const Expr& b);

Expr pow(const Expr& base, const Expr& exponent);
Expr pow(const Expr& base, double exponent);
Expr square(const Expr& e);
Expr exp(const Expr& e);
Expr ln(const Expr& e);
Expr sin(const Expr& e);
Expr cos(const Expr& e);
Expr tan(const Expr& e);
Expr sinh(const Expr& e);
Expr cosh(const Expr& e);
Expr tanh(const Expr& e);
Expr coth(const Expr& e);
Expr sec(const Expr& e);
Expr sech(const Expr& e);
Expr acos(const Expr& e);
Expr asin(const Expr& e);
Expr sqrt(const Expr& e);
Expr abs(const Expr& e);
Expr apply(std::shared_ptr<const UnaryFunction> fn, const Expr& arg, int order = 0);

/// Exact rule-based derivative. Constant folding keeps results compact.
Expr differentiate(const Expr& e, std::string_view var);

using Substitution = std::map<std::string, Expr, std::less<>>;

/// Replaces variables by expressions, sharing untouched subtrees.
Expr substitute(const Expr& e, const Substitution& s);

std::set<std::string> free_variables(const Expr& e);

/// Number of distinct nodes reachable from e.
std::size_t node_count(const Expr& e);

/// Evaluates e; throws SingularEvaluation or UsageError (unbound variable).
double eval(const Expr& e, const Point& point);

std::string to_sexpr(const Expr& e);

/// Parses the prefix form written by to_sexpr. `add` and `mul` accept any
/// number of operands, `sub` one or two.
Expr parse_sexpr(std::string_view text);

/// Flattened evaluation tape with structurally equal subtrees merged.
class CompiledExpr {
 public:
  explicit CompiledExpr(const Expr& e);

  double operator()(const Point& point) const;

  /// Values ordered as variables().
  double evaluate(std::span<const double> slots) const;

  const std::vector<std::string>& variables() const noexcept { return vars_; }
  std::size_t size() const noexcept { return code_.size(); }

 private:
  struct Instr {
    Op op;
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    double value = 0.0;
    int order = 0;
    const UnaryFunction* fn = nullptr;
    const ExprNode* source = nullptr;
  };

  [[noreturn]] void fail(const Instr& ins, const char* what) const;

  Expr root_;
  std::vector<Instr> code_;
  std::vector<std::string> vars_;
  std::uint32_t root_index_ = 0;
};

}  // namespace fastdiff
