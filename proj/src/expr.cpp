#include "fastdiff/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <unordered_map>

#include "fastdiff/error.hpp"

namespace fastdiff {

namespace {

const std::string kNoName;
const std::shared_ptr<const UnaryFunction> kNoFunction;

bool is_unary_function(Op op) {
  switch (op) {
    case Op::Exp:
    case Op::Ln:
    case Op::Sin:
    case Op::Cos:
    case Op::Tan:
    case Op::Sinh:
    case Op::Cosh:
    case Op::Tanh:
    case Op::Coth:
    case Op::Sec:
    case Op::Sech:
    case Op::Acos:
    case Op::Asin:
    case Op::Sqrt:
    case Op::Abs:
      return true;
    default:
      return false;
  }
}

double apply_elementary(Op op, double a) {
  switch (op) {
    case Op::Exp: return std::exp(a);
    case Op::Ln: return std::log(a);
    case Op::Sin: return std::sin(a);
    case Op::Cos: return std::cos(a);
    case Op::Tan: return std::tan(a);
    case Op::Sinh: return std::sinh(a);
    case Op::Cosh: return std::cosh(a);
    case Op::Tanh: return std::tanh(a);
    case Op::Coth: return 1.0 / std::tanh(a);
    case Op::Sec: return 1.0 / std::cos(a);
    case Op::Sech: return 1.0 / std::cosh(a);
    case Op::Acos: return std::acos(a);
    case Op::Asin: return std::asin(a);
    case Op::Sqrt: return std::sqrt(a);
    case Op::Abs: return std::fabs(a);
    default: return std::nan("");
  }
}

Expr make_binary(Op op, const Expr& a, const Expr& b) {
  ExprNode n;
  n.op = op;
  n.children = {a, b};
  return Expr::make(std::move(n));
}

Expr make_unary(Op op, const Expr& a) {
  if (a.is_constant() && op != Op::Ln) {
    const double v = apply_elementary(op, a.constant_value());
    if (std::isfinite(v)) return Expr(v);
  }
  if (a.is_constant() && op == Op::Ln && a.constant_value() > 0.0) {
    return Expr(std::log(a.constant_value()));
  }
  ExprNode n;
  n.op = op;
  n.children = {a};
  return Expr::make(std::move(n));
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string_view op_name(Op op) {
  switch (op) {
    case Op::Constant: return "const";
    case Op::Variable: return "var";
    case Op::Add: return "add";
    case Op::Mul: return "mul";
    case Op::Div: return "div";
    case Op::Pow: return "pow";
    case Op::Neg: return "neg";
    case Op::Exp: return "exp";
    case Op::Ln: return "ln";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Tan: return "tan";
    case Op::Sinh: return "sinh";
    case Op::Cosh: return "cosh";
    case Op::Tanh: return "tanh";
    case Op::Coth: return "coth";
    case Op::Sec: return "sec";
    case Op::Sech: return "sech";
    case Op::Acos: return "acos";
    case Op::Asin: return "asin";
    case Op::Sqrt: return "sqrt";
    case Op::Abs: return "abs";
    case Op::Apply: return "apply";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Expr

Expr::Expr() : Expr(0.0) {}

Expr::Expr(double constant) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Constant;
  n->value = constant;
  node_ = std::move(n);
}

Expr Expr::variable(std::string name) {
  ExprNode n;
  n.op = Op::Variable;
  n.name = std::move(name);
  return make(std::move(n));
}

Expr Expr::make(ExprNode node) {
  return Expr(std::make_shared<const ExprNode>(std::move(node)));
}

Op Expr::op() const noexcept { return node_->op; }
double Expr::constant_value() const noexcept { return node_->value; }
const std::string& Expr::name() const noexcept {
  return node_->op == Op::Variable || node_->op == Op::Apply ? node_->name : kNoName;
}
const std::vector<Expr>& Expr::children() const noexcept { return node_->children; }
const std::shared_ptr<const UnaryFunction>& Expr::function() const noexcept {
  return node_->op == Op::Apply ? node_->fn : kNoFunction;
}
int Expr::order() const noexcept { return node_->order; }
bool Expr::is_constant() const noexcept { return node_->op == Op::Constant; }
bool Expr::is_constant(double v) const noexcept {
  return node_->op == Op::Constant && node_->value == v;
}

// ---------------------------------------------------------------------------
// Builders. Folding is limited to identities that hold at every point where
// the unsimplified tree is defined.

Expr var(std::string name) { return Expr::variable(std::move(name)); }
Expr constant(double c) { return Expr(c); }

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr(a.constant_value() + b.constant_value());
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  return make_binary(Op::Add, a, b);
}

Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr(-a.constant_value());
  if (a.op() == Op::Neg) return a.children()[0];
  ExprNode n;
  n.op = Op::Neg;
  n.children = {a};
  return Expr::make(std::move(n));
}

Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr(a.constant_value() - b.constant_value());
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return -b;
  return a + (-b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr(a.constant_value() * b.constant_value());
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr(0.0);
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(-1.0)) return -b;
  if (b.is_constant(-1.0)) return -a;
  return make_binary(Op::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant() && b.constant_value() != 0.0) {
    return Expr(a.constant_value() / b.constant_value());
  }
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(0.0) && !b.is_constant(0.0)) return Expr(0.0);
  return make_binary(Op::Div, a, b);
}

Expr operator+(const Expr& a, double b) { return a + Expr(b); }
Expr operator+(double a, const Expr& b) { return Expr(a) + b; }
Expr operator-(const Expr& a, double b) { return a - Expr(b); }
Expr operator-(double a, const Expr& b) { return Expr(a) - b; }
Expr operator*(const Expr& a, double b) { return a * Expr(b); }
Expr operator*(double a, const Expr& b) { return Expr(a) * b; }
Expr operator/(const Expr& a, double b) { return a / Expr(b); }
Expr operator/(double a, const Expr& b) { return Expr(a) / b; }

Expr pow(const Expr& base, const Expr& exponent) {
  if (exponent.is_constant(1.0)) return base;
  if (exponent.is_constant(0.0)) return Expr(1.0);
  if (base.is_constant() && exponent.is_constant()) {
    const double v = std::pow(base.constant_value(), exponent.constant_value());
    if (std::isfinite(v)) return Expr(v);
  }
  return make_binary(Op::Pow, base, exponent);
}

Expr pow(const Expr& base, double exponent) { return pow(base, Expr(exponent)); }
Expr square(const Expr& e) { return pow(e, 2.0); }
Expr exp(const Expr& e) { return make_unary(Op::Exp, e); }
Expr ln(const Expr& e) { return make_unary(Op::Ln, e); }
Expr sin(const Expr& e) { return make_unary(Op::Sin, e); }
Expr cos(const Expr& e) { return make_unary(Op::Cos, e); }
Expr tan(const Expr& e) { return make_unary(Op::Tan, e); }
Expr sinh(const Expr& e) { return make_unary(Op::Sinh, e); }
Expr cosh(const Expr& e) { return make_unary(Op::Cosh, e); }
Expr tanh(const Expr& e) { return make_unary(Op::Tanh, e); }
Expr coth(const Expr& e) { return make_unary(Op::Coth, e); }
Expr sec(const Expr& e) { return make_unary(Op::Sec, e); }
Expr sech(const Expr& e) { return make_unary(Op::Sech, e); }
Expr acos(const Expr& e) { return make_unary(Op::Acos, e); }
Expr asin(const Expr& e) { return make_unary(Op::Asin, e); }
Expr sqrt(const Expr& e) { return make_unary(Op::Sqrt, e); }
Expr abs(const Expr& e) { return make_unary(Op::Abs, e); }

Expr apply(std::shared_ptr<const UnaryFunction> fn, const Expr& arg, int order) {
  if (!fn) throw UsageError("apply: null function");
  if (order < 0 || order > fn->max_order()) {
    throw UsageError("apply: derivative order " + std::to_string(order) +
                     " exceeds the order available for " + fn->name());
  }
  ExprNode n;
  n.op = Op::Apply;
  n.name = fn->name();
  n.fn = std::move(fn);
  n.order = order;
  n.children = {arg};
  return Expr::make(std::move(n));
}

// ---------------------------------------------------------------------------
// Differentiation

namespace {

class Differentiator {
 public:
  explicit Differentiator(std::string_view var) : var_(var) {}

  Expr operator()(const Expr& e) {
    if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
    Expr d = rule(e);
    memo_.emplace(e.id(), d);
    return d;
  }

 private:
  Expr rule(const Expr& e) {
    const auto& c = e.children();
    switch (e.op()) {
      case Op::Constant:
        return Expr(0.0);
      case Op::Variable:
        return Expr(e.name() == var_ ? 1.0 : 0.0);
      case Op::Add:
        return (*this)(c[0]) + (*this)(c[1]);
      case Op::Neg:
        return -(*this)(c[0]);
      case Op::Mul:
        return (*this)(c[0]) * c[1] + c[0] * (*this)(c[1]);
      case Op::Div: {
        const Expr da = (*this)(c[0]);
        const Expr db = (*this)(c[1]);
        return da / c[1] - c[0] * db / square(c[1]);
      }
      case Op::Pow: {
        const Expr& base = c[0];
        const Expr& ex = c[1];
        const Expr db = (*this)(base);
        const Expr de = (*this)(ex);
        if (de.is_constant(0.0)) {
          if (db.is_constant(0.0)) return Expr(0.0);
          return ex * pow(base, ex - 1.0) * db;
        }
        if (db.is_constant(0.0)) return e * ln(base) * de;
        return e * (de * ln(base) + ex * db / base);
      }
      default:
        break;
    }
    const Expr& a = c[0];
    const Expr da = (*this)(a);
    if (da.is_constant(0.0)) return Expr(0.0);
    switch (e.op()) {
      case Op::Exp: return e * da;
      case Op::Ln: return da / a;
      case Op::Sin: return cos(a) * da;
      case Op::Cos: return -(sin(a) * da);
      case Op::Tan: return square(sec(a)) * da;
      case Op::Sinh: return cosh(a) * da;
      case Op::Cosh: return sinh(a) * da;
      case Op::Tanh: return square(sech(a)) * da;
      case Op::Coth: return (1.0 - square(e)) * da;
      case Op::Sec: return e * tan(a) * da;
      case Op::Sech: return -(e * tanh(a) * da);
      case Op::Acos: return -(da / sqrt(1.0 - square(a)));
      case Op::Asin: return da / sqrt(1.0 - square(a));
      case Op::Sqrt: return da / (2.0 * e);
      case Op::Abs: return a / e * da;
      case Op::Apply: return apply(e.function(), a, e.order() + 1) * da;
      default: break;
    }
    throw UsageError("differentiate: malformed expression");
  }

  std::string_view var_;
  std::unordered_map<const ExprNode*, Expr> memo_;
};

}  // namespace

Expr differentiate(const Expr& e, std::string_view var) {
  Differentiator d(var);
  return d(e);
}

// ---------------------------------------------------------------------------
// Substitution and inspection

namespace {

Expr rebuild(const Expr& e, std::vector<Expr> kids) {
  switch (e.op()) {
    case Op::Add: return kids[0] + kids[1];
    case Op::Mul: return kids[0] * kids[1];
    case Op::Div: return kids[0] / kids[1];
    case Op::Pow: return pow(kids[0], kids[1]);
    case Op::Neg: return -kids[0];
    case Op::Apply: return apply(e.function(), kids[0], e.order());
    default: return make_unary(e.op(), kids[0]);
  }
}

Expr substitute_impl(const Expr& e, const Substitution& s,
                     std::unordered_map<const ExprNode*, Expr>& memo) {
  if (auto it = memo.find(e.id()); it != memo.end()) return it->second;
  Expr out = e;
  if (e.op() == Op::Variable) {
    if (auto it = s.find(e.name()); it != s.end()) out = it->second;
  } else if (!e.children().empty()) {
    std::vector<Expr> kids;
    kids.reserve(e.children().size());
    bool changed = false;
    for (const auto& c : e.children()) {
      kids.push_back(substitute_impl(c, s, memo));
      changed = changed || kids.back().id() != c.id();
    }
    if (changed) out = rebuild(e, std::move(kids));
  }
  memo.emplace(e.id(), out);
  return out;
}

template <typename Visit>
void walk_unique(const Expr& e, std::unordered_map<const ExprNode*, bool>& seen, Visit& visit) {
  if (!seen.emplace(e.id(), true).second) return;
  visit(e);
  for (const auto& c : e.children()) walk_unique(c, seen, visit);
}

}  // namespace

Expr substitute(const Expr& e, const Substitution& s) {
  std::unordered_map<const ExprNode*, Expr> memo;
  return substitute_impl(e, s, memo);
}

std::set<std::string> free_variables(const Expr& e) {
  std::set<std::string> out;
  std::unordered_map<const ExprNode*, bool> seen;
  auto visit = [&](const Expr& n) {
    if (n.op() == Op::Variable) out.insert(n.name());
  };
  walk_unique(e, seen, visit);
  return out;
}

std::size_t node_count(const Expr& e) {
  std::size_t n = 0;
  std::unordered_map<const ExprNode*, bool> seen;
  auto visit = [&](const Expr&) { ++n; };
  walk_unique(e, seen, visit);
  return n;
}

double eval(const Expr& e, const Point& point) { return CompiledExpr(e)(point); }

// ---------------------------------------------------------------------------
// S-expressions

namespace {

void write_sexpr(const Expr& e, std::string& out) {
  switch (e.op()) {
    case Op::Constant:
      out += format_double(e.constant_value());
      return;
    case Op::Variable:
      out += "(var ";
      out += e.name();
      out += ')';
      return;
    case Op::Apply:
      out += "(apply ";
      out += e.name();
      out += ' ';
      out += std::to_string(e.order());
      out += ' ';
      write_sexpr(e.children()[0], out);
      out += ')';
      return;
    default:
      break;
  }
  out += '(';
  out += op_name(e.op());
  for (const auto& c : e.children()) {
    out += ' ';
    write_sexpr(c, out);
  }
  out += ')';
}

class SexprParser {
 public:
  explicit SexprParser(std::string_view text) : text_(text) {}

  Expr parse() {
    Expr e = parse_expr();
    skip_space();
    if (pos_ != text_.size()) error("trailing input");
    return e;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    throw ParseError("s-expression: " + what + " at offset " + std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string_view atom() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    if (start == pos_) error("expected atom");
    return text_.substr(start, pos_ - start);
  }

  void expect(char c) {
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != c) error(std::string("expected '") + c + "'");
    ++pos_;
  }

  static bool parse_number(std::string_view s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
  }

  Expr parse_expr() {
    skip_space();
    if (pos_ >= text_.size()) error("unexpected end of input");
    if (text_[pos_] != '(') {
      const std::string_view a = atom();
      double v = 0.0;
      if (!parse_number(a, v)) error("bad number '" + std::string(a) + "'");
      return Expr(v);
    }
    ++pos_;
    const std::string head(atom());
    if (head == "var") {
      const std::string name(atom());
      expect(')');
      return var(name);
    }
    if (head == "const") {
      const std::string_view a = atom();
      double v = 0.0;
      if (!parse_number(a, v)) error("bad number '" + std::string(a) + "'");
      expect(')');
      return Expr(v);
    }
    if (head == "apply") {
      error("opaque function '" + std::string(atom()) + "' cannot be reconstructed from text");
    }
    std::vector<Expr> args;
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) error("unterminated list");
      if (text_[pos_] == ')') {
        ++pos_;
        break;
      }
      args.push_back(parse_expr());
    }
    return build(head, std::move(args));
  }

  Expr build(const std::string& head, std::vector<Expr> args) {
    auto arity = [&](std::size_t n) {
      if (args.size() != n) {
        error("'" + head + "' takes " + std::to_string(n) + " operand(s), got " +
              std::to_string(args.size()));
      }
    };
    if (head == "add" || head == "mul") {
      if (args.empty()) error("'" + head + "' needs operands");
      Expr acc = args[0];
      for (std::size_t i = 1; i < args.size(); ++i) {
        acc = head == "add" ? acc + args[i] : acc * args[i];
      }
      return acc;
    }
    if (head == "sub") {
      if (args.size() == 1) return -args[0];
      arity(2);
      return args[0] - args[1];
    }
    if (head == "neg") {
      arity(1);
      return -args[0];
    }
    if (head == "div") {
      arity(2);
      return args[0] / args[1];
    }
    if (head == "pow") {
      arity(2);
      return pow(args[0], args[1]);
    }
    static const std::map<std::string, Op, std::less<>> kFunctions = {
        {"exp", Op::Exp},   {"ln", Op::Ln},     {"sin", Op::Sin},   {"cos", Op::Cos},
        {"tan", Op::Tan},   {"sinh", Op::Sinh}, {"cosh", Op::Cosh}, {"tanh", Op::Tanh},
        {"coth", Op::Coth}, {"sec", Op::Sec},   {"sech", Op::Sech}, {"acos", Op::Acos},
        {"asin", Op::Asin}, {"sqrt", Op::Sqrt}, {"abs", Op::Abs},
    };
    auto it = kFunctions.find(head);
    if (it == kFunctions.end()) error("unknown operator '" + head + "'");
    arity(1);
    return make_unary(it->second, args[0]);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string to_sexpr(const Expr& e) {
  std::string out;
  write_sexpr(e, out);
  return out;
}

Expr parse_sexpr(std::string_view text) { return SexprParser(text).parse(); }

// ---------------------------------------------------------------------------
// CompiledExpr

namespace {

struct InstrKey {
  Op op;
  std::uint64_t value_bits;
  std::uint32_t a, b;
  int order;
  const void* fn;
  std::string name;

  bool operator==(const InstrKey&) const = default;
};

struct InstrKeyHash {
  std::size_t operator()(const InstrKey& k) const noexcept {
    std::size_t h = std::hash<std::uint64_t>{}(k.value_bits);
    auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    mix(static_cast<std::size_t>(k.op));
    mix(k.a);
    mix(k.b);
    mix(static_cast<std::size_t>(k.order));
    mix(std::hash<const void*>{}(k.fn));
    mix(std::hash<std::string>{}(k.name));
    return h;
  }
};

}  // namespace

CompiledExpr::CompiledExpr(const Expr& e) : root_(e) {
  std::unordered_map<const ExprNode*, std::uint32_t> by_node;
  std::unordered_map<InstrKey, std::uint32_t, InstrKeyHash> by_key;
  std::map<std::string, std::uint32_t, std::less<>> slots;

  // Iterative post-order so deep derivative trees cannot exhaust the stack.
  struct Frame {
    const Expr* expr;
    std::size_t next_child;
  };
  std::vector<Frame> stack{{&root_, 0}};
  while (!stack.empty()) {
    Frame& f = stack.back();
    const Expr& cur = *f.expr;
    if (by_node.count(cur.id())) {
      stack.pop_back();
      continue;
    }
    if (f.next_child < cur.children().size()) {
      const Expr* child = &cur.children()[f.next_child++];
      if (!by_node.count(child->id())) stack.push_back({child, 0});
      continue;
    }
    Instr ins;
    ins.op = cur.op();
    ins.source = cur.id();
    InstrKey key{cur.op(), 0, 0, 0, cur.order(), nullptr, {}};
    if (cur.op() == Op::Constant) {
      ins.value = cur.constant_value();
      std::memcpy(&key.value_bits, &ins.value, sizeof ins.value);
    } else if (cur.op() == Op::Variable) {
      auto [it, inserted] = slots.emplace(cur.name(), static_cast<std::uint32_t>(vars_.size()));
      if (inserted) vars_.push_back(cur.name());
      ins.a = it->second;
      key.a = ins.a;
      key.name = cur.name();
    } else {
      ins.a = by_node.at(cur.children()[0].id());
      if (cur.children().size() > 1) ins.b = by_node.at(cur.children()[1].id());
      ins.order = cur.order();
      ins.fn = cur.function().get();
      key.a = ins.a;
      key.b = ins.b;
      key.fn = ins.fn;
    }
    auto [it, inserted] = by_key.emplace(std::move(key), static_cast<std::uint32_t>(code_.size()));
    if (inserted) code_.push_back(ins);
    by_node.emplace(cur.id(), it->second);
    stack.pop_back();
  }
  root_index_ = by_node.at(root_.id());
}

void CompiledExpr::fail(const Instr& ins, const char* what) const {
  std::string sub = to_sexpr(Expr::make(*ins.source));
  if (sub.size() > 240) sub = sub.substr(0, 237) + "...";
  throw SingularEvaluation(what, std::move(sub));
}

double CompiledExpr::operator()(const Point& point) const {
  std::vector<double> slots(vars_.size());
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    auto it = point.find(vars_[i]);
    if (it == point.end()) throw UsageError("unbound variable '" + vars_[i] + "'");
    slots[i] = it->second;
  }
  return evaluate(slots);
}

double CompiledExpr::evaluate(std::span<const double> slots) const {
  if (slots.size() < vars_.size()) throw UsageError("evaluate: too few variable values");
  std::vector<double> r(code_.size());
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& ins = code_[i];
    double v = 0.0;
    switch (ins.op) {
      case Op::Constant: v = ins.value; break;
      case Op::Variable: v = slots[ins.a]; break;
      case Op::Add: v = r[ins.a] + r[ins.b]; break;
      case Op::Mul: v = r[ins.a] * r[ins.b]; break;
      case Op::Div:
        if (r[ins.b] == 0.0) fail(ins, "division by zero");
        v = r[ins.a] / r[ins.b];
        break;
      case Op::Pow: v = std::pow(r[ins.a], r[ins.b]); break;
      case Op::Neg: v = -r[ins.a]; break;
      case Op::Ln:
        if (!(r[ins.a] > 0.0)) fail(ins, "logarithm of a non-positive value");
        v = std::log(r[ins.a]);
        break;
      case Op::Coth:
        if (r[ins.a] == 0.0) fail(ins, "pole of coth");
        v = 1.0 / std::tanh(r[ins.a]);
        break;
      case Op::Sec: {
        const double c = std::cos(r[ins.a]);
        if (c == 0.0) fail(ins, "pole of sec");
        v = 1.0 / c;
        break;
      }
      case Op::Acos:
      case Op::Asin:
        if (std::fabs(r[ins.a]) > 1.0) fail(ins, "argument outside [-1, 1]");
        v = apply_elementary(ins.op, r[ins.a]);
        break;
      case Op::Sqrt:
        if (r[ins.a] < 0.0) fail(ins, "square root of a negative value");
        v = std::sqrt(r[ins.a]);
        break;
      case Op::Apply: v = ins.fn->evaluate(ins.order, r[ins.a]); break;
      default:
        if (!is_unary_function(ins.op)) fail(ins, "malformed node");
        v = apply_elementary(ins.op, r[ins.a]);
        break;
    }
    if (!std::isfinite(v)) fail(ins, "non-finite value");
    r[i] = v;
  }
  return r[root_index_];
}

}  // namespace fastdiff
