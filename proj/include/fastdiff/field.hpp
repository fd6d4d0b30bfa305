#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fastdiff/expr.hpp"

namespace fastdiff {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const noexcept { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

/// Axis-aligned sampling box keyed by variable name.
using Box = std::map<std::string, Interval, std::less<>>;

/// Union of labelled predicates marking points where a field or its
/// derivatives are undefined. Each predicate receives a margin that widens
/// the excluded band.
class SingularSet {
 public:
  using Predicate = std::function<bool(const Point&, double margin)>;

  struct Component {
    std::string description;
    Predicate inside;
  };

  SingularSet() = default;

  SingularSet& add(std::string description, Predicate inside);

  /// |g(p)| <= margin * scale, or g cannot be evaluated at p.
  SingularSet& add_band(std::string description, const Expr& g, double scale = 1.0);

  /// g(p) <= margin, or g cannot be evaluated at p.
  SingularSet& add_below(std::string description, const Expr& g);

  SingularSet& merge(const SingularSet& other);

  /// Components re-expressed in new coordinates: a point p is inside the
  /// result when (p with each substituted variable replaced by its
  /// expression evaluated at p) is inside this set.
  SingularSet pullback(const Substitution& coordinates, const std::string& prefix) const;

  bool contains(const Point& p, double margin) const;
  bool empty() const noexcept { return components_.empty(); }
  const std::vector<Component>& components() const noexcept { return components_; }

  /// Semicolon-joined component descriptions.
  std::string describe() const;

 private:
  std::vector<Component> components_;
};

/// Scalar field over a declared variable signature, with cached exact
/// partial derivatives.
class Field {
 public:
  Field() : Field(Expr(0.0), {}) {}
  Field(Expr value, std::vector<std::string> signature, SingularSet singular = {});

  const Expr& expr() const noexcept { return value_; }
  const std::vector<std::string>& signature() const noexcept { return signature_; }
  const SingularSet& singular_set() const noexcept { return singular_; }

  /// Mixed partial with respect to the listed variables (order irrelevant).
  Expr partial(std::vector<std::string> vars) const;

  double value(const Point& p) const;
  double derivative(std::vector<std::string> vars, const Point& p) const;

  Field with_singular_set(SingularSet singular) const;

  /// Substitutes expressions for variables; the singular set is pulled back.
  Field substitute(const Substitution& s, std::vector<std::string> new_signature,
                   const std::string& prefix) const;

  /// Renames signature variables, e.g. {x -> xi, y -> eta}.
  Field rename(const std::map<std::string, std::string>& names) const;

 private:
  struct Cache;

  const CompiledExpr& compiled(std::vector<std::string> vars) const;

  Expr value_;
  std::vector<std::string> signature_;
  SingularSet singular_;
  std::shared_ptr<Cache> cache_;
};

}  // namespace fastdiff
