#include "fastdiff/field.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "fastdiff/error.hpp"

namespace fastdiff {

// ---------------------------------------------------------------------------
// SingularSet

SingularSet& SingularSet::add(std::string description, Predicate inside) {
  components_.push_back({std::move(description), std::move(inside)});
  return *this;
}

SingularSet& SingularSet::add_band(std::string description, const Expr& g, double scale) {
  auto compiled = std::make_shared<const CompiledExpr>(g);
  return add(std::move(description), [compiled, scale](const Point& p, double margin) {
    try {
      return std::fabs((*compiled)(p)) <= margin * scale;
    } catch (const SingularEvaluation&) {
      return true;
    }
  });
}

SingularSet& SingularSet::add_below(std::string description, const Expr& g) {
  auto compiled = std::make_shared<const CompiledExpr>(g);
  return add(std::move(description), [compiled](const Point& p, double margin) {
    try {
      return (*compiled)(p) <= margin;
    } catch (const SingularEvaluation&) {
      return true;
    }
  });
}

SingularSet& SingularSet::merge(const SingularSet& other) {
  components_.insert(components_.end(), other.components_.begin(), other.components_.end());
  return *this;
}

SingularSet SingularSet::pullback(const Substitution& coordinates,
                                  const std::string& prefix) const {
  if (components_.empty()) return {};
  using Map = std::vector<std::pair<std::string, std::shared_ptr<const CompiledExpr>>>;
  auto map = std::make_shared<Map>();
  for (const auto& [name, e] : coordinates) {
    map->emplace_back(name, std::make_shared<const CompiledExpr>(e));
  }
  SingularSet out;
  for (const auto& c : components_) {
    out.add(prefix.empty() ? c.description : prefix + ": " + c.description,
            [map, inside = c.inside](const Point& p, double margin) {
              Point source = p;
              try {
                for (const auto& [name, e] : *map) source[name] = (*e)(p);
              } catch (const SingularEvaluation&) {
                return true;
              }
              return inside(source, margin);
            });
  }
  return out;
}

bool SingularSet::contains(const Point& p, double margin) const {
  return std::any_of(components_.begin(), components_.end(),
                     [&](const Component& c) { return c.inside(p, margin); });
}

std::string SingularSet::describe() const {
  std::string out;
  for (const auto& c : components_) {
    if (!out.empty()) out += "; ";
    out += c.description;
  }
  return out.empty() ? "none" : out;
}

// ---------------------------------------------------------------------------
// Field

struct Field::Cache {
  struct Slot {
    Expr expr;
    std::unique_ptr<CompiledExpr> compiled;
  };
  std::mutex mutex;
  std::map<std::vector<std::string>, Slot> slots;
};

Field::Field(Expr value, std::vector<std::string> signature, SingularSet singular)
    : value_(std::move(value)),
      signature_(std::move(signature)),
      singular_(std::move(singular)),
      cache_(std::make_shared<Cache>()) {
  for (const auto& v : free_variables(value_)) {
    if (std::find(signature_.begin(), signature_.end(), v) == signature_.end()) {
      throw UsageError("field depends on '" + v + "' which is not in its signature");
    }
  }
}

Expr Field::partial(std::vector<std::string> vars) const {
  std::sort(vars.begin(), vars.end());
  std::lock_guard lock(cache_->mutex);
  // Build the chain of lower-order partials so each level is reused.
  Expr current = value_;
  std::vector<std::string> prefix;
  for (const auto& v : vars) {
    prefix.push_back(v);
    auto it = cache_->slots.find(prefix);
    if (it == cache_->slots.end()) {
      current = differentiate(current, v);
      cache_->slots.emplace(prefix, Cache::Slot{current, nullptr});
    } else {
      current = it->second.expr;
    }
  }
  return current;
}

const CompiledExpr& Field::compiled(std::vector<std::string> vars) const {
  std::sort(vars.begin(), vars.end());
  Expr e = vars.empty() ? value_ : partial(vars);
  std::lock_guard lock(cache_->mutex);
  auto& slot = cache_->slots[vars];
  if (vars.empty()) slot.expr = value_;
  if (!slot.compiled) slot.compiled = std::make_unique<CompiledExpr>(e);
  return *slot.compiled;
}

double Field::value(const Point& p) const { return compiled({})(p); }

double Field::derivative(std::vector<std::string> vars, const Point& p) const {
  return compiled(std::move(vars))(p);
}

Field Field::with_singular_set(SingularSet singular) const {
  return Field(value_, signature_, std::move(singular));
}

Field Field::substitute(const Substitution& s, std::vector<std::string> new_signature,
                        const std::string& prefix) const {
  return Field(fastdiff::substitute(value_, s), std::move(new_signature),
               singular_.pullback(s, prefix));
}

Field Field::rename(const std::map<std::string, std::string>& names) const {
  Substitution s;
  std::vector<std::string> sig = signature_;
  for (auto& v : sig) {
    if (auto it = names.find(v); it != names.end()) {
      s.emplace(v, var(it->second));
      v = it->second;
    }
  }
  return substitute(s, std::move(sig), "");
}

}  // namespace fastdiff
