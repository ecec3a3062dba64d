#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "dpfb/ast.hpp"

namespace dpfb {

using Model = std::map<std::string, std::int64_t>;

/// Evaluate a side-effect-free expression with C semantics (truncating
/// division). Division by zero yields 0, which is also how the SMT encoding
/// totalizes it. Unknown names and calls yield nullopt.
std::optional<std::int64_t> evaluate(const ExprPtr& e,
                                     const std::function<std::optional<std::int64_t>(const Expr&)>& lookup);
std::optional<std::int64_t> evaluate(const ExprPtr& e, const Model& m);

/// Constant folding plus boolean-connective cleanup (flatten, drop neutral
/// elements, push negation into comparisons). Equivalence-preserving.
ExprPtr fold(const ExprPtr& e);

/// Linear form `sum(coeff * atom) + constant` when every non-linear part can
/// be treated as an opaque atom keyed by its rendering.
struct LinearForm {
  std::map<std::string, std::int64_t> terms;  // atom text -> coefficient
  std::map<std::string, ExprPtr> atoms;
  std::int64_t constant = 0;
};

std::optional<LinearForm> linearize(const ExprPtr& e);
/// Canonical rendering of an integer expression via its linear form
/// (`n - 1`, `i + j`); falls back to render() when non-linear.
ExprPtr canonical_int(const ExprPtr& e);

/// Sort operands of + and * by `rank` (ties by rendered text); deterministic.
ExprPtr normalize_commutative(const ExprPtr& e, const std::function<int(const std::string&)>& rank);
ExprPtr normalize_commutative(const ExprPtr& e);

}  // namespace dpfb
