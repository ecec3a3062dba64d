#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dpfb/ast.hpp"

namespace dpfb {

/// Parse and type-check mini-C source. Throws Error{SyntaxError, TypeError,
/// UnsupportedConstruct} with line/column.
Program parse(std::string_view source);

/// Parse a standalone expression (input-constraint lines, tests).
ExprPtr parse_expression(std::string_view text);

/// Declared type of a variable visible inside a function.
struct VarInfo {
  ScalarType type = ScalarType::Int;
  std::vector<ExprPtr> dims;  // empty for scalars
  bool is_param = false;
  bool is_global = false;

  std::size_t rank() const { return dims.size(); }
  bool is_array() const { return !dims.empty(); }
};

using SymbolTable = std::map<std::string, VarInfo>;

/// Flat symbol table of a function: globals, parameters, then locals. The
/// first declaration of a name wins (redeclarations must agree on type and rank).
SymbolTable symbols_of(const Program& p, const FunctionDef& f);

/// Re-run type checking on a (rewritten) program. Throws like parse().
void typecheck(const Program& p);

/// True when the expression has boolean type under C-like typing rules.
bool is_boolean_expr(const ExprPtr& e, const SymbolTable& symbols);

}  // namespace dpfb
