#pragma once

#include <string>

#include "dpfb/ast.hpp"

namespace dpfb {

/// C-syntax rendering with minimal parentheses. Output reparses to an equal AST.
std::string render(const ExprPtr& e);
std::string render(const StmtPtr& s, int indent = 0);
std::string render(const StmtList& body, int indent = 0);
std::string render(const FunctionDef& f);
std::string render(const Program& p);

/// Single-line rendering of a statement header (`for (i = 0; i < n; i = i + 1)`).
std::string render_header(const Stmt& s);
/// Declaration type text (`int[n][n]`).
std::string render_type(ScalarType t, const std::vector<ExprPtr>& dims);

/// Structural equality of programs, locations and notes ignored.
bool same_program(const Program& a, const Program& b);

}  // namespace dpfb
