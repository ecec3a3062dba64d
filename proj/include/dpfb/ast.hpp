#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace dpfb {

/// Position of a statement. `ordinal` is unique per program and increases in
/// source order; synthesized statements are renumbered after each rewrite pass.
struct Location {
  int ordinal = 0;
  int line = 0;
  int column = 0;

  friend bool operator==(const Location&, const Location&) = default;
  friend auto operator<=>(const Location& a, const Location& b) { return a.ordinal <=> b.ordinal; }
};

enum class ScalarType { Int, Bool, Void };

enum class BinOp { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne, And, Or, Implies, Iff };
enum class UnOp { Neg, Not, PreInc, PreDec, PostInc, PostDec };

enum class ExprKind { IntLit, BoolLit, Var, Index, Unary, Binary, Ternary, Call };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable expression node. Formulas handed to the solver reuse this type;
/// `Implies`/`Iff` only appear there.
struct Expr {
  ExprKind kind = ExprKind::IntLit;
  std::int64_t value = 0;     // IntLit, BoolLit (0/1)
  std::string name;           // Var, Index (array), Call (callee)
  BinOp bop = BinOp::Add;
  UnOp uop = UnOp::Neg;
  std::vector<ExprPtr> args;  // Index: subscripts; Unary: 1; Binary: 2; Ternary: 3; Call: actuals
  int line = 0;
  int column = 0;
};

namespace ex {
ExprPtr lit(std::int64_t v);
ExprPtr boolean(bool b);
ExprPtr var(std::string name);
ExprPtr index(std::string array, std::vector<ExprPtr> subscripts);
ExprPtr unary(UnOp op, ExprPtr a);
ExprPtr binary(BinOp op, ExprPtr a, ExprPtr b);
ExprPtr ite(ExprPtr c, ExprPtr t, ExprPtr e);
ExprPtr call(std::string callee, std::vector<ExprPtr> args);

ExprPtr conj(ExprPtr a, ExprPtr b);
ExprPtr disj(ExprPtr a, ExprPtr b);
ExprPtr neg(ExprPtr a);
ExprPtr implies(ExprPtr a, ExprPtr b);
ExprPtr iff(ExprPtr a, ExprPtr b);
ExprPtr eq(ExprPtr a, ExprPtr b);
ExprPtr conj_all(const std::vector<ExprPtr>& xs);
ExprPtr disj_all(const std::vector<ExprPtr>& xs);

bool is_true(const ExprPtr& e);
bool is_false(const ExprPtr& e);
}  // namespace ex

bool is_comparison(BinOp op);
bool is_boolean_op(BinOp op);
bool is_lvalue(const Expr& e);

/// Structural equality (positions ignored).
bool same_expr(const ExprPtr& a, const ExprPtr& b);
std::size_t node_count(const ExprPtr& e);

/// Free scalar variable names (array names excluded).
void collect_vars(const ExprPtr& e, std::set<std::string>& out);
/// Array names that occur in subscripted position or as bare array arguments.
void collect_arrays(const ExprPtr& e, std::set<std::string>& out);
/// Every name (scalars, arrays, callees excluded).
std::set<std::string> names_in(const ExprPtr& e);
/// All Index sub-expressions, outermost first.
void collect_accesses(const ExprPtr& e, std::vector<ExprPtr>& out);
bool mentions(const ExprPtr& e, const std::string& name);
bool has_call(const ExprPtr& e);

/// Bottom-up rewrite; `f` returns nullptr to keep the (rebuilt) node.
ExprPtr rewrite(const ExprPtr& e, const std::function<ExprPtr(const ExprPtr&)>& f);
/// Replace scalar variables by expressions.
ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ExprPtr>& m);
/// Rename scalars and arrays through `m` (names absent from `m` are kept).
ExprPtr rename(const ExprPtr& e, const std::map<std::string, std::string>& m);

// ---------------------------------------------------------------------------

enum class StmtKind { Decl, Assign, If, For, While, Read, Write, ExprStmt, Return, Block };
enum class AssignOp { Set, Add, Sub, Mul, Div, Mod, Inc, Dec };

struct VarDecl {
  std::string name;
  ScalarType type = ScalarType::Int;
  std::vector<ExprPtr> dims;  // empty for scalars; a null entry is an unsized `[]`
  ExprPtr init;               // optional initializer
};

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;
using StmtList = std::vector<StmtPtr>;

struct Stmt {
  StmtKind kind = StmtKind::Block;
  Location loc;
  std::vector<VarDecl> decls;      // Decl
  ExprPtr lhs;                     // Assign
  ExprPtr rhs;                     // Assign, Return (optional), ExprStmt
  AssignOp aop = AssignOp::Set;    // Assign
  ExprPtr cond;                    // If, For, While
  StmtList body;                   // If (then), For, While, Block
  StmtList else_body;              // If
  StmtPtr init;                    // For (optional)
  StmtPtr step;                    // For (optional)
  std::string format;              // Read, Write
  std::vector<ExprPtr> args;       // Read: lvalues; Write: values
};

namespace st {
StmtPtr decl(std::vector<VarDecl> decls, Location loc = {});
StmtPtr assign(ExprPtr lhs, ExprPtr rhs, Location loc = {}, AssignOp op = AssignOp::Set);
StmtPtr if_(ExprPtr cond, StmtList then_body, StmtList else_body = {}, Location loc = {});
StmtPtr for_(StmtPtr init, ExprPtr cond, StmtPtr step, StmtList body, Location loc = {});
StmtPtr while_(ExprPtr cond, StmtList body, Location loc = {});
StmtPtr read(ExprPtr lvalue, Location loc = {});
StmtPtr write(std::string format, std::vector<ExprPtr> args, Location loc = {});
StmtPtr expr(ExprPtr e, Location loc = {});
StmtPtr ret(ExprPtr e, Location loc = {});
StmtPtr block(StmtList body, Location loc = {});
}  // namespace st

struct Param {
  std::string name;
  ScalarType type = ScalarType::Int;
  std::vector<ExprPtr> dims;  // array parameter when non-empty; first entry may be null
};

struct FunctionDef {
  std::string name;
  ScalarType return_type = ScalarType::Int;
  std::vector<Param> params;
  StmtList body;
  Location loc;
};

struct Program {
  StmtList globals;  // Decl statements at file scope
  std::vector<FunctionDef> functions;
  std::vector<std::string> notes;  // explanatory notes attached by rewrites

  const FunctionDef* find(const std::string& name) const;
  FunctionDef* find(const std::string& name);
  const FunctionDef& main() const;
  FunctionDef& main();
};

/// Depth-first pre-order traversal over statements (including for init/step).
void for_each_stmt(const StmtList& body, const std::function<void(const StmtPtr&)>& f);
void for_each_stmt(const Program& p, const std::function<void(const StmtPtr&)>& f);
/// Expressions directly owned by a statement (not those of nested statements).
std::vector<ExprPtr> own_exprs(const Stmt& s);

/// Reassign ordinals in traversal order (globals, then functions in order).
void renumber(Program& p);

/// Variables (scalars/arrays) assigned or read into anywhere in `body`.
std::set<std::string> written_names(const StmtList& body);
/// Names read (appearing in any expression other than as an assignment target root).
std::set<std::string> read_names(const StmtList& body);

/// Root variable of an lvalue (`a` for `a[i][j]`).
const std::string& lvalue_root(const ExprPtr& lv);

std::string to_string(BinOp op);
std::string to_string(UnOp op);
std::string to_string(ScalarType t);

}  // namespace dpfb
