#include "dpfb/ast.hpp"

#include "dpfb/error.hpp"

namespace dpfb {

namespace ex {

ExprPtr lit(std::int64_t v) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::IntLit;
  e->value = v;
  return e;
}

ExprPtr boolean(bool b) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::BoolLit;
  e->value = b ? 1 : 0;
  return e;
}

ExprPtr var(std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Var;
  e->name = std::move(name);
  return e;
}

ExprPtr index(std::string array, std::vector<ExprPtr> subscripts) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Index;
  e->name = std::move(array);
  e->args = std::move(subscripts);
  return e;
}

ExprPtr unary(UnOp op, ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Unary;
  e->uop = op;
  e->args = {std::move(a)};
  return e;
}

ExprPtr binary(BinOp op, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Binary;
  e->bop = op;
  e->args = {std::move(a), std::move(b)};
  return e;
}

ExprPtr ite(ExprPtr c, ExprPtr t, ExprPtr f) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Ternary;
  e->args = {std::move(c), std::move(t), std::move(f)};
  return e;
}

ExprPtr call(std::string callee, std::vector<ExprPtr> args) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Call;
  e->name = std::move(callee);
  e->args = std::move(args);
  return e;
}

bool is_true(const ExprPtr& e) { return e && e->kind == ExprKind::BoolLit && e->value != 0; }
bool is_false(const ExprPtr& e) { return e && e->kind == ExprKind::BoolLit && e->value == 0; }

ExprPtr conj(ExprPtr a, ExprPtr b) {
  if (is_true(a)) return b;
  if (is_true(b)) return a;
  if (is_false(a) || is_false(b)) return boolean(false);
  return binary(BinOp::And, std::move(a), std::move(b));
}

ExprPtr disj(ExprPtr a, ExprPtr b) {
  if (is_false(a)) return b;
  if (is_false(b)) return a;
  if (is_true(a) || is_true(b)) return boolean(true);
  return binary(BinOp::Or, std::move(a), std::move(b));
}

ExprPtr neg(ExprPtr a) {
  if (is_true(a)) return boolean(false);
  if (is_false(a)) return boolean(true);
  return unary(UnOp::Not, std::move(a));
}

ExprPtr implies(ExprPtr a, ExprPtr b) {
  if (is_true(a)) return b;
  if (is_false(a) || is_true(b)) return boolean(true);
  return binary(BinOp::Implies, std::move(a), std::move(b));
}

ExprPtr iff(ExprPtr a, ExprPtr b) { return binary(BinOp::Iff, std::move(a), std::move(b)); }
ExprPtr eq(ExprPtr a, ExprPtr b) { return binary(BinOp::Eq, std::move(a), std::move(b)); }

ExprPtr conj_all(const std::vector<ExprPtr>& xs) {
  ExprPtr out = boolean(true);
  for (const auto& x : xs) out = conj(out, x);
  return out;
}

ExprPtr disj_all(const std::vector<ExprPtr>& xs) {
  ExprPtr out = boolean(false);
  for (const auto& x : xs) out = disj(out, x);
  return out;
}

}  // namespace ex

bool is_comparison(BinOp op) {
  switch (op) {
    case BinOp::Lt: case BinOp::Le: case BinOp::Gt: case BinOp::Ge: case BinOp::Eq: case BinOp::Ne:
      return true;
    default:
      return false;
  }
}

bool is_boolean_op(BinOp op) {
  return op == BinOp::And || op == BinOp::Or || op == BinOp::Implies || op == BinOp::Iff;
}

bool is_lvalue(const Expr& e) { return e.kind == ExprKind::Var || e.kind == ExprKind::Index; }

bool same_expr(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->value != b->value || a->name != b->name) return false;
  if (a->kind == ExprKind::Binary && a->bop != b->bop) return false;
  if (a->kind == ExprKind::Unary && a->uop != b->uop) return false;
  if (a->args.size() != b->args.size()) return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!same_expr(a->args[i], b->args[i])) return false;
  return true;
}

std::size_t node_count(const ExprPtr& e) {
  if (!e) return 0;
  std::size_t n = 1;
  for (const auto& a : e->args) n += node_count(a);
  return n;
}

void collect_vars(const ExprPtr& e, std::set<std::string>& out) {
  if (!e) return;
  if (e->kind == ExprKind::Var) out.insert(e->name);
  for (const auto& a : e->args) collect_vars(a, out);
}

void collect_arrays(const ExprPtr& e, std::set<std::string>& out) {
  if (!e) return;
  if (e->kind == ExprKind::Index) out.insert(e->name);
  for (const auto& a : e->args) collect_arrays(a, out);
}

std::set<std::string> names_in(const ExprPtr& e) {
  std::set<std::string> out;
  collect_vars(e, out);
  collect_arrays(e, out);
  return out;
}

void collect_accesses(const ExprPtr& e, std::vector<ExprPtr>& out) {
  if (!e) return;
  if (e->kind == ExprKind::Index) out.push_back(e);
  for (const auto& a : e->args) collect_accesses(a, out);
}

bool mentions(const ExprPtr& e, const std::string& name) {
  if (!e) return false;
  if ((e->kind == ExprKind::Var || e->kind == ExprKind::Index) && e->name == name) return true;
  for (const auto& a : e->args)
    if (mentions(a, name)) return true;
  return false;
}

bool has_call(const ExprPtr& e) {
  if (!e) return false;
  if (e->kind == ExprKind::Call) return true;
  for (const auto& a : e->args)
    if (has_call(a)) return true;
  return false;
}

ExprPtr rewrite(const ExprPtr& e, const std::function<ExprPtr(const ExprPtr&)>& f) {
  if (!e) return e;
  ExprPtr node = e;
  if (!e->args.empty()) {
    std::vector<ExprPtr> args;
    args.reserve(e->args.size());
    bool changed = false;
    for (const auto& a : e->args) {
      args.push_back(rewrite(a, f));
      changed = changed || args.back() != a;
    }
    if (changed) {
      auto copy = std::make_shared<Expr>(*e);
      copy->args = std::move(args);
      node = copy;
    }
  }
  if (auto r = f(node)) return r;
  return node;
}

ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ExprPtr>& m) {
  if (m.empty()) return e;
  return rewrite(e, [&](const ExprPtr& n) -> ExprPtr {
    if (n->kind == ExprKind::Var) {
      auto it = m.find(n->name);
      if (it != m.end()) return it->second;
    }
    return nullptr;
  });
}

ExprPtr rename(const ExprPtr& e, const std::map<std::string, std::string>& m) {
  if (m.empty()) return e;
  return rewrite(e, [&](const ExprPtr& n) -> ExprPtr {
    if (n->kind == ExprKind::Var || n->kind == ExprKind::Index) {
      auto it = m.find(n->name);
      if (it != m.end()) {
        auto copy = std::make_shared<Expr>(*n);
        copy->name = it->second;
        return copy;
      }
    }
    return nullptr;
  });
}

// ---------------------------------------------------------------------------

namespace st {

namespace {
std::shared_ptr<Stmt> make(StmtKind k, Location loc) {
  auto s = std::make_shared<Stmt>();
  s->kind = k;
  s->loc = loc;
  return s;
}
}  // namespace

StmtPtr decl(std::vector<VarDecl> decls, Location loc) {
  auto s = make(StmtKind::Decl, loc);
  s->decls = std::move(decls);
  return s;
}

StmtPtr assign(ExprPtr lhs, ExprPtr rhs, Location loc, AssignOp op) {
  auto s = make(StmtKind::Assign, loc);
  s->lhs = std::move(lhs);
  s->rhs = std::move(rhs);
  s->aop = op;
  return s;
}

StmtPtr if_(ExprPtr cond, StmtList then_body, StmtList else_body, Location loc) {
  auto s = make(StmtKind::If, loc);
  s->cond = std::move(cond);
  s->body = std::move(then_body);
  s->else_body = std::move(else_body);
  return s;
}

StmtPtr for_(StmtPtr init, ExprPtr cond, StmtPtr step, StmtList body, Location loc) {
  auto s = make(StmtKind::For, loc);
  s->init = std::move(init);
  s->cond = std::move(cond);
  s->step = std::move(step);
  s->body = std::move(body);
  return s;
}

StmtPtr while_(ExprPtr cond, StmtList body, Location loc) {
  auto s = make(StmtKind::While, loc);
  s->cond = std::move(cond);
  s->body = std::move(body);
  return s;
}

StmtPtr read(ExprPtr lvalue, Location loc) {
  auto s = make(StmtKind::Read, loc);
  s->format = "%d";
  s->args = {std::move(lvalue)};
  return s;
}

StmtPtr write(std::string format, std::vector<ExprPtr> args, Location loc) {
  auto s = make(StmtKind::Write, loc);
  s->format = std::move(format);
  s->args = std::move(args);
  return s;
}

StmtPtr expr(ExprPtr e, Location loc) {
  auto s = make(StmtKind::ExprStmt, loc);
  s->rhs = std::move(e);
  return s;
}

StmtPtr ret(ExprPtr e, Location loc) {
  auto s = make(StmtKind::Return, loc);
  s->rhs = std::move(e);
  return s;
}

StmtPtr block(StmtList body, Location loc) {
  auto s = make(StmtKind::Block, loc);
  s->body = std::move(body);
  return s;
}

}  // namespace st

const FunctionDef* Program::find(const std::string& name) const {
  for (const auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

FunctionDef* Program::find(const std::string& name) {
  for (auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

const FunctionDef& Program::main() const {
  if (auto f = find("main")) return *f;
  throw Error(ErrorKind::TypeError, "program has no main function");
}

FunctionDef& Program::main() {
  if (auto f = find("main")) return *f;
  throw Error(ErrorKind::TypeError, "program has no main function");
}

void for_each_stmt(const StmtList& body, const std::function<void(const StmtPtr&)>& f) {
  for (const auto& s : body) {
    if (!s) continue;
    f(s);
    if (s->init) for_each_stmt(StmtList{s->init}, f);
    if (s->step) for_each_stmt(StmtList{s->step}, f);
    for_each_stmt(s->body, f);
    for_each_stmt(s->else_body, f);
  }
}

void for_each_stmt(const Program& p, const std::function<void(const StmtPtr&)>& f) {
  for_each_stmt(p.globals, f);
  for (const auto& fn : p.functions) for_each_stmt(fn.body, f);
}

std::vector<ExprPtr> own_exprs(const Stmt& s) {
  std::vector<ExprPtr> out;
  auto add = [&](const ExprPtr& e) {
    if (e) out.push_back(e);
  };
  add(s.lhs);
  add(s.rhs);
  add(s.cond);
  for (const auto& a : s.args) add(a);
  for (const auto& d : s.decls) {
    for (const auto& x : d.dims) add(x);
    add(d.init);
  }
  return out;
}

namespace {

StmtPtr renumber_stmt(const StmtPtr& s, int& next) {
  if (!s) return s;
  auto copy = std::make_shared<Stmt>(*s);
  copy->loc.ordinal = next++;
  if (copy->init) copy->init = renumber_stmt(copy->init, next);
  if (copy->step) copy->step = renumber_stmt(copy->step, next);
  for (auto& b : copy->body) b = renumber_stmt(b, next);
  for (auto& b : copy->else_body) b = renumber_stmt(b, next);
  return copy;
}

}  // namespace

void renumber(Program& p) {
  int next = 1;
  for (auto& g : p.globals) g = renumber_stmt(g, next);
  for (auto& f : p.functions) {
    f.loc.ordinal = next++;
    for (auto& s : f.body) s = renumber_stmt(s, next);
  }
}

const std::string& lvalue_root(const ExprPtr& lv) { return lv->name; }

std::set<std::string> written_names(const StmtList& body) {
  std::set<std::string> out;
  for_each_stmt(body, [&](const StmtPtr& s) {
    if (s->kind == StmtKind::Assign) out.insert(s->lhs->name);
    if (s->kind == StmtKind::Read)
      for (const auto& a : s->args) out.insert(a->name);
    if (s->kind == StmtKind::Decl)
      for (const auto& d : s->decls)
        if (d.init) out.insert(d.name);
    for (const auto& e : own_exprs(*s)) {
      rewrite(e, [&](const ExprPtr& n) -> ExprPtr {
        if (n->kind == ExprKind::Unary &&
            (n->uop == UnOp::PreInc || n->uop == UnOp::PreDec || n->uop == UnOp::PostInc ||
             n->uop == UnOp::PostDec))
          out.insert(n->args[0]->name);
        return nullptr;
      });
    }
  });
  return out;
}

std::set<std::string> read_names(const StmtList& body) {
  std::set<std::string> out;
  for_each_stmt(body, [&](const StmtPtr& s) {
    if (s->kind == StmtKind::Assign) {
      for (const auto& i : s->lhs->args) {
        auto n = names_in(i);
        out.insert(n.begin(), n.end());
      }
      if (s->aop != AssignOp::Set) out.insert(s->lhs->name);
      auto n = names_in(s->rhs);
      out.insert(n.begin(), n.end());
      return;
    }
    if (s->kind == StmtKind::Read) {
      for (const auto& a : s->args)
        for (const auto& i : a->args) {
          auto n = names_in(i);
          out.insert(n.begin(), n.end());
        }
      return;
    }
    for (const auto& e : own_exprs(*s)) {
      auto n = names_in(e);
      out.insert(n.begin(), n.end());
    }
  });
  return out;
}

std::string to_string(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "%";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
    case BinOp::Implies: return "=>";
    case BinOp::Iff: return "<=>";
  }
  return "?";
}

std::string to_string(UnOp op) {
  switch (op) {
    case UnOp::Neg: return "-";
    case UnOp::Not: return "!";
    case UnOp::PreInc: case UnOp::PostInc: return "++";
    case UnOp::PreDec: case UnOp::PostDec: return "--";
  }
  return "?";
}

std::string to_string(ScalarType t) {
  switch (t) {
    case ScalarType::Int: return "int";
    case ScalarType::Bool: return "bool";
    case ScalarType::Void: return "void";
  }
  return "?";
}

}  // namespace dpfb
