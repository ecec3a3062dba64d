#include "dpfb/analysis.hpp"

#include <algorithm>
#include <functional>

#include "dpfb/error.hpp"
#include "dpfb/formula.hpp"
#include "dpfb/render.hpp"

namespace dpfb {

std::string to_string(Label l) {
  switch (l) {
    case Label::Input: return "input";
    case Label::Init: return "initialization";
    case Label::Update: return "update";
    case Label::Output: return "output";
  }
  return "?";
}

const GuardedSet* SubstitutionStore::find(int ordinal, const std::string& var) const {
  auto it = entries.find({ordinal, var});
  return it == entries.end() ? nullptr : &it->second;
}

bool LabeledProgram::is_input(const std::string& name) const {
  return std::any_of(inputs.begin(), inputs.end(), [&](const InputVar& v) { return v.name == name; });
}

bool LabeledProgram::is_dp_array(const std::string& name) const {
  return std::find(dp_arrays.begin(), dp_arrays.end(), name) != dp_arrays.end();
}

std::optional<Label> LabeledProgram::label_of(const Stmt& s) const {
  auto it = labels.find(s.loc.ordinal);
  if (it == labels.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------

namespace {

void loop_indices_in(const StmtList& body, const SymbolTable& syms, std::set<std::string>& out) {
  // Names assigned (not read) so far, in pre-order.
  std::set<std::string> assigned;
  std::function<void(const StmtList&)> walk = [&](const StmtList& list) {
    for (const auto& s : list) {
      if (s->kind == StmtKind::For || s->kind == StmtKind::While) {
        std::set<std::string> before = assigned;
        if (s->kind == StmtKind::For && s->init && s->init->kind == StmtKind::Assign &&
            s->init->lhs->kind == ExprKind::Var)
          before.insert(s->init->lhs->name);
        StmtList inner = s->body;
        if (s->step) inner.push_back(s->step);
        auto updated = written_names(inner);
        std::set<std::string> guard_vars;
        collect_vars(s->cond, guard_vars);
        for (const auto& x : guard_vars) {
          auto it = syms.find(x);
          if (it == syms.end() || it->second.is_array()) continue;
          if (before.count(x) && updated.count(x)) out.insert(x);
        }
        if (s->kind == StmtKind::For && s->init) walk(StmtList{s->init});
        walk(s->body);
        if (s->step) walk(StmtList{s->step});
        continue;
      }
      if (s->kind == StmtKind::Assign && s->lhs->kind == ExprKind::Var) assigned.insert(s->lhs->name);
      if (s->kind == StmtKind::Decl)
        for (const auto& d : s->decls)
          if (d.init) assigned.insert(d.name);
      walk(s->body);
      walk(s->else_body);
    }
  };
  walk(body);
}

// Call-graph cycle check.
void check_recursion(const Program& p) {
  std::map<std::string, std::set<std::string>> calls;
  for (const auto& f : p.functions) {
    auto& out = calls[f.name];
    for_each_stmt(f.body, [&](const StmtPtr& s) {
      for (const auto& e : own_exprs(*s))
        rewrite(e, [&](const ExprPtr& n) -> ExprPtr {
          if (n->kind == ExprKind::Call) out.insert(n->name);
          return nullptr;
        });
    });
  }
  std::map<std::string, int> color;
  std::function<void(const std::string&)> dfs = [&](const std::string& f) {
    color[f] = 1;
    for (const auto& g : calls[f]) {
      if (color[g] == 1)
        throw Error(ErrorKind::RecursionUnsupported, "recursive call cycle through " + g);
      if (color[g] == 0) dfs(g);
    }
    color[f] = 2;
  };
  for (const auto& f : p.functions)
    if (color[f.name] == 0) dfs(f.name);
}

bool set_mentions(const GuardedSet& gs, const std::string& name) {
  return std::any_of(gs.begin(), gs.end(),
                     [&](const GuardedExpr& g) { return mentions(g.guard, name) || mentions(g.expr, name); });
}

bool same_set(const GuardedSet& a, const GuardedSet& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (!same_expr(a[k].guard, b[k].guard) || !same_expr(a[k].expr, b[k].expr)) return false;
  return true;
}

// Cartesian combination of operand variants.
std::optional<GuardedSet> combine(const std::vector<GuardedSet>& parts,
                                  const std::function<ExprPtr(const std::vector<ExprPtr>&)>& build) {
  GuardedSet out;
  std::vector<ExprPtr> pick(parts.size());
  std::function<bool(std::size_t, ExprPtr)> rec = [&](std::size_t k, ExprPtr guard) {
    if (ex::is_false(guard)) return true;
    if (k == parts.size()) {
      if (out.size() >= kMaxGuardedVariants) return false;
      out.push_back({guard, build(pick)});
      return true;
    }
    for (const auto& g : parts[k]) {
      pick[k] = g.expr;
      if (!rec(k + 1, ex::conj(guard, g.guard))) return false;
    }
    return true;
  };
  if (!rec(0, ex::boolean(true))) return std::nullopt;
  return out;
}

ExprPtr as_formula(const GuardedSet& gs) {
  ExprPtr f = ex::boolean(false);
  for (const auto& g : gs) f = ex::disj(f, ex::conj(g.guard, g.expr));
  return f;
}

struct ArrayBinding {
  std::string array;
  std::vector<ExprPtr> prefix;
};

using Temps = std::map<std::string, GuardedSet>;

struct Frame {
  const FunctionDef* fn = nullptr;
  SymbolTable syms;
  std::set<std::string> dp_scalars;  // scalars never substituted
  std::map<std::string, ArrayBinding> arrays;
  bool record = false;
};

class SymExec {
 public:
  SymExec(const Program& p, SubstitutionStore& store) : p_(p), store_(store) {}

  void run_main(const std::set<std::string>& dp_scalars) {
    Frame f;
    f.fn = &p_.main();
    f.syms = symbols_of(p_, p_.main());
    f.dp_scalars = dp_scalars;
    f.record = true;
    Temps temps;
    ExprPtr alive = ex::boolean(true);
    std::vector<GuardedExpr> returns;
    bool returns_ok = true;
    exec(f, p_.main().body, temps, alive, returns, returns_ok, 0);
  }

 private:
  bool is_temp(const Frame& f, const std::string& name) const {
    auto it = f.syms.find(name);
    if (it == f.syms.end()) return false;
    return !it->second.is_array() && !f.dp_scalars.count(name);
  }

  std::optional<GuardedSet> lift(const Frame& f, const Temps& temps, const ExprPtr& e) {
    switch (e->kind) {
      case ExprKind::IntLit:
      case ExprKind::BoolLit:
        return GuardedSet{{ex::boolean(true), e}};
      case ExprKind::Var: {
        if (is_temp(f, e->name)) {
          auto it = temps.find(e->name);
          if (it == temps.end()) return std::nullopt;
          return it->second;
        }
        if (auto b = f.arrays.find(e->name); b != f.arrays.end()) {
          if (b->second.prefix.empty()) return GuardedSet{{ex::boolean(true), ex::var(b->second.array)}};
          return GuardedSet{{ex::boolean(true), ex::index(b->second.array, b->second.prefix)}};
        }
        return GuardedSet{{ex::boolean(true), e}};
      }
      case ExprKind::Index: {
        std::vector<GuardedSet> parts;
        for (const auto& a : e->args) {
          auto s = lift(f, temps, a);
          if (!s) return std::nullopt;
          parts.push_back(std::move(*s));
        }
        std::string name = e->name;
        std::vector<ExprPtr> prefix;
        if (auto b = f.arrays.find(name); b != f.arrays.end()) {
          name = b->second.array;
          prefix = b->second.prefix;
        }
        return combine(parts, [&](const std::vector<ExprPtr>& xs) {
          std::vector<ExprPtr> subs = prefix;
          subs.insert(subs.end(), xs.begin(), xs.end());
          return ex::index(name, subs);
        });
      }
      case ExprKind::Unary: {
        if (e->uop != UnOp::Neg && e->uop != UnOp::Not) return std::nullopt;
        auto a = lift(f, temps, e->args[0]);
        if (!a) return std::nullopt;
        return combine({*a}, [&](const std::vector<ExprPtr>& xs) { return ex::unary(e->uop, xs[0]); });
      }
      case ExprKind::Binary: {
        auto a = lift(f, temps, e->args[0]);
        auto b = a ? lift(f, temps, e->args[1]) : std::nullopt;
        if (!a || !b) return std::nullopt;
        return combine({*a, *b}, [&](const std::vector<ExprPtr>& xs) { return ex::binary(e->bop, xs[0], xs[1]); });
      }
      case ExprKind::Ternary: {
        auto c = lift(f, temps, e->args[0]);
        auto t = c ? lift(f, temps, e->args[1]) : std::nullopt;
        auto el = t ? lift(f, temps, e->args[2]) : std::nullopt;
        if (!el) return std::nullopt;
        GuardedSet out;
        for (const auto& gc : *c) {
          for (const auto& gt : *t) {
            auto g = ex::conj(ex::conj(gc.guard, gc.expr), gt.guard);
            if (!ex::is_false(g)) out.push_back({g, gt.expr});
          }
          for (const auto& ge : *el) {
            auto g = ex::conj(ex::conj(gc.guard, fold(ex::neg(gc.expr))), ge.guard);
            if (!ex::is_false(g)) out.push_back({g, ge.expr});
          }
        }
        if (out.size() > kMaxGuardedVariants) return std::nullopt;
        return out;
      }
      case ExprKind::Call:
        return call(f, temps, *e);
    }
    return std::nullopt;
  }

  std::optional<GuardedSet> call(const Frame& caller, const Temps& temps, const Expr& e) {
    const FunctionDef* fn = p_.find(e.name);
    if (!fn || fn->return_type == ScalarType::Void || depth_ > 16) return std::nullopt;
    Frame f;
    f.fn = fn;
    f.syms = symbols_of(p_, *fn);
    Temps inner;
    for (std::size_t k = 0; k < fn->params.size() && k < e.args.size(); ++k) {
      const auto& prm = fn->params[k];
      const auto& arg = e.args[k];
      if (!prm.dims.empty()) {
        if (arg->kind != ExprKind::Var && arg->kind != ExprKind::Index) return std::nullopt;
        ArrayBinding b;
        b.array = arg->name;
        if (auto outer = caller.arrays.find(arg->name); outer != caller.arrays.end()) {
          b.array = outer->second.array;
          b.prefix = outer->second.prefix;
        }
        for (const auto& sub : arg->args) {
          auto s = lift(caller, temps, sub);
          if (!s || s->size() != 1 || !ex::is_true((*s)[0].guard)) return std::nullopt;
          b.prefix.push_back((*s)[0].expr);
        }
        f.arrays[prm.name] = b;
        continue;
      }
      auto v = lift(caller, temps, arg);
      if (!v) return std::nullopt;
      inner[prm.name] = std::move(*v);
    }
    ExprPtr alive = ex::boolean(true);
    std::vector<GuardedExpr> returns;
    bool ok = true;
    ++depth_;
    exec(f, fn->body, inner, alive, returns, ok, 0);
    --depth_;
    if (!ok || !ex::is_false(alive) || returns.empty() || returns.size() > kMaxGuardedVariants)
      return std::nullopt;
    return returns;
  }

  void invalidate(Temps& temps, const std::set<std::string>& written) {
    for (auto it = temps.begin(); it != temps.end();) {
      bool stale = written.count(it->first) > 0;
      for (const auto& w : written) stale = stale || set_mentions(it->second, w);
      it = stale ? temps.erase(it) : std::next(it);
    }
  }

  void record_uses(const Frame& f, const Stmt& s, const Temps& temps) {
    if (!f.record) return;
    std::set<std::string> used;
    if (s.kind == StmtKind::Assign) {
      for (const auto& i : s.lhs->args) collect_vars(i, used);
      collect_vars(s.rhs, used);
    } else if (s.kind != StmtKind::For && s.kind != StmtKind::While && s.kind != StmtKind::If) {
      for (const auto& e : own_exprs(s)) collect_vars(e, used);
    } else {
      collect_vars(s.cond, used);
    }
    for (const auto& x : used) {
      if (!is_temp(f, x)) continue;
      if (auto it = temps.find(x); it != temps.end()) store_.entries[{s.loc.ordinal, x}] = it->second;
    }
  }

  void record_condition(const Frame& f, const Stmt& s, const Temps& temps) {
    if (!f.record || !s.cond) return;
    if (auto c = lift(f, temps, s.cond)) store_.conditions[s.loc.ordinal] = as_formula(*c);
  }

  static std::set<std::string> loop_writes(const Stmt& s) {
    StmtList inner = s.body;
    if (s.step) inner.push_back(s.step);
    return written_names(inner);
  }

  void exec(const Frame& f, const StmtList& body, Temps& temps, ExprPtr& alive, std::vector<GuardedExpr>& returns,
            bool& ok, int loop_depth) {
    for (const auto& sp : body) {
      if (ex::is_false(alive)) return;
      const Stmt& s = *sp;
      switch (s.kind) {
        case StmtKind::Decl:
          for (const auto& d : s.decls) temps.erase(d.name);
          for (const auto& d : s.decls)
            if (d.init) assign(f, s, ex::var(d.name), d.init, temps);
          break;
        case StmtKind::Assign:
          record_uses(f, s, temps);
          assign(f, s, s.lhs, s.rhs, temps);
          break;
        case StmtKind::Read:
          record_uses(f, s, temps);
          for (const auto& a : s.args) invalidate(temps, {f.arrays.count(a->name) ? f.arrays.at(a->name).array : a->name});
          break;
        case StmtKind::Write:
        case StmtKind::ExprStmt:
          record_uses(f, s, temps);
          break;
        case StmtKind::Return: {
          record_uses(f, s, temps);
          if (loop_depth > 0 || !s.rhs) {
            ok = false;
          } else if (auto v = lift(f, temps, s.rhs)) {
            for (const auto& g : *v) {
              auto guard = ex::conj(alive, g.guard);
              if (!ex::is_false(guard)) returns.push_back({guard, g.expr});
            }
          } else {
            ok = false;
          }
          alive = ex::boolean(false);
          return;
        }
        case StmtKind::Block:
          exec(f, s.body, temps, alive, returns, ok, loop_depth);
          break;
        case StmtKind::If: {
          record_uses(f, s, temps);
          record_condition(f, s, temps);
          auto c = lift(f, temps, s.cond);
          ExprPtr cf = c ? as_formula(*c) : nullptr;
          Temps t_then = temps, t_else = temps;
          ExprPtr a_then = cf ? ex::conj(alive, cf) : alive;
          ExprPtr a_else = cf ? ex::conj(alive, fold(ex::neg(cf))) : alive;
          if (!cf && (!s.body.empty() || !s.else_body.empty())) {
            // Unknown condition: returns below it cannot be guarded.
            bool has_return = false;
            for_each_stmt(s.body, [&](const StmtPtr& x) { has_return = has_return || x->kind == StmtKind::Return; });
            for_each_stmt(s.else_body,
                          [&](const StmtPtr& x) { has_return = has_return || x->kind == StmtKind::Return; });
            if (has_return) ok = false;
          }
          exec(f, s.body, t_then, a_then, returns, ok, loop_depth);
          exec(f, s.else_body, t_else, a_else, returns, ok, loop_depth);
          const bool then_dead = ex::is_false(a_then);
          const bool else_dead = ex::is_false(a_else);
          if (then_dead && !else_dead) {
            temps = std::move(t_else);
          } else if (else_dead && !then_dead) {
            temps = std::move(t_then);
          } else {
            Temps joined;
            for (const auto& [x, a] : t_then) {
              auto it = t_else.find(x);
              if (it == t_else.end()) continue;
              if (same_set(a, it->second)) {
                joined[x] = a;
              } else if (cf && a.size() + it->second.size() <= kMaxGuardedVariants) {
                GuardedSet m;
                for (const auto& g : a) m.push_back({ex::conj(cf, g.guard), g.expr});
                for (const auto& g : it->second) m.push_back({ex::conj(fold(ex::neg(cf)), g.guard), g.expr});
                joined[x] = std::move(m);
              }
            }
            temps = std::move(joined);
          }
          if (!cf) {
            alive = (then_dead && else_dead) ? ex::boolean(false) : alive;
          } else {
            alive = ex::disj(a_then, a_else);
          }
          break;
        }
        case StmtKind::For:
        case StmtKind::While: {
          if (s.init) exec(f, StmtList{s.init}, temps, alive, returns, ok, loop_depth);
          auto w = loop_writes(s);
          std::set<std::string> mapped;
          for (const auto& n : w) mapped.insert(f.arrays.count(n) ? f.arrays.at(n).array : n);
          invalidate(temps, mapped);
          record_uses(f, s, temps);
          record_condition(f, s, temps);
          Temps inner = temps;
          ExprPtr a = alive;
          exec(f, s.body, inner, a, returns, ok, loop_depth + 1);
          if (s.step && !ex::is_false(a)) exec(f, StmtList{s.step}, inner, a, returns, ok, loop_depth + 1);
          invalidate(temps, mapped);
          break;
        }
      }
    }
  }

  void assign(const Frame& f, const Stmt& s, const ExprPtr& lhs, const ExprPtr& rhs, Temps& temps) {
    auto r = lift(f, temps, rhs);
    if (lhs->kind == ExprKind::Var && is_temp(f, lhs->name)) {
      temps.erase(lhs->name);
      invalidate(temps, {lhs->name});
      if (r) temps[lhs->name] = *r;
      return;
    }
    std::optional<GuardedSet> l;
    if (lhs->kind == ExprKind::Index) l = lift(f, temps, lhs);
    else l = GuardedSet{{ex::boolean(true), lhs}};
    if (f.record && s.kind == StmtKind::Assign) {
      if (r && l) {
        std::vector<GuardedAssign> variants;
        for (const auto& gl : *l)
          for (const auto& gr : *r) {
            auto g = ex::conj(gl.guard, gr.guard);
            if (!ex::is_false(g)) variants.push_back({g, gl.expr, gr.expr});
          }
        if (variants.size() <= kMaxGuardedVariants) store_.assignments[s.loc.ordinal] = std::move(variants);
      }
    }
    std::string root = lhs->name;
    if (auto b = f.arrays.find(root); b != f.arrays.end()) root = b->second.array;
    invalidate(temps, {root});
  }

  const Program& p_;
  SubstitutionStore& store_;
  int depth_ = 0;
};

}  // namespace

std::set<std::string> identify_loop_indices(const Program& p) {
  std::set<std::string> out;
  for (const auto& f : p.functions) loop_indices_in(f.body, symbols_of(p, f), out);
  return out;
}

std::vector<InputVar> identify_inputs(const Program& p) {
  std::vector<InputVar> out;
  auto syms = symbols_of(p, p.main());
  for_each_stmt(p.main().body, [&](const StmtPtr& s) {
    if (s->kind != StmtKind::Read) return;
    for (const auto& a : s->args) {
      const auto& name = a->name;
      if (std::any_of(out.begin(), out.end(), [&](const InputVar& v) { return v.name == name; })) continue;
      auto it = syms.find(name);
      if (it == syms.end()) continue;
      out.push_back({name, it->second.type, it->second.rank()});
    }
  });
  return out;
}

SubstitutionStore compute_substitution_store(const Program& p) {
  check_recursion(p);
  SubstitutionStore store;
  auto indices = identify_loop_indices(p);
  auto syms = symbols_of(p, p.main());
  for (const auto& v : identify_inputs(p))
    if (v.rank == 0) store.dp_scalars.insert(v.name);
  for (const auto& i : indices)
    if (auto it = syms.find(i); it != syms.end() && !it->second.is_array()) store.dp_scalars.insert(i);
  SymExec(p, store).run_main(store.dp_scalars);
  return store;
}

std::vector<std::string> identify_dp_arrays(const Program& p, const SubstitutionStore& s) {
  std::vector<std::string> out;
  for_each_stmt(p.main().body, [&](const StmtPtr& st) {
    if (st->kind != StmtKind::Assign || st->lhs->kind != ExprKind::Index) return;
    auto it = s.assignments.find(st->loc.ordinal);
    if (it == s.assignments.end()) return;
    const auto& a = st->lhs->name;
    for (const auto& v : it->second) {
      if (mentions(v.rhs, a) && std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
    }
  });
  if (out.empty()) throw Error(ErrorKind::NoDpArray, "no array is defined in terms of itself");
  return out;
}

namespace {

std::optional<Label> classify(const GuardedAssign& v, const LabeledProgram& lp) {
  bool any_dp = false;
  bool only_inputs = true;
  for (const auto& n : names_in(v.rhs)) {
    if (lp.is_dp_array(n)) any_dp = true;
    else if (!lp.is_input(n) && !lp.loop_indices.count(n)) only_inputs = false;
  }
  if (any_dp) return Label::Update;
  if (only_inputs) return Label::Init;
  return std::nullopt;
}

// Every DP-array assignment below an if statement (not crossing loops).
void leaves(const StmtList& body, std::vector<StmtPtr>& out) {
  for (const auto& s : body) {
    if (s->kind == StmtKind::Assign && s->lhs->kind == ExprKind::Index) out.push_back(s);
    if (s->kind == StmtKind::If || s->kind == StmtKind::Block) {
      leaves(s->body, out);
      leaves(s->else_body, out);
    }
  }
}

}  // namespace

LabeledProgram label_statements(const Program& p, const SubstitutionStore& s) {
  LabeledProgram lp;
  lp.program = p;
  lp.symbols = symbols_of(p, p.main());
  lp.store = s;
  lp.inputs = identify_inputs(p);
  lp.loop_indices = identify_loop_indices(p);
  lp.dp_arrays = identify_dp_arrays(p, s);

  const auto& body = p.main().body;
  for_each_stmt(body, [&](const StmtPtr& st) {
    if (st->kind == StmtKind::Read) {
      lp.labels[st->loc.ordinal] = Label::Input;
      return;
    }
    if (st->kind != StmtKind::Assign || st->lhs->kind != ExprKind::Index || !lp.is_dp_array(st->lhs->name)) return;
    auto it = s.assignments.find(st->loc.ordinal);
    if (it == s.assignments.end())
      throw Error(ErrorKind::LabelIncomplete, "temporaries in `" + render(st) + "` could not be eliminated",
                  st->loc.line, st->loc.column);
    std::optional<Label> label;
    for (const auto& v : it->second) {
      auto l = classify(v, lp);
      if (!l)
        throw Error(ErrorKind::LabelIncomplete, "`" + render(st) + "` matches no initialization or update pattern",
                    st->loc.line, st->loc.column);
      if (label && *label != *l)
        throw Error(ErrorKind::LabelConflict, "guarded variants of `" + render(st) + "` get different labels",
                    st->loc.line, st->loc.column);
      label = l;
    }
    if (label) lp.labels[st->loc.ordinal] = *label;
  });

  // Leaves of one conditional that write the same DP array must agree.
  for_each_stmt(body, [&](const StmtPtr& st) {
    if (st->kind != StmtKind::If) return;
    std::vector<StmtPtr> ls;
    leaves(StmtList{st}, ls);
    std::map<std::string, Label> seen;
    for (const auto& l : ls) {
      auto lab = lp.labels.find(l->loc.ordinal);
      if (lab == lp.labels.end()) continue;
      auto [it, fresh] = seen.emplace(l->lhs->name, lab->second);
      if (!fresh && it->second != lab->second)
        throw Error(ErrorKind::LabelConflict,
                    "branches of the conditional at line " + std::to_string(st->loc.line) + " both " +
                        to_string(Label::Init) + " and " + to_string(Label::Update) + " " + l->lhs->name,
                    st->loc.line, st->loc.column);
    }
  });

  // Output: writes plus the scalar accumulators feeding them.
  std::set<std::string> acc;
  auto is_acc_candidate = [&](const std::string& n) {
    auto it = lp.symbols.find(n);
    return it != lp.symbols.end() && !it->second.is_array() && !lp.is_input(n) && !lp.loop_indices.count(n);
  };
  for_each_stmt(body, [&](const StmtPtr& st) {
    if (st->kind != StmtKind::Write) return;
    lp.labels[st->loc.ordinal] = Label::Output;
    for (const auto& a : st->args)
      for (const auto& n : names_in(a))
        if (is_acc_candidate(n)) acc.insert(n);
  });
  for (bool grew = true; grew;) {
    grew = false;
    for_each_stmt(body, [&](const StmtPtr& st) {
      if (st->kind != StmtKind::Assign || st->lhs->kind != ExprKind::Var || !acc.count(st->lhs->name)) return;
      if (!lp.labels.count(st->loc.ordinal)) {
        lp.labels[st->loc.ordinal] = Label::Output;
        grew = true;
      }
      for (const auto& n : names_in(st->rhs))
        if (is_acc_candidate(n) && acc.insert(n).second) grew = true;
    });
  }
  // Compound statements whose labeled contents are all Output. Returns
  // whether `st` holds any labeled statement; `all_output` accumulates.
  std::function<bool(const StmtPtr&, bool&)> summarize = [&](const StmtPtr& st, bool& all_output) -> bool {
    if (st->kind != StmtKind::For && st->kind != StmtKind::While && st->kind != StmtKind::If &&
        st->kind != StmtKind::Block) {
      auto it = lp.labels.find(st->loc.ordinal);
      if (it == lp.labels.end()) return false;
      all_output = all_output && it->second == Label::Output;
      return true;
    }
    bool any = false, mine = true;
    for (const auto* list : {&st->body, &st->else_body})
      for (const auto& c : *list) any = summarize(c, mine) || any;
    if (any && mine) lp.labels[st->loc.ordinal] = Label::Output;
    all_output = all_output && mine;
    return any;
  };
  for (const auto& st : body) {
    bool all_output = true;
    summarize(st, all_output);
  }
  return lp;
}

LabeledProgram analyze(const Program& p) {
  auto store = compute_substitution_store(p);
  return label_statements(p, store);
}

}  // namespace dpfb
