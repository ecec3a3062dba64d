#include "dpfb/mutation.hpp"

#include <optional>

#include "dpfb/error.hpp"
#include "dpfb/features.hpp"
#include "dpfb/frontend.hpp"
#include "dpfb/render.hpp"

namespace dpfb {

std::string to_string(MutationKind k) {
  switch (k) {
    case MutationKind::WrongGuard: return "wrong-guard";
    case MutationKind::IndexOffByOne: return "index-off-by-one";
    case MutationKind::MissingCase: return "missing-case";
    case MutationKind::WrongLoopBound: return "wrong-loop-bound";
    case MutationKind::HardcodedDimension: return "hardcoded-dimension";
    case MutationKind::SpuriousInit: return "spurious-init";
    case MutationKind::WrongOutputBound: return "wrong-output-bound";
  }
  return "?";
}

namespace {

std::optional<Label> top_label(const LabeledProgram& lp, const StmtPtr& s) {
  if (auto l = lp.label_of(*s)) return l;
  std::optional<Label> found;
  for_each_stmt(StmtList{s}, [&](const StmtPtr& x) {
    if (!found) found = lp.label_of(*x);
  });
  return found;
}

std::optional<BinOp> boundary_swap(BinOp op) {
  switch (op) {
    case BinOp::Lt: return BinOp::Le;
    case BinOp::Le: return BinOp::Lt;
    case BinOp::Gt: return BinOp::Ge;
    case BinOp::Ge: return BinOp::Gt;
    case BinOp::Eq: return BinOp::Ne;
    case BinOp::Ne: return BinOp::Eq;
    default: return std::nullopt;
  }
}

ExprPtr shift(const ExprPtr& e, int by) {
  if (e->kind == ExprKind::IntLit) return ex::lit(e->value + by);
  if (e->kind == ExprKind::Binary && (e->bop == BinOp::Sub || e->bop == BinOp::Add) &&
      e->args[1]->kind == ExprKind::IntLit) {
    auto c = (e->bop == BinOp::Add ? e->args[1]->value : -e->args[1]->value) + by;
    if (c == 0) return e->args[0];
    return c > 0 ? ex::binary(BinOp::Add, e->args[0], ex::lit(c)) : ex::binary(BinOp::Sub, e->args[0], ex::lit(-c));
  }
  return by > 0 ? ex::binary(BinOp::Add, e, ex::lit(by)) : ex::binary(BinOp::Sub, e, ex::lit(-by));
}

StmtPtr with(const StmtPtr& s, const std::function<void(Stmt&)>& f) {
  auto c = std::make_shared<Stmt>(*s);
  f(*c);
  return c;
}

/// Applies the `target`-th site of one mutation kind; `seen` counts sites.
class Mutator {
 public:
  Mutator(const LabeledProgram& lp, MutationKind kind, int target) : lp_(lp), kind_(kind), target_(target) {}

  std::optional<Program> run() {
    Program p = lp_.program;
    auto& body = p.main().body;
    StmtList out;
    for (const auto& s : body) {
      auto label = top_label(lp_, s);
      StmtPtr m = s;
      StmtList after;
      switch (kind_) {
        case MutationKind::WrongGuard:
          if (label == Label::Update) m = guards(s);
          break;
        case MutationKind::IndexOffByOne:
          if (label == Label::Update) m = update_indices(s);
          break;
        case MutationKind::MissingCase:
          if (label == Label::Update) m = cases(s);
          break;
        case MutationKind::WrongLoopBound:
          if (label == Label::Update || label == Label::Init) m = headers(s);
          break;
        case MutationKind::HardcodedDimension:
          if (s->kind == StmtKind::Decl) m = dimensions(s);
          break;
        case MutationKind::SpuriousInit:
          if (label == Label::Init) after = spurious(s);
          break;
        case MutationKind::WrongOutputBound:
          if (label == Label::Output) m = output(s);
          break;
      }
      out.push_back(m);
      out.insert(out.end(), after.begin(), after.end());
    }
    if (!applied_) return std::nullopt;
    body = out;
    renumber(p);
    return p;
  }

  const std::string& description() const { return description_; }

 private:
  bool hit(const std::string& what) {
    if (seen_++ != target_) return false;
    applied_ = true;
    description_ = what;
    return true;
  }

  // Comparisons inside if conditions and ternary conditions.
  ExprPtr guard_expr(const ExprPtr& e, bool in_guard) {
    if (!e) return e;
    if (in_guard && e->kind == ExprKind::Binary) {
      if (auto op = boundary_swap(e->bop)) {
        auto a = guard_expr(e->args[0], in_guard);
        auto b = guard_expr(e->args[1], in_guard);
        auto node = ex::binary(e->bop, a, b);
        if (hit("guard " + render(e) + " becomes " + render(ex::binary(*op, e->args[0], e->args[1]))))
          return ex::binary(*op, a, b);
        return node;
      }
    }
    if (e->kind == ExprKind::Ternary) {
      return ex::ite(guard_expr(e->args[0], true), guard_expr(e->args[1], in_guard),
                     guard_expr(e->args[2], in_guard));
    }
    if (e->args.empty()) return e;
    auto c = std::make_shared<Expr>(*e);
    for (auto& a : c->args) a = guard_expr(a, in_guard);
    return c;
  }

  StmtPtr guards(const StmtPtr& s) {
    return with(s, [&](Stmt& c) {
      if (c.kind == StmtKind::If) c.cond = guard_expr(c.cond, true);
      if (c.kind == StmtKind::Assign) c.rhs = guard_expr(c.rhs, false);
      for (auto& x : c.body) x = guards(x);
      for (auto& x : c.else_body) x = guards(x);
    });
  }

  ExprPtr index_expr(const ExprPtr& e) {
    if (!e || e->args.empty()) return e;
    auto c = std::make_shared<Expr>(*e);
    for (auto& a : c->args) a = index_expr(a);
    if (e->kind != ExprKind::Index) return c;
    for (std::size_t k = 0; k < c->args.size(); ++k) {
      const auto& sub = c->args[k];
      if (sub->kind == ExprKind::IntLit && sub->value == 0) continue;
      auto old = render(ExprPtr(c));
      std::vector<ExprPtr> moves = {shift(sub, -1)};
      if (sub->kind == ExprKind::Binary && sub->bop == BinOp::Sub && sub->args[1]->kind == ExprKind::IntLit)
        moves.push_back(shift(sub, 1));
      for (const auto& moved : moves) {
        if (hit("read " + old + " at subscript " + render(moved))) {
          c->args[k] = moved;
          return c;
        }
      }
    }
    return c;
  }

  StmtPtr update_indices(const StmtPtr& s) {
    return with(s, [&](Stmt& c) {
      if (c.kind == StmtKind::Assign) c.rhs = index_expr(c.rhs);
      for (auto& x : c.body) x = update_indices(x);
      for (auto& x : c.else_body) x = update_indices(x);
    });
  }

  ExprPtr drop_branch(const ExprPtr& e) {
    if (!e || e->args.empty()) return e;
    if (e->kind == ExprKind::Ternary) {
      if (hit("ternary on " + render(e->args[0]) + " always takes its first case")) return e->args[1];
      if (hit("ternary on " + render(e->args[0]) + " always takes its second case")) return e->args[2];
    }
    auto c = std::make_shared<Expr>(*e);
    for (auto& a : c->args) a = drop_branch(a);
    return c;
  }

  StmtList case_list(const StmtList& list) {
    StmtList out;
    for (const auto& s : list) {
      if (s->kind == StmtKind::If) {
        if (!s->else_body.empty() && hit("case `" + render(s->cond) + "` removed")) {
          out.insert(out.end(), s->else_body.begin(), s->else_body.end());
          continue;
        }
        if (s->else_body.empty() && hit("case `" + render(s->cond) + "` removed")) continue;
        if (!s->else_body.empty() && hit("else case of `" + render(s->cond) + "` removed")) {
          out.insert(out.end(), s->body.begin(), s->body.end());
          continue;
        }
      }
      out.push_back(cases(s));
    }
    return out;
  }

  StmtPtr cases(const StmtPtr& s) {
    return with(s, [&](Stmt& c) {
      if (c.kind == StmtKind::Assign && c.lhs->kind == ExprKind::Index) c.rhs = drop_branch(c.rhs);
      c.body = case_list(c.body);
      c.else_body = case_list(c.else_body);
    });
  }

  StmtPtr headers(const StmtPtr& s) {
    if (s->kind != StmtKind::For) return s;
    return with(s, [&](Stmt& c) {
      if (c.cond && c.cond->kind == ExprKind::Binary) {
        if (auto op = boundary_swap(c.cond->bop); op && *op != BinOp::Ne && *op != BinOp::Eq) {
          auto changed = ex::binary(*op, c.cond->args[0], c.cond->args[1]);
          if (hit("loop condition " + render(c.cond) + " becomes " + render(changed))) c.cond = changed;
        }
      }
      if (c.init && c.init->kind == StmtKind::Assign && !applied_) {
        auto start = shift(c.init->rhs, 1);
        if (hit("loop start " + render(c.init->rhs) + " becomes " + render(start)))
          c.init = with(c.init, [&](Stmt& i) { i.rhs = start; });
      }
      for (auto& x : c.body) x = headers(x);
    });
  }

  StmtPtr dimensions(const StmtPtr& s) {
    return with(s, [&](Stmt& c) {
      for (auto& d : c.decls) {
        bool symbolic = false;
        for (const auto& e : d.dims) symbolic = symbolic || (e && e->kind != ExprKind::IntLit);
        if (!symbolic) continue;
        std::vector<ExprPtr> hard;
        for (const auto& e : d.dims) hard.push_back(e ? ex::lit(kHardcodedDimension) : e);
        if (hit("array " + d.name + " declared " + render_type(d.type, hard))) d.dims = hard;
      }
    });
  }

  StmtList spurious(const StmtPtr& s) {
    // Innermost DP assignment and the start value of every enclosing loop.
    std::map<std::string, ExprPtr> starts;
    StmtPtr target;
    std::function<void(const StmtPtr&)> walk = [&](const StmtPtr& x) {
      if (target) return;
      if (x->kind == StmtKind::For && x->init && x->init->kind == StmtKind::Assign &&
          x->init->lhs->kind == ExprKind::Var)
        starts[x->init->lhs->name] = x->init->rhs;
      if (x->kind == StmtKind::Assign && x->lhs->kind == ExprKind::Index && lp_.is_dp_array(x->lhs->name)) {
        target = x;
        return;
      }
      for (const auto& y : x->body) walk(y);
      for (const auto& y : x->else_body) walk(y);
    };
    walk(s);
    if (!target) return {};
    auto info = lp_.symbols.find(target->lhs->name);
    bool is_bool = info != lp_.symbols.end() && info->second.type == ScalarType::Bool;
    StmtList out;
    for (int offset : {0, 1}) {
      if (offset == 1 && starts.empty()) break;
      std::map<std::string, ExprPtr> at;
      for (const auto& [v, e] : starts) at[v] = offset ? shift(e, 1) : e;
      auto cell = substitute(target->lhs, at);
      auto v = target->rhs;
      bool zero = v->kind == ExprKind::IntLit ? v->value == 0 : v->kind == ExprKind::BoolLit && v->value == 0;
      auto value = is_bool ? ex::boolean(zero) : ex::lit(zero ? 1 : 0);
      if (hit("extra initialization " + render(cell) + " = " + render(value)))
        out.push_back(st::assign(cell, value, target->loc));
    }
    return out;
  }

  ExprPtr output_expr(const ExprPtr& e) {
    if (!e || e->args.empty()) return e;
    auto c = std::make_shared<Expr>(*e);
    for (auto& a : c->args) a = output_expr(a);
    if (e->kind != ExprKind::Index) return c;
    for (std::size_t k = 0; k < c->args.size(); ++k) {
      const auto& sub = c->args[k];
      auto moved = shift(sub, sub->kind == ExprKind::IntLit && sub->value == 0 ? 1 : -1);
      if (hit("output reads " + render(ExprPtr(c)) + " at subscript " + render(moved))) {
        c->args[k] = moved;
        return c;
      }
    }
    return c;
  }

  StmtPtr output(const StmtPtr& s) {
    if (s->kind == StmtKind::For) {
      auto h = headers(s);
      if (applied_) return h;
    }
    return with(s, [&](Stmt& c) {
      if (c.kind == StmtKind::Assign) c.rhs = output_expr(c.rhs);
      if (c.kind == StmtKind::If) c.cond = output_expr(c.cond);
      if (c.kind == StmtKind::Write)
        for (auto& a : c.args) a = output_expr(a);
      for (auto& x : c.body) x = output(x);
      for (auto& x : c.else_body) x = output(x);
    });
  }

  const LabeledProgram& lp_;
  MutationKind kind_;
  int target_;
  int seen_ = 0;
  bool applied_ = false;
  std::string description_;
};

}  // namespace

std::vector<Mutant> generate_mutants(std::string_view source, const std::string& base_id, MutationKind kind) {
  auto lp = analyze_source(source);
  auto original = render(lp.program);
  std::vector<Mutant> out;
  for (int site = 0;; ++site) {
    Mutator m(lp, kind, site);
    auto p = m.run();
    if (!p) break;
    auto text = render(*p);
    if (text == original) continue;
    try {
      typecheck(parse(text));
    } catch (const Error&) {
      continue;
    }
    out.push_back({base_id + "-" + to_string(kind) + "-" + std::to_string(site), kind, m.description(), text});
  }
  return out;
}

std::vector<Mutant> generate_mutants(std::string_view source, const std::string& base_id) {
  std::vector<Mutant> out;
  for (auto k : kAllMutationKinds) {
    auto part = generate_mutants(source, base_id, k);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace dpfb
