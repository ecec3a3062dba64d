#include "dpfb/preprocess.hpp"

#include <set>

#include "dpfb/formula.hpp"
#include "dpfb/frontend.hpp"
#include "dpfb/render.hpp"

namespace dpfb {

namespace {

using Mut = std::shared_ptr<Stmt>;

Mut copy_of(const StmtPtr& s) { return std::make_shared<Stmt>(*s); }

StmtPtr at(StmtPtr s, const Location& loc) {
  auto c = copy_of(s);
  c->loc = loc;
  return c;
}

bool is_var(const ExprPtr& e, const std::string& name) { return e && e->kind == ExprKind::Var && e->name == name; }

bool is_int(const ExprPtr& e, std::int64_t v) { return e && e->kind == ExprKind::IntLit && e->value == v; }

bool same_value(const ExprPtr& a, const ExprPtr& b) { return same_expr(canonical_int(a), canonical_int(b)); }

bool list_mentions(const StmtList& body, const std::string& name) {
  return read_names(body).count(name) > 0 || written_names(body).count(name) > 0;
}

bool stmt_mentions(const StmtPtr& s, const std::string& name) { return list_mentions(StmtList{s}, name); }

// `v = v + k` / `v = v - k` with a literal k; returns the signed stride.
std::optional<std::int64_t> stride_of(const StmtPtr& s, std::string* var = nullptr) {
  if (!s || s->kind != StmtKind::Assign || s->aop != AssignOp::Set || s->lhs->kind != ExprKind::Var) return std::nullopt;
  const auto& v = s->lhs->name;
  const auto& r = s->rhs;
  if (r->kind != ExprKind::Binary || !is_var(r->args[0], v) || r->args[1]->kind != ExprKind::IntLit) return std::nullopt;
  if (r->bop != BinOp::Add && r->bop != BinOp::Sub) return std::nullopt;
  if (var) *var = v;
  return r->bop == BinOp::Add ? r->args[1]->value : -r->args[1]->value;
}

// ---------------------------------------------------------------------------
// Statement-local rewrites.

BinOp binop_of(AssignOp op) {
  switch (op) {
    case AssignOp::Add:
    case AssignOp::Inc: return BinOp::Add;
    case AssignOp::Sub:
    case AssignOp::Dec: return BinOp::Sub;
    case AssignOp::Mul: return BinOp::Mul;
    case AssignOp::Div: return BinOp::Div;
    case AssignOp::Mod: return BinOp::Mod;
    case AssignOp::Set: break;
  }
  return BinOp::Add;
}

StmtPtr plain_assign(const StmtPtr& s) {
  if (!s || s->kind != StmtKind::Assign || s->aop == AssignOp::Set) return s;
  auto rhs = (s->aop == AssignOp::Inc || s->aop == AssignOp::Dec) ? ex::lit(1) : s->rhs;
  return st::assign(s->lhs, ex::binary(binop_of(s->aop), s->lhs, rhs), s->loc);
}

StmtList split_decl(const StmtPtr& s) {
  bool any_init = false;
  for (const auto& d : s->decls) any_init = any_init || d.init;
  if (!any_init) return {s};
  StmtList out;
  std::vector<VarDecl> run;
  for (const auto& d : s->decls) {
    VarDecl bare = d;
    bare.init = nullptr;
    run.push_back(bare);
    if (d.init) {
      out.push_back(st::decl(run, s->loc));
      run.clear();
      out.push_back(st::assign(ex::var(d.name), d.init, s->loc));
    }
  }
  if (!run.empty()) out.push_back(st::decl(run, s->loc));
  return out;
}

// Single post-increment/decrement of a scalar in a loop condition.
struct PostUpdate {
  std::string var;
  BinOp op;
  ExprPtr cond;  // condition with the update replaced by the variable
};

std::optional<PostUpdate> post_update_in(const ExprPtr& cond) {
  int count = 0;
  PostUpdate pu;
  auto replaced = rewrite(cond, [&](const ExprPtr& n) -> ExprPtr {
    if (n->kind == ExprKind::Unary && (n->uop == UnOp::PostDec || n->uop == UnOp::PostInc) &&
        n->args[0]->kind == ExprKind::Var) {
      ++count;
      pu.var = n->args[0]->name;
      pu.op = n->uop == UnOp::PostInc ? BinOp::Add : BinOp::Sub;
      return n->args[0];
    }
    return nullptr;
  });
  if (count != 1) return std::nullopt;
  bool other_effects = false;
  rewrite(replaced, [&](const ExprPtr& n) -> ExprPtr {
    if (n->kind == ExprKind::Unary && n->uop != UnOp::Neg && n->uop != UnOp::Not) other_effects = true;
    if (n->kind == ExprKind::Call) other_effects = true;
    return nullptr;
  });
  if (other_effects) return std::nullopt;
  int uses = 0;
  rewrite(replaced, [&](const ExprPtr& n) -> ExprPtr {
    if (is_var(n, pu.var)) ++uses;
    return nullptr;
  });
  if (uses != 1) return std::nullopt;
  if (replaced->kind == ExprKind::Var) replaced = ex::binary(BinOp::Ne, replaced, ex::lit(0));
  pu.cond = replaced;
  return pu;
}

StmtList local_rewrites(const StmtList& body);

StmtPtr rewrite_children(const StmtPtr& s) {
  if (s->body.empty() && s->else_body.empty()) return s;
  auto c = copy_of(s);
  c->body = local_rewrites(s->body);
  c->else_body = local_rewrites(s->else_body);
  return c;
}

StmtList local_rewrites(const StmtList& body) {
  StmtList out;
  for (const auto& s0 : body) {
    auto s = rewrite_children(s0);
    switch (s->kind) {
      case StmtKind::Assign:
        out.push_back(plain_assign(s));
        break;
      case StmtKind::Decl:
        for (auto& d : split_decl(s)) out.push_back(d);
        break;
      case StmtKind::Read:
        if (s->args.size() > 1) {
          for (const auto& a : s->args) out.push_back(st::read(a, s->loc));
        } else {
          out.push_back(s);
        }
        break;
      case StmtKind::For: {
        auto c = copy_of(s);
        if (c->init && c->init->kind == StmtKind::Decl) {
          auto parts = split_decl(c->init);
          StmtPtr last = parts.back()->kind == StmtKind::Assign ? parts.back() : nullptr;
          if (last) parts.pop_back();
          for (auto& d : parts) out.push_back(at(d, s->loc));
          c->init = last;
        }
        c->init = plain_assign(c->init);
        c->step = plain_assign(c->step);
        out.push_back(c);
        break;
      }
      case StmtKind::While: {
        auto pu = post_update_in(s->cond);
        if (!pu) {
          out.push_back(s);
          break;
        }
        auto update = st::assign(ex::var(pu->var), ex::binary(pu->op, ex::var(pu->var), ex::lit(1)), s->loc);
        StmtList b{update};
        b.insert(b.end(), s->body.begin(), s->body.end());
        out.push_back(st::while_(pu->cond, b, s->loc));
        out.push_back(update);
        break;
      }
      default:
        out.push_back(s);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Adjacent-statement rewrites; `used` holds scalars read somewhere in the function.

StmtList pair_rewrites(const StmtList& body, const std::set<std::string>& used);

StmtPtr pair_children(const StmtPtr& s, const std::set<std::string>& used) {
  if (s->body.empty() && s->else_body.empty()) return s;
  auto c = copy_of(s);
  c->body = pair_rewrites(s->body, used);
  c->else_body = pair_rewrites(s->else_body, used);
  return c;
}

bool is_single_read(const StmtPtr& s) { return s->kind == StmtKind::Read && s->args.size() == 1; }

StmtList pair_rewrites(const StmtList& body0, const std::set<std::string>& used) {
  StmtList body;
  for (const auto& s : body0) body.push_back(pair_children(s, used));

  StmtList out;
  for (std::size_t k = 0; k < body.size(); ++k) {
    const auto& s = body[k];
    const StmtPtr next = k + 1 < body.size() ? body[k + 1] : nullptr;

    // i = e; while (c) { ...; i = i + k; }
    if (next && s->kind == StmtKind::Assign && s->aop == AssignOp::Set && s->lhs->kind == ExprKind::Var &&
        next->kind == StmtKind::While && !next->body.empty()) {
      const auto& i = s->lhs->name;
      std::string v;
      auto stride = stride_of(next->body.back(), &v);
      StmtList rest(next->body.begin(), next->body.end() - 1);
      if (stride && v == i && mentions(next->cond, i) && !written_names(rest).count(i)) {
        out.push_back(st::for_(s, next->cond, next->body.back(), rest, next->loc));
        ++k;
        continue;
      }
    }

    // scanf(&a[c]); for (i = c + 1; ...; i = i + 1) scanf(&a[i]);
    if (next && is_single_read(s) && s->args[0]->kind == ExprKind::Index && next->kind == StmtKind::For &&
        next->init && next->init->kind == StmtKind::Assign && next->init->lhs->kind == ExprKind::Var &&
        next->body.size() == 1 && is_single_read(next->body[0]) && stride_of(next->step) == 1) {
      const auto& i = next->init->lhs->name;
      const auto& first = s->args[0];
      const auto& inner = next->body[0]->args[0];
      std::string sv;
      stride_of(next->step, &sv);
      bool ok = sv == i && inner->kind == ExprKind::Index && inner->name == first->name &&
                inner->args.size() == first->args.size();
      int pos = -1;
      for (std::size_t d = 0; ok && d < inner->args.size(); ++d) {
        if (is_var(inner->args[d], i) && pos < 0) {
          pos = static_cast<int>(d);
        } else if (mentions(inner->args[d], i) || !same_expr(inner->args[d], first->args[d])) {
          ok = false;
        }
      }
      if (ok && pos >= 0) {
        const auto& c = first->args[static_cast<std::size_t>(pos)];
        if (same_value(ex::binary(BinOp::Add, c, ex::lit(1)), next->init->rhs) && !mentions(c, i)) {
          auto f = copy_of(next);
          f->init = st::assign(ex::var(i), canonical_int(c), next->init->loc);
          f->loc = s->loc;
          out.push_back(f);
          ++k;
          continue;
        }
      }
    }

    // scanf(&x); a[e] = x;
    if (next && is_single_read(s) && s->args[0]->kind == ExprKind::Var && next->kind == StmtKind::Assign &&
        next->aop == AssignOp::Set && next->lhs->kind == ExprKind::Index && is_var(next->rhs, s->args[0]->name) &&
        !mentions(next->lhs, s->args[0]->name)) {
      const auto& x = s->args[0]->name;
      out.push_back(st::read(next->lhs, s->loc));
      out.push_back(st::assign(ex::var(x), next->lhs, next->loc));
      ++k;
      continue;
    }

    // Dead copy left behind by the rewrite above.
    if (!out.empty() && s->kind == StmtKind::Assign && s->aop == AssignOp::Set && s->lhs->kind == ExprKind::Var &&
        !used.count(s->lhs->name) && is_single_read(out.back()) && same_expr(out.back()->args[0], s->rhs)) {
      continue;
    }

    out.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stream-consumed scalars inside a loop nest.

struct NestLoop {
  std::string index;
  ExprPtr start;
  ExprPtr extent;
};

std::optional<NestLoop> simple_loop(const Stmt& f) {
  if (f.kind != StmtKind::For || !f.init || f.init->kind != StmtKind::Assign || f.init->lhs->kind != ExprKind::Var)
    return std::nullopt;
  const auto& i = f.init->lhs->name;
  std::string sv;
  if (stride_of(f.step, &sv) != 1 || sv != i) return std::nullopt;
  auto start = canonical_int(f.init->rhs);
  if (start->kind != ExprKind::IntLit || start->value < 0) return std::nullopt;
  const auto& c = f.cond;
  if (c->kind != ExprKind::Binary || !is_var(c->args[0], i) || mentions(c->args[1], i)) return std::nullopt;
  ExprPtr extent;
  if (c->bop == BinOp::Lt) {
    extent = canonical_int(ex::binary(BinOp::Sub, c->args[1], start));
  } else if (c->bop == BinOp::Le) {
    extent = canonical_int(ex::binary(BinOp::Add, ex::binary(BinOp::Sub, c->args[1], start), ex::lit(1)));
  } else {
    return std::nullopt;
  }
  return NestLoop{i, start, extent};
}

class StreamLifter {
 public:
  StreamLifter(Program& p, std::set<std::string> names) : p_(p), names_(std::move(names)) {}

  StmtList run(const StmtList& body) { return walk(body); }

 private:
  StmtList walk(const StmtList& body) {
    StmtList out;
    for (std::size_t k = 0; k < body.size(); ++k) {
      const auto& s = body[k];
      if (s->kind == StmtKind::For) {
        auto loop = simple_loop(*s);
        bool outermost = stack_.empty();
        if (outermost) {
          outer_ = s.get();
          valid_ = true;
        }
        if (!loop) valid_ = false;
        if (loop) stack_.push_back(*loop);
        auto c = copy_of(s);
        c->body = walk(s->body);
        if (loop) stack_.pop_back();
        if (outermost) {
          for (auto& d : pending_) out.push_back(d);
          pending_.clear();
          valid_ = false;
        }
        out.push_back(c);
        continue;
      }
      if (s->kind == StmtKind::If || s->kind == StmtKind::While || s->kind == StmtKind::Block) {
        bool saved = valid_;
        valid_ = false;
        auto c = copy_of(s);
        c->body = walk(s->body);
        c->else_body = walk(s->else_body);
        valid_ = saved;
        if (stack_.empty()) {
          for (auto& d : pending_) out.push_back(d);
          pending_.clear();
        }
        out.push_back(c);
        continue;
      }
      if (valid_ && !stack_.empty() && stack_.size() <= 2 && is_single_read(s) &&
          s->args[0]->kind == ExprKind::Var) {
        StmtList tail(body.begin() + static_cast<long>(k) + 1, body.end());
        if (auto lifted = lift(s, tail)) {
          out.push_back(lifted->first);
          out.push_back(lifted->second);
          continue;
        }
      }
      out.push_back(s);
    }
    return out;
  }

  std::optional<std::pair<StmtPtr, StmtPtr>> lift(const StmtPtr& s, const StmtList& tail) {
    const auto& x = s->args[0]->name;
    if (!read_names(tail).count(x)) return std::nullopt;
    bool writes_array = false;
    for_each_stmt(outer_->body, [&](const StmtPtr& t) {
      writes_array = writes_array || (t->kind == StmtKind::Assign && t->lhs->kind == ExprKind::Index);
    });
    if (!writes_array) return std::nullopt;
    auto inside = written_names(outer_->body);
    inside.insert(outer_->init->lhs->name);
    std::vector<ExprPtr> dims, subs;
    for (const auto& l : stack_) {
      for (const auto& n : names_in(l.extent))
        if (inside.count(n)) return std::nullopt;
      dims.push_back(l.extent);
      subs.push_back(canonical_int(ex::binary(BinOp::Sub, ex::var(l.index), l.start)));
    }
    std::string name = x + "_in";
    for (int n = 2; names_.count(name); ++n) name = x + "_in" + std::to_string(n);
    names_.insert(name);
    VarDecl d{name, ScalarType::Int, dims, nullptr};
    pending_.push_back(st::decl({d}, outer_->loc));
    auto cell = ex::index(name, subs);
    p_.notes.push_back(x + " is read one value at a time inside a loop; the values are kept in the input array " +
                       name + render_type(ScalarType::Int, dims).substr(3));
    return std::make_pair(st::read(cell, s->loc), st::assign(ex::var(x), cell, s->loc));
  }

  Program& p_;
  std::set<std::string> names_;
  std::vector<NestLoop> stack_;
  const Stmt* outer_ = nullptr;
  bool valid_ = false;
  StmtList pending_;
};

std::set<std::string> all_names(const Program& p) {
  std::set<std::string> out;
  for_each_stmt(p, [&](const StmtPtr& s) {
    for (const auto& d : s->decls) out.insert(d.name);
  });
  for (const auto& f : p.functions) {
    out.insert(f.name);
    for (const auto& prm : f.params) out.insert(prm.name);
  }
  return out;
}

Program one_pass(const Program& p) {
  Program q = p;
  for (auto& f : q.functions) f.body = local_rewrites(f.body);
  for (auto& f : q.functions) f.body = pair_rewrites(f.body, read_names(f.body));
  auto names = all_names(q);
  for (auto& f : q.functions) {
    StreamLifter lifter(q, names);
    f.body = lifter.run(f.body);
    names = all_names(q);
  }
  renumber(q);
  return q;
}

}  // namespace

Program preprocess(const Program& p) {
  Program cur = p;
  renumber(cur);
  for (int round = 0; round < 8; ++round) {
    Program next = one_pass(cur);
    bool stable = render(next) == render(cur) && next.notes == cur.notes;
    cur = std::move(next);
    if (stable) break;
  }
  return cur;
}

Program strip_testcase_loop(const Program& p) {
  const auto& body = p.main().body;
  std::size_t k = 0;
  while (k < body.size() && body[k]->kind == StmtKind::Decl) ++k;
  if (k >= body.size() || !is_single_read(body[k]) || body[k]->args[0]->kind != ExprKind::Var) return p;
  const std::size_t read_at = k;
  const std::string t = body[k]->args[0]->name;
  ++k;
  StmtList between;
  while (k < body.size() && body[k]->kind == StmtKind::Decl) between.push_back(body[k++]);
  if (k >= body.size()) return p;
  const auto& loop = body[k];
  StmtList trailing(body.begin() + static_cast<long>(k) + 1, body.end());
  for (const auto& s : trailing)
    if (s->kind != StmtKind::Return) return p;

  std::optional<std::string> counter;
  bool shape = false;
  if (loop->kind == StmtKind::While) {
    auto pu = post_update_in(loop->cond);
    if (pu && pu->var == t && pu->op == BinOp::Sub) {
      const auto& c = pu->cond;
      shape = c->kind == ExprKind::Binary && is_var(c->args[0], t) && is_int(c->args[1], 0) &&
              (c->bop == BinOp::Ne || c->bop == BinOp::Gt);
    }
  } else if (loop->kind == StmtKind::For && loop->init && loop->cond && loop->step) {
    const StmtPtr& init = loop->init;
    std::string kv;
    ExprPtr start;
    if (init->kind == StmtKind::Assign && init->aop == AssignOp::Set && init->lhs->kind == ExprKind::Var) {
      kv = init->lhs->name;
      start = init->rhs;
    } else if (init->kind == StmtKind::Decl && init->decls.size() == 1 && init->decls[0].init &&
               init->decls[0].dims.empty()) {
      kv = init->decls[0].name;
      start = init->decls[0].init;
    }
    const auto& c = loop->cond;
    auto step = plain_assign(loop->step);
    std::string sv;
    if (!kv.empty() && stride_of(step, &sv) == 1 && sv == kv && c->kind == ExprKind::Binary &&
        is_var(c->args[0], kv) && is_var(c->args[1], t)) {
      shape = (c->bop == BinOp::Lt && is_int(start, 0)) || (c->bop == BinOp::Le && is_int(start, 1));
      counter = kv;
    }
  }
  if (!shape) return p;

  bool clean = !list_mentions(loop->body, t) && !list_mentions(trailing, t) && !list_mentions(between, t);
  if (counter) clean = clean && !list_mentions(loop->body, *counter) && !list_mentions(trailing, *counter);
  for (const auto& f : p.functions)
    if (&f != &p.main()) clean = clean && !list_mentions(f.body, t);
  for (const auto& g : p.globals) clean = clean && !stmt_mentions(g, t);
  if (!clean) {
    Program q = p;
    q.notes.push_back("possible testcase loop over " + t + " left in place: its counter is used elsewhere");
    return q;
  }

  Program q = p;
  StmtList nb(body.begin(), body.begin() + static_cast<long>(read_at));
  nb.insert(nb.end(), between.begin(), between.end());
  nb.insert(nb.end(), loop->body.begin(), loop->body.end());
  nb.insert(nb.end(), trailing.begin(), trailing.end());
  q.main().body = nb;
  renumber(q);
  return q;
}

}  // namespace dpfb
