#include "dpfb/encoder.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>

#include "dpfb/error.hpp"
#include "dpfb/formula.hpp"
#include "dpfb/render.hpp"

namespace dpfb {

namespace {

[[noreturn]] void fail(const std::string& msg, int line = 0) { throw Error(ErrorKind::EncodingFailed, msg, line); }

bool is_token(const std::string& n) { return n.rfind("__", 0) == 0; }

bool is_temp(const LabeledProgram& lp, const std::string& n) {
  auto it = lp.symbols.find(n);
  return it != lp.symbols.end() && !it->second.is_array() && !lp.store.dp_scalars.count(n);
}

// 1: a and b are always equal, -1: never equal, 0: unknown.
int compare_linear(const ExprPtr& a, const ExprPtr& b) {
  if (same_expr(a, b)) return 1;
  auto d = linearize(ex::binary(BinOp::Sub, a, b));
  if (!d) return 0;
  bool zero_terms = std::all_of(d->terms.begin(), d->terms.end(), [](const auto& t) { return t.second == 0; });
  if (!zero_terms) return 0;
  return d->constant == 0 ? 1 : -1;
}

// Same cell: 1 always, -1 never, 0 depends; `cond` receives the equality.
int same_cell(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b, ExprPtr& cond) {
  if (a.size() != b.size()) return -1;
  std::vector<ExprPtr> eqs;
  for (std::size_t k = 0; k < a.size(); ++k) {
    int c = compare_linear(a[k], b[k]);
    if (c < 0) return -1;
    if (c == 0) eqs.push_back(ex::eq(a[k], b[k]));
  }
  if (eqs.empty()) return 1;
  cond = ex::conj_all(eqs);
  return 0;
}

// Value of `array[subs]` after `writes` ran from the pre-state.
ExprPtr read_after(const std::string& array, const std::vector<ExprPtr>& subs, const std::vector<PathWrite>& writes,
                   ExprPtr base) {
  ExprPtr v = std::move(base);
  for (const auto& w : writes) {
    if (w.target != array) continue;
    ExprPtr cond;
    int s = same_cell(subs, w.subs, cond);
    if (s > 0) v = w.value;
    else if (s == 0) v = ex::ite(cond, w.value, v);
  }
  return v;
}

ExprPtr resolve(const ExprPtr& e, const std::vector<PathWrite>& writes) {
  if (writes.empty()) return e;
  return rewrite(e, [&](const ExprPtr& n) -> ExprPtr {
    if (n->kind != ExprKind::Index) return nullptr;
    return read_after(n->name, n->args, writes, n);
  });
}

struct PathState {
  ExprPtr guard;
  std::vector<PathWrite> writes;
  std::set<int> lines;
  int reads = 0;
  int outs = 0;
};

class BodyEncoder {
 public:
  explicit BodyEncoder(const LabeledProgram& lp) : lp_(lp) {}

  std::vector<PathState> run(const StmtList& body) {
    std::vector<PathState> paths(1);
    paths[0].guard = ex::boolean(true);
    return walk(body, std::move(paths));
  }

 private:
  ExprPtr lift_temps(const Stmt& s, const ExprPtr& e) {
    std::set<std::string> vars;
    collect_vars(e, vars);
    std::map<std::string, ExprPtr> m;
    for (const auto& v : vars) {
      if (!is_temp(lp_, v)) continue;
      const auto* gs = lp_.store.find(s.loc.ordinal, v);
      if (!gs || gs->empty()) fail("value of `" + v + "` at line " + std::to_string(s.loc.line) + " is unknown", s.loc.line);
      m[v] = ite_chain(*gs);
    }
    return substitute(e, m);
  }

  std::vector<PathState> walk(const StmtList& body, std::vector<PathState> paths) {
    for (const auto& sp : body) {
      const Stmt& s = *sp;
      switch (s.kind) {
        case StmtKind::Decl:
          for (const auto& d : s.decls)
            if (!d.dims.empty()) fail("array declared inside a loop body", s.loc.line);
          break;
        case StmtKind::Block:
          paths = walk(s.body, std::move(paths));
          break;
        case StmtKind::Assign:
          assign(s, paths);
          break;
        case StmtKind::Read:
          for (const auto& a : s.args) {
            if (a->kind != ExprKind::Index) fail("scalar read inside an array statement", s.loc.line);
            for (auto& p : paths) {
              std::vector<ExprPtr> subs;
              for (const auto& x : a->args) subs.push_back(resolve(x, p.writes));
              p.writes.push_back({a->name, subs, ex::var("__read_" + std::to_string(p.reads++))});
              p.lines.insert(s.loc.line);
            }
          }
          break;
        case StmtKind::Write:
          for (const auto& a : s.args) {
            auto v = lift_temps(s, a);
            if (has_call(v)) fail("printed value calls a function", s.loc.line);
            for (auto& p : paths) {
              p.writes.push_back({"__out_" + std::to_string(p.outs++), {}, resolve(v, p.writes)});
              p.lines.insert(s.loc.line);
            }
          }
          break;
        case StmtKind::If: {
          auto it = lp_.store.conditions.find(s.loc.ordinal);
          if (it == lp_.store.conditions.end()) fail("condition at line " + std::to_string(s.loc.line) + " could not be lifted", s.loc.line);
          if (has_call(it->second)) fail("condition calls a function", s.loc.line);
          std::vector<PathState> then_paths, else_paths;
          for (const auto& p : paths) {
            auto c = resolve(it->second, p.writes);
            PathState t = p, e = p;
            t.guard = fold(ex::conj(p.guard, c));
            e.guard = fold(ex::conj(p.guard, fold(ex::neg(c))));
            if (!ex::is_false(t.guard)) then_paths.push_back(std::move(t));
            if (!ex::is_false(e.guard)) else_paths.push_back(std::move(e));
          }
          then_paths = walk(s.body, std::move(then_paths));
          else_paths = walk(s.else_body, std::move(else_paths));
          paths = std::move(then_paths);
          for (auto& p : else_paths) paths.push_back(std::move(p));
          break;
        }
        case StmtKind::For:
        case StmtKind::While:
          fail("loop nest is not perfect", s.loc.line);
        case StmtKind::ExprStmt:
          fail("expression statement `" + render(s.rhs) + "` inside an array statement", s.loc.line);
        case StmtKind::Return:
          fail("return inside an array statement", s.loc.line);
      }
    }
    return paths;
  }

  void assign(const Stmt& s, std::vector<PathState>& paths) {
    if (s.lhs->kind == ExprKind::Var) {
      const auto& n = s.lhs->name;
      if (lp_.is_input(n)) fail("input `" + n + "` is reassigned", s.loc.line);
      if (lp_.loop_indices.count(n)) fail("loop index `" + n + "` is assigned in the body", s.loc.line);
      return;  // temporaries are tracked through Σ
    }
    const auto& root = s.lhs->name;
    if (!lp_.is_dp_array(root)) fail("array `" + root + "` is written but is not a DP array", s.loc.line);
    auto it = lp_.store.assignments.find(s.loc.ordinal);
    if (it == lp_.store.assignments.end() || it->second.empty())
      fail("temporaries in the assignment to `" + render(s.lhs) + "` could not be eliminated", s.loc.line);
    const auto& variants = it->second;
    for (const auto& v : variants)
      if (!same_expr(v.lhs, variants[0].lhs)) fail("target cell of line " + std::to_string(s.loc.line) + " is not unique", s.loc.line);
    std::vector<GuardedExpr> values;
    for (const auto& v : variants) values.push_back({v.guard, v.rhs});
    auto value = ite_chain(values);
    if (has_call(value)) fail("assigned value calls a function", s.loc.line);
    for (auto& p : paths) {
      std::vector<ExprPtr> subs;
      for (const auto& x : variants[0].lhs->args) subs.push_back(resolve(x, p.writes));
      auto v = resolve(value, p.writes);
      p.writes.push_back({root, subs, v});
      p.lines.insert(s.loc.line);
    }
  }

  const LabeledProgram& lp_;
};

ExprPtr level_space(const LoopLevel& l) {
  auto v = ex::var(l.index);
  auto from = ex::binary(l.stride > 0 ? BinOp::Ge : BinOp::Le, v, l.start);
  auto f = ex::conj(from, l.cond);
  if (std::llabs(l.stride) > 1) {
    auto m = ex::binary(BinOp::Mod, ex::binary(BinOp::Sub, v, l.start), ex::lit(std::llabs(l.stride)));
    f = ex::conj(f, ex::eq(m, ex::lit(0)));
  }
  return f;
}

ExprPtr iteration_space(const Nest& n) {
  ExprPtr f = ex::boolean(true);
  for (const auto& l : n.levels) f = ex::conj(f, level_space(l));
  return f;
}

ExprPtr work_guard(const BodyFormula& b) {
  std::vector<ExprPtr> gs;
  for (const auto& p : b.paths)
    if (!p.is_frame()) gs.push_back(p.guard);
  return fold(ex::disj_all(gs));
}

std::string strip(const std::string& tagged) { return tagged.size() > 2 && tagged[1] == '.' ? tagged.substr(2) : tagged; }

ExprPtr rename_with(const ExprPtr& e, const std::function<std::string(const std::string&)>& f) {
  std::map<std::string, std::string> m;
  for (const auto& n : names_in(e)) m[n] = f(n);
  return rename(e, m);
}

StmtPtr rename_stmt(const StmtPtr& s, const std::map<std::string, std::string>& m) {
  if (!s) return s;
  auto c = std::make_shared<Stmt>(*s);
  if (c->lhs) c->lhs = rename(c->lhs, m);
  if (c->rhs) c->rhs = rename(c->rhs, m);
  if (c->cond) c->cond = rename(c->cond, m);
  for (auto& a : c->args) a = rename(a, m);
  c->init = rename_stmt(c->init, m);
  c->step = rename_stmt(c->step, m);
  for (auto& b : c->body) b = rename_stmt(b, m);
  for (auto& b : c->else_body) b = rename_stmt(b, m);
  return c;
}

}  // namespace

ExprPtr ite_chain(const std::vector<GuardedExpr>& variants) {
  if (variants.empty()) fail("no value variants");
  ExprPtr v = variants.back().expr;
  for (std::size_t k = variants.size() - 1; k-- > 0;) {
    auto g = fold(variants[k].guard);
    if (ex::is_true(g)) v = variants[k].expr;
    else if (!ex::is_false(g)) v = ex::ite(g, variants[k].expr, v);
  }
  return v;
}

StmtPtr replace_nest_body(const StmtPtr& nest, const StmtList& body) {
  if (nest->kind != StmtKind::For) return st::block(body, nest->loc);
  auto copy = std::make_shared<Stmt>(*nest);
  if (nest->body.size() == 1 && nest->body[0]->kind == StmtKind::For) copy->body = {replace_nest_body(nest->body[0], body)};
  else copy->body = body;
  return copy;
}

StmtPtr build_nest(const std::vector<StmtPtr>& headers, const StmtList& body) {
  if (headers.empty()) return st::block(body);
  StmtList inner = body;
  for (std::size_t k = headers.size(); k-- > 0;) {
    auto copy = std::make_shared<Stmt>(*headers[k]);
    copy->body = inner;
    inner = {copy};
  }
  return inner[0];
}

BodyFormula encode_body(const TopLevel& t, const LabeledProgram& lp) {
  auto n = as_nest(t.stmt);
  if (!n) fail("statement at line " + std::to_string(t.stmt->loc.line) + " is not a canonical loop nest", t.stmt->loc.line);
  BodyEncoder enc(lp);
  BodyFormula out;
  for (auto& p : enc.run(n->body)) out.paths.push_back({p.guard, std::move(p.writes), std::move(p.lines)});
  return out;
}

// ---------------------------------------------------------------------------

PairEncoding::PairEncoding(const LabeledProgram& ref, const TopLevel& r, const LabeledProgram& cand, const TopLevel& c,
                           const VariableMap& sigma_hat, const std::vector<ExprPtr>& constraints,
                           const std::map<std::string, std::vector<ExprPtr>>& cand_dims)
    : ref_(ref), cand_(cand), r_(r), c_(c), sigma_hat_(sigma_hat), inverse_(sigma_hat.inverse()) {
  auto rn = as_nest(r.stmt);
  auto cn = as_nest(c.stmt);
  if (!rn || !cn) fail("statement is not a canonical loop nest");
  if (rn->levels.size() != cn->levels.size()) fail("loop depths differ");
  depth_ = static_cast<int>(rn->levels.size());

  auto ref_plain = encode_body(r, ref);
  auto cand_plain = encode_body(c, cand);
  phi1_ = tag_body(ref_plain, true, true);
  phi2_ = tag_body(cand_plain, false, true);

  for (const auto& [name, info] : cand.symbols)
    if (info.is_array() && info.type == ScalarType::Bool) bool_arrays_.insert("c." + name);
  for (const auto& [name, info] : ref.symbols)
    if (info.is_array() && info.type == ScalarType::Bool) bool_arrays_.insert("r." + name);

  for (const auto& [name, info] : ref.symbols) {
    if (!info.is_array()) continue;
    std::vector<ExprPtr> tagged;
    for (const auto& d : info.dims) tagged.push_back(d ? tag_ref(d) : nullptr);
    dims_["r." + name] = tagged;
  }
  for (const auto& [name, info] : cand.symbols) {
    if (!info.is_array()) continue;
    const auto& dims = cand_dims.count(name) ? cand_dims.at(name) : info.dims;
    std::vector<ExprPtr> tagged;
    for (const auto& d : dims) tagged.push_back(d ? tag_cand(d, true) : nullptr);
    dims_["c." + name] = tagged;
  }

  std::vector<ExprPtr> cons;
  for (const auto& k : constraints) cons.push_back(tag_ref(k));
  auto cons_f = ex::conj_all(cons);
  auto iter_r = tag_ref(iteration_space(*rn));
  pre_ = ex::conj(iter_r, cons_f);

  if (depth_ == 0) {
    phi_ = ex::boolean(true);
    phi_cover_ = ex::boolean(true);
    return;
  }
  auto iter_c = tag_cand(iteration_space(*cn), false);
  auto sep2 = tag_body(cand_plain, false, false);
  std::vector<ExprPtr> corr;
  for (const auto& [a, b] : sigma_hat.pairs) {
    auto it = ref.symbols.find(a);
    if (it == ref.symbols.end() || it->second.is_array()) continue;
    corr.push_back(ex::eq(ex::var("r." + a), ex::var("c." + b)));
  }
  auto hyp = ex::conj(ex::conj_all(corr), cons_f);
  auto g_r = work_guard(phi1_);
  auto g_c = work_guard(sep2);
  auto body = ex::iff(ex::conj(iter_r, g_r), ex::conj(iter_c, g_c));
  phi_ = ex::implies(ex::conj(hyp, aliasing(ex::conj(hyp, body))), body);
  auto cover = ex::conj(ex::implies(iter_r, iter_c), ex::implies(ex::conj(iter_c, g_c), iter_r));
  phi_cover_ = ex::implies(ex::conj(hyp, aliasing(ex::conj(hyp, cover))), cover);
}

ExprPtr PairEncoding::tag_ref(const ExprPtr& e) const {
  return rename_with(e, [](const std::string& n) { return is_token(n) ? n : "r." + n; });
}

ExprPtr PairEncoding::tag_cand(const ExprPtr& e, bool shared) const {
  return rename_with(e, [&](const std::string& n) -> std::string {
    if (is_token(n)) return n;
    auto it = cand_.symbols.find(n);
    bool array = it != cand_.symbols.end() && it->second.is_array();
    if (!array && shared) {
      if (auto inv = inverse_.find(n); inv != inverse_.end()) return "r." + inv->second;
    }
    return "c." + n;
  });
}

BodyFormula PairEncoding::tag_body(const BodyFormula& b, bool ref, bool shared) const {
  auto tag = [&](const ExprPtr& e) { return ref ? tag_ref(e) : tag_cand(e, shared); };
  BodyFormula out;
  for (const auto& p : b.paths) {
    GuardedPath q;
    q.guard = tag(p.guard);
    q.lines = p.lines;
    for (const auto& w : p.writes) {
      PathWrite x;
      x.target = is_token(w.target) ? w.target : (ref ? "r." : "c.") + w.target;
      for (const auto& s : w.subs) x.subs.push_back(tag(s));
      x.value = tag(w.value);
      q.writes.push_back(std::move(x));
    }
    out.paths.push_back(std::move(q));
  }
  return out;
}

std::string PairEncoding::array_class(const std::string& tagged) const {
  auto plain = strip(tagged);
  if (tagged.rfind("r.", 0) == 0) {
    auto it = sigma_hat_.pairs.find(plain);
    return it != sigma_hat_.pairs.end() ? it->second : "#" + tagged;
  }
  return plain;
}

ExprPtr PairEncoding::aliasing(const ExprPtr& f) const {
  std::vector<ExprPtr> all;
  collect_accesses(f, all);
  std::vector<ExprPtr> acc;
  std::set<std::string> seen;
  for (const auto& a : all)
    if (seen.insert(render(a)).second) acc.push_back(a);
  std::vector<ExprPtr> out;
  for (std::size_t x = 0; x < acc.size(); ++x) {
    if (bool_arrays_.count(acc[x]->name)) {
      out.push_back(ex::binary(BinOp::Ge, acc[x], ex::lit(0)));
      out.push_back(ex::binary(BinOp::Le, acc[x], ex::lit(1)));
    }
    for (std::size_t y = x + 1; y < acc.size(); ++y) {
      const auto& a = acc[x];
      const auto& b = acc[y];
      if (a->args.size() != b->args.size() || array_class(a->name) != array_class(b->name)) continue;
      ExprPtr cond;
      int s = same_cell(a->args, b->args, cond);
      if (s < 0) continue;
      out.push_back(s > 0 ? ex::eq(a, b) : ex::implies(cond, ex::eq(a, b)));
    }
  }
  return ex::conj_all(out);
}

ExprPtr PairEncoding::entails(const ExprPtr& f) const {
  return ex::implies(ex::conj(pre_, aliasing(ex::conj(pre_, f))), f);
}

ExprPtr PairEncoding::psi(const BodyFormula& candidate) const {
  struct Cell {
    std::string ref_target, cand_target;
    std::vector<ExprPtr> subs;
  };
  std::map<std::string, std::string> ref_of_class;
  for (const auto& [a, b] : sigma_hat_.pairs) ref_of_class[b] = "r." + a;
  std::vector<Cell> cells;
  std::set<std::string> keys;
  auto add = [&](const PathWrite& w, bool ref_side) {
    Cell c;
    if (is_token(w.target)) {
      c.ref_target = c.cand_target = w.target;
    } else {
      auto cls = array_class(w.target);
      if (ref_side) {
        c.ref_target = w.target;
        c.cand_target = "c." + cls;
      } else {
        auto it = ref_of_class.find(cls);
        if (it == ref_of_class.end()) fail("candidate writes `" + strip(w.target) + "` which has no reference counterpart");
        c.ref_target = it->second;
        c.cand_target = w.target;
      }
      if (cls.rfind('#', 0) == 0) fail("reference writes unmapped array `" + strip(w.target) + "`");
    }
    c.subs = w.subs;
    std::string key = c.cand_target + "|";
    for (const auto& s : c.subs) key += render(canonical_int(s)) + ",";
    if (keys.insert(key).second) cells.push_back(std::move(c));
  };
  for (const auto& p : phi1_.paths)
    for (const auto& w : p.writes) add(w, true);
  for (const auto& p : candidate.paths)
    for (const auto& w : p.writes) add(w, false);

  auto final_value = [](const BodyFormula& b, const std::string& target, const std::vector<ExprPtr>& subs) {
    ExprPtr base = subs.empty() ? ex::var(target) : ex::index(target, subs);
    std::vector<GuardedExpr> vs;
    for (const auto& p : b.paths) vs.push_back({p.guard, read_after(target, subs, p.writes, base)});
    return ite_chain(vs);
  };
  std::vector<ExprPtr> post;
  for (const auto& c : cells)
    post.push_back(ex::eq(final_value(phi1_, c.ref_target, c.subs), final_value(candidate, c.cand_target, c.subs)));
  return entails(ex::conj_all(post));
}

ExprPtr PairEncoding::translate(const ExprPtr& ref_expr) const {
  return rename_with(ref_expr, [&](const std::string& n) -> std::string {
    if (n.rfind("r.", 0) != 0) return n;
    auto plain = strip(n);
    auto it = ref_.symbols.find(plain);
    if (it != ref_.symbols.end() && it->second.is_array()) {
      auto m = sigma_hat_.pairs.find(plain);
      if (m == sigma_hat_.pairs.end()) fail("reference array `" + plain + "` has no candidate counterpart");
      return "c." + m->second;
    }
    return n;
  });
}

GuardedPath PairEncoding::translate(const GuardedPath& ref_path) const {
  GuardedPath out;
  out.guard = translate(ref_path.guard);
  out.lines = ref_path.lines;
  for (const auto& w : ref_path.writes) {
    PathWrite x;
    if (is_token(w.target)) {
      x.target = w.target;
    } else {
      auto m = sigma_hat_.pairs.find(strip(w.target));
      if (m == sigma_hat_.pairs.end()) fail("reference array `" + strip(w.target) + "` has no candidate counterpart");
      x.target = "c." + m->second;
    }
    for (const auto& s : w.subs) x.subs.push_back(translate(s));
    x.value = translate(w.value);
    out.writes.push_back(std::move(x));
  }
  return out;
}

ExprPtr PairEncoding::candidate_names(const ExprPtr& e) const {
  return rename_with(e, [&](const std::string& n) -> std::string {
    if (n.rfind("r.", 0) == 0) return sigma_hat_(strip(n));
    if (n.rfind("c.", 0) == 0) return strip(n);
    return n;
  });
}

StmtList PairEncoding::to_source(const BodyFormula& candidate, const std::set<std::string>& taken) const {
  int fresh = 0;
  auto temp = [&]() {
    std::string n;
    do n = "fb_t" + std::to_string(fresh++);
    while (taken.count(n));
    return n;
  };
  auto path_stmts = [&](const GuardedPath& p) {
    StmtList out;
    bool parallel = p.writes.size() > 1;
    std::vector<ExprPtr> values;
    std::vector<std::vector<ExprPtr>> subs;
    for (const auto& w : p.writes) {
      auto v = candidate_names(w.value);
      std::vector<ExprPtr> s;
      for (const auto& x : w.subs) s.push_back(candidate_names(x));
      bool is_read = v->kind == ExprKind::Var && v->name.rfind("__read_", 0) == 0;
      for (const auto& n : names_in(v))
        if (n.rfind("__read_", 0) == 0 && !is_read) fail("input value used in a computation");
      if (parallel && !is_read) {
        auto t = temp();
        out.push_back(st::decl({VarDecl{t, ScalarType::Int, {}, nullptr}}));
        out.push_back(st::assign(ex::var(t), v));
        v = ex::var(t);
        for (auto& x : s) {
          std::vector<ExprPtr> acc;
          collect_accesses(x, acc);
          if (acc.empty()) continue;
          auto u = temp();
          out.push_back(st::decl({VarDecl{u, ScalarType::Int, {}, nullptr}}));
          out.push_back(st::assign(ex::var(u), x));
          x = ex::var(u);
        }
      }
      values.push_back(v);
      subs.push_back(s);
    }
    for (std::size_t k = 0; k < p.writes.size(); ++k) {
      const auto& w = p.writes[k];
      const auto& v = values[k];
      if (w.target.rfind("__out_", 0) == 0) {
        out.push_back(st::write("%d", {v}));
      } else if (v->kind == ExprKind::Var && v->name.rfind("__read_", 0) == 0) {
        out.push_back(st::read(ex::index(strip(w.target), subs[k])));
      } else {
        out.push_back(st::assign(ex::index(strip(w.target), subs[k]), v));
      }
    }
    return out;
  };
  const auto& ps = candidate.paths;
  if (ps.empty()) return {};
  StmtList tail = path_stmts(ps.back());
  for (std::size_t k = ps.size() - 1; k-- > 0;) {
    auto g = fold(candidate_names(ps[k].guard));
    auto body = path_stmts(ps[k]);
    if (ex::is_true(g)) {
      tail = body;
      continue;
    }
    tail = {st::if_(g, body, tail)};
  }
  return tail;
}

std::vector<StmtPtr> PairEncoding::translated_headers() const {
  auto rn = as_nest(r_.stmt);
  std::map<std::string, std::string> m;
  for (const auto& [a, b] : sigma_hat_.pairs) m[a] = b;
  std::vector<StmtPtr> out;
  for (const auto& l : rn->levels) {
    auto h = rename_stmt(l.header, m);
    auto copy = std::make_shared<Stmt>(*h);
    copy->body.clear();
    out.push_back(copy);
  }
  return out;
}

std::vector<BoundsCheck> PairEncoding::bounds_checks(const BodyFormula& candidate) const {
  std::vector<BoundsCheck> out;
  std::set<std::string> seen;
  auto record = [&](const ExprPtr& a, const ExprPtr& cond) {
    auto it = dims_.find(a->name);
    if (it == dims_.end()) return;
    std::vector<ExprPtr> conds;
    for (std::size_t k = 0; k < a->args.size() && k < it->second.size(); ++k) {
      if (!it->second[k]) continue;
      conds.push_back(ex::binary(BinOp::Ge, a->args[k], ex::lit(0)));
      conds.push_back(ex::binary(BinOp::Lt, a->args[k], it->second[k]));
    }
    if (conds.empty()) return;
    auto key = render(a) + "@" + render(cond);
    if (!seen.insert(key).second) return;
    out.push_back({a, cond, ex::conj_all(conds)});
  };
  std::function<void(const ExprPtr&, const ExprPtr&)> visit = [&](const ExprPtr& e, const ExprPtr& cond) {
    if (!e) return;
    switch (e->kind) {
      case ExprKind::Index:
        for (const auto& a : e->args) visit(a, cond);
        record(e, cond);
        return;
      case ExprKind::Binary:
        visit(e->args[0], cond);
        if (e->bop == BinOp::And) visit(e->args[1], ex::conj(cond, e->args[0]));
        else if (e->bop == BinOp::Or) visit(e->args[1], ex::conj(cond, fold(ex::neg(e->args[0]))));
        else visit(e->args[1], cond);
        return;
      case ExprKind::Ternary:
        visit(e->args[0], cond);
        visit(e->args[1], ex::conj(cond, e->args[0]));
        visit(e->args[2], ex::conj(cond, fold(ex::neg(e->args[0]))));
        return;
      default:
        for (const auto& a : e->args) visit(a, cond);
    }
  };
  for (const auto& p : candidate.paths) {
    visit(p.guard, ex::boolean(true));
    for (const auto& w : p.writes) {
      for (const auto& s : w.subs) visit(s, p.guard);
      visit(w.value, p.guard);
      if (!w.subs.empty()) record(ex::index(w.target, w.subs), p.guard);
    }
  }
  return out;
}

ExprPtr PairEncoding::reference_in_bounds() const {
  std::vector<ExprPtr> all;
  for (const auto& b : bounds_checks(phi1_)) all.push_back(ex::implies(b.condition, b.in_bounds));
  return all.empty() ? ex::boolean(true) : ex::conj_all(all);
}

}  // namespace dpfb
