#include <algorithm>
#include <limits>

#include "dpfb/correspondence.hpp"
#include "dpfb/feedback.hpp"
#include "dpfb/formula.hpp"
#include "dpfb/frontend.hpp"
#include "dpfb/oracle.hpp"
#include "dpfb/render.hpp"

namespace dpfb {

namespace {

enum class Agg { Max, Min, Sum };

const char* agg_name(Agg a) {
  switch (a) {
    case Agg::Max: return "_max";
    case Agg::Min: return "_min";
    case Agg::Sum: return "_sum";
  }
  return "?";
}

// Value of a scalar during the walk: a plain expression or an aggregate over
// array[prefix][lo..hi].
struct Acc {
  ExprPtr value;
  bool segment = false;
  Agg agg = Agg::Max;
  std::string array;
  std::vector<ExprPtr> prefix;
  ExprPtr lo, hi;

  ExprPtr as_expr() const {
    if (!segment) return value;
    auto first = prefix, last = prefix;
    first.push_back(canonical_int(lo));
    last.push_back(canonical_int(hi));
    return ex::call(agg_name(agg), {ex::index(array, first), ex::index(array, last)});
  }
};

struct Binding {
  std::string array;
  std::vector<ExprPtr> prefix;
};

bool equal_int(const ExprPtr& a, const ExprPtr& b) {
  auto d = linearize(ex::binary(BinOp::Sub, a, b));
  if (!d) return same_expr(a, b);
  return d->constant == 0 &&
         std::all_of(d->terms.begin(), d->terms.end(), [](const auto& t) { return t.second == 0; });
}

ExprPtr plus(const ExprPtr& e, std::int64_t k) { return canonical_int(ex::binary(BinOp::Add, e, ex::lit(k))); }

class Lifter {
 public:
  explicit Lifter(const Program& p) : p_(p) {}

  bool lifted = false;

  // Returns false when the statements fall outside the recognized shapes.
  bool exec(const StmtList& body, std::map<std::string, Acc>& env, const std::map<std::string, Binding>& arrays,
            std::vector<ExprPtr>* printed, std::optional<Acc>* ret) {
    for (const auto& s : body) {
      switch (s->kind) {
        case StmtKind::Decl:
          for (const auto& d : s->decls) {
            if (!d.dims.empty()) return false;
            env.erase(d.name);
            if (d.init) {
              auto v = eval(d.init, env, arrays);
              if (!v) return false;
              env[d.name] = *v;
            }
          }
          break;
        case StmtKind::Assign: {
          if (s->lhs->kind != ExprKind::Var || s->aop != AssignOp::Set) return false;
          auto v = eval(s->rhs, env, arrays);
          if (!v) return false;
          env[s->lhs->name] = *v;
          break;
        }
        case StmtKind::Block:
          if (!exec(s->body, env, arrays, printed, ret)) return false;
          break;
        case StmtKind::For:
          if (!loop(s, env, arrays)) return false;
          break;
        case StmtKind::Write:
          if (!printed) return false;
          for (const auto& a : s->args) {
            auto v = eval(a, env, arrays);
            if (!v) return false;
            printed->push_back(v->as_expr());
          }
          break;
        case StmtKind::Return:
          if (!ret || !s->rhs) return false;
          {
            auto v = eval(s->rhs, env, arrays);
            if (!v) return false;
            *ret = *v;
          }
          return true;
        default:
          return false;
      }
    }
    return true;
  }

 private:
  ExprPtr bind(const ExprPtr& e, const std::map<std::string, Acc>& env, const std::map<std::string, Binding>& arrays,
               bool& ok) {
    return rewrite(e, [&](const ExprPtr& n) -> ExprPtr {
      if (n->kind == ExprKind::Var) {
        auto it = env.find(n->name);
        if (it == env.end()) return nullptr;
        if (it->second.segment) ok = false;
        return it->second.value;
      }
      if (n->kind == ExprKind::Index) {
        auto it = arrays.find(n->name);
        if (it == arrays.end()) return nullptr;
        auto subs = it->second.prefix;
        subs.insert(subs.end(), n->args.begin(), n->args.end());
        return ex::index(it->second.array, subs);
      }
      if (n->kind == ExprKind::Call) ok = false;
      return nullptr;
    });
  }

  std::optional<Acc> eval(const ExprPtr& e, const std::map<std::string, Acc>& env,
                          const std::map<std::string, Binding>& arrays) {
    if (e->kind == ExprKind::Var) {
      if (auto it = env.find(e->name); it != env.end()) return it->second;
    }
    if (e->kind == ExprKind::Call) return call(*e, env, arrays);
    bool ok = true;
    auto v = bind(e, env, arrays, ok);
    if (!ok) return std::nullopt;
    return Acc{v};
  }

  std::optional<Acc> call(const Expr& e, const std::map<std::string, Acc>& env,
                          const std::map<std::string, Binding>& arrays) {
    const FunctionDef* fn = p_.find(e.name);
    if (!fn || depth_ > 4 || fn->params.size() != e.args.size()) return std::nullopt;
    std::map<std::string, Acc> inner;
    std::map<std::string, Binding> bound;
    for (std::size_t k = 0; k < fn->params.size(); ++k) {
      const auto& prm = fn->params[k];
      const auto& arg = e.args[k];
      if (!prm.dims.empty()) {
        if (arg->kind != ExprKind::Var && arg->kind != ExprKind::Index) return std::nullopt;
        Binding b{arg->name, {}};
        if (auto it = arrays.find(arg->name); it != arrays.end()) b = it->second;
        for (const auto& sub : arg->args) {
          bool ok = true;
          b.prefix.push_back(bind(sub, env, arrays, ok));
          if (!ok) return std::nullopt;
        }
        bound[prm.name] = b;
        continue;
      }
      auto v = eval(arg, env, arrays);
      if (!v) return std::nullopt;
      inner[prm.name] = *v;
    }
    std::optional<Acc> ret;
    ++depth_;
    bool ok = exec(fn->body, inner, bound, nullptr, &ret);
    --depth_;
    if (!ok || !ret) return std::nullopt;
    return ret;
  }

  // The body maps (acc, element) to max, min or sum on sampled values.
  std::optional<Agg> classify(const StmtList& body, const std::string& acc) {
    Program q;
    q.globals = p_.globals;
    for (const auto& f : p_.functions)
      if (f.name != "main") q.functions.push_back(f);
    FunctionDef m;
    m.name = "main";
    m.return_type = ScalarType::Int;
    m.body.push_back(st::decl({VarDecl{acc, ScalarType::Int, {}, nullptr}, VarDecl{"fb_elem", ScalarType::Int, {}, nullptr}}));
    m.body.push_back(st::read(ex::var(acc)));
    m.body.push_back(st::read(ex::var("fb_elem")));
    for (const auto& s : body) m.body.push_back(s);
    m.body.push_back(st::write("%d", {ex::var(acc)}));
    m.body.push_back(st::ret(ex::lit(0)));
    q.functions.push_back(m);
    Program parsed;
    try {
      parsed = parse(render(q));
    } catch (const Error&) {
      return std::nullopt;
    }
    const std::int64_t samples[][2] = {{3, 5}, {5, 3}, {-2, 7}, {7, -2}, {0, 0}, {4, 4}, {-5, -9}, {10, 1}, {1, 10}};
    bool is_max = true, is_min = true, is_sum = true;
    for (const auto& s : samples) {
      auto r = interpret(parsed, {s[0], s[1]}, 10000);
      if (r.status != ExecStatus::Ok || r.outputs.size() != 1) return std::nullopt;
      auto out = r.outputs[0];
      is_max = is_max && out == std::max(s[0], s[1]);
      is_min = is_min && out == std::min(s[0], s[1]);
      is_sum = is_sum && out == s[0] + s[1];
    }
    if (is_max) return Agg::Max;
    if (is_min) return Agg::Min;
    if (is_sum) return Agg::Sum;
    return std::nullopt;
  }

  bool loop(const StmtPtr& s, std::map<std::string, Acc>& env, const std::map<std::string, Binding>& arrays) {
    auto nest = as_nest(s);
    if (!nest || nest->levels.size() != 1) return false;
    const auto& lvl = nest->levels[0];
    const auto& k = lvl.index;
    auto written = written_names(nest->body);
    if (written.size() != 1) return false;
    const std::string acc = *written.begin();
    if (acc == k || !env.count(acc)) return false;

    // Exactly one element access, with k as its last subscript.
    std::vector<ExprPtr> accesses;
    for_each_stmt(nest->body, [&](const StmtPtr& x) {
      for (const auto& e : own_exprs(*x)) collect_accesses(e, accesses);
    });
    if (accesses.empty()) return false;
    for (const auto& a : accesses)
      if (!same_expr(a, accesses[0])) return false;
    const auto& elem = accesses[0];
    if (elem->args.empty()) return false;
    const auto& last = elem->args.back();
    if (last->kind != ExprKind::Var || last->name != k) return false;
    for (std::size_t d = 0; d + 1 < elem->args.size(); ++d)
      if (mentions(elem->args[d], k)) return false;

    // Body over (acc, element) only.
    StmtList body;
    for (const auto& x : nest->body) {
      std::function<StmtPtr(const StmtPtr&)> repl = [&](const StmtPtr& st) -> StmtPtr {
        auto c = std::make_shared<Stmt>(*st);
        auto sub = [&](const ExprPtr& e) {
          return e ? rewrite(e, [&](const ExprPtr& n) -> ExprPtr {
            return same_expr(n, elem) ? ex::var("fb_elem") : nullptr;
          })
                   : e;
        };
        c->lhs = sub(c->lhs);
        c->rhs = sub(c->rhs);
        c->cond = sub(c->cond);
        for (auto& a : c->args) a = sub(a);
        for (auto& b : c->body) b = repl(b);
        for (auto& b : c->else_body) b = repl(b);
        return c;
      };
      body.push_back(repl(x));
    }
    std::set<std::string> free;
    for_each_stmt(body, [&](const StmtPtr& x) {
      for (const auto& e : own_exprs(*x)) collect_vars(e, free);
    });
    for (const auto& v : free)
      if (v != acc && v != "fb_elem") return false;
    auto agg = classify(body, acc);
    if (!agg) return false;

    std::int64_t step = lvl.stride;
    if (step != 1 && step != -1) return false;
    const auto& c = lvl.cond;
    if (c->kind != ExprKind::Binary || c->args[0]->kind != ExprKind::Var || c->args[0]->name != k) return false;
    ExprPtr bound = c->args[1];
    ExprPtr lo, hi;
    if (step == 1 && c->bop == BinOp::Lt) hi = plus(bound, -1);
    else if (step == 1 && c->bop == BinOp::Le) hi = canonical_int(bound);
    else if (step == -1 && c->bop == BinOp::Ge) lo = canonical_int(bound);
    else if (step == -1 && c->bop == BinOp::Gt) lo = plus(bound, 1);
    else return false;
    if (step == 1) lo = canonical_int(lvl.start);
    else hi = canonical_int(lvl.start);
    bool ok = true;
    lo = canonical_int(bind(lo, env, arrays, ok));
    hi = canonical_int(bind(hi, env, arrays, ok));
    if (!ok || mentions(lo, k) || mentions(hi, k)) return false;

    Binding target{elem->name, {}};
    if (auto it = arrays.find(elem->name); it != arrays.end()) target = it->second;
    for (std::size_t d = 0; d + 1 < elem->args.size(); ++d) {
      target.prefix.push_back(canonical_int(bind(elem->args[d], env, arrays, ok)));
      if (!ok) return false;
    }

    Acc seg;
    seg.segment = true;
    seg.agg = *agg;
    seg.array = target.array;
    seg.prefix = target.prefix;
    seg.lo = lo;
    seg.hi = hi;

    const Acc& init = env.at(acc);
    if (init.segment) return false;
    const auto& v = init.value;
    if (v->kind == ExprKind::IntLit) {
      const std::int64_t x = v->value;
      bool neutral = (*agg == Agg::Sum && x == 0) || (*agg == Agg::Max && x <= -1000000) ||
                     (*agg == Agg::Min && x >= 1000000);
      if (!neutral) return false;
    } else if (v->kind == ExprKind::Index && v->name == seg.array && v->args.size() == seg.prefix.size() + 1) {
      for (std::size_t d = 0; d < seg.prefix.size(); ++d)
        if (!equal_int(v->args[d], seg.prefix[d])) return false;
      const auto& at = v->args.back();
      if (equal_int(at, plus(lo, -1))) seg.lo = canonical_int(at);
      else if (equal_int(at, plus(hi, 1))) seg.hi = canonical_int(at);
      else if (*agg == Agg::Sum || !(equal_int(at, lo) || equal_int(at, hi))) return false;
    } else {
      return false;
    }
    env[acc] = seg;
    lifted = true;
    return true;
  }

  const Program& p_;
  int depth_ = 0;
};

ExprPtr normalized(const ExprPtr& e) {
  return normalize_commutative(rewrite(e, [](const ExprPtr& n) -> ExprPtr {
    if (n->kind != ExprKind::Index) return nullptr;
    std::vector<ExprPtr> subs;
    for (const auto& a : n->args) subs.push_back(canonical_int(a));
    return ex::index(n->name, subs);
  }));
}

std::string describe(const ExprPtr& e, bool with_aggregate) {
  if (e->kind == ExprKind::Call && e->args.size() == 2 && e->name.rfind("_", 0) == 0) {
    std::string what = e->name == "_max" ? "maximum" : e->name == "_min" ? "minimum" : "sum";
    std::string range = render(e->args[0]) + ",...," + render(e->args[1]);
    return with_aggregate ? what + " over " + range : range;
  }
  return render(e);
}

}  // namespace

std::optional<std::vector<ExprPtr>> lift_output_pattern(const LabeledProgram& lp) {
  StmtList outs;
  for (const auto& s : lp.program.main().body) {
    auto l = lp.label_of(*s);
    if (l && *l == Label::Output) outs.push_back(s);
  }
  if (outs.empty()) return std::nullopt;
  Lifter lifter(lp.program);
  std::map<std::string, Acc> env;
  std::vector<ExprPtr> printed;
  if (!lifter.exec(outs, env, {}, &printed, nullptr) || !lifter.lifted) return std::nullopt;
  bool any = std::any_of(printed.begin(), printed.end(), [](const ExprPtr& e) { return e->kind == ExprKind::Call; });
  if (!any) return std::nullopt;
  return printed;
}

std::vector<Correction> compare_outputs(const std::vector<ExprPtr>& ref_out, const std::vector<ExprPtr>& cand_out,
                                        const VariableMap& sigma) {
  std::vector<Correction> out;
  auto mapped = [&](const ExprPtr& e) { return normalized(rename(e, sigma.pairs)); };
  auto mismatch = [&](const std::string& suggested, const std::string& replaced) {
    Correction c;
    c.kind = CorrectionKind::OutputPattern;
    c.component = "output";
    c.guard = c.raw_guard = ex::boolean(true);
    c.suggested = suggested;
    c.replaced = replaced;
    out.push_back(std::move(c));
  };
  if (ref_out.size() != cand_out.size()) {
    std::string s, r;
    for (const auto& e : ref_out) s += (s.empty() ? "" : ", ") + describe(mapped(e), true);
    for (const auto& e : cand_out) r += (r.empty() ? "" : ", ") + describe(normalized(e), true);
    mismatch("output of " + s, r);
    return out;
  }
  for (std::size_t k = 0; k < ref_out.size(); ++k) {
    auto a = mapped(ref_out[k]);
    auto b = normalized(cand_out[k]);
    if (render(a) == render(b)) continue;
    bool same_agg = a->kind == ExprKind::Call && b->kind == ExprKind::Call && a->name == b->name;
    mismatch(describe(a, true), describe(b, !same_agg));
  }
  return out;
}

}  // namespace dpfb
