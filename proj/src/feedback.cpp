#include "dpfb/feedback.hpp"

#include <algorithm>
#include <chrono>

#include "dpfb/features.hpp"
#include "dpfb/formula.hpp"
#include "dpfb/frontend.hpp"
#include "dpfb/render.hpp"

namespace dpfb {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::VerifiedCorrect: return "VerifiedCorrect";
    case Verdict::Faulty: return "Faulty";
    case Verdict::Unlabeled: return "Unlabeled";
  }
  return "?";
}

std::string to_string(CorrectionKind k) {
  switch (k) {
    case CorrectionKind::Declaration: return "Declaration";
    case CorrectionKind::IterationSpace: return "IterationSpace";
    case CorrectionKind::ReplaceStatement: return "ReplaceStatement";
    case CorrectionKind::GuardSplit: return "GuardSplit";
    case CorrectionKind::TotalSubstitution: return "TotalSubstitution";
    case CorrectionKind::OutputPattern: return "OutputPattern";
    case CorrectionKind::OutOfBounds: return "OutOfBounds";
  }
  return "?";
}

std::string Correction::text() const {
  auto g = guard ? render(guard) : std::string("true");
  switch (kind) {
    case CorrectionKind::Declaration: {
      bool several = subject.find(" and ") != std::string::npos;
      return std::string(several ? "Types of " : "Type of ") + subject + " should be " + suggested;
    }
    case CorrectionKind::IterationSpace:
      return "Iterate with " + suggested + " instead of " + replaced;
    case CorrectionKind::TotalSubstitution:
      return "Replace the loop body by\n" + suggested + "instead of\n" + replaced;
    case CorrectionKind::OutOfBounds:
      return "Under guard " + g + ", access " + subject + " is outside its declared bounds " + replaced;
    default:
      break;
  }
  if (suggested.empty()) return "Under guard " + g + ", do not compute " + replaced;
  if (replaced.empty()) return "Under guard " + g + ", compute " + suggested;
  return "Under guard " + g + ", compute " + suggested + " instead of " + replaced;
}

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t ms_since(Clock::time_point t) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t).count();
}

int component_rank(const std::string& c) {
  static const std::vector<std::string> order = {"declaration", "input", "initialization", "update", "output"};
  auto it = std::find(order.begin(), order.end(), c);
  return static_cast<int>(it - order.begin());
}

std::string describe_writes(const PairEncoding& enc, const GuardedPath& p) {
  std::string out;
  for (const auto& w : p.writes) {
    if (!out.empty()) out += "; ";
    auto v = enc.candidate_names(w.value);
    if (w.target.rfind("__out_", 0) == 0) {
      out += "print " + render(v);
      continue;
    }
    std::vector<ExprPtr> subs;
    for (const auto& s : w.subs) subs.push_back(enc.candidate_names(s));
    auto cell = ex::index(w.target.substr(2), subs);
    if (v->kind == ExprKind::Var && v->name.rfind("__read_", 0) == 0) out += "read " + render(cell);
    else out += render(cell) + " = " + render(v);
  }
  return out;
}

std::string body_key(const BodyFormula& b) {
  std::string k;
  for (const auto& p : b.paths) {
    k += render(p.guard) + ":";
    for (const auto& w : p.writes) {
      k += w.target + "[";
      for (const auto& s : w.subs) k += render(s) + ",";
      k += "]=" + render(w.value) + ";";
    }
    k += "|";
  }
  return k;
}

int first_line(const GuardedPath& p, int fallback) { return p.lines.empty() ? fallback : *p.lines.begin(); }

std::string join_names(std::vector<std::string> names) {
  std::string out;
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (k) out += k + 1 == names.size() ? " and " : ", ";
    out += names[k];
  }
  return out;
}

StmtPtr find_decl(const Program& p, const std::string& name) {
  StmtPtr found;
  auto visit = [&](const StmtPtr& s) {
    if (found || s->kind != StmtKind::Decl) return;
    for (const auto& d : s->decls)
      if (d.name == name) found = s;
  };
  for_each_stmt(p.main().body, visit);
  for (const auto& g : p.globals) visit(g);
  return found;
}

// Declaration edits: remove the names from their declarations and declare
// them again once every scalar their dimensions use has been read.
void apply_declarations(Program& p, const std::map<std::string, VarDecl>& fixes) {
  if (fixes.empty()) return;
  for (const auto& f : p.functions) {
    if (f.name == "main") continue;
    for_each_stmt(f.body, [&](const StmtPtr& s) {
      for (const auto& e : own_exprs(*s))
        for (const auto& n : names_in(e))
          if (fixes.count(n)) throw Error(ErrorKind::EncodingFailed, "array `" + n + "` is used outside main");
    });
  }
  auto strip = [&](StmtList& list) {
    StmtList out;
    for (const auto& s : list) {
      if (s->kind != StmtKind::Decl) {
        out.push_back(s);
        continue;
      }
      auto c = std::make_shared<Stmt>(*s);
      c->decls.clear();
      for (const auto& d : s->decls)
        if (!fixes.count(d.name)) c->decls.push_back(d);
      if (!c->decls.empty()) out.push_back(c);
    }
    list = out;
  };
  strip(p.globals);
  auto& body = p.main().body;
  strip(body);
  std::set<std::string> dim_vars;
  for (const auto& [n, d] : fixes)
    for (const auto& e : d.dims)
      if (e) collect_vars(e, dim_vars);
  std::size_t pos = 0, first_use = body.size();
  for (std::size_t k = 0; k < body.size(); ++k) {
    auto w = written_names(StmtList{body[k]});
    for (const auto& v : dim_vars)
      if (w.count(v)) pos = k + 1;
    if (first_use == body.size()) {
      bool uses = false;
      for_each_stmt(StmtList{body[k]}, [&](const StmtPtr& s) {
        for (const auto& e : own_exprs(*s))
          for (const auto& n : names_in(e)) uses = uses || fixes.count(n) > 0;
      });
      if (uses) first_use = k;
    }
  }
  if (pos > first_use) throw Error(ErrorKind::EncodingFailed, "array used before its dimensions are known");
  std::vector<VarDecl> decls;
  for (const auto& [n, d] : fixes) decls.push_back(d);
  body.insert(body.begin() + static_cast<std::ptrdiff_t>(pos), st::decl(decls));
}

struct DeclFix {
  std::vector<Correction> corrections;
  std::map<std::string, VarDecl> fixes;  // candidate name -> new declaration
};

DeclFix declaration_fixes(const LabeledProgram& ref, const LabeledProgram& cand, const VariableMap& sigma) {
  DeclFix out;
  std::map<std::string, std::vector<std::string>> groups;  // suggested type -> names
  std::map<std::string, std::string> replaced;
  std::map<std::string, int> lines;
  for (const auto& [r, c] : sigma.pairs) {
    auto ri = ref.symbols.find(r);
    auto ci = cand.symbols.find(c);
    if (ri == ref.symbols.end() || ci == cand.symbols.end()) continue;
    const auto& rd = ri->second.dims;
    const auto& cd = ci->second.dims;
    if (rd.empty() || rd.size() != cd.size()) continue;
    bool hardcoded = false, expressible = true;
    std::vector<ExprPtr> dims;
    for (std::size_t k = 0; k < rd.size(); ++k) {
      if (!rd[k] || !cd[k]) {
        expressible = false;
        break;
      }
      auto names = names_in(rd[k]);
      for (const auto& n : names) expressible = expressible && ref.is_input(n) && sigma.pairs.count(n);
      if (!names.empty() && fold(cd[k])->kind == ExprKind::IntLit) hardcoded = true;
      dims.push_back(rename(rd[k], sigma.pairs));
    }
    if (!hardcoded || !expressible) continue;
    auto type = render_type(ci->second.type, dims);
    groups[type].push_back(c);
    replaced[type] = render_type(ci->second.type, cd);
    auto d = find_decl(cand.program, c);
    lines[type] = d ? d->loc.line : 0;
    out.fixes[c] = VarDecl{c, ci->second.type, dims, nullptr};
  }
  for (auto& [type, names] : groups) {
    std::sort(names.begin(), names.end());
    Correction x;
    x.kind = CorrectionKind::Declaration;
    x.component = "declaration";
    x.subject = join_names(names);
    x.suggested = type;
    x.replaced = replaced[type];
    x.line = lines[type];
    out.corrections.push_back(std::move(x));
  }
  return out;
}

struct Outcome {
  FeedbackReport report;
  bool editable = true;
  std::map<std::size_t, StmtList> overrides;
  std::map<std::string, VarDecl> decl_fixes;
  std::vector<FunctionDef> helpers;  // reference helpers copied into the candidate
};

class Session {
 public:
  Session(const LabeledProgram& ref, const LabeledProgram& cand, const Solver& solver, const FeedbackOptions& opt,
          const VariableMap& sigma, const std::vector<TopLevel>& R, const std::vector<TopLevel>& C)
      : ref_(ref), cand_(cand), solver_(solver), opt_(opt), sigma_(sigma), R_(R), C_(C) {
    for (const auto& [n, v] : cand.symbols) taken_.insert(n);
    for (const auto& f : cand.program.functions) taken_.insert(f.name);
  }

  Outcome run() {
    out_.report.sigma = sigma_.text();
    auto decl = declaration_fixes(ref_, cand_, sigma_);
    for (auto& c : decl.corrections) out_.report.corrections.push_back(c);
    out_.decl_fixes = decl.fixes;
    for (const auto& [n, d] : decl.fixes) cand_dims_[n] = d.dims;

    auto pi = control_correspondence(R_, C_, sigma_);
    std::vector<std::pair<std::size_t, std::size_t>> outputs;
    for (const auto& [a, b] : pi.pairs) {
      if (R_[a].label == Label::Output) {
        outputs.emplace_back(a, b);
        continue;
      }
      pair(a, b);
    }
    for (const auto& [a, b] : outputs) output_pair(a, b);
    return std::move(out_);
  }

 private:
  SolverVerdict check(const ExprPtr& f, PairTrace& t, const std::string& name) {
    auto v = solver_.check_validity(f);
    QueryRecord q{name, v.kind, v.elapsed_ms, true, v.diagnostic};
    if (v.kind == VerdictKind::Counterexample) q.countermodel_falsifies = evaluate(f, *v.model) == 0;
    t.queries.push_back(q);
    if (v.kind == VerdictKind::Unknown)
      throw Error(ErrorKind::UnlabeledSubmission, "solver gave no answer (" + v.diagnostic + ")");
    if (v.kind == VerdictKind::Counterexample && !q.countermodel_falsifies)
      throw Error(ErrorKind::UnlabeledSubmission, "countermodel does not falsify the query");
    return v;
  }

  static std::size_t matching_path(const BodyFormula& b, const Model& m) {
    auto lookup = [&](const Expr& x) -> std::optional<std::int64_t> {
      auto key = x.kind == ExprKind::Var ? x.name : render(std::make_shared<const Expr>(x));
      auto it = m.find(key);
      return it == m.end() ? 0 : it->second;
    };
    for (std::size_t k = 0; k < b.paths.size(); ++k) {
      auto v = evaluate(b.paths[k].guard, lookup);
      if (v && *v) return k;
    }
    throw Error(ErrorKind::NoMatchingGuard, "countermodel satisfies no guard");
  }

  void add_guarded(Correction c, const PairEncoding& enc, const ExprPtr& tagged_guard) {
    auto raw = enc.candidate_names(tagged_guard);
    auto simple = enc.candidate_names(solver_.simplify(fold(tagged_guard), enc.pre()));
    c.raw_guard = raw;
    c.guard = simple;
    out_.report.size_before += node_count(raw);
    out_.report.size_after += node_count(simple);
    out_.report.corrections.push_back(std::move(c));
  }

  void pair(std::size_t a, std::size_t b) {
    const auto& r = R_[a];
    const auto& c = C_[b];
    PairTrace t;
    t.component = to_string(r.label);
    t.ref_index = a;
    t.cand_index = b;
    t.ref_line = r.stmt->loc.line;
    t.cand_line = c.stmt->loc.line;
    auto hat = extend_with_indices(sigma_, r, c);
    PairEncoding enc(ref_, r, cand_, c, hat, opt_.constraints, cand_dims_);
    const std::size_t first_correction = out_.report.corrections.size();

    bool header_fix = false;
    if (!enc.straight_line()) {
      if (check(enc.phi(), t, "phi").kind == VerdictKind::Counterexample &&
          check(enc.phi_cover(), t, "phi_cover").kind == VerdictKind::Counterexample) {
        header_fix = true;
        Correction x;
        x.kind = CorrectionKind::IterationSpace;
        x.component = t.component;
        std::string s, old;
        for (const auto& h : enc.translated_headers()) s += (s.empty() ? "" : " ") + render_header(*h);
        auto cn = as_nest(c.stmt);
        for (const auto& l : cn->levels) old += (old.empty() ? "" : " ") + render_header(*l.header);
        x.suggested = s;
        x.replaced = old;
        x.line = c.stmt->loc.line;
        out_.report.corrections.push_back(std::move(x));
      }
    }

    BodyFormula phi2 = enc.phi2();
    std::set<std::string> seen{body_key(phi2)};
    bool valid = false;
    std::vector<std::size_t> origin;  // reference path of each refinement
    for (int k = 1;; ++k) {
      auto v = check(enc.psi(phi2), t, "psi_" + std::to_string(k));
      if (v.kind == VerdictKind::Valid) {
        valid = true;
        break;
      }
      if (t.refinements >= opt_.delta) break;
      const auto& m = *v.model;
      auto i1 = matching_path(enc.phi1(), m);
      auto i2 = matching_path(phi2, m);
      const auto& p1 = enc.phi1().paths[i1];
      const auto p2 = phi2.paths[i2];
      auto s1 = enc.translate(p1);
      auto same = check(enc.entails(ex::iff(p1.guard, p2.guard)), t, "guards_" + std::to_string(k));
      Correction x;
      x.component = t.component;
      x.suggested = describe_writes(enc, s1);
      x.replaced = describe_writes(enc, p2);
      x.line = first_line(p2, c.stmt->loc.line);
      BodyFormula next;
      for (std::size_t q = 0; q < phi2.paths.size(); ++q) {
        if (q != i2) {
          next.paths.push_back(phi2.paths[q]);
          continue;
        }
        if (same.kind == VerdictKind::Valid) {
          next.paths.push_back({p2.guard, s1.writes, p2.lines});
        } else {
          auto h = fold(ex::conj(p2.guard, s1.guard));
          auto h_rest = fold(ex::conj(p2.guard, fold(ex::neg(s1.guard))));
          next.paths.push_back({h, s1.writes, p2.lines});
          if (!ex::is_false(h_rest)) next.paths.push_back({h_rest, p2.writes, p2.lines});
        }
      }
      if (same.kind == VerdictKind::Valid) {
        x.kind = CorrectionKind::ReplaceStatement;
        add_guarded(std::move(x), enc, p2.guard);
      } else {
        x.kind = CorrectionKind::GuardSplit;
        add_guarded(std::move(x), enc, ex::conj(p2.guard, s1.guard));
      }
      if (!seen.insert(body_key(next)).second)
        throw Error(ErrorKind::UnlabeledSubmission, "refinement repeated a query");
      phi2 = std::move(next);
      origin.push_back(i1);
      ++t.refinements;
    }
    {
      auto from = out_.report.corrections.begin() + static_cast<std::ptrdiff_t>(first_correction + (header_fix ? 1 : 0));
      std::vector<std::pair<std::size_t, Correction>> keyed;
      for (auto it = from; it != out_.report.corrections.end(); ++it)
        keyed.emplace_back(origin[static_cast<std::size_t>(it - from)], std::move(*it));
      std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      for (auto it = from; it != out_.report.corrections.end(); ++it)
        *it = std::move(keyed[static_cast<std::size_t>(it - from)].second);
    }

    t.exited_valid = valid;
    if (!valid) {
      // Too many differences: the whole body is replaced.
      out_.report.corrections.resize(first_correction + (header_fix ? 1 : 0));
      BodyFormula whole;
      for (const auto& p : enc.phi1().paths) whole.paths.push_back(enc.translate(p));
      Correction x;
      x.kind = CorrectionKind::TotalSubstitution;
      x.component = t.component;
      x.line = c.stmt->loc.line;
      x.replaced = render(c.nest().body, 1);
      try {
        x.suggested = render(enc.to_source(whole, taken_), 1);
      } catch (const Error&) {
        x.suggested = "";
      }
      out_.report.corrections.push_back(std::move(x));
      phi2 = whole;
      t.total_substitution = true;
      t.final_psi_valid = check(enc.psi(phi2), t, "psi_total").kind == VerdictKind::Valid;
    }

    bounds(enc, phi2, t);

    if (out_.report.corrections.size() > first_correction) {
      try {
        auto body = enc.to_source(phi2, taken_);
        auto stmt = header_fix ? build_nest(enc.translated_headers(), body) : replace_nest_body(c.stmt, body);
        out_.overrides[b] = {stmt};
      } catch (const Error&) {
        out_.editable = false;
      }
    }
    out_.report.trace.push_back(std::move(t));
  }

  void bounds(const PairEncoding& enc, const BodyFormula& phi2, PairTrace& t) {
    auto checks = enc.bounds_checks(phi2);
    if (checks.empty()) return;
    std::vector<ExprPtr> all;
    for (const auto& b : checks) all.push_back(ex::implies(b.condition, b.in_bounds));
    auto safe = enc.reference_in_bounds();
    if (check(enc.entails(ex::implies(safe, ex::conj_all(all))), t, "bounds").kind == VerdictKind::Valid) return;
    std::set<std::string> reported;
    for (const auto& b : checks) {
      auto cell = render(enc.candidate_names(b.access));
      if (reported.count(cell)) continue;
      if (check(enc.entails(ex::implies(safe, ex::implies(b.condition, b.in_bounds))), t, "bounds").kind ==
          VerdictKind::Valid)
        continue;
      reported.insert(cell);
      Correction x;
      x.kind = CorrectionKind::OutOfBounds;
      x.component = t.component;
      x.subject = cell;
      auto it = cand_.symbols.find(b.access->name.substr(2));
      if (it != cand_.symbols.end()) {
        auto dims = cand_dims_.count(it->first) ? cand_dims_.at(it->first) : it->second.dims;
        x.replaced = render_type(it->second.type, dims);
      }
      x.line = t.cand_line;
      auto raw = enc.candidate_names(b.condition);
      auto simple = enc.candidate_names(solver_.simplify(fold(b.condition), enc.pre()));
      x.raw_guard = raw;
      x.guard = simple;
      out_.report.corrections.push_back(std::move(x));
      out_.editable = false;
    }
  }

  // σ(reference output statements) with reference locals renamed apart.
  static void collect_callees(const StmtList& body, std::set<std::string>& out) {
    for_each_stmt(body, [&](const StmtPtr& s) {
      for (const auto& e : own_exprs(*s))
        rewrite(e, [&](const ExprPtr& x) -> ExprPtr {
          if (x->kind == ExprKind::Call) out.insert(x->name);
          return nullptr;
        });
    });
  }

  static ExprPtr rename_calls(const ExprPtr& e, const std::map<std::string, std::string>& calls) {
    if (!e || calls.empty()) return e;
    return rewrite(e, [&](const ExprPtr& x) -> ExprPtr {
      if (x->kind != ExprKind::Call || !calls.count(x->name)) return nullptr;
      return ex::call(calls.at(x->name), x->args);
    });
  }

  // Reference helpers used by `body`: kept when the candidate defines an
  // identical function, otherwise copied under a fresh name.
  std::optional<std::map<std::string, std::string>> import_helpers(const StmtList& body) {
    std::set<std::string> need;
    collect_callees(body, need);
    for (bool grew = true; grew;) {
      grew = false;
      for (const auto& n : std::set<std::string>(need)) {
        const auto* f = ref_.program.find(n);
        if (!f) return std::nullopt;
        auto before = need.size();
        collect_callees(f->body, need);
        grew = grew || need.size() != before;
      }
    }
    std::map<std::string, std::string> calls;
    for (const auto& n : need) {
      const auto* c = cand_.program.find(n);
      if (c && render(*c) == render(*ref_.program.find(n))) continue;
      std::string fresh = "fb_" + n;
      while (taken_.count(fresh)) fresh += "_";
      taken_.insert(fresh);
      calls[n] = fresh;
    }
    for (const auto& [n, fresh] : calls) {
      auto f = *ref_.program.find(n);
      f.name = fresh;
      f.body = rename_stmts(f.body, {}, calls);
      out_.helpers.push_back(std::move(f));
    }
    return calls;
  }

  static StmtList rename_stmts(const StmtList& body, const std::map<std::string, std::string>& m,
                               const std::map<std::string, std::string>& calls) {
    std::function<StmtPtr(const StmtPtr&)> ren = [&](const StmtPtr& s) -> StmtPtr {
      auto c = std::make_shared<Stmt>(*s);
      auto fix = [&](const ExprPtr& e) { return e ? rename_calls(rename(e, m), calls) : e; };
      c->lhs = fix(c->lhs);
      c->rhs = fix(c->rhs);
      c->cond = fix(c->cond);
      for (auto& a : c->args) a = fix(a);
      for (auto& d : c->decls) {
        if (m.count(d.name)) d.name = m.at(d.name);
        d.init = fix(d.init);
      }
      if (c->init) c->init = ren(c->init);
      if (c->step) c->step = ren(c->step);
      for (auto& x : c->body) x = ren(x);
      for (auto& x : c->else_body) x = ren(x);
      return c;
    };
    StmtList out;
    for (const auto& s : body) out.push_back(ren(s));
    return out;
  }

  std::optional<StmtPtr> output_replacement(const TopLevel& r) {
    std::set<std::string> names;
    for_each_stmt(StmtList{r.stmt}, [&](const StmtPtr& s) {
      for (const auto& e : own_exprs(*s))
        for (const auto& n : names_in(e)) names.insert(n);
      for (const auto& d : s->decls) names.insert(d.name);
    });
    auto calls = import_helpers(StmtList{r.stmt});
    if (!calls) return std::nullopt;
    std::map<std::string, std::string> m;
    std::vector<VarDecl> locals;
    for (const auto& n : names) {
      if (auto it = sigma_.pairs.find(n); it != sigma_.pairs.end()) {
        m[n] = it->second;
        continue;
      }
      auto info = ref_.symbols.find(n);
      if (info == ref_.symbols.end() || info->second.is_array()) return std::nullopt;
      std::string fresh = "fb_" + n;
      while (taken_.count(fresh)) fresh += "_";
      taken_.insert(fresh);
      m[n] = fresh;
      locals.push_back(VarDecl{fresh, info->second.type, {}, nullptr});
    }
    StmtList body;
    if (!locals.empty()) body.push_back(st::decl(locals));
    auto renamed = rename_stmts(StmtList{r.stmt}, m, *calls).front();
    if (renamed->kind == StmtKind::Block) {
      for (const auto& s : renamed->body)
        if (s->kind != StmtKind::Decl) body.push_back(s);
    } else {
      body.push_back(renamed);
    }
    return st::block(body, r.stmt->loc);
  }

  void output_pair(std::size_t a, std::size_t b) {
    auto ro = lift_output_pattern(ref_);
    auto co = lift_output_pattern(cand_);
    if (!ro && !co) {
      pair(a, b);
      return;
    }
    PairTrace t;
    t.component = "output";
    t.ref_index = a;
    t.cand_index = b;
    t.ref_line = R_[a].stmt->loc.line;
    t.cand_line = C_[b].stmt->loc.line;
    std::vector<Correction> found;
    if (ro && co) {
      found = compare_outputs(*ro, *co, sigma_);
    } else {
      Correction x;
      x.kind = CorrectionKind::OutputPattern;
      x.component = "output";
      x.guard = x.raw_guard = ex::boolean(true);
      x.suggested = "the output of the reference: " + render(ro ? rename(ro->front(), sigma_.pairs) : ex::boolean(true));
      x.replaced = "the current output";
      if (!ro) x.suggested = "the output of the reference";
      found.push_back(std::move(x));
    }
    for (auto& x : found) {
      x.line = C_[b].stmt->loc.line;
      out_.report.size_before += node_count(x.raw_guard);
      out_.report.size_after += node_count(x.guard);
      out_.report.corrections.push_back(std::move(x));
    }
    if (!found.empty()) {
      auto rep = output_replacement(R_[a]);
      if (rep) out_.overrides[b] = {*rep};
      else out_.editable = false;
    }
    out_.report.trace.push_back(std::move(t));
  }

  const LabeledProgram& ref_;
  const LabeledProgram& cand_;
  const Solver& solver_;
  const FeedbackOptions& opt_;
  VariableMap sigma_;
  const std::vector<TopLevel>& R_;
  const std::vector<TopLevel>& C_;
  std::set<std::string> taken_;
  std::map<std::string, std::vector<ExprPtr>> cand_dims_;
  Outcome out_;
};

void finish(FeedbackReport& r) {
  if (r.error_kind) {
    r.verdict = Verdict::Unlabeled;
    return;
  }
  std::stable_sort(r.corrections.begin(), r.corrections.end(), [](const Correction& a, const Correction& b) {
    return component_rank(a.component) < component_rank(b.component);
  });
  r.verdict = r.corrections.empty() ? Verdict::VerifiedCorrect : Verdict::Faulty;
}

FeedbackReport unlabeled(const Error& e) {
  FeedbackReport r;
  r.verdict = Verdict::Unlabeled;
  r.error_kind = e.kind();
  r.error = e.detail();
  return r;
}

}  // namespace

std::vector<Correction> check_declarations(const LabeledProgram& ref, const LabeledProgram& cand,
                                           const VariableMap& sigma) {
  return declaration_fixes(ref, cand, sigma).corrections;
}

FeedbackReport verify_submission(const LabeledProgram& ref, const LabeledProgram& cand, const Solver& solver,
                                 const FeedbackOptions& options) {
  const auto start = Clock::now();
  const auto q0 = solver.queries();
  FeedbackReport best;
  bool have = false;
  try {
    auto maps = derive_variable_maps(ref, cand);
    if (maps.empty())
      throw Error(ErrorKind::NoCorrespondence, "inputs or DP arrays of the two programs do not correspond");
    auto R = canonicalize_loops(ref);
    auto C = canonicalize_loops(cand);
    std::optional<Error> first_error;
    for (const auto& sigma : maps) {
      FeedbackReport r;
      try {
        Session s(ref, cand, solver, options, sigma, R, C);
        auto o = s.run();
        r = std::move(o.report);
        finish(r);
        if (r.verdict == Verdict::Faulty) {
          if (!o.editable) {
            r.notes.push_back("some corrections cannot be applied to the source automatically");
          } else {
            try {
              auto p = rebuild(cand, C, o.overrides);
              apply_declarations(p, o.decl_fixes);
              auto main_at = std::find_if(p.functions.begin(), p.functions.end(),
                                          [](const FunctionDef& f) { return f.name == "main"; });
              p.functions.insert(main_at, o.helpers.begin(), o.helpers.end());
              renumber(p);
              typecheck(p);
              r.repaired_source = render(p);
            } catch (const Error& e) {
              r.notes.push_back(std::string("corrected program could not be built: ") + e.what());
            }
          }
        }
      } catch (const Error& e) {
        if (!first_error) first_error = e;
        continue;
      }
      if (!have || r.corrections.size() < best.corrections.size()) {
        best = std::move(r);
        have = true;
      }
    }
    if (!have) best = unlabeled(*first_error);
  } catch (const Error& e) {
    best = unlabeled(e);
  }
  for (const auto& n : cand.program.notes) best.notes.push_back(n);
  best.solver_queries = solver.queries() - q0;
  best.elapsed_ms = ms_since(start);
  return best;
}

FeedbackReport verify_sources(std::string_view ref_source, std::string_view cand_source, const Solver& solver,
                              const FeedbackOptions& options) {
  const auto start = Clock::now();
  LabeledProgram ref, cand;
  try {
    ref = analyze_source(ref_source);
  } catch (const Error& e) {
    auto r = unlabeled(e);
    r.error = "reference: " + r.error;
    return r;
  }
  try {
    cand = analyze_source(cand_source);
  } catch (const Error& e) {
    auto r = unlabeled(e);
    r.elapsed_ms = ms_since(start);
    return r;
  }
  auto r = verify_submission(ref, cand, solver, options);
  r.elapsed_ms = ms_since(start);
  return r;
}

FeedbackReport recheck(std::string_view ref_source, const FeedbackReport& report, const Solver& solver,
                       const FeedbackOptions& options) {
  if (!report.repaired_source) {
    FeedbackReport r;
    r.submission = report.submission;
    r.error_kind = ErrorKind::UnlabeledSubmission;
    r.error = "no corrected program";
    return r;
  }
  auto r = verify_sources(ref_source, *report.repaired_source, solver, options);
  r.submission = report.submission;
  r.reference = report.reference;
  return r;
}

}  // namespace dpfb
