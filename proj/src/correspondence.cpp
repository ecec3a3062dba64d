#include "dpfb/correspondence.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "dpfb/error.hpp"
#include "dpfb/formula.hpp"
#include "dpfb/render.hpp"

namespace dpfb {

std::string VariableMap::operator()(const std::string& ref_name) const {
  auto it = pairs.find(ref_name);
  return it == pairs.end() ? ref_name : it->second;
}

std::map<std::string, std::string> VariableMap::inverse() const {
  std::map<std::string, std::string> out;
  for (const auto& [r, c] : pairs) out[c] = r;
  return out;
}

std::string VariableMap::text() const {
  std::string out;
  for (const auto& [r, c] : pairs) {
    if (!out.empty()) out += ", ";
    out += r + "->" + c;
  }
  return out;
}

std::string Nest::directions() const {
  std::string d;
  for (const auto& l : levels) d += l.stride > 0 ? '+' : '-';
  return d;
}

namespace {

std::optional<LoopLevel> level_of(const StmtPtr& s) {
  if (s->kind != StmtKind::For || !s->init || !s->step || !s->cond) return std::nullopt;
  const auto& init = *s->init;
  const auto& step = *s->step;
  if (init.kind != StmtKind::Assign || init.aop != AssignOp::Set || init.lhs->kind != ExprKind::Var) return std::nullopt;
  if (step.kind != StmtKind::Assign || step.aop != AssignOp::Set || step.lhs->kind != ExprKind::Var) return std::nullopt;
  if (init.lhs->name != step.lhs->name || !mentions(step.rhs, step.lhs->name)) return std::nullopt;
  auto diff = linearize(ex::binary(BinOp::Sub, step.rhs, step.lhs));
  if (!diff || !diff->terms.empty() || diff->constant == 0) return std::nullopt;
  return LoopLevel{init.lhs->name, init.rhs, s->cond, diff->constant, s};
}

}  // namespace

std::optional<Nest> as_nest(const StmtPtr& s) {
  Nest n;
  if (s->kind != StmtKind::For) {
    n.body = s->kind == StmtKind::Block ? s->body : StmtList{s};
    return n;
  }
  StmtPtr cur = s;
  for (;;) {
    auto l = level_of(cur);
    if (!l) return std::nullopt;
    n.levels.push_back(*l);
    if (cur->body.size() == 1 && cur->body[0]->kind == StmtKind::For) {
      cur = cur->body[0];
      continue;
    }
    n.body = cur->body;
    return n;
  }
}

Nest TopLevel::nest() const {
  if (auto n = as_nest(stmt)) return *n;
  Nest n;
  n.body = {stmt};
  return n;
}

// ---------------------------------------------------------------------------

std::vector<VariableMap> derive_variable_maps(const LabeledProgram& ref, const LabeledProgram& cand) {
  if (ref.inputs.size() != cand.inputs.size() || ref.dp_arrays.size() != cand.dp_arrays.size()) return {};
  VariableMap base;
  for (std::size_t k = 0; k < ref.inputs.size(); ++k) {
    const auto& a = ref.inputs[k];
    const auto& b = cand.inputs[k];
    if (a.type != b.type || a.rank != b.rank) return {};
    base.pairs[a.name] = b.name;
  }

  using Shape = std::pair<ScalarType, std::size_t>;
  auto shape = [](const LabeledProgram& lp, const std::string& n) {
    const auto& v = lp.symbols.at(n);
    return Shape{v.type, v.rank()};
  };
  std::map<Shape, std::vector<std::string>> rgroups, cgroups;
  for (const auto& d : ref.dp_arrays) rgroups[shape(ref, d)].push_back(d);
  for (const auto& d : cand.dp_arrays) cgroups[shape(cand, d)].push_back(d);
  if (rgroups.size() != cgroups.size()) return {};
  for (const auto& [s, names] : rgroups) {
    auto it = cgroups.find(s);
    if (it == cgroups.end() || it->second.size() != names.size()) return {};
  }

  std::vector<VariableMap> out;
  std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> groups;
  for (auto& [s, names] : rgroups) {
    auto c = cgroups[s];
    std::sort(c.begin(), c.end());
    groups.emplace_back(names, c);
  }
  std::function<void(std::size_t, VariableMap)> rec = [&](std::size_t g, VariableMap m) {
    if (g == groups.size()) {
      std::set<std::string> images;
      for (const auto& [r, c] : m.pairs)
        if (!images.insert(c).second) return;
      if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
      return;
    }
    auto perm = groups[g].second;
    do {
      VariableMap next = m;
      bool ok = true;
      for (std::size_t k = 0; k < perm.size() && ok; ++k) {
        const auto& r = groups[g].first[k];
        auto [it, fresh] = next.pairs.emplace(r, perm[k]);
        ok = fresh || it->second == perm[k];
      }
      if (ok) rec(g + 1, next);
    } while (std::next_permutation(perm.begin(), perm.end()));
  };
  rec(0, base);
  std::sort(out.begin(), out.end(), [](const VariableMap& a, const VariableMap& b) { return a.pairs < b.pairs; });
  return out;
}

// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void canon_fail(const Stmt& s, const std::string& why) {
  throw Error(ErrorKind::CanonicalizationFailed, why, s.loc.line, s.loc.column);
}

std::vector<Label> labels_in(const StmtPtr& s, const LabeledProgram& lp) {
  std::vector<Label> out;
  for_each_stmt(StmtList{s}, [&](const StmtPtr& x) {
    if (x->kind == StmtKind::For || x->kind == StmtKind::While || x->kind == StmtKind::If ||
        x->kind == StmtKind::Block)
      return;
    if (auto l = lp.label_of(*x); l && std::find(out.begin(), out.end(), *l) == out.end()) out.push_back(*l);
  });
  return out;
}

StmtPtr copy_with(const StmtPtr& s, StmtList body, StmtList else_body = {}) {
  auto c = std::make_shared<Stmt>(*s);
  c->body = std::move(body);
  c->else_body = std::move(else_body);
  return c;
}

StmtPtr filter(const StmtPtr& s, Label keep, const LabeledProgram& lp);

StmtList filter_list(const StmtList& body, Label keep, const LabeledProgram& lp) {
  StmtList out;
  for (const auto& s : body)
    if (auto f = filter(s, keep, lp)) out.push_back(f);
  return out;
}

bool holds(const StmtList& body, Label l, const LabeledProgram& lp) {
  bool found = false;
  for_each_stmt(body, [&](const StmtPtr& x) {
    if (x->kind == StmtKind::Assign || x->kind == StmtKind::Read || x->kind == StmtKind::Write)
      if (auto lab = lp.label_of(*x); lab && *lab == l) found = true;
  });
  return found;
}

StmtPtr filter(const StmtPtr& s, Label keep, const LabeledProgram& lp) {
  switch (s->kind) {
    case StmtKind::For:
    case StmtKind::While:
    case StmtKind::Block: {
      auto b = filter_list(s->body, keep, lp);
      return holds(b, keep, lp) ? copy_with(s, b) : nullptr;
    }
    case StmtKind::If: {
      auto t = filter_list(s->body, keep, lp);
      auto e = filter_list(s->else_body, keep, lp);
      return holds(t, keep, lp) || holds(e, keep, lp) ? copy_with(s, t, e) : nullptr;
    }
    case StmtKind::Decl:
      return s;
    case StmtKind::Assign:
    case StmtKind::Read:
    case StmtKind::Write: {
      auto l = lp.label_of(*s);
      if (l) return *l == keep ? s : nullptr;
      if (s->kind == StmtKind::Assign && s->lhs->kind == ExprKind::Var) return s;  // temporary, kept in every part
      canon_fail(*s, "cannot split a loop around `" + render(s) + "`");
    }
    default:
      canon_fail(*s, "cannot split a loop around `" + render(s) + "`");
  }
}

std::set<std::string> labeled_writes(const StmtList& body, const LabeledProgram& lp) {
  std::set<std::string> out;
  for_each_stmt(body, [&](const StmtPtr& x) {
    if (!lp.label_of(*x)) return;
    if (x->kind == StmtKind::Assign) out.insert(lvalue_root(x->lhs));
    if (x->kind == StmtKind::Read)
      for (const auto& a : x->args) out.insert(lvalue_root(a));
  });
  return out;
}

std::set<std::string> targets_of(const StmtPtr& s, const LabeledProgram& lp) {
  std::set<std::string> out;
  for (const auto& n : labeled_writes(StmtList{s}, lp))
    if (lp.is_dp_array(n) || lp.is_input(n)) out.insert(n);
  return out;
}

TopLevel make_element(const StmtPtr& s, Label l, std::vector<int> origins, const LabeledProgram& lp) {
  TopLevel t;
  t.stmt = s;
  t.label = l;
  t.origins = std::move(origins);
  t.targets = targets_of(s, lp);
  if (auto n = as_nest(s)) {
    t.depth = static_cast<int>(n->levels.size());
    t.directions = n->directions();
  } else {
    // Not a recognizable nest: count the deepest loop chain.
    std::function<int(const StmtList&)> deepest = [&](const StmtList& b) {
      int d = 0;
      for (const auto& x : b) {
        int here = (x->kind == StmtKind::For || x->kind == StmtKind::While) ? 1 : 0;
        d = std::max({d, here + deepest(x->body), deepest(x->else_body)});
      }
      return d;
    };
    t.depth = deepest(StmtList{s});
    t.directions = std::string(static_cast<std::size_t>(t.depth), '?');
  }
  return t;
}

std::vector<TopLevel> split(const StmtPtr& loop, const std::vector<Label>& labels, const LabeledProgram& lp) {
  std::vector<TopLevel> parts;
  std::vector<StmtList> bodies;
  for (auto l : labels) {
    auto f = filter(loop, l, lp);
    if (!f) continue;
    parts.push_back(make_element(f, l, {loop->loc.ordinal}, lp));
    bodies.push_back(StmtList{f});
  }
  // An earlier part must not read what a later part writes.
  std::set<std::string> skip(lp.loop_indices.begin(), lp.loop_indices.end());
  for (std::size_t a = 0; a < bodies.size(); ++a) {
    auto reads = read_names(bodies[a]);
    for (std::size_t b = a + 1; b < bodies.size(); ++b)
      for (const auto& w : labeled_writes(bodies[b], lp))
        if (reads.count(w) && !skip.count(w))
          canon_fail(*loop, "splitting the loop would move the write of " + w + " after a read of it");
  }
  return parts;
}

// Position of each top-level statement of main by ordinal.
std::map<int, std::size_t> positions(const LabeledProgram& lp) {
  std::map<int, std::size_t> pos;
  const auto& body = lp.program.main().body;
  for (std::size_t k = 0; k < body.size(); ++k) pos[body[k]->loc.ordinal] = k;
  return pos;
}

// True when only declarations lie strictly between the two source positions.
bool adjacent(const LabeledProgram& lp, std::size_t from, std::size_t to) {
  const auto& body = lp.program.main().body;
  if (to <= from) return false;
  for (std::size_t k = from + 1; k < to; ++k)
    if (body[k]->kind != StmtKind::Decl) return false;
  return true;
}

std::pair<std::size_t, std::size_t> span(const TopLevel& t, const std::map<int, std::size_t>& pos) {
  std::size_t lo = SIZE_MAX, hi = 0;
  for (int o : t.origins) {
    lo = std::min(lo, pos.at(o));
    hi = std::max(hi, pos.at(o));
  }
  return {lo, hi};
}

std::optional<TopLevel> merge_ranges(const TopLevel& a, const TopLevel& b, const LabeledProgram& lp) {
  auto na = as_nest(a.stmt);
  auto nb = as_nest(b.stmt);
  if (!na || !nb || na->levels.size() != 1 || nb->levels.size() != 1) return std::nullopt;
  const auto& la = na->levels[0];
  const auto& lb = nb->levels[0];
  if (la.index != lb.index || la.stride != 1 || lb.stride != 1 || render(na->body) != render(nb->body))
    return std::nullopt;
  if (a.targets != b.targets) return std::nullopt;
  const auto& c = la.cond;
  if (c->kind != ExprKind::Binary || c->args[0]->kind != ExprKind::Var || c->args[0]->name != la.index) return std::nullopt;
  ExprPtr next;
  if (c->bop == BinOp::Lt) next = c->args[1];
  else if (c->bop == BinOp::Le) next = ex::binary(BinOp::Add, c->args[1], ex::lit(1));
  else return std::nullopt;
  auto d = linearize(ex::binary(BinOp::Sub, next, lb.start));
  if (!d || !d->terms.empty() || d->constant != 0) return std::nullopt;
  auto merged = std::make_shared<Stmt>(*a.stmt);
  merged->cond = lb.cond;
  auto origins = a.origins;
  origins.insert(origins.end(), b.origins.begin(), b.origins.end());
  return make_element(merged, a.label, origins, lp);
}

StmtPtr as_block(const StmtPtr& s) { return s->kind == StmtKind::Block ? s : st::block({s}, s->loc); }

}  // namespace

std::vector<TopLevel> canonicalize_loops(const LabeledProgram& lp) {
  std::vector<TopLevel> list;
  for (const auto& s : lp.program.main().body) {
    if (s->kind == StmtKind::Decl || s->kind == StmtKind::Return) continue;
    if (s->kind == StmtKind::Read) {
      bool scalar_only = true;
      for (const auto& a : s->args) scalar_only = scalar_only && a->kind == ExprKind::Var;
      if (scalar_only) continue;
    }
    auto labels = labels_in(s, lp);
    if (labels.empty()) continue;
    if (labels.size() == 1) {
      list.push_back(make_element(s, labels[0], {s->loc.ordinal}, lp));
      continue;
    }
    if (s->kind != StmtKind::For && s->kind != StmtKind::While)
      canon_fail(*s, "statement mixes " + to_string(labels[0]) + " and " + to_string(labels[1]));
    for (auto& part : split(s, labels, lp)) list.push_back(std::move(part));
  }

  auto pos = positions(lp);

  // Merge contiguous Input/Init loops over the same variables; group
  // straight-line Init/Input statements.
  std::vector<TopLevel> merged;
  for (auto& t : list) {
    if (!merged.empty()) {
      auto& prev = merged.back();
      bool same_kind = prev.label == t.label && (t.label == Label::Input || t.label == Label::Init);
      bool touching = adjacent(lp, span(prev, pos).second, span(t, pos).first);
      if (same_kind && touching) {
        if (prev.depth == 0 && t.depth == 0) {
          auto block = as_block(prev.stmt);
          StmtList body = block->body;
          auto tb = as_block(t.stmt);
          body.insert(body.end(), tb->body.begin(), tb->body.end());
          auto origins = prev.origins;
          origins.insert(origins.end(), t.origins.begin(), t.origins.end());
          prev = make_element(st::block(body, prev.stmt->loc), prev.label, origins, lp);
          continue;
        }
        if (auto m = merge_ranges(prev, t, lp)) {
          prev = *m;
          continue;
        }
      }
    }
    merged.push_back(std::move(t));
  }

  // All Output statements form one element; they must be contiguous.
  std::vector<TopLevel> out;
  std::optional<std::size_t> output_at;
  for (auto& t : merged) {
    if (t.label != Label::Output) {
      out.push_back(std::move(t));
      continue;
    }
    if (!output_at) {
      output_at = out.size();
      out.push_back(std::move(t));
      continue;
    }
    if (*output_at + 1 != out.size())
      canon_fail(*t.stmt, "output statements are interleaved with other computation");
    auto& o = out[*output_at];
    StmtList body = as_block(o.stmt)->body;
    auto tb = as_block(t.stmt)->body;
    body.insert(body.end(), tb.begin(), tb.end());
    auto origins = o.origins;
    origins.insert(origins.end(), t.origins.begin(), t.origins.end());
    o = make_element(st::block(body, o.stmt->loc), Label::Output, origins, lp);
  }
  return out;
}

Program rebuild(const LabeledProgram& lp, const std::vector<TopLevel>& list,
                const std::map<std::size_t, StmtList>& overrides) {
  auto pos = positions(lp);
  const auto& body = lp.program.main().body;
  std::map<std::size_t, std::vector<std::size_t>> at;  // first origin position -> elements
  std::set<std::size_t> origin_positions;
  std::map<std::size_t, std::size_t> last_of;
  for (std::size_t k = 0; k < list.size(); ++k) {
    auto [lo, hi] = span(list[k], pos);
    at[lo].push_back(k);
    last_of[k] = hi;
    for (int o : list[k].origins) origin_positions.insert(pos.at(o));
  }
  StmtList out;
  std::set<std::size_t> hoisted;
  for (std::size_t t = 0; t < body.size(); ++t) {
    if (hoisted.count(t)) continue;
    if (!origin_positions.count(t)) {
      out.push_back(body[t]);
      continue;
    }
    auto it = at.find(t);
    if (it == at.end()) continue;
    for (auto k : it->second) {
      // Declarations inside a grouped span move in front of it.
      for (std::size_t d = t + 1; d < last_of[k]; ++d)
        if (body[d]->kind == StmtKind::Decl && !origin_positions.count(d) && hoisted.insert(d).second)
          out.push_back(body[d]);
    }
    for (auto k : it->second) {
      StmtList stmts;
      if (auto o = overrides.find(k); o != overrides.end()) stmts = o->second;
      else stmts = {list[k].stmt};
      for (const auto& s : stmts) {
        if (s->kind == StmtKind::Block) out.insert(out.end(), s->body.begin(), s->body.end());
        else out.push_back(s);
      }
    }
  }
  Program p = lp.program;
  p.main().body = out;
  renumber(p);
  return p;
}

ControlCorrespondence control_correspondence(const std::vector<TopLevel>& R, const std::vector<TopLevel>& C,
                                             const VariableMap& sigma) {
  auto fail = [](std::size_t k, const std::string& why) {
    throw Error(ErrorKind::NoCorrespondence, "statement " + std::to_string(k) + ": " + why);
  };
  ControlCorrespondence pi;
  const std::size_t n = std::min(R.size(), C.size());
  for (std::size_t k = 0; k < n; ++k) {
    const auto& r = R[k];
    const auto& c = C[k];
    if (r.label != c.label) fail(k, "labels differ (" + to_string(r.label) + " vs " + to_string(c.label) + ")");
    if (r.depth != c.depth)
      fail(k, "loop depths differ (" + std::to_string(r.depth) + " vs " + std::to_string(c.depth) + ")");
    if (r.directions != c.directions) fail(k, "loop directions differ (" + r.directions + " vs " + c.directions + ")");
    std::set<std::string> mapped;
    for (const auto& t : r.targets) mapped.insert(sigma(t));
    if (mapped != c.targets) fail(k, "statements write variables that do not correspond");
    pi.pairs.emplace_back(k, k);
  }
  if (R.size() != C.size())
    fail(n, "reference has " + std::to_string(R.size()) + " top-level statements, candidate has " +
                std::to_string(C.size()));
  return pi;
}

VariableMap extend_with_indices(const VariableMap& sigma, const TopLevel& r, const TopLevel& c) {
  VariableMap out = sigma;
  auto nr = r.nest();
  auto nc = c.nest();
  for (std::size_t d = 0; d < nr.levels.size() && d < nc.levels.size(); ++d)
    out.pairs[nr.levels[d].index] = nc.levels[d].index;
  return out;
}

}  // namespace dpfb
