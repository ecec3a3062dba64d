#include "dpfb/features.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "dpfb/error.hpp"
#include "dpfb/formula.hpp"
#include "dpfb/frontend.hpp"
#include "dpfb/preprocess.hpp"
#include "dpfb/render.hpp"

namespace dpfb {

namespace {

const char* kIndexNames[] = {"i", "j", "k", "l", "m", "p", "q", "r"};

std::string index_name(std::size_t depth) {
  if (depth < std::size(kIndexNames)) return kIndexNames[depth];
  return "i" + std::to_string(depth);
}

struct Chain {
  std::vector<const Stmt*> loops;
  StmtPtr update;
};

[[noreturn]] void fail(const Stmt& s, const std::string& why) {
  throw Error(ErrorKind::FeatureExtractionFailed, why, s.loc.line, s.loc.column);
}

std::pair<std::string, std::int64_t> loop_index(const Stmt& loop, const LabeledProgram& lp) {
  auto stride = [](const StmtPtr& s) -> std::optional<std::pair<std::string, std::int64_t>> {
    if (!s || s->kind != StmtKind::Assign || s->aop != AssignOp::Set || s->lhs->kind != ExprKind::Var) return std::nullopt;
    const auto& v = s->lhs->name;
    auto f = linearize(ex::binary(BinOp::Sub, s->rhs, s->lhs));
    if (!f || !f->terms.empty() || f->constant == 0) return std::nullopt;
    if (!mentions(s->rhs, v)) return std::nullopt;
    return std::make_pair(v, f->constant);
  };
  if (loop.kind == StmtKind::For) {
    auto st = stride(loop.step);
    if (!st || !mentions(loop.cond, st->first)) fail(loop, "loop step is not a constant stride of its index");
    return *st;
  }
  std::optional<std::pair<std::string, std::int64_t>> found;
  for (const auto& s : loop.body) {
    auto st = stride(s);
    if (!st || !mentions(loop.cond, st->first) || !lp.loop_indices.count(st->first)) continue;
    if (found) fail(loop, "loop updates more than one index");
    found = st;
  }
  if (!found) fail(loop, "loop index is not updated unconditionally by a constant");
  return *found;
}

void collect_chains(const StmtList& body, const LabeledProgram& lp, std::vector<const Stmt*>& stack,
                    std::vector<Chain>& out) {
  for (const auto& s : body) {
    if (s->kind == StmtKind::For || s->kind == StmtKind::While) {
      stack.push_back(s.get());
      collect_chains(s->body, lp, stack, out);
      stack.pop_back();
      continue;
    }
    auto l = lp.label_of(*s);
    if (s->kind == StmtKind::Assign && l && *l == Label::Update) out.push_back({stack, s});
    collect_chains(s->body, lp, stack, out);
    collect_chains(s->else_body, lp, stack, out);
  }
}

std::map<std::string, std::string> base_names(const LabeledProgram& lp) {
  std::map<std::string, std::string> m;
  for (std::size_t k = 0; k < lp.dp_arrays.size(); ++k)
    m[lp.dp_arrays[k]] = lp.dp_arrays.size() == 1 ? "dp" : "dp" + std::to_string(k + 1);
  for (std::size_t k = 0; k < lp.inputs.size(); ++k)
    if (!m.count(lp.inputs[k].name)) m[lp.inputs[k].name] = "in" + std::to_string(k + 1);
  return m;
}

std::map<std::string, std::string> chain_names(const Chain& c, const LabeledProgram& lp) {
  auto m = base_names(lp);
  for (std::size_t d = 0; d < c.loops.size(); ++d) m[loop_index(*c.loops[d], lp).first] = index_name(d);
  return m;
}

ExprPtr canonical(const ExprPtr& e, const std::map<std::string, std::string>& names) {
  auto r = rename(e, names);
  if (r->kind != ExprKind::Index) return r;
  std::vector<ExprPtr> subs;
  for (const auto& s : r->args) subs.push_back(canonical_int(s));
  return ex::index(r->name, subs);
}

std::vector<Chain> chains_of(const StmtPtr& top, const LabeledProgram& lp) {
  std::vector<const Stmt*> stack;
  std::vector<Chain> chains;
  collect_chains(StmtList{top}, lp, stack, chains);
  return chains;
}

const Chain& deepest(const std::vector<Chain>& chains) {
  return *std::max_element(chains.begin(), chains.end(),
                           [](const Chain& a, const Chain& b) { return a.loops.size() < b.loops.size(); });
}

std::string type_word(ScalarType t) { return t == ScalarType::Bool ? "bool" : "int"; }

ScalarType type_from(const std::string& w) { return w == "bool" ? ScalarType::Bool : ScalarType::Int; }

}  // namespace

std::vector<StmtPtr> top_level_update_loops(const LabeledProgram& lp) {
  std::vector<StmtPtr> out;
  for (const auto& s : lp.program.main().body) {
    if (s->kind != StmtKind::For && s->kind != StmtKind::While) continue;
    bool has_update = false;
    for_each_stmt(StmtList{s}, [&](const StmtPtr& x) {
      auto l = lp.label_of(*x);
      has_update = has_update || (x->kind == StmtKind::Assign && l && *l == Label::Update);
    });
    if (has_update) out.push_back(s);
  }
  return out;
}

FeatureVector extract_features(const LabeledProgram& lp) {
  FeatureVector v;
  if (lp.dp_arrays.empty()) throw Error(ErrorKind::FeatureExtractionFailed, "no DP array");
  for (std::size_t k = 0; k < lp.dp_arrays.size(); ++k) {
    const auto& info = lp.symbols.at(lp.dp_arrays[k]);
    if (k == 0) {
      v.dp_type = info.type;
      v.dp_dims = info.rank();
    } else {
      v.extra_dp_arrays.push_back({info.type, info.rank()});
    }
  }
  for_each_stmt(lp.program.main().body, [&](const StmtPtr& s) {
    if (s->kind != StmtKind::Read) return;
    for (const auto& a : s->args) v.input_reused_as_dp = v.input_reused_as_dp || lp.is_dp_array(a->name);
  });
  for (const auto& top : top_level_update_loops(lp)) {
    auto chains = chains_of(top, lp);
    const auto& deep = deepest(chains);
    UpdateLoopFeature f;
    f.depth = static_cast<int>(deep.loops.size());
    for (const auto* l : deep.loops) f.directions += loop_index(*l, lp).second > 0 ? '+' : '-';
    std::set<std::string> elements;
    for (const auto& c : chains) elements.insert(render(canonical(c.update->lhs, chain_names(c, lp))));
    for (const auto& e : elements) f.updated_element += (f.updated_element.empty() ? "" : ",") + e;
    v.update_loops.push_back(f);
  }
  v.num_update_loops = v.update_loops.size();
  if (v.num_update_loops == 0) throw Error(ErrorKind::FeatureExtractionFailed, "no update loop");
  return v;
}

std::vector<std::string> update_loop_bounds(const LabeledProgram& lp) {
  std::vector<std::string> out;
  for (const auto& top : top_level_update_loops(lp)) {
    auto chains = chains_of(top, lp);
    const auto& deep = deepest(chains);
    auto names = chain_names(deep, lp);
    for (const auto* l : deep.loops) out.push_back(render(fold(rename(l->cond, names))));
  }
  return out;
}

std::string FeatureVector::canonical_text() const {
  std::ostringstream o;
  o << "dp_dims=" << dp_dims << "\n";
  o << "dp_type=" << type_word(dp_type) << "\n";
  o << "extra_dp_arrays=";
  for (std::size_t k = 0; k < extra_dp_arrays.size(); ++k)
    o << (k ? "," : "") << type_word(extra_dp_arrays[k].type) << "/" << extra_dp_arrays[k].dims;
  o << "\n";
  o << "input_reused_as_dp=" << (input_reused_as_dp ? 1 : 0) << "\n";
  o << "num_update_loops=" << num_update_loops << "\n";
  o << "update_loops=";
  for (std::size_t k = 0; k < update_loops.size(); ++k)
    o << (k ? ";" : "") << update_loops[k].depth << ":" << update_loops[k].directions << ":"
      << update_loops[k].updated_element;
  o << "\n";
  return o.str();
}

FeatureVector FeatureVector::from_canonical_text(const std::string& text) {
  FeatureVector v;
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    return out;
  };
  while (std::getline(in, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto key = line.substr(0, eq);
    auto val = line.substr(eq + 1);
    if (key == "dp_dims") v.dp_dims = std::stoul(val);
    else if (key == "dp_type") v.dp_type = type_from(val);
    else if (key == "input_reused_as_dp") v.input_reused_as_dp = val == "1";
    else if (key == "num_update_loops") v.num_update_loops = std::stoul(val);
    else if (key == "extra_dp_arrays") {
      for (const auto& item : split(val, ',')) {
        auto slash = item.find('/');
        if (slash == std::string::npos) continue;
        v.extra_dp_arrays.push_back({type_from(item.substr(0, slash)), std::stoul(item.substr(slash + 1))});
      }
    } else if (key == "update_loops") {
      for (const auto& item : split(val, ';')) {
        auto a = item.find(':');
        auto b = item.find(':', a + 1);
        if (a == std::string::npos || b == std::string::npos) continue;
        v.update_loops.push_back({std::stoi(item.substr(0, a)), item.substr(a + 1, b - a - 1), item.substr(b + 1)});
      }
    }
  }
  return v;
}

LabeledProgram analyze_source(std::string_view source) {
  return analyze(preprocess(strip_testcase_loop(parse(source))));
}

}  // namespace dpfb
