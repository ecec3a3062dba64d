#include <gtest/gtest.h>

#include "dpfb/analysis.hpp"
#include "dpfb/error.hpp"
#include "dpfb/frontend.hpp"
#include "dpfb/oracle.hpp"
#include "dpfb/preprocess.hpp"
#include "dpfb/render.hpp"
#include "test_support.hpp"

using namespace dpfb;

namespace {

Program prepared(const std::string& name) { return preprocess(corpus::load(name)); }

std::vector<int> lines_with(const LabeledProgram& lp, Label want) {
  std::set<int> lines;
  for_each_stmt(lp.program.main().body, [&](const StmtPtr& s) {
    auto l = lp.label_of(*s);
    if (l && *l == want) lines.insert(s->loc.line);
  });
  return {lines.begin(), lines.end()};
}

ErrorKind analysis_error(const std::string& src) {
  try {
    analyze(preprocess(parse(src)));
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an analysis error";
  return ErrorKind::InvalidInput;
}

constexpr std::int64_t kProbe = -777777;

// Insert `if (g) printf(kProbe, ordinal, x == e)` before the statement at
// `ordinal` for each guarded expression of every Σ entry at that location.
StmtList with_probes(const StmtList& body, const SubstitutionStore& store) {
  StmtList out;
  for (const auto& s : body) {
    if (s->kind != StmtKind::For && s->kind != StmtKind::While) {
      ExprPtr count = ex::lit(0);
      for (const auto& [key, set] : store.entries) {
        if (key.first != s->loc.ordinal) continue;
        for (const auto& g : set) {
          out.push_back(st::if_(g.guard, {st::write("%d %d %d", {ex::lit(kProbe), ex::lit(key.first),
                                                             ex::binary(BinOp::Eq, ex::var(key.second), g.expr)})}));
          count = ex::binary(BinOp::Add, count, ex::ite(g.guard, ex::lit(1), ex::lit(0)));
        }
        out.push_back(st::write("%d %d %d", {ex::lit(kProbe), ex::lit(-key.first), count}));
        count = ex::lit(0);
      }
    }
    auto c = std::make_shared<Stmt>(*s);
    c->body = with_probes(s->body, store);
    c->else_body = with_probes(s->else_body, store);
    out.push_back(c);
  }
  return out;
}

}  // namespace

TEST(SubstitutionStore, TemporaryCopy) {
  auto p = preprocess(parse(
      "int main(){int n, i, t, x[10]; scanf(\"%d\", &n); x[0] = 1;"
      " for (i = 1; i < n; i++) { t = x[i-1]; x[i] = t; } printf(\"%d\", x[n-1]); return 0;}"));
  auto s = compute_substitution_store(p);
  int use = -1;
  for_each_stmt(p.main().body, [&](const StmtPtr& st) {
    if (st->kind == StmtKind::Assign && st->lhs->kind == ExprKind::Index && st->rhs->kind == ExprKind::Var)
      use = st->loc.ordinal;
  });
  const auto* e = s.find(use, "t");
  ASSERT_NE(e, nullptr);
  ASSERT_EQ(e->size(), 1u);
  EXPECT_TRUE(ex::is_true((*e)[0].guard));
  EXPECT_EQ(render((*e)[0].expr), "x[i - 1]");
  // n is an input: never substituted.
  for (const auto& [key, v] : s.entries) EXPECT_NE(key.second, "n");
}

TEST(SubstitutionStore, HelperCallIsInlined) {
  auto p = prepared("sumtrian_fig3.c");
  auto s = compute_substitution_store(p);
  const GuardedAssign* found = nullptr;
  std::vector<GuardedAssign> variants;
  for_each_stmt(p.main().body, [&](const StmtPtr& st) {
    if (st->loc.line == 20 && st->kind == StmtKind::Assign) variants = s.assignments.at(st->loc.ordinal);
  });
  ASSERT_EQ(variants.size(), 2u);
  found = &variants[0];
  EXPECT_EQ(render(found->guard), "D[i - 1][j] > D[i - 1][j - 1]");
  EXPECT_EQ(render(found->rhs), "A[i][j] + D[i - 1][j]");
  EXPECT_EQ(render(variants[1].guard), "D[i - 1][j] <= D[i - 1][j - 1]");
  EXPECT_EQ(render(variants[1].rhs), "A[i][j] + D[i - 1][j - 1]");
}

TEST(SubstitutionStore, IfJoinProducesGuardedVariants) {
  auto p = prepared("knapsack.c");
  auto s = compute_substitution_store(p);
  bool seen = false;
  for_each_stmt(p.main().body, [&](const StmtPtr& st) {
    if (st->kind != StmtKind::Assign || render(st->lhs) != "best[i][j]") return;
    const auto* e = s.find(st->loc.ordinal, "take");
    ASSERT_NE(e, nullptr);
    EXPECT_EQ(e->size(), 2u);
    seen = true;
  });
  EXPECT_TRUE(seen);
}

TEST(SubstitutionStore, RecursionRejected) {
  auto p = parse("int f(int x){ return f(x); } int main(){int a; a = f(1); return 0;}");
  try {
    compute_substitution_store(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RecursionUnsupported);
  }
}

TEST(SubstitutionStoreProperty, EntriesAgreeWithInterpreter) {
  struct Case {
    const char* file;
    const char* constraints;
  };
  for (const Case& c : {Case{"sumtrian_fig2.c", "sumtrian.constraints"}, Case{"sumtrian_correct.c", "sumtrian.constraints"},
                        Case{"knapsack.c", "knapsack.constraints"}, Case{"stairs.c", "stairs.constraints"},
                        Case{"subset_bool.c", "subset.constraints"}}) {
    auto p = prepared(c.file);
    auto s = compute_substitution_store(p);
    auto probed = p;
    probed.main().body = with_probes(p.main().body, s);
    InputProfile prof;
    prof.constraints = parse_constraints(corpus::read(c.constraints));
    std::size_t checks = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      auto g = generate_input(p, prof, seed);
      ASSERT_TRUE(g) << c.file;
      auto r = interpret(probed, g->tokens);
      ASSERT_EQ(r.status, ExecStatus::Ok) << c.file;
      for (std::size_t k = 0; k + 2 < r.outputs.size(); ++k) {
        if (r.outputs[k] != kProbe) continue;
        if (r.outputs[k + 1] > 0) EXPECT_EQ(r.outputs[k + 2], 1) << c.file << " at " << r.outputs[k + 1];
        else EXPECT_LE(r.outputs[k + 2], 1) << c.file << " guards overlap at " << -r.outputs[k + 1];
        ++checks;
        k += 2;
      }
    }
    const std::string name = c.file;
    if (name == "knapsack.c" || name == "stairs.c") EXPECT_GT(checks, 0u) << name;
  }
}

TEST(LoopIndices, WorkedExample) {
  EXPECT_EQ(identify_loop_indices(prepared("sumtrian_fig2.c")), (std::set<std::string>{"i", "j"}));
  EXPECT_TRUE(identify_loop_indices(parse("int main(){int x; x = 1; return 0;}")).empty());
}

TEST(LoopIndices, CounterInitializedByScanfExcluded) {
  auto p = preprocess(parse(
      "int main(){int t, s; scanf(\"%d\", &t); s = 0; while (t--) { s = s + t; } printf(\"%d\", s); return 0;}"));
  EXPECT_FALSE(identify_loop_indices(p).count("t"));
}

TEST(DpArrays, WorkedExamples) {
  auto f2 = prepared("sumtrian_fig2.c");
  EXPECT_EQ(identify_dp_arrays(f2, compute_substitution_store(f2)), std::vector<std::string>{"dp"});
  auto f3 = prepared("sumtrian_fig3.c");
  EXPECT_EQ(identify_dp_arrays(f3, compute_substitution_store(f3)), std::vector<std::string>{"D"});
  EXPECT_EQ(analysis_error("int main(){int n, i, a[9]; scanf(\"%d\", &n); for (i = 0; i < n; i++)"
                           " scanf(\"%d\", &a[i]); for (i = 0; i < n; i++) printf(\"%d\", a[i]); return 0;}"),
            ErrorKind::NoDpArray);
}

TEST(DpArrays, StableUnderRenamingAndHelpers) {
  auto p = parse(
      "int step(int a, int b) { int r; r = a + b; return r; }"
      " int main(){int n, i, u, f[30]; scanf(\"%d\", &n); f[0] = 1; f[1] = 1;"
      " for (i = 2; i < n; i++) { u = step(f[i-1], f[i-2]); f[i] = u; } printf(\"%d\", f[n-1]); return 0;}");
  auto q = preprocess(p);
  EXPECT_EQ(identify_dp_arrays(q, compute_substitution_store(q)), std::vector<std::string>{"f"});
}

TEST(Labels, WorkedExampleReference) {
  auto lp = analyze(prepared("sumtrian_fig2.c"));
  EXPECT_EQ(lines_with(lp, Label::Init), std::vector<int>{8});
  EXPECT_EQ(lines_with(lp, Label::Update), (std::vector<int>{12, 14, 16, 17}));
  EXPECT_EQ(lines_with(lp, Label::Output), (std::vector<int>{20, 21, 22, 23}));
  EXPECT_EQ(lines_with(lp, Label::Input), (std::vector<int>{3, 7}));
  ASSERT_EQ(lp.inputs.size(), 2u);
  EXPECT_EQ(lp.inputs[0], (InputVar{"n", ScalarType::Int, 0}));
  EXPECT_EQ(lp.inputs[1], (InputVar{"m", ScalarType::Int, 2}));
}

TEST(Labels, WorkedExampleCandidate) {
  auto lp = analyze(prepared("sumtrian_fig3.c"));
  EXPECT_EQ(lines_with(lp, Label::Init), std::vector<int>{17});
  EXPECT_EQ(lines_with(lp, Label::Update), std::vector<int>{20});
  EXPECT_EQ(lines_with(lp, Label::Output), (std::vector<int>{21, 22}));
}

TEST(Labels, ConflictingVariants) {
  EXPECT_EQ(analysis_error("int main(){int n, i, c, t, dp[9], inp[9]; scanf(\"%d\", &n); scanf(\"%d\", &c);"
                           " for (i = 0; i < n; i++) scanf(\"%d\", &inp[i]); dp[0] = 0;"
                           " for (i = 1; i < n; i++) { t = dp[i-1]; if (c) dp[i] = t; else dp[i] = inp[i]; }"
                           " printf(\"%d\", dp[n-1]); return 0;}"),
            ErrorKind::LabelConflict);
}

TEST(Labels, IncompleteWhenTemporaryUnresolved) {
  EXPECT_EQ(analysis_error("int main(){int n, i, t, dp[9]; scanf(\"%d\", &n); dp[0] = 0; t = 0;"
                           " for (i = 1; i < n; i++) { dp[i] = dp[i-1] + 1; dp[i] = dp[i] + t; t = t + 1; }"
                           " printf(\"%d\", dp[n-1]); return 0;}"),
            ErrorKind::LabelIncomplete);
}

TEST(Labels, EveryCorpusSolutionIsLabeled) {
  for (const char* f : {"sumtrian_correct.c", "subset_bool.c", "subset_count.c", "knapsack.c", "stairs.c"}) {
    auto lp = analyze(prepared(f));
    EXPECT_EQ(lp.dp_arrays.size(), 1u) << f;
    bool has_update = false;
    for (const auto& [loc, l] : lp.labels) has_update = has_update || l == Label::Update;
    EXPECT_TRUE(has_update) << f;
  }
}
