#include <gtest/gtest.h>

#include "dpfb/correspondence.hpp"
#include "dpfb/encoder.hpp"
#include "dpfb/error.hpp"
#include "dpfb/features.hpp"
#include "dpfb/formula.hpp"
#include "dpfb/frontend.hpp"
#include "dpfb/oracle.hpp"
#include "dpfb/render.hpp"
#include "dpfb/solver.hpp"
#include "test_support.hpp"

using namespace dpfb;

namespace {

const Solver& solver() {
  static Solver s;
  return s;
}

const char* kFrame = R"(
int main() {
  int n, i;
  scanf("%d", &n);
  int a[n + 1], dp[n + 1];
  for (i = 0; i <= n; i++) scanf("%d", &a[i]);
  for (i = 0; i <= n; i++) dp[i] = a[i];
  for (i = 1; i <= n; i++) {
    if (a[i] > 0) {
      dp[i] = dp[i - 1];
      dp[i] = dp[i] + a[i];
    }
  }
  printf("%d", dp[n]);
  return 0;
}
)";

std::string stairs_with(const std::string& start, const std::string& guard, const std::string& cond) {
  return R"(
int main() {
  int n, i;
  scanf("%d", &n);
  int dp[n + 1];
  dp[0] = 1;
  dp[1] = 1;
  for (i = )" + start + "; " + cond + R"(; i++) {
    if ()" + guard + R"() dp[i] = dp[i - 1] + dp[i - 2];
  }
  printf("%d", dp[n]);
  return 0;
}
)";
}

struct Pair {
  LabeledProgram r, c;
  std::vector<TopLevel> R, C;
  VariableMap sigma;
};

Pair pair_of(const std::string& ref, const std::string& cand) {
  Pair p{analyze_source(ref), analyze_source(cand), {}, {}, {}};
  p.R = canonicalize_loops(p.r);
  p.C = canonicalize_loops(p.c);
  p.sigma = derive_variable_maps(p.r, p.c).at(0);
  return p;
}

PairEncoding encode(const Pair& p, std::size_t k, const std::vector<ExprPtr>& cons = {}) {
  return PairEncoding(p.r, p.R[k], p.c, p.C[k], extend_with_indices(p.sigma, p.R[k], p.C[k]), cons);
}

std::vector<ExprPtr> sumtrian_constraints() { return parse_constraints(corpus::read("sumtrian.constraints")); }

}  // namespace

TEST(EncodeBody, WorkedReferenceHasFourPaths) {
  auto lp = analyze_source(corpus::read("sumtrian_fig2.c"));
  auto list = canonicalize_loops(lp);
  auto b = encode_body(list[2], lp);
  ASSERT_EQ(b.paths.size(), 4u);
  EXPECT_EQ(render(b.paths[0].guard), "j == 0");
  EXPECT_EQ(render(b.paths[0].writes[0].value), "dp[i - 1][j] + m[i][j]");
  EXPECT_EQ(render(b.paths[1].guard), "j != 0 && j == i");
  for (const auto& p : b.paths) EXPECT_EQ(p.writes.size(), 1u);
}

TEST(EncodeBody, HelperCallBecomesConditionalValue) {
  auto lp = analyze_source(corpus::read("sumtrian_fig3.c"));
  auto list = canonicalize_loops(lp);
  auto b = encode_body(list[2], lp);
  ASSERT_EQ(b.paths.size(), 1u);
  EXPECT_TRUE(ex::is_true(b.paths[0].guard));
  EXPECT_EQ(render(b.paths[0].writes[0].value),
            "D[i - 1][j] > D[i - 1][j - 1] ? A[i][j] + D[i - 1][j] : A[i][j] + D[i - 1][j - 1]");
}

TEST(EncodeBody, InputLoopReadsTokens) {
  auto lp = analyze_source(corpus::read("sumtrian_fig2.c"));
  auto b = encode_body(canonicalize_loops(lp)[0], lp);
  ASSERT_EQ(b.paths.size(), 1u);
  EXPECT_EQ(b.paths[0].writes[0].target, "m");
  EXPECT_EQ(render(b.paths[0].writes[0].value), "__read_0");
}

TEST(EncodeBody, FramePathAndReadAfterWrite) {
  auto lp = analyze_source(kFrame);
  auto list = canonicalize_loops(lp);
  auto b = encode_body(list[2], lp);
  ASSERT_EQ(b.paths.size(), 2u);
  ASSERT_EQ(b.paths[0].writes.size(), 2u);
  EXPECT_EQ(render(b.paths[0].guard), "a[i] > 0");
  // dp[i] is read after it was written on the same path.
  EXPECT_EQ(render(b.paths[0].writes[1].value), "dp[i - 1] + a[i]");
  EXPECT_TRUE(b.paths[1].is_frame());
}

TEST(EncodeBody, RejectsInputReassignment) {
  const char* src = R"(
int main() {
  int n, i;
  scanf("%d", &n);
  int dp[n + 1];
  dp[0] = 1;
  for (i = 1; i <= n; i++) { dp[i] = dp[i - 1] * 2; n = n; }
  printf("%d", dp[n]);
  return 0;
}
)";
  auto lp = analyze_source(src);
  auto list = canonicalize_loops(lp);
  try {
    encode_body(list[1], lp);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EncodingFailed);
  }
}

// Property: path guards are pairwise disjoint and cover every state.
TEST(EncodeBodyProperty, GuardsPartitionTheState) {
  for (auto name : {"sumtrian_fig2.c", "sumtrian_fig3.c", "knapsack.c", "stairs.c", "subset_bool.c", "subset_count.c"}) {
    auto lp = analyze_source(corpus::read(name));
    for (const auto& t : canonicalize_loops(lp)) {
      BodyFormula b;
      try {
        b = encode_body(t, lp);
      } catch (const Error&) {
        continue;
      }
      std::vector<ExprPtr> gs;
      for (const auto& p : b.paths) gs.push_back(p.guard);
      EXPECT_TRUE(solver().is_valid(ex::disj_all(gs))) << name;
      for (std::size_t x = 0; x < gs.size(); ++x)
        for (std::size_t y = x + 1; y < gs.size(); ++y)
          EXPECT_TRUE(solver().is_valid(ex::neg(ex::conj(gs[x], gs[y])))) << name << " paths " << x << "," << y;
    }
  }
}

TEST(IterationSpace, WorkedPairAgrees) {
  auto p = pair_of(corpus::read("sumtrian_fig2.c"), corpus::read("sumtrian_fig3.c"));
  auto e = encode(p, 2, sumtrian_constraints());
  EXPECT_TRUE(solver().is_valid(e.phi()));
}

TEST(IterationSpace, GuardCompensatesForWiderRange) {
  auto p = pair_of(stairs_with("2", "1", "i <= n"), stairs_with("0", "i > 1", "i <= n"));
  auto e = encode(p, p.R.size() - 2);
  EXPECT_TRUE(solver().is_valid(e.phi()));
}

TEST(IterationSpace, ShortRangeIsInvalid) {
  auto p = pair_of(stairs_with("2", "1", "i <= n"), stairs_with("2", "1", "i < n"));
  auto e = encode(p, p.R.size() - 2);
  auto v = solver().check_validity(e.phi());
  ASSERT_EQ(v.kind, VerdictKind::Counterexample);
  EXPECT_EQ(v.model->at("r.i"), v.model->at("r.n"));
  EXPECT_FALSE(solver().is_valid(e.phi_cover()));
}

TEST(IterationSpace, FrameOnlyExtraIterationsAreCovered) {
  // The candidate runs extra iterations that do nothing.
  auto p = pair_of(stairs_with("2", "1", "i <= n"), stairs_with("2", "i <= n", "i <= n + 3"));
  auto e = encode(p, p.R.size() - 2);
  EXPECT_TRUE(solver().is_valid(e.phi()));
}

TEST(Equivalence, WorkedPairInputAndInitAreValid) {
  auto p = pair_of(corpus::read("sumtrian_fig2.c"), corpus::read("sumtrian_fig3.c"));
  for (std::size_t k : {0u, 1u}) {
    auto e = encode(p, k, sumtrian_constraints());
    EXPECT_TRUE(solver().is_valid(e.psi(e.phi2()))) << k;
  }
}

TEST(Equivalence, WorkedPairUpdateHasCounterexample) {
  auto p = pair_of(corpus::read("sumtrian_fig2.c"), corpus::read("sumtrian_fig3.c"));
  auto e = encode(p, 2, sumtrian_constraints());
  auto v = solver().check_validity(e.psi(e.phi2()));
  ASSERT_EQ(v.kind, VerdictKind::Counterexample);
  // Only j == 0 or j == i can expose the boundary fault.
  auto i = v.model->at("r.i"), j = v.model->at("r.j");
  EXPECT_TRUE(j == 0 || j == i) << "i=" << i << " j=" << j;
}

TEST(Equivalence, TranslatedReferenceIsValid) {
  auto p = pair_of(corpus::read("sumtrian_fig2.c"), corpus::read("sumtrian_fig3.c"));
  auto e = encode(p, 2, sumtrian_constraints());
  BodyFormula t;
  for (const auto& path : e.phi1().paths) t.paths.push_back(e.translate(path));
  EXPECT_TRUE(solver().is_valid(e.psi(t)));
  auto src = render(e.to_source(t, {}));
  EXPECT_NE(src.find("D[i][j] = D[i - 1][j] + A[i][j];"), std::string::npos) << src;
}

TEST(Bounds, FixedSizeArraysOverflow) {
  auto p = pair_of(corpus::read("sumtrian_fig2.c"), corpus::read("sumtrian_fig3.c"));
  auto e = encode(p, 2, sumtrian_constraints());
  auto checks = e.bounds_checks(e.phi2());
  ASSERT_FALSE(checks.empty());
  bool negative_column = false;
  for (const auto& b : checks) {
    if (!solver().is_valid(e.entails(ex::implies(b.condition, b.in_bounds)))) negative_column = true;
  }
  // D[i - 1][j - 1] with j == 0 is read.
  EXPECT_TRUE(negative_column);
}

namespace {

void check_self(const std::string& name, const std::string& src, const std::string& constraints) {
  auto lp = analyze_source(src);
  auto list = canonicalize_loops(lp);
  auto sigma = derive_variable_maps(lp, lp);
  VariableMap id;
  for (const auto& m : sigma) {
    bool ident = true;
    for (const auto& [a, b] : m.pairs) ident = ident && a == b;
    if (ident) id = m;
  }
  auto cons = constraints.empty() ? std::vector<ExprPtr>{} : parse_constraints(corpus::read(constraints));
  std::map<std::size_t, StmtList> overrides;
  std::set<std::string> taken;
  for (const auto& [n, v] : lp.symbols) taken.insert(n);
  for (std::size_t k = 0; k < list.size(); ++k) {
    std::optional<PairEncoding> e;
    try {
      e.emplace(lp, list[k], lp, list[k], extend_with_indices(id, list[k], list[k]), cons);
    } catch (const Error&) {
      continue;
    }
    EXPECT_TRUE(solver().is_valid(e->phi())) << name << " element " << k;
    EXPECT_TRUE(solver().is_valid(e->psi(e->phi2()))) << name << " element " << k;
    auto body = e->to_source(e->phi2(), taken);
    overrides[k] = {replace_nest_body(list[k].stmt, body)};
  }
  // Re-executing the encoded paths as source keeps behaviour.
  auto q = rebuild(lp, list, overrides);
  ASSERT_NO_THROW(typecheck(q)) << render(q);
  InputProfile prof;
  prof.constraints = cons;
  auto d = differential(lp.program, q, 60, prof, 3);
  EXPECT_TRUE(d.agree) << name << "\n" << render(q);
}

}  // namespace

// Property: every encodable element of a correct program is equivalent to
// itself, and the path encoding executed as code behaves like the original.
TEST(EncodingProperty, SelfEquivalenceAndSoundness) {
  check_self("fig2", corpus::read("sumtrian_fig2.c"), "sumtrian.constraints");
  check_self("correct", corpus::read("sumtrian_correct.c"), "sumtrian.constraints");
  check_self("knapsack", corpus::read("knapsack.c"), "knapsack.constraints");
  check_self("stairs", corpus::read("stairs.c"), "stairs.constraints");
  check_self("subset_bool", corpus::read("subset_bool.c"), "subset.constraints");
  check_self("subset_count", corpus::read("subset_count.c"), "subset.constraints");
  check_self("frame", kFrame, "");
}
