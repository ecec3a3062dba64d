#include <gtest/gtest.h>

#include "dpfb/feedback.hpp"
#include "dpfb/features.hpp"
#include "dpfb/frontend.hpp"
#include "dpfb/oracle.hpp"
#include "dpfb/render.hpp"
#include "test_support.hpp"

using namespace dpfb;

namespace {

const Solver& solver() {
  static Solver s;
  return s;
}

FeedbackOptions options_for(const std::string& constraints) {
  FeedbackOptions o;
  o.constraints = parse_constraints(corpus::read(constraints));
  return o;
}

std::string replace_once(std::string s, const std::string& from, const std::string& to) {
  auto at = s.find(from);
  EXPECT_NE(at, std::string::npos) << from;
  if (at != std::string::npos) s.replace(at, from.size(), to);
  return s;
}

std::string fib(const std::string& decl, const std::string& update, const std::string& cond,
                const std::string& output) {
  return R"(
int main() {
  int n, i, best;
  scanf("%d", &n);
  int a[n + 1], )" + decl + R"(;
  for (i = 0; i <= n; i++) scanf("%d", &a[i]);
  dp[0] = a[0];
  dp[1] = a[1];
  for (i = 2; )" + cond + R"(; i++) dp[i] = )" + update + R"(;
)" + output + R"(
  return 0;
}
)";
}

const char* kPrintLast = "  printf(\"%d\", dp[n]);";
const char* kPrintMax = R"(  best = dp[0];
  for (i = 1; i <= n; i++)
    if (dp[i] > best) best = dp[i];
  printf("%d", best);)";
const char* kPrintSum = R"(  best = 0;
  for (i = 0; i <= n; i++)
    best = best + dp[i];
  printf("%d", best);)";

FeedbackOptions small_n() {
  FeedbackOptions o;
  o.constraints = parse_constraints("2 <= n && n <= 40");
  return o;
}

std::vector<CorrectionKind> kinds(const FeedbackReport& r) {
  std::vector<CorrectionKind> out;
  for (const auto& c : r.corrections) out.push_back(c.kind);
  return out;
}

const PairTrace* trace_of(const FeedbackReport& r, const std::string& component) {
  for (const auto& t : r.trace)
    if (t.component == component) return &t;
  return nullptr;
}

}  // namespace

TEST(Feedback, WorkedExampleCorrections) {
  auto r = verify_sources(corpus::read("sumtrian_fig2.c"), corpus::read("sumtrian_fig3.c"), solver(),
                          options_for("sumtrian.constraints"));
  ASSERT_EQ(r.verdict, Verdict::Faulty) << r.error;
  ASSERT_EQ(kinds(r), (std::vector<CorrectionKind>{CorrectionKind::Declaration, CorrectionKind::GuardSplit,
                                                   CorrectionKind::GuardSplit, CorrectionKind::OutputPattern}));
  EXPECT_EQ(r.corrections[0].text(), "Types of A and D should be int[n][n]");
  EXPECT_EQ(r.corrections[0].replaced, "int[101][101]");
  EXPECT_EQ(render(r.corrections[1].guard), "j == 0");
  EXPECT_EQ(r.corrections[1].suggested, "D[i][j] = D[i - 1][j] + A[i][j]");
  EXPECT_EQ(render(r.corrections[2].guard), "j != 0 && j == i");
  EXPECT_EQ(r.corrections[2].suggested, "D[i][j] = D[i - 1][j - 1] + A[i][j]");
  EXPECT_EQ(r.corrections[3].text(),
            "Under guard true, compute maximum over D[n - 1][0],...,D[n - 1][n - 1] instead of "
            "D[n - 1][0],...,D[n - 1][99]");
  EXPECT_LE(r.size_after, r.size_before);

  auto* u = trace_of(r, "update");
  ASSERT_NE(u, nullptr);
  EXPECT_EQ(u->refinements, 2);
  EXPECT_TRUE(u->exited_valid);
  for (const auto& t : r.trace)
    for (const auto& q : t.queries) EXPECT_TRUE(q.countermodel_falsifies) << q.name;

  auto text = render(r);
  EXPECT_NE(text.find("In the declaration:\n  1) Types of A and D should be int[n][n]"), std::string::npos);
  EXPECT_NE(text.find("In the update:\n  2) Under guard j == 0"), std::string::npos);
  EXPECT_NE(text.find("In the output:\n  4) "), std::string::npos);
}

TEST(Feedback, RepairedWorkedExampleIsVerified) {
  auto opt = options_for("sumtrian.constraints");
  auto ref = corpus::read("sumtrian_fig2.c");
  auto r = verify_sources(ref, corpus::read("sumtrian_fig3.c"), solver(), opt);
  ASSERT_TRUE(r.repaired_source.has_value());
  auto again = recheck(ref, r, solver(), opt);
  EXPECT_EQ(again.verdict, Verdict::VerifiedCorrect) << render(again) << *r.repaired_source;

  InputProfile prof;
  prof.constraints = parse_constraints("1 <= n && n <= 8");
  auto d = differential(parse(ref), parse(*r.repaired_source), 1000, prof, 11);
  EXPECT_TRUE(d.agree);
  EXPECT_EQ(d.trials_run, 1000u);
}

TEST(Feedback, IdenticalProgramsAreVerified) {
  for (const auto* name : {"sumtrian_fig2.c", "stairs.c", "knapsack.c"}) {
    auto src = corpus::read(name);
    auto r = verify_sources(src, src, solver(), {});
    EXPECT_EQ(r.verdict, Verdict::VerifiedCorrect) << name << "\n" << render(r);
    EXPECT_TRUE(r.corrections.empty());
    EXPECT_FALSE(r.repaired_source.has_value());
  }
}

TEST(Feedback, WrongOperatorIsReplaced) {
  auto ref = fib("dp[n + 1]", "dp[i - 1] + dp[i - 2]", "i <= n", kPrintLast);
  auto cand = fib("dp[n + 1]", "dp[i - 1] - dp[i - 2]", "i <= n", kPrintLast);
  auto r = verify_sources(ref, cand, solver(), small_n());
  ASSERT_EQ(kinds(r), std::vector<CorrectionKind>{CorrectionKind::ReplaceStatement}) << render(r);
  EXPECT_EQ(r.corrections[0].component, "update");
  EXPECT_EQ(render(r.corrections[0].guard), "true");
  EXPECT_EQ(r.corrections[0].suggested, "dp[i] = dp[i - 1] + dp[i - 2]");
  EXPECT_EQ(r.corrections[0].replaced, "dp[i] = dp[i - 1] - dp[i - 2]");
  ASSERT_TRUE(r.repaired_source);
  EXPECT_EQ(recheck(ref, r, solver(), small_n()).verdict, Verdict::VerifiedCorrect);
}

TEST(Feedback, ShortLoopGetsIterationSpace) {
  auto ref = fib("dp[n + 1]", "dp[i - 1] + dp[i - 2]", "i <= n", kPrintLast);
  auto cand = fib("dp[n + 1]", "dp[i - 1] + dp[i - 2]", "i < n", kPrintLast);
  auto r = verify_sources(ref, cand, solver(), small_n());
  ASSERT_EQ(kinds(r), std::vector<CorrectionKind>{CorrectionKind::IterationSpace}) << render(r);
  EXPECT_NE(r.corrections[0].suggested.find("i <= n"), std::string::npos);
  ASSERT_TRUE(r.repaired_source);
  EXPECT_EQ(recheck(ref, r, solver(), small_n()).verdict, Verdict::VerifiedCorrect);
}

TEST(Feedback, RefinementBudgetForcesTotalSubstitution) {
  auto opt = options_for("sumtrian.constraints");
  opt.delta = 1;
  auto ref = corpus::read("sumtrian_fig2.c");
  auto r = verify_sources(ref, corpus::read("sumtrian_fig3.c"), solver(), opt);
  ASSERT_EQ(r.verdict, Verdict::Faulty);
  ASSERT_EQ(kinds(r), (std::vector<CorrectionKind>{CorrectionKind::Declaration, CorrectionKind::TotalSubstitution,
                                                   CorrectionKind::OutputPattern}))
      << render(r);
  auto* u = trace_of(r, "update");
  ASSERT_NE(u, nullptr);
  EXPECT_TRUE(u->total_substitution);
  EXPECT_FALSE(u->exited_valid);
  EXPECT_TRUE(u->final_psi_valid);
  EXPECT_EQ(u->refinements, 1);
  ASSERT_TRUE(r.repaired_source);
  EXPECT_EQ(recheck(ref, r, solver(), opt).verdict, Verdict::VerifiedCorrect);
}

TEST(Feedback, SumInsteadOfMaximum) {
  auto ref = fib("dp[n + 1]", "dp[i - 1] + dp[i - 2]", "i <= n", kPrintMax);
  auto cand = fib("dp[n + 1]", "dp[i - 1] + dp[i - 2]", "i <= n", kPrintSum);
  auto r = verify_sources(ref, cand, solver(), small_n());
  ASSERT_EQ(kinds(r), std::vector<CorrectionKind>{CorrectionKind::OutputPattern}) << render(r);
  EXPECT_EQ(r.corrections[0].suggested, "maximum over dp[0],...,dp[n]");
  EXPECT_EQ(r.corrections[0].replaced, "sum over dp[0],...,dp[n]");
  ASSERT_TRUE(r.repaired_source);
  EXPECT_EQ(recheck(ref, r, solver(), small_n()).verdict, Verdict::VerifiedCorrect);
}

TEST(Feedback, SmallFixedArrayOverflows) {
  auto ref = fib("dp[41]", "dp[i - 1] + dp[i - 2]", "i <= n", kPrintLast);
  auto cand = fib("dp[20]", "dp[i - 1] + dp[i - 2]", "i <= n", kPrintLast);
  auto r = verify_sources(ref, cand, solver(), small_n());
  ASSERT_EQ(r.verdict, Verdict::Faulty) << render(r);
  bool overflow = false;
  for (const auto& c : r.corrections) overflow = overflow || c.kind == CorrectionKind::OutOfBounds;
  EXPECT_TRUE(overflow) << render(r);
  EXPECT_FALSE(r.repaired_source);
}

TEST(Feedback, UnparseableSubmissionIsUnlabeled) {
  auto r = verify_sources(corpus::read("stairs.c"), "int main() { int n; scanf(\"%d\", &n) }", solver(), {});
  EXPECT_EQ(r.verdict, Verdict::Unlabeled);
  ASSERT_TRUE(r.error_kind);
  EXPECT_EQ(*r.error_kind, ErrorKind::SyntaxError);
  auto j = to_json(r);
  EXPECT_EQ(j["verdict"], "Unlabeled");
  EXPECT_EQ(j["error"]["kind"], "SyntaxError");
}

TEST(Feedback, SolverFailureIsUnlabeled) {
  Solver broken(SolverConfig{"/nonexistent/z3", {}, 500});
  auto src = corpus::read("stairs.c");
  auto r = verify_sources(src, replace_once(src, "dp[i-1] < dp[i-2]", "dp[i-1] > dp[i-2]"), broken, {});
  EXPECT_EQ(r.verdict, Verdict::Unlabeled);
}

TEST(Feedback, JsonCarriesReportFields) {
  auto r = verify_sources(corpus::read("sumtrian_fig2.c"), corpus::read("sumtrian_fig3.c"), solver(),
                          options_for("sumtrian.constraints"));
  auto j = to_json(r);
  EXPECT_EQ(j["verdict"], "Faulty");
  EXPECT_EQ(j["corrections"].size(), 4u);
  EXPECT_EQ(j["corrections"][1]["guard"], "j == 0");
  EXPECT_EQ(j["feedback_size"]["before"], r.size_before);
  EXPECT_GT(j["solver_queries"].get<int>(), 0);
  EXPECT_TRUE(j["repaired_source"].is_string());
}

TEST(OutputLifting, ScanLoopsBecomeAggregates) {
  auto fig2 = analyze_source(corpus::read("sumtrian_fig2.c"));
  auto a = lift_output_pattern(fig2);
  ASSERT_TRUE(a);
  ASSERT_EQ(a->size(), 1u);
  EXPECT_EQ(render(a->front()), "_max(dp[n - 1][0], dp[n - 1][n - 1])");

  auto fig3 = analyze_source(corpus::read("sumtrian_fig3.c"));
  auto b = lift_output_pattern(fig3);
  ASSERT_TRUE(b);
  EXPECT_EQ(render(b->front()), "_max(D[n - 1][0], D[n - 1][99])");

  auto plain = analyze_source(fib("dp[n + 1]", "dp[i - 1] + dp[i - 2]", "i <= n", kPrintLast));
  EXPECT_FALSE(lift_output_pattern(plain));

  auto sum = analyze_source(fib("dp[n + 1]", "dp[i - 1] + dp[i - 2]", "i <= n", kPrintSum));
  auto c = lift_output_pattern(sum);
  ASSERT_TRUE(c);
  EXPECT_EQ(render(c->front()), "_sum(dp[0], dp[n])");
}

// Property: any single-operator mutant of the update that changes behaviour
// is reported Faulty, and its repair passes recheck and differential testing.
TEST(FeedbackProperty, RepairsOfUpdateMutantsAreEquivalent) {
  auto ref = corpus::read("stairs.c");
  auto opt = options_for("stairs.constraints");
  InputProfile prof;
  prof.constraints = parse_constraints("2 <= n && n <= 12");
  const std::vector<std::pair<std::string, std::string>> mutations = {
      {"dp[i-1] < dp[i-2]", "dp[i-1] > dp[i-2]"},
      {"c[i] + (", "c[i] - ("},
      {"? dp[i-1] : dp[i-2]", "? dp[i-2] : dp[i-1]"},
      {"? dp[i-1] : dp[i-2]", "? dp[i-1] : dp[i-1]"},
      {"dp[i-1] < dp[i-2]", "dp[i-1] <= dp[i-2]"},
  };
  for (const auto& [from, to] : mutations) {
    auto cand = replace_once(ref, from, to);
    auto r = verify_sources(ref, cand, solver(), opt);
    auto d = differential(parse(ref), parse(cand), 200, prof, 5);
    if (d.agree) {
      EXPECT_NE(r.verdict, Verdict::Faulty) << to;
      continue;
    }
    ASSERT_EQ(r.verdict, Verdict::Faulty) << to << "\n" << render(r);
    ASSERT_TRUE(r.repaired_source) << to;
    EXPECT_EQ(recheck(ref, r, solver(), opt).verdict, Verdict::VerifiedCorrect) << to;
    auto fixed = differential(parse(ref), parse(*r.repaired_source), 200, prof, 6);
    EXPECT_TRUE(fixed.agree) << to << "\n" << *r.repaired_source;
  }
}
