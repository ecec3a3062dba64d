// Acceptance suite: one PASS/FAIL line per criterion. Exit status 1 when any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "dpfb/correspondence.hpp"
#include "dpfb/features.hpp"
#include "dpfb/feedback.hpp"
#include "dpfb/frontend.hpp"
#include "dpfb/mutation.hpp"
#include "dpfb/oracle.hpp"
#include "dpfb/preprocess.hpp"
#include "dpfb/render.hpp"
#include "dpfb/workflow.hpp"
#include "test_support.hpp"

using namespace dpfb;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Solution {
  std::string file;
  std::string problem;
  std::string constraints;
};

const std::vector<Solution> kSolutions = {
    {"sumtrian_fig2.c", "sumtrian", "sumtrian.constraints"},
    {"sumtrian_correct.c", "sumtrian", "sumtrian.constraints"},
    {"stairs.c", "stairs", "stairs.constraints"},
    {"knapsack.c", "knapsack", "knapsack.constraints"},
    {"subset_bool.c", "subset", "subset.constraints"},
    {"subset_count.c", "subset", "subset.constraints"},
    {"grid_path.c", "grid", "grid.constraints"},
    {"robber.c", "robber", "robber.constraints"},
    {"lcs.c", "lcs", "lcs.constraints"},
};

int failures = 0;
std::map<int, std::string> lines;

void criterion(int n, const std::string& name, bool pass, const std::string& detail) {
  lines[n] = std::string(pass ? "PASS" : "FAIL") + "  criterion " + std::to_string(n) + " (" + name + "): " + detail;
  std::cerr << lines[n] << std::endl;
  if (!pass) ++failures;
}

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string squash(std::string s) {
  std::string out;
  for (char c : s)
    if (c != ' ') out += c;
  return out;
}

InputProfile profile_for(const Solution& s) {
  InputProfile p;
  p.constraints = parse_constraints(corpus::read(s.constraints));
  return p;
}

// Worked example through the corpus workflow: ingest, mark, verify.
struct Worked {
  FeedbackReport report;
  double seconds = 0;
  std::string cluster_fig2, cluster_fig3;
};

Worked run_worked_example() {
  Worked w;
  auto dir = fs::temp_directory_path() / "dpfb_acceptance_worked";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "fig2.c") << corpus::read("sumtrian_fig2.c");
  std::ofstream(dir / "fig3.c") << corpus::read("sumtrian_fig3.c");
  std::ofstream(dir / "tri.constraints") << corpus::read("sumtrian.constraints");
  std::ofstream(dir / "manifest.json") << R"({"problem": "sumtrian", "constraints": "tri.constraints",
    "state": "state.json", "submissions": [{"id": "fig2", "path": "fig2.c"}, {"id": "fig3", "path": "fig3.c"}]})";
  auto start = Clock::now();
  auto state = ingest(load_manifest(dir / "manifest.json"));
  for (const auto& c : state.clusters) {
    if (c.has_member("fig2")) w.cluster_fig2 = c.id;
    if (c.has_member("fig3")) w.cluster_fig3 = c.id;
  }
  mark_reference(state, w.cluster_fig2, "fig2");
  VerifyOptions o;
  auto out = verify_corpus(state, o);
  w.seconds = seconds_since(start);
  w.report = out.reports.at("fig3");
  fs::remove_all(dir);
  return w;
}

void worked_example_criteria(const Solver& solver) {
  auto w = run_worked_example();
  const auto& r = w.report;
  const auto& cs = r.corrections;
  std::vector<std::string> problems;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  };
  auto equivalent = [&](const ExprPtr& g, const std::string& paper) {
    return g && solver.is_valid(ex::iff(g, parse_expression(paper)));
  };
  expect(r.verdict == Verdict::Faulty, "verdict " + to_string(r.verdict));
  expect(cs.size() == 4, std::to_string(cs.size()) + " corrections");
  if (cs.size() == 4) {
    expect(cs[0].kind == CorrectionKind::Declaration && cs[0].suggested == "int[n][n]" && cs[0].subject == "A and D",
           "declaration: " + cs[0].text());
    expect(cs[1].kind == CorrectionKind::GuardSplit && equivalent(cs[1].guard, "j == 0") &&
               squash(cs[1].suggested) == squash("D[i][j] = D[i-1][j] + A[i][j]"),
           "correction 2: " + cs[1].text());
    expect(cs[2].kind == CorrectionKind::GuardSplit && equivalent(cs[2].guard, "j != 0 && j == i") &&
               squash(cs[2].suggested) == squash("D[i][j] = D[i-1][j-1] + A[i][j]"),
           "correction 3: " + cs[2].text());
    expect(cs[3].kind == CorrectionKind::OutputPattern &&
               squash(cs[3].suggested) == squash("maximum over D[n-1][0],...,D[n-1][n-1]") &&
               squash(cs[3].replaced) == squash("D[n-1][0],...,D[n-1][99]"),
           "output: " + cs[3].text());
  }
  const PairTrace* update = nullptr;
  for (const auto& t : r.trace)
    if (t.component == "update") update = &t;
  expect(update && update->exited_valid && !update->total_substitution, "final refined psi not valid");
  expect(w.seconds < 10.0, "runtime " + std::to_string(w.seconds) + " s");
  char detail[160];
  std::snprintf(detail, sizeof detail, "%zu corrections, final psi %s, %.2f s", cs.size(),
                update && update->exited_valid ? "valid" : "not valid", w.seconds);
  std::string d = detail;
  for (const auto& p : problems) d += "; " + p;
  criterion(1, "golden worked example", problems.empty(), d);

  std::vector<std::string> ladder;
  if (update)
    for (const auto& q : update->queries)
      if (q.name.rfind("psi_", 0) == 0) ladder.push_back(q.name + "=" + to_string(q.verdict));
  bool shape = update && update->refinements == 2 && ladder.size() == 3 &&
               ladder[0] == "psi_1=" + to_string(VerdictKind::Counterexample) &&
               ladder[1] == "psi_2=" + to_string(VerdictKind::Counterexample) &&
               ladder[2] == "psi_3=" + to_string(VerdictKind::Valid);
  std::string lad;
  for (const auto& l : ladder) lad += (lad.empty() ? "" : ", ") + l;
  criterion(2, "refinement trace shape", shape,
            std::to_string(update ? update->refinements : -1) + " refinements [" + lad + "]");

  auto f2 = extract_features(analyze_source(corpus::read("sumtrian_fig2.c")));
  auto f3 = extract_features(analyze_source(corpus::read("sumtrian_fig3.c")));
  bool listing = f2.dp_type == ScalarType::Int && f2.dp_dims == 2 && !f2.input_reused_as_dp &&
                 f2.num_update_loops == 1 && f2.update_loops.size() == 1 && f2.update_loops[0].depth == 2 &&
                 f2.update_loops[0].directions == "++" && f2.update_loops[0].updated_element == "dp[i][j]" &&
                 f2.extra_dp_arrays.empty();
  bool same = f2 == f3 && !w.cluster_fig2.empty() && w.cluster_fig2 == w.cluster_fig3;
  std::string text = f2.canonical_text();
  for (auto& c : text)
    if (c == '\n') c = ' ';
  criterion(3, "feature fidelity", listing && same,
            text + (same ? "| Fig. 3 identical, same cluster" : "| Fig. 3 differs or clusters apart"));
}

struct MutantOutcome {
  Mutant mutant;
  std::string solution;
  bool differs = false;  // differential oracle found a disagreement
  FeedbackReport report;
  bool rechecked = false;
};

bool countermodels_sound(const FeedbackReport& r) {
  for (const auto& t : r.trace)
    for (const auto& q : t.queries)
      if (q.verdict == VerdictKind::Counterexample && !q.countermodel_falsifies) return false;
  return true;
}

bool final_psi_valid(const FeedbackReport& r) {
  for (const auto& t : r.trace)
    if (!t.total_substitution && !t.exited_valid) return false;
  return true;
}

void mutation_criteria(const Solver& solver) {
  std::vector<MutantOutcome> all;
  std::set<std::string> solutions, problems;
  std::map<MutationKind, int> per_kind;
  double verify_seconds = 0;
  for (const auto& s : kSolutions) {
    auto ref = corpus::read(s.file);
    auto ref_program = parse(ref);
    auto stripped = strip_testcase_loop(ref_program);
    FeedbackOptions opt;
    opt.constraints = parse_constraints(corpus::read(s.constraints));
    auto prof = profile_for(s);
    for (auto& m : generate_mutants(ref, s.file.substr(0, s.file.size() - 2))) {
      MutantOutcome o;
      o.solution = s.file;
      auto d = differential(stripped, parse(m.source), 500, prof, 17);
      o.differs = !d.agree;
      auto start = Clock::now();
      o.report = verify_sources(ref, m.source, solver, opt);
      verify_seconds += seconds_since(start);
      if (o.report.verdict == Verdict::VerifiedCorrect && !o.differs) {
        // Consistency with the oracle on a larger sample.
        o.differs = !differential(stripped, parse(m.source), 1000, prof, 29).agree;
      }
      if (o.report.verdict == Verdict::Faulty && o.report.repaired_source) {
        auto again = recheck(ref, o.report, solver, opt);
        o.rechecked = again.verdict == Verdict::VerifiedCorrect &&
                      differential(stripped, parse(*o.report.repaired_source), 300, prof, 23).agree;
      }
      o.mutant = std::move(m);
      all.push_back(std::move(o));
    }
  }

  // Mutants the oracle cannot tell apart from the solution are equivalent
  // mutants and are not faults, except hardcoded dimensions, which are
  // declaration faults by construction.
  std::vector<const MutantOutcome*> faulty_mutants;
  int equivalent = 0;
  for (const auto& o : all) {
    if (o.differs || o.mutant.kind == MutationKind::HardcodedDimension) {
      faulty_mutants.push_back(&o);
      solutions.insert(o.solution);
      ++per_kind[o.mutant.kind];
    } else {
      ++equivalent;
    }
  }
  for (const auto& s : kSolutions)
    if (solutions.count(s.file)) problems.insert(s.problem);

  int caught = 0, unsound = 0, faulty = 0, repaired = 0, unlabeled = 0;
  std::vector<std::string> unsound_ids, missed_ids;
  for (const auto* o : faulty_mutants) {
    auto v = o->report.verdict;
    if (v != Verdict::VerifiedCorrect) ++caught;
    else missed_ids.push_back(o->mutant.id);
    if (v == Verdict::VerifiedCorrect && o->differs) {
      ++unsound;
      unsound_ids.push_back(o->mutant.id);
    }
    if (v == Verdict::Unlabeled) ++unlabeled;
  }
  for (const auto& o : all)
    if (o.report.verdict == Verdict::Faulty) {
      ++faulty;
      repaired += o.rechecked;
    }
  const int n = static_cast<int>(faulty_mutants.size());
  bool kinds_ok = per_kind.size() == std::size(kAllMutationKinds);
  double caught_rate = n ? double(caught) / n : 0;
  double repair_rate = faulty ? double(repaired) / faulty : 0;
  char detail[400];
  std::snprintf(detail, sizeof detail,
                "%d mutants (%d equivalent excluded) of %zu solutions across %zu problems, %zu kinds; "
                "Faulty/Unlabeled %.1f%% (%d Unlabeled), unsound VerifiedCorrect %d; "
                "apply-and-recheck %.1f%% of %d Faulty",
                n, equivalent, solutions.size(), problems.size(), per_kind.size(), 100 * caught_rate,
                unlabeled, unsound, 100 * repair_rate, faulty);
  std::string d = detail;
  for (const auto& id : unsound_ids) d += "; unsound: " + id;
  if (!missed_ids.empty() && missed_ids.size() <= 10)
    for (const auto& id : missed_ids) d += "; verified: " + id;
  criterion(4, "mutation corpus", n >= 200 && solutions.size() >= 5 && problems.size() >= 3 && kinds_ok &&
                                      caught_rate >= 0.90 && unsound == 0 && repair_rate >= 0.80,
            d);

  int checked = 0, bad_models = 0, bad_psi = 0;
  for (const auto& o : all) {
    if (o.report.verdict != Verdict::Faulty) continue;
    ++checked;
    bad_models += !countermodels_sound(o.report);
    bad_psi += !final_psi_valid(o.report);
  }
  criterion(5, "soundness", bad_models == 0 && bad_psi == 0 && checked > 0,
            std::to_string(checked) + " Faulty reports, " + std::to_string(bad_models) +
                " with a non-falsifying countermodel, " + std::to_string(bad_psi) + " with a final psi not valid");

  double avg = all.empty() ? 0 : verify_seconds / double(all.size());
  char perf[160];
  std::snprintf(perf, sizeof perf, "average %.3f s per submission over %zu mutants (timeout %d ms)", avg, all.size(),
                solver.config().timeout_ms);
  criterion(7, "performance envelope", !all.empty() && avg <= 5.0, perf);

  int grew = 0, reduced_split = 0, split_reports = 0;
  std::size_t before = 0, after = 0;
  for (const auto& o : all) {
    const auto& r = o.report;
    before += r.size_before;
    after += r.size_after;
    if (r.size_after > r.size_before) ++grew;
    bool split = false;
    for (const auto& c : r.corrections) split = split || c.kind == CorrectionKind::GuardSplit;
    if (split) {
      ++split_reports;
      if (r.size_after < r.size_before) ++reduced_split;
    }
  }
  char simp[200];
  std::snprintf(simp, sizeof simp,
                "%d reports grew; %d of %d GuardSplit reports reduced; total %zu -> %zu nodes (%.1f%% smaller)", grew,
                reduced_split, split_reports, before, after, before ? 100.0 * double(before - after) / before : 0.0);
  criterion(8, "simplification", grew == 0 && reduced_split >= 1, simp);
}

void preservation_criterion() {
  std::vector<std::string> files;
  for (const auto& s : kSolutions) files.push_back(s.file);
  files.push_back("sumtrian_fig3.c");
  int programs = 0, mismatches = 0, runs_min = 1 << 30;
  std::string detail;
  for (const auto& file : files) {
    Solution s{file, "", file.rfind("sumtrian", 0) == 0 ? "sumtrian.constraints" : ""};
    for (const auto& k : kSolutions)
      if (k.file == file) s = k;
    auto prof = profile_for(s);
    auto p0 = parse(corpus::read(file));
    auto p1 = strip_testcase_loop(p0);
    bool stripped = render(p1) != render(p0);
    auto p2 = preprocess(p1);
    auto lp = analyze(p2);
    auto p3 = rebuild(lp, canonicalize_loops(lp));
    int runs = 0;
    for (std::uint64_t seed = 1; runs < 100 && seed < 400; ++seed) {
      auto in = generate_input(p1, prof, seed);
      if (!in) continue;
      ++runs;
      auto tokens = in->tokens;
      auto with_count = tokens;
      with_count.insert(with_count.begin(), 1);
      auto r0 = interpret(p0, stripped ? with_count : tokens);
      auto r1 = interpret(p1, tokens);
      auto r2 = interpret(p2, tokens);
      auto r3 = interpret(p3, tokens);
      if (!(r0.outputs == r1.outputs && r1.outputs == r2.outputs && r2.outputs == r3.outputs &&
            r0.status == r3.status)) {
        ++mismatches;
        detail += "; " + file + " differs on seed " + std::to_string(seed);
      }
    }
    runs_min = std::min(runs_min, runs);
    ++programs;
  }
  criterion(6, "semantics preservation", mismatches == 0 && runs_min >= 100,
            std::to_string(programs) + " programs, at least " + std::to_string(runs_min) +
                " inputs each, " + std::to_string(mismatches) + " mismatches" + detail);
}

}  // namespace

int main() {
  Solver solver(SolverConfig{});
  try {
    worked_example_criteria(solver);
  } catch (const std::exception& e) {
    criterion(1, "golden worked example", false, e.what());
  }
  try {
    preservation_criterion();
  } catch (const std::exception& e) {
    criterion(6, "semantics preservation", false, e.what());
  }
  try {
    mutation_criteria(solver);
  } catch (const std::exception& e) {
    criterion(4, "mutation corpus", false, e.what());
  }
  for (const auto& [n, line] : lines) std::cout << line << "\n";
  return failures ? 1 : 0;
}
