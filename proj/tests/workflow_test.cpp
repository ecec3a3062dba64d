#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>

#include "dpfb/workflow.hpp"
#include "test_support.hpp"

using namespace dpfb;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("dpfb_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return path / name;
  }
};

fs::path worked_manifest(const TempDir& d, bool with_bad = false) {
  d.write("fig2.c", corpus::read("sumtrian_fig2.c"));
  d.write("fig3.c", corpus::read("sumtrian_fig3.c"));
  d.write("tri.constraints", corpus::read("sumtrian.constraints"));
  json subs = json::array({{{"id", "fig2"}, {"path", "fig2.c"}}, {{"id", "fig3"}, {"path", "fig3.c"}}});
  if (with_bad) {
    d.write("bad.c", "int main() { int n; scanf(\"%d\", &n) }");
    subs.push_back({{"id", "bad"}, {"path", "bad.c"}});
  }
  json m = {{"problem", "sumtrian"}, {"constraints", "tri.constraints"}, {"state", "state.json"}, {"submissions", subs}};
  return d.write("manifest.json", m.dump());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

int run_cli(const std::string& args) {
  auto rc = std::system((std::string(DPFB_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(Ingest, FailuresAreRecordedNotThrown) {
  TempDir d("ingest");
  d.write("a.c", corpus::read("stairs.c"));
  d.write("b.c", corpus::read("stairs.c"));
  d.write("c.c", corpus::read("knapsack.c"));
  d.write("bad.c", "int main( {");
  json m = {{"problem", "p"},
            {"submissions", json::array({{{"id", "a"}, {"path", "a.c"}},
                                         {{"id", "b"}, {"path", "b.c"}},
                                         {{"id", "c"}, {"path", "c.c"}},
                                         {{"id", "bad"}, {"path", "bad.c"}}})}};
  auto s = ingest(load_manifest(d.write("m.json", m.dump())));
  ASSERT_EQ(s.submissions.size(), 4u);
  int extracted = 0;
  for (const auto& r : s.submissions) extracted += r.extracted;
  EXPECT_EQ(extracted, 3);
  ASSERT_TRUE(s.find("bad")->error_kind);
  EXPECT_EQ(*s.find("bad")->error_kind, ErrorKind::SyntaxError);
  EXPECT_EQ(s.clusters.size(), 2u);
}

TEST(Ingest, WorkedPairSharesOneCluster) {
  TempDir d("worked");
  auto s = ingest(load_manifest(worked_manifest(d)));
  ASSERT_EQ(s.clusters.size(), 1u);
  EXPECT_EQ(s.clusters[0].members, (std::vector<std::string>{"fig2", "fig3"}));
}

TEST(Ingest, EmptyManifestGivesEmptyState) {
  TempDir d("empty");
  auto s = ingest(load_manifest(d.write("m.json", R"({"problem": "p", "submissions": []})")));
  EXPECT_TRUE(s.submissions.empty());
  EXPECT_TRUE(s.clusters.empty());
  EXPECT_EQ(review_listing(s), "nothing to review\n");
  auto r = corpus_report(s);
  EXPECT_TRUE(r["clusters"].empty());
  EXPECT_FALSE(r.contains("verdicts"));
}

TEST(Manifest, RejectsDuplicatesAndMissingFiles) {
  TempDir d("manifest");
  d.write("a.c", "int main() { return 0; }");
  EXPECT_THROW(load_manifest(d.write("m1.json", R"({"submissions": [{"id": "a", "path": "a.c"}, {"id": "a", "path": "a.c"}]})")),
               Error);
  EXPECT_THROW(load_manifest(d.write("m2.json", R"({"submissions": [{"id": "a", "path": "nope.c"}]})")), Error);
  EXPECT_THROW(load_manifest(d.write("m3.json", "{not json")), Error);
}

TEST(Review, MarkAndAdd) {
  TempDir d("review");
  auto s = ingest(load_manifest(worked_manifest(d)));
  EXPECT_THROW(mark_reference(s, "1", "nobody"), Error);
  mark_reference(s, "1", "fig2");
  EXPECT_EQ(s.clusters[0].reference, "fig2");
  try {
    add_reference(s, "1", "st", corpus::read("stairs.c"));
    FAIL() << "expected a mismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ReferenceClusterMismatch);
  }
  EXPECT_EQ(s.clusters[0].reference, "fig2");
  add_reference(s, "1", "inst", corpus::read("sumtrian_correct.c"));
  EXPECT_EQ(s.clusters[0].reference, "inst");
  EXPECT_EQ(s.clusters[0].reference_origin, ReferenceOrigin::InstructorAdded);
  EXPECT_TRUE(s.find("inst")->instructor_added);
}

TEST(Verify, WorkedCorpus) {
  TempDir d("verify");
  auto s = ingest(load_manifest(worked_manifest(d, true)));
  mark_reference(s, "1", "fig2");
  VerifyOptions o;
  o.out = d.path / "reports";
  auto v = verify_corpus(s, o);
  EXPECT_EQ(v.summary["counts"]["VerifiedCorrect"], 1);
  EXPECT_EQ(v.summary["counts"]["Faulty"], 1);
  EXPECT_EQ(v.summary["counts"]["Unlabeled"], 1);
  ASSERT_TRUE(v.reports.count("fig3"));
  EXPECT_EQ(v.reports["fig3"].corrections.size(), 4u);
  EXPECT_TRUE(fs::exists(d.path / "reports" / "fig3.json"));
  EXPECT_NE(slurp(d.path / "reports" / "fig3.txt").find("Types of A and D should be int[n][n]"), std::string::npos);
  EXPECT_TRUE(fs::exists(d.path / "reports" / "summary.json"));
  EXPECT_EQ(s.results.at("fig3").verdict, "Faulty");

  auto r = corpus_report(s);
  EXPECT_EQ(r["verdicts"]["Faulty"], 1);
  EXPECT_EQ(r["faulty_components"]["Others"], 1);
  EXPECT_EQ(r["most_popular"]["size"], 2);
  EXPECT_NE(render_report(r).find("Most popular strategy"), std::string::npos);
}

TEST(Verify, CopiesOfTheReferenceAreCorrect) {
  TempDir d("copies");
  json subs = json::array();
  for (int k = 0; k < 3; ++k) {
    d.write("s" + std::to_string(k) + ".c", corpus::read("stairs.c"));
    subs.push_back({{"id", "s" + std::to_string(k)}, {"path", "s" + std::to_string(k) + ".c"}});
  }
  auto s = ingest(load_manifest(d.write("m.json", json{{"problem", "p"}, {"submissions", subs}}.dump())));
  mark_reference(s, "1", "s0");
  VerifyOptions o;
  o.jobs = 2;
  auto v = verify_corpus(s, o);
  EXPECT_EQ(v.summary["counts"]["VerifiedCorrect"], 3);
}

TEST(Verify, ClustersWithoutReferenceAreSkipped) {
  TempDir d("skip");
  auto s = ingest(load_manifest(worked_manifest(d)));
  auto v = verify_corpus(s, {});
  EXPECT_EQ(v.warnings.size(), 1u);
  EXPECT_TRUE(v.reports.empty());
}

TEST(State, RoundTripAndDeterminism) {
  TempDir d("state");
  auto m = load_manifest(worked_manifest(d, true));
  auto a = ingest(m);
  auto b = ingest(m);
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
  save_state(a, d.path / "s.json");
  EXPECT_EQ(load_state(d.path / "s.json").to_json().dump(), a.to_json().dump());
  EXPECT_FALSE(fs::exists(d.path / "s.json.tmp"));
}

TEST(Cli, WorkflowAndExitCodes) {
  TempDir d("cli");
  auto m = worked_manifest(d);
  auto state = (d.path / "state.json").string();
  EXPECT_EQ(run_cli("ingest " + m.string()), 0);
  auto before = slurp(state);
  EXPECT_EQ(run_cli("review " + state + " mark 1 nobody"), 1);
  EXPECT_EQ(slurp(state), before);
  EXPECT_EQ(run_cli("review " + state + " mark 1 fig2"), 0);
  EXPECT_EQ(run_cli("verify " + state + " --out " + (d.path / "out").string()), 0);
  EXPECT_TRUE(fs::exists(d.path / "out" / "summary.json"));
  EXPECT_EQ(run_cli("report " + state), 0);
  EXPECT_EQ(run_cli("verify"), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli("verify " + state + " --timeout-ms -3"), 2);
  d.write("broken.json", "{");
  EXPECT_EQ(run_cli("report " + (d.path / "broken.json").string()), 1);
}
