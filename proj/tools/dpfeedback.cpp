#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "dpfb/oracle.hpp"
#include "dpfb/workflow.hpp"

using namespace dpfb;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verified feedback for dynamic-programming submissions"};
  app.require_subcommand(1);

  std::string manifest_path;
  auto* ingest_cmd = app.add_subcommand("ingest", "Parse, analyze and cluster the submissions of a manifest");
  ingest_cmd->add_option("manifest", manifest_path, "Manifest JSON")->required()->check(CLI::ExistingFile);

  std::string state_path;
  std::vector<std::string> action;
  auto* review_cmd = app.add_subcommand("review", "List clusters, or `mark <cluster> <id>` / `add <cluster> <file>`");
  review_cmd->add_option("state", state_path, "State JSON")->required()->check(CLI::ExistingFile);
  review_cmd->add_option("action", action, "mark <cluster> <submission> | add <cluster> <file> [id]");

  SolverConfig solver_cfg;
  int delta = 10, jobs = 1;
  std::string constraints_path, out_dir;
  auto* verify_cmd = app.add_subcommand("verify", "Verify every cluster member against its reference");
  verify_cmd->add_option("state", state_path, "State JSON")->required()->check(CLI::ExistingFile);
  verify_cmd->add_option("--solver", solver_cfg.path, "SMT solver binary")->capture_default_str();
  verify_cmd->add_option("--timeout-ms", solver_cfg.timeout_ms, "Per-query timeout")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  verify_cmd->add_option("--delta", delta, "Refinement budget per statement pair")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  verify_cmd->add_option("--jobs", jobs, "Parallel workers")->capture_default_str()->check(CLI::PositiveNumber);
  verify_cmd->add_option("--constraints", constraints_path, "Input constraint file")->check(CLI::ExistingFile);
  verify_cmd->add_option("--out", out_dir, "Report directory (default: reports/ next to the state)");

  bool as_json = false;
  auto* report_cmd = app.add_subcommand("report", "Corpus summary");
  report_cmd->add_option("state", state_path, "State JSON")->required()->check(CLI::ExistingFile);
  report_cmd->add_flag("--json", as_json, "Print JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (*ingest_cmd) {
      auto m = load_manifest(manifest_path);
      auto s = ingest(m);
      save_state(s, m.state);
      std::size_t failed = 0;
      for (const auto& r : s.submissions) {
        if (r.extracted) continue;
        ++failed;
        std::cerr << r.id << ": Unlabeled (" << to_string(*r.error_kind) << ") " << r.error << "\n";
      }
      std::cout << s.submissions.size() << " submissions, " << s.submissions.size() - failed << " clustered into "
                << s.clusters.size() << " clusters; state written to " << m.state.string() << "\n";
      return 0;
    }
    if (*review_cmd) {
      auto s = load_state(state_path);
      if (action.empty()) {
        std::cout << review_listing(s);
        return 0;
      }
      if (action[0] == "mark" && action.size() == 3) {
        mark_reference(s, action[1], action[2]);
        save_state(s, state_path);
        std::cout << "reference of cluster " << resolve_cluster(s, action[1]).id << " is " << action[2] << "\n";
        return 0;
      }
      if (action[0] == "add" && (action.size() == 3 || action.size() == 4)) {
        auto id = action.size() == 4 ? action[3] : std::filesystem::path(action[2]).stem().string();
        auto cid = resolve_cluster(s, action[1]).id;
        add_reference(s, cid, id, slurp(action[2]));
        save_state(s, state_path);
        std::cout << "added " << id << " as reference of cluster " << cid << "\n";
        return 0;
      }
      std::cerr << "unknown review action; expected `mark <cluster> <submission>` or `add <cluster> <file> [id]`\n";
      return 2;
    }
    if (*verify_cmd) {
      auto s = load_state(state_path);
      VerifyOptions o;
      o.solver = solver_cfg;
      o.feedback.delta = delta;
      if (!constraints_path.empty()) o.feedback.constraints = parse_constraints(slurp(constraints_path));
      o.jobs = jobs;
      o.out = out_dir.empty() ? std::filesystem::path(state_path).parent_path() / "reports"
                              : std::filesystem::path(out_dir);
      auto result = verify_corpus(s, o);
      save_state(s, state_path);
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
      const auto& c = result.summary["counts"];
      std::cout << "VerifiedCorrect " << c["VerifiedCorrect"] << ", Faulty " << c["Faulty"] << ", Unlabeled "
                << c["Unlabeled"] << "; reports in " << o.out.string() << "\n";
      return 0;
    }
    if (*report_cmd) {
      auto r = corpus_report(load_state(state_path));
      std::cout << (as_json ? r.dump(2) + "\n" : render_report(r));
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
