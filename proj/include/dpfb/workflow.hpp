#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpfb/clustering.hpp"
#include "dpfb/feedback.hpp"

namespace dpfb {

struct ManifestEntry {
  std::string id;
  std::filesystem::path source;
};

struct CorpusManifest {
  std::string problem;
  std::filesystem::path constraints;  // empty when the problem has none
  std::vector<ManifestEntry> submissions;
  std::filesystem::path state;
};

/// Paths in the file are relative to its directory. Throws InvalidInput.
CorpusManifest load_manifest(const std::filesystem::path& file);

struct SubmissionRecord {
  std::string id;
  std::string path;
  std::string source;
  bool extracted = false;
  std::string features;  // canonical feature text when extracted
  std::optional<ErrorKind> error_kind;
  std::string error;
  bool instructor_added = false;
};

/// Compact per-submission outcome kept in the state file.
struct ResultRecord {
  std::string verdict;
  std::size_t corrections = 0;
  std::vector<std::string> components;  // faulty components, sorted
  std::size_t size_before = 0, size_after = 0;
  std::int64_t elapsed_ms = 0;
  std::int64_t solver_queries = 0;
  bool is_reference = false;
  std::string cluster;
  std::string error;
};

struct CorpusState {
  std::string problem;
  std::string constraints;  // constraint file contents
  std::vector<SubmissionRecord> submissions;  // sorted by id
  std::vector<Cluster> clusters;
  std::map<std::string, ResultRecord> results;  // empty before verify

  const SubmissionRecord* find(const std::string& id) const;
  nlohmann::json to_json() const;
  static CorpusState from_json(const nlohmann::json& j);
};

CorpusState load_state(const std::filesystem::path& file);
/// Write to a sibling temporary file, then rename over `file`.
void save_state(const CorpusState& state, const std::filesystem::path& file);
void write_file_atomic(const std::filesystem::path& file, const std::string& contents);

/// Parse, analyze and cluster every submission. Per-submission failures are
/// recorded, never thrown.
CorpusState ingest(const CorpusManifest& manifest);

/// Cluster listing with sizes and ranked members; "nothing to review" when
/// there are no clusters.
std::string review_listing(const CorpusState& state);
/// `which` is a cluster id or its 1-based position in the listing.
const Cluster& resolve_cluster(const CorpusState& state, const std::string& which);
/// Throws InvalidInput for a non-member.
void mark_reference(CorpusState& state, const std::string& cluster, const std::string& submission);
/// Throws ReferenceClusterMismatch (state unchanged) when the file's
/// features place it in another cluster.
void add_reference(CorpusState& state, const std::string& cluster, const std::string& id, const std::string& source);

struct VerifyOptions {
  SolverConfig solver;
  FeedbackOptions feedback;
  int jobs = 1;
  std::filesystem::path out;  // reports directory; nothing written when empty
};

struct VerifyOutcome {
  std::map<std::string, FeedbackReport> reports;  // by submission id
  std::vector<std::string> warnings;
  nlohmann::json summary;
};

/// Verify every non-reference member of each cluster against its reference.
/// Fills `state.results`; writes `<id>.json`, `<id>.txt` and `summary.json`
/// under `options.out`.
VerifyOutcome verify_corpus(CorpusState& state, const VerifyOptions& options);

/// Census, verdict and faulty-component distributions, feedback size.
nlohmann::json corpus_report(const CorpusState& state);
std::string render_report(const nlohmann::json& report);

}  // namespace dpfb
