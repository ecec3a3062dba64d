#include "dpfb/workflow.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "dpfb/oracle.hpp"

namespace dpfb {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::optional<ErrorKind> error_kind_from(const std::string& name) {
  for (int k = 0; k <= static_cast<int>(ErrorKind::InvalidInput); ++k) {
    auto e = static_cast<ErrorKind>(k);
    if (to_string(e) == name) return e;
  }
  return std::nullopt;
}

std::string component_category(const std::vector<std::string>& comps) {
  std::set<std::string> c(comps.begin(), comps.end());
  if (c.count("declaration") || c.count("input")) return "Others";
  std::string out;
  auto add = [&](const char* name, const char* tag) {
    if (!c.count(name)) return;
    if (!out.empty()) out += "&";
    out += tag;
  };
  add("initialization", "I");
  add("update", "U");
  add("output", "O");
  if (out.empty()) return "Others";
  return out.find('&') == std::string::npos ? out + " only" : out;
}

}  // namespace

CorpusManifest load_manifest(const fs::path& file) {
  json j;
  try {
    j = json::parse(read_file(file));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidInput, "manifest " + file.string() + ": " + e.what());
  }
  auto dir = file.parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : dir / p; };
  CorpusManifest m;
  try {
    m.problem = j.value("problem", std::string());
    if (j.contains("constraints") && !j["constraints"].is_null()) m.constraints = resolve(j["constraints"]);
    m.state = resolve(j.value("state", std::string("state.json")));
    std::set<std::string> ids;
    for (const auto& s : j.value("submissions", json::array())) {
      ManifestEntry e{s.at("id").get<std::string>(), resolve(s.at("path").get<std::string>())};
      if (!ids.insert(e.id).second) throw Error(ErrorKind::InvalidInput, "duplicate submission id " + e.id);
      if (!fs::exists(e.source)) throw Error(ErrorKind::InvalidInput, "missing source " + e.source.string());
      m.submissions.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidInput, "manifest " + file.string() + ": " + e.what());
  }
  if (!m.constraints.empty() && !fs::exists(m.constraints))
    throw Error(ErrorKind::InvalidInput, "missing constraints " + m.constraints.string());
  return m;
}

const SubmissionRecord* CorpusState::find(const std::string& id) const {
  for (const auto& s : submissions)
    if (s.id == id) return &s;
  return nullptr;
}

json CorpusState::to_json() const {
  json subs = json::array();
  for (const auto& s : submissions) {
    json e = {{"id", s.id}, {"path", s.path}, {"source", s.source}, {"extracted", s.extracted},
              {"instructor_added", s.instructor_added}};
    if (s.extracted) e["features"] = s.features;
    if (s.error_kind) e["error"] = {{"kind", std::string(dpfb::to_string(*s.error_kind))}, {"message", s.error}};
    subs.push_back(e);
  }
  json cls = json::array();
  for (const auto& c : clusters) {
    cls.push_back({{"id", c.id},
                   {"features", c.features.canonical_text()},
                   {"members", c.members},
                   {"reference", c.reference ? json(*c.reference) : json(nullptr)},
                   {"reference_origin", dpfb::to_string(c.reference_origin)}});
  }
  json res = json::object();
  for (const auto& [id, r] : results) {
    res[id] = {{"verdict", r.verdict},
               {"corrections", r.corrections},
               {"components", r.components},
               {"size_before", r.size_before},
               {"size_after", r.size_after},
               {"elapsed_ms", r.elapsed_ms},
               {"solver_queries", r.solver_queries},
               {"is_reference", r.is_reference},
               {"cluster", r.cluster},
               {"error", r.error}};
  }
  return {{"problem", problem}, {"constraints", constraints}, {"submissions", subs}, {"clusters", cls},
          {"results", res}};
}

CorpusState CorpusState::from_json(const json& j) {
  CorpusState s;
  try {
    s.problem = j.at("problem");
    s.constraints = j.at("constraints");
    for (const auto& e : j.at("submissions")) {
      SubmissionRecord r;
      r.id = e.at("id");
      r.path = e.at("path");
      r.source = e.at("source");
      r.extracted = e.at("extracted");
      r.instructor_added = e.value("instructor_added", false);
      if (r.extracted) r.features = e.at("features");
      if (e.contains("error")) {
        r.error_kind = error_kind_from(e["error"].at("kind"));
        r.error = e["error"].at("message");
      }
      s.submissions.push_back(std::move(r));
    }
    for (const auto& e : j.at("clusters")) {
      Cluster c;
      c.id = e.at("id");
      c.features = FeatureVector::from_canonical_text(e.at("features"));
      c.members = e.at("members").get<std::vector<std::string>>();
      if (!e.at("reference").is_null()) c.reference = e["reference"].get<std::string>();
      c.reference_origin = e.value("reference_origin", std::string()) == to_string(ReferenceOrigin::InstructorAdded)
                               ? ReferenceOrigin::InstructorAdded
                               : ReferenceOrigin::Corpus;
      s.clusters.push_back(std::move(c));
    }
    for (const auto& [id, e] : j.at("results").items()) {
      ResultRecord r;
      r.verdict = e.at("verdict");
      r.corrections = e.at("corrections");
      r.components = e.at("components").get<std::vector<std::string>>();
      r.size_before = e.at("size_before");
      r.size_after = e.at("size_after");
      r.elapsed_ms = e.at("elapsed_ms");
      r.solver_queries = e.at("solver_queries");
      r.is_reference = e.at("is_reference");
      r.cluster = e.at("cluster");
      r.error = e.value("error", std::string());
      s.results[id] = std::move(r);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("malformed state: ") + e.what());
  }
  return s;
}

CorpusState load_state(const fs::path& file) {
  try {
    return CorpusState::from_json(json::parse(read_file(file)));
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::InvalidInput, "state " + file.string() + ": " + e.what());
  }
}

void write_file_atomic(const fs::path& file, const std::string& contents) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  auto tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::InvalidInput, "cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw Error(ErrorKind::InvalidInput, "cannot write " + tmp.string());
  }
  fs::rename(tmp, file);
}

void save_state(const CorpusState& state, const fs::path& file) {
  write_file_atomic(file, state.to_json().dump(2) + "\n");
}

CorpusState ingest(const CorpusManifest& manifest) {
  CorpusState s;
  s.problem = manifest.problem;
  if (!manifest.constraints.empty()) {
    s.constraints = read_file(manifest.constraints);
    parse_constraints(s.constraints);
  }
  std::vector<std::pair<std::string, FeatureVector>> vectors;
  for (const auto& e : manifest.submissions) {
    SubmissionRecord r;
    r.id = e.id;
    r.path = e.source.string();
    r.source = read_file(e.source);
    try {
      auto v = extract_features(analyze_source(r.source));
      r.features = v.canonical_text();
      r.extracted = true;
      vectors.emplace_back(r.id, v);
    } catch (const Error& err) {
      r.error_kind = err.kind();
      r.error = err.detail();
    }
    s.submissions.push_back(std::move(r));
  }
  std::sort(s.submissions.begin(), s.submissions.end(),
            [](const SubmissionRecord& a, const SubmissionRecord& b) { return a.id < b.id; });
  s.clusters = cluster(vectors);
  return s;
}

std::string review_listing(const CorpusState& state) {
  if (state.clusters.empty()) return "nothing to review\n";
  std::map<std::string, LabeledProgram> lps;
  for (const auto& s : state.submissions) {
    if (!s.extracted) continue;
    try {
      lps[s.id] = analyze_source(s.source);
    } catch (const Error&) {
    }
  }
  std::string out;
  int k = 0;
  for (const auto& c : state.clusters) {
    out += "Cluster " + std::to_string(++k) + " [" + c.id + "]: " + std::to_string(c.members.size()) + " member" +
           (c.members.size() == 1 ? "" : "s");
    out += c.reference ? ", reference " + *c.reference + " (" + to_string(c.reference_origin) + ")" : ", no reference";
    out += "\n";
    std::string features = c.features.canonical_text();
    std::istringstream lines(features);
    for (std::string line; std::getline(lines, line);) out += "    " + line + "\n";
    out += "  candidates:";
    for (const auto& m : rank_candidates(c, lps)) out += " " + m;
    out += "\n";
  }
  return out;
}

const Cluster& resolve_cluster(const CorpusState& state, const std::string& which) {
  for (const auto& c : state.clusters)
    if (c.id == which) return c;
  if (!which.empty() && std::all_of(which.begin(), which.end(), ::isdigit)) {
    auto k = std::stoul(which);
    if (k >= 1 && k <= state.clusters.size()) return state.clusters[k - 1];
  }
  throw Error(ErrorKind::InvalidInput, "no cluster " + which);
}

void mark_reference(CorpusState& state, const std::string& cluster, const std::string& submission) {
  auto id = resolve_cluster(state, cluster).id;
  assign_reference(state.clusters, id, submission);
  state.results.clear();
}

void add_reference(CorpusState& state, const std::string& cluster, const std::string& id, const std::string& source) {
  auto cid = resolve_cluster(state, cluster).id;
  if (state.find(id)) throw Error(ErrorKind::InvalidInput, "submission id already in use: " + id);
  std::map<std::string, FeatureVector> vectors;
  for (const auto& s : state.submissions)
    if (s.extracted) vectors[s.id] = FeatureVector::from_canonical_text(s.features);
  auto clusters = state.clusters;
  dpfb::add_reference(clusters, vectors, cid, id, source);
  SubmissionRecord r;
  r.id = id;
  r.path = "(added)";
  r.source = source;
  r.extracted = true;
  r.features = vectors.at(id).canonical_text();
  r.instructor_added = true;
  state.submissions.push_back(std::move(r));
  std::sort(state.submissions.begin(), state.submissions.end(),
            [](const SubmissionRecord& a, const SubmissionRecord& b) { return a.id < b.id; });
  state.clusters = std::move(clusters);
  state.results.clear();
}

VerifyOutcome verify_corpus(CorpusState& state, const VerifyOptions& options) {
  VerifyOutcome out;
  auto fopt = options.feedback;
  if (fopt.constraints.empty() && !state.constraints.empty()) fopt.constraints = parse_constraints(state.constraints);

  struct Job {
    std::string id, cluster, reference;
  };
  std::vector<Job> jobs;
  std::map<std::string, ResultRecord> results;
  for (const auto& c : state.clusters) {
    if (!c.reference) {
      out.warnings.push_back("cluster " + c.id + " has no reference; its " + std::to_string(c.members.size()) +
                             " members are skipped");
      continue;
    }
    for (const auto& m : c.members) {
      if (m == *c.reference) continue;
      jobs.push_back({m, c.id, *c.reference});
    }
    ResultRecord r;
    r.verdict = to_string(Verdict::VerifiedCorrect);
    r.is_reference = true;
    r.cluster = c.id;
    results[*c.reference] = r;
  }

  std::map<std::string, FeedbackReport> reports;
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    Solver solver(options.solver);
    for (std::size_t k; (k = next++) < jobs.size();) {
      const auto& job = jobs[k];
      auto rep = verify_sources(state.find(job.reference)->source, state.find(job.id)->source, solver, fopt);
      rep.submission = job.id;
      rep.reference = job.reference;
      std::lock_guard<std::mutex> lock(mu);
      reports[job.id] = std::move(rep);
    }
  };
  std::vector<std::thread> pool;
  int n = std::max(1, std::min<int>(options.jobs, static_cast<int>(jobs.size())));
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  // Submissions that never reached a cluster.
  for (const auto& s : state.submissions) {
    if (s.extracted) continue;
    FeedbackReport rep;
    rep.submission = s.id;
    rep.verdict = Verdict::Unlabeled;
    rep.error_kind = s.error_kind;
    rep.error = s.error;
    reports[s.id] = std::move(rep);
  }

  for (const auto& job : jobs) results[job.id].cluster = job.cluster;
  for (const auto& [id, rep] : reports) {
    auto& r = results[id];
    r.verdict = to_string(rep.verdict);
    r.corrections = rep.corrections.size();
    std::set<std::string> comps;
    for (const auto& c : rep.corrections) comps.insert(c.component);
    r.components.assign(comps.begin(), comps.end());
    r.size_before = rep.size_before;
    r.size_after = rep.size_after;
    r.elapsed_ms = rep.elapsed_ms;
    r.solver_queries = rep.solver_queries;
    if (rep.error_kind) r.error = std::string(to_string(*rep.error_kind)) + ": " + rep.error;
  }
  state.results = results;

  std::map<std::string, int> counts = {{"VerifiedCorrect", 0}, {"Faulty", 0}, {"Unlabeled", 0}};
  std::size_t faulty_corrections = 0, before = 0, after = 0;
  std::int64_t time = 0, queries = 0;
  json per = json::array();
  for (const auto& [id, r] : results) {
    ++counts[r.verdict];
    if (r.verdict == "Faulty") faulty_corrections += r.corrections;
    before += r.size_before;
    after += r.size_after;
    per.push_back({{"id", id}, {"cluster", r.cluster}, {"verdict", r.verdict}, {"corrections", r.corrections},
                   {"reference", r.is_reference}});
  }
  for (const auto& [id, rep] : reports) {
    time += rep.elapsed_ms;
    queries += rep.solver_queries;
  }
  out.summary = {
      {"problem", state.problem},
      {"submissions", results.size()},
      {"verified", reports.size()},
      {"counts", counts},
      {"average_corrections", counts["Faulty"] ? double(faulty_corrections) / counts["Faulty"] : 0.0},
      {"average_time_ms", reports.empty() ? 0.0 : double(time) / double(reports.size())},
      {"solver_queries", queries},
      {"feedback_size", {{"before", before}, {"after", after}}},
      {"warnings", out.warnings},
      {"results", per},
  };

  if (!options.out.empty()) {
    for (const auto& [id, rep] : reports) {
      write_file_atomic(options.out / (id + ".json"), to_json(rep).dump(2) + "\n");
      write_file_atomic(options.out / (id + ".txt"), render(rep));
    }
    write_file_atomic(options.out / "summary.json", out.summary.dump(2) + "\n");
  }
  out.reports = std::move(reports);
  return out;
}

json corpus_report(const CorpusState& state) {
  json census = json::array();
  for (const auto& c : state.clusters) {
    census.push_back({{"id", c.id},
                      {"size", c.members.size()},
                      {"features", c.features.canonical_text()},
                      {"reference", c.reference ? json(*c.reference) : json(nullptr)}});
  }
  std::size_t not_extracted = 0;
  for (const auto& s : state.submissions) not_extracted += s.extracted ? 0 : 1;
  json j = {{"problem", state.problem},
            {"submissions", state.submissions.size()},
            {"not_clustered", not_extracted},
            {"clusters", census}};
  if (!state.clusters.empty())
    j["most_popular"] = {{"id", state.clusters.front().id}, {"size", state.clusters.front().members.size()}};
  if (state.results.empty()) return j;

  std::map<std::string, int> verdicts = {{"VerifiedCorrect", 0}, {"Faulty", 0}, {"Unlabeled", 0}};
  std::map<std::string, int> comps;
  for (const auto* k : {"I only", "U only", "O only", "I&U", "I&O", "U&O", "I&U&O", "Others"}) comps[k] = 0;
  std::size_t before = 0, after = 0;
  for (const auto& [id, r] : state.results) {
    ++verdicts[r.verdict];
    if (r.verdict == "Faulty") ++comps[component_category(r.components)];
    before += r.size_before;
    after += r.size_after;
  }
  j["verdicts"] = verdicts;
  j["faulty_components"] = comps;
  j["feedback_size"] = {{"before", before},
                        {"after", after},
                        {"reduction_percent", before ? 100.0 * double(before - after) / double(before) : 0.0}};
  return j;
}

std::string render_report(const json& r) {
  std::ostringstream out;
  out << "Problem: " << r.value("problem", std::string()) << "\n";
  out << "Submissions: " << r["submissions"] << " (" << r["not_clustered"] << " not clustered)\n";
  out << "Clusters: " << r["clusters"].size() << "\n";
  for (const auto& c : r["clusters"]) {
    out << "  " << c["id"].get<std::string>() << "  size " << c["size"] << "  reference "
        << (c["reference"].is_null() ? std::string("-") : c["reference"].get<std::string>()) << "\n";
  }
  if (r.contains("most_popular"))
    out << "Most popular strategy: " << r["most_popular"]["id"].get<std::string>() << " with "
        << r["most_popular"]["size"] << " submissions\n";
  if (!r.contains("verdicts")) return out.str();
  out << "Verdicts:\n";
  for (const auto& [k, v] : r["verdicts"].items()) out << "  " << k << ": " << v << "\n";
  out << "Faulty components:\n";
  for (const auto* k : {"I only", "U only", "O only", "I&U", "I&O", "U&O", "I&U&O", "Others"})
    out << "  " << k << ": " << r["faulty_components"][k] << "\n";
  char pct[32];
  std::snprintf(pct, sizeof pct, "%.1f", r["feedback_size"]["reduction_percent"].get<double>());
  out << "Feedback size: " << r["feedback_size"]["before"] << " -> " << r["feedback_size"]["after"] << " nodes ("
      << pct << "% smaller)\n";
  return out.str();
}

}  // namespace dpfb
