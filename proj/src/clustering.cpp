#include "dpfb/clustering.hpp"

#include <algorithm>
#include <cstdio>

#include "dpfb/error.hpp"

namespace dpfb {

std::string to_string(ReferenceOrigin o) { return o == ReferenceOrigin::Corpus ? "corpus" : "instructor-added"; }

bool Cluster::has_member(const std::string& id) const {
  return std::binary_search(members.begin(), members.end(), id);
}

std::string cluster_id_of(const FeatureVector& v) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : v.canonical_text()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<Cluster> cluster(const std::vector<std::pair<std::string, FeatureVector>>& corpus) {
  std::map<std::string, Cluster> by_id;
  for (const auto& [sub, v] : corpus) {
    auto id = cluster_id_of(v);
    auto& c = by_id[id];
    c.id = id;
    c.features = v;
    c.members.push_back(sub);
  }
  std::vector<Cluster> out;
  for (auto& [id, c] : by_id) {
    std::sort(c.members.begin(), c.members.end());
    c.members.erase(std::unique(c.members.begin(), c.members.end()), c.members.end());
    out.push_back(std::move(c));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Cluster& a, const Cluster& b) { return a.members.size() > b.members.size(); });
  return out;
}

std::vector<std::string> rank_candidates(const Cluster& c, const std::map<std::string, LabeledProgram>& lps) {
  std::map<std::string, std::vector<std::string>> bounds;
  for (const auto& m : c.members) {
    auto it = lps.find(m);
    if (it == lps.end()) continue;
    try {
      bounds[m] = update_loop_bounds(it->second);
    } catch (const Error&) {
      bounds[m] = {};
    }
  }
  std::map<std::size_t, std::map<std::string, int>> votes;
  for (const auto& [m, b] : bounds)
    for (std::size_t k = 0; k < b.size(); ++k) ++votes[k][b[k]];
  std::map<std::size_t, std::string> majority;
  for (const auto& [k, tally] : votes) {
    int best = -1;
    for (const auto& [text, n] : tally)
      if (n > best) {
        best = n;
        majority[k] = text;
      }
  }
  auto score = [&](const std::string& m) {
    int s = 0;
    auto it = bounds.find(m);
    if (it == bounds.end()) return s;
    for (std::size_t k = 0; k < it->second.size(); ++k) s += majority[k] == it->second[k];
    return s;
  };
  std::vector<std::string> out = c.members;
  std::stable_sort(out.begin(), out.end(), [&](const std::string& a, const std::string& b) {
    int sa = score(a), sb = score(b);
    if (sa != sb) return sa > sb;
    return a < b;
  });
  return out;
}

namespace {

Cluster& find_cluster(std::vector<Cluster>& clusters, const std::string& id) {
  for (auto& c : clusters)
    if (c.id == id) return c;
  throw Error(ErrorKind::InvalidInput, "unknown cluster " + id);
}

}  // namespace

Cluster assign_reference(std::vector<Cluster>& clusters, const std::string& cluster_id,
                         const std::string& submission_id) {
  auto& c = find_cluster(clusters, cluster_id);
  if (!c.has_member(submission_id))
    throw Error(ErrorKind::InvalidInput, submission_id + " is not a member of cluster " + cluster_id);
  c.reference = submission_id;
  c.reference_origin = ReferenceOrigin::Corpus;
  return c;
}

Cluster add_reference(std::vector<Cluster>& clusters, std::map<std::string, FeatureVector>& vectors,
                      const std::string& cluster_id, const std::string& new_id, const std::string& source) {
  find_cluster(clusters, cluster_id);
  if (vectors.count(new_id)) throw Error(ErrorKind::InvalidInput, "submission id already in use: " + new_id);
  auto v = extract_features(analyze_source(source));
  auto landed = cluster_id_of(v);
  if (landed != cluster_id)
    throw Error(ErrorKind::ReferenceClusterMismatch,
                "the added solution belongs to cluster " + landed + ", not " + cluster_id);

  vectors[new_id] = v;
  std::vector<std::pair<std::string, FeatureVector>> all(vectors.begin(), vectors.end());
  auto fresh = cluster(all);
  for (auto& c : fresh) {
    for (const auto& old : clusters) {
      if (old.id != c.id) continue;
      c.reference = old.reference;
      c.reference_origin = old.reference_origin;
    }
  }
  clusters = std::move(fresh);
  auto& c = find_cluster(clusters, cluster_id);
  c.reference = new_id;
  c.reference_origin = ReferenceOrigin::InstructorAdded;
  return c;
}

}  // namespace dpfb
