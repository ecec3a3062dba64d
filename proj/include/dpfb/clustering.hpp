#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dpfb/features.hpp"

namespace dpfb {

enum class ReferenceOrigin { Corpus, InstructorAdded };

std::string to_string(ReferenceOrigin o);

struct Cluster {
  std::string id;  // FNV-1a 64 of the canonical feature text, hex
  FeatureVector features;
  std::vector<std::string> members;  // sorted
  std::optional<std::string> reference;
  ReferenceOrigin reference_origin = ReferenceOrigin::Corpus;

  bool has_member(const std::string& id) const;
};

std::string cluster_id_of(const FeatureVector& v);

/// Group by feature equality; largest clusters first, ties by id.
std::vector<Cluster> cluster(const std::vector<std::pair<std::string, FeatureVector>>& corpus);

/// Members by agreement with the majority update-loop bounds, then by id.
std::vector<std::string> rank_candidates(const Cluster& c, const std::map<std::string, LabeledProgram>& lps);

/// Mark an existing member as the reference.
Cluster assign_reference(std::vector<Cluster>& clusters, const std::string& cluster_id,
                         const std::string& submission_id);

/// Ingest a new solution, re-cluster, and make it the reference of
/// `cluster_id`. Throws ReferenceClusterMismatch (nothing is changed) when its
/// features put it elsewhere. `vectors` holds every submission's features and
/// gains the new entry on success.
Cluster add_reference(std::vector<Cluster>& clusters, std::map<std::string, FeatureVector>& vectors,
                      const std::string& cluster_id, const std::string& new_id, const std::string& source);

}  // namespace dpfb
