#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dpfb/analysis.hpp"

namespace dpfb {

struct UpdateLoopFeature {
  int depth = 0;
  std::string directions;      // one '+' or '-' per nesting level, outer first
  std::string updated_element;  // canonical names, e.g. "dp[i][j]"

  friend bool operator==(const UpdateLoopFeature&, const UpdateLoopFeature&) = default;
};

struct DpArrayType {
  ScalarType type = ScalarType::Int;
  std::size_t dims = 0;

  friend bool operator==(const DpArrayType&, const DpArrayType&) = default;
};

struct FeatureVector {
  ScalarType dp_type = ScalarType::Int;
  std::size_t dp_dims = 0;
  std::vector<DpArrayType> extra_dp_arrays;  // dp2, dp3, ... when present
  bool input_reused_as_dp = false;
  std::size_t num_update_loops = 0;
  std::vector<UpdateLoopFeature> update_loops;

  /// One `key=value` line per field, keys sorted; equality of vectors is
  /// equality of this text.
  std::string canonical_text() const;
  static FeatureVector from_canonical_text(const std::string& text);

  friend bool operator==(const FeatureVector& a, const FeatureVector& b) {
    return a.canonical_text() == b.canonical_text();
  }
};

/// Canonical names: dp (or dp1, dp2, ... with several DP arrays), loop
/// indices i, j, k, ... from the outermost loop, inputs in1, in2, ... in read
/// order. Throws FeatureExtractionFailed.
FeatureVector extract_features(const LabeledProgram& lp);

/// Bound expressions of every update-loop header, outer first, under the
/// same canonical naming ("i < in1", "j <= i").
std::vector<std::string> update_loop_bounds(const LabeledProgram& lp);

/// Top-level statements of main that are loops containing an Update.
std::vector<StmtPtr> top_level_update_loops(const LabeledProgram& lp);

/// parse, strip_testcase_loop, preprocess, analyze.
LabeledProgram analyze_source(std::string_view source);

}  // namespace dpfb
