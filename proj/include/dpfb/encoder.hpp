#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "dpfb/analysis.hpp"
#include "dpfb/correspondence.hpp"

namespace dpfb {

/// One store performed by a path. `target` is an array name or a stream
/// token (`__out_k` for the k-th printed value); `subs` is empty for tokens.
/// Subscripts and value are over the state before the body runs.
struct PathWrite {
  std::string target;
  std::vector<ExprPtr> subs;
  ExprPtr value;
};

struct GuardedPath {
  ExprPtr guard;
  std::vector<PathWrite> writes;  // program order
  std::set<int> lines;            // source lines of the contributing statements

  bool is_frame() const { return writes.empty(); }
};

/// The innermost body of a statement as pairwise disjoint, exhaustive paths.
struct BodyFormula {
  std::vector<GuardedPath> paths;
};

/// Reads become `__read_k` values; temporaries are replaced through Σ; a
/// read of a cell written earlier on the same path becomes
/// `J == I ? v : x[J]`. Throws EncodingFailed.
BodyFormula encode_body(const TopLevel& t, const LabeledProgram& lp);

/// `nest` with its innermost body replaced; a Block when `nest` is not a loop.
StmtPtr replace_nest_body(const StmtPtr& nest, const StmtList& body);
/// Loop nest built from `headers` (outer first) around `body`.
StmtPtr build_nest(const std::vector<StmtPtr>& headers, const StmtList& body);

/// `ite(g1, e1, ite(g2, e2, ... en))` over guarded variants.
ExprPtr ite_chain(const std::vector<GuardedExpr>& variants);

/// Accesses on a path whose bounds must hold, with the condition under
/// which each is evaluated.
struct BoundsCheck {
  ExprPtr access;
  ExprPtr condition;
  ExprPtr in_bounds;
};

/// Formulas for one corresponding statement pair. Symbols carry a side tag:
/// reference names are prefixed `r.`; candidate arrays and unmapped
/// candidate scalars are prefixed `c.`; mapped candidate scalars (inputs and
/// loop indices) are written as their reference counterpart so both sides
/// range over the same iteration.
class PairEncoding {
 public:
  PairEncoding(const LabeledProgram& ref, const TopLevel& r, const LabeledProgram& cand, const TopLevel& c,
               const VariableMap& sigma_hat, const std::vector<ExprPtr>& constraints,
               const std::map<std::string, std::vector<ExprPtr>>& cand_dims = {});

  const VariableMap& sigma_hat() const { return sigma_hat_; }
  bool straight_line() const { return depth_ == 0; }

  /// Iteration spaces and non-frame guards agree under equal indices.
  const ExprPtr& phi() const { return phi_; }
  /// Every reference iteration is a candidate iteration and the candidate
  /// does no work outside the reference space.
  const ExprPtr& phi_cover() const { return phi_cover_; }
  /// Reference iteration bounds, input constraints and boolean domains.
  const ExprPtr& pre() const { return pre_; }

  const BodyFormula& phi1() const { return phi1_; }  // reference, tagged
  const BodyFormula& phi2() const { return phi2_; }  // candidate, tagged

  /// pre ∧ aliasing ⟹ f. Aliasing relates every pair of accesses to
  /// corresponding arrays in `f` and `pre`.
  ExprPtr entails(const ExprPtr& f) const;
  /// Both bodies leave every written cell and printed value equal.
  ExprPtr psi(const BodyFormula& candidate) const;

  /// Reference-tagged expression in candidate-tagged symbols (arrays via σ̂).
  ExprPtr translate(const ExprPtr& ref_expr) const;
  GuardedPath translate(const GuardedPath& ref_path) const;
  /// Strip tags: candidate-tagged or reference-tagged expression in plain
  /// candidate names.
  ExprPtr candidate_names(const ExprPtr& e) const;

  /// Candidate statements executing `candidate` (tagged) as a body.
  StmtList to_source(const BodyFormula& candidate, const std::set<std::string>& taken) const;
  /// Reference loop headers with names mapped into the candidate.
  std::vector<StmtPtr> translated_headers() const;

  std::vector<BoundsCheck> bounds_checks(const BodyFormula& candidate) const;
  /// Every access of the reference body is within its declared bounds.
  ExprPtr reference_in_bounds() const;

 private:
  ExprPtr tag_ref(const ExprPtr& e) const;
  ExprPtr tag_cand(const ExprPtr& e, bool shared) const;
  BodyFormula tag_body(const BodyFormula& b, bool ref, bool shared) const;
  ExprPtr aliasing(const ExprPtr& f) const;
  std::string array_class(const std::string& tagged) const;

  const LabeledProgram& ref_;
  const LabeledProgram& cand_;
  TopLevel r_, c_;
  VariableMap sigma_hat_;
  std::map<std::string, std::string> inverse_;
  int depth_ = 0;
  BodyFormula phi1_, phi2_;
  ExprPtr phi_, phi_cover_, pre_;
  std::map<std::string, std::vector<ExprPtr>> dims_;  // tagged array -> tagged dims
  std::set<std::string> bool_arrays_;                 // tagged
};

}  // namespace dpfb
