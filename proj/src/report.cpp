#include "dpfb/feedback.hpp"
#include "dpfb/render.hpp"

namespace dpfb {

std::string render(const FeedbackReport& report) {
  std::string out;
  if (!report.submission.empty()) out += "Submission " + report.submission + "\n";
  switch (report.verdict) {
    case Verdict::VerifiedCorrect:
      return out + "The submission is verified equivalent to the reference.\n";
    case Verdict::Unlabeled:
      out += "No feedback could be generated";
      if (report.error_kind) out += " (" + std::string(to_string(*report.error_kind)) + ")";
      if (!report.error.empty()) out += ": " + report.error;
      return out + "\n";
    case Verdict::Faulty:
      break;
  }
  std::string component;
  int n = 0;
  for (const auto& c : report.corrections) {
    if (c.component != component) {
      component = c.component;
      out += "In the " + component + ":\n";
    }
    auto text = c.text();
    std::string indented;
    for (char ch : text) {
      indented += ch;
      if (ch == '\n') indented += "     ";
    }
    out += "  " + std::to_string(++n) + ") " + indented;
    if (c.line > 0) out += " (line " + std::to_string(c.line) + ")";
    out += "\n";
  }
  out += "Guard size: " + std::to_string(report.size_before) + " -> " + std::to_string(report.size_after) + " nodes\n";
  for (const auto& note : report.notes) out += "Note: " + note + "\n";
  return out;
}

nlohmann::json to_json(const FeedbackReport& report) {
  using nlohmann::json;
  json corrections = json::array();
  for (const auto& c : report.corrections) {
    corrections.push_back({
        {"kind", to_string(c.kind)},
        {"component", c.component},
        {"subject", c.subject},
        {"guard", c.guard ? json(render(c.guard)) : json(nullptr)},
        {"raw_guard", c.raw_guard ? json(render(c.raw_guard)) : json(nullptr)},
        {"suggested", c.suggested},
        {"replaced", c.replaced},
        {"line", c.line},
        {"text", c.text()},
    });
  }
  json trace = json::array();
  for (const auto& t : report.trace) {
    json queries = json::array();
    for (const auto& q : t.queries) {
      json e = {{"name", q.name},
                {"verdict", to_string(q.verdict)},
                {"elapsed_ms", q.elapsed_ms},
                {"countermodel_falsifies", q.countermodel_falsifies}};
      if (!q.diagnostic.empty()) e["diagnostic"] = q.diagnostic;
      queries.push_back(e);
    }
    trace.push_back({{"component", t.component},
                     {"ref_index", t.ref_index},
                     {"cand_index", t.cand_index},
                     {"ref_line", t.ref_line},
                     {"cand_line", t.cand_line},
                     {"refinements", t.refinements},
                     {"exited_valid", t.exited_valid},
                     {"total_substitution", t.total_substitution},
                     {"final_psi_valid", t.final_psi_valid},
                     {"queries", queries}});
  }
  json j = {
      {"submission", report.submission},
      {"reference", report.reference},
      {"verdict", to_string(report.verdict)},
      {"sigma", report.sigma},
      {"corrections", corrections},
      {"trace", trace},
      {"feedback_size", {{"before", report.size_before}, {"after", report.size_after}}},
      {"timings", {{"elapsed_ms", report.elapsed_ms}}},
      {"solver_queries", report.solver_queries},
      {"error", report.error_kind ? json({{"kind", std::string(to_string(*report.error_kind))},
                                          {"message", report.error}})
                                  : json(nullptr)},
      {"notes", report.notes},
      {"repaired_source", report.repaired_source ? json(*report.repaired_source) : json(nullptr)},
  };
  return j;
}

}  // namespace dpfb
