#pragma once

#include <stdexcept>
#include <string>

#include "levinforge/grammar.hpp"
#include "levinforge/induction.hpp"
#include "levinforge/transfer.hpp"

namespace levinforge {

// Thrown on unreadable files or malformed content; the message names the
// file and the offending field.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Grammar files. Loading finalizes the grammar (validating probabilities,
// template closure, and productivity) and records the file's "name" field
// in Grammar::source_name. Saving emits every production's template in
// canonical serialization together with its probability, corpus count,
// idiom flag, and origin list.
Grammar load_grammar(const std::string& path);
Grammar parse_grammar_json(const std::string& text, const std::string& where);
void save_grammar(const Grammar& g, const std::string& path);
std::string grammar_to_json(const Grammar& g);

// Problem files.
Problem load_problem(const std::string& path);
Problem parse_problem_json(const std::string& text, const std::string& where);
std::string problem_to_json(const Problem& problem);

// Plan files. Grammar and problem paths are resolved relative to the
// plan file's directory; the problems are loaded eagerly.
struct PlanFile {
  TrainingPlan plan;
  std::string grammar_path;
};
PlanFile load_plan(const std::string& path);

// Solution records embed their problem, so a loaded record re-validates
// itself: the solution is re-run against the examples and must pass with
// exactly the recorded step count.
void save_solution_record(const SolutionRecord& record,
                          const Problem& problem,
                          const std::string& grammar_name,
                          const std::string& path);
struct LoadedSolution {
  SolutionRecord record;
  Problem problem;
  std::string grammar_name;
};
LoadedSolution load_solution_record(const std::string& path);

// A training report, optionally paired with the baseline run and the
// speedup comparison derived from the two.
struct ReportDocument {
  TransferReport primary;
  bool has_comparison = false;
  TransferReport baseline;   // valid when has_comparison
  SpeedupAnalysis analysis;  // valid when has_comparison
};
void save_report(const ReportDocument& doc, const std::string& path);
ReportDocument load_report(const std::string& path);

// Fixed-column CSV rendering: one row per problem plus a TOTAL row.
// Columns: name, solved, P_s, H_star, t_s, cjs, search_steps,
// update_steps, cond_H_star, mutual_bits, actual_speedup,
// predicted_speedup. Without a comparison the actual_speedup column is 1.
std::string report_csv(const ReportDocument& doc);

// Markdown table of measured and modeled speedups; requires a comparison.
std::string speedup_markdown(const ReportDocument& doc);

}  // namespace levinforge
