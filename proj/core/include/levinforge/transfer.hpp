#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "levinforge/grammar.hpp"
#include "levinforge/induction.hpp"
#include "levinforge/search.hpp"

namespace levinforge {

// Thrown on malformed training plans.
class PlanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when speedup_analysis receives reports over different problems.
class MismatchedPlans : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Description length in bits of an event with probability p: -log2(p).
// Throws std::domain_error unless 0 < p <= 1.
double h_star(double p);

struct EntropyIdentities {
  // h_star(px) + h_star(py_given_x): description length of the pair.
  double joint_bits = 0.0;
  // Difference between the two expansions of the shared-information
  // term; cancels algebraically, so it only measures rounding.
  double mutual_residual = 0.0;
};
EntropyIdentities entropy_identities(double px, double py_given_x);

struct SearchSettings {
  int64_t t0 = 256;
  int32_t max_phases = 40;
  int32_t workers = 1;
};

struct TrainingPlan {
  std::string name;
  std::string grammar_name;  // label for reports
  std::vector<Problem> problems;
  bool incremental = true;
  bool idioms_enabled = true;
  SearchSettings search;
  uint64_t seed = 0;
  double alpha = 1.0;        // pseudocount for probability updates
  double idiom_mass = 0.1;   // start-symbol mass granted to new idioms
  int32_t min_support = 2;   // solutions a fragment must appear in
  int32_t max_size = 7;      // node-count cap for mined fragments
};

// Throws PlanError on empty/duplicate problem names or out-of-range
// tuning values.
void validate_plan(const TrainingPlan& plan);

struct ProblemReport {
  std::string name;
  bool solved = false;
  std::string solution_text;
  double probability = 0.0;     // P(s) under the grammar in force
  double h_star_bits = 0.0;     // description length under the seed grammar
  int64_t steps = 0;            // t(s): steps of the winning test run
  double cjs = 0.0;             // steps / probability
  int64_t search_steps = 0;     // every step the search charged
  int64_t update_steps = 0;     // probability update + idiom mining/install
  double cond_h_star_bits = 0.0;  // description length under grammar in force
  double mutual_bits = 0.0;       // h_star_bits - cond_h_star_bits
  int32_t phases_run = 0;
  int32_t success_phase = -1;
  bool used_idiom = false;
  // Names of the solutions the used idioms were mined from.
  std::vector<std::string> idiom_sources;
};

struct TransferReport {
  std::string plan_name;
  std::string grammar_name;
  uint64_t seed = 0;
  bool incremental = false;
  bool idioms_enabled = false;
  int64_t t0 = 256;
  int32_t max_phases = 40;
  std::vector<ProblemReport> problems;
  int32_t solved_count = 0;
  int64_t total_search_steps = 0;
  int64_t total_update_steps = 0;
};

// Solves the plan's problems in order. In incremental mode each solution's
// canonical derivation updates the grammar's production counts, and with
// idioms enabled recurring solution fragments are mined and installed,
// before the next problem is attempted. An unsolved problem is recorded
// and skipped (no update); later problems still run. Deterministic for a
// fixed plan. When final_grammar is non-null it receives the grammar left
// in force after the last problem.
TransferReport run_training(const TrainingPlan& plan, const Grammar& seed,
                            Grammar* final_grammar = nullptr);

struct SpeedupRow {
  std::string name;
  bool solved_both = false;
  int64_t baseline_steps = 0;
  int64_t incremental_steps = 0;
  double actual_speedup = 1.0;     // baseline_steps / incremental_steps
  double predicted_speedup = 1.0;  // 2^mutual_bits
  // steps * 2^(h_star+1) * (1 - 2^-mutual) minus the update steps charged
  // for the previous problem: the modeled benefit of having updated.
  double net_savings_steps = 0.0;
};

struct SpeedupAnalysis {
  std::vector<SpeedupRow> rows;
  SpeedupRow total;
};

// Compares an incremental run against a baseline run of the same plan.
// Throws MismatchedPlans unless both cover the same problems in order.
SpeedupAnalysis speedup_analysis(const TransferReport& incremental,
                                 const TransferReport& baseline);

}  // namespace levinforge
