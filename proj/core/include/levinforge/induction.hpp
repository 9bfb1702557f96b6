#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "levinforge/ast.hpp"
#include "levinforge/grammar.hpp"
#include "levinforge/machine.hpp"
#include "levinforge/search.hpp"

namespace levinforge {

// Thrown on malformed problems or invalid induction arguments.
class ProblemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ProblemKind { Operator, Sequence };

// One input/output pair for an operator problem.
struct Example {
  int64_t input = 0;
  int64_t output = 0;
};

struct Problem {
  std::string name;
  ProblemKind kind = ProblemKind::Operator;
  std::vector<Example> examples;  // operator problems: at least one
  BitList prefix;                 // sequence problems: at least one bit
};

// Throws ProblemError unless the problem is well formed: a non-empty name
// of [a-z0-9_] characters, and examples or prefix matching its kind.
void validate_problem(const Problem& problem);

// Candidate test for the problem. An operator candidate passes when it
// maps every example input to its exact output within the fuel allotment;
// a sequence candidate passes when, applied to no arguments, it yields a
// bit list that starts with the problem prefix. Either way every
// evaluation step is reported in TestOutcome::consumed.
CandidateTest make_problem_test(const Problem& problem);

// Step allotment used when judging sequence programs against a prefix of
// the given length: 32 * (prefix_length + 1).
int64_t sequence_fuel(int64_t prefix_length);

// Parses a string of '0'/'1' characters; throws ProblemError otherwise.
BitList parse_bits(const std::string& text);
std::string bits_to_string(const BitList& bits);

// Lower bound on the probability that a program drawn from the grammar
// prints a bit list starting with x: the summed probability of every
// program with probability >= min_probability whose output, within the
// step allotment, begins with x. fuel < 0 means sequence_fuel(x.size()).
double alp_lower_bound(const Grammar& g, const BitList& x,
                       double min_probability, int64_t fuel = -1);

// Everything predict_next derives on the way to its answer, for callers
// that need to audit the estimate.
struct PredictDetails {
  double theta = 0.0;        // calibrated enumeration threshold, 0 if none
  int64_t fuel = 0;          // per-candidate step allotment
  int64_t steps_charged = 0; // evaluation steps actually spent
  double numerator = 0.0;    // mass matching prefix extended by 1
  double denominator = 0.0;  // mass matching prefix
  double p_one = 0.5;        // final estimate
};

// Probability that the next bit is 1 given the prefix. Runs enumeration
// sweeps at thresholds 2^-1, 2^-2, ... with per-candidate fuel
// sequence_fuel(prefix length + 1), charging every evaluation step
// against the budget; the last sweep that completes within the budget
// fixes the threshold, and the estimate is the ratio of the matching
// mass for prefix+1 to the matching mass for the prefix at that
// threshold. Returns 0.5 when no sweep fits or nothing matches.
double predict_next(const Grammar& g, const BitList& prefix, int64_t budget);
PredictDetails predict_next_details(const Grammar& g, const BitList& prefix,
                                    int64_t budget);

// A solved problem with everything needed to audit the claim.
struct SolutionRecord {
  std::string problem;
  std::string solution_text;
  Program solution;
  Derivation derivation;
  double probability = 0.0;  // under the grammar that found it
  int64_t steps = 0;         // steps of the winning test run
  double cjs = 0.0;
  int64_t search_steps = 0;
  int64_t update_steps = 0;
};

}  // namespace levinforge
