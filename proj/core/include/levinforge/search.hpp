#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "levinforge/ast.hpp"
#include "levinforge/grammar.hpp"

namespace levinforge {

// Thrown on invalid search configuration.
class SearchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Outcome of testing one candidate. `consumed` is the number of evaluation
// steps the test spent; it must never exceed the fuel it was given.
struct TestOutcome {
  bool passed = false;
  int64_t consumed = 0;
};

// A candidate test receives a candidate program and a step allotment.
// It must be deterministic and side-effect free, and safe to call from
// multiple threads concurrently when searching with workers > 1.
using CandidateTest =
    std::function<TestOutcome(const Program& candidate, int64_t fuel)>;

struct SearchConfig {
  // Step budget of the first phase; phase i has budget t0 * 2^i.
  int64_t t0 = 256;
  // Maximum number of phases before giving up.
  int32_t max_phases = 40;
  // When true, keep running phases after the first success and collect
  // every passing program seen, up to max_phases.
  bool keep_searching_after_first = false;
  // Number of threads evaluating candidates. Results are byte-identical
  // for any worker count.
  int32_t workers = 1;
};

enum class SearchStatus { Solved, BudgetExhausted };

// A passing program, with its probability under the searched grammar.
struct FoundProgram {
  Program program;
  std::string serialization;
  double probability = 0.0;
};

struct SearchResult {
  SearchStatus status = SearchStatus::BudgetExhausted;

  // Valid only when status == Solved.
  Program solution;
  std::string solution_text;
  Derivation derivation;    // canonical derivation of the solution
  double solution_probability = 0.0;
  int64_t solution_steps = 0;  // steps the winning test run consumed
  double cjs = 0.0;            // solution_steps / solution_probability

  // Always valid.
  int64_t total_steps_spent = 0;  // every step charged by every test run
  int32_t phases_run = 0;
  int32_t success_phase = -1;  // phase index of the first success, or -1

  // Every distinct passing program seen during the phases that ran,
  // sorted by descending probability (ties: serialization ascending).
  // Includes the winner.
  std::vector<FoundProgram> alternatives;
};

// Phase-doubling search over the grammar's programs. Phase i enumerates
// all programs with probability >= 1 / (t0 * 2^i) and tests each with a
// fuel allotment of floor(t0 * 2^i * probability); candidates whose
// allotment rounds to zero are skipped, not failed. Phases always run to
// completion, so the winner -- the highest-probability passer of the
// earliest successful phase, ties broken by ascending serialization --
// does not depend on enumeration order or worker count.
SearchResult levin_search(const Grammar& g, const CandidateTest& test,
                          const SearchConfig& config);

// Same search, but after the first successful phase keeps running
// extra_phases further phases to surface lower-probability passers.
// extra_phases == 0 behaves exactly like levin_search.
SearchResult rerun_for_alternatives(const Grammar& g,
                                    const CandidateTest& test,
                                    const SearchConfig& config,
                                    int32_t extra_phases);

}  // namespace levinforge
