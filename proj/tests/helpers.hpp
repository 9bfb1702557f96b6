#pragma once

// Shared fixtures for the unit suites. The grammar JSON strings mirror the
// files under data/grammars; the acceptance binary exercises the shipped
// files themselves.

#include <string>
#include <utility>
#include <vector>

#include "levinforge/induction.hpp"
#include "levinforge/io.hpp"
#include "levinforge/parse.hpp"
#include "levinforge/transfer.hpp"

namespace testkit {

inline const char* seed_operator_json() {
  return R"json({
  "format_version": 1,
  "name": "seed_operator",
  "depth_cap": 12,
  "params": ["x"],
  "start": "expr",
  "nonterminals": [
    {
      "name": "expr",
      "productions": [
        {"template": "x", "probability": 0.40},
        {"template": "<lit>", "probability": 0.05},
        {"template": "(+ <expr> <expr>)", "probability": 0.14},
        {"template": "(- <expr> <expr>)", "probability": 0.07},
        {"template": "(* <expr> <expr>)", "probability": 0.34}
      ]
    },
    {
      "name": "lit",
      "productions": [
        {"template": "0", "probability": 0.3333333333333333},
        {"template": "1", "probability": 0.3333333333333333},
        {"template": "2", "probability": 0.3333333333333334}
      ]
    }
  ]
})json";
}

inline const char* seed_sequence_json() {
  return R"json({
  "format_version": 1,
  "name": "seed_sequence",
  "depth_cap": 32,
  "params": [],
  "start": "seq",
  "nonterminals": [
    {
      "name": "seq",
      "productions": [
        {"template": "nil", "probability": 0.10},
        {"template": "(cons <bit> <chain>)", "probability": 0.40},
        {"template": "(define (f n) (if (< n 1) nil (cons <bit> (cons <bit> (f (- n 1)))))) (f <num>)", "probability": 0.50}
      ]
    },
    {
      "name": "chain",
      "productions": [
        {"template": "nil", "probability": 0.40},
        {"template": "(cons <bit> <chain>)", "probability": 0.60}
      ]
    },
    {
      "name": "bit",
      "productions": [
        {"template": "0", "probability": 0.5},
        {"template": "1", "probability": 0.5}
      ]
    },
    {
      "name": "num",
      "productions": [
        {"template": "2", "probability": 0.5},
        {"template": "(+ 1 <num>)", "probability": 0.2},
        {"template": "(* 2 <num>)", "probability": 0.3}
      ]
    }
  ]
})json";
}

inline const char* toy_uniform_json() {
  return R"json({
  "format_version": 1,
  "name": "toy_uniform",
  "depth_cap": 8,
  "params": ["x"],
  "start": "expr",
  "nonterminals": [
    {
      "name": "expr",
      "productions": [
        {"template": "x", "probability": 0.3333333333333333},
        {"template": "2", "probability": 0.3333333333333333},
        {"template": "(* <v> <v>)", "probability": 0.3333333333333334}
      ]
    },
    {
      "name": "v",
      "productions": [
        {"template": "1", "probability": 0.5},
        {"template": "x", "probability": 0.5}
      ]
    }
  ]
})json";
}

inline const char* toy_nested_json() {
  return R"json({
  "format_version": 1,
  "name": "toy_nested",
  "depth_cap": 8,
  "params": ["x"],
  "start": "top",
  "nonterminals": [
    {
      "name": "top",
      "productions": [
        {"template": "0", "probability": 0.5},
        {"template": "(+ <b> <b>)", "probability": 0.3},
        {"template": "(* <b> <b>)", "probability": 0.2}
      ]
    },
    {
      "name": "b",
      "productions": [
        {"template": "1", "probability": 0.6},
        {"template": "2", "probability": 0.25},
        {"template": "(- <c> <c>)", "probability": 0.15}
      ]
    },
    {
      "name": "c",
      "productions": [
        {"template": "x", "probability": 0.7},
        {"template": "0", "probability": 0.3}
      ]
    }
  ]
})json";
}

inline levinforge::Grammar seed_operator_grammar() {
  return levinforge::parse_grammar_json(seed_operator_json(), "seed_operator");
}

inline levinforge::Grammar seed_sequence_grammar() {
  return levinforge::parse_grammar_json(seed_sequence_json(), "seed_sequence");
}

inline levinforge::Grammar toy_uniform_grammar() {
  return levinforge::parse_grammar_json(toy_uniform_json(), "toy_uniform");
}

inline levinforge::Grammar toy_nested_grammar() {
  return levinforge::parse_grammar_json(toy_nested_json(), "toy_nested");
}

inline levinforge::Problem operator_problem(
    const std::string& name,
    const std::vector<std::pair<int64_t, int64_t>>& pairs) {
  levinforge::Problem p;
  p.name = name;
  p.kind = levinforge::ProblemKind::Operator;
  for (const auto& [in, out] : pairs) p.examples.push_back({in, out});
  return p;
}

inline levinforge::Problem sequence_problem(const std::string& name,
                                            const std::string& bits) {
  levinforge::Problem p;
  p.name = name;
  p.kind = levinforge::ProblemKind::Sequence;
  p.prefix = levinforge::parse_bits(bits);
  return p;
}

// The six-problem curriculum shipped as data/plans/benchmark6.json.
inline std::vector<levinforge::Problem> benchmark_problems() {
  return {
      operator_problem("add1", {{2, 3}, {3, 4}, {5, 6}}),
      operator_problem("double", {{2, 4}, {3, 6}, {5, 10}}),
      operator_problem("square", {{2, 4}, {3, 9}, {5, 25}}),
      operator_problem("cube", {{2, 8}, {3, 27}, {1, 1}}),
      operator_problem("pow4", {{2, 16}, {3, 81}, {1, 1}}),
      operator_problem("pow8", {{2, 256}, {3, 6561}}),
  };
}

inline levinforge::TrainingPlan benchmark_plan() {
  levinforge::TrainingPlan plan;
  plan.name = "benchmark6";
  plan.grammar_name = "seed_operator";
  plan.problems = benchmark_problems();
  plan.incremental = true;
  plan.idioms_enabled = true;
  plan.search.t0 = 256;
  plan.search.max_phases = 40;
  plan.seed = 1;
  plan.alpha = 1.0;
  plan.idiom_mass = 0.2;
  plan.min_support = 2;
  plan.max_size = 7;
  return plan;
}

// An operator problem no single function can satisfy: one input demands
// two different outputs.
inline levinforge::Problem impossible_problem() {
  return operator_problem("impossible", {{2, 5}, {2, 6}});
}

inline levinforge::Program parse_op(const std::string& text) {
  static const std::vector<std::string> params = {"x"};
  return levinforge::parse(text, params);
}

inline levinforge::Program parse_seq(const std::string& text) {
  return levinforge::parse(text, {});
}

// Expected per-problem outcomes of the shipped curriculum, measured once
// and frozen; the engine is deterministic so these are exact.
struct BenchmarkExpectation {
  const char* name;
  int32_t incremental_phase;
  int32_t baseline_phase;
  int64_t incremental_steps;
  int64_t baseline_steps;
  int64_t solution_steps;
  int64_t update_steps;
  double mutual_bits;
  bool used_idiom;
};

inline const std::vector<BenchmarkExpectation>& benchmark_expectations() {
  static const std::vector<BenchmarkExpectation> table = {
      {"add1", 6, 6, 1370, 1370, 9, 18, 0.0, false},
      {"double", 2, 1, 181, 57, 9, 23, -0.519642542508, false},
      {"square", 2, 0, 146, 22, 9, 29, -2.17804531761, false},
      {"cube", 6, 3, 1677, 224, 15, 50, -2.20331612641, false},
      {"pow4", 4, 7, 504, 2600, 21, 63, 2.74318062702, true},
      {"pow8", 16, 19, 656720, 4624522, 30, 108, 3.11087879392, true},
  };
  return table;
}

inline constexpr int64_t kIncrementalTotalSteps = 660598;
inline constexpr int64_t kBaselineTotalSteps = 4628795;
inline constexpr int64_t kUpdateTotalSteps = 291;
inline constexpr double kTotalSpeedup = 7.00697701174;
inline constexpr double kPow4Speedup = 5.15873015873;
inline constexpr double kPow8Speedup = 7.04184736265;

}  // namespace testkit
