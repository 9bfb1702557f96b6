#include <benchmark/benchmark.h>

#include <cstdint>

#include "levinforge/enumerate.hpp"
#include "levinforge/grammar.hpp"
#include "levinforge/induction.hpp"
#include "levinforge/io.hpp"
#include "levinforge/machine.hpp"
#include "levinforge/parse.hpp"
#include "levinforge/search.hpp"

namespace {

using namespace levinforge;

const Grammar& operator_grammar() {
  static const Grammar g =
      load_grammar(LEVINFORGE_DATA_DIR "/grammars/seed_operator.json");
  return g;
}

Problem square_problem() {
  Problem p;
  p.name = "square";
  p.kind = ProblemKind::Operator;
  p.examples = {{2, 4}, {3, 9}, {5, 25}};
  return p;
}

void bm_evaluate_small(benchmark::State& state) {
  const Program program = parse("(* x x)", operator_grammar().params);
  const Value arg = Value::from_int(12345);
  for (auto _ : state) {
    EvalResult r =
        evaluate(program, std::span<const Value>(&arg, 1), 1 << 20);
    benchmark::DoNotOptimize(r.consumed);
  }
}
BENCHMARK(bm_evaluate_small);

void bm_evaluate_recursion(benchmark::State& state) {
  // Builds a 32-bit alternating stream through recursive list construction.
  const Program program = parse(
      "(define (f n) (if (< n 1) nil (cons 0 (cons 1 (f (- n 1)))))) "
      "(f (* 2 (* 2 (* 2 2))))",
      {});
  for (auto _ : state) {
    EvalResult r = evaluate(program, {}, 1 << 20);
    benchmark::DoNotOptimize(r.consumed);
  }
}
BENCHMARK(bm_evaluate_recursion);

void bm_program_probability(benchmark::State& state) {
  const Grammar& g = operator_grammar();
  const Program program = parse("(* (* x x) (* x x))", g.params);
  for (auto _ : state) {
    double p = program_probability(g, program);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(bm_program_probability);

void bm_enumerate(benchmark::State& state) {
  const Grammar& g = operator_grammar();
  for (auto _ : state) {
    int64_t count = 0;
    for_each_program(g, 1e-4, [&](const Candidate&) {
      ++count;
      return true;
    });
    benchmark::DoNotOptimize(count);
  }
}
BENCHMARK(bm_enumerate);

void bm_mine_and_install(benchmark::State& state) {
  const Grammar& g = operator_grammar();
  const std::vector<Program> solutions = {
      parse("(* x x)", g.params), parse("(* (* x x) x)", g.params)};
  for (auto _ : state) {
    MiningResult mined = mine_idioms(solutions, 2, 7);
    InstallResult inst = install_idioms(g, mined.idioms, 0.2);
    benchmark::DoNotOptimize(inst.installed);
  }
}
BENCHMARK(bm_mine_and_install);

void bm_levin_search_square(benchmark::State& state) {
  const Grammar& g = operator_grammar();
  const Problem problem = square_problem();
  for (auto _ : state) {
    SearchResult r = levin_search(g, make_problem_test(problem), SearchConfig{});
    benchmark::DoNotOptimize(r.total_steps_spent);
  }
}
BENCHMARK(bm_levin_search_square);

}  // namespace

BENCHMARK_MAIN();
