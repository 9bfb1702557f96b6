#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "levinforge/induction.hpp"

using namespace levinforge;

TEST_SUITE("induction") {

TEST_CASE("problem validation names the violation") {
  CHECK_NOTHROW(validate_problem(
      testkit::operator_problem("ok_name_1", {{1, 1}})));
  CHECK_NOTHROW(validate_problem(testkit::sequence_problem("seq_ok", "01")));

  CHECK_THROWS_AS(validate_problem(testkit::operator_problem("", {{1, 1}})),
                  ProblemError);
  CHECK_THROWS_AS(validate_problem(testkit::operator_problem("Bad", {{1, 1}})),
                  ProblemError);
  CHECK_THROWS_AS(
      validate_problem(testkit::operator_problem("has-dash", {{1, 1}})),
      ProblemError);
  CHECK_THROWS_AS(
      validate_problem(testkit::operator_problem(std::string(65, 'a'),
                                                 {{1, 1}})),
      ProblemError);

  Problem no_examples = testkit::operator_problem("empty", {{1, 1}});
  no_examples.examples.clear();
  CHECK_THROWS_AS(validate_problem(no_examples), ProblemError);

  Problem mixed = testkit::operator_problem("mixed", {{1, 1}});
  mixed.prefix = {0, 1};
  CHECK_THROWS_AS(validate_problem(mixed), ProblemError);

  Problem empty_seq = testkit::sequence_problem("seq", "0");
  empty_seq.prefix.clear();
  CHECK_THROWS_AS(validate_problem(empty_seq), ProblemError);

  Problem non_bit = testkit::sequence_problem("seq", "0");
  non_bit.prefix = {0, 2};
  CHECK_THROWS_AS(validate_problem(non_bit), ProblemError);
}

TEST_CASE("operator test checks every example and stops at the first miss") {
  Problem square = testkit::operator_problem("square", {{2, 4}, {3, 9}, {5, 25}});
  const CandidateTest test = make_problem_test(square);

  TestOutcome pass = test(testkit::parse_op("(* x x)"), 1000);
  CHECK(pass.passed);
  CHECK(pass.consumed == 9);

  // (+ x x) matches the first example (2 -> 4) then misses 3 -> 9: both
  // runs are charged, the third example never runs.
  TestOutcome miss = test(testkit::parse_op("(+ x x)"), 1000);
  CHECK_FALSE(miss.passed);
  CHECK(miss.consumed == 6);

  TestOutcome wrong_kind = test(testkit::parse_seq("nil"), 1000);
  CHECK_FALSE(wrong_kind.passed);
}

TEST_CASE("operator test threads one fuel budget through the examples") {
  Problem square = testkit::operator_problem("square", {{2, 4}, {3, 9}, {5, 25}});
  const CandidateTest test = make_problem_test(square);
  const Program candidate = testkit::parse_op("(* x x)");

  TestOutcome exact = test(candidate, 9);
  CHECK(exact.passed);
  CHECK(exact.consumed == 9);

  TestOutcome starved = test(candidate, 8);
  CHECK_FALSE(starved.passed);
  CHECK(starved.consumed <= 8);
}

TEST_CASE("sequence test accepts any extension of the prefix") {
  Problem p = testkit::sequence_problem("alt", "0101");
  const CandidateTest test = make_problem_test(p);

  CHECK(test(testkit::parse_seq("(cons 0 (cons 1 (cons 0 (cons 1 nil))))"),
             1000)
            .passed);
  // Longer output that starts with the prefix still passes.
  const std::string alternator =
      "(define (f n) (if (< n 1) nil (cons 0 (cons 1 (f (- n 1)))))) (f 2)";
  CHECK(test(testkit::parse_seq(alternator), 1000).passed);
  // Too short, wrong bits, or wrong kind all fail.
  CHECK_FALSE(test(testkit::parse_seq("(cons 0 nil)"), 1000).passed);
  CHECK_FALSE(
      test(testkit::parse_seq("(cons 1 (cons 0 (cons 1 (cons 0 nil))))"), 1000)
          .passed);
  CHECK_FALSE(test(testkit::parse_seq("1"), 1000).passed);
}

TEST_CASE("a sequence program cut off by fuel does not match") {
  // f(64) emits 128 bits but the judging fuel for a 4-bit prefix is
  // sequence_fuel(4) = 160 steps, nowhere near enough to finish; the
  // truncated run must count as a miss even though the bits seen so far
  // agree with the prefix.
  Problem p = testkit::sequence_problem("alt", "0101");
  const CandidateTest test = make_problem_test(p);
  const std::string big =
      "(define (f n) (if (< n 1) nil (cons 0 (cons 1 (f (- n 1)))))) "
      "(f (* 2 (* 2 (* 2 (* 2 (* 2 2))))))";
  TestOutcome out = test(testkit::parse_seq(big), sequence_fuel(4));
  CHECK_FALSE(out.passed);
  CHECK(out.consumed <= sequence_fuel(4));

  TestOutcome enough = test(testkit::parse_seq(big), 4000);
  CHECK(enough.passed);
}

TEST_CASE("sequence fuel rule") {
  CHECK(sequence_fuel(0) == 32);
  CHECK(sequence_fuel(4) == 160);
  CHECK(sequence_fuel(63) == 2048);
  CHECK_THROWS_AS(sequence_fuel(-1), ProblemError);
}

TEST_CASE("bit strings parse and print") {
  CHECK(bits_to_string(parse_bits("0101")) == "0101");
  CHECK(parse_bits("").empty());
  CHECK(parse_bits("1") == BitList{1});
  CHECK_THROWS_AS(parse_bits("012"), ProblemError);
  CHECK_THROWS_AS(parse_bits("0 1"), ProblemError);
}

TEST_CASE("output mass lower bound matches hand enumeration") {
  Grammar g = testkit::seed_sequence_grammar();
  // Programs with probability >= 0.05: nil (0.10, empty output), two
  // one-bit chains (0.08 each), and four two-bit repeaters (0.0625 each).
  // Those starting with "0": (cons 0 nil) and the repeaters 00.., 01.. .
  const double alp0 = alp_lower_bound(g, parse_bits("0"), 0.05);
  CHECK(alp0 == doctest::Approx(0.08 + 2 * 0.0625).epsilon(1e-12));

  const double alp00 = alp_lower_bound(g, parse_bits("00"), 0.05);
  CHECK(alp00 == doctest::Approx(0.0625).epsilon(1e-12));

  // Mass can only shrink as the prefix grows.
  const double alp010 = alp_lower_bound(g, parse_bits("010"), 0.01);
  const double alp01 = alp_lower_bound(g, parse_bits("01"), 0.01);
  CHECK(alp01 >= alp010);
  CHECK(alp_lower_bound(g, parse_bits("0"), 0.01) >= alp01);
}

TEST_CASE("prediction falls back to one half when no mass matches") {
  Grammar g = testkit::seed_sequence_grammar();
  CHECK(predict_next(g, parse_bits("01"), 0) == 0.5);

  // Thresholds above every program's probability enumerate nothing, so
  // those sweeps complete even with a zero budget; this grammar's first
  // candidates appear at 0.0625, leaving 0.125 as the last free sweep.
  // The half comes from the empty matched mass, not from skipping sweeps.
  PredictDetails d = predict_next_details(g, parse_bits("01"), 0);
  CHECK(d.theta == 0.125);
  CHECK(d.denominator == 0.0);
  CHECK(d.steps_charged == 0);
  CHECK(d.p_one == 0.5);

  PredictDetails tiny = predict_next_details(g, parse_bits("01"), 10);
  CHECK(tiny.p_one == 0.5);
  CHECK(tiny.steps_charged <= 10);
}

TEST_CASE("prediction tracks the alternating sequence") {
  Grammar g = testkit::seed_sequence_grammar();
  const int64_t budget = 4000000;

  // Frozen estimates measured on this grammar: after "0" the repeater
  // family is still drowned out; from length three on it dominates.
  CHECK(predict_next(g, parse_bits("0"), budget) ==
        doctest::Approx(0.402424).epsilon(1e-5));
  CHECK(predict_next(g, parse_bits("01"), budget) ==
        doctest::Approx(0.103800).epsilon(1e-5));
  CHECK(predict_next(g, parse_bits("010"), budget) ==
        doctest::Approx(0.906057).epsilon(1e-5));

  PredictDetails d = predict_next_details(g, parse_bits("0101"), budget);
  CHECK(d.steps_charged <= budget);
  CHECK(d.numerator <= d.denominator + 1e-15);
  CHECK(d.numerator >= 0.0);
  CHECK(d.p_one >= 0.0);
  CHECK(d.p_one <= 1.0);
  CHECK(d.fuel == sequence_fuel(5));
  // theta is one of the swept powers of two.
  CHECK(d.theta > 0.0);
  CHECK(std::ldexp(1.0, static_cast<int>(std::lround(std::log2(d.theta)))) ==
        d.theta);
}

TEST_CASE("prediction equals the output-mass ratio at its own threshold") {
  Grammar g = testkit::seed_sequence_grammar();
  const BitList prefix = parse_bits("0101");
  PredictDetails d = predict_next_details(g, prefix, 4000000);
  REQUIRE(d.theta > 0.0);
  REQUIRE(d.denominator > 0.0);

  BitList extended = prefix;
  extended.push_back(1);
  const double den = alp_lower_bound(g, prefix, d.theta, d.fuel);
  const double num = alp_lower_bound(g, extended, d.theta, d.fuel);
  CHECK(std::fabs(d.p_one - num / den) <= 1e-9);
  CHECK(d.denominator == doctest::Approx(den).epsilon(1e-12));
  CHECK(d.numerator == doctest::Approx(num).epsilon(1e-12));
}

TEST_CASE("prediction rejects malformed prefixes") {
  Grammar g = testkit::seed_sequence_grammar();
  CHECK_THROWS_AS(predict_next(g, BitList{}, 100), ProblemError);
  CHECK_THROWS_AS(predict_next(g, BitList{0, 2}, 100), ProblemError);
}

}  // TEST_SUITE
