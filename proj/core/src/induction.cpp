#include "levinforge/induction.hpp"

#include <algorithm>
#include <cmath>

#include "levinforge/enumerate.hpp"

namespace levinforge {

namespace {

bool valid_name(const std::string& name) {
  if (name.empty() || name.size() > 64) return false;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                    c == '_';
    if (!ok) return false;
  }
  return true;
}

// True when the evaluation produced a bit list starting with `prefix`.
bool output_matches_prefix(const EvalResult& r, const BitList& prefix) {
  if (r.status != EvalStatus::Ok) return false;
  if (r.value.kind != Value::Kind::Bits) return false;
  if (r.value.bits == nullptr) return false;
  const BitList& bits = *r.value.bits;
  if (bits.size() < prefix.size()) return false;
  return std::equal(prefix.begin(), prefix.end(), bits.begin());
}

}  // namespace

void validate_problem(const Problem& problem) {
  if (!valid_name(problem.name)) {
    throw ProblemError("problem name must be non-empty [a-z0-9_], got \"" +
                       problem.name + "\"");
  }
  if (problem.kind == ProblemKind::Operator) {
    if (problem.examples.empty()) {
      throw ProblemError("operator problem \"" + problem.name +
                         "\" needs at least one example");
    }
    if (!problem.prefix.empty()) {
      throw ProblemError("operator problem \"" + problem.name +
                         "\" must not carry a bit prefix");
    }
  } else {
    if (problem.prefix.empty()) {
      throw ProblemError("sequence problem \"" + problem.name +
                         "\" needs a non-empty bit prefix");
    }
    if (!problem.examples.empty()) {
      throw ProblemError("sequence problem \"" + problem.name +
                         "\" must not carry examples");
    }
    for (uint8_t b : problem.prefix) {
      if (b > 1) {
        throw ProblemError("sequence problem \"" + problem.name +
                           "\" has a non-bit prefix entry");
      }
    }
  }
}

CandidateTest make_problem_test(const Problem& problem) {
  validate_problem(problem);
  if (problem.kind == ProblemKind::Operator) {
    std::vector<Example> examples = problem.examples;
    return [examples](const Program& candidate, int64_t fuel) {
      TestOutcome out;
      int64_t remaining = fuel;
      for (const Example& ex : examples) {
        const Value arg = Value::from_int(ex.input);
        const std::span<const Value> args(&arg, 1);
        const EvalResult r = evaluate(candidate, args, remaining);
        out.consumed += r.consumed;
        remaining -= r.consumed;
        if (r.status != EvalStatus::Ok) return out;
        if (r.value.kind != Value::Kind::Int) return out;
        if (IntVal::compare(r.value.i, IntVal(ex.output)) != 0) return out;
      }
      out.passed = true;
      return out;
    };
  }
  BitList prefix = problem.prefix;
  return [prefix](const Program& candidate, int64_t fuel) {
    TestOutcome out;
    const EvalResult r = evaluate(candidate, {}, fuel);
    out.consumed = r.consumed;
    out.passed = output_matches_prefix(r, prefix);
    return out;
  };
}

int64_t sequence_fuel(int64_t prefix_length) {
  if (prefix_length < 0) throw ProblemError("negative prefix length");
  return 32 * (prefix_length + 1);
}

BitList parse_bits(const std::string& text) {
  BitList bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c == '0') {
      bits.push_back(0);
    } else if (c == '1') {
      bits.push_back(1);
    } else {
      throw ProblemError("bit string may contain only '0' and '1'");
    }
  }
  return bits;
}

std::string bits_to_string(const BitList& bits) {
  std::string out;
  out.reserve(bits.size());
  for (uint8_t b : bits) out.push_back(b ? '1' : '0');
  return out;
}

static double alp_lower_bound_impl(const Grammar& g, const BitList& x,
                                   double min_probability, int64_t fuel,
                                   int64_t* steps_charged) {
  double mass = 0.0;
  for_each_program(g, min_probability, [&](const Candidate& c) {
    const EvalResult r = evaluate(*c.program, {}, fuel);
    if (steps_charged != nullptr) *steps_charged += r.consumed;
    if (output_matches_prefix(r, x)) mass += c.probability;
    return true;
  });
  return mass;
}

double alp_lower_bound(const Grammar& g, const BitList& x,
                       double min_probability, int64_t fuel) {
  if (fuel < 0) fuel = sequence_fuel(static_cast<int64_t>(x.size()));
  return alp_lower_bound_impl(g, x, min_probability, fuel, nullptr);
}

PredictDetails predict_next_details(const Grammar& g, const BitList& prefix,
                                    int64_t budget) {
  if (prefix.empty()) throw ProblemError("prediction needs a prefix");
  for (uint8_t b : prefix) {
    if (b > 1) throw ProblemError("prediction prefix has a non-bit entry");
  }

  PredictDetails d;
  d.fuel = sequence_fuel(static_cast<int64_t>(prefix.size()) + 1);

  BitList extended = prefix;
  extended.push_back(1);

  // Each sweep k enumerates every program with probability >= 2^-k, runs
  // it once, and accumulates in one pass the mass matching the prefix and
  // the mass matching the extension. The last sweep that finishes inside
  // the budget wins; an overrunning sweep is abandoned but its steps
  // still count as spent.
  bool have_sweep = false;
  for (int k = 1; k <= 48; ++k) {
    const double theta = std::ldexp(1.0, -k);
    double den = 0.0;
    double num = 0.0;
    int64_t spent = d.steps_charged;
    bool overran = false;
    for_each_program(g, theta, [&](const Candidate& c) {
      const EvalResult r = evaluate(*c.program, {}, d.fuel);
      spent += r.consumed;
      if (spent > budget) {
        overran = true;
        return false;
      }
      if (output_matches_prefix(r, prefix)) {
        den += c.probability;
        if (output_matches_prefix(r, extended)) num += c.probability;
      }
      return true;
    });
    if (overran) {
      d.steps_charged = budget;
      break;
    }
    d.steps_charged = spent;
    d.theta = theta;
    d.denominator = den;
    d.numerator = num;
    have_sweep = true;
  }

  if (!have_sweep || d.denominator <= 0.0) {
    d.p_one = 0.5;
    return d;
  }
  d.p_one = d.numerator / d.denominator;
  if (d.p_one < 0.0) d.p_one = 0.0;
  if (d.p_one > 1.0) d.p_one = 1.0;
  return d;
}

double predict_next(const Grammar& g, const BitList& prefix, int64_t budget) {
  return predict_next_details(g, prefix, budget).p_one;
}

}  // namespace levinforge
