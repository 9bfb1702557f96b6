#include "levinforge/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "levinforge/log.hpp"

namespace levinforge {

double h_star(double p) {
  if (!(p > 0.0) || p > 1.0) {
    throw std::domain_error("h_star needs a probability in (0, 1]");
  }
  const double bits = -std::log2(p);
  return bits == 0.0 ? 0.0 : bits;  // normalize -0
}

EntropyIdentities entropy_identities(double px, double py_given_x) {
  const double hx = h_star(px);
  const double hyx = h_star(py_given_x);
  EntropyIdentities out;
  out.joint_bits = hx + hyx;
  // Shared information both as joint minus parts and directly; the terms
  // cancel algebraically, leaving only floating-point rounding.
  out.mutual_residual = (out.joint_bits - hx) - hyx;
  return out;
}

void validate_plan(const TrainingPlan& plan) {
  if (plan.name.empty()) throw PlanError("plan name must be non-empty");
  if (plan.problems.empty()) {
    throw PlanError("plan needs at least one problem");
  }
  std::set<std::string> names;
  for (const Problem& p : plan.problems) {
    validate_problem(p);
    if (!names.insert(p.name).second) {
      throw PlanError("duplicate problem name \"" + p.name + "\"");
    }
  }
  if (!(plan.alpha > 0.0)) throw PlanError("alpha must be positive");
  if (!(plan.idiom_mass > 0.0) || !(plan.idiom_mass < 1.0)) {
    throw PlanError("idiom_mass must be in (0, 1)");
  }
  if (plan.min_support < 2) throw PlanError("min_support must be >= 2");
  if (plan.max_size < 2) throw PlanError("max_size must be >= 2");
}

TransferReport run_training(const TrainingPlan& plan, const Grammar& seed,
                            Grammar* final_grammar) {
  validate_plan(plan);

  TransferReport report;
  report.plan_name = plan.name;
  report.grammar_name = plan.grammar_name;
  report.seed = plan.seed;
  report.incremental = plan.incremental;
  report.idioms_enabled = plan.idioms_enabled;
  report.t0 = plan.search.t0;
  report.max_phases = plan.search.max_phases;

  SearchConfig config;
  config.t0 = plan.search.t0;
  config.max_phases = plan.search.max_phases;
  config.workers = plan.search.workers;

  Grammar current = seed;
  std::vector<Program> solutions;
  std::vector<std::string> solution_names;

  for (const Problem& problem : plan.problems) {
    ProblemReport pr;
    pr.name = problem.name;

    const CandidateTest test = make_problem_test(problem);
    const SearchResult res = levin_search(current, test, config);

    pr.search_steps = res.total_steps_spent;
    pr.phases_run = res.phases_run;
    pr.success_phase = res.success_phase;
    report.total_search_steps += res.total_steps_spent;

    if (res.status != SearchStatus::Solved) {
      log_msg(LogLevel::Warn,
              "problem \"" + problem.name + "\" unsolved after " +
                  std::to_string(res.phases_run) + " phases");
      report.problems.push_back(std::move(pr));
      continue;
    }

    pr.solved = true;
    pr.solution_text = res.solution_text;
    pr.probability = res.solution_probability;
    pr.steps = res.solution_steps;
    pr.cjs = res.cjs;
    pr.cond_h_star_bits = h_star(res.solution_probability);

    const double p_seed = program_probability(seed, res.solution);
    if (p_seed > 0.0) {
      pr.h_star_bits = h_star(p_seed);
    } else {
      // The seed grammar cannot derive this solution within its depth
      // cap; claim no transfer rather than an unbounded amount.
      log_msg(LogLevel::Warn, "problem \"" + problem.name +
                                  "\" solution not derivable from the seed "
                                  "grammar; reporting zero shared bits");
      pr.h_star_bits = pr.cond_h_star_bits;
    }
    pr.mutual_bits = pr.h_star_bits - pr.cond_h_star_bits;

    std::set<std::string> sources;
    for (const DerivStep& step : res.derivation) {
      const Production& used =
          current.nonterminals[step.nonterminal].productions[step.production];
      if (!used.is_idiom) continue;
      pr.used_idiom = true;
      for (const std::string& origin : used.origin) {
        if (sources.insert(origin).second) {
          pr.idiom_sources.push_back(origin);
        }
      }
    }

    if (plan.incremental) {
      UpdateResult up = update_from_solution(current, res.derivation,
                                             plan.alpha);
      pr.update_steps = up.update_steps;
      current = std::move(up.grammar);

      if (plan.idioms_enabled) {
        solutions.push_back(res.solution);
        solution_names.push_back(problem.name);
        MiningResult mined =
            mine_idioms(solutions, plan.min_support, plan.max_size);
        pr.update_steps += mined.steps;
        for (IdiomCandidate& idiom : mined.idioms) {
          idiom.origin.clear();
          for (int32_t si : idiom.solution_indexes) {
            idiom.origin.push_back(solution_names[static_cast<size_t>(si)]);
          }
        }
        InstallResult inst =
            install_idioms(current, mined.idioms, plan.idiom_mass);
        pr.update_steps += inst.steps;
        current = std::move(inst.grammar);
      }
      report.total_update_steps += pr.update_steps;
    }

    ++report.solved_count;
    report.problems.push_back(std::move(pr));
  }

  if (final_grammar != nullptr) *final_grammar = std::move(current);
  return report;
}

SpeedupAnalysis speedup_analysis(const TransferReport& incremental,
                                 const TransferReport& baseline) {
  if (incremental.problems.size() != baseline.problems.size()) {
    throw MismatchedPlans("reports cover different problem counts");
  }
  for (size_t i = 0; i < incremental.problems.size(); ++i) {
    if (incremental.problems[i].name != baseline.problems[i].name) {
      throw MismatchedPlans("reports disagree at problem " +
                            std::to_string(i) + ": \"" +
                            incremental.problems[i].name + "\" vs \"" +
                            baseline.problems[i].name + "\"");
    }
  }

  SpeedupAnalysis out;
  double mutual_sum = 0.0;
  int64_t prev_update_steps = 0;
  for (size_t i = 0; i < incremental.problems.size(); ++i) {
    const ProblemReport& inc = incremental.problems[i];
    const ProblemReport& base = baseline.problems[i];
    SpeedupRow row;
    row.name = inc.name;
    row.solved_both = inc.solved && base.solved;
    row.baseline_steps = base.search_steps;
    row.incremental_steps = inc.search_steps;
    if (row.solved_both && inc.search_steps > 0) {
      row.actual_speedup = static_cast<double>(base.search_steps) /
                           static_cast<double>(inc.search_steps);
      row.predicted_speedup = std::exp2(inc.mutual_bits);
      row.net_savings_steps =
          static_cast<double>(inc.steps) *
              std::exp2(inc.h_star_bits + 1.0) *
              (1.0 - std::exp2(-inc.mutual_bits)) -
          static_cast<double>(prev_update_steps);
      mutual_sum += inc.mutual_bits;
    }
    prev_update_steps = inc.update_steps;
    out.rows.push_back(std::move(row));
  }

  out.total.name = "TOTAL";
  out.total.solved_both = std::all_of(
      out.rows.begin(), out.rows.end(),
      [](const SpeedupRow& r) { return r.solved_both; });
  out.total.baseline_steps = baseline.total_search_steps;
  out.total.incremental_steps = incremental.total_search_steps;
  if (incremental.total_search_steps > 0) {
    out.total.actual_speedup =
        static_cast<double>(baseline.total_search_steps) /
        static_cast<double>(incremental.total_search_steps);
  }
  out.total.predicted_speedup = std::exp2(mutual_sum);
  for (const SpeedupRow& r : out.rows) {
    out.total.net_savings_steps += r.net_savings_steps;
  }
  return out;
}

}  // namespace levinforge
