// levin-forge command line: solve, train, predict, enumerate, report.
//
// Exit codes: 0 success, 1 bad input or configuration, 2 search budget
// exhausted (solve) or any problem unsolved in the primary run (train).

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "levinforge/enumerate.hpp"
#include "levinforge/grammar.hpp"
#include "levinforge/induction.hpp"
#include "levinforge/io.hpp"
#include "levinforge/search.hpp"
#include "levinforge/transfer.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace levinforge;

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::string(buf);
}

// Settings shared by the subcommands, merged from three layers: built-in
// defaults, then the --config file, then explicit flags. Flags win.
struct RunSettings {
  std::optional<std::string> grammar;  // grammar file path
  std::optional<uint64_t> seed;
  std::optional<bool> incremental;
  std::optional<bool> idioms;
  std::optional<bool> compare_baseline;
  std::optional<int32_t> workers;
  std::optional<int64_t> t0;
  std::optional<int32_t> max_phases;
  std::optional<std::string> out;
  std::string config_text;  // verbatim --config bytes, copied to the out dir
  bool has_config = false;
};

// Flag bindings for one subcommand; presence is tracked through the
// CLI11 option handles so absent flags never mask config-file values.
struct FlagSet {
  std::string grammar;
  std::string config;
  uint64_t seed = 0;
  bool incremental = true;
  bool idioms = true;
  bool compare_baseline = false;
  int32_t workers = 1;
  int64_t t0 = 256;
  int32_t max_phases = 40;
  std::string out = "out";

  CLI::Option* grammar_opt = nullptr;
  CLI::Option* config_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* incremental_opt = nullptr;
  CLI::Option* idioms_opt = nullptr;
  CLI::Option* compare_opt = nullptr;
  CLI::Option* workers_opt = nullptr;
  CLI::Option* t0_opt = nullptr;
  CLI::Option* max_phases_opt = nullptr;
  CLI::Option* out_opt = nullptr;
};

void add_grammar_flags(CLI::App* cmd, FlagSet& f) {
  f.grammar_opt = cmd->add_option("--grammar", f.grammar, "Grammar JSON file");
  f.config_opt = cmd->add_option("--config", f.config,
                                 "Run configuration JSON file; explicit "
                                 "flags override its fields");
}

void add_search_flags(CLI::App* cmd, FlagSet& f) {
  f.workers_opt =
      cmd->add_option("--workers", f.workers, "Search worker threads");
  f.t0_opt = cmd->add_option("--t0", f.t0, "Step budget of the first phase");
  f.max_phases_opt =
      cmd->add_option("--max-phases", f.max_phases, "Phase count limit");
}

void add_out_flag(CLI::App* cmd, FlagSet& f) {
  f.out_opt = cmd->add_option("--out", f.out, "Output directory");
}

// Reads a run configuration file: a JSON object with format_version 1 and
// any of grammar, seed, incremental, idioms, compare_baseline, workers,
// t0, max_phases, out. The grammar path is resolved against the config
// file's directory. Unknown fields are rejected by name.
RunSettings load_run_config(const std::string& path) {
  RunSettings s;
  s.config_text = read_text_file(path);
  s.has_config = true;
  json j = json::parse(s.config_text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw IoError(path + ": not a JSON object");
  if (!j.contains("format_version") ||
      !j["format_version"].is_number_integer() ||
      j["format_version"].get<int64_t>() != 1)
    throw IoError(path + ": field 'format_version' must be the integer 1");
  const fs::path base = fs::path(path).parent_path();
  for (const auto& [key, value] : j.items()) {
    if (key == "format_version") continue;
    if (key == "grammar") {
      if (!value.is_string())
        throw IoError(path + ": field 'grammar' must be a string");
      fs::path p = value.get<std::string>();
      s.grammar = (p.is_absolute() ? p : base / p).string();
    } else if (key == "seed") {
      if (!value.is_number_unsigned())
        throw IoError(path + ": field 'seed' must be a non-negative integer");
      s.seed = value.get<uint64_t>();
    } else if (key == "incremental") {
      if (!value.is_boolean())
        throw IoError(path + ": field 'incremental' must be a boolean");
      s.incremental = value.get<bool>();
    } else if (key == "idioms") {
      if (!value.is_boolean())
        throw IoError(path + ": field 'idioms' must be a boolean");
      s.idioms = value.get<bool>();
    } else if (key == "compare_baseline") {
      if (!value.is_boolean())
        throw IoError(path + ": field 'compare_baseline' must be a boolean");
      s.compare_baseline = value.get<bool>();
    } else if (key == "workers") {
      if (!value.is_number_integer())
        throw IoError(path + ": field 'workers' must be an integer");
      s.workers = static_cast<int32_t>(value.get<int64_t>());
    } else if (key == "t0") {
      if (!value.is_number_integer())
        throw IoError(path + ": field 't0' must be an integer");
      s.t0 = value.get<int64_t>();
    } else if (key == "max_phases") {
      if (!value.is_number_integer())
        throw IoError(path + ": field 'max_phases' must be an integer");
      s.max_phases = static_cast<int32_t>(value.get<int64_t>());
    } else if (key == "out") {
      if (!value.is_string())
        throw IoError(path + ": field 'out' must be a string");
      s.out = value.get<std::string>();
    } else {
      throw IoError(path + ": unknown field '" + key + "'");
    }
  }
  return s;
}

// Merge order: config file first, then every flag the user actually passed.
RunSettings resolve_settings(const FlagSet& f) {
  RunSettings s;
  if (f.config_opt != nullptr && f.config_opt->count() > 0)
    s = load_run_config(f.config);
  if (f.grammar_opt != nullptr && f.grammar_opt->count() > 0)
    s.grammar = f.grammar;
  if (f.seed_opt != nullptr && f.seed_opt->count() > 0) s.seed = f.seed;
  if (f.incremental_opt != nullptr && f.incremental_opt->count() > 0)
    s.incremental = f.incremental;
  if (f.idioms_opt != nullptr && f.idioms_opt->count() > 0)
    s.idioms = f.idioms;
  if (f.compare_opt != nullptr && f.compare_opt->count() > 0)
    s.compare_baseline = f.compare_baseline;
  if (f.workers_opt != nullptr && f.workers_opt->count() > 0)
    s.workers = f.workers;
  if (f.t0_opt != nullptr && f.t0_opt->count() > 0) s.t0 = f.t0;
  if (f.max_phases_opt != nullptr && f.max_phases_opt->count() > 0)
    s.max_phases = f.max_phases;
  if (f.out_opt != nullptr && f.out_opt->count() > 0) s.out = f.out;
  return s;
}

std::string require_grammar(const RunSettings& s, const char* command) {
  if (!s.grammar.has_value() || s.grammar->empty())
    throw IoError(std::string(command) +
                  ": no grammar file given (use --grammar or a config file)");
  return *s.grammar;
}

void write_out_dir_preamble(const std::string& out, const RunSettings& s,
                            const json& effective) {
  fs::create_directories(out);
  write_text_file(out + "/effective_config.json", effective.dump(2) + "\n");
  if (s.has_config) write_text_file(out + "/config.json", s.config_text);
}

int cmd_solve(const std::string& problem_path, const RunSettings& s) {
  const std::string grammar_path = require_grammar(s, "solve");
  Grammar g = load_grammar(grammar_path);
  Problem problem = load_problem(problem_path);

  SearchConfig config;
  config.t0 = s.t0.value_or(256);
  config.max_phases = s.max_phases.value_or(40);
  config.workers = s.workers.value_or(1);
  const std::string out = s.out.value_or("out");

  json effective;
  effective["format_version"] = 1;
  effective["command"] = "solve";
  effective["problem"] = problem_path;
  effective["grammar"] = grammar_path;
  effective["workers"] = config.workers;
  effective["t0"] = config.t0;
  effective["max_phases"] = config.max_phases;
  effective["out"] = out;
  write_out_dir_preamble(out, s, effective);

  SearchResult result = levin_search(g, make_problem_test(problem), config);

  std::printf("problem: %s\n", problem.name.c_str());
  if (result.status != SearchStatus::Solved) {
    std::printf("status: budget_exhausted\n");
    std::printf("search_steps: %" PRId64 "\n", result.total_steps_spent);
    std::printf("phases_run: %d\n", result.phases_run);
    return 2;
  }

  SolutionRecord record;
  record.problem = problem.name;
  record.solution_text = result.solution_text;
  record.solution = result.solution;
  record.derivation = result.derivation;
  record.probability = result.solution_probability;
  record.steps = result.solution_steps;
  record.cjs = result.cjs;
  record.search_steps = result.total_steps_spent;
  record.update_steps = 0;
  const std::string solution_path = out + "/solution.json";
  save_solution_record(record, problem, g.source_name, solution_path);

  std::printf("status: solved\n");
  std::printf("solution: %s\n", result.solution_text.c_str());
  std::printf("probability: %s\n", fmt_double(result.solution_probability).c_str());
  std::printf("h_star_bits: %s\n", fmt_double(h_star(result.solution_probability)).c_str());
  std::printf("steps: %" PRId64 "\n", result.solution_steps);
  std::printf("cjs: %s\n", fmt_double(result.cjs).c_str());
  std::printf("search_steps: %" PRId64 "\n", result.total_steps_spent);
  std::printf("phases_run: %d\n", result.phases_run);
  std::printf("success_phase: %d\n", result.success_phase);
  std::printf("wrote: %s\n", solution_path.c_str());
  return 0;
}

void print_training_table(const TransferReport& r) {
  std::printf("%-12s %-9s %6s %6s %14s %14s %12s\n", "name", "status",
              "phase", "t", "search_steps", "update_steps", "mutual_bits");
  for (const ProblemReport& p : r.problems) {
    std::printf("%-12s %-9s %6d %6" PRId64 " %14" PRId64 " %14" PRId64
                " %12s%s\n",
                p.name.c_str(), p.solved ? "solved" : "unsolved",
                p.success_phase, p.steps, p.search_steps, p.update_steps,
                fmt_double(p.mutual_bits).c_str(),
                p.used_idiom ? "  [idiom]" : "");
  }
  std::printf("solved: %d/%zu\n", r.solved_count, r.problems.size());
  std::printf("total_search_steps: %" PRId64 "\n", r.total_search_steps);
  std::printf("total_update_steps: %" PRId64 "\n", r.total_update_steps);
}

int cmd_train(const std::string& plan_path, const RunSettings& s) {
  PlanFile pf = load_plan(plan_path);
  TrainingPlan plan = pf.plan;
  const std::string grammar_path =
      (s.grammar.has_value() && !s.grammar->empty()) ? *s.grammar
                                                     : pf.grammar_path;
  Grammar g = load_grammar(grammar_path);
  plan.grammar_name = g.source_name;
  if (s.seed.has_value()) plan.seed = *s.seed;
  if (s.incremental.has_value()) plan.incremental = *s.incremental;
  if (s.idioms.has_value()) plan.idioms_enabled = *s.idioms;
  if (s.t0.has_value()) plan.search.t0 = *s.t0;
  if (s.max_phases.has_value()) plan.search.max_phases = *s.max_phases;
  plan.search.workers = s.workers.value_or(1);
  const bool compare = s.compare_baseline.value_or(false);
  const std::string out = s.out.value_or("out");

  json effective;
  effective["format_version"] = 1;
  effective["command"] = "train";
  effective["plan"] = plan_path;
  effective["grammar"] = grammar_path;
  effective["seed"] = plan.seed;
  effective["incremental"] = plan.incremental;
  effective["idioms"] = plan.idioms_enabled;
  effective["compare_baseline"] = compare;
  effective["workers"] = plan.search.workers;
  effective["t0"] = plan.search.t0;
  effective["max_phases"] = plan.search.max_phases;
  effective["alpha"] = plan.alpha;
  effective["idiom_mass"] = plan.idiom_mass;
  effective["min_support"] = plan.min_support;
  effective["max_size"] = plan.max_size;
  effective["out"] = out;
  write_out_dir_preamble(out, s, effective);

  Grammar trained = g;
  ReportDocument doc;
  std::printf("plan: %s\n", plan.name.c_str());
  std::printf("grammar: %s\n", plan.grammar_name.c_str());
  std::printf("incremental: %s\n", plan.incremental ? "true" : "false");
  std::printf("idioms: %s\n", plan.idioms_enabled ? "true" : "false");
  doc.primary = run_training(plan, g, &trained);
  print_training_table(doc.primary);

  if (compare) {
    TrainingPlan base = plan;
    base.incremental = false;
    base.idioms_enabled = false;
    doc.baseline = run_training(base, g);
    doc.analysis = speedup_analysis(doc.primary, doc.baseline);
    doc.has_comparison = true;
    std::printf("baseline_total_search_steps: %" PRId64 "\n",
                doc.baseline.total_search_steps);
    std::printf("actual_speedup_total: %s\n",
                fmt_double(doc.analysis.total.actual_speedup).c_str());
    std::printf("predicted_speedup_total: %s\n",
                fmt_double(doc.analysis.total.predicted_speedup).c_str());
  }

  save_report(doc, out + "/report.json");
  write_text_file(out + "/report.csv", report_csv(doc));
  std::printf("wrote: %s\n", (out + "/report.json").c_str());
  std::printf("wrote: %s\n", (out + "/report.csv").c_str());
  if (doc.has_comparison) {
    write_text_file(out + "/speedup.md", speedup_markdown(doc));
    std::printf("wrote: %s\n", (out + "/speedup.md").c_str());
  }
  save_grammar(trained, out + "/trained_grammar.json");
  std::printf("wrote: %s\n", (out + "/trained_grammar.json").c_str());

  return doc.primary.solved_count ==
                 static_cast<int32_t>(doc.primary.problems.size())
             ? 0
             : 2;
}

int cmd_predict(const std::string& prefix_text, int64_t budget,
                const RunSettings& s) {
  const std::string grammar_path = require_grammar(s, "predict");
  if (budget < 0) throw ProblemError("predict: budget must be >= 0");
  Grammar g = load_grammar(grammar_path);
  BitList prefix = parse_bits(prefix_text);
  double p_one = predict_next(g, prefix, budget);
  std::printf("%.6f\n", p_one);
  return 0;
}

int cmd_enumerate(double min_probability, int64_t limit,
                  const RunSettings& s) {
  const std::string grammar_path = require_grammar(s, "enumerate");
  if (!(min_probability > 0.0 && min_probability < 1.0))
    throw GrammarError("enumerate: min_probability must be in (0, 1)");
  Grammar g = load_grammar(grammar_path);
  std::vector<Enumerated> listing = enumerate_programs(g, min_probability);
  const int64_t shown =
      limit < 0 ? static_cast<int64_t>(listing.size())
                : std::min<int64_t>(limit, static_cast<int64_t>(listing.size()));
  for (int64_t i = 0; i < shown; ++i)
    std::printf("%s\t%s\n", listing[i].serialization.c_str(),
                fmt_double(listing[i].probability).c_str());
  std::printf("kraft_partial_sum\t%s\n",
              fmt_double(mass_at_least(g, min_probability)).c_str());
  return 0;
}

int cmd_report(const std::string& report_path, const RunSettings& s) {
  ReportDocument doc = load_report(report_path);
  if (s.out.has_value()) {
    const std::string out = *s.out;
    fs::create_directories(out);
    write_text_file(out + "/report.csv", report_csv(doc));
    std::printf("wrote: %s\n", (out + "/report.csv").c_str());
    if (doc.has_comparison) {
      write_text_file(out + "/speedup.md", speedup_markdown(doc));
      std::printf("wrote: %s\n", (out + "/speedup.md").c_str());
    }
  } else {
    std::fputs(report_csv(doc).c_str(), stdout);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "levin-forge: program induction by phased enumeration search over a "
      "stochastic grammar, with cross-problem grammar updates"};
  app.require_subcommand(1);

  std::string solve_problem;
  FlagSet solve_flags;
  CLI::App* solve = app.add_subcommand(
      "solve", "Search for a program solving one problem file");
  solve->add_option("problem", solve_problem, "Problem JSON file")->required();
  add_grammar_flags(solve, solve_flags);
  add_search_flags(solve, solve_flags);
  add_out_flag(solve, solve_flags);

  std::string train_plan;
  FlagSet train_flags;
  CLI::App* train = app.add_subcommand(
      "train", "Run a training plan and write its report");
  train->add_option("plan", train_plan, "Plan JSON file")->required();
  add_grammar_flags(train, train_flags);
  add_search_flags(train, train_flags);
  add_out_flag(train, train_flags);
  train_flags.seed_opt =
      train->add_option("--seed", train_flags.seed, "Plan seed override");
  train_flags.incremental_opt = train->add_flag(
      "--incremental,!--no-incremental", train_flags.incremental,
      "Update the grammar after each solved problem");
  train_flags.idioms_opt =
      train->add_flag("--idioms,!--no-idioms", train_flags.idioms,
                      "Mine and install recurring solution fragments");
  train_flags.compare_opt = train->add_flag(
      "--compare-baseline", train_flags.compare_baseline,
      "Also run without updates and report measured vs modeled speedups");

  std::string predict_prefix;
  int64_t predict_budget = 4000000;
  FlagSet predict_flags;
  CLI::App* predict = app.add_subcommand(
      "predict", "Estimate the probability that the next bit is 1");
  predict->add_option("prefix", predict_prefix, "Observed bits, e.g. 0101")
      ->required();
  predict->add_option("budget", predict_budget,
                      "Evaluation step budget (default 4000000)");
  add_grammar_flags(predict, predict_flags);

  double enum_min_probability = 0.0;
  int64_t enum_limit = -1;
  FlagSet enum_flags;
  CLI::App* enumerate = app.add_subcommand(
      "enumerate", "List programs above a probability threshold");
  enumerate
      ->add_option("min_probability", enum_min_probability,
                   "Probability threshold in (0, 1)")
      ->required();
  enumerate->add_option("limit", enum_limit,
                        "Lines to print (default: all; 0 prints only the "
                        "Kraft partial sum)");
  add_grammar_flags(enumerate, enum_flags);

  std::string report_file;
  FlagSet report_flags;
  CLI::App* report = app.add_subcommand(
      "report", "Re-render a stored report JSON as CSV and markdown");
  report->add_option("report_json", report_file, "Report JSON file")
      ->required();
  add_out_flag(report, report_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (solve->parsed()) {
      return cmd_solve(solve_problem, resolve_settings(solve_flags));
    } else if (train->parsed()) {
      return cmd_train(train_plan, resolve_settings(train_flags));
    } else if (predict->parsed()) {
      return cmd_predict(predict_prefix, predict_budget,
                         resolve_settings(predict_flags));
    } else if (enumerate->parsed()) {
      if (enum_limit < 0 && enumerate->count("limit") > 0)
        throw GrammarError("enumerate: limit must be >= 0");
      return cmd_enumerate(enum_min_probability, enum_limit,
                           resolve_settings(enum_flags));
    } else if (report->parsed()) {
      RunSettings rs;
      if (report_flags.out_opt->count() > 0) rs.out = report_flags.out;
      return cmd_report(report_file, rs);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
