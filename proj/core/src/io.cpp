#include "levinforge/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "levinforge/machine.hpp"
#include "levinforge/parse.hpp"

namespace levinforge {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw IoError(where + ": " + what);
}

json parse_json(const std::string& text, const std::string& where) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(where, "not valid JSON");
  return j;
}

void check_version(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "top level must be a JSON object");
  if (!j.contains("format_version")) {
    fail(where, "missing field \"format_version\"");
  }
  if (!j["format_version"].is_number_integer() ||
      j["format_version"].get<int64_t>() != 1) {
    fail(where, "field \"format_version\" must be 1");
  }
}

const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) {
    fail(where, std::string("missing field \"") + key + "\"");
  }
  return j.at(key);
}

std::string need_string(const json& j, const char* key,
                        const std::string& where) {
  const json& v = need(j, key, where);
  if (!v.is_string()) {
    fail(where, std::string("field \"") + key + "\" must be a string");
  }
  return v.get<std::string>();
}

int64_t need_int(const json& j, const char* key, const std::string& where) {
  const json& v = need(j, key, where);
  if (!v.is_number_integer()) {
    fail(where, std::string("field \"") + key + "\" must be an integer");
  }
  return v.get<int64_t>();
}

double need_number(const json& j, const char* key, const std::string& where) {
  const json& v = need(j, key, where);
  if (!v.is_number()) {
    fail(where, std::string("field \"") + key + "\" must be a number");
  }
  return v.get<double>();
}

bool need_bool(const json& j, const char* key, const std::string& where) {
  const json& v = need(j, key, where);
  if (!v.is_boolean()) {
    fail(where, std::string("field \"") + key + "\" must be a boolean");
  }
  return v.get<bool>();
}

bool opt_bool(const json& j, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<bool>();
}

double opt_number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<double>();
}

int64_t opt_int(const json& j, const char* key, int64_t fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<int64_t>();
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open for reading");
  std::ostringstream out;
  out << in.rdbuf();
  if (in.bad()) throw IoError(path + ": read failed");
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << content;
  out.flush();
  if (!out) throw IoError(path + ": write failed");
}

Grammar parse_grammar_json(const std::string& text, const std::string& where) {
  const json j = parse_json(text, where);
  check_version(j, where);

  Grammar g;
  g.source_name = need_string(j, "name", where);
  g.depth_cap = static_cast<int32_t>(need_int(j, "depth_cap", where));

  if (j.contains("params")) {
    const json& params = j.at("params");
    if (!params.is_array()) fail(where, "field \"params\" must be an array");
    for (const json& p : params) {
      if (!p.is_string()) fail(where, "entries of \"params\" must be strings");
      g.params.push_back(p.get<std::string>());
    }
  }

  const json& nts = need(j, "nonterminals", where);
  if (!nts.is_array() || nts.empty()) {
    fail(where, "field \"nonterminals\" must be a non-empty array");
  }
  std::vector<std::string> nt_names;
  for (const json& nt : nts) {
    nt_names.push_back(need_string(nt, "name", where));
  }

  for (const json& nt : nts) {
    Nonterminal out;
    out.name = need_string(nt, "name", where);
    const json& prods = need(nt, "productions", where);
    if (!prods.is_array() || prods.empty()) {
      fail(where, "nonterminal \"" + out.name +
                      "\" needs a non-empty \"productions\" array");
    }
    for (const json& pj : prods) {
      Production pr;
      const std::string tmpl = need_string(pj, "template", where);
      try {
        pr.tmpl = parse_template(tmpl, g.params, nt_names);
      } catch (const std::exception& e) {
        fail(where, "template \"" + tmpl + "\": " + e.what());
      }
      pr.probability = need_number(pj, "probability", where);
      pr.corpus_count = opt_number(pj, "count", 0.0);
      pr.is_idiom = opt_bool(pj, "idiom", false);
      if (pj.contains("origin")) {
        const json& origin = pj.at("origin");
        if (!origin.is_array()) {
          fail(where, "field \"origin\" must be an array");
        }
        for (const json& o : origin) {
          if (!o.is_string()) {
            fail(where, "entries of \"origin\" must be strings");
          }
          pr.origin.push_back(o.get<std::string>());
        }
      }
      out.productions.push_back(std::move(pr));
    }
    g.nonterminals.push_back(std::move(out));
  }

  const std::string start = need_string(j, "start", where);
  const int32_t start_idx = g.find_nonterminal(start);
  if (start_idx < 0) {
    fail(where, "field \"start\" names unknown nonterminal \"" + start + "\"");
  }
  g.start = start_idx;

  try {
    finalize_grammar(g);
  } catch (const std::exception& e) {
    fail(where, e.what());
  }
  return g;
}

Grammar load_grammar(const std::string& path) {
  return parse_grammar_json(read_text_file(path), path);
}

std::string grammar_to_json(const Grammar& g) {
  json j;
  j["format_version"] = 1;
  j["name"] = g.source_name;
  j["depth_cap"] = g.depth_cap;
  j["params"] = g.params;
  j["start"] = g.nonterminals[static_cast<size_t>(g.start)].name;
  json nts = json::array();
  for (const Nonterminal& nt : g.nonterminals) {
    json nj;
    nj["name"] = nt.name;
    json prods = json::array();
    for (const Production& pr : nt.productions) {
      json pj;
      pj["template"] = pr.serialization;
      pj["probability"] = pr.probability;
      pj["count"] = pr.corpus_count;
      pj["idiom"] = pr.is_idiom;
      pj["origin"] = pr.origin;
      prods.push_back(std::move(pj));
    }
    nj["productions"] = std::move(prods);
    nts.push_back(std::move(nj));
  }
  j["nonterminals"] = std::move(nts);
  return j.dump(2) + "\n";
}

void save_grammar(const Grammar& g, const std::string& path) {
  write_text_file(path, grammar_to_json(g));
}

Problem parse_problem_json(const std::string& text, const std::string& where) {
  const json j = parse_json(text, where);
  check_version(j, where);

  Problem p;
  p.name = need_string(j, "name", where);
  const std::string kind = need_string(j, "kind", where);
  if (kind == "operator") {
    p.kind = ProblemKind::Operator;
    const json& examples = need(j, "examples", where);
    if (!examples.is_array() || examples.empty()) {
      fail(where, "field \"examples\" must be a non-empty array");
    }
    for (const json& ej : examples) {
      const json& in = need(ej, "in", where);
      if (!in.is_array() || in.size() != 1 || !in[0].is_number_integer()) {
        fail(where, "field \"in\" must hold exactly one integer");
      }
      Example ex;
      ex.input = in[0].get<int64_t>();
      ex.output = need_int(ej, "out", where);
      p.examples.push_back(ex);
    }
  } else if (kind == "sequence") {
    p.kind = ProblemKind::Sequence;
    const std::string prefix = need_string(j, "prefix", where);
    try {
      p.prefix = parse_bits(prefix);
    } catch (const std::exception& e) {
      fail(where, std::string("field \"prefix\": ") + e.what());
    }
  } else {
    fail(where, "field \"kind\" must be \"operator\" or \"sequence\"");
  }

  try {
    validate_problem(p);
  } catch (const std::exception& e) {
    fail(where, e.what());
  }
  return p;
}

Problem load_problem(const std::string& path) {
  return parse_problem_json(read_text_file(path), path);
}

std::string problem_to_json(const Problem& problem) {
  json j;
  j["format_version"] = 1;
  j["name"] = problem.name;
  if (problem.kind == ProblemKind::Operator) {
    j["kind"] = "operator";
    json examples = json::array();
    for (const Example& ex : problem.examples) {
      json ej;
      ej["in"] = json::array({ex.input});
      ej["out"] = ex.output;
      examples.push_back(std::move(ej));
    }
    j["examples"] = std::move(examples);
  } else {
    j["kind"] = "sequence";
    j["prefix"] = bits_to_string(problem.prefix);
  }
  return j.dump(2) + "\n";
}

PlanFile load_plan(const std::string& path) {
  const std::string where = path;
  const json j = parse_json(read_text_file(path), where);
  check_version(j, where);
  const fs::path base = fs::path(path).parent_path();

  PlanFile out;
  TrainingPlan& plan = out.plan;
  plan.name = need_string(j, "name", where);
  out.grammar_path = (base / need_string(j, "grammar", where)).string();

  const json& problems = need(j, "problems", where);
  if (!problems.is_array() || problems.empty()) {
    fail(where, "field \"problems\" must be a non-empty array");
  }
  for (const json& pj : problems) {
    if (!pj.is_string()) {
      fail(where, "entries of \"problems\" must be file paths");
    }
    plan.problems.push_back(
        load_problem((base / pj.get<std::string>()).string()));
  }

  plan.incremental = need_bool(j, "incremental", where);
  plan.idioms_enabled = need_bool(j, "idioms", where);
  if (j.contains("search")) {
    const json& s = j.at("search");
    plan.search.t0 = opt_int(s, "t0", plan.search.t0);
    plan.search.max_phases = static_cast<int32_t>(
        opt_int(s, "max_phases", plan.search.max_phases));
  }
  if (j.contains("seed")) {
    const json& s = j.at("seed");
    if (!s.is_number_unsigned() && !s.is_number_integer()) {
      fail(where, "field \"seed\" must be an integer");
    }
    plan.seed = s.get<uint64_t>();
  }
  plan.alpha = opt_number(j, "alpha", plan.alpha);
  plan.idiom_mass = opt_number(j, "idiom_mass", plan.idiom_mass);
  plan.min_support =
      static_cast<int32_t>(opt_int(j, "min_support", plan.min_support));
  plan.max_size = static_cast<int32_t>(opt_int(j, "max_size", plan.max_size));

  try {
    validate_plan(plan);
  } catch (const std::exception& e) {
    fail(where, e.what());
  }
  return out;
}

void save_solution_record(const SolutionRecord& record,
                          const Problem& problem,
                          const std::string& grammar_name,
                          const std::string& path) {
  json j;
  j["format_version"] = 1;
  j["problem"] = json::parse(problem_to_json(problem));
  j["grammar"] = grammar_name;
  j["solution"] = record.solution_text;
  j["probability"] = record.probability;
  j["h_star"] = h_star(record.probability);
  j["steps"] = record.steps;
  j["cjs"] = record.cjs;
  j["search_steps"] = record.search_steps;
  j["update_steps"] = record.update_steps;
  json deriv = json::array();
  for (const DerivStep& step : record.derivation) {
    deriv.push_back(json::array({step.nonterminal, step.production}));
  }
  j["derivation"] = std::move(deriv);
  write_text_file(path, j.dump(2) + "\n");
}

LoadedSolution load_solution_record(const std::string& path) {
  const std::string where = path;
  const json j = parse_json(read_text_file(path), where);
  check_version(j, where);

  LoadedSolution out;
  out.problem =
      parse_problem_json(need(j, "problem", where).dump(), where);
  out.grammar_name = need_string(j, "grammar", where);

  SolutionRecord& r = out.record;
  r.problem = out.problem.name;
  r.solution_text = need_string(j, "solution", where);
  r.probability = need_number(j, "probability", where);
  r.steps = need_int(j, "steps", where);
  r.cjs = need_number(j, "cjs", where);
  r.search_steps = need_int(j, "search_steps", where);
  r.update_steps = need_int(j, "update_steps", where);
  if (j.contains("derivation")) {
    for (const json& step : j.at("derivation")) {
      if (!step.is_array() || step.size() != 2) {
        fail(where, "entries of \"derivation\" must be [nt, production]");
      }
      r.derivation.push_back({static_cast<int32_t>(step[0].get<int64_t>()),
                              static_cast<int32_t>(step[1].get<int64_t>())});
    }
  }

  std::span<const std::string> params;
  static const std::vector<std::string> operator_params = {"x"};
  if (out.problem.kind == ProblemKind::Operator) params = operator_params;
  try {
    r.solution = parse(r.solution_text, params);
  } catch (const std::exception& e) {
    fail(where, std::string("field \"solution\": ") + e.what());
  }

  // A record must replay: the stored solution has to pass its problem's
  // test, spending exactly the recorded number of steps.
  const CandidateTest test = make_problem_test(out.problem);
  const TestOutcome outcome = test(r.solution, int64_t{1} << 40);
  if (!outcome.passed) {
    fail(where, "stored solution does not solve its problem");
  }
  if (outcome.consumed != r.steps) {
    fail(where, "stored step count " + std::to_string(r.steps) +
                    " does not match replay (" +
                    std::to_string(outcome.consumed) + ")");
  }
  return out;
}

namespace {

json problem_report_to_json(const ProblemReport& p) {
  json j;
  j["name"] = p.name;
  j["solved"] = p.solved;
  j["solution"] = p.solution_text;
  j["probability"] = p.probability;
  j["h_star"] = p.h_star_bits;
  j["steps"] = p.steps;
  j["cjs"] = p.cjs;
  j["search_steps"] = p.search_steps;
  j["update_steps"] = p.update_steps;
  j["cond_h_star"] = p.cond_h_star_bits;
  j["mutual_bits"] = p.mutual_bits;
  j["phases_run"] = p.phases_run;
  j["success_phase"] = p.success_phase;
  j["used_idiom"] = p.used_idiom;
  j["idiom_sources"] = p.idiom_sources;
  return j;
}

ProblemReport problem_report_from_json(const json& j,
                                       const std::string& where) {
  ProblemReport p;
  p.name = need_string(j, "name", where);
  p.solved = need_bool(j, "solved", where);
  p.solution_text = need_string(j, "solution", where);
  p.probability = need_number(j, "probability", where);
  p.h_star_bits = need_number(j, "h_star", where);
  p.steps = need_int(j, "steps", where);
  p.cjs = need_number(j, "cjs", where);
  p.search_steps = need_int(j, "search_steps", where);
  p.update_steps = need_int(j, "update_steps", where);
  p.cond_h_star_bits = need_number(j, "cond_h_star", where);
  p.mutual_bits = need_number(j, "mutual_bits", where);
  p.phases_run = static_cast<int32_t>(need_int(j, "phases_run", where));
  p.success_phase = static_cast<int32_t>(need_int(j, "success_phase", where));
  p.used_idiom = need_bool(j, "used_idiom", where);
  if (j.contains("idiom_sources")) {
    for (const json& s : j.at("idiom_sources")) {
      p.idiom_sources.push_back(s.get<std::string>());
    }
  }
  return p;
}

json transfer_report_to_json(const TransferReport& r) {
  json j;
  j["plan"] = r.plan_name;
  j["grammar"] = r.grammar_name;
  j["seed"] = r.seed;
  j["incremental"] = r.incremental;
  j["idioms"] = r.idioms_enabled;
  j["t0"] = r.t0;
  j["max_phases"] = r.max_phases;
  json problems = json::array();
  for (const ProblemReport& p : r.problems) {
    problems.push_back(problem_report_to_json(p));
  }
  j["problems"] = std::move(problems);
  json totals;
  totals["solved"] = r.solved_count;
  totals["search_steps"] = r.total_search_steps;
  totals["update_steps"] = r.total_update_steps;
  totals["engine_steps"] = r.total_search_steps + r.total_update_steps;
  j["totals"] = std::move(totals);
  return j;
}

TransferReport transfer_report_from_json(const json& j,
                                         const std::string& where) {
  TransferReport r;
  r.plan_name = need_string(j, "plan", where);
  r.grammar_name = need_string(j, "grammar", where);
  r.seed = need(j, "seed", where).get<uint64_t>();
  r.incremental = need_bool(j, "incremental", where);
  r.idioms_enabled = need_bool(j, "idioms", where);
  r.t0 = opt_int(j, "t0", 256);
  r.max_phases = static_cast<int32_t>(opt_int(j, "max_phases", 40));
  for (const json& pj : need(j, "problems", where)) {
    r.problems.push_back(problem_report_from_json(pj, where));
  }
  const json& totals = need(j, "totals", where);
  r.solved_count = static_cast<int32_t>(need_int(totals, "solved", where));
  r.total_search_steps = need_int(totals, "search_steps", where);
  r.total_update_steps = need_int(totals, "update_steps", where);
  return r;
}

json speedup_row_to_json(const SpeedupRow& row) {
  json j;
  j["name"] = row.name;
  j["solved_both"] = row.solved_both;
  j["baseline_steps"] = row.baseline_steps;
  j["incremental_steps"] = row.incremental_steps;
  j["actual_speedup"] = row.actual_speedup;
  j["predicted_speedup"] = row.predicted_speedup;
  j["net_savings_steps"] = row.net_savings_steps;
  return j;
}

SpeedupRow speedup_row_from_json(const json& j, const std::string& where) {
  SpeedupRow row;
  row.name = need_string(j, "name", where);
  row.solved_both = need_bool(j, "solved_both", where);
  row.baseline_steps = need_int(j, "baseline_steps", where);
  row.incremental_steps = need_int(j, "incremental_steps", where);
  row.actual_speedup = need_number(j, "actual_speedup", where);
  row.predicted_speedup = need_number(j, "predicted_speedup", where);
  row.net_savings_steps = need_number(j, "net_savings_steps", where);
  return row;
}

}  // namespace

void save_report(const ReportDocument& doc, const std::string& path) {
  json j = transfer_report_to_json(doc.primary);
  j["format_version"] = 1;
  if (doc.has_comparison) {
    json cmp;
    cmp["baseline"] = transfer_report_to_json(doc.baseline);
    json rows = json::array();
    for (const SpeedupRow& row : doc.analysis.rows) {
      rows.push_back(speedup_row_to_json(row));
    }
    cmp["rows"] = std::move(rows);
    cmp["total"] = speedup_row_to_json(doc.analysis.total);
    j["comparison"] = std::move(cmp);
  }
  write_text_file(path, j.dump(2) + "\n");
}

ReportDocument load_report(const std::string& path) {
  const std::string where = path;
  const json j = parse_json(read_text_file(path), where);
  check_version(j, where);

  ReportDocument doc;
  doc.primary = transfer_report_from_json(j, where);
  if (j.contains("comparison")) {
    doc.has_comparison = true;
    const json& cmp = j.at("comparison");
    doc.baseline =
        transfer_report_from_json(need(cmp, "baseline", where), where);
    for (const json& row : need(cmp, "rows", where)) {
      doc.analysis.rows.push_back(speedup_row_from_json(row, where));
    }
    doc.analysis.total =
        speedup_row_from_json(need(cmp, "total", where), where);
  }
  return doc;
}

std::string report_csv(const ReportDocument& doc) {
  std::string out =
      "name,solved,P_s,H_star,t_s,cjs,search_steps,update_steps,"
      "cond_H_star,mutual_bits,actual_speedup,predicted_speedup\n";

  double p_product = 1.0;
  double h_sum = 0.0;
  int64_t t_sum = 0;
  double cjs_sum = 0.0;
  double cond_sum = 0.0;
  double mutual_sum = 0.0;

  for (size_t i = 0; i < doc.primary.problems.size(); ++i) {
    const ProblemReport& p = doc.primary.problems[i];
    double actual = 1.0;
    if (doc.has_comparison && i < doc.analysis.rows.size()) {
      actual = doc.analysis.rows[i].actual_speedup;
    }
    out += p.name;
    out += ',';
    out += p.solved ? '1' : '0';
    out += ',';
    out += fmt_double(p.probability);
    out += ',';
    out += fmt_double(p.h_star_bits);
    out += ',';
    out += std::to_string(p.steps);
    out += ',';
    out += fmt_double(p.cjs);
    out += ',';
    out += std::to_string(p.search_steps);
    out += ',';
    out += std::to_string(p.update_steps);
    out += ',';
    out += fmt_double(p.cond_h_star_bits);
    out += ',';
    out += fmt_double(p.mutual_bits);
    out += ',';
    out += fmt_double(actual);
    out += ',';
    out += fmt_double(std::exp2(p.mutual_bits));
    out += '\n';

    if (p.solved) {
      p_product *= p.probability;
      h_sum += p.h_star_bits;
      cond_sum += p.cond_h_star_bits;
      mutual_sum += p.mutual_bits;
    }
    t_sum += p.steps;
    cjs_sum += p.cjs;
  }

  const double total_actual =
      doc.has_comparison ? doc.analysis.total.actual_speedup : 1.0;
  out += "TOTAL,";
  out += std::to_string(doc.primary.solved_count);
  out += ',';
  out += fmt_double(p_product);
  out += ',';
  out += fmt_double(h_sum);
  out += ',';
  out += std::to_string(t_sum);
  out += ',';
  out += fmt_double(cjs_sum);
  out += ',';
  out += std::to_string(doc.primary.total_search_steps);
  out += ',';
  out += std::to_string(doc.primary.total_update_steps);
  out += ',';
  out += fmt_double(cond_sum);
  out += ',';
  out += fmt_double(mutual_sum);
  out += ',';
  out += fmt_double(total_actual);
  out += ',';
  out += fmt_double(std::exp2(mutual_sum));
  out += '\n';
  return out;
}

std::string speedup_markdown(const ReportDocument& doc) {
  if (!doc.has_comparison) {
    throw IoError("speedup table needs a report with a baseline comparison");
  }
  std::string out;
  out += "# Speedup: " + doc.primary.plan_name + "\n\n";
  out += "Baseline total search steps: " +
         std::to_string(doc.baseline.total_search_steps) + "\n";
  out += "Incremental total search steps: " +
         std::to_string(doc.primary.total_search_steps) + "\n\n";
  out +=
      "| problem | baseline steps | incremental steps | actual | predicted "
      "| net savings (steps) |\n";
  out += "|---|---:|---:|---:|---:|---:|\n";
  auto row_line = [&](const SpeedupRow& row) {
    out += "| " + row.name + " | " + std::to_string(row.baseline_steps) +
           " | " + std::to_string(row.incremental_steps) + " | " +
           fmt_double(row.actual_speedup) + " | " +
           fmt_double(row.predicted_speedup) + " | " +
           fmt_double(row.net_savings_steps) + " |\n";
  };
  for (const SpeedupRow& row : doc.analysis.rows) row_line(row);
  row_line(doc.analysis.total);
  return out;
}

}  // namespace levinforge
