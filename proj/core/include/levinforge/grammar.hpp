#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "levinforge/ast.hpp"

namespace levinforge {

// Malformed grammar value (bad probabilities, open templates, unknown
// nonterminals, unproductive symbols).
struct GrammarError : std::runtime_error {
  explicit GrammarError(const std::string& msg) : std::runtime_error(msg) {}
};

// A derivation that does not replay against the grammar it is applied to.
struct InvalidDerivation : std::runtime_error {
  explicit InvalidDerivation(const std::string& msg)
      : std::runtime_error(msg) {}
};

// sample() could not fit the depth cap after its retry allowance.
struct DepthExceeded : std::runtime_error {
  explicit DepthExceeded(const std::string& msg) : std::runtime_error(msg) {}
};

// One alternative of a nonterminal: a program template whose Hole nodes
// reference other nonterminals by index.
struct Production {
  Program tmpl;
  double probability = 0.0;
  double corpus_count = 0.0;  // accumulated uses across updates
  bool is_idiom = false;
  std::vector<std::string> origin;  // solution names an idiom was mined from

  // Derived by finalize_grammar: template hole node indices in expansion
  // (preorder) order, and the canonical template text.
  std::vector<int32_t> holes;
  std::string serialization;
};

struct Nonterminal {
  std::string name;
  std::vector<Production> productions;
};

// Stochastic context-free grammar over Programs. The probability of a
// program is the product of production probabilities along its canonical
// derivation (see canonical_derivation). Grammar values are immutable in
// use: update_from_solution and install_idioms return new grammars.
struct Grammar {
  std::vector<Nonterminal> nonterminals;
  int32_t start = 0;
  int32_t depth_cap = 12;  // max expansion nesting; deeper programs get mass 0
  std::vector<std::string> params;  // ambient parameters of every program
  std::vector<std::string> names;   // canonical local-name table (derived)
  std::string source_name;          // label carried through reports

  int32_t find_nonterminal(std::string_view name) const;
};

struct DerivStep {
  int32_t nonterminal = -1;
  int32_t production = -1;
  bool operator==(const DerivStep&) const = default;
};

// Production choices in expansion order: each nonterminal occurrence is
// expanded leftmost-first (template hole order), depth-first.
using Derivation = std::vector<DerivStep>;

// Recomputes derived fields (canonical name table, hole orders, template
// serializations) and validates: per-nonterminal probabilities > 0 summing
// to 1 within 1e-12, templates closed, hole references valid, no duplicate
// templates per nonterminal, every nonterminal productive. Throws
// GrammarError.
void finalize_grammar(Grammar& g);

// The canonical derivation of `program` from the start symbol: the
// max-probability derivation, ties broken by lexicographically smallest
// production-index sequence. Returns nullopt when the program is not
// derivable or its canonical derivation exceeds depth_cap.
std::optional<Derivation> canonical_derivation(const Grammar& g,
                                               const Program& program);

// Product of the chosen production probabilities. Throws InvalidDerivation
// on out-of-range steps.
double derivation_probability(const Grammar& g, const Derivation& d);

// Probability of the canonical derivation; 0 when not derivable within the
// depth cap.
double program_probability(const Grammar& g, const Program& program);

// Expansion depth of a derivation (root expansion = 1).
int32_t derivation_depth(const Grammar& g, const Derivation& d);

// Replays a derivation into the program it yields. Throws InvalidDerivation
// when the choice sequence does not fit the grammar.
Program assemble(const Grammar& g, const Derivation& d);

struct SampleResult {
  Program program;
  Derivation derivation;  // canonical derivation of `program`
  double probability = 0.0;
};

// Draws a program from the grammar distribution. Deterministic for a fixed
// seed. Resamples when a draw exceeds depth_cap; throws DepthExceeded after
// 1000 failed attempts. The returned derivation is canonical, so
// program_probability(g, program) == probability exactly.
SampleResult sample(const Grammar& g, uint64_t seed);

struct UpdateResult {
  Grammar grammar;
  int64_t update_steps = 0;  // one step per production-count touch
};

// Adds the derivation's choices to the corpus counts, then re-estimates
// every production probability as (count + alpha) / (total + alpha * k)
// per nonterminal. Pure: `g` is unchanged. Throws InvalidDerivation or
// GrammarError (alpha <= 0).
UpdateResult update_from_solution(const Grammar& g, const Derivation& d,
                                  double alpha);

// A closed expression fragment shared by several solutions.
struct IdiomCandidate {
  Program fragment;
  std::string serialization;
  int32_t support = 0;  // number of distinct solutions containing it
  int32_t size = 0;     // node count
  std::vector<int32_t> solution_indexes;  // into mine_idioms' input span
  std::vector<std::string> origin;        // caller-supplied solution names
};

struct MiningResult {
  std::vector<IdiomCandidate> idioms;
  int64_t steps = 0;  // nodes examined
};

// All closed expression subtrees with size in [2, max_size] occurring in at
// least min_support distinct solutions, sorted by (support desc, size desc,
// serialization asc). Deterministic.
MiningResult mine_idioms(std::span<const Program> solutions,
                         int32_t min_support, int32_t max_size);

struct InstallResult {
  Grammar grammar;
  int64_t steps = 0;
  int32_t installed = 0;
};

// Appends each not-yet-present idiom as a production of the start (
// expression) nonterminal: existing productions are rescaled by
// (1 - idiom_mass) and the idiom_mass is split across the new productions
// proportional to support. Installing zero new idioms returns the grammar
// unchanged. Throws GrammarError on idiom_mass outside (0, 1) or open
// fragments.
InstallResult install_idioms(const Grammar& g,
                             std::span<const IdiomCandidate> idioms,
                             double idiom_mass);

}  // namespace levinforge
