#pragma once

#include <functional>
#include <string>
#include <vector>

#include "levinforge/grammar.hpp"

namespace levinforge {

// A completed candidate as seen during streaming enumeration. `program`
// and `derivation` point into the enumerator's reusable buffers: valid only
// during the visit call; copy what you keep. The program arena may hold
// unreachable scratch nodes; traversal from root sees the candidate only.
struct Candidate {
  const Program* program = nullptr;
  double probability = 0.0;
  const Derivation* derivation = nullptr;
};

// Streams every program whose canonical probability is >= min_probability
// and whose derivation fits depth_cap, in a fixed depth-first derivation
// order (not probability-sorted). Each program appears exactly once: with
// idiom productions present, non-canonical derivations of a program are
// skipped. The visitor returns false to stop early. Returns the number of
// candidates visited. Throws GrammarError when min_probability is not in
// (0, 1].
int64_t for_each_program(const Grammar& g, double min_probability,
                         const std::function<bool(const Candidate&)>& visit);

// Kraft partial sum: total probability mass of the programs
// for_each_program(g, min_probability) yields. Always <= 1.
double mass_at_least(const Grammar& g, double min_probability);

struct Enumerated {
  Program program;
  double probability = 0.0;
  std::string serialization;
  Derivation derivation;
};

// Materialized enumeration: every program with probability >=
// min_probability, sorted by probability descending, ties by serialization
// ascending (the stream order of the diagnostics listing).
std::vector<Enumerated> enumerate_programs(const Grammar& g,
                                           double min_probability);

// True when any production is an installed idiom (the only source of
// derivation ambiguity, requiring canonicality filtering).
bool grammar_has_idioms(const Grammar& g);

}  // namespace levinforge
