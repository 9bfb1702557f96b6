#include "levinforge/enumerate.hpp"

#include <algorithm>

#include "internal.hpp"

namespace levinforge {

bool grammar_has_idioms(const Grammar& g) {
  for (const Nonterminal& nt : g.nonterminals) {
    for (const Production& pr : nt.productions) {
      if (pr.is_idiom) return true;
    }
  }
  return false;
}

namespace {

struct PendingHole {
  int32_t slot;   // arena node index to expand in place
  int32_t nt;     // nonterminal to derive
  int32_t depth;  // expansion nesting level (root = 1)
};

// Depth-first generator over canonical derivations with threshold pruning.
// The arena program is mutated in place: each expansion patches the pending
// hole node and appends the template; rollback restores the hole and trims
// the arena, so memory stays proportional to the current candidate.
class Generator {
 public:
  Generator(const Grammar& g, double theta,
            const std::function<bool(const Candidate&)>& visit)
      : g_(g), theta_(theta), visit_(visit),
        check_canonical_(grammar_has_idioms(g)) {
    arena_.params = g.params;
    arena_.names = g.names;
    Node root_hole;
    root_hole.kind = NodeKind::Hole;
    root_hole.a = g.start;
    arena_.nodes.push_back(root_hole);
    arena_.root = 0;
  }

  int64_t run() {
    pending_.push_back({0, g_.start, 1});
    expand(1.0);
    return visited_;
  }

 private:
  // Expands the top pending hole with every admissible production; emits
  // when no holes remain. Returns false once the visitor stops the run.
  bool expand(double prob) {
    if (pending_.empty()) return emit(prob);
    const PendingHole hole = pending_.back();
    pending_.pop_back();
    const Nonterminal& nt = g_.nonterminals[hole.nt];
    for (size_t pi = 0; pi < nt.productions.size(); ++pi) {
      const Production& pr = nt.productions[pi];
      const double p2 = prob * pr.probability;
      if (p2 < theta_) continue;
      if (!pr.holes.empty() && hole.depth >= g_.depth_cap) continue;

      const size_t checkpoint = arena_.nodes.size();
      const Node saved = arena_.nodes[hole.slot];
      const int32_t base = static_cast<int32_t>(checkpoint);
      const int32_t root = internal::instantiate_template(arena_, pr);
      arena_.nodes[hole.slot] = arena_.nodes[root];
      const size_t pending_mark = pending_.size();
      for (size_t hi = pr.holes.size(); hi-- > 0;) {
        const int32_t h = pr.holes[hi];
        const int32_t slot = (base + h == root) ? hole.slot : base + h;
        pending_.push_back(
            {slot, pr.tmpl.nodes[h].a, hole.depth + 1});
      }
      deriv_.push_back({hole.nt, static_cast<int32_t>(pi)});

      const bool keep_going = expand(p2);

      deriv_.pop_back();
      pending_.resize(pending_mark);
      arena_.nodes.resize(checkpoint);
      arena_.nodes[hole.slot] = saved;
      if (!keep_going) return false;
    }
    pending_.push_back(hole);
    return true;
  }

  bool emit(double prob) {
    if (check_canonical_) {
      std::optional<Derivation> canon = canonical_derivation(g_, arena_);
      if (!canon || *canon != deriv_) return true;  // a duplicate spelling
    }
    ++visited_;
    Candidate c;
    c.program = &arena_;
    c.probability = prob;
    c.derivation = &deriv_;
    return visit_(c);
  }

  const Grammar& g_;
  double theta_;
  const std::function<bool(const Candidate&)>& visit_;
  bool check_canonical_;
  Program arena_;
  std::vector<PendingHole> pending_;
  Derivation deriv_;
  int64_t visited_ = 0;
};

}  // namespace

int64_t for_each_program(const Grammar& g, double min_probability,
                         const std::function<bool(const Candidate&)>& visit) {
  if (!(min_probability > 0.0 && min_probability <= 1.0)) {
    throw GrammarError("min_probability must be in (0, 1]");
  }
  Generator gen(g, min_probability, visit);
  return gen.run();
}

double mass_at_least(const Grammar& g, double min_probability) {
  double mass = 0.0;
  for_each_program(g, min_probability, [&](const Candidate& c) {
    mass += c.probability;
    return true;
  });
  return mass;
}

std::vector<Enumerated> enumerate_programs(const Grammar& g,
                                           double min_probability) {
  std::vector<Enumerated> out;
  for_each_program(g, min_probability, [&](const Candidate& c) {
    Enumerated e;
    e.program = extract_subtree(*c.program, c.program->root);
    e.probability = c.probability;
    e.serialization = serialize(e.program);
    e.derivation = *c.derivation;
    out.push_back(std::move(e));
    return true;
  });
  std::sort(out.begin(), out.end(), [](const Enumerated& a, const Enumerated& b) {
    if (a.probability != b.probability) return a.probability > b.probability;
    return a.serialization < b.serialization;
  });
  return out;
}

}  // namespace levinforge
