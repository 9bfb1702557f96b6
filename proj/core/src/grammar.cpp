#include "levinforge/grammar.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "internal.hpp"

namespace levinforge {

int32_t Grammar::find_nonterminal(std::string_view name) const {
  for (size_t i = 0; i < nonterminals.size(); ++i) {
    if (nonterminals[i].name == name) return static_cast<int32_t>(i);
  }
  return -1;
}

namespace {

// Expansion (preorder) child walk. Hole collection and template matching
// must agree on this order: a, b, c slots first, then a Define's chain
// successor. It matches the serialized left-to-right reading.
void collect_holes(const Program& p, int32_t idx, std::vector<int32_t>& out) {
  const Node& n = p.nodes[idx];
  switch (n.kind) {
    case NodeKind::Hole:
      out.push_back(idx);
      return;
    case NodeKind::IntLit:
    case NodeKind::ParamRef:
    case NodeKind::LocalRef:
    case NodeKind::NilLit:
      return;
    case NodeKind::PrimApp:
    case NodeKind::Apply:
      collect_holes(p, n.a, out);
      collect_holes(p, n.b, out);
      return;
    case NodeKind::If:
      collect_holes(p, n.a, out);
      collect_holes(p, n.b, out);
      collect_holes(p, n.c, out);
      return;
    case NodeKind::Lambda:
      collect_holes(p, n.b, out);
      return;
    case NodeKind::Define:
      collect_holes(p, n.c, out);
      if (n.value >= 0) collect_holes(p, static_cast<int32_t>(n.value), out);
      return;
  }
}

// All nodes reachable from `idx`, preorder, same child order as
// collect_holes.
void collect_reachable(const Program& p, int32_t idx,
                       std::vector<int32_t>& out) {
  const Node& n = p.nodes[idx];
  out.push_back(idx);
  switch (n.kind) {
    case NodeKind::PrimApp:
    case NodeKind::Apply:
      collect_reachable(p, n.a, out);
      collect_reachable(p, n.b, out);
      return;
    case NodeKind::If:
      collect_reachable(p, n.a, out);
      collect_reachable(p, n.b, out);
      collect_reachable(p, n.c, out);
      return;
    case NodeKind::Lambda:
      collect_reachable(p, n.b, out);
      return;
    case NodeKind::Define:
      collect_reachable(p, n.c, out);
      if (n.value >= 0) collect_reachable(p, static_cast<int32_t>(n.value), out);
      return;
    default:
      return;
  }
}

bool same_spelling(const Program& a, int32_t ida, const Program& b,
                   int32_t idb) {
  return a.names[ida] == b.names[idb];
}

// Lockstep walk of a template subtree against a program subtree. Hole nodes
// capture the aligned program node; captures appear in the same preorder as
// collect_holes. Names are compared by spelling, parameters by index.
bool match_template(const Program& t, int32_t tn, const Program& p,
                    int32_t pn,
                    std::vector<std::pair<int32_t, int32_t>>& captures) {
  const Node& a = t.nodes[tn];
  if (a.kind == NodeKind::Hole) {
    captures.emplace_back(tn, pn);
    return true;
  }
  const Node& b = p.nodes[pn];
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::IntLit:
      return a.value == b.value;
    case NodeKind::ParamRef:
      return a.a == b.a;
    case NodeKind::LocalRef:
      return same_spelling(t, a.a, p, b.a);
    case NodeKind::NilLit:
      return true;
    case NodeKind::PrimApp:
      return a.prim == b.prim && match_template(t, a.a, p, b.a, captures) &&
             match_template(t, a.b, p, b.b, captures);
    case NodeKind::Apply:
      return match_template(t, a.a, p, b.a, captures) &&
             match_template(t, a.b, p, b.b, captures);
    case NodeKind::If:
      return match_template(t, a.a, p, b.a, captures) &&
             match_template(t, a.b, p, b.b, captures) &&
             match_template(t, a.c, p, b.c, captures);
    case NodeKind::Lambda:
      return same_spelling(t, a.a, p, b.a) &&
             match_template(t, a.b, p, b.b, captures);
    case NodeKind::Define:
      if (!same_spelling(t, a.a, p, b.a) || !same_spelling(t, a.b, p, b.b)) {
        return false;
      }
      if (!match_template(t, a.c, p, b.c, captures)) return false;
      if ((a.value < 0) != (b.value < 0)) return false;
      return a.value < 0 ||
             match_template(t, static_cast<int32_t>(a.value), p,
                            static_cast<int32_t>(b.value), captures);
    case NodeKind::Hole:
      return false;  // unreachable; handled above
  }
  return false;
}

}  // namespace

namespace internal {

int32_t instantiate_template(Program& out, const Production& pr) {
  const Program& t = pr.tmpl;
  const int32_t base = static_cast<int32_t>(out.nodes.size());
  out.nodes.insert(out.nodes.end(), t.nodes.begin(), t.nodes.end());
  for (size_t i = base; i < out.nodes.size(); ++i) {
    Node& n = out.nodes[i];
    switch (n.kind) {
      case NodeKind::PrimApp:
      case NodeKind::Apply:
        n.a += base;
        n.b += base;
        break;
      case NodeKind::If:
        n.a += base;
        n.b += base;
        n.c += base;
        break;
      case NodeKind::Lambda:
        n.b += base;
        break;
      case NodeKind::Define:
        n.c += base;
        if (n.value >= 0) n.value += base;
        break;
      default:
        break;  // leaves and holes carry no node links
    }
  }
  return base + t.root;
}

}  // namespace internal

void finalize_grammar(Grammar& g) {
  if (g.nonterminals.empty()) throw GrammarError("grammar has no nonterminals");
  if (g.start < 0 || static_cast<size_t>(g.start) >= g.nonterminals.size()) {
    throw GrammarError("start symbol index out of range");
  }
  if (g.depth_cap < 1) throw GrammarError("depth_cap must be >= 1");

  std::vector<std::string> nt_names;
  for (const Nonterminal& nt : g.nonterminals) {
    if (nt.name.empty()) throw GrammarError("nonterminal with empty name");
    if (std::count_if(g.nonterminals.begin(), g.nonterminals.end(),
                      [&](const Nonterminal& o) { return o.name == nt.name; }) !=
        1) {
      throw GrammarError("duplicate nonterminal name: " + nt.name);
    }
    nt_names.push_back(nt.name);
  }

  // Canonical local-name table shared by all templates.
  g.names.clear();
  Program interner;  // only its names table is used
  for (Nonterminal& nt : g.nonterminals) {
    if (nt.productions.empty()) {
      throw GrammarError("nonterminal has no productions: " + nt.name);
    }
    for (Production& pr : nt.productions) {
      Program& t = pr.tmpl;
      if (t.root < 0) throw GrammarError("empty template in " + nt.name);
      std::vector<int32_t> remap(t.names.size());
      for (size_t i = 0; i < t.names.size(); ++i) {
        remap[i] = intern_name(interner, t.names[i]);
      }
      for (Node& n : t.nodes) {
        switch (n.kind) {
          case NodeKind::LocalRef:
            n.a = remap[n.a];
            break;
          case NodeKind::Lambda:
            n.a = remap[n.a];
            break;
          case NodeKind::Define:
            n.a = remap[n.a];
            n.b = remap[n.b];
            break;
          default:
            break;
        }
      }
    }
  }
  g.names = interner.names;

  for (Nonterminal& nt : g.nonterminals) {
    double sum = 0.0;
    std::set<std::string> seen;
    for (Production& pr : nt.productions) {
      pr.tmpl.names = g.names;
      pr.tmpl.params = g.params;
      if (pr.probability <= 0.0) {
        throw GrammarError("non-positive production probability in " + nt.name);
      }
      if (pr.corpus_count < 0.0) {
        throw GrammarError("negative corpus count in " + nt.name);
      }
      sum += pr.probability;
      pr.holes.clear();
      collect_holes(pr.tmpl, pr.tmpl.root, pr.holes);
      for (int32_t h : pr.holes) {
        int32_t target = pr.tmpl.nodes[h].a;
        if (target < 0 ||
            static_cast<size_t>(target) >= g.nonterminals.size()) {
          throw GrammarError("template hole references unknown nonterminal in " +
                             nt.name);
        }
      }
      if (!free_locals(pr.tmpl, pr.tmpl.root).empty()) {
        throw GrammarError("template is not closed in " + nt.name + ": " +
                           serialize(pr.tmpl, nt_names));
      }
      pr.serialization = serialize(pr.tmpl, nt_names);
      if (!seen.insert(pr.serialization).second) {
        throw GrammarError("duplicate template in " + nt.name + ": " +
                           pr.serialization);
      }
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw GrammarError("production probabilities of " + nt.name +
                         " sum to " + std::to_string(sum));
    }
  }

  // Productivity fixpoint: every nonterminal must derive a finite program.
  std::vector<bool> productive(g.nonterminals.size(), false);
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t i = 0; i < g.nonterminals.size(); ++i) {
      if (productive[i]) continue;
      for (const Production& pr : g.nonterminals[i].productions) {
        bool all = true;
        for (int32_t h : pr.holes) {
          if (!productive[pr.tmpl.nodes[h].a]) {
            all = false;
            break;
          }
        }
        if (all) {
          productive[i] = true;
          changed = true;
          break;
        }
      }
    }
  }
  for (size_t i = 0; i < g.nonterminals.size(); ++i) {
    if (!productive[i]) {
      throw GrammarError("unproductive nonterminal: " + g.nonterminals[i].name);
    }
  }
}

namespace {

struct VitEntry {
  bool computed = false;
  bool in_progress = false;
  bool valid = false;
  double prob = 0.0;
  int32_t depth = 0;
  Derivation seq;
};

// a strictly before b in the canonical order (higher probability first,
// then lexicographically smaller production-index sequence).
bool derivation_before(double pa, const Derivation& a, double pb,
                       const Derivation& b) {
  if (pa != pb) return pa > pb;
  size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    if (a[i].production != b[i].production) {
      return a[i].production < b[i].production;
    }
  }
  return a.size() < b.size();
}

class Viterbi {
 public:
  Viterbi(const Grammar& g, const Program& p)
      : g_(g), p_(p), nts_(g.nonterminals.size()),
        memo_(p.nodes.size() * g.nonterminals.size()) {}

  const VitEntry& best(int32_t node, int32_t nt) {
    VitEntry& e = memo_[static_cast<size_t>(node) * nts_ + nt];
    if (e.computed) return e;
    if (e.in_progress) return invalid_;
    e.in_progress = true;
    std::vector<std::pair<int32_t, int32_t>> captures;
    const Nonterminal& sym = g_.nonterminals[nt];
    for (size_t pi = 0; pi < sym.productions.size(); ++pi) {
      const Production& pr = sym.productions[pi];
      captures.clear();
      if (!match_template(pr.tmpl, pr.tmpl.root, p_, node, captures)) continue;
      double prob = pr.probability;
      int32_t child_depth = 0;
      Derivation seq;
      seq.push_back({nt, static_cast<int32_t>(pi)});
      bool ok = true;
      for (const auto& [hole, sub_node] : captures) {
        const VitEntry& sub = best(sub_node, pr.tmpl.nodes[hole].a);
        if (!sub.valid) {
          ok = false;
          break;
        }
        prob *= sub.prob;
        child_depth = std::max(child_depth, sub.depth);
        seq.insert(seq.end(), sub.seq.begin(), sub.seq.end());
      }
      if (!ok) continue;
      if (!e.valid || derivation_before(prob, seq, e.prob, e.seq)) {
        e.valid = true;
        e.prob = prob;
        e.depth = 1 + child_depth;
        e.seq = std::move(seq);
      }
    }
    e.in_progress = false;
    e.computed = true;
    return e;
  }

 private:
  const Grammar& g_;
  const Program& p_;
  size_t nts_;
  std::vector<VitEntry> memo_;
  VitEntry invalid_;
};

}  // namespace

std::optional<Derivation> canonical_derivation(const Grammar& g,
                                               const Program& program) {
  if (program.root < 0) return std::nullopt;
  Viterbi v(g, program);
  const VitEntry& e = v.best(program.root, g.start);
  if (!e.valid || e.depth > g.depth_cap) return std::nullopt;
  return e.seq;
}

double derivation_probability(const Grammar& g, const Derivation& d) {
  double prob = 1.0;
  for (const DerivStep& s : d) {
    if (s.nonterminal < 0 ||
        static_cast<size_t>(s.nonterminal) >= g.nonterminals.size()) {
      throw InvalidDerivation("nonterminal index out of range");
    }
    const Nonterminal& nt = g.nonterminals[s.nonterminal];
    if (s.production < 0 ||
        static_cast<size_t>(s.production) >= nt.productions.size()) {
      throw InvalidDerivation("production index out of range for " + nt.name);
    }
    prob *= nt.productions[s.production].probability;
  }
  return prob;
}

double program_probability(const Grammar& g, const Program& program) {
  std::optional<Derivation> d = canonical_derivation(g, program);
  if (!d) return 0.0;
  return derivation_probability(g, *d);
}

Program assemble(const Grammar& g, const Derivation& d) {
  if (d.empty()) throw InvalidDerivation("empty derivation");
  Program out;
  out.params = g.params;
  out.names = g.names;
  size_t cursor = 0;

  // Recursive expansion; returns the subtree root in `out`.
  auto expand = [&](auto&& self, int32_t nt_index) -> int32_t {
    if (cursor >= d.size()) {
      throw InvalidDerivation("derivation ends before expansion is complete");
    }
    const DerivStep s = d[cursor++];
    if (s.nonterminal != nt_index) {
      throw InvalidDerivation("derivation expands the wrong nonterminal");
    }
    if (nt_index < 0 ||
        static_cast<size_t>(nt_index) >= g.nonterminals.size()) {
      throw InvalidDerivation("nonterminal index out of range");
    }
    const Nonterminal& nt = g.nonterminals[nt_index];
    if (s.production < 0 ||
        static_cast<size_t>(s.production) >= nt.productions.size()) {
      throw InvalidDerivation("production index out of range for " + nt.name);
    }
    const Production& pr = nt.productions[s.production];
    const int32_t base = static_cast<int32_t>(out.nodes.size());
    const int32_t root = internal::instantiate_template(out, pr);
    for (int32_t h : pr.holes) {
      const int32_t slot = base + h;
      const int32_t target = pr.tmpl.nodes[h].a;
      const int32_t child = self(self, target);
      out.nodes[slot] = out.nodes[child];
    }
    return root;
  };

  out.root = expand(expand, g.start);
  if (cursor != d.size()) {
    throw InvalidDerivation("derivation has unused trailing choices");
  }
  return out;
}

int32_t derivation_depth(const Grammar& g, const Derivation& d) {
  if (d.empty()) throw InvalidDerivation("empty derivation");
  size_t cursor = 0;
  auto walk = [&](auto&& self, int32_t nt_index) -> int32_t {
    if (cursor >= d.size()) {
      throw InvalidDerivation("derivation ends before expansion is complete");
    }
    const DerivStep s = d[cursor++];
    if (s.nonterminal != nt_index) {
      throw InvalidDerivation("derivation expands the wrong nonterminal");
    }
    const Nonterminal& nt = g.nonterminals[nt_index];
    if (s.production < 0 ||
        static_cast<size_t>(s.production) >= nt.productions.size()) {
      throw InvalidDerivation("production index out of range for " + nt.name);
    }
    const Production& pr = nt.productions[s.production];
    int32_t child_depth = 0;
    for (int32_t h : pr.holes) {
      child_depth = std::max(child_depth, self(self, pr.tmpl.nodes[h].a));
    }
    return 1 + child_depth;
  };
  int32_t depth = walk(walk, g.start);
  if (cursor != d.size()) {
    throw InvalidDerivation("derivation has unused trailing choices");
  }
  return depth;
}

SampleResult sample(const Grammar& g, uint64_t seed) {
  std::mt19937_64 rng(internal::splitmix64(seed));
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Derivation deriv;
    bool ok = true;
    auto draw = [&](auto&& self, int32_t nt_index, int32_t depth) -> void {
      if (!ok) return;
      if (depth > g.depth_cap) {
        ok = false;
        return;
      }
      const Nonterminal& nt = g.nonterminals[nt_index];
      const double u = internal::unit_double(rng());
      double cum = 0.0;
      int32_t chosen = static_cast<int32_t>(nt.productions.size()) - 1;
      for (size_t pi = 0; pi < nt.productions.size(); ++pi) {
        cum += nt.productions[pi].probability;
        if (u < cum) {
          chosen = static_cast<int32_t>(pi);
          break;
        }
      }
      deriv.push_back({nt_index, chosen});
      const Production& pr = nt.productions[chosen];
      for (int32_t h : pr.holes) {
        self(self, pr.tmpl.nodes[h].a, depth + 1);
        if (!ok) return;
      }
    };
    draw(draw, g.start, 1);
    if (!ok) continue;
    Program program = assemble(g, deriv);
    std::optional<Derivation> canon = canonical_derivation(g, program);
    if (!canon) continue;  // canonical form deeper than the cap; redraw
    SampleResult out;
    out.probability = derivation_probability(g, *canon);
    out.program = std::move(program);
    out.derivation = std::move(*canon);
    return out;
  }
  throw DepthExceeded("sampling failed to fit depth_cap in 1000 attempts");
}

UpdateResult update_from_solution(const Grammar& g, const Derivation& d,
                                  double alpha) {
  if (alpha <= 0.0) throw GrammarError("alpha must be positive");
  derivation_depth(g, d);  // validates the derivation replays against g

  UpdateResult out;
  out.grammar = g;
  for (const DerivStep& s : d) {
    out.grammar.nonterminals[s.nonterminal]
        .productions[s.production]
        .corpus_count += 1.0;
  }
  out.update_steps = static_cast<int64_t>(d.size());
  for (Nonterminal& nt : out.grammar.nonterminals) {
    double total = 0.0;
    for (const Production& pr : nt.productions) total += pr.corpus_count;
    const double k = static_cast<double>(nt.productions.size());
    for (Production& pr : nt.productions) {
      pr.probability = (pr.corpus_count + alpha) / (total + alpha * k);
      out.update_steps += 1;
    }
  }
  return out;
}

MiningResult mine_idioms(std::span<const Program> solutions,
                         int32_t min_support, int32_t max_size) {
  if (min_support < 2) throw GrammarError("min_support must be >= 2");
  if (max_size < 2) throw GrammarError("max_size must be >= 2");

  struct Info {
    Program fragment;
    int32_t size = 0;
    std::vector<int32_t> solution_indexes;
  };
  std::map<std::string, Info> table;
  MiningResult out;

  for (size_t si = 0; si < solutions.size(); ++si) {
    const Program& sol = solutions[si];
    if (sol.root < 0) continue;
    std::vector<int32_t> order;
    collect_reachable(sol, sol.root, order);
    std::set<std::string> seen_here;
    for (int32_t node : order) {
      out.steps += 1;
      if (sol.nodes[node].kind == NodeKind::Define) continue;  // expressions only
      const int32_t size = subtree_size(sol, node);
      if (size < 2 || size > max_size) continue;
      out.steps += size;
      if (!free_locals(sol, node).empty()) continue;
      std::string ser = serialize_node(sol, node);
      if (!seen_here.insert(ser).second) continue;
      Info& info = table[ser];
      if (info.solution_indexes.empty()) {
        info.fragment = extract_subtree(sol, node);
        info.size = size;
      }
      info.solution_indexes.push_back(static_cast<int32_t>(si));
    }
  }

  for (auto& [ser, info] : table) {
    if (static_cast<int32_t>(info.solution_indexes.size()) < min_support) {
      continue;
    }
    IdiomCandidate c;
    c.fragment = std::move(info.fragment);
    c.serialization = ser;
    c.support = static_cast<int32_t>(info.solution_indexes.size());
    c.size = info.size;
    c.solution_indexes = std::move(info.solution_indexes);
    out.idioms.push_back(std::move(c));
  }
  std::sort(out.idioms.begin(), out.idioms.end(),
            [](const IdiomCandidate& a, const IdiomCandidate& b) {
              if (a.support != b.support) return a.support > b.support;
              if (a.size != b.size) return a.size > b.size;
              return a.serialization < b.serialization;
            });
  return out;
}

InstallResult install_idioms(const Grammar& g,
                             std::span<const IdiomCandidate> idioms,
                             double idiom_mass) {
  if (!(idiom_mass > 0.0 && idiom_mass < 1.0)) {
    throw GrammarError("idiom_mass must be in (0, 1)");
  }
  InstallResult out;
  out.grammar = g;

  Nonterminal& target = out.grammar.nonterminals[g.start];
  std::set<std::string> existing;
  for (const Production& pr : target.productions) {
    existing.insert(pr.serialization);
  }

  std::vector<const IdiomCandidate*> fresh;
  int64_t support_sum = 0;
  for (const IdiomCandidate& c : idioms) {
    if (existing.count(c.serialization)) continue;
    if (!free_locals(c.fragment, c.fragment.root).empty()) {
      throw GrammarError("idiom fragment is not closed: " + c.serialization);
    }
    existing.insert(c.serialization);
    fresh.push_back(&c);
    support_sum += c.support;
  }
  if (fresh.empty()) return out;  // nothing new; grammar unchanged

  for (Production& pr : target.productions) {
    pr.probability *= 1.0 - idiom_mass;
    out.steps += 1;
  }
  for (const IdiomCandidate* c : fresh) {
    Production pr;
    pr.tmpl = c->fragment;
    pr.probability =
        idiom_mass * static_cast<double>(c->support) / support_sum;
    pr.is_idiom = true;
    pr.origin = c->origin;
    target.productions.push_back(std::move(pr));
    out.steps += 1;
    out.installed += 1;
  }
  finalize_grammar(out.grammar);
  return out;
}

}  // namespace levinforge
