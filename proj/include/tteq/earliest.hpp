#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tteq/mtt.hpp"

namespace tteq {

// Total DTOP without an initial state; the translation of s is the axiom
// with every call q(x0) replaced by M_q(s).
struct AxiomDtop {
  RankedAlphabet input, output;
  std::vector<std::string> states;
  Tree axiom = Tree::leaf("x0");
  std::map<std::pair<std::string, std::string>, Tree> rules;  // (q, σ) -> rhs

  const Tree& rhs(const std::string& q, const std::string& sigma) const { return rules.at({q, sigma}); }
  std::size_t num_rules() const { return rules.size(); }
  // Rules as text, one per line, in the order of `states` and then σ.
  std::string to_string() const;
  friend bool operator==(const AxiomDtop&, const AxiomDtop&);
};

// Wraps a total DTOP with axiom q0(x0).
AxiomDtop with_axiom(const Mtt& m);
// Back to an initial-state DTOP; the axiom must be a single call.
Mtt to_mtt(const AxiomDtop& a);
std::optional<Tree> eval(const AxiomDtop& a, const Tree& s);

// No state has a single possible root symbol over all inputs.
bool is_earliest(const AxiomDtop& a);

// Moves output symbols upwards until no state produces a fixed root symbol;
// new states are named <q,j>.
AxiomDtop make_earliest(const Mtt& m);
AxiomDtop make_earliest(AxiomDtop a);
// Merges equivalent states of an earliest transducer (coarsest stable
// partition); one representative per block, unreachable states dropped.
AxiomDtop merge_equivalent_states(const AxiomDtop& a);
// Renames states q0, q1, .. in breadth-first discovery order from the axiom.
AxiomDtop rename_canonically(const AxiomDtop& a);
AxiomDtop canonical(const Mtt& m);

struct TotalEquivResult {
  bool equal;
  std::optional<Tree> witness;  // input with differing outputs when not equal
  AxiomDtop canonical1, canonical2;
};
TotalEquivResult equiv_total_dtop(const Mtt& m1, const Mtt& m2);

}  // namespace tteq
