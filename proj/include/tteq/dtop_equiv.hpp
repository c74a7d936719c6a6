#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tteq/mtt.hpp"

namespace tteq {

enum class EquivVerdict { Equivalent, DomainMismatch, OutputMismatch };
std::string to_string(EquivVerdict v);

// Bound c on the height of difference trees: the maximal height of a
// leaf-rule rhs when both transducers are total and free of look-ahead,
// otherwise general_balance_bound.
std::size_t balance_bound(const Mtt& m1, const Mtt& m2);
// 2^(|Q1|+|Q2|) * h, times the number of annotation states when look-ahead
// is present; h is the maximal rhs height with state calls counted as leaves.
std::size_t general_balance_bound(const Mtt& m1, const Mtt& m2);

struct DtopEquivOptions {
  std::size_t state_budget = 200000;
};

struct DtopEquivResult {
  EquivVerdict verdict;
  std::optional<Tree> witness;  // verified input tree when not equivalent
  std::size_t bound = 0;
  std::size_t explored = 0;     // difference states visited
  std::string reason;
};

// Equivalence of DTOPs with optional look-ahead.
DtopEquivResult decide_equiv_dtop(const Mtt& m1, const Mtt& m2, const DtopEquivOptions& opt = {});

// Reduction from intersection emptiness of deterministic top-down tree
// automata, given as partial identity DTOPs over a common alphabet.
// The pair is equivalent iff the intersection is empty.
struct HardInstance {
  Mtt m1, m2;
};
HardInstance gen_hard_instance(const std::vector<Mtt>& automata);

}  // namespace tteq
