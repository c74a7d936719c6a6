#pragma once

#include <string>

#include "tteq/automata.hpp"
#include "tteq/mtt.hpp"

namespace tteq {

// Two DTOPs without look-ahead over the annotated alphabet with symbols
// <σ,p1..pk,q1..qk>, and the automaton E of correctly annotated trees.
struct LookaheadElimination {
  Mtt n1, n2;
  Dbta e;
  bool annotated = false;  // false when neither input had look-ahead
  Dbta la1, la2;           // completed look-ahead automata used for annotation
};

LookaheadElimination eliminate_lookahead_pair(const Mtt& m1, const Mtt& m2);

// The unique correct annotation of s (identity when no annotation is used).
Tree annotate(const LookaheadElimination& el, const Tree& s);
// Removes annotations: <σ,...> becomes σ.
Tree erase_annotation(const Tree& t);
std::string base_symbol(const std::string& annotated);

// Single-state DTOP with look-ahead simulating a deterministic BUTT; when B
// has non-final states, a separate root state only fires on final runs.
Mtt from_bottom_up(const Butt& b);

}  // namespace tteq
