#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tteq/automata.hpp"
#include "tteq/mtt.hpp"

namespace tteq {

struct InverseOptions {
  // States with more parameters are rejected (tables have |P|^m entries).
  std::size_t max_params = 4;
  std::size_t state_budget = 1000000;
};

// States of the inverse automaton: the look-ahead state of the input (or -1
// when stuck) and, for every transducer state q with m parameters, a table
// P^m -> P with -1 for undefined entries.
struct InverseState {
  long lookahead;
  std::vector<std::vector<long>> alpha;  // indexed by Mtt::state_index
};

struct InverseResult {
  Dbta automaton;
  std::vector<InverseState> states;
};

// Automaton for the inputs s with M(s) defined and M(s) in L(B). B is
// completed first.
InverseResult inverse_regular_full(const Mtt& m, const Dbta& b, const InverseOptions& opt = {});
Dbta inverse_regular(const Mtt& m, const Dbta& b, const InverseOptions& opt = {});
// dom(M).
Dbta domain_automaton(const Mtt& m, const InverseOptions& opt = {});

// For every automaton state and every transducer state q, the set of
// parameters (bit j-1 for yj) occurring in M_q(s), or nullopt when M_q(s)
// is undefined; exact for every s reaching the state.
struct ParamUsage {
  Dbta automaton;
  std::vector<long> lookahead;  // old look-ahead state per automaton state, -1 if stuck
  std::vector<std::vector<std::optional<std::uint32_t>>> usage;
};

ParamUsage param_usage(const Mtt& m, std::size_t state_budget = 1000000);
// Usage of q on s according to the analysis.
std::optional<std::uint32_t> usage_of(const Mtt& m, const ParamUsage& pu, const std::string& q, const Tree& s);

// Equivalent transducer with look-ahead in which every parameter of every
// state occurs in each of its right-hand sides. Specialized states are named
// <q,yi,..> after the parameters they keep; fully used states keep their name.
// Requires a monadic output alphabet.
Mtt make_nondeleting(const Mtt& m);

// Every rule uses all parameters of its state.
bool is_nondeleting(const Mtt& m);

}  // namespace tteq
