#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tteq/automata.hpp"
#include "tteq/tree.hpp"

namespace tteq {

// A rule q(σ(x1..xk), y1..ym) -> rhs, optionally guarded by the look-ahead
// states <p1..pk> of the children. An absent guard matches every child state.
struct MttRule {
  std::string state;
  std::string symbol;
  std::optional<std::vector<State>> lookahead;
  Tree rhs;
};

struct Diagnostic {
  std::string rule;  // rendered rule key, empty for global problems
  Path path;         // node inside the rhs
  std::string message;
  std::string to_string() const;
};

// Deterministic macro tree transducer with optional regular look-ahead.
// States of rank 1 make it a DTOP. A node of a right-hand side is a state
// call iff its label is a state name; its first child must be some xi.
class Mtt {
 public:
  Mtt() = default;
  Mtt(RankedAlphabet input, RankedAlphabet output);

  // Declares a state with `params` parameters (rank params+1).
  void add_state(const std::string& name, std::size_t params = 0);
  void set_initial(const std::string& name);
  void set_lookahead(Dbta la);
  void clear_lookahead() { lookahead_.reset(); }
  // Stores the rule; duplicates are kept so that validate() can report them.
  void add_rule(const std::string& state, const std::string& symbol, Tree rhs,
                std::optional<std::vector<State>> lookahead = std::nullopt);

  const RankedAlphabet& input() const { return input_; }
  const RankedAlphabet& output() const { return output_; }
  const RankedAlphabet& states() const { return states_; }
  const std::string& initial() const { return initial_; }
  bool has_lookahead() const { return lookahead_.has_value(); }
  const Dbta& lookahead() const { return *lookahead_; }
  const std::vector<MttRule>& rules() const { return rules_; }

  bool is_state(std::string_view name) const { return states_.contains(name); }
  std::size_t params(std::string_view state) const { return states_.rank_of(state) - 1; }
  std::size_t max_params() const;
  // Dense numbering of states in name order.
  std::size_t state_index(std::string_view state) const;
  const std::string& state_name(std::size_t index) const { return state_names_.at(index); }
  std::size_t num_states() const { return state_names_.size(); }

  // The rule applicable to q on σ with children in look-ahead states
  // `children` (an entry is nullopt when the child's run is stuck).
  const MttRule* find_rule(std::string_view state, std::string_view symbol,
                           std::span<const std::optional<State>> children) const;
  // All rules of (q, σ) in insertion order.
  std::vector<const MttRule*> rules_for(std::string_view state, std::string_view symbol) const;

  bool is_dtop() const;
  bool is_monadic() const { return input_.is_monadic() && output_.is_monadic(); }
  // Exactly one rule per (q, σ, reachable look-ahead tuple), for every state.
  bool is_total() const;
  // Largest height of a right-hand side.
  std::size_t max_rhs_height() const;

 private:
  void reindex();

  RankedAlphabet input_, output_, states_;
  std::vector<std::string> state_names_;
  std::string initial_;
  std::optional<Dbta> lookahead_;
  std::vector<MttRule> rules_;
  std::map<std::pair<std::string, std::string>, std::vector<std::size_t>, std::less<>> index_;
};

std::string rule_key(const Mtt& m, const MttRule& r);

// Structural checks; empty iff the transducer is well formed and deterministic.
std::vector<Diagnostic> validate(const Mtt& m);

struct EvalOptions {
  // Maximal nesting of rule applications before a ResourceError.
  std::size_t max_depth = 20000;
};

// M(s); nullopt when undefined. Throws AlphabetError for inputs not over Σ.
std::optional<Tree> eval(const Mtt& m, const Tree& s, const EvalOptions& opt = {});
// M_q(s) as a tree over Δ ∪ {y1..ym}.
std::optional<Tree> eval_state(const Mtt& m, const std::string& q, const Tree& s, const EvalOptions& opt = {});
// Look-ahead states of every subtree (nullopt when stuck), keyed by node identity.
std::unordered_map<const void*, std::optional<State>> lookahead_run(const Mtt& m, const Tree& s);

// M on s[u <- x]: pending calls q(x, t1..tm) remain at the hole. Look-ahead
// is computed on the full tree s. nullopt when some evaluated call is undefined.
std::optional<Tree> eval_partial(const Mtt& m, const Tree& s, const Path& u, const EvalOptions& opt = {});

// Size and height of a partial output; hole leaves are not counted while
// pending-call nodes are.
TreeMetrics partial_metrics(const Tree& t);

struct Balance {
  std::uint64_t h_balance;
  std::uint64_t s_balance;
};
// Absolute height and size differences of the two partial outputs.
// Throws InvalidArgument when either partial output is undefined.
Balance balance(const Mtt& m1, const Mtt& m2, const Tree& s, const Path& u, const EvalOptions& opt = {});

// Simultaneous replacement of leaves y1..ym by `args` (no side condition).
Tree substitute_params(const Tree& t, std::span<const Tree> args);

// Deterministic bottom-up tree transducer: σ(q1(x1),..,qk(xk)) -> q(rhs)
// with rhs over Δ ∪ {x1..xk}.
struct ButtRule {
  std::string symbol;
  std::vector<State> children;
  State target;
  Tree rhs;
};

class Butt {
 public:
  Butt() = default;
  Butt(RankedAlphabet input, RankedAlphabet output) : input_(std::move(input)), output_(std::move(output)) {}

  State add_state(std::string name);
  void set_final(State q, bool final = true) { finals_.at(q) = final; }
  void add_rule(const std::string& symbol, std::vector<State> children, State target, Tree rhs);

  const RankedAlphabet& input() const { return input_; }
  const RankedAlphabet& output() const { return output_; }
  std::size_t num_states() const { return names_.size(); }
  const std::string& state_name(State q) const { return names_.at(q); }
  std::optional<State> find_state(std::string_view name) const;
  bool is_final(State q) const { return finals_.at(q); }
  const std::vector<ButtRule>& rules() const { return rules_; }
  bool is_deterministic() const;

 private:
  RankedAlphabet input_, output_;
  std::vector<std::string> names_;
  std::vector<bool> finals_;
  std::vector<ButtRule> rules_;
};

std::vector<Diagnostic> validate(const Butt& b);
// Output at a final root state; nullopt when the run is stuck or not final.
std::optional<Tree> eval(const Butt& b, const Tree& s);

}  // namespace tteq
