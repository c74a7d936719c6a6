#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tteq/automata.hpp"
#include "tteq/tree.hpp"

namespace tteq {

// One element of a tree-to-string right-hand side: an output letter, or a
// call name(x_child) when child > 0.
struct YItem {
  std::string name;
  std::size_t child = 0;
  bool is_call() const { return child > 0; }
  friend bool operator==(const YItem&, const YItem&) = default;
};

struct YdtRule {
  std::string state;
  std::string symbol;
  std::optional<std::vector<State>> lookahead;
  std::vector<YItem> rhs;
};

// Top-down tree-to-string transducer with optional regular look-ahead.
// Several rules may apply to the same key (used by internal constructions).
class YdtFc {
 public:
  YdtFc() = default;
  YdtFc(RankedAlphabet input, std::vector<std::string> letters);

  void add_state(const std::string& q);
  void set_initial(const std::string& q);
  void set_lookahead(Dbta la);
  void add_rule(YdtRule r);

  const RankedAlphabet& input() const { return input_; }
  const std::vector<std::string>& letters() const { return letters_; }
  const std::vector<std::string>& states() const { return states_; }
  bool is_state(const std::string& q) const { return state_set_.count(q) > 0; }
  const std::string& initial() const { return initial_; }
  bool has_lookahead() const { return lookahead_.has_value(); }
  const Dbta& lookahead() const { return *lookahead_; }
  const std::vector<YdtRule>& rules() const { return rules_; }

  // Rules of (q, σ) whose guard admits the children's look-ahead states.
  std::vector<const YdtRule*> matching(const std::string& q, const std::string& symbol,
                                       std::span<const std::optional<State>> children) const;
  bool is_deterministic() const;
  // No rule calls the same x_i twice.
  bool is_linear() const;
  std::string to_string() const;

 private:
  RankedAlphabet input_;
  std::vector<std::string> letters_;
  std::vector<std::string> states_;
  std::set<std::string> state_set_;
  std::string initial_;
  std::optional<Dbta> lookahead_;
  std::vector<YdtRule> rules_;
  std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> index_;
};

// Structural problems; empty when well formed.
std::vector<std::string> validate(const YdtFc& m);
// Output of a deterministic transducer (first applicable rule), nullopt if undefined.
std::optional<std::vector<std::string>> eval(const YdtFc& m, const Tree& s);
// All outputs of a possibly nondeterministic transducer.
std::set<std::vector<std::string>> eval_all(const YdtFc& m, const Tree& s);
// Trees with at least one output.
Dbta domain_automaton(const YdtFc& m);

struct CopyingBound {
  bool bounded = false;
  std::size_t bound = 0;  // longest state sequence seen
};
// Longest sequence of states processing one input node; gives up once a
// sequence longer than `cutoff` appears.
CopyingBound check_finite_copying(const YdtFc& m, std::size_t cutoff);
// Linear transducer over state sequences whose outputs are permutations of
// the original outputs. Throws InvalidArgument if the cutoff is exceeded.
YdtFc linearize_fc(const YdtFc& m, std::size_t cutoff = 16);

struct Cfg {
  struct Production {
    std::string lhs;
    std::vector<std::string> rhs;
  };
  std::vector<std::string> terminals;
  std::vector<std::string> nonterminals;
  std::string start;
  std::vector<Production> productions;

  bool is_terminal(const std::string& s) const;
  bool is_nonterminal(const std::string& s) const;
  void add_terminal(const std::string& s);
  void add_nonterminal(const std::string& s);
  void add(const std::string& lhs, std::vector<std::string> rhs);
  std::string to_string() const;
};
// Drops unproductive and unreachable nonterminals.
Cfg trim(const Cfg& g);

// Grammar for the outputs of the linear transducer `m` on trees of L(d).
Cfg image_cfg(const YdtFc& m, const Dbta& d);
// Grammar for { a^m sep b^n | s in L(d), M1(s)/m = a, M2(s)/n = b }.
Cfg build_lab(const YdtFc& m1, const YdtFc& m2, const Dbta& d, const std::string& a, const std::string& b,
              const std::string& sep = "#", std::size_t cutoff = 16);

using ParikhVector = std::vector<std::uint64_t>;

struct LinearSet {
  ParikhVector base;
  std::vector<ParikhVector> periods;
  bool contains(const ParikhVector& v) const;
  friend bool operator==(const LinearSet&, const LinearSet&) = default;
};

struct SemilinearSet {
  std::vector<std::string> letters;
  std::vector<LinearSet> sets;
  bool empty() const { return sets.empty(); }
  bool contains(const ParikhVector& v) const;
  std::string to_string() const;
};

SemilinearSet parikh_image(const Cfg& g);
// Some v in s with v[a] = v[b] and v[i] = exact[i] for the constrained i.
std::optional<ParikhVector> equal_count_feasible(const SemilinearSet& s, std::size_t a, std::size_t b,
                                                 const std::map<std::size_t, std::uint64_t>& exact = {});

enum class FcVerdict { Equivalent, NotEquivalent, DomainMismatch };
std::string to_string(FcVerdict v);

struct FcEquivResult {
  FcVerdict verdict;
  std::optional<Tree> witness;  // separator, or an input with differing outputs when one was found
  std::string a, b;             // letters at a common position
  ParikhVector parikh;          // over letters (a, sep, b) of the pair grammar
};

// Appends `marker` to every output by splitting the initial state.
YdtFc with_end_marker(const YdtFc& m, const std::string& marker);

// Deterministic finite-copying transducers, optionally restricted to L(d).
FcEquivResult decide_equiv_fc(const YdtFc& m1, const YdtFc& m2, const std::optional<Dbta>& d = std::nullopt,
                              std::size_t cutoff = 16);

}  // namespace tteq
