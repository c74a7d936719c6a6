#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tteq/error.hpp"
#include "tteq/tree.hpp"

namespace tteq {

using State = std::size_t;

// Deterministic bottom-up tree automaton. The transition function may be
// partial; a missing transition means the run is stuck.
class Dbta {
 public:
  using TransitionMap = std::map<std::string, std::map<std::vector<State>, State>, std::less<>>;

  Dbta() = default;
  explicit Dbta(RankedAlphabet alphabet) : alphabet_(std::move(alphabet)) {}

  State add_state(std::string name = {});
  void set_transition(const std::string& symbol, std::vector<State> children, State target);
  void set_final(State q, bool final = true);

  const RankedAlphabet& alphabet() const { return alphabet_; }
  std::size_t num_states() const { return names_.size(); }
  const std::string& state_name(State q) const { return names_.at(q); }
  std::optional<State> find_state(std::string_view name) const;
  bool is_final(State q) const { return finals_.at(q); }
  std::vector<State> finals() const;
  const TransitionMap& transitions() const { return transitions_; }
  std::optional<State> transition(std::string_view symbol, std::span<const State> children) const;
  std::size_t num_transitions() const;

  // Every symbol has a transition for every tuple of states.
  bool is_complete() const;
  // Returns the state reached on `t`, or nullopt when stuck. Throws
  // AlphabetError when `t` uses symbols outside the alphabet.
  std::optional<State> run(const Tree& t) const;
  bool accepts(const Tree& t) const;

 private:
  RankedAlphabet alphabet_;
  std::vector<std::string> names_;
  std::vector<bool> finals_;
  TransitionMap transitions_;
};

// Hash for vectors of integral values, for use as exploration state keys.
struct VectorHash {
  template <class T>
  std::size_t operator()(const std::vector<T>& v) const {
    std::size_t h = v.size();
    for (const auto& x : v) h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

// Reachable-state construction of a Dbta whose states are values of type S.
// `step(symbol, children)` returns the successor state or nullopt.
template <class S>
struct Exploration {
  Dbta automaton;
  std::vector<S> states;
};

template <class S, class Hash = std::hash<S>, class Step>
Exploration<S> explore(const RankedAlphabet& alphabet, Step&& step,
                       std::size_t state_budget = std::numeric_limits<std::size_t>::max()) {
  Exploration<S> out{Dbta(alphabet), {}};
  std::unordered_map<S, State, Hash> index;
  auto intern = [&](S&& s) -> State {
    auto it = index.find(s);
    if (it != index.end()) return it->second;
    if (out.states.size() >= state_budget) throw ResourceError("automaton construction exceeded the state budget");
    State id = out.automaton.add_state();
    index.emplace(s, id);
    out.states.push_back(std::move(s));
    return id;
  };

  std::size_t done = 0;
  bool first = true;
  while (true) {
    std::size_t n = out.states.size();
    if (!first && n == done) break;
    for (const auto& [symbol, rank] : alphabet.symbols()) {
      if (rank == 0) {
        if (!first) continue;
        std::vector<const S*> none;
        if (auto r = step(symbol, std::span<const S* const>(none))) {
          State t = intern(std::move(*r));
          out.automaton.set_transition(symbol, {}, t);
        }
        continue;
      }
      if (n == 0) continue;
      std::vector<State> tuple(rank, 0);
      while (true) {
        bool fresh = false;
        for (State s : tuple) fresh = fresh || s >= done;
        if (fresh) {
          std::vector<const S*> kids;
          kids.reserve(rank);
          // `out.states` may grow during step; copy pointers after taking indices.
          for (State s : tuple) kids.push_back(&out.states[s]);
          auto r = step(symbol, std::span<const S* const>(kids));
          if (r) {
            State t = intern(std::move(*r));
            out.automaton.set_transition(symbol, tuple, t);
          }
        }
        std::size_t pos = 0;
        while (pos < rank && ++tuple[pos] == n) tuple[pos++] = 0;
        if (pos == rank) break;
      }
    }
    done = n;
    first = false;
  }
  return out;
}

// Product restricted to reachable pairs; a run of either side may be stuck
// (represented by nullopt) as long as the other is not. `final` decides
// acceptance of a pair.
Dbta product(const Dbta& a, const Dbta& b,
             const std::function<bool(std::optional<State>, std::optional<State>)>& final);
Dbta intersect(const Dbta& a, const Dbta& b);
Dbta unite(const Dbta& a, const Dbta& b);
// Adds a sink state where transitions are missing.
Dbta complete(const Dbta& a);
Dbta complement(const Dbta& a);
// Keeps only states reachable by some tree.
Dbta trim(const Dbta& a);
// One state, every transition defined, accepting.
Dbta all_trees(const RankedAlphabet& alphabet);
// Accepts exactly the given tree.
Dbta single_tree(const RankedAlphabet& alphabet, const Tree& t);

// For every state, a minimal-height tree reaching it (nullopt if none).
// Breadth-first by height; ties are broken by symbol order and then by the
// lexicographic order of child-state tuples.
std::vector<std::optional<Tree>> min_height_witnesses(const Dbta& a);
// Minimal-height accepted tree, or nullopt when the language is empty.
std::optional<Tree> find_accepted(const Dbta& a);
bool is_empty(const Dbta& a);
// A tree in the symmetric difference, or nullopt when the languages are equal.
std::optional<Tree> find_separator(const Dbta& a, const Dbta& b);
bool equivalent(const Dbta& a, const Dbta& b);

// Deterministic finite automaton over a letter alphabet.
class Dfa {
 public:
  Dfa() = default;
  explicit Dfa(std::vector<std::string> letters);

  State add_state(std::string name = {});
  void set_initial(State q) { initial_ = q; }
  void set_transition(State from, const std::string& letter, State to);
  void set_final(State q, bool final = true);

  const std::vector<std::string>& letters() const { return letters_; }
  std::size_t num_states() const { return names_.size(); }
  const std::string& state_name(State q) const { return names_.at(q); }
  State initial() const { return initial_; }
  bool is_final(State q) const { return finals_.at(q); }
  std::optional<State> next(State q, std::string_view letter) const;
  bool is_complete() const;

  std::optional<State> run(std::span<const std::string> word) const;
  bool accepts(std::span<const std::string> word) const;
  // States from which a final state is reachable.
  std::vector<bool> coreachable() const;

 private:
  std::vector<std::string> letters_;
  std::map<std::string, std::size_t, std::less<>> letter_index_;
  std::vector<std::string> names_;
  std::vector<bool> finals_;
  std::vector<std::vector<std::optional<State>>> delta_;
  State initial_ = 0;
};

// Converts a Dbta over rank-1 symbols and a single leaf into a complete Dfa
// reading the unary labels from the root downwards. `leaf` defaults to the
// unique rank-0 symbol.
Dfa monadic_to_dfa(const Dbta& a, std::optional<std::string> leaf = std::nullopt);

// Enumerates all trees over `alphabet` with height <= max_height, grouped
// by height in increasing order. Intended for small alphabets.
std::vector<Tree> enumerate_trees(const RankedAlphabet& alphabet, std::size_t max_height,
                                  std::size_t limit = 2000000);

}  // namespace tteq
