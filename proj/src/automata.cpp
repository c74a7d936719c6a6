#include "tteq/automata.hpp"

#include <algorithm>
#include <unordered_set>

namespace tteq {

// ---------------------------------------------------------------------------
// Dbta

State Dbta::add_state(std::string name) {
  State id = names_.size();
  if (name.empty()) name = "s" + std::to_string(id);
  names_.push_back(std::move(name));
  finals_.push_back(false);
  return id;
}

void Dbta::set_transition(const std::string& symbol, std::vector<State> children, State target) {
  auto rank = alphabet_.rank(symbol);
  if (!rank) throw AlphabetError("symbol '" + symbol + "' is not in the automaton alphabet");
  if (*rank != children.size()) throw InvalidArgument("transition for '" + symbol + "' has the wrong arity");
  if (target >= num_states()) throw InvalidArgument("transition target out of range");
  for (State c : children)
    if (c >= num_states()) throw InvalidArgument("transition source out of range");
  transitions_[symbol][std::move(children)] = target;
}

void Dbta::set_final(State q, bool final) { finals_.at(q) = final; }

std::optional<State> Dbta::find_state(std::string_view name) const {
  for (State q = 0; q < names_.size(); ++q)
    if (names_[q] == name) return q;
  return std::nullopt;
}

std::vector<State> Dbta::finals() const {
  std::vector<State> out;
  for (State q = 0; q < finals_.size(); ++q)
    if (finals_[q]) out.push_back(q);
  return out;
}

std::optional<State> Dbta::transition(std::string_view symbol, std::span<const State> children) const {
  auto it = transitions_.find(symbol);
  if (it == transitions_.end()) return std::nullopt;
  auto jt = it->second.find(std::vector<State>(children.begin(), children.end()));
  if (jt == it->second.end()) return std::nullopt;
  return jt->second;
}

std::size_t Dbta::num_transitions() const {
  std::size_t n = 0;
  for (const auto& [s, m] : transitions_) n += m.size();
  return n;
}

namespace {

std::size_t power(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && r > std::numeric_limits<std::size_t>::max() / base) return std::numeric_limits<std::size_t>::max();
    r *= base;
  }
  return r;
}

}  // namespace

bool Dbta::is_complete() const {
  for (const auto& [symbol, rank] : alphabet_.symbols()) {
    auto it = transitions_.find(symbol);
    std::size_t have = it == transitions_.end() ? 0 : it->second.size();
    if (have != power(num_states(), rank)) return false;
  }
  return true;
}

std::optional<State> Dbta::run(const Tree& t) const {
  auto rank = alphabet_.rank(t.label());
  if (!rank || *rank != t.arity())
    throw AlphabetError("symbol '" + t.label() + "' does not match the automaton alphabet");
  std::vector<State> kids;
  kids.reserve(t.arity());
  bool stuck = false;
  for (const Tree& c : t.children()) {
    auto r = run(c);
    if (!r) stuck = true;
    else kids.push_back(*r);
  }
  if (stuck) return std::nullopt;
  return transition(t.label(), kids);
}

bool Dbta::accepts(const Tree& t) const {
  auto r = run(t);
  return r && is_final(*r);
}

// ---------------------------------------------------------------------------
// Closure constructions

namespace {

using OptPair = std::pair<std::optional<State>, std::optional<State>>;

struct OptPairHash {
  std::size_t operator()(const OptPair& p) const {
    std::size_t a = p.first ? *p.first + 1 : 0;
    std::size_t b = p.second ? *p.second + 1 : 0;
    return a * 0x9e3779b97f4a7c15ULL ^ (b + 0x7f4a7c15ULL);
  }
};

void require_same_alphabet(const Dbta& a, const Dbta& b) {
  if (a.alphabet() != b.alphabet())
    throw AlphabetError("automata alphabets differ: {" + a.alphabet().to_string() + "} vs {" +
                        b.alphabet().to_string() + "}");
}

}  // namespace

Dbta product(const Dbta& a, const Dbta& b,
             const std::function<bool(std::optional<State>, std::optional<State>)>& final) {
  RankedAlphabet sigma = a.alphabet().merged(b.alphabet());
  auto step = [&](const std::string& symbol, std::span<const OptPair* const> kids) -> std::optional<OptPair> {
    std::vector<State> ka, kb;
    bool ok_a = a.alphabet().contains(symbol), ok_b = b.alphabet().contains(symbol);
    for (const OptPair* k : kids) {
      if (k->first) ka.push_back(*k->first);
      else ok_a = false;
      if (k->second) kb.push_back(*k->second);
      else ok_b = false;
    }
    std::optional<State> ra = ok_a ? a.transition(symbol, ka) : std::nullopt;
    std::optional<State> rb = ok_b ? b.transition(symbol, kb) : std::nullopt;
    if (!ra && !rb) return std::nullopt;
    return OptPair{ra, rb};
  };
  auto ex = explore<OptPair, OptPairHash>(sigma, step);
  for (State q = 0; q < ex.states.size(); ++q) ex.automaton.set_final(q, final(ex.states[q].first, ex.states[q].second));
  return std::move(ex.automaton);
}

Dbta intersect(const Dbta& a, const Dbta& b) {
  require_same_alphabet(a, b);
  Dbta out = product(a, b, [&](auto p, auto q) { return p && q && a.is_final(*p) && b.is_final(*q); });
  return trim(out);
}

Dbta unite(const Dbta& a, const Dbta& b) {
  require_same_alphabet(a, b);
  return product(a, b, [&](auto p, auto q) { return (p && a.is_final(*p)) || (q && b.is_final(*q)); });
}

Dbta complete(const Dbta& a) {
  if (a.is_complete()) return a;
  Dbta out(a.alphabet());
  for (State q = 0; q < a.num_states(); ++q) {
    out.add_state(a.state_name(q));
    out.set_final(q, a.is_final(q));
  }
  std::string sink_name = "sink";
  while (a.find_state(sink_name)) sink_name += "'";
  State sink = out.add_state(sink_name);
  std::size_t n = out.num_states();
  for (const auto& [symbol, rank] : a.alphabet().symbols()) {
    std::vector<State> tuple(rank, 0);
    while (true) {
      auto t = a.transition(symbol, tuple);
      out.set_transition(symbol, tuple, t ? *t : sink);
      std::size_t pos = 0;
      while (pos < rank && ++tuple[pos] == n) tuple[pos++] = 0;
      if (pos == rank) break;
    }
  }
  return out;
}

Dbta complement(const Dbta& a) {
  Dbta out = complete(a);
  for (State q = 0; q < out.num_states(); ++q) out.set_final(q, !out.is_final(q));
  return out;
}

Dbta trim(const Dbta& a) {
  auto w = min_height_witnesses(a);
  std::vector<std::optional<State>> map(a.num_states());
  Dbta out(a.alphabet());
  for (State q = 0; q < a.num_states(); ++q) {
    if (!w[q]) continue;
    map[q] = out.add_state(a.state_name(q));
    out.set_final(*map[q], a.is_final(q));
  }
  for (const auto& [symbol, table] : a.transitions()) {
    for (const auto& [tuple, target] : table) {
      std::vector<State> t2;
      bool ok = map[target].has_value();
      for (State s : tuple) {
        if (!map[s]) ok = false;
        else t2.push_back(*map[s]);
      }
      if (ok) out.set_transition(symbol, std::move(t2), *map[target]);
    }
  }
  return out;
}

Dbta all_trees(const RankedAlphabet& alphabet) {
  Dbta out(alphabet);
  State q = out.add_state("all");
  out.set_final(q);
  for (const auto& [symbol, rank] : alphabet.symbols()) out.set_transition(symbol, std::vector<State>(rank, q), q);
  return out;
}

Dbta single_tree(const RankedAlphabet& alphabet, const Tree& t) {
  check_tree(t, alphabet);
  Dbta out(alphabet);
  std::unordered_map<Tree, State, TreeHash> ids;
  std::function<State(const Tree&)> visit = [&](const Tree& n) -> State {
    auto it = ids.find(n);
    if (it != ids.end()) return it->second;
    std::vector<State> kids;
    for (const Tree& c : n.children()) kids.push_back(visit(c));
    State q = out.add_state();
    out.set_transition(n.label(), kids, q);
    ids.emplace(n, q);
    return q;
  };
  out.set_final(visit(t));
  return out;
}

// ---------------------------------------------------------------------------
// Emptiness and witnesses

namespace {

struct WitnessSearch {
  std::vector<std::optional<Tree>> witness;
  std::vector<State> order;  // states in discovery order
};

WitnessSearch search_witnesses(const Dbta& a) {
  WitnessSearch ws;
  ws.witness.assign(a.num_states(), std::nullopt);
  std::vector<std::size_t> height(a.num_states(), 0);
  for (std::size_t h = 1;; ++h) {
    std::vector<std::pair<State, Tree>> found;
    std::vector<bool> claimed(a.num_states(), false);
    for (const auto& [symbol, table] : a.transitions()) {
      for (const auto& [tuple, target] : table) {
        if (ws.witness[target] || claimed[target]) continue;
        bool ok = true, reaches = tuple.empty() && h == 1;
        for (State s : tuple) {
          if (!ws.witness[s]) {
            ok = false;
            break;
          }
          reaches = reaches || height[s] == h - 1;
        }
        if (!ok || !reaches) continue;
        std::vector<Tree> kids;
        for (State s : tuple) kids.push_back(*ws.witness[s]);
        found.emplace_back(target, Tree(symbol, std::move(kids)));
        claimed[target] = true;
      }
    }
    if (found.empty()) break;
    for (auto& [q, t] : found) {
      ws.witness[q] = std::move(t);
      height[q] = h;
      ws.order.push_back(q);
    }
  }
  return ws;
}

}  // namespace

std::vector<std::optional<Tree>> min_height_witnesses(const Dbta& a) { return search_witnesses(a).witness; }

std::optional<Tree> find_accepted(const Dbta& a) {
  auto ws = search_witnesses(a);
  for (State q : ws.order)
    if (a.is_final(q)) return ws.witness[q];
  return std::nullopt;
}

bool is_empty(const Dbta& a) { return !find_accepted(a).has_value(); }

std::optional<Tree> find_separator(const Dbta& a, const Dbta& b) {
  require_same_alphabet(a, b);
  auto fa = [&](std::optional<State> p) { return p && a.is_final(*p); };
  auto fb = [&](std::optional<State> q) { return q && b.is_final(*q); };
  return find_accepted(product(a, b, [&](auto p, auto q) { return fa(p) != fb(q); }));
}

bool equivalent(const Dbta& a, const Dbta& b) { return !find_separator(a, b).has_value(); }

// ---------------------------------------------------------------------------
// Dfa

Dfa::Dfa(std::vector<std::string> letters) : letters_(std::move(letters)) {
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    if (!letter_index_.emplace(letters_[i], i).second)
      throw InvalidArgument("duplicate letter '" + letters_[i] + "'");
  }
}

State Dfa::add_state(std::string name) {
  State id = names_.size();
  if (name.empty()) name = "r" + std::to_string(id);
  names_.push_back(std::move(name));
  finals_.push_back(false);
  delta_.emplace_back(letters_.size());
  return id;
}

void Dfa::set_transition(State from, const std::string& letter, State to) {
  auto it = letter_index_.find(letter);
  if (it == letter_index_.end()) throw AlphabetError("unknown letter '" + letter + "'");
  if (to >= num_states()) throw InvalidArgument("transition target out of range");
  delta_.at(from)[it->second] = to;
}

void Dfa::set_final(State q, bool final) { finals_.at(q) = final; }

std::optional<State> Dfa::next(State q, std::string_view letter) const {
  auto it = letter_index_.find(letter);
  if (it == letter_index_.end()) throw AlphabetError("unknown letter '" + std::string(letter) + "'");
  return delta_.at(q)[it->second];
}

bool Dfa::is_complete() const {
  for (const auto& row : delta_)
    for (const auto& t : row)
      if (!t) return false;
  return true;
}

std::optional<State> Dfa::run(std::span<const std::string> word) const {
  if (names_.empty()) return std::nullopt;
  std::optional<State> q = initial_;
  for (const auto& letter : word) {
    q = next(*q, letter);
    if (!q) return std::nullopt;
  }
  return q;
}

bool Dfa::accepts(std::span<const std::string> word) const {
  auto q = run(word);
  return q && is_final(*q);
}

std::vector<bool> Dfa::coreachable() const {
  std::vector<bool> co(finals_.begin(), finals_.end());
  bool changed = true;
  while (changed) {
    changed = false;
    for (State q = 0; q < num_states(); ++q) {
      if (co[q]) continue;
      for (const auto& t : delta_[q]) {
        if (t && co[*t]) {
          co[q] = true;
          changed = true;
          break;
        }
      }
    }
  }
  return co;
}

Dfa monadic_to_dfa(const Dbta& a, std::optional<std::string> leaf) {
  const auto& sigma = a.alphabet();
  if (!sigma.is_monadic()) throw InvalidArgument("monadic_to_dfa requires a monadic alphabet");
  if (!leaf) {
    auto leaves = sigma.of_rank(0);
    if (leaves.size() != 1) throw InvalidArgument("monadic_to_dfa needs the leaf symbol to be specified");
    leaf = leaves.front();
  } else if (sigma.rank(*leaf) != std::optional<std::size_t>(0)) {
    throw InvalidArgument("'" + *leaf + "' is not a leaf symbol");
  }
  auto letters = sigma.of_rank(1);
  std::optional<State> leaf_state = a.transition(*leaf, {});

  // A DFA state is the set of Dbta states from which the remaining suffix
  // leads into a final state.
  using Set = std::vector<bool>;
  struct SetHash {
    std::size_t operator()(const Set& s) const { return std::hash<Set>{}(s); }
  };
  Dfa out(letters);
  std::unordered_map<Set, State, SetHash> ids;
  std::vector<Set> sets;
  auto intern = [&](Set s) -> State {
    auto it = ids.find(s);
    if (it != ids.end()) return it->second;
    State id = out.add_state();
    out.set_final(id, leaf_state && s[*leaf_state]);
    ids.emplace(s, id);
    sets.push_back(std::move(s));
    return id;
  };
  Set init(a.num_states(), false);
  for (State q = 0; q < a.num_states(); ++q) init[q] = a.is_final(q);
  out.set_initial(intern(std::move(init)));
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (const auto& letter : letters) {
      Set next(a.num_states(), false);
      for (State p = 0; p < a.num_states(); ++p) {
        State kid[1] = {p};
        auto t = a.transition(letter, kid);
        next[p] = t && sets[i][*t];
      }
      State j = intern(std::move(next));
      out.set_transition(static_cast<State>(i), letter, j);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Enumeration

std::vector<Tree> enumerate_trees(const RankedAlphabet& alphabet, std::size_t max_height, std::size_t limit) {
  std::vector<Tree> all;
  std::vector<std::size_t> level_start;  // index where each height begins
  for (std::size_t h = 1; h <= max_height; ++h) {
    std::size_t lower_end = all.size();
    std::size_t prev_start = level_start.empty() ? 0 : level_start.back();
    level_start.push_back(all.size());
    for (const auto& [symbol, rank] : alphabet.symbols()) {
      if (rank == 0) {
        if (h == 1) all.emplace_back(symbol);
        continue;
      }
      if (h == 1 || lower_end == 0) continue;
      std::vector<std::size_t> idx(rank, 0);
      while (true) {
        bool reaches = false;
        for (auto i : idx) reaches = reaches || i >= prev_start;
        if (reaches) {
          if (all.size() >= limit) throw ResourceError("tree enumeration exceeded its limit");
          std::vector<Tree> kids;
          kids.reserve(rank);
          for (auto i : idx) kids.push_back(all[i]);
          all.emplace_back(symbol, std::move(kids));
        }
        std::size_t pos = rank;
        while (pos > 0) {
          --pos;
          if (++idx[pos] < lower_end) break;
          idx[pos] = 0;
          if (pos == 0) {
            pos = rank + 1;
            break;
          }
        }
        if (pos == rank + 1) break;
      }
    }
    if (all.size() == lower_end) break;
  }
  return all;
}

}  // namespace tteq
