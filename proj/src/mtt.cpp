#include "tteq/mtt.hpp"

#include <algorithm>
#include <unordered_map>

#include "tteq/error.hpp"

namespace tteq {

std::string Diagnostic::to_string() const {
  std::string out;
  if (!rule.empty()) out += rule + " at " + path.to_string() + ": ";
  return out + message;
}

namespace {

void check_user_alphabet(const RankedAlphabet& a, const char* what) {
  for (const auto& [name, rank] : a.symbols())
    if (is_reserved_name(name))
      throw InvalidArgument(std::string("reserved name '") + name + "' used in the " + what + " alphabet");
}

}  // namespace

// ---------------------------------------------------------------------------
// Mtt

Mtt::Mtt(RankedAlphabet input, RankedAlphabet output) : input_(std::move(input)), output_(std::move(output)) {
  check_user_alphabet(input_, "input");
  check_user_alphabet(output_, "output");
}

void Mtt::add_state(const std::string& name, std::size_t params) {
  if (is_reserved_name(name)) throw InvalidArgument("reserved name '" + name + "' used as a state");
  if (output_.contains(name)) throw InvalidArgument("state '" + name + "' clashes with an output symbol");
  states_.add(name, params + 1);
  reindex();
}

void Mtt::reindex() { state_names_ = states_.names(); }

void Mtt::set_initial(const std::string& name) {
  if (!states_.contains(name)) throw InvalidArgument("unknown initial state '" + name + "'");
  initial_ = name;
}

void Mtt::set_lookahead(Dbta la) {
  if (la.alphabet() != input_) throw AlphabetError("look-ahead automaton must be over the input alphabet");
  lookahead_ = std::move(la);
}

void Mtt::add_rule(const std::string& state, const std::string& symbol, Tree rhs,
                   std::optional<std::vector<State>> lookahead) {
  index_[{state, symbol}].push_back(rules_.size());
  rules_.push_back(MttRule{state, symbol, std::move(lookahead), std::move(rhs)});
}

std::size_t Mtt::max_params() const {
  std::size_t m = 0;
  for (const auto& [n, r] : states_.symbols()) m = std::max(m, r - 1);
  return m;
}

std::size_t Mtt::state_index(std::string_view state) const {
  auto it = std::lower_bound(state_names_.begin(), state_names_.end(), state);
  if (it == state_names_.end() || *it != state) throw InvalidArgument("unknown state '" + std::string(state) + "'");
  return static_cast<std::size_t>(it - state_names_.begin());
}

std::vector<const MttRule*> Mtt::rules_for(std::string_view state, std::string_view symbol) const {
  std::vector<const MttRule*> out;
  auto it = index_.find(std::pair<std::string, std::string>(state, symbol));
  if (it == index_.end()) return out;
  for (auto i : it->second) out.push_back(&rules_[i]);
  return out;
}

namespace {

bool guard_matches(const MttRule& r, std::span<const std::optional<State>> children) {
  if (!r.lookahead) return true;
  if (r.lookahead->size() != children.size()) return false;
  for (std::size_t i = 0; i < children.size(); ++i)
    if (!children[i] || *children[i] != (*r.lookahead)[i]) return false;
  return true;
}

}  // namespace

const MttRule* Mtt::find_rule(std::string_view state, std::string_view symbol,
                              std::span<const std::optional<State>> children) const {
  auto it = index_.find(std::pair<std::string, std::string>(state, symbol));
  if (it == index_.end()) return nullptr;
  for (auto i : it->second)
    if (guard_matches(rules_[i], children)) return &rules_[i];
  return nullptr;
}

bool Mtt::is_dtop() const {
  return std::all_of(states_.symbols().begin(), states_.symbols().end(), [](const auto& e) { return e.second == 1; });
}

bool Mtt::is_total() const {
  std::vector<State> reachable;
  if (lookahead_) {
    auto w = min_height_witnesses(*lookahead_);
    for (State p = 0; p < w.size(); ++p)
      if (w[p]) reachable.push_back(p);
  } else {
    reachable.push_back(0);
  }
  for (const auto& q : state_names_) {
    for (const auto& [symbol, rank] : input_.symbols()) {
      auto rs = rules_for(q, symbol);
      if (!lookahead_) {
        if (rs.size() != 1) return false;
        continue;
      }
      std::vector<std::size_t> idx(rank, 0);
      std::vector<std::optional<State>> tuple(rank);
      while (true) {
        for (std::size_t i = 0; i < rank; ++i) tuple[i] = reachable.empty() ? std::nullopt : std::optional(reachable[idx[i]]);
        if (reachable.empty() && rank > 0) break;
        std::size_t count = 0;
        for (const MttRule* r : rs) count += guard_matches(*r, tuple) ? 1 : 0;
        if (count != 1) return false;
        std::size_t pos = 0;
        while (pos < rank && ++idx[pos] == reachable.size()) idx[pos++] = 0;
        if (pos == rank) break;
      }
    }
  }
  return true;
}

std::size_t Mtt::max_rhs_height() const {
  std::size_t h = 0;
  for (const auto& r : rules_) h = std::max(h, r.rhs.height());
  return h;
}

std::string rule_key(const Mtt& m, const MttRule& r) {
  std::string out = r.state + "(" + r.symbol;
  auto k = m.input().rank(r.symbol).value_or(0);
  if (k > 0) {
    out += "(";
    for (std::size_t i = 1; i <= k; ++i) out += (i > 1 ? "," : "") + input_var(i);
    out += ")";
  }
  for (std::size_t j = 1; m.is_state(r.state) && j <= m.params(r.state); ++j) out += "," + param_var(j);
  out += ")";
  if (r.lookahead) {
    out += " <";
    for (std::size_t i = 0; i < r.lookahead->size(); ++i) {
      State p = (*r.lookahead)[i];
      bool named = m.has_lookahead() && p < m.lookahead().num_states();
      out += (i ? "," : "") + (named ? m.lookahead().state_name(p) : std::to_string(p));
    }
    out += ">";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void check_rhs(const Mtt& m, const Tree& t, const Path& here, std::size_t k, std::size_t params, const std::string& key,
               std::vector<Diagnostic>& out) {
  const std::string& l = t.label();
  auto add = [&](std::string msg) { out.push_back({key, here, std::move(msg)}); };
  if (m.is_state(l)) {
    if (t.arity() != m.states().rank_of(l)) {
      add("call of state '" + l + "' has " + std::to_string(t.arity()) + " arguments, expected " +
          std::to_string(m.states().rank_of(l)));
    }
    if (t.arity() == 0 || !t.child(0).is_leaf() || !is_input_var(t.child(0).label())) {
      add("first argument of state call '" + l + "' is not an input variable");
    } else {
      auto i = variable_index(t.child(0).label(), 'x').value();
      if (i == 0 || i > k) add("input variable " + t.child(0).label() + " out of range");
    }
    for (std::size_t c = 1; c < t.arity(); ++c) check_rhs(m, t.child(c), here.child(c + 1), k, params, key, out);
    return;
  }
  if (is_param(l)) {
    if (!t.is_leaf()) add("parameter " + l + " has children");
    if (*variable_index(l, 'y') > params) add("parameter " + l + " out of range");
    return;
  }
  if (is_input_var(l) || is_hole(l)) {
    add("input variable " + l + " outside a state call");
    return;
  }
  auto r = m.output().rank(l);
  if (!r) {
    if (t.arity() > 0 && is_input_var(t.child(0).label()))
      add("call of unknown state '" + l + "'");
    else
      add("symbol '" + l + "' is not an output symbol");
  } else if (*r != t.arity()) {
    add("output symbol '" + l + "' has " + std::to_string(t.arity()) + " children, expected " + std::to_string(*r));
  }
  for (std::size_t c = 0; c < t.arity(); ++c) check_rhs(m, t.child(c), here.child(c + 1), k, params, key, out);
}

}  // namespace

std::vector<Diagnostic> validate(const Mtt& m) {
  std::vector<Diagnostic> out;
  if (m.initial().empty()) out.push_back({"", {}, "no initial state"});
  else if (m.params(m.initial()) != 0) out.push_back({"", {}, "initial state must have rank 1"});
  std::map<std::string, std::size_t> seen;
  for (const auto& r : m.rules()) {
    std::string key = rule_key(m, r);
    if (!m.is_state(r.state)) {
      out.push_back({key, {}, "unknown state '" + r.state + "'"});
      continue;
    }
    auto k = m.input().rank(r.symbol);
    if (!k) {
      out.push_back({key, {}, "unknown input symbol '" + r.symbol + "'"});
      continue;
    }
    if (r.lookahead) {
      if (!m.has_lookahead()) {
        out.push_back({key, {}, "look-ahead tuple given but the transducer has no look-ahead"});
      } else if (r.lookahead->size() != *k) {
        out.push_back({key, {}, "look-ahead tuple has the wrong length"});
      } else {
        for (State p : *r.lookahead)
          if (p >= m.lookahead().num_states()) out.push_back({key, {}, "look-ahead state out of range"});
      }
    }
    check_rhs(m, r.rhs, Path{}, *k, m.params(r.state), key, out);
    if (++seen[key] == 2) out.push_back({key, {}, "duplicate rule (nondeterminism)"});
  }
  // A guarded and an unguarded rule for the same (q, σ) overlap.
  for (const auto& q : m.states().names()) {
    for (const auto& [symbol, rank] : m.input().symbols()) {
      auto rs = m.rules_for(q, symbol);
      bool any_guard = false, any_free = false;
      for (auto* r : rs) (r->lookahead ? any_guard : any_free) = true;
      if (any_guard && any_free) out.push_back({rule_key(m, *rs.front()), {}, "guarded and unguarded rules overlap"});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

Tree substitute_params(const Tree& t, std::span<const Tree> args) {
  if (args.empty()) return t;
  std::unordered_map<const void*, Tree> memo;
  auto rec = [&](auto&& self, const Tree& n) -> Tree {
    if (n.is_leaf()) {
      if (auto j = variable_index(n.label(), 'y'); j && *j <= args.size()) return args[*j - 1];
      return n;
    }
    auto it = memo.find(n.identity());
    if (it != memo.end()) return it->second;
    std::vector<Tree> kids;
    kids.reserve(n.arity());
    bool changed = false;
    for (const Tree& c : n.children()) {
      kids.push_back(self(self, c));
      changed = changed || kids.back().identity() != c.identity();
    }
    Tree r = changed ? Tree(n.label(), std::move(kids)) : n;
    memo.emplace(n.identity(), r);
    return r;
  };
  return rec(rec, t);
}

namespace {

struct PairHash {
  std::size_t operator()(const std::pair<const void*, std::size_t>& p) const {
    return std::hash<const void*>{}(p.first) * 31 + p.second;
  }
};

class Evaluator {
 public:
  Evaluator(const Mtt& m, const EvalOptions& opt) : m_(m), opt_(opt) {}

  std::optional<State> la(const Tree& node) {
    if (!m_.has_lookahead()) return 0;
    auto it = la_memo_.find(node.identity());
    if (it != la_memo_.end()) return it->second;
    std::vector<State> kids;
    std::optional<State> r;
    bool stuck = false;
    for (const Tree& c : node.children()) {
      auto p = la(c);
      if (!p) stuck = true;
      else kids.push_back(*p);
    }
    if (!stuck) r = m_.lookahead().transition(node.label(), kids);
    la_memo_.emplace(node.identity(), r);
    return r;
  }

  const MttRule* select(std::size_t qi, const Tree& node) {
    std::vector<std::optional<State>> tuple;
    tuple.reserve(node.arity());
    for (const Tree& c : node.children()) tuple.push_back(la(c));
    return m_.find_rule(m_.state_name(qi), node.label(), tuple);
  }

  std::optional<Tree> state_on(std::size_t qi, const Tree& node, std::size_t depth) {
    if (depth > opt_.max_depth) throw ResourceError("evaluation exceeded the depth limit");
    auto key = std::make_pair(node.identity(), qi);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::optional<Tree> result;
    if (const MttRule* r = select(qi, node)) {
      result = instantiate(r->rhs, node, [&](std::size_t q2, std::size_t child) {
        return state_on(q2, node.child(child), depth + 1);
      });
    }
    memo_.emplace(key, result);
    return result;
  }

  std::optional<Tree> partial(std::size_t qi, const Tree& node, const std::vector<std::size_t>& steps, std::size_t pos,
                              std::size_t depth) {
    if (depth > opt_.max_depth) throw ResourceError("evaluation exceeded the depth limit");
    if (pos == steps.size()) {
      std::vector<Tree> kids{Tree::leaf(std::string(kHole))};
      for (std::size_t j = 1; j <= m_.params(m_.state_name(qi)); ++j) kids.push_back(Tree::leaf(param_var(j)));
      return Tree(m_.state_name(qi), std::move(kids));
    }
    auto key = std::make_pair(static_cast<const void*>(nullptr), pos * m_.num_states() + qi);
    auto it = partial_memo_.find(key);
    if (it != partial_memo_.end()) return it->second;
    std::optional<Tree> result;
    if (const MttRule* r = select(qi, node)) {
      result = instantiate(r->rhs, node, [&](std::size_t q2, std::size_t child) {
        if (child + 1 == steps[pos]) return partial(q2, node.child(child), steps, pos + 1, depth + 1);
        return state_on(q2, node.child(child), depth + 1);
      });
    }
    partial_memo_.emplace(key, result);
    return result;
  }

 private:
  template <class Call>
  std::optional<Tree> instantiate(const Tree& rhs, const Tree& node, Call&& call) {
    const std::string& l = rhs.label();
    if (m_.is_state(l)) {
      std::size_t i = *variable_index(rhs.child(0).label(), 'x');
      if (i == 0 || i > node.arity()) throw InvalidArgument("rule uses " + rhs.child(0).label() + " out of range");
      std::vector<Tree> args;
      args.reserve(rhs.arity() - 1);
      for (std::size_t c = 1; c < rhs.arity(); ++c) {
        auto a = instantiate(rhs.child(c), node, call);
        if (!a) return std::nullopt;
        args.push_back(std::move(*a));
      }
      auto base = call(m_.state_index(l), i - 1);
      if (!base) return std::nullopt;
      return substitute_params(*base, args);
    }
    if (rhs.is_leaf()) return rhs;
    std::vector<Tree> kids;
    kids.reserve(rhs.arity());
    for (const Tree& c : rhs.children()) {
      auto k = instantiate(c, node, call);
      if (!k) return std::nullopt;
      kids.push_back(std::move(*k));
    }
    return Tree(l, std::move(kids));
  }

  const Mtt& m_;
  EvalOptions opt_;
  std::unordered_map<const void*, std::optional<State>> la_memo_;
  std::unordered_map<std::pair<const void*, std::size_t>, std::optional<Tree>, PairHash> memo_;
  std::unordered_map<std::pair<const void*, std::size_t>, std::optional<Tree>, PairHash> partial_memo_;
};

}  // namespace

std::optional<Tree> eval_state(const Mtt& m, const std::string& q, const Tree& s, const EvalOptions& opt) {
  check_tree(s, m.input());
  Evaluator ev(m, opt);
  return ev.state_on(m.state_index(q), s, 0);
}

std::optional<Tree> eval(const Mtt& m, const Tree& s, const EvalOptions& opt) {
  if (m.initial().empty()) throw InvalidArgument("transducer has no initial state");
  return eval_state(m, m.initial(), s, opt);
}

std::unordered_map<const void*, std::optional<State>> lookahead_run(const Mtt& m, const Tree& s) {
  check_tree(s, m.input());
  Evaluator ev(m, {});
  std::unordered_map<const void*, std::optional<State>> out;
  auto rec = [&](auto&& self, const Tree& n) -> void {
    out[n.identity()] = ev.la(n);
    for (const Tree& c : n.children()) self(self, c);
  };
  rec(rec, s);
  return out;
}

std::optional<Tree> eval_partial(const Mtt& m, const Tree& s, const Path& u, const EvalOptions& opt) {
  check_tree(s, m.input());
  if (!contains_path(s, u)) throw InvalidArgument("path " + u.to_string() + " is not a node of the input");
  if (m.initial().empty()) throw InvalidArgument("transducer has no initial state");
  Evaluator ev(m, opt);
  return ev.partial(m.state_index(m.initial()), s, u.steps(), 0, 0);
}

TreeMetrics partial_metrics(const Tree& t) {
  std::unordered_map<const void*, TreeMetrics> memo;
  auto rec = [&](auto&& self, const Tree& n) -> TreeMetrics {
    if (n.is_leaf()) return is_hole(n.label()) ? TreeMetrics{0, 0} : TreeMetrics{1, 1};
    auto it = memo.find(n.identity());
    if (it != memo.end()) return it->second;
    TreeMetrics r{1, 0};
    for (const Tree& c : n.children()) {
      auto cm = self(self, c);
      r.size = r.size > UINT64_MAX - cm.size ? UINT64_MAX : r.size + cm.size;
      r.height = std::max(r.height, cm.height);
    }
    r.height += 1;
    memo.emplace(n.identity(), r);
    return r;
  };
  return rec(rec, t);
}

Balance balance(const Mtt& m1, const Mtt& m2, const Tree& s, const Path& u, const EvalOptions& opt) {
  auto t1 = eval_partial(m1, s, u, opt);
  auto t2 = eval_partial(m2, s, u, opt);
  if (!t1 || !t2) throw InvalidArgument("partial output is undefined on the given input");
  auto a = partial_metrics(*t1), b = partial_metrics(*t2);
  auto diff = [](std::uint64_t x, std::uint64_t y) { return x > y ? x - y : y - x; };
  return {diff(a.height, b.height), diff(a.size, b.size)};
}

// ---------------------------------------------------------------------------
// Butt

State Butt::add_state(std::string name) {
  if (find_state(name)) throw InvalidArgument("duplicate state '" + name + "'");
  names_.push_back(std::move(name));
  finals_.push_back(false);
  return names_.size() - 1;
}

std::optional<State> Butt::find_state(std::string_view name) const {
  for (State q = 0; q < names_.size(); ++q)
    if (names_[q] == name) return q;
  return std::nullopt;
}

void Butt::add_rule(const std::string& symbol, std::vector<State> children, State target, Tree rhs) {
  rules_.push_back(ButtRule{symbol, std::move(children), target, std::move(rhs)});
}

bool Butt::is_deterministic() const {
  std::map<std::pair<std::string, std::vector<State>>, int> seen;
  for (const auto& r : rules_)
    if (++seen[{r.symbol, r.children}] > 1) return false;
  return true;
}

std::vector<Diagnostic> validate(const Butt& b) {
  std::vector<Diagnostic> out;
  std::map<std::pair<std::string, std::vector<State>>, int> seen;
  for (const auto& r : b.rules()) {
    std::string key = r.symbol + "(";
    for (std::size_t i = 0; i < r.children.size(); ++i)
      key += (i ? "," : "") + (r.children[i] < b.num_states() ? b.state_name(r.children[i]) : "?");
    key += ")";
    auto k = b.input().rank(r.symbol);
    if (!k) {
      out.push_back({key, {}, "unknown input symbol '" + r.symbol + "'"});
      continue;
    }
    if (*k != r.children.size()) out.push_back({key, {}, "wrong number of child states"});
    for (State c : r.children)
      if (c >= b.num_states()) out.push_back({key, {}, "child state out of range"});
    if (r.target >= b.num_states()) out.push_back({key, {}, "target state out of range"});
    for (const Path& p : nodes(r.rhs)) {
      const Tree& n = subtree_at(r.rhs, p);
      if (auto i = variable_index(n.label(), 'x')) {
        if (!n.is_leaf() || *i == 0 || *i > *k) out.push_back({key, p, "invalid variable " + n.label()});
      } else if (b.output().rank(n.label()) != std::optional<std::size_t>(n.arity())) {
        out.push_back({key, p, "symbol '" + n.label() + "' does not match the output alphabet"});
      }
    }
    if (++seen[{r.symbol, r.children}] == 2) out.push_back({key, {}, "duplicate rule (nondeterminism)"});
  }
  return out;
}

std::optional<Tree> eval(const Butt& b, const Tree& s) {
  check_tree(s, b.input());
  std::map<std::pair<std::string, std::vector<State>>, const ButtRule*> table;
  for (const auto& r : b.rules()) table.emplace(std::make_pair(r.symbol, r.children), &r);
  auto rec = [&](auto&& self, const Tree& t) -> std::optional<std::pair<State, Tree>> {
    std::vector<State> qs;
    std::map<std::string, Tree, std::less<>> bind;
    for (std::size_t i = 0; i < t.arity(); ++i) {
      auto sub = self(self, t.child(i));
      if (!sub) return std::nullopt;
      qs.push_back(sub->first);
      bind.emplace(input_var(i + 1), std::move(sub->second));
    }
    auto it = table.find({t.label(), qs});
    if (it == table.end()) return std::nullopt;
    return std::make_pair(it->second->target, substitute_leaves(it->second->rhs, bind));
  };
  auto r = rec(rec, s);
  if (!r || !b.is_final(r->first)) return std::nullopt;
  return r->second;
}

}  // namespace tteq
