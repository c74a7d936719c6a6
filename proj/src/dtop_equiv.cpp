#include "tteq/dtop_equiv.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

#include "tteq/domain.hpp"
#include "tteq/error.hpp"
#include "tteq/lookahead.hpp"

namespace tteq {

std::string to_string(EquivVerdict v) {
  switch (v) {
    case EquivVerdict::Equivalent: return "equivalent";
    case EquivVerdict::DomainMismatch: return "domain mismatch";
    case EquivVerdict::OutputMismatch: return "output mismatch";
  }
  return "?";
}

namespace {

std::size_t saturating_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > SIZE_MAX / 4 / a) return SIZE_MAX / 4;
  return a * b;
}

// Height of a right-hand side with state calls counted as leaves.
std::size_t rhs_height(const Mtt& m, const Tree& t) {
  if (m.is_state(t.label())) return 1;
  std::size_t h = 0;
  for (const Tree& c : t.children()) h = std::max(h, rhs_height(m, c));
  return h + 1;
}

std::size_t max_height(const Mtt& m, bool leaves_only) {
  std::size_t h = 0;
  for (const auto& r : m.rules())
    if (!leaves_only || m.input().rank_of(r.symbol) == 0) h = std::max(h, rhs_height(m, r.rhs));
  return h;
}

}  // namespace

std::size_t general_balance_bound(const Mtt& m1, const Mtt& m2) {
  std::size_t q = m1.num_states() + m2.num_states();
  std::size_t d = q >= 60 ? SIZE_MAX / 4 : (std::size_t{1} << q);
  std::size_t h = std::max(max_height(m1, false), max_height(m2, false));
  std::size_t c = saturating_mul(d, h);
  if (m1.has_lookahead() || m2.has_lookahead())
    c = saturating_mul(c, eliminate_lookahead_pair(m1, m2).e.num_states());
  return c;
}

std::size_t balance_bound(const Mtt& m1, const Mtt& m2) {
  if (!m1.is_dtop() || !m2.is_dtop()) throw InvalidArgument("balance bound requires DTOPs");
  if (!m1.has_lookahead() && !m2.has_lookahead() && m1.is_total() && m2.is_total())
    return std::max(max_height(m1, true), max_height(m2, true));
  return general_balance_bound(m1, m2);
}

namespace {

// Hash-consing of trees so that equal trees share one node.
class Interner {
 public:
  Tree canon(const Tree& t) {
    std::unordered_map<const void*, Tree> memo;
    return rec(t, memo);
  }

 private:
  struct Key {
    std::string label;
    std::vector<const void*> kids;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::size_t h = std::hash<std::string>{}(k.label);
      for (auto p : k.kids) h = h * 1000003u ^ std::hash<const void*>{}(p);
      return h;
    }
  };

  Tree rec(const Tree& t, std::unordered_map<const void*, Tree>& memo) {
    auto it = memo.find(t.identity());
    if (it != memo.end()) return it->second;
    std::vector<Tree> kids;
    Key key{t.label(), {}};
    for (const Tree& c : t.children()) {
      kids.push_back(rec(c, memo));
      key.kids.push_back(kids.back().identity());
    }
    auto jt = table_.find(key);
    if (jt == table_.end()) jt = table_.emplace(std::move(key), Tree(t.label(), std::move(kids))).first;
    memo.emplace(t.identity(), jt->second);
    return jt->second;
  }

  std::unordered_map<Key, Tree, KeyHash> table_;
};

struct Spec {
  std::uint64_t a1 = 0, a2 = 0;
  long r = -1;
  bool operator==(const Spec&) const = default;
};

struct SpecHash {
  std::size_t operator()(const Spec& s) const {
    return std::hash<std::uint64_t>{}(s.a1) * 31 ^ std::hash<std::uint64_t>{}(s.a2) * 7 ^ std::hash<long>{}(s.r);
  }
};

struct Diff {
  std::vector<std::pair<Tree, Tree>> items;  // canonical trees, sorted
  Spec spec;
  bool operator==(const Diff& o) const {
    if (!(spec == o.spec) || items.size() != o.items.size()) return false;
    for (std::size_t i = 0; i < items.size(); ++i)
      if (items[i].first.identity() != o.items[i].first.identity() ||
          items[i].second.identity() != o.items[i].second.identity())
        return false;
    return true;
  }
};

struct DiffHash {
  std::size_t operator()(const Diff& d) const {
    std::size_t h = SpecHash{}(d.spec);
    for (const auto& [l, r] : d.items) h = (h * 1000003u) ^ (l.hash() * 31 + r.hash());
    return h;
  }
};

struct TState {
  std::uint64_t b1, b2;
  long e;
  bool operator==(const TState&) const = default;
};

struct TStateHash {
  std::size_t operator()(const TState& s) const { return SpecHash{}(Spec{s.b1, s.b2, s.e}); }
};

bool is_call(const Tree& t) {
  return t.arity() == 1 && t.child(0).is_leaf() && (is_input_var(t.child(0).label()) || is_hole(t.child(0).label()));
}

std::size_t call_child(const Tree& t) { return *variable_index(t.child(0).label(), 'x'); }

struct Rejection {
  std::string reason;
  std::optional<std::size_t> child;  // child whose alternative filler is tried
  std::optional<Tree> alternative;
};

struct StepResult {
  bool skip = false;
  std::optional<Rejection> reject;
  std::vector<Spec> specs;
  std::vector<std::vector<std::pair<Tree, Tree>>> items;
};

class Checker {
 public:
  Checker(const Mtt& m1, const Mtt& m2, const LookaheadElimination& el, std::size_t bound)
      : m1_(m1), m2_(m2), el_(el), n1_(el.n1), n2_(el.n2), bound_(bound) {
    if (n1_.num_states() > 64 || n2_.num_states() > 64) throw ResourceError("more than 64 states per transducer");
    build_domain_automaton();
  }

  DtopEquivResult run(const DtopEquivOptions& opt) {
    DtopEquivResult res{EquivVerdict::Equivalent, std::nullopt, bound_, 0, ""};
    Diff root;
    root.items.emplace_back(canon_.canon(Tree(n1_.initial(), {Tree::leaf(std::string(kHole))})),
                            canon_.canon(Tree(n2_.initial(), {Tree::leaf(std::string(kHole))})));
    root.spec = Spec{bit1(n1_.initial()), bit2(n2_.initial()), -1};
    std::unordered_map<Diff, std::size_t, DiffHash> index;
    std::vector<Diff> states{root};
    struct Link {
      std::size_t parent;
      std::string symbol;
      std::size_t child;
      std::vector<Spec> specs;
    };
    std::vector<std::optional<Link>> parent{std::nullopt};
    index.emplace(root, 0);
    for (std::size_t cur = 0; cur < states.size(); ++cur) {
      res.explored = cur + 1;
      for (const auto& [symbol, rank] : el_.e.alphabet().symbols()) {
        StepResult st = step(states[cur], symbol);
        if (st.skip) continue;
        if (st.reject) {
          res.verdict = EquivVerdict::OutputMismatch;
          res.reason = st.reject->reason;
          // Candidate witnesses: the rejecting node with fillers, climbed to the root.
          std::vector<Tree> candidates;
          for (int variant = 0; variant < 2; ++variant) {
            if (variant == 1 && !st.reject->alternative) break;
            std::vector<Tree> kids;
            for (std::size_t i = 0; i < st.specs.size(); ++i) {
              if (variant == 1 && st.reject->child == i) kids.push_back(*st.reject->alternative);
              else kids.push_back(*filler(st.specs[i]));
            }
            Tree t(symbol, std::move(kids));
            for (std::size_t d = cur; parent[d]; d = parent[d]->parent) {
              const Link& l = *parent[d];
              std::vector<Tree> ks;
              for (std::size_t i = 0; i < l.specs.size(); ++i) ks.push_back(i == l.child ? t : *filler(l.specs[i]));
              t = Tree(l.symbol, std::move(ks));
            }
            candidates.push_back(std::move(t));
          }
          res.witness = verified_witness(candidates);
          return res;
        }
        for (std::size_t i = 0; i < st.items.size(); ++i) {
          if (st.items[i].empty()) continue;
          Diff d{std::move(st.items[i]), st.specs[i]};
          std::sort(d.items.begin(), d.items.end(), [](const auto& x, const auto& y) {
            if (x.first.hash() != y.first.hash()) return x.first.hash() < y.first.hash();
            if (x.second.hash() != y.second.hash()) return x.second.hash() < y.second.hash();
            return std::less<const void*>{}(x.first.identity(), y.first.identity()) ||
                   (x.first.identity() == y.first.identity() &&
                    std::less<const void*>{}(x.second.identity(), y.second.identity()));
          });
          d.items.erase(std::unique(d.items.begin(), d.items.end(),
                                    [](const auto& x, const auto& y) {
                                      return x.first.identity() == y.first.identity() &&
                                             x.second.identity() == y.second.identity();
                                    }),
                        d.items.end());
          if (index.count(d)) continue;
          if (states.size() >= opt.state_budget) throw ResourceError("difference automaton exceeded the state budget");
          index.emplace(d, states.size());
          states.push_back(d);
          parent.push_back(Link{cur, symbol, i, st.specs});
        }
      }
    }
    return res;
  }

 private:
  std::uint64_t bit1(const std::string& q) const { return std::uint64_t{1} << n1_.state_index(q); }
  std::uint64_t bit2(const std::string& q) const { return std::uint64_t{1} << n2_.state_index(q); }

  static const Tree* rule(const Mtt& n, std::size_t q, const std::string& symbol) {
    auto rs = n.rules_for(n.state_name(q), symbol);
    return rs.empty() ? nullptr : &rs.front()->rhs;
  }

  // Bottom-up automaton over the annotated alphabet recording which states
  // of each transducer are defined, together with the state of E.
  void build_domain_automaton() {
    auto defined = [&](const Mtt& n, const std::string& symbol, std::span<const TState* const> kids, bool first) {
      std::uint64_t bits = 0;
      for (std::size_t q = 0; q < n.num_states(); ++q) {
        const Tree* rhs = rule(n, q, symbol);
        if (!rhs) continue;
        bool ok = true;
        for (const Path& p : nodes(*rhs)) {
          const Tree& t = subtree_at(*rhs, p);
          if (!n.is_state(t.label())) continue;
          std::uint64_t have = first ? kids[call_child(t) - 1]->b1 : kids[call_child(t) - 1]->b2;
          if (!(have >> n.state_index(t.label()) & 1)) ok = false;
        }
        if (ok) bits |= std::uint64_t{1} << q;
      }
      return bits;
    };
    auto step = [&](const std::string& symbol, std::span<const TState* const> kids) -> std::optional<TState> {
      std::vector<State> es;
      for (const TState* k : kids) es.push_back(static_cast<State>(k->e));
      auto e = el_.e.transition(symbol, es);
      if (!e) return std::nullopt;
      return TState{defined(n1_, symbol, kids, true), defined(n2_, symbol, kids, false), static_cast<long>(*e)};
    };
    auto ex = explore<TState, TStateHash>(el_.e.alphabet(), step);
    t_auto_ = std::move(ex.automaton);
    t_states_ = std::move(ex.states);
    auto w = min_height_witnesses(t_auto_);
    for (State s = 0; s < w.size(); ++s) {
      if (!w[s]) continue;
      t_order_.push_back(s);
      t_witness_.emplace(s, *w[s]);
    }
    std::stable_sort(t_order_.begin(), t_order_.end(),
                     [&](State a, State b) { return t_witness_.at(a).height() < t_witness_.at(b).height(); });
  }

  bool matches(const TState& t, const Spec& s) const {
    return (t.b1 & s.a1) == s.a1 && (t.b2 & s.a2) == s.a2 && (s.r < 0 || t.e == s.r);
  }

  const std::optional<Tree>& filler(const Spec& s) {
    auto it = filler_cache_.find(s);
    if (it != filler_cache_.end()) return it->second;
    std::optional<Tree> out;
    for (State q : t_order_) {
      if (matches(t_states_[q], s)) {
        out = t_witness_.at(q);
        break;
      }
    }
    return filler_cache_.emplace(s, std::move(out)).first->second;
  }

  struct Constancy {
    std::optional<Tree> value;       // canonical constant output
    std::optional<Tree> alternative; // an input giving another output
  };

  const Constancy& constancy(int side, std::size_t q, const Spec& s) {
    auto key = std::make_tuple(side, q, s.a1, s.a2, s.r);
    auto it = const_cache_.find(key);
    if (it != const_cache_.end()) return it->second;
    const Mtt& n = side == 1 ? n1_ : n2_;
    const Tree& f = *filler(s);
    auto c = eval_state(n, n.state_name(q), f);
    if (!c) throw InternalError("filler tree outside the domain of a called state");
    Mtt nq = n;
    nq.set_initial(n.state_name(q));
    Dbta inv = inverse_regular(nq, single_tree(n.output(), *c));
    Dbta prod = product(t_auto_, inv, [&](std::optional<State> t, std::optional<State> i) {
      return t && matches(t_states_[*t], s) && !(i && inv.is_final(*i));
    });
    Constancy res;
    if (auto w = find_accepted(prod)) res.alternative = *w;
    else res.value = canon_.canon(*c);
    return const_cache_.emplace(key, std::move(res)).first->second;
  }

  Tree substitute_calls(const Mtt& n, const Tree& t, const std::string& symbol) {
    if (is_call(t)) return *rule(n, n.state_index(t.label()), symbol);
    if (t.is_leaf()) return t;
    std::vector<Tree> kids;
    for (const Tree& c : t.children()) kids.push_back(substitute_calls(n, c, symbol));
    return Tree(t.label(), std::move(kids));
  }

  // Replaces calls on children other than `keep` by their constant values
  // and renames x_keep to the hole.
  std::optional<Tree> localize(int side, const Tree& t, std::size_t keep, const std::vector<Spec>& specs,
                               std::optional<Rejection>& reject) {
    if (is_call(t)) {
      std::size_t i = call_child(t);
      if (i == keep) return Tree(t.label(), {Tree::leaf(std::string(kHole))});
      const Mtt& n = side == 1 ? n1_ : n2_;
      const Constancy& c = constancy(side, n.state_index(t.label()), specs[i - 1]);
      if (!c.value) {
        reject = Rejection{"state " + t.label() + " is not constant on input " + input_var(i), i - 1, c.alternative};
        return std::nullopt;
      }
      return *c.value;
    }
    if (t.is_leaf()) return t;
    std::vector<Tree> kids;
    for (const Tree& c : t.children()) {
      auto k = localize(side, c, keep, specs, reject);
      if (!k) return std::nullopt;
      kids.push_back(std::move(*k));
    }
    return Tree(t.label(), std::move(kids));
  }

  void align(const Tree& a, const Tree& b, StepResult& st) {
    if (st.reject) return;
    bool ca = is_call(a), cb = is_call(b);
    if (!ca && !cb) {
      if (a.label() != b.label() || a.arity() != b.arity()) {
        st.reject = Rejection{"output symbols " + a.label() + " and " + b.label() + " clash", std::nullopt, std::nullopt};
        return;
      }
      for (std::size_t i = 0; i < a.arity(); ++i) align(a.child(i), b.child(i), st);
      return;
    }
    int other_side = ca ? 2 : 1;
    const Tree& call = ca ? a : b;
    const Tree& other = ca ? b : a;
    std::size_t i = call_child(call);
    auto local = localize(other_side, other, i, st.specs, st.reject);
    if (!local) return;
    if (partial_metrics(*local).height > bound_) {
      st.reject = Rejection{"difference tree exceeds height " + std::to_string(bound_), std::nullopt, std::nullopt};
      return;
    }
    Tree c = canon_.canon(Tree(call.label(), {Tree::leaf(std::string(kHole))}));
    Tree o = canon_.canon(*local);
    if (ca) st.items[i - 1].emplace_back(c, o);
    else st.items[i - 1].emplace_back(o, c);
  }

  StepResult step(const Diff& d, const std::string& symbol) {
    StepResult st;
    std::size_t k = el_.e.alphabet().rank_of(symbol);
    auto et = el_.e.transitions().find(symbol);
    if (et == el_.e.transitions().end() || et->second.empty()) {
      st.skip = true;
      return st;
    }
    // Each annotated symbol fixes the E-states of its children.
    const auto& [child_e, target] = *et->second.begin();
    if (d.spec.r >= 0 && static_cast<long>(target) != d.spec.r) {
      st.skip = true;
      return st;
    }
    st.specs.assign(k, Spec{});
    for (std::size_t i = 0; i < k; ++i) st.specs[i].r = static_cast<long>(child_e[i]);
    std::vector<Tree> rhs1(n1_.num_states(), Tree::leaf("_")), rhs2(n2_.num_states(), Tree::leaf("_"));
    auto collect = [&](const Mtt& n, std::uint64_t active, bool first) {
      for (std::size_t q = 0; q < n.num_states(); ++q) {
        if (!(active >> q & 1)) continue;
        const Tree* rhs = rule(n, q, symbol);
        if (!rhs) return false;
        for (const Path& p : nodes(*rhs)) {
          const Tree& t = subtree_at(*rhs, p);
          if (!n.is_state(t.label())) continue;
          auto& target_bits = first ? st.specs[call_child(t) - 1].a1 : st.specs[call_child(t) - 1].a2;
          target_bits |= std::uint64_t{1} << n.state_index(t.label());
        }
      }
      return true;
    };
    if (!collect(n1_, d.spec.a1, true) || !collect(n2_, d.spec.a2, false)) {
      st.skip = true;
      return st;
    }
    for (const Spec& s : st.specs) {
      if (!filler(s)) {
        st.skip = true;
        return st;
      }
    }
    st.items.assign(k, {});
    for (const auto& [l, r] : d.items) {
      align(substitute_calls(n1_, l, symbol), substitute_calls(n2_, r, symbol), st);
      if (st.reject) break;
    }
    return st;
  }

  std::optional<Tree> verified_witness(const std::vector<Tree>& candidates) {
    auto differs = [&](const Tree& s) {
      auto o1 = eval(m1_, s), o2 = eval(m2_, s);
      return o1 && o2 && !(*o1 == *o2);
    };
    for (const Tree& c : candidates) {
      Tree s = el_.annotated ? erase_annotation(c) : c;
      if (differs(s)) return s;
    }
    // Fallback: smallest differing input by exhaustive enumeration.
    Dbta dom = domain_automaton(m1_);
    for (std::size_t h = 1; h <= 64; ++h) {
      std::vector<Tree> trees;
      try {
        trees = enumerate_trees(m1_.input(), h, 200000);
      } catch (const ResourceError&) {
        break;
      }
      for (const Tree& s : trees)
        if (s.height() == h && dom.accepts(s) && differs(s)) return s;
    }
    throw InternalError("difference automaton rejected but no counterexample could be verified");
  }

  const Mtt& m1_;
  const Mtt& m2_;
  const LookaheadElimination& el_;
  const Mtt& n1_;
  const Mtt& n2_;
  std::size_t bound_;
  Interner canon_;
  Dbta t_auto_;
  std::vector<TState> t_states_;
  std::vector<State> t_order_;
  std::unordered_map<State, Tree> t_witness_;
  std::unordered_map<Spec, std::optional<Tree>, SpecHash> filler_cache_;
  std::map<std::tuple<int, std::size_t, std::uint64_t, std::uint64_t, long>, Constancy> const_cache_;
};

}  // namespace

DtopEquivResult decide_equiv_dtop(const Mtt& m1, const Mtt& m2, const DtopEquivOptions& opt) {
  if (!m1.is_dtop() || !m2.is_dtop()) throw InvalidArgument("decide_equiv_dtop requires DTOPs");
  if (m1.input() != m2.input()) throw AlphabetError("transducers have different input alphabets");
  std::size_t bound = balance_bound(m1, m2);
  Dbta d1 = domain_automaton(m1), d2 = domain_automaton(m2);
  if (auto sep = find_separator(d1, d2))
    return {EquivVerdict::DomainMismatch, *sep, bound, 0, "domains differ"};
  LookaheadElimination el = eliminate_lookahead_pair(m1, m2);
  Checker checker(m1, m2, el, bound);
  return checker.run(opt);
}

HardInstance gen_hard_instance(const std::vector<Mtt>& automata) {
  if (automata.empty()) throw InvalidArgument("at least one automaton is required");
  const RankedAlphabet& sigma = automata.front().input();
  std::optional<std::string> unary, leaf;
  for (const auto& [name, rank] : sigma.symbols()) {
    if (rank >= 1 && !unary) unary = name;
    if (rank == 0 && !leaf) leaf = name;
  }
  if (!unary || !leaf) throw InvalidArgument("alphabet needs a symbol of rank >= 1 and a leaf");
  for (const auto& a : automata) {
    if (a.input() != sigma) throw AlphabetError("automata have different alphabets");
    if (!a.is_dtop() || a.has_lookahead()) throw InvalidArgument("automata must be DTOPs without look-ahead");
  }
  std::string delta = "delta";
  while (sigma.contains(delta)) delta += "'";
  RankedAlphabet out = sigma;
  out.add(delta, automata.size());

  Mtt m1(sigma, out);
  std::string q0 = "q0";
  auto prefixed = [](std::size_t i, const std::string& q) { return "a" + std::to_string(i) + "_" + q; };
  m1.add_state(q0);
  m1.set_initial(q0);
  std::vector<Tree> calls;
  for (std::size_t i = 0; i < automata.size(); ++i) {
    const Mtt& a = automata[i];
    for (const auto& q : a.states().names()) m1.add_state(prefixed(i + 1, q));
    for (const auto& r : a.rules()) {
      auto rename = [&](auto&& self, const Tree& t) -> Tree {
        if (a.is_state(t.label())) return Tree(prefixed(i + 1, t.label()), {t.child(0)});
        std::vector<Tree> kids;
        for (const Tree& c : t.children()) kids.push_back(self(self, c));
        return Tree(t.label(), std::move(kids));
      };
      m1.add_rule(prefixed(i + 1, r.state), r.symbol, rename(rename, r.rhs));
    }
    calls.emplace_back(prefixed(i + 1, a.initial()), std::vector<Tree>{Tree::leaf(input_var(1))});
  }
  m1.add_rule(q0, *unary, Tree(delta, calls));
  m1.add_rule(q0, *leaf, Tree::leaf(*leaf));

  Mtt m2(sigma, out);
  m2.add_state("p");
  m2.set_initial("p");
  m2.add_rule("p", *leaf, Tree::leaf(*leaf));
  return {std::move(m1), std::move(m2)};
}

}  // namespace tteq
