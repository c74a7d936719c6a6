// Brute-force reference implementations used by the tests. Nothing here calls
// the library's evaluators or decision procedures; only data accessors and
// the Tree type are shared.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tteq/automata.hpp"
#include "tteq/mtt.hpp"
#include "tteq/parikh.hpp"
#include "tteq/tree.hpp"

namespace oracle {

using tteq::Dbta;
using tteq::Mtt;
using tteq::RankedAlphabet;
using tteq::State;
using tteq::Tree;
using Word = std::vector<std::string>;

inline std::optional<std::size_t> var_index(const std::string& label, char prefix) {
  if (label.size() < 2 || label[0] != prefix) return std::nullopt;
  std::size_t v = 0;
  for (std::size_t i = 1; i < label.size(); ++i) {
    if (label[i] < '0' || label[i] > '9') return std::nullopt;
    v = v * 10 + static_cast<std::size_t>(label[i] - '0');
  }
  return v == 0 ? std::nullopt : std::optional<std::size_t>(v);
}

// All trees of height <= h, ordered by height.
inline std::vector<Tree> trees_up_to(const RankedAlphabet& a, std::size_t h) {
  std::vector<Tree> all;
  std::size_t prev = 0;  // trees of height < current level
  for (std::size_t level = 1; level <= h; ++level) {
    std::vector<Tree> fresh;
    for (const auto& [sym, rank] : a.symbols()) {
      if (rank == 0) {
        if (level == 1) fresh.emplace_back(sym);
        continue;
      }
      if (level == 1) continue;
      // Tuples over all trees of height < level with at least one of height level-1.
      std::size_t n = all.size();
      std::vector<std::size_t> idx(rank, 0);
      if (n == 0) continue;
      while (true) {
        bool top = false;
        for (std::size_t i : idx) top = top || i >= prev;
        if (top) {
          std::vector<Tree> kids;
          for (std::size_t i : idx) kids.push_back(all[i]);
          fresh.emplace_back(sym, std::move(kids));
        }
        std::size_t p = 0;
        while (p < rank && ++idx[p] == n) idx[p++] = 0;
        if (p == rank) break;
      }
    }
    prev = all.size();
    all.insert(all.end(), fresh.begin(), fresh.end());
  }
  return all;
}

// Look-ahead state by direct table lookup; nullopt when stuck.
inline std::optional<State> run(const Dbta& a, const Tree& t) {
  std::vector<State> kids;
  for (const Tree& c : t.children()) {
    auto q = run(a, c);
    if (!q) return std::nullopt;
    kids.push_back(*q);
  }
  auto it = a.transitions().find(t.label());
  if (it == a.transitions().end()) return std::nullopt;
  auto jt = it->second.find(kids);
  if (jt == it->second.end()) return std::nullopt;
  return jt->second;
}

inline bool accepts(const Dbta& a, const Tree& t) {
  auto q = run(a, t);
  return q && a.is_final(*q);
}

// Guard check shared by the transducer oracles: an absent guard always matches.
inline bool guard_ok(const std::optional<std::vector<State>>& g, const std::optional<Dbta>& la, const Tree& s) {
  if (!g) return true;
  for (std::size_t i = 0; i < s.arity(); ++i) {
    auto p = run(*la, s.child(i));
    if (!p || *p != (*g)[i]) return false;
  }
  return true;
}

// M_q(s, args) by the recursive definition, parameters by value.
inline std::optional<Tree> mtt_state(const Mtt& m, const std::string& q, const Tree& s, const std::vector<Tree>& args) {
  std::optional<Dbta> la;
  if (m.has_lookahead()) la = m.lookahead();
  const tteq::MttRule* rule = nullptr;
  for (const auto& r : m.rules())
    if (r.state == q && r.symbol == s.label() && guard_ok(r.lookahead, la, s)) {
      rule = &r;
      break;
    }
  if (!rule) return std::nullopt;
  auto inst = [&](auto&& self, const Tree& t) -> std::optional<Tree> {
    if (m.is_state(t.label())) {
      auto i = var_index(t.child(0).label(), 'x');
      std::vector<Tree> sub;
      for (std::size_t j = 1; j < t.arity(); ++j) {
        auto v = self(self, t.child(j));
        if (!v) return std::nullopt;
        sub.push_back(*v);
      }
      return mtt_state(m, t.label(), s.child(*i - 1), sub);
    }
    if (auto j = var_index(t.label(), 'y'); j && t.is_leaf()) return args.at(*j - 1);
    std::vector<Tree> kids;
    for (const Tree& c : t.children()) {
      auto v = self(self, c);
      if (!v) return std::nullopt;
      kids.push_back(*v);
    }
    return Tree(t.label(), std::move(kids));
  };
  return inst(inst, rule->rhs);
}

inline std::optional<Tree> mtt_eval(const Mtt& m, const Tree& s) { return mtt_state(m, m.initial(), s, {}); }

inline std::optional<Tree> butt_eval(const tteq::Butt& b, const Tree& s) {
  struct R {
    State q;
    Tree out;
  };
  auto rec = [&](auto&& self, const Tree& t) -> std::optional<R> {
    std::vector<State> qs;
    std::vector<Tree> outs;
    for (const Tree& c : t.children()) {
      auto r = self(self, c);
      if (!r) return std::nullopt;
      qs.push_back(r->q);
      outs.push_back(r->out);
    }
    for (const auto& r : b.rules()) {
      if (r.symbol != t.label() || r.children != qs) continue;
      auto sub = [&](auto&& me, const Tree& x) -> Tree {
        if (auto i = var_index(x.label(), 'x'); i && x.is_leaf()) return outs.at(*i - 1);
        std::vector<Tree> kids;
        for (const Tree& c : x.children()) kids.push_back(me(me, c));
        return Tree(x.label(), std::move(kids));
      };
      return R{r.target, sub(sub, r.rhs)};
    }
    return std::nullopt;
  };
  auto r = rec(rec, s);
  if (!r || !b.is_final(r->q)) return std::nullopt;
  return r->out;
}

inline std::optional<Word> ydt_state(const tteq::YdtFc& m, const std::string& q, const Tree& s) {
  std::optional<Dbta> la;
  if (m.has_lookahead()) la = m.lookahead();
  for (const auto& r : m.rules()) {
    if (r.state != q || r.symbol != s.label() || !guard_ok(r.lookahead, la, s)) continue;
    Word out;
    for (const auto& it : r.rhs) {
      if (it.child == 0) {
        out.push_back(it.name);
        continue;
      }
      auto sub = ydt_state(m, it.name, s.child(it.child - 1));
      if (!sub) return std::nullopt;
      out.insert(out.end(), sub->begin(), sub->end());
    }
    return out;
  }
  return std::nullopt;
}

inline std::optional<Word> ydt_eval(const tteq::YdtFc& m, const Tree& s) { return ydt_state(m, m.initial(), s); }

// All words of L(g) with at most `max_len` terminals (least fixpoint over
// length-capped word sets per nonterminal).
inline std::set<Word> cfg_words(const tteq::Cfg& g, std::size_t max_len) {
  std::map<std::string, std::set<Word>> w;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : g.productions) {
      std::set<Word> acc{{}};
      for (const auto& s : p.rhs) {
        std::set<Word> next;
        if (g.is_terminal(s)) {
          for (auto x : acc)
            if (x.size() < max_len) {
              x.push_back(s);
              next.insert(x);
            }
        } else {
          for (const auto& x : acc)
            for (const auto& y : w[s])
              if (x.size() + y.size() <= max_len) {
                Word z = x;
                z.insert(z.end(), y.begin(), y.end());
                next.insert(std::move(z));
              }
        }
        acc = std::move(next);
        if (acc.empty()) break;
      }
      auto& target = w[p.lhs];
      for (auto& x : acc) changed |= target.insert(x).second;
    }
  }
  return w[g.start];
}

inline tteq::ParikhVector parikh(const Word& w, const std::vector<std::string>& letters) {
  tteq::ParikhVector v(letters.size(), 0);
  for (const auto& x : w) {
    auto it = std::find(letters.begin(), letters.end(), x);
    if (it != letters.end()) ++v[static_cast<std::size_t>(it - letters.begin())];
  }
  return v;
}

// All vectors with entries summing to at most `total`.
inline std::vector<tteq::ParikhVector> vectors_up_to(std::size_t dim, std::uint64_t total) {
  std::vector<tteq::ParikhVector> out;
  tteq::ParikhVector v(dim, 0);
  auto rec = [&](auto&& self, std::size_t i, std::uint64_t left) -> void {
    if (i == dim) {
      out.push_back(v);
      return;
    }
    for (std::uint64_t c = 0; c <= left; ++c) {
      v[i] = c;
      self(self, i + 1, left - c);
    }
    v[i] = 0;
  };
  rec(rec, 0, total);
  return out;
}

// All trees of height <= h as a table of (symbol, child indices); children
// always precede their parents.
struct IndexedTrees {
  std::vector<std::string> symbol;
  std::vector<std::vector<std::size_t>> kids;
  std::vector<std::size_t> height;

  IndexedTrees(const RankedAlphabet& a, std::size_t h) {
    std::size_t prev = 0;
    for (std::size_t level = 1; level <= h; ++level) {
      std::size_t n = symbol.size();
      for (const auto& [sym, rank] : a.symbols()) {
        if (rank == 0) {
          if (level == 1) push(sym, {}, 1);
          continue;
        }
        if (level == 1 || n == 0) continue;
        std::vector<std::size_t> idx(rank, 0);
        while (true) {
          bool top = false;
          for (std::size_t i : idx) top = top || i >= prev;
          if (top) push(sym, idx, level);
          std::size_t p = 0;
          while (p < rank && ++idx[p] == n) idx[p++] = 0;
          if (p == rank) break;
        }
      }
      prev = n;
    }
  }
  std::size_t size() const { return symbol.size(); }
  Tree tree(std::size_t i) const {
    std::vector<Tree> ch;
    for (std::size_t k : kids[i]) ch.push_back(tree(k));
    return Tree(symbol[i], std::move(ch));
  }

 private:
  void push(const std::string& s, std::vector<std::size_t> k, std::size_t h) {
    symbol.push_back(s);
    kids.push_back(std::move(k));
    height.push_back(h);
  }
};

// Outputs of a DTOP (with optional look-ahead) on every indexed tree, as
// 128-bit structural hashes; nullopt when undefined. Fast enough to compare
// transducers on hundreds of thousands of inputs.
class DtopHashes {
 public:
  using Hash = std::pair<std::uint64_t, std::uint64_t>;

  DtopHashes(const Mtt& m, const IndexedTrees& ts) : m_(m), ts_(ts) {
    std::size_t nq = m.num_states();
    std::map<std::string, std::size_t> qi;
    for (std::size_t i = 0; i < nq; ++i) qi[m.state_name(i)] = i;
    std::vector<std::optional<State>> la(ts.size());
    out_.assign(nq, std::vector<std::optional<Hash>>(ts.size()));
    for (std::size_t t = 0; t < ts.size(); ++t) {
      std::vector<std::optional<State>> kid_la;
      for (std::size_t c : ts.kids[t]) kid_la.push_back(la[c]);
      if (m.has_lookahead()) {
        std::vector<State> ks;
        bool stuck = false;
        for (auto& p : kid_la) {
          if (!p) stuck = true;
          else ks.push_back(*p);
        }
        if (!stuck) {
          const auto& tr = m.lookahead().transitions();
          auto it = tr.find(ts.symbol[t]);
          if (it != tr.end()) {
            auto jt = it->second.find(ks);
            if (jt != it->second.end()) la[t] = jt->second;
          }
        }
      }
      for (std::size_t q = 0; q < nq; ++q) {
        const tteq::MttRule* rule = nullptr;
        for (const auto& r : m.rules()) {
          if (r.state != m.state_name(q) || r.symbol != ts.symbol[t]) continue;
          if (r.lookahead) {
            bool ok = true;
            for (std::size_t i = 0; i < kid_la.size(); ++i) ok = ok && kid_la[i] && *kid_la[i] == (*r.lookahead)[i];
            if (!ok) continue;
          }
          rule = &r;
          break;
        }
        if (rule) out_[q][t] = hash_rhs(rule->rhs, t, qi);
      }
    }
    init_ = qi.at(m.initial());
  }

  const std::optional<Hash>& at(std::size_t t) const { return out_[init_][t]; }

 private:
  static std::uint64_t mix(std::uint64_t x) {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    x *= 0xc4ceb9fe1a85ec53ULL;
    x ^= x >> 33;
    return x;
  }
  std::optional<Hash> hash_rhs(const Tree& r, std::size_t t, const std::map<std::string, std::size_t>& qi) const {
    if (m_.is_state(r.label())) {
      std::size_t i = *var_index(r.child(0).label(), 'x');
      return out_[qi.at(r.label())][ts_.kids[t][i - 1]];
    }
    std::uint64_t a = std::hash<std::string>{}(r.label()) + 0x9e3779b97f4a7c15ULL;
    std::uint64_t b = mix(a ^ 0x5bd1e995ULL);
    for (const Tree& c : r.children()) {
      auto h = hash_rhs(c, t, qi);
      if (!h) return std::nullopt;
      a = mix(a * 31 + h->first);
      b = mix(b ^ (h->second + 0x632be59bd9b4e019ULL + (b << 7)));
    }
    return Hash{a, b};
  }

  const Mtt& m_;
  const IndexedTrees& ts_;
  std::vector<std::vector<std::optional<Hash>>> out_;
  std::size_t init_ = 0;
};

enum class Verdict { Equivalent, DomainMismatch, OutputMismatch };

// Three-way comparison of two DTOPs on all indexed trees; the tree index of
// the first (smallest) difference of the reported kind, if any. Differences
// are confirmed on real trees with mtt_eval.
struct BruteResult {
  Verdict verdict = Verdict::Equivalent;
  std::optional<std::size_t> witness;
};

inline BruteResult brute_compare(const Mtt& m1, const Mtt& m2, const IndexedTrees& ts) {
  DtopHashes h1(m1, ts), h2(m2, ts);
  BruteResult r;
  for (std::size_t t = 0; t < ts.size(); ++t)
    if (h1.at(t).has_value() != h2.at(t).has_value()) return {Verdict::DomainMismatch, t};
  for (std::size_t t = 0; t < ts.size(); ++t)
    if (h1.at(t) && *h1.at(t) != *h2.at(t)) {
      Tree s = ts.tree(t);
      if (mtt_eval(m1, s) != mtt_eval(m2, s)) return {Verdict::OutputMismatch, t};
    }
  return r;
}

// ---------------------------------------------------------------------------
// Random instances

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(gen); }
  bool chance(double p) { return std::bernoulli_distribution(p)(gen); }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }
};

// Output tree over `out` of height <= h; leaves may be state calls on x1..xk
// (from `states`) or parameters y1..ym.
inline Tree random_rhs(Rng& r, const RankedAlphabet& out, const std::vector<std::string>& states,
                       const std::vector<std::size_t>& params_of, std::size_t k, std::size_t m, std::size_t h,
                       double call_p = 0.4) {
  auto leaves = out.of_rank(0);
  bool can_call = k > 0 && !states.empty();
  if (h <= 1 || r.chance(0.3)) {
    std::size_t options = leaves.size() + (can_call ? 2 : 0) + m;
    std::size_t c = r.below(options);
    if (c < leaves.size() && !(can_call && r.chance(call_p))) return Tree(leaves[c]);
    if (m > 0 && r.chance(0.5)) return Tree(tteq::param_var(1 + r.below(m)));
    if (!can_call) return Tree(r.pick(leaves));
  }
  if (can_call && r.chance(call_p)) {
    std::size_t qi = r.below(states.size());
    std::vector<Tree> kids{Tree(tteq::input_var(1 + r.below(k)))};
    for (std::size_t j = 0; j < params_of[qi]; ++j)
      kids.push_back(random_rhs(r, out, states, params_of, k, m, h > 1 ? h - 1 : 1, call_p));
    return Tree(states[qi], std::move(kids));
  }
  std::vector<std::string> inner;
  for (const auto& [s, rank] : out.symbols())
    if (rank > 0) inner.push_back(s);
  if (inner.empty() || h <= 1) return Tree(r.pick(leaves));
  const std::string& s = r.pick(inner);
  std::vector<Tree> kids;
  for (std::size_t i = 0; i < out.rank_of(s); ++i)
    kids.push_back(random_rhs(r, out, states, params_of, k, m, h - 1, call_p));
  return Tree(s, std::move(kids));
}

// Random MTT with states of at most `max_params` parameters; total unless
// `missing` > 0 (probability of leaving out a rule).
inline Mtt random_mtt(Rng& r, const RankedAlphabet& in, const RankedAlphabet& out, std::size_t nstates,
                      std::size_t max_params, std::size_t max_h, double missing = 0.0) {
  Mtt m(in, out);
  std::vector<std::string> states;
  std::vector<std::size_t> params;
  for (std::size_t i = 0; i < nstates; ++i) {
    states.push_back("q" + std::to_string(i));
    params.push_back(i == 0 ? 0 : r.below(max_params + 1));
    m.add_state(states.back(), params.back());
  }
  m.set_initial("q0");
  for (std::size_t i = 0; i < nstates; ++i)
    for (const auto& [sym, k] : in.symbols()) {
      if (missing > 0 && r.chance(missing)) continue;
      m.add_rule(states[i], sym, random_rhs(r, out, states, params, k, params[i], 1 + r.below(max_h)));
    }
  return m;
}

inline Dbta random_dbta(Rng& r, const RankedAlphabet& a, std::size_t nstates, double missing = 0.0) {
  Dbta d(a);
  for (std::size_t i = 0; i < nstates; ++i) d.add_state("p" + std::to_string(i));
  for (std::size_t i = 0; i < nstates; ++i) d.set_final(i, r.chance(0.5));
  for (const auto& [sym, k] : a.symbols()) {
    std::vector<State> t(k, 0);
    while (true) {
      if (!(missing > 0 && r.chance(missing))) d.set_transition(sym, t, r.below(nstates));
      std::size_t p = 0;
      while (p < k && ++t[p] == nstates) t[p++] = 0;
      if (p == k) break;
    }
  }
  return d;
}

// Copy of `m` guarded by the look-ahead `la`: every rule on a symbol of rank
// k > 0 is split over all k-tuples of look-ahead states, and some of the
// copies get a fresh right-hand side so that the guard matters.
inline Mtt with_random_guards(Rng& r, const Mtt& m, const Dbta& la, std::size_t max_h) {
  Mtt out(m.input(), m.output());
  std::vector<std::string> states;
  std::vector<std::size_t> params;
  for (std::size_t i = 0; i < m.num_states(); ++i) {
    states.push_back(m.state_name(i));
    params.push_back(m.params(states.back()));
    out.add_state(states.back(), params.back());
  }
  out.set_initial(m.initial());
  out.set_lookahead(la);
  std::size_t n = la.num_states();
  for (const auto& rule : m.rules()) {
    std::size_t k = m.input().rank_of(rule.symbol);
    if (k == 0) {
      out.add_rule(rule.state, rule.symbol, rule.rhs);
      continue;
    }
    std::vector<State> t(k, 0);
    while (true) {
      Tree rhs = r.chance(0.5) ? rule.rhs
                               : random_rhs(r, m.output(), states, params, k, m.params(rule.state), 1 + r.below(max_h));
      out.add_rule(rule.state, rule.symbol, rhs, t);
      std::size_t p = 0;
      while (p < k && ++t[p] == n) t[p++] = 0;
      if (p == k) break;
    }
  }
  return out;
}

inline tteq::Butt random_butt(Rng& r, const RankedAlphabet& in, const RankedAlphabet& out, std::size_t nstates,
                              std::size_t max_h) {
  tteq::Butt b(in, out);
  for (std::size_t i = 0; i < nstates; ++i) b.add_state("b" + std::to_string(i));
  for (std::size_t i = 0; i < nstates; ++i) b.set_final(i, i == 0 || r.chance(0.6));
  for (const auto& [sym, k] : in.symbols()) {
    std::vector<State> t(k, 0);
    while (true) {
      // Variables x1..xk as leaves of the output.
      RankedAlphabet with_vars = out;
      for (std::size_t i = 1; i <= k; ++i) with_vars.add(tteq::input_var(i), 0);
      b.add_rule(sym, t, r.below(nstates), random_rhs(r, with_vars, {}, {}, 0, 0, 1 + r.below(max_h)));
      std::size_t p = 0;
      while (p < k && ++t[p] == nstates) t[p++] = 0;
      if (p == k) break;
    }
  }
  return b;
}

// Deterministic tree-to-string transducer with copying bound <= 2: only the
// initial state may call a child twice, other states call each child at most
// once and never call the initial state.
inline tteq::YdtFc random_fc(Rng& r, const RankedAlphabet& in, const std::vector<std::string>& letters,
                             std::size_t nstates, double missing = 0.0) {
  tteq::YdtFc m(in, letters);
  std::vector<std::string> states;
  for (std::size_t i = 0; i < nstates; ++i) {
    states.push_back("q" + std::to_string(i));
    m.add_state(states.back());
  }
  m.set_initial("q0");
  std::vector<std::string> others(states.begin() + (nstates > 1 ? 1 : 0), states.end());
  for (std::size_t i = 0; i < nstates; ++i)
    for (const auto& [sym, k] : in.symbols()) {
      if (missing > 0 && r.chance(missing)) continue;
      tteq::YdtRule rule{states[i], sym, std::nullopt, {}};
      std::vector<tteq::YItem> calls;
      for (std::size_t c = 1; c <= k; ++c) {
        std::size_t copies = (i == 0 && nstates > 1) ? r.below(3) : (r.chance(0.85) ? 1 : 0);
        for (std::size_t j = 0; j < copies; ++j) calls.push_back({r.pick(nstates == 1 ? states : others), c});
      }
      std::shuffle(calls.begin(), calls.end(), r.gen);
      for (const auto& c : calls) {
        if (r.chance(0.4)) rule.rhs.push_back({r.pick(letters), 0});
        rule.rhs.push_back(c);
      }
      if (r.chance(0.5)) rule.rhs.push_back({r.pick(letters), 0});
      m.add_rule(std::move(rule));
    }
  return m;
}

// Random grammar over the given terminals with nonterminals S, A, B.
inline tteq::Cfg random_cfg(Rng& r, const std::vector<std::string>& terminals) {
  tteq::Cfg g;
  for (const auto& t : terminals) g.add_terminal(t);
  std::vector<std::string> nts{"S", "A", "B"};
  std::size_t n = 1 + r.below(3);
  nts.resize(n);
  for (const auto& x : nts) g.add_nonterminal(x);
  g.start = "S";
  std::vector<std::string> symbols = terminals;
  symbols.insert(symbols.end(), nts.begin(), nts.end());
  for (const auto& x : nts) {
    std::size_t prods = 1 + r.below(3);
    for (std::size_t p = 0; p < prods; ++p) {
      std::vector<std::string> rhs;
      std::size_t len = r.below(4);
      for (std::size_t i = 0; i < len; ++i) rhs.push_back(r.pick(symbols));
      g.add(x, rhs);
    }
  }
  return g;
}

}  // namespace oracle
