#include "tteq/parikh.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "tteq/error.hpp"

namespace tteq {

// ---------------------------------------------------------------------------
// Tree-to-string transducers

YdtFc::YdtFc(RankedAlphabet input, std::vector<std::string> letters)
    : input_(std::move(input)), letters_(std::move(letters)) {}

void YdtFc::add_state(const std::string& q) {
  if (state_set_.insert(q).second) states_.push_back(q);
}

void YdtFc::set_initial(const std::string& q) {
  if (!is_state(q)) throw InvalidArgument("unknown state " + q);
  initial_ = q;
}

void YdtFc::set_lookahead(Dbta la) {
  if (la.alphabet() != input_) throw AlphabetError("look-ahead automaton is not over the input alphabet");
  lookahead_ = std::move(la);
}

void YdtFc::add_rule(YdtRule r) {
  index_[{r.state, r.symbol}].push_back(rules_.size());
  rules_.push_back(std::move(r));
}

std::vector<const YdtRule*> YdtFc::matching(const std::string& q, const std::string& symbol,
                                            std::span<const std::optional<State>> children) const {
  std::vector<const YdtRule*> out;
  auto it = index_.find({q, symbol});
  if (it == index_.end()) return out;
  for (std::size_t i : it->second) {
    const YdtRule& r = rules_[i];
    bool ok = true;
    if (r.lookahead) {
      if (r.lookahead->size() != children.size()) continue;
      for (std::size_t c = 0; c < children.size(); ++c)
        if (!children[c] || *children[c] != (*r.lookahead)[c]) ok = false;
    }
    if (ok) out.push_back(&r);
  }
  return out;
}

namespace {

// Completed look-ahead: every tree reaches a state; the sink (if added)
// stands for a stuck run.
struct CompletedLa {
  Dbta a;
  std::optional<State> sink;
  std::vector<State> reachable;
  bool present;
  std::optional<State> as_opt(State p) const {
    if (sink && p == *sink) return std::nullopt;
    return p;
  }
};

CompletedLa completed_la(const YdtFc& m) {
  CompletedLa c;
  c.present = m.has_lookahead();
  if (c.present) {
    c.a = complete(m.lookahead());
    if (c.a.num_states() > m.lookahead().num_states()) c.sink = m.lookahead().num_states();
  } else {
    c.a = all_trees(m.input());
  }
  auto w = min_height_witnesses(c.a);
  for (State p = 0; p < w.size(); ++p)
    if (w[p]) c.reachable.push_back(p);
  return c;
}

// Calls every f(tuple) for tuple in choices[0] x choices[1] x ...
template <class T, class F>
void for_each_tuple(const std::vector<std::vector<T>>& choices, F&& f) {
  for (const auto& c : choices)
    if (c.empty()) return;
  std::vector<std::size_t> pos(choices.size(), 0);
  std::vector<T> cur(choices.size());
  while (true) {
    for (std::size_t i = 0; i < choices.size(); ++i) cur[i] = choices[i][pos[i]];
    f(cur);
    std::size_t i = 0;
    while (i < choices.size() && ++pos[i] == choices[i].size()) pos[i++] = 0;
    if (i == choices.size()) return;
  }
}

std::unordered_map<const void*, State> la_run(const CompletedLa& c, const Tree& s) {
  std::unordered_map<const void*, State> out;
  auto rec = [&](auto&& self, const Tree& t) -> State {
    auto it = out.find(t.identity());
    if (it != out.end()) return it->second;
    std::vector<State> kids;
    for (const Tree& k : t.children()) kids.push_back(self(self, k));
    State p = *c.a.transition(t.label(), kids);
    out.emplace(t.identity(), p);
    return p;
  };
  rec(rec, s);
  return out;
}

std::vector<std::optional<State>> child_states(const CompletedLa& c, const std::unordered_map<const void*, State>& run,
                                               const Tree& t) {
  std::vector<std::optional<State>> out;
  for (const Tree& k : t.children()) out.push_back(c.as_opt(run.at(k.identity())));
  return out;
}

std::string sequence_name(const std::vector<std::string>& seq) {
  if (seq.size() == 1) return seq.front();
  std::string s = "<";
  for (std::size_t i = 0; i < seq.size(); ++i) s += (i ? "," : "") + seq[i];
  return s + ">";
}

}  // namespace

bool YdtFc::is_deterministic() const {
  CompletedLa c = completed_la(*this);
  for (const auto& q : states_) {
    for (const auto& [symbol, rank] : input_.symbols()) {
      std::vector<std::vector<State>> choices(rank, c.present ? c.reachable : std::vector<State>{0});
      bool ok = true;
      for_each_tuple(choices, [&](const std::vector<State>& t) {
        std::vector<std::optional<State>> kids;
        for (State p : t) kids.push_back(c.as_opt(p));
        if (matching(q, symbol, kids).size() > 1) ok = false;
      });
      if (!ok) return false;
    }
  }
  return true;
}

bool YdtFc::is_linear() const {
  for (const auto& r : rules_) {
    std::set<std::size_t> seen;
    for (const auto& it : r.rhs)
      if (it.is_call() && !seen.insert(it.child).second) return false;
  }
  return true;
}

std::string YdtFc::to_string() const {
  std::ostringstream os;
  for (const auto& r : rules_) {
    os << r.state << "(" << r.symbol;
    std::size_t k = input_.rank_of(r.symbol);
    if (k > 0) {
      os << "(";
      for (std::size_t i = 1; i <= k; ++i) os << (i > 1 ? "," : "") << input_var(i);
      os << ")";
    }
    os << ")";
    if (r.lookahead) {
      os << " <";
      for (std::size_t i = 0; i < r.lookahead->size(); ++i)
        os << (i ? "," : "") << lookahead_->state_name((*r.lookahead)[i]);
      os << ">";
    }
    os << " ->";
    for (const auto& it : r.rhs) {
      os << " " << it.name;
      if (it.is_call()) os << "(" << input_var(it.child) << ")";
    }
    os << "\n";
  }
  return os.str();
}

std::vector<std::string> validate(const YdtFc& m) {
  std::vector<std::string> out;
  if (m.initial().empty()) out.push_back("no initial state");
  std::set<std::string> letters(m.letters().begin(), m.letters().end());
  for (const auto& r : m.rules()) {
    std::string key = r.state + "/" + r.symbol;
    if (!m.is_state(r.state)) out.push_back(key + ": unknown state " + r.state);
    auto k = m.input().rank(r.symbol);
    if (!k) {
      out.push_back(key + ": unknown input symbol " + r.symbol);
      continue;
    }
    if (r.lookahead) {
      if (!m.has_lookahead()) out.push_back(key + ": guard without look-ahead automaton");
      else if (r.lookahead->size() != *k) out.push_back(key + ": guard length differs from rank");
      else
        for (State p : *r.lookahead)
          if (p >= m.lookahead().num_states()) out.push_back(key + ": guard state out of range");
    }
    for (const auto& it : r.rhs) {
      if (it.is_call()) {
        if (!m.is_state(it.name)) out.push_back(key + ": call to unknown state " + it.name);
        if (it.child > *k) out.push_back(key + ": call on " + input_var(it.child) + " exceeds the rank");
      } else if (!letters.count(it.name)) {
        out.push_back(key + ": unknown output letter " + it.name);
      }
    }
  }
  return out;
}

std::optional<std::vector<std::string>> eval(const YdtFc& m, const Tree& s) {
  check_tree(s, m.input());
  CompletedLa c = completed_la(m);
  auto run = la_run(c, s);
  auto rec = [&](auto&& self, const std::string& q, const Tree& t) -> std::optional<std::vector<std::string>> {
    auto rs = m.matching(q, t.label(), child_states(c, run, t));
    if (rs.empty()) return std::nullopt;
    std::vector<std::string> out;
    for (const auto& it : rs.front()->rhs) {
      if (!it.is_call()) {
        out.push_back(it.name);
        continue;
      }
      auto sub = self(self, it.name, t.child(it.child - 1));
      if (!sub) return std::nullopt;
      out.insert(out.end(), sub->begin(), sub->end());
    }
    return out;
  };
  return rec(rec, m.initial(), s);
}

std::set<std::vector<std::string>> eval_all(const YdtFc& m, const Tree& s) {
  check_tree(s, m.input());
  CompletedLa c = completed_la(m);
  auto run = la_run(c, s);
  std::map<std::pair<std::string, const void*>, std::set<std::vector<std::string>>> memo;
  auto rec = [&](auto&& self, const std::string& q, const Tree& t) -> const std::set<std::vector<std::string>>& {
    auto key = std::make_pair(q, t.identity());
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::set<std::vector<std::string>> out;
    for (const YdtRule* r : m.matching(q, t.label(), child_states(c, run, t))) {
      std::set<std::vector<std::string>> acc{{}};
      for (const auto& item : r->rhs) {
        std::set<std::vector<std::string>> next;
        if (!item.is_call()) {
          for (auto w : acc) {
            w.push_back(item.name);
            next.insert(std::move(w));
          }
        } else {
          const auto& sub = self(self, item.name, t.child(item.child - 1));
          for (const auto& w : acc)
            for (const auto& v : sub) {
              auto x = w;
              x.insert(x.end(), v.begin(), v.end());
              next.insert(std::move(x));
            }
        }
        acc = std::move(next);
      }
      out.insert(acc.begin(), acc.end());
    }
    return memo.emplace(key, std::move(out)).first->second;
  };
  return rec(rec, m.initial(), s);
}

Dbta domain_automaton(const YdtFc& m) {
  CompletedLa c = completed_la(m);
  const std::size_t n = m.states().size();
  auto ex = explore<std::vector<long>, VectorHash>(
      m.input(), [&](const std::string& symbol, std::span<const std::vector<long>* const> kids) {
        std::vector<State> ps;
        std::vector<std::optional<State>> opt;
        for (const auto* k : kids) {
          ps.push_back(static_cast<State>((*k)[0]));
          opt.push_back(c.as_opt(ps.back()));
        }
        std::vector<long> out(n + 1, 0);
        out[0] = static_cast<long>(*c.a.transition(symbol, ps));
        for (std::size_t q = 0; q < n; ++q) {
          for (const YdtRule* r : m.matching(m.states()[q], symbol, opt)) {
            bool ok = true;
            for (const auto& it : r->rhs) {
              if (!it.is_call()) continue;
              auto pos = std::find(m.states().begin(), m.states().end(), it.name) - m.states().begin();
              if (!(*kids[it.child - 1])[1 + pos]) ok = false;
            }
            if (ok) {
              out[1 + q] = 1;
              break;
            }
          }
        }
        return std::optional<std::vector<long>>(std::move(out));
      });
  auto q0 = std::find(m.states().begin(), m.states().end(), m.initial()) - m.states().begin();
  for (State s = 0; s < ex.states.size(); ++s) ex.automaton.set_final(s, ex.states[s][1 + q0] != 0);
  return ex.automaton;
}

// ---------------------------------------------------------------------------
// Finite copying and linearization

namespace {

struct SequenceStep {
  std::string symbol;
  std::vector<State> children;
  std::vector<const YdtRule*> chosen;  // one rule per sequence element
  std::vector<std::vector<std::string>> child_sequences;
};

// Explores (state sequence, look-ahead state) pairs from the root. Returns
// false when a sequence longer than `cutoff` appears.
struct SequenceGraph {
  std::map<std::vector<std::string>, std::set<State>> reach;
  std::vector<std::vector<std::string>> order;
  std::size_t longest = 0;
  bool bounded = true;
};

template <class F>
void for_each_step(const YdtFc& m, const CompletedLa& c, const std::vector<std::string>& seq,
                   const std::set<State>& at, F&& f) {
  for (const auto& [symbol, rank] : m.input().symbols()) {
    std::vector<std::vector<State>> choices(rank, c.reachable);
    for_each_tuple(choices, [&](const std::vector<State>& tuple) {
      if (!at.count(*c.a.transition(symbol, tuple))) return;
      std::vector<std::optional<State>> opt;
      for (State p : tuple) opt.push_back(c.as_opt(p));
      std::vector<std::vector<const YdtRule*>> options;
      for (const auto& q : seq) {
        auto rs = m.matching(q, symbol, opt);
        if (rs.empty()) return;
        options.push_back(std::move(rs));
      }
      for_each_tuple(options, [&](const std::vector<const YdtRule*>& chosen) {
        SequenceStep st{symbol, tuple, chosen, std::vector<std::vector<std::string>>(rank)};
        for (const YdtRule* r : chosen)
          for (const auto& it : r->rhs)
            if (it.is_call()) st.child_sequences[it.child - 1].push_back(it.name);
        f(st);
      });
    });
  }
}

SequenceGraph sequence_graph(const YdtFc& m, const CompletedLa& c, std::size_t cutoff) {
  SequenceGraph g;
  std::deque<std::pair<std::vector<std::string>, State>> work;
  auto add = [&](const std::vector<std::string>& seq, State p) {
    if (seq.empty()) return;
    g.longest = std::max(g.longest, seq.size());
    if (seq.size() > cutoff) {
      g.bounded = false;
      return;
    }
    auto it = g.reach.find(seq);
    if (it == g.reach.end()) {
      it = g.reach.emplace(seq, std::set<State>{}).first;
      g.order.push_back(seq);
    }
    if (it->second.insert(p).second) work.emplace_back(seq, p);
  };
  for (State p : c.reachable) add({m.initial()}, p);
  while (!work.empty() && g.bounded) {
    auto [seq, p] = work.front();
    work.pop_front();
    for_each_step(m, c, seq, std::set<State>{p}, [&](const SequenceStep& st) {
      for (std::size_t i = 0; i < st.children.size(); ++i) add(st.child_sequences[i], st.children[i]);
    });
  }
  return g;
}

}  // namespace

CopyingBound check_finite_copying(const YdtFc& m, std::size_t cutoff) {
  CompletedLa c = completed_la(m);
  SequenceGraph g = sequence_graph(m, c, cutoff);
  return {g.bounded, g.longest};
}

YdtFc linearize_fc(const YdtFc& m, std::size_t cutoff) {
  CompletedLa c = completed_la(m);
  SequenceGraph g = sequence_graph(m, c, cutoff);
  if (!g.bounded) throw InvalidArgument("transducer is not finite-copying within cutoff " + std::to_string(cutoff));
  YdtFc out(m.input(), m.letters());
  if (c.present) out.set_lookahead(c.a);
  for (const auto& seq : g.order) out.add_state(sequence_name(seq));
  out.set_initial(m.initial());
  std::set<std::tuple<std::string, std::string, std::optional<std::vector<State>>, std::vector<std::pair<std::string, std::size_t>>>> seen;
  for (const auto& seq : g.order) {
    for_each_step(m, c, seq, g.reach.at(seq), [&](const SequenceStep& st) {
      YdtRule r{sequence_name(seq), st.symbol, std::nullopt, {}};
      if (c.present) r.lookahead = st.children;
      std::vector<bool> emitted(st.children.size(), false);
      for (const YdtRule* src : st.chosen) {
        for (const auto& it : src->rhs) {
          if (!it.is_call()) {
            r.rhs.push_back(it);
          } else if (!emitted[it.child - 1]) {
            emitted[it.child - 1] = true;
            r.rhs.push_back({sequence_name(st.child_sequences[it.child - 1]), it.child});
          }
        }
      }
      std::vector<std::pair<std::string, std::size_t>> key;
      for (const auto& it : r.rhs) key.emplace_back(it.name, it.child);
      if (seen.insert({r.state, r.symbol, r.lookahead, key}).second) out.add_rule(std::move(r));
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// Grammars

bool Cfg::is_terminal(const std::string& s) const {
  return std::find(terminals.begin(), terminals.end(), s) != terminals.end();
}

bool Cfg::is_nonterminal(const std::string& s) const {
  return std::find(nonterminals.begin(), nonterminals.end(), s) != nonterminals.end();
}

void Cfg::add_terminal(const std::string& s) {
  if (is_nonterminal(s)) throw InvalidArgument("symbol is already a nonterminal: " + s);
  if (!is_terminal(s)) terminals.push_back(s);
}

void Cfg::add_nonterminal(const std::string& s) {
  if (is_terminal(s)) throw InvalidArgument("symbol is already a terminal: " + s);
  if (!is_nonterminal(s)) nonterminals.push_back(s);
}

void Cfg::add(const std::string& lhs, std::vector<std::string> rhs) {
  if (!is_nonterminal(lhs)) throw InvalidArgument("unknown nonterminal " + lhs);
  for (const auto& s : rhs)
    if (!is_terminal(s) && !is_nonterminal(s)) throw InvalidArgument("unknown grammar symbol " + s);
  productions.push_back({lhs, std::move(rhs)});
}

std::string Cfg::to_string() const {
  std::ostringstream os;
  for (const auto& p : productions) {
    os << p.lhs << " ->";
    for (const auto& s : p.rhs) os << " " << s;
    os << "\n";
  }
  return os.str();
}

Cfg trim(const Cfg& g) {
  std::set<std::string> productive;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : g.productions) {
      if (productive.count(p.lhs)) continue;
      bool ok = std::all_of(p.rhs.begin(), p.rhs.end(),
                            [&](const std::string& s) { return g.is_terminal(s) || productive.count(s); });
      if (ok) {
        productive.insert(p.lhs);
        changed = true;
      }
    }
  }
  std::set<std::string> reachable;
  if (productive.count(g.start)) {
    std::deque<std::string> work{g.start};
    reachable.insert(g.start);
    while (!work.empty()) {
      std::string a = work.front();
      work.pop_front();
      for (const auto& p : g.productions) {
        if (p.lhs != a) continue;
        bool ok = std::all_of(p.rhs.begin(), p.rhs.end(),
                              [&](const std::string& s) { return g.is_terminal(s) || productive.count(s); });
        if (!ok) continue;
        for (const auto& s : p.rhs)
          if (!g.is_terminal(s) && reachable.insert(s).second) work.push_back(s);
      }
    }
  }
  Cfg out;
  out.terminals = g.terminals;
  out.start = g.start;
  out.nonterminals.push_back(g.start);
  for (const auto& n : g.nonterminals)
    if (n != g.start && reachable.count(n)) out.nonterminals.push_back(n);
  for (const auto& p : g.productions) {
    if (!reachable.count(p.lhs)) continue;
    bool ok = std::all_of(p.rhs.begin(), p.rhs.end(),
                          [&](const std::string& s) { return g.is_terminal(s) || reachable.count(s); });
    if (ok) out.productions.push_back(p);
  }
  return out;
}

Cfg image_cfg(const YdtFc& m, const Dbta& d) {
  if (!m.is_linear()) throw InvalidArgument("image_cfg requires a linear transducer");
  if (d.alphabet() != m.input()) throw AlphabetError("automaton and transducer have different alphabets");
  CompletedLa c = completed_la(m);
  // Pairs (D-state, look-ahead state) reached by a common tree.
  auto pairs = explore<std::vector<long>, VectorHash>(
      m.input(), [&](const std::string& symbol, std::span<const std::vector<long>* const> kids)
                     -> std::optional<std::vector<long>> {
        std::vector<State> ds, ps;
        for (const auto* k : kids) {
          ds.push_back(static_cast<State>((*k)[0]));
          ps.push_back(static_cast<State>((*k)[1]));
        }
        auto dd = d.transition(symbol, ds);
        if (!dd) return std::nullopt;
        return std::vector<long>{static_cast<long>(*dd), static_cast<long>(*c.a.transition(symbol, ps))};
      });
  std::map<State, std::vector<std::size_t>> by_la;
  std::vector<std::size_t> all;
  for (std::size_t i = 0; i < pairs.states.size(); ++i) {
    by_la[static_cast<State>(pairs.states[i][1])].push_back(i);
    all.push_back(i);
  }
  auto nt = [&](const std::string& q, std::size_t pair) {
    return "[" + q + "|" + std::to_string(pairs.states[pair][0]) + "|" + std::to_string(pairs.states[pair][1]) + "]";
  };
  Cfg g;
  for (const auto& l : m.letters()) g.add_terminal(l);
  g.start = "S";
  while (g.is_terminal(g.start)) g.start += "'";
  g.add_nonterminal(g.start);
  for (const auto& r : m.rules()) {
    std::size_t k = m.input().rank_of(r.symbol);
    std::vector<std::vector<std::size_t>> choices;
    for (std::size_t i = 0; i < k; ++i) {
      if (r.lookahead) {
        auto it = by_la.find((*r.lookahead)[i]);
        choices.push_back(it == by_la.end() ? std::vector<std::size_t>{} : it->second);
      } else {
        choices.push_back(all);
      }
    }
    auto emit = [&](const std::vector<std::size_t>& tuple) {
      std::vector<State> ds, ps;
      for (std::size_t i : tuple) {
        ds.push_back(static_cast<State>(pairs.states[i][0]));
        ps.push_back(static_cast<State>(pairs.states[i][1]));
      }
      auto dd = d.transition(r.symbol, ds);
      if (!dd) return;
      State pp = *c.a.transition(r.symbol, ps);
      auto parent = std::find(pairs.states.begin(), pairs.states.end(),
                              std::vector<long>{static_cast<long>(*dd), static_cast<long>(pp)});
      std::string lhs = nt(r.state, static_cast<std::size_t>(parent - pairs.states.begin()));
      std::vector<std::string> rhs;
      for (const auto& it : r.rhs) {
        if (!it.is_call()) {
          rhs.push_back(it.name);
          continue;
        }
        rhs.push_back(nt(it.name, tuple[it.child - 1]));
        g.add_nonterminal(rhs.back());
      }
      g.add_nonterminal(lhs);
      g.add(lhs, std::move(rhs));
    };
    if (k == 0) emit({});
    else for_each_tuple(choices, emit);
  }
  for (std::size_t i = 0; i < pairs.states.size(); ++i) {
    if (!d.is_final(static_cast<State>(pairs.states[i][0]))) continue;
    g.add_nonterminal(nt(m.initial(), i));
    g.add(g.start, {nt(m.initial(), i)});
  }
  return trim(g);
}

Cfg build_lab(const YdtFc& m1, const YdtFc& m2, const Dbta& d, const std::string& a, const std::string& b,
              const std::string& sep, std::size_t cutoff) {
  if (a == b) throw InvalidArgument("letters must differ");
  if (m1.input() != m2.input()) throw AlphabetError("transducers have different input alphabets");
  auto has = [](const YdtFc& m, const std::string& x) {
    return std::find(m.letters().begin(), m.letters().end(), x) != m.letters().end();
  };
  if (!has(m1, a) || !has(m2, b)) throw InvalidArgument("letter not in the output alphabet");
  if (sep == a || sep == b) throw InvalidArgument("separator clashes with a letter");
  const RankedAlphabet& sigma = m1.input();
  CompletedLa c1 = completed_la(m1), c2 = completed_la(m2);
  auto prod = explore<std::vector<long>, VectorHash>(
      sigma, [&](const std::string& symbol, std::span<const std::vector<long>* const> kids) {
        std::vector<State> p1, p2;
        for (const auto* k : kids) {
          p1.push_back(static_cast<State>((*k)[0]));
          p2.push_back(static_cast<State>((*k)[1]));
        }
        return std::optional<std::vector<long>>(std::vector<long>{static_cast<long>(*c1.a.transition(symbol, p1)),
                                                                  static_cast<long>(*c2.a.transition(symbol, p2))});
      });
  const std::size_t np = prod.states.size();
  YdtFc m(sigma, {a, sep, b});
  m.set_lookahead(prod.automaton);
  auto full = [](int side, const std::string& q) { return "<" + std::to_string(side) + "," + q + ">"; };
  auto marked = [](int side, const std::string& q) { return "<" + std::to_string(side) + "," + q + ",@>"; };
  const std::string root = "<0>";
  m.add_state(root);
  for (const auto& q : m1.states()) {
    m.add_state(full(1, q));
    m.add_state(marked(1, q));
  }
  for (const auto& q : m2.states()) {
    m.add_state(full(2, q));
    m.add_state(marked(2, q));
  }
  m.set_initial(root);

  auto add_guarded = [&](int side, YdtRule r, const std::optional<std::vector<State>>& guard) {
    if (!guard) {
      m.add_rule(std::move(r));
      return;
    }
    std::vector<std::vector<State>> choices;
    for (State g : *guard) {
      std::vector<State> ok;
      for (State p = 0; p < np; ++p)
        if (static_cast<State>(prod.states[p][side - 1]) == g) ok.push_back(p);
      choices.push_back(std::move(ok));
    }
    if (guard->empty()) {
      r.lookahead = std::vector<State>{};
      m.add_rule(std::move(r));
      return;
    }
    for_each_tuple(choices, [&](const std::vector<State>& t) {
      YdtRule copy = r;
      copy.lookahead = t;
      m.add_rule(std::move(copy));
    });
  };
  auto translate = [&](int side, const YdtFc& src, const std::string& letter) {
    for (const auto& r : src.rules()) {
      auto item = [&](const YItem& it) -> YItem {
        return it.is_call() ? YItem{full(side, it.name), it.child} : YItem{letter, 0};
      };
      YdtRule whole{full(side, r.state), r.symbol, std::nullopt, {}};
      for (const auto& it : r.rhs) whole.rhs.push_back(item(it));
      add_guarded(side, whole, r.lookahead);
      for (std::size_t pos = 0; pos < r.rhs.size(); ++pos) {
        const YItem& it = r.rhs[pos];
        if (!it.is_call() && it.name != letter) continue;
        YdtRule prefix{marked(side, r.state), r.symbol, std::nullopt, {}};
        for (std::size_t i = 0; i < pos; ++i) prefix.rhs.push_back(item(r.rhs[i]));
        prefix.rhs.push_back(it.is_call() ? YItem{marked(side, it.name), it.child} : YItem{letter, 0});
        add_guarded(side, prefix, r.lookahead);
      }
    }
  };
  translate(1, m1, a);
  translate(2, m2, b);
  for (const auto& [symbol, rank] : sigma.symbols()) {
    std::vector<std::vector<State>> choices(rank);
    for (auto& ch : choices)
      for (State p = 0; p < np; ++p) ch.push_back(p);
    auto emit = [&](const std::vector<State>& t) {
      std::vector<std::optional<State>> opt(t.begin(), t.end());
      // Copied out: adding rules below may move the matched ones.
      std::vector<std::vector<YItem>> us, ws;
      for (const YdtRule* u : m.matching(marked(1, m1.initial()), symbol, opt)) us.push_back(u->rhs);
      for (const YdtRule* w : m.matching(marked(2, m2.initial()), symbol, opt)) ws.push_back(w->rhs);
      for (const auto& u : us)
        for (const auto& w : ws) {
          YdtRule r{root, symbol, t, u};
          r.rhs.push_back({sep, 0});
          r.rhs.insert(r.rhs.end(), w.begin(), w.end());
          m.add_rule(std::move(r));
        }
    };
    if (rank == 0) emit({});
    else for_each_tuple(choices, emit);
  }
  return image_cfg(linearize_fc(m, cutoff), d);
}

// ---------------------------------------------------------------------------
// Semilinear sets

namespace {

using Vec = ParikhVector;
using SL = std::vector<LinearSet>;

Vec plus(Vec a, const Vec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

bool is_zero(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](std::uint64_t x) { return x == 0; });
}

// Nonnegative integer combination of `periods` equal to `target`.
bool representable(const Vec& target, const std::vector<Vec>& periods) {
  std::set<std::pair<std::size_t, Vec>> failed;
  std::function<bool(std::size_t, const Vec&)> rec = [&](std::size_t idx, const Vec& t) -> bool {
    if (is_zero(t)) return true;
    if (idx == periods.size()) return false;
    if (failed.count({idx, t})) return false;
    const Vec& p = periods[idx];
    std::uint64_t most = UINT64_MAX;
    for (std::size_t i = 0; i < t.size(); ++i)
      if (p[i] > 0) most = std::min(most, t[i] / p[i]);
    Vec cur = t;
    for (std::uint64_t c = 0;; ++c) {
      if (rec(idx + 1, cur)) return true;
      if (c == most) break;
      for (std::size_t i = 0; i < cur.size(); ++i) cur[i] -= p[i];
    }
    failed.insert({idx, t});
    return false;
  };
  return rec(0, target);
}

void normalize(LinearSet& l) {
  std::erase_if(l.periods, is_zero);
  std::sort(l.periods.begin(), l.periods.end());
  l.periods.erase(std::unique(l.periods.begin(), l.periods.end()), l.periods.end());
  // Drop periods that are sums of the others.
  for (std::size_t i = 0; i < l.periods.size();) {
    std::vector<Vec> rest;
    for (std::size_t j = 0; j < l.periods.size(); ++j)
      if (j != i) rest.push_back(l.periods[j]);
    if (representable(l.periods[i], rest)) l.periods.erase(l.periods.begin() + static_cast<long>(i));
    else ++i;
  }
}

bool subsumes(const LinearSet& big, const LinearSet& small) {
  if (!big.contains(small.base)) return false;
  for (const auto& p : small.periods)
    if (!representable(p, big.periods)) return false;
  return true;
}

SL simplify(SL s) {
  for (auto& l : s) normalize(l);
  std::sort(s.begin(), s.end(), [](const LinearSet& x, const LinearSet& y) {
    if (x.periods.size() != y.periods.size()) return x.periods.size() > y.periods.size();
    return std::tie(x.base, x.periods) < std::tie(y.base, y.periods);
  });
  s.erase(std::unique(s.begin(), s.end()), s.end());
  // (b, P) and (b + p, Q) with p in Q, P within Q and Q - {p} within P
  // together form (b, Q).
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < s.size() && !merged; ++i)
      for (std::size_t j = 0; j < s.size() && !merged; ++j) {
        if (i == j) continue;
        const LinearSet& lo = s[i];
        const LinearSet& hi = s[j];
        for (std::size_t pi = 0; pi < hi.periods.size() && !merged; ++pi) {
          if (plus(lo.base, hi.periods[pi]) != hi.base) continue;
          std::vector<Vec> rest = hi.periods;
          rest.erase(rest.begin() + static_cast<long>(pi));
          bool ok = std::all_of(lo.periods.begin(), lo.periods.end(),
                                [&](const Vec& v) { return representable(v, hi.periods); }) &&
                    std::all_of(rest.begin(), rest.end(), [&](const Vec& v) { return representable(v, lo.periods); });
          if (!ok) continue;
          LinearSet joined{lo.base, hi.periods};
          s.erase(s.begin() + static_cast<long>(std::max(i, j)));
          s.erase(s.begin() + static_cast<long>(std::min(i, j)));
          s.push_back(std::move(joined));
          merged = true;
        }
      }
  }
  SL out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    bool covered = false;
    for (const auto& o : out)
      if (subsumes(o, s[i])) covered = true;
    for (std::size_t j = i + 1; j < s.size() && !covered; ++j)
      if (subsumes(s[j], s[i]) && !subsumes(s[i], s[j])) covered = true;
    if (!covered) out.push_back(s[i]);
  }
  return out;
}

SL unite(SL a, const SL& b) {
  a.insert(a.end(), b.begin(), b.end());
  return simplify(std::move(a));
}

SL sum(const SL& a, const SL& b) {
  SL out;
  for (const auto& x : a)
    for (const auto& y : b) {
      LinearSet l{plus(x.base, y.base), x.periods};
      l.periods.insert(l.periods.end(), y.periods.begin(), y.periods.end());
      out.push_back(std::move(l));
    }
  return simplify(std::move(out));
}

SL one(std::size_t dim) { return {LinearSet{Vec(dim, 0), {}}}; }

SL star(const SL& a, std::size_t dim) {
  SL result = one(dim);
  for (const auto& l : a) {
    SL s;
    if (is_zero(l.base)) {
      s = {l};
    } else if (l.periods.empty()) {
      s = {LinearSet{Vec(dim, 0), {l.base}}};
    } else {
      LinearSet grown = l;
      grown.periods.push_back(l.base);
      s = {LinearSet{Vec(dim, 0), {}}, grown};
    }
    result = sum(result, s);
  }
  return result;
}

}  // namespace

bool LinearSet::contains(const ParikhVector& v) const {
  if (v.size() != base.size()) return false;
  Vec t(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < base[i]) return false;
    t[i] = v[i] - base[i];
  }
  return representable(t, periods);
}

bool SemilinearSet::contains(const ParikhVector& v) const {
  return std::any_of(sets.begin(), sets.end(), [&](const LinearSet& l) { return l.contains(v); });
}

std::string SemilinearSet::to_string() const {
  std::ostringstream os;
  auto vec = [&](const Vec& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + letters[i] + ":" + std::to_string(v[i]);
    return s + ")";
  };
  if (sets.empty()) os << "empty\n";
  for (const auto& l : sets) {
    os << "base " << vec(l.base);
    if (!l.periods.empty()) {
      os << " periods";
      for (const auto& p : l.periods) os << " " << vec(p);
    }
    os << "\n";
  }
  return os.str();
}

SemilinearSet parikh_image(const Cfg& g0) {
  Cfg g = trim(g0);
  const std::size_t dim = g0.terminals.size();
  SemilinearSet result{g0.terminals, {}};
  if (g.productions.empty()) return result;
  std::map<std::string, std::size_t> term;
  for (std::size_t i = 0; i < dim; ++i) term[g0.terminals[i]] = i;
  std::map<std::string, std::size_t> nt;
  for (const auto& n : g.nonterminals) nt.emplace(n, nt.size());
  const std::size_t n = nt.size();
  std::vector<std::vector<const Cfg::Production*>> prods(n);
  for (const auto& p : g.productions) prods[nt.at(p.lhs)].push_back(&p);

  // Strongly connected components, dependencies first.
  std::vector<std::vector<std::size_t>> succ(n);
  for (const auto& p : g.productions)
    for (const auto& s : p.rhs)
      if (nt.count(s)) succ[nt.at(p.lhs)].push_back(nt.at(s));
  std::vector<long> low(n, -1), num(n, -1);
  std::vector<bool> on(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> sccs;
  long counter = 0;
  std::function<void(std::size_t)> tarjan = [&](std::size_t v) {
    low[v] = num[v] = counter++;
    stack.push_back(v);
    on[v] = true;
    for (std::size_t w : succ[v]) {
      if (num[w] < 0) {
        tarjan(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on[w]) {
        low[v] = std::min(low[v], num[w]);
      }
    }
    if (low[v] == num[v]) {
      std::vector<std::size_t> comp;
      while (true) {
        std::size_t w = stack.back();
        stack.pop_back();
        on[w] = false;
        comp.push_back(w);
        if (w == v) break;
      }
      sccs.push_back(std::move(comp));
    }
  };
  for (std::size_t v = 0; v < n; ++v)
    if (num[v] < 0) tarjan(v);

  std::vector<SL> value(n);
  for (const auto& comp : sccs) {
    std::map<std::size_t, std::size_t> local;
    for (std::size_t i = 0; i < comp.size(); ++i) local[comp[i]] = i;
    const std::size_t k = comp.size();
    // Value of a symbol under the current assignment of the component.
    auto sym = [&](const std::string& s, const std::vector<SL>& x) -> SL {
      if (auto t = term.find(s); t != term.end()) {
        Vec v(dim, 0);
        v[t->second] = 1;
        return {LinearSet{v, {}}};
      }
      std::size_t id = nt.at(s);
      auto l = local.find(id);
      return l == local.end() ? value[id] : x[l->second];
    };
    auto f = [&](const std::vector<SL>& x) {
      std::vector<SL> out(k);
      for (std::size_t i = 0; i < k; ++i) {
        SL acc;
        for (const auto* p : prods[comp[i]]) {
          SL term_value = one(dim);
          for (const auto& s : p->rhs) term_value = sum(term_value, sym(s, x));
          acc = unite(std::move(acc), term_value);
        }
        out[i] = std::move(acc);
      }
      return out;
    };
    std::vector<SL> x = f(std::vector<SL>(k));
    bool recursive = k > 1 || std::count(succ[comp[0]].begin(), succ[comp[0]].end(), comp[0]) > 0;
    if (recursive) {
      for (std::size_t iter = 0; iter < k; ++iter) {
        std::vector<SL> fx = f(x);
        // Jacobian at x.
        std::vector<std::vector<SL>> jac(k, std::vector<SL>(k));
        for (std::size_t i = 0; i < k; ++i)
          for (const auto* p : prods[comp[i]])
            for (std::size_t pos = 0; pos < p->rhs.size(); ++pos) {
              auto l = nt.find(p->rhs[pos]);
              if (l == nt.end() || !local.count(l->second)) continue;
              SL prod = one(dim);
              for (std::size_t o = 0; o < p->rhs.size(); ++o)
                if (o != pos) prod = sum(prod, sym(p->rhs[o], x));
              auto& cell = jac[i][local.at(l->second)];
              cell = unite(std::move(cell), prod);
            }
        // Kleene closure of the matrix, pivot by pivot.
        for (std::size_t m = 0; m < k; ++m) {
          SL s = star(jac[m][m], dim);
          for (std::size_t i = 0; i < k; ++i)
            if (i != m && !jac[i][m].empty()) jac[i][m] = sum(jac[i][m], s);
          for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
              if (i != m && j != m && !jac[i][m].empty() && !jac[m][j].empty())
                jac[i][j] = unite(std::move(jac[i][j]), sum(jac[i][m], jac[m][j]));
          for (std::size_t j = 0; j < k; ++j)
            if (j != m && !jac[m][j].empty()) jac[m][j] = sum(s, jac[m][j]);
          jac[m][m] = std::move(s);
        }
        std::vector<SL> nx = x;
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j)
            if (!jac[i][j].empty() && !fx[j].empty()) nx[i] = unite(std::move(nx[i]), sum(jac[i][j], fx[j]));
        x = std::move(nx);
      }
    }
    for (std::size_t i = 0; i < k; ++i) value[comp[i]] = std::move(x[i]);
  }
  result.sets = value[nt.at(g.start)];
  return result;
}

std::optional<ParikhVector> equal_count_feasible(const SemilinearSet& s, std::size_t a, std::size_t b,
                                                 const std::map<std::size_t, std::uint64_t>& exact) {
  const std::size_t dim = s.letters.size();
  if (a >= dim || b >= dim) throw InvalidArgument("letter index out of range");
  for (const auto& [i, v] : exact)
    if (i >= dim) throw InvalidArgument("letter index out of range");
  for (const auto& l : s.sets) {
    bool ok = true;
    Vec rem(dim, 0);
    for (const auto& [i, v] : exact) {
      if (l.base[i] > v) ok = false;
      else rem[i] = v - l.base[i];
    }
    if (!ok) continue;
    std::vector<std::size_t> bounded, free;
    for (std::size_t j = 0; j < l.periods.size(); ++j) {
      bool touches = false;
      for (const auto& [i, v] : exact)
        if (l.periods[j][i] > 0) touches = true;
      (touches ? bounded : free).push_back(j);
    }
    auto coef = [&](std::size_t j) {
      return static_cast<long long>(l.periods[j][a]) - static_cast<long long>(l.periods[j][b]);
    };
    std::vector<std::uint64_t> lambda(l.periods.size(), 0);
    std::optional<Vec> found;
    // Solves sum over free periods of lambda_j * coef_j = t by breadth-first
    // search over partial sums kept within a window around [0, t].
    auto solve_free = [&](long long t) -> bool {
      std::vector<std::size_t> steps;
      long long big = 0;
      for (std::size_t j : free)
        if (coef(j) != 0) {
          steps.push_back(j);
          big = std::max(big, std::llabs(coef(j)));
        }
      if (t == 0) return true;
      if (steps.empty()) return false;
      long long lo = std::min(0LL, t) - big, hi = std::max(0LL, t) + big;
      std::vector<long> parent(static_cast<std::size_t>(hi - lo + 1), -2);
      std::vector<std::size_t> via(parent.size());
      std::deque<long long> work{0};
      parent[static_cast<std::size_t>(-lo)] = -1;
      while (!work.empty()) {
        long long v = work.front();
        work.pop_front();
        if (v == t) break;
        for (std::size_t j : steps) {
          long long w = v + coef(j);
          if (w < lo || w > hi || parent[static_cast<std::size_t>(w - lo)] != -2) continue;
          parent[static_cast<std::size_t>(w - lo)] = static_cast<long>(v - lo);
          via[static_cast<std::size_t>(w - lo)] = j;
          work.push_back(w);
        }
      }
      if (parent[static_cast<std::size_t>(t - lo)] == -2) return false;
      for (long long v = t; v != 0;) {
        std::size_t j = via[static_cast<std::size_t>(v - lo)];
        ++lambda[j];
        v -= coef(j);
      }
      return true;
    };
    std::function<void(std::size_t, Vec&)> rec = [&](std::size_t idx, Vec& r) {
      if (found) return;
      if (idx == bounded.size()) {
        for (const auto& [i, v] : exact)
          if (r[i] != 0) return;
        long long t = -(static_cast<long long>(l.base[a]) - static_cast<long long>(l.base[b]));
        for (std::size_t j : bounded) t -= static_cast<long long>(lambda[j]) * coef(j);
        for (std::size_t j : free) lambda[j] = 0;
        if (!solve_free(t)) return;
        Vec v = l.base;
        for (std::size_t j = 0; j < l.periods.size(); ++j)
          for (std::size_t i = 0; i < dim; ++i) v[i] += lambda[j] * l.periods[j][i];
        found = v;
        return;
      }
      std::size_t j = bounded[idx];
      const Vec& p = l.periods[j];
      std::uint64_t most = UINT64_MAX;
      for (const auto& [i, v] : exact)
        if (p[i] > 0) most = std::min(most, r[i] / p[i]);
      for (std::uint64_t c = 0; c <= most && !found; ++c) {
        lambda[j] = c;
        for (const auto& [i, v] : exact) r[i] -= c * p[i];
        rec(idx + 1, r);
        for (const auto& [i, v] : exact) r[i] += c * p[i];
      }
      lambda[j] = 0;
    };
    rec(0, rem);
    if (found) return found;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Equivalence

std::string to_string(FcVerdict v) {
  switch (v) {
    case FcVerdict::Equivalent: return "equivalent";
    case FcVerdict::NotEquivalent: return "not equivalent";
    case FcVerdict::DomainMismatch: return "domain mismatch";
  }
  return "?";
}

YdtFc with_end_marker(const YdtFc& m, const std::string& marker) {
  std::vector<std::string> letters = m.letters();
  if (std::find(letters.begin(), letters.end(), marker) != letters.end())
    throw InvalidArgument("end marker already used as a letter");
  letters.push_back(marker);
  YdtFc out(m.input(), letters);
  for (const auto& q : m.states()) out.add_state(q);
  std::string start = m.initial() + "$";
  while (m.is_state(start)) start += "'";
  out.add_state(start);
  if (m.has_lookahead()) out.set_lookahead(m.lookahead());
  for (const auto& r : m.rules()) {
    out.add_rule(r);
    if (r.state == m.initial()) {
      YdtRule copy = r;
      copy.state = start;
      copy.rhs.push_back({marker, 0});
      out.add_rule(std::move(copy));
    }
  }
  out.set_initial(start);
  return out;
}

FcEquivResult decide_equiv_fc(const YdtFc& m1, const YdtFc& m2, const std::optional<Dbta>& d, std::size_t cutoff) {
  if (m1.input() != m2.input()) throw AlphabetError("transducers have different input alphabets");
  for (const YdtFc* m : {&m1, &m2}) {
    if (!m->is_deterministic()) throw InvalidArgument("decide_equiv_fc requires deterministic transducers");
    if (!check_finite_copying(*m, cutoff).bounded)
      throw InvalidArgument("transducer is not finite-copying within cutoff " + std::to_string(cutoff));
  }
  Dbta d1 = domain_automaton(m1), d2 = domain_automaton(m2);
  if (d) {
    d1 = intersect(d1, *d);
    d2 = intersect(d2, *d);
  }
  FcEquivResult res{FcVerdict::Equivalent, std::nullopt, "", "", {}};
  if (auto sep = find_separator(d1, d2)) {
    res.verdict = FcVerdict::DomainMismatch;
    res.witness = *sep;
    return res;
  }
  std::vector<std::string> letters = m1.letters();
  for (const auto& l : m2.letters())
    if (std::find(letters.begin(), letters.end(), l) == letters.end()) letters.push_back(l);
  auto used = [&](const std::string& s) { return std::find(letters.begin(), letters.end(), s) != letters.end(); };
  std::string marker = "$";
  while (used(marker)) marker += "'";
  std::string sep = "#";
  while (used(sep) || sep == marker) sep += "'";
  YdtFc e1 = with_end_marker(m1, marker), e2 = with_end_marker(m2, marker);
  letters.push_back(marker);
  auto in = [](const YdtFc& m, const std::string& x) {
    return std::find(m.letters().begin(), m.letters().end(), x) != m.letters().end();
  };
  for (const auto& a : letters) {
    for (const auto& b : letters) {
      if (a == b || !in(e1, a) || !in(e2, b)) continue;
      Cfg g = build_lab(e1, e2, d1, a, b, sep, cutoff);
      SemilinearSet s = parikh_image(g);
      auto idx = [&](const std::string& x) {
        return static_cast<std::size_t>(std::find(s.letters.begin(), s.letters.end(), x) - s.letters.begin());
      };
      auto w = equal_count_feasible(s, idx(a), idx(b), {{idx(sep), 1}});
      if (!w) continue;
      res.verdict = FcVerdict::NotEquivalent;
      res.a = a;
      res.b = b;
      res.parikh = *w;
      // A concrete input, when a small one exists.
      for (std::size_t h = 1; h <= 6 && !res.witness; ++h) {
        std::vector<Tree> trees;
        try {
          trees = enumerate_trees(m1.input(), h, 200000);
        } catch (const ResourceError&) {
          break;
        }
        for (const Tree& t : trees) {
          if (t.height() != h || !d1.accepts(t)) continue;
          if (eval(m1, t) != eval(m2, t)) {
            res.witness = t;
            break;
          }
        }
      }
      return res;
    }
  }
  return res;
}

}  // namespace tteq
