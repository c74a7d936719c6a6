#include "tteq/monadic.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "tteq/domain.hpp"
#include "tteq/error.hpp"
#include "tteq/lookahead.hpp"

namespace tteq {

namespace {

constexpr const char* kBot = "bot";

template <class Taken>
std::string fresh(std::string name, Taken&& taken) {
  while (taken(name)) name += "'";
  return name;
}

Tree relabel_leaves(const Tree& t, const std::map<std::string, std::string>& prime, const std::string& bot) {
  if (t.is_leaf()) {
    auto it = prime.find(t.label());
    if (it != prime.end()) return Tree(it->second, {Tree::leaf(bot)});
    return t;
  }
  std::vector<Tree> kids;
  for (const Tree& c : t.children()) kids.push_back(relabel_leaves(c, prime, bot));
  return Tree(t.label(), std::move(kids));
}

Tree rename_calls(const Tree& t, const std::map<std::string, std::string>& names) {
  std::vector<Tree> kids;
  for (const Tree& c : t.children()) kids.push_back(rename_calls(c, names));
  auto it = names.find(t.label());
  return Tree(it == names.end() ? t.label() : it->second, std::move(kids));
}

// Renames states so that none is in `avoid`.
Mtt rename_states(const Mtt& m, const std::set<std::string>& avoid) {
  std::map<std::string, std::string> names;
  std::set<std::string> used(avoid);
  for (const auto& q : m.states().names()) {
    std::string n = fresh(q, [&](const std::string& s) { return used.count(s) > 0 || m.output().contains(s); });
    used.insert(n);
    names[q] = n;
  }
  Mtt out(m.input(), m.output());
  for (const auto& q : m.states().names()) out.add_state(names[q], m.params(q));
  out.set_initial(names.at(m.initial()));
  if (m.has_lookahead()) out.set_lookahead(m.lookahead());
  for (const auto& r : m.rules()) out.add_rule(names[r.state], r.symbol, rename_calls(r.rhs, names), r.lookahead);
  return out;
}

std::vector<std::size_t> encode(const std::vector<std::string>& word, const std::map<std::string, std::size_t>& index) {
  std::vector<std::size_t> out;
  for (const auto& w : word) out.push_back(index.at(w));
  return out;
}

const Tree& only_rhs(const Mtt& m, const std::string& q, const std::string& symbol) {
  auto rs = m.rules_for(q, symbol);
  if (rs.empty()) throw InvalidArgument("transducer is not total: no rule for " + q + " on " + symbol);
  return rs.front()->rhs;
}

void check_pair(const Mtt& m1, const Mtt& m2) {
  for (const Mtt* m : {&m1, &m2}) {
    if (m->has_lookahead()) throw InvalidArgument("HDT0L reduction requires transducers without look-ahead");
    if (!is_normalized(*m)) throw InvalidArgument("HDT0L reduction requires normalized transducers");
    if (!m->is_total()) throw InvalidArgument("HDT0L reduction requires total transducers");
  }
  if (m1.input() != m2.input()) throw AlphabetError("transducers have different input alphabets");
  if (bottom_symbol(m1.output()) != bottom_symbol(m2.output()))
    throw InvalidArgument("transducers use different bottom symbols");
  for (const auto& q : m1.states().names())
    if (m2.is_state(q)) throw InvalidArgument("state sets are not disjoint: " + q);
  RankedAlphabet out = m1.output().merged(m2.output());
  for (const auto& q : m1.states().names())
    if (out.contains(q)) throw InvalidArgument("state name used as output symbol: " + q);
  for (const auto& q : m2.states().names())
    if (out.contains(q)) throw InvalidArgument("state name used as output symbol: " + q);
}

}  // namespace

std::vector<std::string> strip(const Tree& t) {
  std::vector<std::string> out;
  const Tree* cur = &t;
  while (true) {
    if (!cur->is_leaf()) out.push_back(cur->label());
    const Tree* next = nullptr;
    for (const Tree& c : cur->children()) {
      if (c.is_leaf() && is_input_var(c.label())) continue;
      if (next) throw InvalidArgument("strip requires a monadic tree: " + t.to_string());
      next = &c;
    }
    if (!next) return out;
    cur = next;
  }
}

std::string bottom_symbol(const RankedAlphabet& a) {
  auto leaves = a.of_rank(0);
  if (leaves.size() != 1) throw InvalidArgument("alphabet does not have a unique leaf symbol");
  return leaves.front();
}

Mtt normalize_monadic(const Mtt& m) {
  if (!m.is_monadic()) throw InvalidArgument("normalize_monadic requires monadic alphabets");
  // Only transducers already over the reserved leaf count as normalized here;
  // any other single leaf is still expanded.
  if (is_normalized(m) && m.input().of_rank(0) == std::vector<std::string>{kBot}) return m;
  if (m.input().contains(kBot) || m.output().contains(kBot) || m.is_state(kBot))
    throw InvalidArgument("the name bot is reserved for normalized transducers");
  Mtt n0 = make_nondeleting(m);
  const Dbta& u = n0.lookahead();

  std::map<std::string, std::string> prime;
  std::set<std::string> used{kBot};
  for (const auto& a : m.input().of_rank(0)) {
    std::string p = fresh(a + "'", [&](const std::string& s) { return used.count(s) || m.input().contains(s); });
    used.insert(p);
    prime[a] = p;
  }
  std::map<std::string, std::string> out_prime;
  auto out_taken = [&](const std::string& s) {
    return m.output().contains(s) || n0.is_state(s) || m.input().contains(s) || s == kBot;
  };
  for (const auto& b : m.output().of_rank(0)) {
    auto it = prime.find(b);
    if (it != prime.end() && !out_taken(it->second)) {
      out_prime[b] = it->second;
      continue;
    }
    std::string p = fresh(b + "'", [&](const std::string& s) { return used.count(s) || out_taken(s); });
    used.insert(p);
    out_prime[b] = p;
  }

  RankedAlphabet in2, out2;
  for (const auto& [a, r] : m.input().symbols()) in2.add(r == 0 ? prime[a] : a, 1);
  in2.add(kBot, 0);
  for (const auto& [b, r] : m.output().symbols()) out2.add(r == 0 ? out_prime[b] : b, 1);
  out2.add(kBot, 0);

  Dbta la(in2);
  for (State q = 0; q < u.num_states(); ++q) la.add_state(u.state_name(q));
  State bot_state = la.add_state(fresh(std::string(kBot), [&](const std::string& s) { return u.find_state(s).has_value(); }));
  for (const auto& [symbol, table] : u.transitions()) {
    for (const auto& [kids, target] : table) {
      if (kids.empty()) la.set_transition(prime.at(symbol), {bot_state}, target);
      else la.set_transition(symbol, kids, target);
    }
  }
  la.set_transition(kBot, {}, bot_state);

  Mtt n(in2, out2);
  for (const auto& q : n0.states().names()) n.add_state(q, n0.params(q));
  n.set_initial(n0.initial());
  n.set_lookahead(la);
  for (const auto& r : n0.rules()) {
    Tree rhs = relabel_leaves(r.rhs, out_prime, kBot);
    if (m.input().rank_of(r.symbol) == 0) {
      n.add_rule(r.state, prime.at(r.symbol), rhs, std::vector<State>{bot_state});
    } else if (r.lookahead) {
      n.add_rule(r.state, r.symbol, rhs, r.lookahead);
    } else {
      for (State p = 0; p < u.num_states(); ++p) n.add_rule(r.state, r.symbol, rhs, std::vector<State>{p});
    }
  }
  return n;
}

bool is_normalized(const Mtt& m) {
  if (!m.is_monadic() || !is_nondeleting(m)) return false;
  for (const auto& q : m.states().names())
    if (m.params(q) > 1) return false;
  auto in0 = m.input().of_rank(0), out0 = m.output().of_rank(0);
  return in0.size() == 1 && out0.size() == 1 && in0 == out0;
}

Tree expand(const Tree& t, const RankedAlphabet& normalized_input) {
  std::string bot = bottom_symbol(normalized_input);
  auto rec = [&](auto&& self, const Tree& s) -> Tree {
    if (s.is_leaf()) {
      std::string p = s.label() + "'";
      while (!normalized_input.contains(p) && p.size() < s.label().size() + 16) p += "'";
      if (normalized_input.rank(p) != std::optional<std::size_t>(1))
        throw AlphabetError("no expanded symbol for leaf " + s.label());
      return Tree(p, {Tree::leaf(bot)});
    }
    if (s.arity() != 1) throw InvalidArgument("expand requires a monadic tree");
    return Tree(s.label(), {self(self, s.child(0))});
  };
  return rec(rec, t);
}

Tree unexpand(const Tree& t, const RankedAlphabet& original_input) {
  if (t.arity() != 1) throw InvalidArgument("not an expanded monadic tree: " + t.to_string());
  if (t.child(0).is_leaf()) {
    std::string a = t.label();
    while (!a.empty() && a.back() == '\'') {
      a.pop_back();
      if (original_input.rank(a) == std::optional<std::size_t>(0)) return Tree::leaf(a);
    }
    throw AlphabetError("no original leaf for " + t.label());
  }
  return Tree(t.label(), {unexpand(t.child(0), original_input)});
}

std::size_t HdtolInstance::letter(const std::string& name) const {
  auto it = std::find(letters.begin(), letters.end(), name);
  if (it == letters.end()) throw InvalidArgument("unknown letter " + name);
  return static_cast<std::size_t>(it - letters.begin());
}

namespace {

HdtolInstance::Word apply_hom(const std::vector<HdtolInstance::Word>& hom, const HdtolInstance::Word& w) {
  HdtolInstance::Word out;
  for (std::size_t b : w) out.insert(out.end(), hom[b].begin(), hom[b].end());
  return out;
}

}  // namespace

std::pair<HdtolInstance::Word, HdtolInstance::Word> HdtolInstance::images(const std::vector<std::size_t>& word) const {
  Word u1 = w1, u2 = w2;
  for (std::size_t j : word) {
    u1 = apply_hom(h.at(j), u1);
    u2 = apply_hom(g.at(j), u2);
  }
  return {apply_hom(h_final, u1), apply_hom(g_final, u2)};
}

std::string HdtolInstance::to_text() const {
  std::ostringstream os;
  auto word = [&](const Word& w, const std::vector<std::string>& names) {
    std::string s;
    for (std::size_t b : w) s += " " + names[b];
    return s;
  };
  auto list = [&](const char* key, const std::vector<std::string>& xs) {
    os << key << ":";
    for (const auto& x : xs) os << " " << x;
    os << "\n";
  };
  os << "kind: hdt0l\n";
  list("letters", letters);
  list("output", output);
  list("indices", indices);
  os << "start1:" << word(w1, letters) << "\n";
  os << "start2:" << word(w2, letters) << "\n";
  for (std::size_t j = 0; j < indices.size(); ++j)
    for (std::size_t b = 0; b < letters.size(); ++b) {
      os << "h " << indices[j] << " " << letters[b] << " ->" << word(h[j][b], letters) << "\n";
      os << "g " << indices[j] << " " << letters[b] << " ->" << word(g[j][b], letters) << "\n";
    }
  for (std::size_t b = 0; b < letters.size(); ++b) {
    os << "hf " << letters[b] << " ->" << word(h_final[b], output) << "\n";
    os << "gf " << letters[b] << " ->" << word(g_final[b], output) << "\n";
  }
  return os.str();
}

HdtolInstance to_hdt0l(const Mtt& m1, const Mtt& m2) {
  check_pair(m1, m2);
  HdtolInstance inst;
  RankedAlphabet out = m1.output().merged(m2.output());
  inst.output = out.of_rank(1);
  inst.letters = inst.output;
  for (const auto& q : m1.states().names()) inst.letters.push_back(q);
  for (const auto& q : m2.states().names()) inst.letters.push_back(q);
  inst.indices = m1.input().of_rank(1);
  std::map<std::string, std::size_t> li, oi;
  for (std::size_t i = 0; i < inst.letters.size(); ++i) li[inst.letters[i]] = i;
  for (std::size_t i = 0; i < inst.output.size(); ++i) oi[inst.output[i]] = i;
  std::string bot = bottom_symbol(m1.input());
  std::size_t n = inst.letters.size();
  inst.h.assign(inst.indices.size(), std::vector<HdtolInstance::Word>(n));
  inst.g = inst.h;
  inst.h_final.assign(n, {});
  inst.g_final.assign(n, {});
  for (std::size_t j = 0; j < inst.indices.size(); ++j) {
    const std::string& a = inst.indices[j];
    for (std::size_t b = 0; b < n; ++b) {
      const std::string& l = inst.letters[b];
      inst.h[j][b] = m1.is_state(l) ? encode(strip(only_rhs(m1, l, a)), li) : HdtolInstance::Word{b};
      inst.g[j][b] = m2.is_state(l) ? encode(strip(only_rhs(m2, l, a)), li) : HdtolInstance::Word{b};
    }
  }
  for (std::size_t b = 0; b < n; ++b) {
    const std::string& l = inst.letters[b];
    // Letters of the other transducer never occur in these images.
    if (oi.count(l)) inst.h_final[b] = inst.g_final[b] = {oi[l]};
    if (m1.is_state(l)) inst.h_final[b] = encode(strip(only_rhs(m1, l, bot)), oi);
    if (m2.is_state(l)) inst.g_final[b] = encode(strip(only_rhs(m2, l, bot)), oi);
  }
  inst.w1 = {li.at(m1.initial())};
  inst.w2 = {li.at(m2.initial())};
  return inst;
}

HdtolInstance to_hdt0l_dfa(const Mtt& m1, const Mtt& m2, const Dfa& a) {
  check_pair(m1, m2);
  if (!a.is_complete()) throw InvalidArgument("control automaton must be complete");
  auto unary = m1.input().of_rank(1);
  {
    auto letters = a.letters();
    std::sort(letters.begin(), letters.end());
    if (letters != unary) throw AlphabetError("control automaton letters differ from the unary input symbols");
  }
  HdtolInstance base = to_hdt0l(m1, m2);
  const std::size_t nb = base.letters.size(), nr = a.num_states();
  HdtolInstance inst;
  inst.output = base.output;
  inst.indices = base.indices;
  for (State r = 0; r < nr; ++r)
    for (const auto& b : base.letters) inst.letters.push_back("<" + a.state_name(r) + "," + b + ">");
  auto at = [&](State r, std::size_t b) { return r * nb + b; };
  auto relabel = [&](const HdtolInstance::Word& w, State r) {
    HdtolInstance::Word out;
    for (std::size_t b : w) out.push_back(at(r, b));
    return out;
  };
  inst.h.assign(inst.indices.size(), std::vector<HdtolInstance::Word>(nr * nb));
  inst.g = inst.h;
  for (std::size_t j = 0; j < inst.indices.size(); ++j) {
    for (State r = 0; r < nr; ++r) {
      State r2 = *a.next(r, inst.indices[j]);
      for (std::size_t b = 0; b < nb; ++b) {
        const std::string& l = base.letters[b];
        bool s1 = m1.is_state(l), s2 = m2.is_state(l);
        inst.h[j][at(r, b)] = s2 ? HdtolInstance::Word{at(r, b)} : relabel(base.h[j][b], r2);
        inst.g[j][at(r, b)] = s1 ? HdtolInstance::Word{at(r, b)} : relabel(base.g[j][b], r2);
      }
    }
  }
  inst.h_final.assign(nr * nb, {});
  inst.g_final.assign(nr * nb, {});
  for (State r = 0; r < nr; ++r) {
    if (!a.is_final(r)) continue;
    for (std::size_t b = 0; b < nb; ++b) {
      inst.h_final[at(r, b)] = base.h_final[b];
      inst.g_final[at(r, b)] = base.g_final[b];
    }
  }
  inst.w1 = {at(a.initial(), base.w1.front())};
  inst.w2 = {at(a.initial(), base.w2.front())};
  return inst;
}

namespace {

// Letters whose images stay empty under every continuation.
std::vector<bool> null_letters(const std::vector<std::vector<HdtolInstance::Word>>& hom,
                               const std::vector<HdtolInstance::Word>& fin) {
  std::vector<bool> null(fin.size());
  for (std::size_t b = 0; b < fin.size(); ++b) null[b] = fin[b].empty();
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t b = 0; b < fin.size(); ++b) {
      if (!null[b]) continue;
      for (const auto& hj : hom)
        for (std::size_t c : hj[b])
          if (!null[c]) {
            null[b] = false;
            changed = true;
          }
    }
  }
  return null;
}

}  // namespace

HdtolCheck check_hdt0l(const HdtolInstance& inst, std::size_t max_len, std::size_t budget) {
  constexpr std::size_t kStoredFactor = 16;
  using Word = HdtolInstance::Word;
  struct Config {
    Word u1, u2;
    std::vector<std::size_t> word;
  };
  auto null_h = null_letters(inst.h, inst.h_final), null_g = null_letters(inst.g, inst.g_final);
  auto prunable = [&](const Config& c) {
    for (std::size_t b : c.u1)
      if (!null_h[b]) return false;
    for (std::size_t b : c.u2)
      if (!null_g[b]) return false;
    return true;
  };
  auto differs = [&](const Config& c) { return apply_hom(inst.h_final, c.u1) != apply_hom(inst.g_final, c.u2); };
  HdtolCheck res;
  res.max_len = max_len;
  std::set<std::pair<Word, Word>> seen;
  std::size_t stored = inst.w1.size() + inst.w2.size();
  std::vector<Config> level{{inst.w1, inst.w2, {}}};
  seen.insert({inst.w1, inst.w2});
  res.configurations = 1;
  if (differs(level.front())) {
    res.counterexample = true;
    return res;
  }
  if (prunable(level.front())) level.clear();
  for (std::size_t len = 1; len <= max_len && !level.empty(); ++len) {
    std::vector<Config> next;
    for (const Config& c : level) {
      for (std::size_t j = 0; j < inst.indices.size(); ++j) {
        Config d{apply_hom(inst.h[j], c.u1), apply_hom(inst.g[j], c.u2), c.word};
        d.word.push_back(j);
        if (d.u1.size() > budget || d.u2.size() > budget)
          throw ResourceError("HDT0L sentential form exceeded " + std::to_string(budget) + " letters");
        if (!seen.insert({d.u1, d.u2}).second) continue;
        stored += d.u1.size() + d.u2.size();
        if (stored > kStoredFactor * budget)
          throw ResourceError("HDT0L configurations exceeded " + std::to_string(kStoredFactor * budget) +
                              " stored letters");
        ++res.configurations;
        if (differs(d)) {
          res.counterexample = true;
          res.word = d.word;
          return res;
        }
        if (!prunable(d)) next.push_back(std::move(d));
      }
    }
    level = std::move(next);
  }
  return res;
}

std::string to_string(MonadicVerdict v) {
  switch (v) {
    case MonadicVerdict::NoCounterexample: return "no counterexample";
    case MonadicVerdict::NotEquivalent: return "not equivalent";
    case MonadicVerdict::DomainMismatch: return "domain mismatch";
  }
  return "?";
}

MonadicReduction reduce_monadic(const Mtt& m1, const Mtt& m2) {
  if (!m1.is_monadic() || !m2.is_monadic()) throw InvalidArgument("monadic transducers required");
  if (m1.input() != m2.input()) throw AlphabetError("transducers have different input alphabets");
  Mtt a = normalize_monadic(m1), b = normalize_monadic(m2);
  if (a.input() != b.input()) throw InternalError("normalized input alphabets differ");
  RankedAlphabet out = a.output().merged(b.output());
  {
    std::set<std::string> avoid;
    for (const auto& [s, r] : out.symbols()) avoid.insert(s);
    a = rename_states(a, avoid);
    for (const auto& q : a.states().names()) avoid.insert(q);
    b = rename_states(b, avoid);
  }
  const RankedAlphabet& sigma = a.input();
  const std::string bot = bottom_symbol(sigma);
  Dbta l1 = complete(a.lookahead()), l2 = complete(b.lookahead());
  const State sink1 = a.lookahead().num_states(), sink2 = b.lookahead().num_states();

  // Child look-ahead pairs that occur on some tree.
  auto pairs = explore<std::vector<long>, VectorHash>(
      sigma, [&](const std::string& s, std::span<const std::vector<long>* const> kids) -> std::optional<std::vector<long>> {
        std::vector<State> c1, c2;
        for (const auto* k : kids) {
          c1.push_back(static_cast<State>((*k)[0]));
          c2.push_back(static_cast<State>((*k)[1]));
        }
        return std::vector<long>{static_cast<long>(*l1.transition(s, c1)), static_cast<long>(*l2.transition(s, c2))};
      });
  RankedAlphabet annotated;
  annotated.add(bot, 0);
  std::map<std::string, std::tuple<std::string, State, State>> meaning;
  for (const auto& s : sigma.of_rank(1)) {
    for (const auto& p : pairs.states) {
      std::string name = "<" + s + "," + l1.state_name(p[0]) + "," + l2.state_name(p[1]) + ">";
      annotated.add(name, 1);
      meaning[name] = {s, static_cast<State>(p[0]), static_cast<State>(p[1])};
    }
  }

  Dbta dom = intersect(domain_automaton(a), domain_automaton(b));
  auto e = explore<std::vector<long>, VectorHash>(
      annotated, [&](const std::string& s, std::span<const std::vector<long>* const> kids) -> std::optional<std::vector<long>> {
        if (kids.empty()) {
          auto d = dom.transition(s, {});
          if (!d) return std::nullopt;
          return std::vector<long>{static_cast<long>(*l1.transition(s, {})), static_cast<long>(*l2.transition(s, {})),
                                   static_cast<long>(*d)};
        }
        const auto& [base, p1, p2] = meaning.at(s);
        const auto& k = *kids[0];
        if (k[0] != static_cast<long>(p1) || k[1] != static_cast<long>(p2)) return std::nullopt;
        std::vector<State> c1{p1}, c2{p2}, cd{static_cast<State>(k[2])};
        auto d = dom.transition(base, cd);
        if (!d) return std::nullopt;
        return std::vector<long>{static_cast<long>(*l1.transition(base, c1)), static_cast<long>(*l2.transition(base, c2)),
                                 static_cast<long>(*d)};
      });
  for (State q = 0; q < e.states.size(); ++q) e.automaton.set_final(q, dom.is_final(static_cast<State>(e.states[q][2])));

  std::string dead = fresh("dead", [&](const std::string& s) { return out.contains(s) || a.is_state(s) || b.is_state(s); });
  RankedAlphabet out2 = out;
  out2.add(dead, 1);
  auto totalize = [&](const Mtt& m, bool first) {
    Mtt t(annotated, out2);
    for (const auto& q : m.states().names()) t.add_state(q, m.params(q));
    t.set_initial(m.initial());
    for (const auto& q : m.states().names()) {
      Tree fallback(dead, {Tree::leaf(m.params(q) == 0 ? bot : param_var(1))});
      for (const auto& [s, r] : annotated.symbols()) {
        const MttRule* rule = nullptr;
        if (r == 0) {
          rule = m.find_rule(q, s, {});
        } else {
          const auto& [base, p1, p2] = meaning.at(s);
          State p = first ? p1 : p2;
          std::optional<State> la = p == (first ? sink1 : sink2) ? std::nullopt : std::optional<State>(p);
          rule = m.find_rule(q, base, std::span<const std::optional<State>>(&la, 1));
        }
        t.add_rule(q, s, rule ? rule->rhs : fallback);
      }
    }
    return t;
  };
  MonadicReduction red{totalize(a, true), totalize(b, false), e.automaton, Dfa{}, HdtolInstance{}, sigma};
  red.control = monadic_to_dfa(red.e, bot);
  red.instance = to_hdt0l_dfa(red.n1, red.n2, red.control);
  return red;
}

MonadicEquivResult decide_equiv_monadic(const Mtt& m1, const Mtt& m2, std::size_t max_len, std::size_t budget) {
  if (!m1.is_monadic() || !m2.is_monadic()) throw InvalidArgument("monadic transducers required");
  if (m1.input() != m2.input()) throw AlphabetError("transducers have different input alphabets");
  MonadicEquivResult res{MonadicVerdict::NoCounterexample, std::nullopt, max_len, 0};
  if (auto sep = find_separator(domain_automaton(m1), domain_automaton(m2))) {
    res.verdict = MonadicVerdict::DomainMismatch;
    res.witness = *sep;
    return res;
  }
  MonadicReduction red = reduce_monadic(m1, m2);
  HdtolCheck chk = check_hdt0l(red.instance, max_len, budget);
  res.configurations = chk.configurations;
  if (!chk.counterexample) return res;
  Tree t = Tree::leaf(bottom_symbol(red.n1.input()));
  for (auto it = chk.word.rbegin(); it != chk.word.rend(); ++it) t = Tree(red.instance.indices[*it], {t});
  Tree s = unexpand(erase_annotation(t), m1.input());
  auto o1 = eval(m1, s), o2 = eval(m2, s);
  if (!o1 || !o2 || *o1 == *o2)
    throw InternalError("HDT0L counterexample " + s.to_string() + " does not separate the transducers");
  res.verdict = MonadicVerdict::NotEquivalent;
  res.witness = s;
  return res;
}

}  // namespace tteq
