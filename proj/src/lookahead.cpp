#include "tteq/lookahead.hpp"

#include <unordered_map>

#include "tteq/error.hpp"

namespace tteq {

namespace {

Dbta trivial_lookahead(const RankedAlphabet& sigma) {
  Dbta d(sigma);
  State q = d.add_state("_");
  for (const auto& [symbol, rank] : sigma.symbols()) d.set_transition(symbol, std::vector<State>(rank, q), q);
  return d;
}

std::string annotated_name(const std::string& symbol, const Dbta& la1, const Dbta& la2, std::span<const State> p,
                           std::span<const State> q) {
  std::string out = "<" + symbol;
  for (State s : p) out += "," + la1.state_name(s);
  for (State s : q) out += "," + la2.state_name(s);
  return out + ">";
}

Mtt relabel(const Mtt& m, const RankedAlphabet& sigma,
            const std::vector<std::tuple<std::string, std::string, std::vector<State>, std::vector<State>>>& symbols,
            bool first) {
  Mtt out(sigma, m.output());
  for (const auto& [name, rank] : m.states().symbols()) out.add_state(name, rank - 1);
  out.set_initial(m.initial());
  for (const auto& [ann, base, p, q] : symbols) {
    const auto& mine = first ? p : q;
    std::vector<std::optional<State>> tuple(mine.begin(), mine.end());
    for (const auto& qname : m.states().names())
      if (const MttRule* r = m.find_rule(qname, base, tuple)) out.add_rule(qname, ann, r->rhs);
  }
  return out;
}

}  // namespace

std::string base_symbol(const std::string& annotated) {
  if (annotated.size() < 2 || annotated.front() != '<' || annotated.back() != '>') return annotated;
  std::size_t depth = 0;
  for (std::size_t i = 1; i + 1 < annotated.size(); ++i) {
    char c = annotated[i];
    if (c == '<') ++depth;
    else if (c == '>') --depth;
    else if (c == ',' && depth == 0) return annotated.substr(1, i - 1);
  }
  return annotated.substr(1, annotated.size() - 2);
}

Tree erase_annotation(const Tree& t) {
  std::vector<Tree> kids;
  for (const Tree& c : t.children()) kids.push_back(erase_annotation(c));
  return Tree(base_symbol(t.label()), std::move(kids));
}

LookaheadElimination eliminate_lookahead_pair(const Mtt& m1, const Mtt& m2) {
  if (!m1.is_dtop() || !m2.is_dtop()) throw InvalidArgument("look-ahead elimination requires DTOPs");
  if (m1.input() != m2.input()) throw AlphabetError("transducers have different input alphabets");
  const RankedAlphabet& sigma = m1.input();
  if (!m1.has_lookahead() && !m2.has_lookahead())
    return {m1, m2, all_trees(sigma), false, trivial_lookahead(sigma), trivial_lookahead(sigma)};

  Dbta la1 = m1.has_lookahead() ? complete(m1.lookahead()) : trivial_lookahead(sigma);
  Dbta la2 = m2.has_lookahead() ? complete(m2.lookahead()) : trivial_lookahead(sigma);
  Dbta pair = product(la1, la2, [](auto, auto) { return true; });

  // Components of each pair state, recovered from a witness run.
  std::vector<std::pair<State, State>> comp(pair.num_states());
  auto witnesses = min_height_witnesses(pair);
  for (State s = 0; s < pair.num_states(); ++s) comp[s] = {*la1.run(*witnesses[s]), *la2.run(*witnesses[s])};

  RankedAlphabet annotated;
  std::vector<std::tuple<std::string, std::string, std::vector<State>, std::vector<State>>> symbols;
  std::vector<std::tuple<std::string, std::vector<State>, State>> e_rules;
  for (const auto& [symbol, table] : pair.transitions()) {
    for (const auto& [tuple, target] : table) {
      std::vector<State> p, q;
      for (State c : tuple) {
        p.push_back(comp[c].first);
        q.push_back(comp[c].second);
      }
      std::string name = annotated_name(symbol, la1, la2, p, q);
      if (!annotated.contains(name)) {
        annotated.add(name, tuple.size());
        symbols.emplace_back(name, symbol, p, q);
      }
      e_rules.emplace_back(name, tuple, target);
    }
  }
  Dbta e(annotated);
  for (State s = 0; s < pair.num_states(); ++s) {
    e.add_state("<" + la1.state_name(comp[s].first) + "," + la2.state_name(comp[s].second) + ">");
    e.set_final(s);
  }
  for (auto& [name, tuple, target] : e_rules) e.set_transition(name, tuple, target);

  return {relabel(m1, annotated, symbols, true), relabel(m2, annotated, symbols, false), std::move(e), true,
          std::move(la1), std::move(la2)};
}

Tree annotate(const LookaheadElimination& el, const Tree& s) {
  if (!el.annotated) return s;
  std::unordered_map<const void*, std::pair<State, State>> memo;
  auto run = [&](auto&& self, const Tree& t) -> std::pair<Tree, std::pair<State, State>> {
    std::vector<Tree> kids;
    std::vector<State> p, q;
    for (const Tree& c : t.children()) {
      auto [ct, st] = self(self, c);
      kids.push_back(std::move(ct));
      p.push_back(st.first);
      q.push_back(st.second);
    }
    auto a = el.la1.transition(t.label(), p);
    auto b = el.la2.transition(t.label(), q);
    if (!a || !b) throw AlphabetError("symbol '" + t.label() + "' is not in the input alphabet");
    return {Tree(annotated_name(t.label(), el.la1, el.la2, p, q), std::move(kids)), {*a, *b}};
  };
  return run(run, s).first;
}

Mtt from_bottom_up(const Butt& b) {
  if (!b.is_deterministic()) throw InvalidArgument("bottom-up transducer is not deterministic");
  Dbta la(b.input());
  for (State q = 0; q < b.num_states(); ++q) la.add_state(b.state_name(q));
  for (const auto& r : b.rules()) la.set_transition(r.symbol, r.children, r.target);

  bool all_final = true;
  for (State q = 0; q < b.num_states(); ++q) all_final = all_final && b.is_final(q);
  std::string p = "p", p0 = "p0";
  while (b.output().contains(p) || b.output().contains(p0)) {
    p += "'";
    p0 += "'";
  }
  Mtt out(b.input(), b.output());
  out.add_state(p);
  if (!all_final) out.add_state(p0);
  out.set_initial(all_final ? p : p0);
  out.set_lookahead(la);
  for (const auto& r : b.rules()) {
    std::map<std::string, Tree, std::less<>> calls;
    for (std::size_t i = 1; i <= r.children.size(); ++i)
      calls.emplace(input_var(i), Tree(p, {Tree::leaf(input_var(i))}));
    Tree rhs = substitute_leaves(r.rhs, calls);
    out.add_rule(p, r.symbol, rhs, r.children);
    if (!all_final && b.is_final(r.target)) out.add_rule(p0, r.symbol, rhs, r.children);
  }
  return out;
}

}  // namespace tteq
