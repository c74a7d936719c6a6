#include "tteq/earliest.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "tteq/dtop_equiv.hpp"
#include "tteq/error.hpp"

namespace tteq {

namespace {

bool is_call(const AxiomDtop& a, const Tree& t) {
  return t.arity() == 1 && is_input_var(t.child(0).label()) &&
         std::binary_search(a.states.begin(), a.states.end(), t.label());
}

// Every state call in preorder.
void calls_in(const AxiomDtop& a, const Tree& t, std::vector<std::string>& out) {
  if (is_call(a, t)) {
    out.push_back(t.label());
    return;
  }
  for (const Tree& c : t.children()) calls_in(a, c, out);
}

void sort_states(AxiomDtop& a) {
  std::sort(a.states.begin(), a.states.end());
  a.states.erase(std::unique(a.states.begin(), a.states.end()), a.states.end());
}

// Drops states not reachable from the axiom.
void prune(AxiomDtop& a) {
  std::set<std::string> live;
  std::deque<std::string> work;
  auto visit = [&](const Tree& t) {
    std::vector<std::string> cs;
    calls_in(a, t, cs);
    for (auto& c : cs)
      if (live.insert(c).second) work.push_back(c);
  };
  visit(a.axiom);
  while (!work.empty()) {
    std::string q = work.front();
    work.pop_front();
    for (const auto& [sigma, rank] : a.input.symbols()) visit(a.rhs(q, sigma));
  }
  std::vector<std::string> kept;
  for (const auto& q : a.states)
    if (live.count(q)) kept.push_back(q);
  for (auto it = a.rules.begin(); it != a.rules.end();) {
    if (!live.count(it->first.first)) it = a.rules.erase(it);
    else ++it;
  }
  a.states = std::move(kept);
}

// Least fixpoint of the set of root labels each state can produce.
std::map<std::string, std::set<std::string>> possible_roots(const AxiomDtop& a) {
  std::map<std::string, std::set<std::string>> roots;
  for (const auto& q : a.states) roots[q];
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& q : a.states) {
      auto& mine = roots[q];
      std::size_t before = mine.size();
      for (const auto& [sigma, rank] : a.input.symbols()) {
        const Tree& r = a.rhs(q, sigma);
        if (is_call(a, r)) {
          const auto& other = roots[r.label()];
          mine.insert(other.begin(), other.end());
        } else {
          mine.insert(r.label());
        }
      }
      changed = changed || mine.size() != before;
    }
  }
  return roots;
}

void check_total_dtop(const Mtt& m) {
  if (!m.is_dtop()) throw InvalidArgument("expected a DTOP (all states of rank 1)");
  if (m.has_lookahead()) throw InvalidArgument("expected a DTOP without look-ahead");
  if (!m.is_total()) throw InvalidArgument("expected a total DTOP");
}

std::string fresh_name(const AxiomDtop& a, std::string name) {
  while (std::binary_search(a.states.begin(), a.states.end(), name) || a.output.contains(name)) name += "'";
  return name;
}

}  // namespace

std::string AxiomDtop::to_string() const {
  std::string out = "axiom: " + axiom.to_string() + "\n";
  for (const auto& q : states) {
    for (const auto& [sigma, rank] : input.symbols()) {
      auto it = rules.find({q, sigma});
      if (it == rules.end()) continue;
      std::string lhs = sigma;
      if (rank > 0) {
        lhs += "(";
        for (std::size_t i = 1; i <= rank; ++i) lhs += (i > 1 ? "," : "") + input_var(i);
        lhs += ")";
      }
      out += q + "(" + lhs + ") -> " + it->second.to_string() + "\n";
    }
  }
  return out;
}

bool operator==(const AxiomDtop& a, const AxiomDtop& b) {
  return a.input == b.input && a.output == b.output && a.states == b.states && a.axiom == b.axiom &&
         a.rules == b.rules;
}

AxiomDtop with_axiom(const Mtt& m) {
  check_total_dtop(m);
  AxiomDtop a{m.input(), m.output(), m.states().names(), Tree(m.initial(), {Tree::leaf(std::string(kAxiomVar))}), {}};
  for (const auto& r : m.rules()) a.rules.emplace(std::make_pair(r.state, r.symbol), r.rhs);
  return a;
}

Mtt to_mtt(const AxiomDtop& a) {
  if (!is_call(a, a.axiom) || a.axiom.child(0).label() != kAxiomVar)
    throw InvalidArgument("axiom is not a single state call on x0");
  Mtt m(a.input, a.output);
  for (const auto& q : a.states) m.add_state(q);
  m.set_initial(a.axiom.label());
  for (const auto& [key, rhs] : a.rules) m.add_rule(key.first, key.second, rhs);
  return m;
}

std::optional<Tree> eval(const AxiomDtop& a, const Tree& s) {
  Mtt m(a.input, a.output);
  for (const auto& q : a.states) m.add_state(q);
  for (const auto& [key, rhs] : a.rules) m.add_rule(key.first, key.second, rhs);
  check_tree(s, a.input);
  std::map<std::string, std::optional<Tree>> cache;
  auto rec = [&](auto&& self, const Tree& t) -> std::optional<Tree> {
    if (is_call(a, t)) {
      auto it = cache.find(t.label());
      if (it == cache.end()) it = cache.emplace(t.label(), eval_state(m, t.label(), s)).first;
      return it->second;
    }
    std::vector<Tree> kids;
    for (const Tree& c : t.children()) {
      auto k = self(self, c);
      if (!k) return std::nullopt;
      kids.push_back(std::move(*k));
    }
    return Tree(t.label(), std::move(kids));
  };
  return rec(rec, a.axiom);
}

bool is_earliest(const AxiomDtop& a) {
  auto roots = possible_roots(a);
  for (const auto& [q, r] : roots)
    if (r.size() == 1) return false;
  return true;
}

AxiomDtop make_earliest(const Mtt& m) { return make_earliest(with_axiom(m)); }

AxiomDtop make_earliest(AxiomDtop a) {
  sort_states(a);
  prune(a);
  for (std::size_t round = 0;; ++round) {
    if (round > 100000) throw ResourceError("earliest construction did not stabilize");
    auto roots = possible_roots(a);
    // States with a fixed root symbol, and the names of their children states.
    std::map<std::string, std::pair<std::string, std::vector<std::string>>> fixed;
    AxiomDtop names_view = a;
    for (const auto& [q, r] : roots) {
      if (r.size() != 1) continue;
      const std::string& delta = *r.begin();
      std::vector<std::string> parts;
      for (std::size_t j = 1; j <= a.output.rank_of(delta); ++j) {
        std::string n = fresh_name(names_view, "<" + q + "," + std::to_string(j) + ">");
        names_view.states.push_back(n);
        std::sort(names_view.states.begin(), names_view.states.end());
        parts.push_back(n);
      }
      fixed.emplace(q, std::make_pair(delta, std::move(parts)));
    }
    if (fixed.empty()) break;

    auto replace = [&](auto&& self, const Tree& t) -> Tree {
      if (is_call(a, t)) {
        auto it = fixed.find(t.label());
        if (it == fixed.end()) return t;
        std::vector<Tree> kids;
        for (const auto& part : it->second.second) kids.emplace_back(part, std::vector<Tree>{t.child(0)});
        return Tree(it->second.first, std::move(kids));
      }
      if (t.is_leaf()) return t;
      std::vector<Tree> kids;
      for (const Tree& c : t.children()) kids.push_back(self(self, c));
      return Tree(t.label(), std::move(kids));
    };
    AxiomDtop next{a.input, a.output, {}, replace(replace, a.axiom), {}};
    for (const auto& q : a.states)
      if (!fixed.count(q)) next.states.push_back(q);
    for (const auto& [q, f] : fixed)
      for (const auto& part : f.second) next.states.push_back(part);
    for (const auto& [key, rhs] : a.rules) {
      Tree r = replace(replace, rhs);
      auto it = fixed.find(key.first);
      if (it == fixed.end()) {
        next.rules.emplace(key, r);
        continue;
      }
      if (r.label() != it->second.first) throw InternalError("earliest step produced an unexpected root");
      for (std::size_t j = 0; j < it->second.second.size(); ++j)
        next.rules.emplace(std::make_pair(it->second.second[j], key.second), r.child(j));
    }
    sort_states(next);
    prune(next);
    a = std::move(next);
  }
  return a;
}

AxiomDtop merge_equivalent_states(const AxiomDtop& in) {
  AxiomDtop a = in;
  sort_states(a);
  if (!is_earliest(a)) throw InvalidArgument("merge_equivalent_states requires an earliest transducer");
  prune(a);
  const std::size_t n = a.states.size();
  std::map<std::string, std::size_t> id;
  for (std::size_t i = 0; i < n; ++i) id[a.states[i]] = i;

  std::vector<std::size_t> block(n, 0);
  std::size_t blocks = n ? 1 : 0;
  auto signature = [&](std::size_t q) {
    std::string sig;
    auto rec = [&](auto&& self, const Tree& t) -> void {
      if (is_call(a, t)) {
        sig += "#" + std::to_string(block[id[t.label()]]) + "(" + t.child(0).label() + ")";
        return;
      }
      sig += t.label();
      if (t.is_leaf()) return;
      sig += "(";
      for (std::size_t i = 0; i < t.arity(); ++i) {
        if (i) sig += ",";
        self(self, t.child(i));
      }
      sig += ")";
    };
    for (const auto& [sigma, rank] : a.input.symbols()) {
      rec(rec, a.rhs(a.states[q], sigma));
      sig += ";";
    }
    return sig;
  };
  while (true) {
    std::map<std::pair<std::size_t, std::string>, std::size_t> split;
    std::vector<std::size_t> next(n);
    for (std::size_t q = 0; q < n; ++q) {
      auto key = std::make_pair(block[q], signature(q));
      auto it = split.find(key);
      if (it == split.end()) it = split.emplace(key, split.size()).first;
      next[q] = it->second;
    }
    std::size_t count = split.size();
    block = std::move(next);
    if (count == blocks) break;
    blocks = count;
  }

  // Representative: first state of the block in breadth-first order from the axiom.
  std::vector<std::string> order;
  {
    std::set<std::string> seen;
    std::deque<std::string> work;
    auto visit = [&](const Tree& t) {
      std::vector<std::string> cs;
      calls_in(a, t, cs);
      for (auto& c : cs)
        if (seen.insert(c).second) {
          work.push_back(c);
          order.push_back(c);
        }
    };
    visit(a.axiom);
    while (!work.empty()) {
      auto q = work.front();
      work.pop_front();
      for (const auto& [sigma, rank] : a.input.symbols()) visit(a.rhs(q, sigma));
    }
  }
  std::map<std::size_t, std::string> rep;
  for (const auto& q : order) rep.emplace(block[id[q]], q);
  auto rewrite = [&](auto&& self, const Tree& t) -> Tree {
    if (is_call(a, t)) return Tree(rep.at(block[id[t.label()]]), {t.child(0)});
    if (t.is_leaf()) return t;
    std::vector<Tree> kids;
    for (const Tree& c : t.children()) kids.push_back(self(self, c));
    return Tree(t.label(), std::move(kids));
  };
  AxiomDtop out{a.input, a.output, {}, rewrite(rewrite, a.axiom), {}};
  for (const auto& [b, q] : rep) out.states.push_back(q);
  sort_states(out);
  for (const auto& q : out.states)
    for (const auto& [sigma, rank] : a.input.symbols()) out.rules.emplace(std::make_pair(q, sigma), rewrite(rewrite, a.rhs(q, sigma)));
  prune(out);
  return out;
}

AxiomDtop rename_canonically(const AxiomDtop& in) {
  AxiomDtop a = in;
  sort_states(a);
  std::map<std::string, std::string> names;
  std::deque<std::string> work;
  auto visit = [&](const Tree& t) {
    std::vector<std::string> cs;
    calls_in(a, t, cs);
    for (auto& c : cs)
      if (!names.count(c)) {
        names.emplace(c, "q" + std::to_string(names.size()));
        work.push_back(c);
      }
  };
  visit(a.axiom);
  while (!work.empty()) {
    auto q = work.front();
    work.pop_front();
    for (const auto& [sigma, rank] : a.input.symbols()) visit(a.rhs(q, sigma));
  }
  auto rewrite = [&](auto&& self, const Tree& t) -> Tree {
    if (is_call(a, t)) return Tree(names.at(t.label()), {t.child(0)});
    if (t.is_leaf()) return t;
    std::vector<Tree> kids;
    for (const Tree& c : t.children()) kids.push_back(self(self, c));
    return Tree(t.label(), std::move(kids));
  };
  AxiomDtop out{a.input, a.output, {}, rewrite(rewrite, a.axiom), {}};
  for (const auto& [old, fresh] : names) {
    out.states.push_back(fresh);
    for (const auto& [sigma, rank] : a.input.symbols())
      out.rules.emplace(std::make_pair(fresh, sigma), rewrite(rewrite, a.rhs(old, sigma)));
  }
  sort_states(out);
  return out;
}

AxiomDtop canonical(const Mtt& m) { return rename_canonically(merge_equivalent_states(make_earliest(m))); }

TotalEquivResult equiv_total_dtop(const Mtt& m1, const Mtt& m2) {
  if (m1.input() != m2.input()) throw AlphabetError("transducers have different input alphabets");
  check_total_dtop(m1);
  check_total_dtop(m2);
  TotalEquivResult res{false, std::nullopt, canonical(m1), canonical(m2)};
  // Output alphabets may differ in unused symbols; compare everything else.
  AxiomDtop c2 = res.canonical2;
  c2.output = res.canonical1.output;
  res.equal = res.canonical1 == c2;
  if (!res.equal) {
    auto d = decide_equiv_dtop(m1, m2);
    if (d.verdict == EquivVerdict::Equivalent)
      throw InternalError("canonical forms differ but no counterexample exists");
    res.witness = d.witness;
  }
  return res;
}

}  // namespace tteq
