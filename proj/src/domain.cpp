#include "tteq/domain.hpp"

#include <bit>
#include <deque>
#include <set>

#include "tteq/error.hpp"

namespace tteq {

namespace {

std::size_t table_size(std::size_t p, std::size_t m) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < m; ++i) n *= p;
  return n;
}

std::vector<std::optional<State>> child_lookahead(std::span<const std::vector<long>* const> kids) {
  std::vector<std::optional<State>> out;
  out.reserve(kids.size());
  for (const auto* k : kids) out.push_back((*k)[0] < 0 ? std::nullopt : std::optional<State>((*k)[0]));
  return out;
}

long lookahead_step(const Mtt& m, const std::string& symbol, std::span<const std::vector<long>* const> kids) {
  if (!m.has_lookahead()) return 0;
  std::vector<State> ps;
  for (const auto* k : kids) {
    if ((*k)[0] < 0) return -1;
    ps.push_back(static_cast<State>((*k)[0]));
  }
  auto r = m.lookahead().transition(symbol, ps);
  return r ? static_cast<long>(*r) : -1;
}

}  // namespace

InverseResult inverse_regular_full(const Mtt& m, const Dbta& b, const InverseOptions& opt) {
  if (b.alphabet() != m.output())
    throw AlphabetError("automaton alphabet {" + b.alphabet().to_string() + "} differs from the output alphabet {" +
                        m.output().to_string() + "}");
  if (m.max_params() > opt.max_params)
    throw InvalidArgument("transducer has states with " + std::to_string(m.max_params()) +
                          " parameters; the limit is " + std::to_string(opt.max_params));
  if (m.initial().empty()) throw InvalidArgument("transducer has no initial state");
  Dbta bc = complete(b);
  const std::size_t P = bc.num_states();
  const std::size_t nq = m.num_states();
  std::vector<std::size_t> offset(nq + 1, 1), params(nq);
  for (std::size_t q = 0; q < nq; ++q) {
    params[q] = m.params(m.state_name(q));
    offset[q + 1] = offset[q] + table_size(P, params[q]);
  }

  auto step = [&](const std::string& symbol,
                  std::span<const std::vector<long>* const> kids) -> std::optional<std::vector<long>> {
    std::vector<long> out(offset[nq], -1);
    out[0] = lookahead_step(m, symbol, kids);
    auto la = child_lookahead(kids);
    std::vector<std::size_t> tuple;
    // Value of a rhs node in B under parameter assignment `tuple`; -1 if undefined.
    auto value = [&](auto&& self, const Tree& t) -> long {
      const std::string& l = t.label();
      if (m.is_state(l)) {
        std::size_t i = *variable_index(t.child(0).label(), 'x');
        std::size_t index = 0;
        for (std::size_t c = t.arity(); c-- > 1;) {
          long v = self(self, t.child(c));
          if (v < 0) return -1;
          index = index * P + static_cast<std::size_t>(v);
        }
        return (*kids[i - 1])[offset[m.state_index(l)] + index];
      }
      if (auto j = variable_index(l, 'y'); j && t.is_leaf()) return static_cast<long>(tuple[*j - 1]);
      std::vector<State> vals;
      vals.reserve(t.arity());
      for (const Tree& c : t.children()) {
        long v = self(self, c);
        if (v < 0) return -1;
        vals.push_back(static_cast<State>(v));
      }
      auto r = bc.transition(l, vals);
      return r ? static_cast<long>(*r) : -1;
    };
    for (std::size_t q = 0; q < nq; ++q) {
      const MttRule* r = m.find_rule(m.state_name(q), symbol, la);
      if (!r) continue;
      std::size_t n = offset[q + 1] - offset[q];
      tuple.assign(params[q], 0);
      for (std::size_t idx = 0; idx < n; ++idx) {
        // Parameter j is digit j-1 (least significant first).
        std::size_t rest = idx;
        for (std::size_t j = 0; j < params[q]; ++j) {
          tuple[j] = rest % P;
          rest /= P;
        }
        out[offset[q] + idx] = value(value, r->rhs);
      }
    }
    return out;
  };

  auto ex = explore<std::vector<long>, VectorHash>(m.input(), step, opt.state_budget);
  std::size_t q0 = m.state_index(m.initial());
  InverseResult res{std::move(ex.automaton), {}};
  res.states.reserve(ex.states.size());
  for (State s = 0; s < ex.states.size(); ++s) {
    const auto& v = ex.states[s];
    long top = v[offset[q0]];
    res.automaton.set_final(s, top >= 0 && bc.is_final(static_cast<State>(top)));
    InverseState st{v[0], {}};
    for (std::size_t q = 0; q < nq; ++q) st.alpha.emplace_back(v.begin() + offset[q], v.begin() + offset[q + 1]);
    res.states.push_back(std::move(st));
  }
  return res;
}

Dbta inverse_regular(const Mtt& m, const Dbta& b, const InverseOptions& opt) {
  return inverse_regular_full(m, b, opt).automaton;
}

Dbta domain_automaton(const Mtt& m, const InverseOptions& opt) {
  return inverse_regular(m, all_trees(m.output()), opt);
}

// ---------------------------------------------------------------------------
// Parameter usage

namespace {

// Parameters occurring in the value of `t`, given the usage of every state
// at the children; nullopt when some call is undefined.
std::optional<std::uint32_t> rhs_usage(const Mtt& m, const Tree& t,
                                       const std::function<std::optional<std::uint32_t>(std::size_t, std::size_t)>& at) {
  const std::string& l = t.label();
  if (m.is_state(l)) {
    std::size_t i = *variable_index(t.child(0).label(), 'x');
    auto u = at(i - 1, m.state_index(l));
    if (!u) return std::nullopt;
    std::uint32_t out = 0;
    for (std::size_t c = 1; c < t.arity(); ++c) {
      auto a = rhs_usage(m, t.child(c), at);
      if (!a) return std::nullopt;
      if (*u & (1u << (c - 1))) out |= *a;
    }
    return out;
  }
  if (auto j = variable_index(l, 'y'); j && t.is_leaf()) return 1u << (*j - 1);
  std::uint32_t out = 0;
  for (const Tree& c : t.children()) {
    auto a = rhs_usage(m, c, at);
    if (!a) return std::nullopt;
    out |= *a;
  }
  return out;
}

}  // namespace

ParamUsage param_usage(const Mtt& m, std::size_t state_budget) {
  if (m.max_params() > 32) throw InvalidArgument("at most 32 parameters are supported");
  const std::size_t nq = m.num_states();
  auto step = [&](const std::string& symbol,
                  std::span<const std::vector<long>* const> kids) -> std::optional<std::vector<long>> {
    std::vector<long> out(nq + 1, -1);
    out[0] = lookahead_step(m, symbol, kids);
    auto la = child_lookahead(kids);
    auto at = [&](std::size_t child, std::size_t q) -> std::optional<std::uint32_t> {
      long v = (*kids[child])[q + 1];
      if (v < 0) return std::nullopt;
      return static_cast<std::uint32_t>(v);
    };
    for (std::size_t q = 0; q < nq; ++q) {
      const MttRule* r = m.find_rule(m.state_name(q), symbol, la);
      if (!r) continue;
      if (auto u = rhs_usage(m, r->rhs, at)) out[q + 1] = static_cast<long>(*u);
    }
    return out;
  };
  auto ex = explore<std::vector<long>, VectorHash>(m.input(), step, state_budget);
  ParamUsage pu{std::move(ex.automaton), {}, {}};
  for (const auto& v : ex.states) {
    pu.lookahead.push_back(v[0]);
    std::vector<std::optional<std::uint32_t>> row;
    for (std::size_t q = 0; q < nq; ++q)
      row.push_back(v[q + 1] < 0 ? std::nullopt : std::optional<std::uint32_t>(static_cast<std::uint32_t>(v[q + 1])));
    pu.usage.push_back(std::move(row));
  }
  return pu;
}

std::optional<std::uint32_t> usage_of(const Mtt& m, const ParamUsage& pu, const std::string& q, const Tree& s) {
  auto st = pu.automaton.run(s);
  if (!st) return std::nullopt;
  return pu.usage[*st][m.state_index(q)];
}

// ---------------------------------------------------------------------------
// Nondeleting transform

namespace {

std::string specialized_name(const Mtt& m, const std::string& q, std::uint32_t used) {
  std::size_t params = m.params(q);
  std::uint32_t full = params >= 32 ? ~0u : ((1u << params) - 1);
  if (used == full) return q;
  std::string out = "<" + q;
  for (std::size_t j = 1; j <= params; ++j)
    if (used & (1u << (j - 1))) out += "," + param_var(j);
  return out + ">";
}

}  // namespace

Mtt make_nondeleting(const Mtt& m) {
  if (!m.output().is_monadic()) throw InvalidArgument("make_nondeleting requires a monadic output alphabet");
  if (m.initial().empty()) throw InvalidArgument("transducer has no initial state");
  ParamUsage pu = param_usage(m);
  const Dbta& u = pu.automaton;
  Mtt out(m.input(), m.output());
  out.set_lookahead(u);

  std::set<std::pair<std::size_t, std::uint32_t>> seen;
  std::deque<std::pair<std::size_t, std::uint32_t>> work;
  auto discover = [&](std::size_t q, std::uint32_t used) {
    if (!seen.insert({q, used}).second) return;
    out.add_state(specialized_name(m, m.state_name(q), used), static_cast<std::size_t>(std::popcount(used)));
    work.emplace_back(q, used);
  };
  discover(m.state_index(m.initial()), 0);
  out.set_initial(m.initial());

  const std::size_t nu = u.num_states();
  while (!work.empty()) {
    auto [q, used] = work.front();
    work.pop_front();
    const std::string& qname = m.state_name(q);
    for (const auto& [symbol, rank] : m.input().symbols()) {
      if (rank > 0 && nu == 0) continue;
      std::vector<State> tuple(rank, 0);
      while (true) {
        std::vector<std::optional<State>> la;
        for (State c : tuple) la.push_back(pu.lookahead[c] < 0 ? std::nullopt : std::optional<State>(pu.lookahead[c]));
        const MttRule* r = m.find_rule(qname, symbol, la);
        auto at = [&](std::size_t child, std::size_t q2) { return pu.usage[tuple[child]][q2]; };
        if (r) {
          auto usage = rhs_usage(m, r->rhs, at);
          if (usage && *usage == used) {
            auto rewrite = [&](auto&& self, const Tree& t) -> Tree {
              const std::string& l = t.label();
              if (m.is_state(l)) {
                std::size_t i = *variable_index(t.child(0).label(), 'x');
                std::size_t q2 = m.state_index(l);
                std::uint32_t keep = *at(i - 1, q2);
                discover(q2, keep);
                std::vector<Tree> kids{t.child(0)};
                for (std::size_t c = 1; c < t.arity(); ++c)
                  if (keep & (1u << (c - 1))) kids.push_back(self(self, t.child(c)));
                return Tree(specialized_name(m, l, keep), std::move(kids));
              }
              if (auto j = variable_index(l, 'y'); j && t.is_leaf()) {
                std::uint32_t below = used & ((1u << (*j - 1)) - 1);
                return Tree::leaf(param_var(static_cast<std::size_t>(std::popcount(below)) + 1));
              }
              std::vector<Tree> kids;
              for (const Tree& c : t.children()) kids.push_back(self(self, c));
              return Tree(l, std::move(kids));
            };
            out.add_rule(specialized_name(m, qname, used), symbol, rewrite(rewrite, r->rhs), tuple);
          }
        }
        std::size_t pos = 0;
        while (pos < rank && ++tuple[pos] == nu) tuple[pos++] = 0;
        if (pos == rank) break;
      }
    }
  }
  return out;
}

bool is_nondeleting(const Mtt& m) {
  for (const auto& r : m.rules()) {
    std::size_t params = m.params(r.state);
    std::vector<bool> found(params, false);
    for (const Path& p : nodes(r.rhs)) {
      const Tree& n = subtree_at(r.rhs, p);
      if (auto j = variable_index(n.label(), 'y'); j && *j <= params) found[*j - 1] = true;
    }
    for (bool f : found)
      if (!f) return false;
  }
  return true;
}

}  // namespace tteq
