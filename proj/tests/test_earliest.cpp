#include <doctest.h>

#include "helpers.hpp"
#include "oracles.hpp"
#include "tteq/earliest.hpp"
#include "tteq/io.hpp"

using namespace tteq;
using testutil::load;
using testutil::T;

namespace {

bool has_rule(const AxiomDtop& a, const std::string& q, const std::string& sigma, const std::string& rhs) {
  auto it = a.rules.find({q, sigma});
  return it != a.rules.end() && it->second.to_string() == rhs;
}

// Calls q(xi) in a right-hand side, as (state, i) pairs.
void calls(const Tree& t, std::vector<std::pair<std::string, std::size_t>>& out, const std::vector<std::string>& states) {
  if (std::find(states.begin(), states.end(), t.label()) != states.end()) {
    out.emplace_back(t.label(), *oracle::var_index(t.child(0).label(), 'x'));
    return;
  }
  for (const Tree& c : t.children()) calls(c, out, states);
}

Mtt mutate(oracle::Rng& r, const Mtt& m) {
  Mtt out(m.input(), m.output());
  std::vector<std::string> states;
  std::vector<std::size_t> params;
  for (std::size_t i = 0; i < m.num_states(); ++i) {
    states.push_back(m.state_name(i));
    params.push_back(0);
    out.add_state(states.back());
  }
  out.set_initial(m.initial());
  std::size_t victim = r.below(m.rules().size());
  for (std::size_t i = 0; i < m.rules().size(); ++i) {
    const auto& rule = m.rules()[i];
    Tree rhs = rule.rhs;
    if (i == victim)
      rhs = oracle::random_rhs(r, m.output(), states, params, m.input().rank_of(rule.symbol), 0, 1 + r.below(3));
    out.add_rule(rule.state, rule.symbol, rhs);
  }
  return out;
}

}  // namespace

TEST_CASE("make_earliest on the fig4 fixtures") {
  AxiomDtop em = make_earliest(load<Mtt>("fig4-M.tt"));
  CHECK(is_earliest(em));
  CHECK(has_rule(em, "<q',1>", "a", "a(q(x1))"));
  CHECK(has_rule(em, "<q',1>", "e", "e"));

  AxiomDtop en = make_earliest(load<Mtt>("fig4-N.tt"));
  CHECK(is_earliest(en));
  CHECK(has_rule(en, "<p,2>", "a", "d(<p,1>(x1),<p,2>(x1))"));
  CHECK(has_rule(en, "<p,1>", "a", "a(p'(x1))"));
  CHECK_FALSE(is_earliest(with_axiom(load<Mtt>("fig4-N.tt"))));
}

TEST_CASE("make_earliest leaves an earliest transducer alone") {
  RankedAlphabet in{{"d", 2}, {"a", 0}}, out{{"d", 2}, {"a", 1}, {"e", 0}};
  Mtt m(in, out);
  m.add_state("q0");
  m.set_initial("q0");
  m.add_rule("q0", "d", T("d(q0(x1),q0(x2))"));
  m.add_rule("q0", "a", T("a(e)"));
  CHECK(is_earliest(with_axiom(m)));
  CHECK(make_earliest(m) == with_axiom(m));
}

TEST_CASE("merging equivalent states") {
  AxiomDtop mm = merge_equivalent_states(make_earliest(load<Mtt>("fig4-M.tt")));
  CHECK(mm.states.size() == 2);
  CHECK(std::find(mm.states.begin(), mm.states.end(), "<q',1>") == mm.states.end());
  CHECK(has_rule(mm, "q", "a", "a(q(x1))"));

  AxiomDtop mn = merge_equivalent_states(make_earliest(load<Mtt>("fig4-N.tt")));
  CHECK(mn.states.size() == 2);
  CHECK(has_rule(mn, "p0", "a", "d(<p,1>(x1),p0(x1))"));
  CHECK(has_rule(mn, "<p,1>", "a", "a(<p,1>(x1))"));

  // Two states with different outputs on e stay apart.
  RankedAlphabet s{{"a", 1}, {"e", 0}}, o{{"d", 2}, {"b", 0}, {"c", 0}};
  Mtt m(s, o);
  m.add_state("q0");
  m.add_state("q1");
  m.set_initial("q0");
  m.add_rule("q0", "a", T("d(q0(x1),q1(x1))"));
  m.add_rule("q0", "e", T("b"));
  m.add_rule("q1", "a", T("d(q1(x1),q0(x1))"));
  m.add_rule("q1", "e", T("c"));
  AxiomDtop a = with_axiom(m);
  REQUIRE(is_earliest(a));
  CHECK(merge_equivalent_states(a) == a);
}

TEST_CASE("canonical form of the fig4 fixtures") {
  AxiomDtop want = load<AxiomDtop>("fig4-canonical.tt");
  AxiomDtop cm = canonical(load<Mtt>("fig4-M.tt"));
  AxiomDtop cn = canonical(load<Mtt>("fig4-N.tt"));
  CHECK(cm == want);
  CHECK(cn == want);
  CHECK(cm.num_rules() == 4);
  CHECK(to_text(cm) == to_text(cn));
}

TEST_CASE("canonical form of the identity") {
  RankedAlphabet s{{"d", 2}, {"a", 0}};
  Mtt m(s, s);
  m.add_state("id");
  m.set_initial("id");
  m.add_rule("id", "d", T("d(id(x1),id(x2))"));
  m.add_rule("id", "a", T("a"));
  AxiomDtop c = canonical(m);
  CHECK(c.states == std::vector<std::string>{"q0"});
  CHECK(c.axiom == T("q0(x0)"));
  CHECK(has_rule(c, "q0", "d", "d(q0(x1),q0(x2))"));
}

TEST_CASE("total equivalence on the fig4 fixtures") {
  Mtt m = load<Mtt>("fig4-M.tt"), n = load<Mtt>("fig4-N.tt");
  CHECK(equiv_total_dtop(m, n).equal);
  CHECK(equiv_total_dtop(m, m).equal);

  Mtt bad(m.input(), m.output());
  for (std::size_t i = 0; i < m.num_states(); ++i) bad.add_state(m.state_name(i));
  bad.set_initial(m.initial());
  for (const auto& r : m.rules())
    bad.add_rule(r.state, r.symbol, (r.state == "q" && r.symbol == "e") ? T("a(e)") : r.rhs);
  auto res = equiv_total_dtop(m, bad);
  CHECK_FALSE(res.equal);
  REQUIRE(res.witness.has_value());
  CHECK(oracle::mtt_eval(m, *res.witness) != oracle::mtt_eval(bad, *res.witness));

  auto res2 = equiv_total_dtop(n, load<Mtt>("fig4-N-mutant.tt"));
  CHECK_FALSE(res2.equal);
  REQUIRE(res2.witness.has_value());
}

TEST_CASE("earliest form is non-linear and deleting") {
  AxiomDtop c = canonical(load<Mtt>("linearity.tt"));
  bool nonlinear = false, deleting = false;
  for (const auto& [key, rhs] : c.rules) {
    std::vector<std::pair<std::string, std::size_t>> cs;
    calls(rhs, cs, c.states);
    std::set<std::size_t> vars;
    for (const auto& [q, i] : cs) {
      if (vars.count(i)) nonlinear = true;
      vars.insert(i);
    }
    std::size_t k = c.input.rank_of(key.second);
    if (!cs.empty() && vars.size() < k) deleting = true;
  }
  CHECK(nonlinear);
  CHECK(deleting);
}

TEST_CASE("canonical forms preserve random total DTOPs") {
  RankedAlphabet in{{"d", 2}, {"c", 1}, {"a", 0}};
  RankedAlphabet out{{"f", 2}, {"g", 1}, {"b", 0}};
  oracle::Rng r(53);
  auto inputs = oracle::trees_up_to(in, 4);
  for (int round = 0; round < 30; ++round) {
    Mtt m = oracle::random_mtt(r, in, out, 1 + r.below(3), 0, 3);
    AxiomDtop c = canonical(m);
    CHECK(is_earliest(c));
    CHECK(rename_canonically(merge_equivalent_states(make_earliest(c))) == c);
    if (c.axiom.label() != "x0" && c.axiom.arity() == 1 && c.axiom.child(0).label() == "x0")
      CHECK(canonical(to_mtt(c)) == c);
    for (const Tree& s : inputs) CHECK(eval(c, s) == oracle::mtt_eval(m, s));
    Mtt mut = mutate(r, m);
    auto res = equiv_total_dtop(m, mut);
    bool differs = false;
    for (const Tree& s : inputs) differs = differs || oracle::mtt_eval(m, s) != oracle::mtt_eval(mut, s);
    if (differs) CHECK_FALSE(res.equal);
    if (!res.equal) {
      REQUIRE(res.witness.has_value());
      CHECK(oracle::mtt_eval(m, *res.witness) != oracle::mtt_eval(mut, *res.witness));
    } else {
      CHECK(res.canonical1 == res.canonical2);
    }
  }
}
