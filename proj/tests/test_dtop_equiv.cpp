#include <doctest.h>

#include "helpers.hpp"
#include "oracles.hpp"
#include "tteq/dtop_equiv.hpp"
#include "tteq/io.hpp"

using namespace tteq;
using testutil::load;
using testutil::T;

namespace {

// Partial identity on monadic trees accepted by a deterministic top-down automaton.
Mtt partial_identity(const RankedAlphabet& s, const std::vector<std::tuple<std::string, std::string, std::string>>& moves,
                     const std::vector<std::string>& finals_at_leaf, const std::vector<std::string>& states) {
  Mtt m(s, s);
  for (const auto& q : states) m.add_state(q);
  m.set_initial(states.front());
  for (const auto& [q, sym, next] : moves) m.add_rule(q, sym, Tree(sym, {Tree(next, {Tree("x1")})}));
  for (const auto& q : finals_at_leaf) m.add_rule(q, "e", Tree("e"));
  return m;
}

EquivVerdict expected(oracle::Verdict v) {
  switch (v) {
    case oracle::Verdict::Equivalent: return EquivVerdict::Equivalent;
    case oracle::Verdict::DomainMismatch: return EquivVerdict::DomainMismatch;
    default: return EquivVerdict::OutputMismatch;
  }
}

}  // namespace

TEST_CASE("balance bounds for the fig2 fixtures") {
  Mtt m = load<Mtt>("fig2-M.tt"), n = load<Mtt>("fig2-N.tt");
  CHECK(balance_bound(m, n) == 2);
  CHECK(general_balance_bound(m, n) == 16);
  RankedAlphabet s{{"d", 2}, {"a", 0}};
  Mtt id(s, s);
  id.add_state("q");
  id.set_initial("q");
  id.add_rule("q", "d", T("d(q(x1),q(x2))"));
  id.add_rule("q", "a", T("a"));
  CHECK(balance_bound(id, id) == 1);
}

TEST_CASE("fixture pairs are equivalent") {
  auto r2 = decide_equiv_dtop(load<Mtt>("fig2-M.tt"), load<Mtt>("fig2-N.tt"));
  CHECK(r2.verdict == EquivVerdict::Equivalent);
  CHECK_FALSE(r2.witness.has_value());
  auto r4 = decide_equiv_dtop(load<Mtt>("fig4-M.tt"), load<Mtt>("fig4-N.tt"));
  CHECK(r4.verdict == EquivVerdict::Equivalent);
}

TEST_CASE("mutants are caught with verified witnesses") {
  Mtt m = load<Mtt>("fig4-M.tt"), bad = load<Mtt>("fig4-N-mutant.tt");
  auto r = decide_equiv_dtop(m, bad);
  CHECK(r.verdict == EquivVerdict::OutputMismatch);
  REQUIRE(r.witness.has_value());
  CHECK(oracle::mtt_eval(m, *r.witness) != oracle::mtt_eval(bad, *r.witness));

  Mtt m2 = load<Mtt>("fig2-M.tt"), broken = load<Mtt>("broken-N.tt");
  auto r2 = decide_equiv_dtop(m2, broken);
  CHECK(r2.verdict != EquivVerdict::Equivalent);
  REQUIRE(r2.witness.has_value());
  CHECK(*r2.witness == T("a(e)"));
  CHECK(oracle::mtt_eval(m2, *r2.witness) != oracle::mtt_eval(broken, *r2.witness));
}

TEST_CASE("domain mismatches are reported with a separator") {
  Mtt a = load<Mtt>("hard-1.tt"), b = load<Mtt>("hard-2.tt");
  auto r = decide_equiv_dtop(a, b);
  oracle::IndexedTrees ts(a.input(), 6);
  auto brute = oracle::brute_compare(a, b, ts);
  CHECK(r.verdict == expected(brute.verdict));
  if (r.witness) CHECK(oracle::mtt_eval(a, *r.witness).has_value() != oracle::mtt_eval(b, *r.witness).has_value());
}

TEST_CASE("hard instances") {
  RankedAlphabet s{{"a", 1}, {"b", 1}, {"e", 0}};
  Mtt only_e = partial_identity(s, {}, {"s"}, {"s"});
  // The intersection {e} is non-empty, so a(e) separates the pair.
  auto h1 = gen_hard_instance({only_e});
  auto r1 = decide_equiv_dtop(h1.m1, h1.m2);
  CHECK(r1.verdict != EquivVerdict::Equivalent);
  CHECK(r1.witness == std::optional<Tree>(T("a(e)")));
  Mtt nothing = partial_identity(s, {{"s", "a", "s"}}, {}, {"s"});
  auto h0 = gen_hard_instance({nothing});
  CHECK(decide_equiv_dtop(h0.m1, h0.m2).verdict == EquivVerdict::Equivalent);

  // a-first and ends-with-b-before-e overlap on a(b(e)).
  Mtt first_a = partial_identity(s, {{"s0", "a", "s1"}, {"s1", "a", "s1"}, {"s1", "b", "s1"}}, {"s1"}, {"s0", "s1"});
  Mtt all_b = partial_identity(s, {{"t", "b", "t"}, {"t", "a", "u"}, {"u", "b", "t"}}, {"t"}, {"t", "u"});
  auto h2 = gen_hard_instance({first_a, all_b});
  auto r = decide_equiv_dtop(h2.m1, h2.m2);
  CHECK(r.verdict != EquivVerdict::Equivalent);
  REQUIRE(r.witness.has_value());
  REQUIRE(r.witness->arity() == 1);
  Tree inner = r.witness->child(0);
  CHECK(oracle::mtt_eval(first_a, inner).has_value());
  CHECK(oracle::mtt_eval(all_b, inner).has_value());

  Mtt only_b = partial_identity(s, {{"t", "b", "t"}}, {"t"}, {"t"});
  auto h3 = gen_hard_instance({first_a, only_b});
  CHECK(decide_equiv_dtop(h3.m1, h3.m2).verdict == EquivVerdict::Equivalent);
  for (const Tree& t : oracle::trees_up_to(s, 3))
    CHECK_FALSE((oracle::mtt_eval(first_a, t).has_value() && oracle::mtt_eval(only_b, t).has_value()));
}

TEST_CASE("decide_equiv_dtop agrees with brute force on small random pairs") {
  RankedAlphabet in{{"d", 2}, {"a", 1}, {"e", 0}};
  RankedAlphabet out{{"f", 2}, {"g", 1}, {"b", 0}};
  oracle::IndexedTrees ts(in, 4);
  oracle::Rng r(61);
  for (int round = 0; round < 40; ++round) {
    Mtt m1 = oracle::random_mtt(r, in, out, 1 + r.below(3), 0, 3, round % 4 == 3 ? 0.2 : 0.0);
    Mtt m2 = round % 2 ? oracle::random_mtt(r, in, out, 1 + r.below(3), 0, 3) : m1;
    if (round % 2 == 0) m2 = oracle::with_random_guards(r, m1, oracle::random_dbta(r, in, 2), 2);
    auto res = decide_equiv_dtop(m1, m2);
    auto brute = oracle::brute_compare(m1, m2, ts);
    if (res.verdict == EquivVerdict::Equivalent) {
      CHECK(brute.verdict == oracle::Verdict::Equivalent);
    } else {
      REQUIRE(res.witness.has_value());
      auto o1 = oracle::mtt_eval(m1, *res.witness), o2 = oracle::mtt_eval(m2, *res.witness);
      CHECK(o1 != o2);
      if (res.verdict == EquivVerdict::DomainMismatch) CHECK(o1.has_value() != o2.has_value());
      if (brute.verdict != oracle::Verdict::Equivalent) CHECK(res.verdict == expected(brute.verdict));
    }
  }
}
