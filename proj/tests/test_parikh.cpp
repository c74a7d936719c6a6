#include <doctest.h>

#include "helpers.hpp"
#include "oracles.hpp"
#include "parikh_support.hpp"
#include "tteq/io.hpp"
#include "tteq/parikh.hpp"

using namespace tteq;
using namespace parikh_support;
using testutil::load;
using testutil::T;

namespace {

const char* kYieldA = R"(kind: ydt
input: d/2 a/0
letters: a
states: q
initial: q
rule: q(d(x1,x2)) -> q(x1) q(x2)
rule: q(a) -> a
)";

const char* kDoubling = R"(kind: ydt
input: a/1 e/0
letters: e
states: q0
initial: q0
rule: q0(a(x1)) -> q0(x1) q0(x1)
rule: q0(e) -> e
)";

Dbta mixed_leaves(const RankedAlphabet& s) {
  // Trees with both an a-leaf and a b-leaf.
  Dbta d(s);
  State none = d.add_state("none"), sa = d.add_state("a"), sb = d.add_state("b"), both = d.add_state("ab");
  d.set_transition("a", {}, sa);
  d.set_transition("b", {}, sb);
  auto join = [&](State x, State y) -> State {
    bool ha = x == sa || x == both || y == sa || y == both;
    bool hb = x == sb || x == both || y == sb || y == both;
    return ha && hb ? both : ha ? sa : hb ? sb : none;
  };
  for (State x : {none, sa, sb, both})
    for (State y : {none, sa, sb, both}) d.set_transition("d", {x, y}, join(x, y));
  d.set_final(both);
  return d;
}

}  // namespace

TEST_CASE("finite-copying bounds") {
  auto lin = check_finite_copying(load<YdtFc>("yield.tt"), 8);
  CHECK(lin.bounded);
  CHECK(lin.bound == 1);
  for (std::size_t cutoff : {1u, 2u, 5u, 9u}) CHECK_FALSE(check_finite_copying(ydt(kDoubling), cutoff).bounded);
  auto two = check_finite_copying(load<YdtFc>("copy-root.tt"), 8);
  CHECK(two.bounded);
  CHECK(two.bound == 2);
  CHECK_THROWS_AS(linearize_fc(ydt(kDoubling), 6), InvalidArgument);
}

TEST_CASE("linearization") {
  YdtFc y = load<YdtFc>("yield.tt");
  YdtFc ly = linearize_fc(y);
  CHECK(ly.is_linear());
  CHECK(ly.rules().size() == y.rules().size());
  CHECK(ly.states().size() == y.states().size());

  YdtFc c = load<YdtFc>("copy-root.tt");
  YdtFc lc = linearize_fc(c);
  CHECK(lc.is_linear());
  oracle::Rng r(81);
  auto pool = oracle::trees_up_to(c.input(), 4);
  for (int i = 0; i < 20; ++i) {
    const Tree& t = pool[r.below(pool.size())];
    auto want = oracle::ydt_eval(c, t);
    auto outs = eval_all(lc, t);
    REQUIRE(want.has_value());
    REQUIRE(outs.size() == 1);
    CHECK(oracle::parikh(*outs.begin(), c.letters()) == oracle::parikh(*want, c.letters()));
  }
  CHECK(equivalent(domain_automaton(c), domain_automaton(lc)));
}

TEST_CASE("linearization preserves Parikh vectors of random copying transducers") {
  RankedAlphabet in{{"d", 2}, {"c", 1}, {"a", 0}};
  oracle::Rng r(83);
  for (int round = 0; round < 20; ++round) {
    YdtFc m = oracle::random_fc(r, in, {"a", "b"}, 1 + r.below(3), round % 2 ? 0.1 : 0.0);
    REQUIRE(validate(m).empty());
    auto cb = check_finite_copying(m, 8);
    REQUIRE(cb.bounded);
    CHECK(cb.bound <= 2);
    YdtFc l = linearize_fc(m);
    CHECK(l.is_linear());
    CHECK(equivalent(domain_automaton(m), domain_automaton(l)));
    for (const Tree& t : oracle::trees_up_to(in, 4)) {
      auto want = oracle::ydt_eval(m, t);
      auto outs = eval_all(l, t);
      REQUIRE(outs.size() == (want ? 1u : 0u));
      if (want) CHECK(oracle::parikh(*outs.begin(), m.letters()) == oracle::parikh(*want, m.letters()));
    }
  }
}

TEST_CASE("image grammar of the yield transducer") {
  YdtFc y = ydt(kYieldA);
  Cfg g = image_cfg(y, all_trees(y.input()));
  // The output depends only on the number of leaves, and height 4 already
  // reaches every leaf count up to 8.
  std::set<oracle::Word> want;
  for (const Tree& t : oracle::trees_up_to(y.input(), 4)) want.insert(*oracle::ydt_eval(y, t));
  CHECK(oracle::cfg_words(g, 8) == want);
  for (std::size_t n = 1; n <= 8; ++n) CHECK(want.count(oracle::Word(n, "a")) == 1);

  Dbta empty(y.input());
  empty.add_state();
  CHECK(oracle::cfg_words(image_cfg(y, empty), 8).empty());

  Tree s = T("d(d(a,a),a)");
  Cfg single = image_cfg(y, single_tree(y.input(), s));
  CHECK(oracle::cfg_words(single, 8) == std::set<oracle::Word>{{"a", "a", "a"}});
}

TEST_CASE("image grammars of random linear transducers") {
  // Every rule calls each child and writes a letter, so an output of length
  // n comes from an input of at most n nodes and the word sets up to length 4
  // are determined by inputs of height <= 4.
  RankedAlphabet in{{"d", 2}, {"c", 1}, {"a", 0}};
  oracle::Rng r(85);
  auto trees = oracle::trees_up_to(in, 4);
  for (int round = 0; round < 15; ++round) {
    YdtFc m = productive(oracle::random_fc(r, in, {"a", "b"}, 1 + r.below(2)));
    REQUIRE(validate(m).empty());
    Dbta d = oracle::random_dbta(r, in, 2);
    Cfg g = image_cfg(linearize_fc(m), d);
    std::set<oracle::Word> want;
    for (const Tree& t : trees) {
      if (!oracle::accepts(d, t)) continue;
      auto w = *oracle::ydt_eval(m, t);
      if (w.size() <= 4) want.insert(w);
    }
    // Linearization permutes each output, so compare Parikh vectors.
    std::set<ParikhVector> got_v, want_v;
    for (const auto& w : oracle::cfg_words(g, 4)) got_v.insert(oracle::parikh(w, m.letters()));
    for (const auto& w : want) want_v.insert(oracle::parikh(w, m.letters()));
    CHECK(got_v == want_v);
  }
}

TEST_CASE("pair grammars") {
  YdtFc y = with_end_marker(load<YdtFc>("yield.tt"), "$");
  auto trees = oracle::trees_up_to(y.input(), 4);
  Cfg g = build_lab(y, y, all_trees(y.input()), "a", "b");
  bool some_mixed = false;
  for (const Tree& t : trees) {
    auto w = *oracle::ydt_eval(y, t);
    some_mixed = some_mixed || (std::count(w.begin(), w.end(), "a") && std::count(w.begin(), w.end(), "b"));
  }
  CHECK(some_mixed == !oracle::cfg_words(g, 8).empty());
  CHECK_THROWS_AS(build_lab(y, y, all_trees(y.input()), "a", "a"), InvalidArgument);
  CHECK_THROWS_AS(build_lab(y, y, all_trees(y.input()), "a", "z"), InvalidArgument);

  Dbta empty(y.input());
  empty.add_state();
  CHECK(oracle::cfg_words(build_lab(y, y, empty, "a", "b"), 8).empty());

  YdtFc ab = ydt("kind: ydt\ninput: c/0\nletters: a b $\nstates: q\ninitial: q\nrule: q(c) -> a b $\n");
  YdtFc ba = ydt("kind: ydt\ninput: c/0\nletters: a b $\nstates: q\ninitial: q\nrule: q(c) -> b a $\n");
  auto words = oracle::cfg_words(build_lab(ab, ba, all_trees(ab.input()), "a", "b"), 8);
  CHECK(words.count({"a", "#", "b"}) == 1);
  CHECK(words.size() == 1);
}

TEST_CASE("pair grammar language matches its definition") {
  YdtFc y1 = with_end_marker(load<YdtFc>("yield.tt"), "$");
  YdtFc y2 = with_end_marker(load<YdtFc>("yield-rev.tt"), "$");
  Cfg g = build_lab(y1, y2, all_trees(y1.input()), "a", "b");
  // Leaf strings are exactly the nonempty words over {a,b}, and a word of
  // length <= 8 only looks at the first and last 6 leaves, so leaf strings up
  // to length 12 give every such word.
  std::set<oracle::Word> want;
  for (std::size_t len = 1; len <= 12; ++len)
    for (std::size_t bits = 0; bits < (std::size_t{1} << len); ++bits) {
      oracle::Word leaves;
      for (std::size_t i = 0; i < len; ++i) leaves.push_back(bits >> i & 1 ? "b" : "a");
      Tree t = Tree::leaf(leaves[0]);
      for (std::size_t i = 1; i < len; ++i) t = Tree("d", {t, Tree::leaf(leaves[i])});
      auto u = *oracle::ydt_eval(y1, t), v = *oracle::ydt_eval(y2, t);
      for (std::size_t m = 0; m < u.size(); ++m)
        for (std::size_t n = 0; n < v.size(); ++n)
          // Prefixes up to and including the chosen positions.
          if (u[m] == "a" && v[n] == "b" && m + n + 3 <= 8) {
            oracle::Word w(m + 1, "a");
            w.push_back("#");
            w.insert(w.end(), n + 1, "b");
            want.insert(w);
          }
    }
  // Linearization interleaves the two sides, so only letter counts are kept.
  std::set<ParikhVector> got_v, want_v;
  for (const auto& w : oracle::cfg_words(g, 8)) got_v.insert(oracle::parikh(w, g.terminals));
  for (const auto& w : want) want_v.insert(oracle::parikh(w, g.terminals));
  CHECK(got_v == want_v);
}

TEST_CASE("Parikh images") {
  Cfg anbn = cfg("kind: cfg\nterminals: a b\nstart: S\nnonterminals: S\nrule: S -> a S b\nrule: S ->\n");
  SemilinearSet s = parikh_image(anbn);
  REQUIRE(s.sets.size() == 1);
  CHECK(s.sets[0].base == ParikhVector{0, 0});
  CHECK(s.sets[0].periods == std::vector<ParikhVector>{{1, 1}});
  CHECK(slice_agrees(anbn, s, 12));

  Cfg one = cfg("kind: cfg\nterminals: a\nstart: S\nnonterminals: S\nrule: S -> a\n");
  SemilinearSet so = parikh_image(one);
  REQUIRE(so.sets.size() == 1);
  CHECK(so.sets[0].base == ParikhVector{1});
  CHECK(so.sets[0].periods.empty());

  Cfg free = cfg("kind: cfg\nterminals: a b\nstart: S\nnonterminals: S\nrule: S -> a S\nrule: S -> b S\nrule: S ->\n");
  SemilinearSet sf = parikh_image(free);
  REQUIRE(sf.sets.size() == 1);
  CHECK(sf.sets[0].base == ParikhVector{0, 0});
  std::set<ParikhVector> periods(sf.sets[0].periods.begin(), sf.sets[0].periods.end());
  CHECK(periods == std::set<ParikhVector>{{1, 0}, {0, 1}});
  CHECK(slice_agrees(free, sf, 12));

  CHECK(parikh_image(load<Cfg>("anbn.tt")).contains({3, 3}));
}

TEST_CASE("Parikh images of random grammars agree on the length-10 slice") {
  oracle::Rng r(87);
  for (int round = 0; round < 25; ++round) {
    Cfg g = oracle::random_cfg(r, {"a", "b", "c"});
    std::string why;
    bool ok = slice_agrees(g, parikh_image(g), 10, &why);
    CHECK_MESSAGE(ok, g.to_string() << why);
  }
}

TEST_CASE("equal-count feasibility") {
  SemilinearSet diag{{"a", "b"}, {LinearSet{{0, 0}, {{1, 1}}}}};
  CHECK(equal_count_feasible(diag, 0, 1) == std::optional<ParikhVector>(ParikhVector{0, 0}));

  SemilinearSet off{{"a", "b"}, {LinearSet{{1, 0}, {}}}};
  CHECK_FALSE(equal_count_feasible(off, 0, 1).has_value());

  // Coefficients 3 and -2 on a base difference of 1: lambda = (1,2).
  SemilinearSet mix{{"a", "b"}, {LinearSet{{1, 0}, {{3, 0}, {0, 2}}}}};
  auto v = equal_count_feasible(mix, 0, 1);
  REQUIRE(v.has_value());
  CHECK((*v)[0] == (*v)[1]);
  CHECK(mix.contains(*v));
  CHECK(*v == ParikhVector{4, 4});

  // Exact constraints on a third coordinate.
  SemilinearSet sep{{"a", "#", "b"}, {LinearSet{{0, 1, 1}, {{2, 0, 0}, {0, 1, 0}, {0, 0, 2}}}}};
  CHECK_FALSE(equal_count_feasible(sep, 0, 2, {{1, 1}}).has_value());
  auto w = equal_count_feasible(sep, 0, 2, {{1, 2}});
  CHECK_FALSE(w.has_value());
  SemilinearSet sep2{{"a", "#", "b"}, {LinearSet{{1, 1, 0}, {{2, 0, 0}, {0, 1, 0}, {0, 0, 1}}}}};
  auto w2 = equal_count_feasible(sep2, 0, 2, {{1, 3}});
  REQUIRE(w2.has_value());
  CHECK((*w2)[1] == 3);
  CHECK((*w2)[0] == (*w2)[2]);
}

TEST_CASE("equal-count feasibility agrees with bounded search") {
  oracle::Rng r(89);
  for (int round = 0; round < 200; ++round) {
    LinearSet l;
    l.base = {r.below(4), r.below(4), r.below(2)};
    std::size_t np = r.below(3);
    for (std::size_t i = 0; i < np; ++i) l.periods.push_back({r.below(4), r.below(4), r.below(2)});
    SemilinearSet s{{"a", "b", "#"}, {l}};
    std::map<std::size_t, std::uint64_t> exact;
    if (r.chance(0.5)) exact[2] = r.below(3);
    auto got = equal_count_feasible(s, 0, 1, exact);
    // Coefficients are below 4, so a solution exists iff one exists with small lambdas.
    bool found = false;
    std::vector<std::uint64_t> lam(np, 0);
    while (!found) {
      ParikhVector v = l.base;
      for (std::size_t i = 0; i < np; ++i)
        for (std::size_t k = 0; k < 3; ++k) v[k] += lam[i] * l.periods[i][k];
      bool ok = v[0] == v[1];
      for (const auto& [i, x] : exact) ok = ok && v[i] == x;
      found = ok;
      std::size_t p = 0;
      while (p < np && ++lam[p] == 13) lam[p++] = 0;
      if (p == np) break;
    }
    CHECK(got.has_value() == found);
    if (got) {
      CHECK((*got)[0] == (*got)[1]);
      CHECK(s.contains(*got));
      for (const auto& [i, x] : exact) CHECK((*got)[i] == x);
    }
  }
}

TEST_CASE("equivalence of finite-copying transducers") {
  YdtFc y = load<YdtFc>("yield.tt");
  auto same = decide_equiv_fc(y, y);
  CHECK(same.verdict == FcVerdict::Equivalent);

  YdtFc rev = load<YdtFc>("yield-rev.tt");
  auto diff = decide_equiv_fc(y, rev, mixed_leaves(y.input()));
  CHECK(diff.verdict == FcVerdict::NotEquivalent);
  CHECK(diff.a != diff.b);
  auto trees = oracle::trees_up_to(y.input(), 4);
  auto brute = fc_brute(y, rev, trees, mixed_leaves(y.input()));
  CHECK(brute.truth == Truth::OutputDiffers);
  if (diff.witness) CHECK(oracle::ydt_eval(y, *diff.witness) != oracle::ydt_eval(rev, *diff.witness));

  YdtFc drop = load<YdtFc>("yield-drop-b.tt");
  auto d2 = decide_equiv_fc(y, drop);
  CHECK(d2.verdict == FcVerdict::NotEquivalent);
  CHECK((d2.a == "$" || d2.b == "$"));

  // One output a proper prefix of the other: the end marker meets a letter.
  YdtFc longer = append_letter(load<YdtFc>("copy-root.tt"), "c");
  auto d3 = decide_equiv_fc(load<YdtFc>("copy-root.tt"), longer);
  CHECK(d3.verdict == FcVerdict::NotEquivalent);
  CHECK(d3.a == "$");
  CHECK(d3.b == "c");

  CHECK(decide_equiv_fc(y, load<YdtFc>("lookahead-swap.tt")).verdict == FcVerdict::NotEquivalent);
}
