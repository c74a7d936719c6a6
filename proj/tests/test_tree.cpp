#include <doctest.h>

#include "helpers.hpp"
#include "oracles.hpp"
#include "tteq/error.hpp"
#include "tteq/tree.hpp"

using namespace tteq;
using testutil::T;

TEST_CASE("parse_tree reads terms over the alphabet") {
  RankedAlphabet s{{"d", 2}, {"a", 0}};
  Tree t = parse_tree("d(a,a)", s);
  CHECK(t.label() == "d");
  CHECK(t.arity() == 2);
  CHECK(t.child(0) == Tree("a"));
  CHECK(t.to_string() == "d(a,a)");

  Tree leaf = parse_tree("a", RankedAlphabet{{"a", 0}});
  CHECK(leaf.is_leaf());
  CHECK(leaf.label() == "a");

  CHECK_THROWS_AS(parse_tree("d(a)", s), ArityError);
  CHECK_THROWS_AS(parse_tree("d(a,b)", s), AlphabetError);
  CHECK_THROWS_AS(parse_tree("d(a,", s), ParseError);
  CHECK_THROWS_AS(parse_tree("d(a,a) junk", s), ParseError);
}

TEST_CASE("whitespace and bracketed names") {
  Tree t = parse_term(" d ( <q',1> , a ) ");
  CHECK(t.child(0).label() == "<q',1>");
  CHECK(parse_term(t.to_string()) == t);
}

TEST_CASE("substitute_leaves") {
  Tree t = T("d(a,b,a)");
  CHECK(substitute_leaves(t, {{"a", T("c(b)")}, {"b", T("a")}}) == T("d(c(b),a,c(b))"));
  CHECK(substitute_leaves(t, {}) == t);
  CHECK(substitute_leaves(T("d(a,a)"), {{"a", T("e")}}) == T("d(e,e)"));
}

TEST_CASE("replace_at and Dewey paths") {
  CHECK(replace_at(T("d(a,a)"), Path::parse("1"), T("x")) == T("d(x,a)"));
  CHECK(replace_at(T("d(a,a)"), Path(), T("b")) == T("b"));
  CHECK(replace_at(T("d(d(a,a),a)"), Path::parse("1.2"), T("x")) == T("d(d(a,x),a)"));
  CHECK(Path::parse("eps").is_root());
  CHECK(Path::parse("").is_root());
  CHECK(Path::parse("1.2").to_string() == "1.2");
  CHECK_FALSE(contains_path(T("d(a,a)"), Path::parse("3")));
  CHECK_THROWS_AS(subtree_at(T("d(a,a)"), Path::parse("1.1")), InvalidArgument);
  CHECK(label_at(T("d(d(a,b),a)"), Path::parse("1.2")) == "b");
}

TEST_CASE("metrics") {
  CHECK(metrics(T("a")) == TreeMetrics{1, 1});
  CHECK(metrics(T("d(a,a)")) == TreeMetrics{3, 2});
  CHECK(metrics(T("d(d(a,a),a)")) == TreeMetrics{5, 3});
}

TEST_CASE("metrics agree with a recursive count on enumerated trees") {
  RankedAlphabet s{{"d", 2}, {"c", 1}, {"a", 0}};
  auto count = [](auto&& self, const Tree& t) -> std::pair<std::uint64_t, std::size_t> {
    std::uint64_t n = 1;
    std::size_t h = 0;
    for (const Tree& c : t.children()) {
      auto [cn, ch] = self(self, c);
      n += cn;
      h = std::max(h, ch);
    }
    return {n, h + 1};
  };
  for (const Tree& t : oracle::trees_up_to(s, 4)) {
    auto [n, h] = count(count, t);
    CHECK(metrics(t) == TreeMetrics{n, h});
    CHECK(nodes(t).size() == n);
  }
}

TEST_CASE("enumerate_trees matches the oracle enumeration") {
  RankedAlphabet s{{"d", 2}, {"c", 1}, {"a", 0}, {"b", 0}};
  auto mine = oracle::trees_up_to(s, 4);
  auto lib = enumerate_trees(s, 4);
  std::set<Tree> a(mine.begin(), mine.end()), b(lib.begin(), lib.end());
  CHECK(a.size() == mine.size());
  CHECK(a == b);
}

TEST_CASE("nodes are listed in preorder and yield reads leaves") {
  Tree t = T("d(d(a,b),c)");
  std::vector<std::string> got;
  for (const Path& p : nodes(t)) got.push_back(p.to_string());
  CHECK(got == std::vector<std::string>{"eps", "1", "1.1", "1.2", "2"});
  CHECK(yield(t) == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("alphabet rank conflicts are rejected") {
  RankedAlphabet s;
  s.add("d", 2);
  s.add("d", 2);
  CHECK_THROWS_AS(s.add("d", 1), AlphabetError);
  CHECK(is_reserved_name("x1"));
  CHECK(is_reserved_name("y2"));
}
