#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tteq/automata.hpp"
#include "tteq/mtt.hpp"

namespace tteq {

// strip: unary symbols and state names in order; leaves, x_i and y_j emit nothing.
std::vector<std::string> strip(const Tree& t);

// The unique leaf symbol of a normalized alphabet.
std::string bottom_symbol(const RankedAlphabet& a);

// Nondeleting, states of rank <= 2, single leaf `bot` on both sides. Leaves a
// become unary symbols a' above bot; look-ahead restricts the domain to
// expanded trees. A transducer already in that form is returned unchanged.
Mtt normalize_monadic(const Mtt& m);
bool is_normalized(const Mtt& m);
// a1(..an(e)..) -> a1(..an(e'(bot))..) and back.
Tree expand(const Tree& t, const RankedAlphabet& normalized_input);
Tree unexpand(const Tree& t, const RankedAlphabet& original_input);

struct HdtolInstance {
  using Word = std::vector<std::size_t>;
  std::vector<std::string> letters;  // working alphabet
  std::vector<std::string> output;   // final alphabet
  std::vector<std::string> indices;  // names of the homomorphism pairs
  Word w1, w2;
  std::vector<std::vector<Word>> h, g;  // [index][letter] -> word over letters
  std::vector<Word> h_final, g_final;   // [letter] -> word over output

  std::size_t letter(const std::string& name) const;
  // Final images after applying the pairs of `word` in order.
  std::pair<Word, Word> images(const std::vector<std::size_t>& word) const;
  std::string to_text() const;
};

// Total normalized transducers without look-ahead and disjoint states.
HdtolInstance to_hdt0l(const Mtt& m1, const Mtt& m2);
// Same, restricted to the inputs whose unary labels are accepted by the
// complete automaton `a`.
HdtolInstance to_hdt0l_dfa(const Mtt& m1, const Mtt& m2, const Dfa& a);

struct HdtolCheck {
  bool counterexample = false;
  std::vector<std::size_t> word;  // shortest, then lexicographically least
  std::size_t max_len = 0;
  std::size_t configurations = 0;
};
// Compares final images on all index words of length <= max_len.
// Throws ResourceError when a sentential form exceeds `budget` letters or
// the distinct configurations seen hold more than 16 * budget letters.
HdtolCheck check_hdt0l(const HdtolInstance& inst, std::size_t max_len, std::size_t budget = 1000000);

enum class MonadicVerdict { NoCounterexample, NotEquivalent, DomainMismatch };
std::string to_string(MonadicVerdict v);

struct MonadicEquivResult {
  MonadicVerdict verdict;
  std::optional<Tree> witness;
  std::size_t max_len = 0;
  std::size_t configurations = 0;
};

// Everything needed for the bounded check, exposed for inspection.
struct MonadicReduction {
  Mtt n1, n2;       // normalized, annotated, totalized, no look-ahead
  Dbta e;           // correctly annotated trees of the common domain
  Dfa control;      // e read from the root
  HdtolInstance instance;
  RankedAlphabet normalized_input;
};
MonadicReduction reduce_monadic(const Mtt& m1, const Mtt& m2);

MonadicEquivResult decide_equiv_monadic(const Mtt& m1, const Mtt& m2, std::size_t max_len,
                                        std::size_t budget = 1000000);

}  // namespace tteq
