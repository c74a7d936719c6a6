// Shared helpers for the Parikh and finite-copying tests.
#pragma once

#include <algorithm>

#include "oracles.hpp"
#include "tteq/io.hpp"
#include "tteq/parikh.hpp"

namespace parikh_support {

inline tteq::YdtFc ydt(const std::string& text) { return std::get<tteq::YdtFc>(tteq::parse_document(text)); }

inline tteq::Cfg cfg(const std::string& text) { return std::get<tteq::Cfg>(tteq::parse_document(text)); }

// Both directions of the length slice: every vector of total <= len is in
// the set iff it is the Parikh vector of a word of L(g) of that length.
inline bool slice_agrees(const tteq::Cfg& g, const tteq::SemilinearSet& s, std::size_t len, std::string* why = nullptr) {
  std::set<tteq::ParikhVector> want;
  for (const auto& w : oracle::cfg_words(g, len)) want.insert(oracle::parikh(w, g.terminals));
  for (const auto& v : oracle::vectors_up_to(g.terminals.size(), len)) {
    bool in = s.contains(v), expected = want.count(v) > 0;
    if (in != expected) {
      if (why) {
        *why = "vector";
        for (auto x : v) *why += " " + std::to_string(x);
        *why += expected ? " missing" : " spurious";
      }
      return false;
    }
  }
  return true;
}

enum class Truth { Equal, DomainDiffers, OutputDiffers };

// Outputs compared on every tree of height <= h; the first difference, if any.
struct FcBrute {
  Truth truth = Truth::Equal;
  std::optional<tteq::Tree> witness;
};

inline FcBrute fc_brute(const tteq::YdtFc& m1, const tteq::YdtFc& m2, const std::vector<tteq::Tree>& trees,
                        const std::optional<tteq::Dbta>& d = std::nullopt) {
  FcBrute out;
  for (const auto& t : trees) {
    if (d && !oracle::accepts(*d, t)) continue;
    auto a = oracle::ydt_eval(m1, t), b = oracle::ydt_eval(m2, t);
    if (a.has_value() != b.has_value()) return {Truth::DomainDiffers, t};
    if (a && *a != *b && out.truth == Truth::Equal) out = {Truth::OutputDiffers, t};
  }
  return out;
}

// Copy of m whose initial rules end with one more letter.
inline tteq::YdtFc append_letter(const tteq::YdtFc& m, const std::string& letter) {
  tteq::YdtFc out(m.input(), m.letters());
  for (const auto& q : m.states()) out.add_state(q);
  out.set_initial(m.initial());
  if (m.has_lookahead()) out.set_lookahead(m.lookahead());
  for (auto r : m.rules()) {
    if (r.state == m.initial()) r.rhs.push_back({letter, 0});
    out.add_rule(std::move(r));
  }
  return out;
}

// Copy of m in which every rule calls each child at least once and writes at
// least one letter.
inline tteq::YdtFc productive(const tteq::YdtFc& m) {
  tteq::YdtFc out(m.input(), m.letters());
  for (const auto& q : m.states()) out.add_state(q);
  out.set_initial(m.initial());
  std::string callee = m.states().size() > 1 ? m.states()[1] : m.states()[0];
  for (auto r : m.rules()) {
    std::size_t k = m.input().rank_of(r.symbol);
    for (std::size_t c = 1; c <= k; ++c)
      if (std::none_of(r.rhs.begin(), r.rhs.end(), [&](const tteq::YItem& it) { return it.child == c; }))
        r.rhs.push_back({callee, c});
    if (std::all_of(r.rhs.begin(), r.rhs.end(), [](const tteq::YItem& it) { return it.is_call(); }))
      r.rhs.push_back({m.letters().front(), 0});
    out.add_rule(std::move(r));
  }
  return out;
}

}  // namespace parikh_support
