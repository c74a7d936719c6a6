#pragma once

#include <string>

#include "tteq/io.hpp"
#include "tteq/tree.hpp"

namespace testutil {

inline std::string fixture(const std::string& name) { return std::string(TTEQ_FIXTURES) + "/" + name; }

template <class T>
T load(const std::string& name) {
  return tteq::read_as<T>(fixture(name));
}

inline tteq::Tree T(const std::string& text) { return tteq::parse_term(text); }

// a^n(leaf)
inline tteq::Tree unary_chain(const std::string& sym, std::size_t n, const std::string& leaf) {
  tteq::Tree t(leaf);
  for (std::size_t i = 0; i < n; ++i) t = tteq::Tree(sym, {t});
  return t;
}

}  // namespace testutil
