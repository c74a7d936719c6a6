#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "tteq/automata.hpp"
#include "tteq/earliest.hpp"
#include "tteq/mtt.hpp"
#include "tteq/parikh.hpp"

namespace tteq {

// Line-based documents. The first significant line is `kind: K` with K one
// of mtt, dtop, butt, dbta, dfa, cfg, ydt; the remaining lines are
// `key: value`. Lines whose first non-blank character is '#' are comments.
// A dtop document with an `axiom:` line denotes an AxiomDtop.
using Document = std::variant<Mtt, AxiomDtop, Butt, Dbta, Dfa, Cfg, YdtFc>;

Document parse_document(std::string_view text);
Document read_document(const std::string& path);
std::string kind_of(const Document& d);

std::string to_text(const Document& d);
std::string to_text(const Mtt& m);
std::string to_text(const AxiomDtop& a);
std::string to_text(const Butt& b);
std::string to_text(const Dbta& a);
std::string to_text(const Dfa& a);
std::string to_text(const Cfg& g);
std::string to_text(const YdtFc& m);

// Reads a document and requires the given alternative.
template <class T>
T read_as(const std::string& path) {
  Document d = read_document(path);
  if (auto* v = std::get_if<T>(&d)) return std::move(*v);
  throw FormatError("unexpected document kind '" + kind_of(d) + "'", 1, path);
}

// `d/2 a/0` and back; a missing rank means 0.
RankedAlphabet parse_alphabet(std::string_view text);
std::string alphabet_text(const RankedAlphabet& a);

}  // namespace tteq
