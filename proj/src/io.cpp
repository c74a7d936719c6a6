#include "tteq/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "tteq/error.hpp"

namespace tteq {

namespace {

struct Line {
  std::size_t no;
  std::string key;
  std::string value;
};

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> words(std::string_view s) {
  std::istringstream is{std::string(s)};
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> out;
  std::size_t no = 0, pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line = trim(text.substr(pos, end - pos));
    ++no;
    pos = end + 1;
    if (line.empty() || line[0] == '#') continue;
    std::size_t colon = line.find(':');
    if (colon == std::string::npos) throw FormatError("expected 'key: value'", no);
    out.push_back({no, trim(std::string_view(line).substr(0, colon)), trim(std::string_view(line).substr(colon + 1))});
  }
  return out;
}

// Runs `f`, turning term-level errors into errors carrying the line number.
template <class F>
auto at_line(std::size_t no, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const FormatError&) {
    throw;
  } catch (const ParseError& e) {
    throw FormatError(e.what(), no);
  } catch (const AlphabetError& e) {
    throw FormatError(e.what(), no);
  } catch (const InvalidArgument& e) {
    throw FormatError(e.what(), no);
  }
}

// Splits `a -> b` at the arrow.
std::pair<std::string, std::string> arrow(const Line& l) {
  std::size_t a = l.value.find("->");
  if (a == std::string::npos) throw FormatError("expected '->'", l.no);
  return {trim(std::string_view(l.value).substr(0, a)), trim(std::string_view(l.value).substr(a + 2))};
}

// Comma-separated names inside <...>, respecting nested brackets.
std::vector<std::string> guard_names(std::string_view inner, std::size_t no) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : inner) {
    if (c == '<') ++depth;
    if (c == '>') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (depth != 0) throw FormatError("unbalanced '<' in guard", no);
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

// Parses `lhs [<g1,..,gk>]` where lhs is a term; returns the term and the guard names.
std::pair<Tree, std::optional<std::vector<std::string>>> lhs_with_guard(const std::string& text, std::size_t no) {
  std::size_t pos = 0;
  Tree lhs = at_line(no, [&] { return parse_term_prefix(text, pos); });
  skip_space(text, pos);
  std::optional<std::vector<std::string>> guard;
  if (pos < text.size() && text[pos] == '<') {
    int depth = 0;
    std::size_t start = pos;
    for (; pos < text.size(); ++pos) {
      if (text[pos] == '<') ++depth;
      if (text[pos] == '>' && --depth == 0) break;
    }
    if (pos == text.size()) throw FormatError("unterminated guard", no);
    guard = guard_names(std::string_view(text).substr(start + 1, pos - start - 1), no);
    ++pos;
    skip_space(text, pos);
  }
  if (pos != text.size()) throw FormatError("unexpected text after the left-hand side", no);
  return {lhs, guard};
}

// State and input symbol of q(σ(x1..xk), y1..ym); checks the variables.
std::pair<std::string, std::string> rule_head(const Tree& lhs, const RankedAlphabet& input, std::size_t no,
                                              std::size_t* params = nullptr) {
  if (lhs.arity() == 0) throw FormatError("left-hand side must be q(symbol(x1,..,xk), y1,..)", no);
  const Tree& sym = lhs.child(0);
  auto rank = input.rank(sym.label());
  if (!rank) throw FormatError("unknown input symbol '" + sym.label() + "'", no);
  if (*rank != sym.arity())
    throw FormatError("input symbol '" + sym.label() + "' has rank " + std::to_string(*rank), no);
  for (std::size_t i = 0; i < sym.arity(); ++i)
    if (sym.child(i).label() != input_var(i + 1) || !sym.child(i).is_leaf())
      throw FormatError("input variables must be x1..xk in order", no);
  for (std::size_t j = 1; j < lhs.arity(); ++j)
    if (lhs.child(j).label() != param_var(j) || !lhs.child(j).is_leaf())
      throw FormatError("parameters must be y1..ym in order", no);
  if (params) *params = lhs.arity() - 1;
  return {lhs.label(), sym.label()};
}

std::string lhs_text(const std::string& q, const std::string& sym, std::size_t rank, std::size_t params) {
  std::string s = q + "(" + sym;
  if (rank > 0) {
    s += "(";
    for (std::size_t i = 1; i <= rank; ++i) s += (i > 1 ? "," : "") + input_var(i);
    s += ")";
  }
  for (std::size_t j = 1; j <= params; ++j) s += "," + param_var(j);
  return s + ")";
}

// Dbta state names, made unique when needed.
std::vector<std::string> printable_names(const Dbta& a) {
  std::vector<std::string> names;
  std::set<std::string> seen;
  bool clash = false;
  for (State q = 0; q < a.num_states(); ++q) {
    names.push_back(a.state_name(q));
    if (!seen.insert(names.back()).second) clash = true;
  }
  if (clash)
    for (State q = 0; q < a.num_states(); ++q) names[q] = "s" + std::to_string(q);
  return names;
}

std::string join(const std::vector<std::string>& v, const std::string& sep = " ") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

// Transitions `σ(p1,..,pk) -> p` of a bottom-up automaton.
void read_transition(Dbta& a, const Line& l) {
  auto [left, right] = arrow(l);
  Tree t = at_line(l.no, [&] { return parse_term(left); });
  std::vector<State> kids;
  for (const Tree& c : t.children()) {
    auto q = a.find_state(c.label());
    if (!q || !c.is_leaf()) throw FormatError("unknown state '" + c.label() + "'", l.no);
    kids.push_back(*q);
  }
  auto target = a.find_state(right);
  if (!target) throw FormatError("unknown state '" + right + "'", l.no);
  auto rank = a.alphabet().rank(t.label());
  if (!rank) throw FormatError("unknown symbol '" + t.label() + "'", l.no);
  if (*rank != kids.size()) throw FormatError("wrong number of states for '" + t.label() + "'", l.no);
  a.set_transition(t.label(), std::move(kids), *target);
}

void write_transitions(std::ostream& os, const Dbta& a, const std::string& key) {
  auto names = printable_names(a);
  for (const auto& [sym, table] : a.transitions())
    for (const auto& [kids, target] : table) {
      os << key << ": " << sym;
      if (!kids.empty()) {
        os << "(";
        for (std::size_t i = 0; i < kids.size(); ++i) os << (i ? "," : "") << names[kids[i]];
        os << ")";
      }
      os << " -> " << names[target] << "\n";
    }
}

// Look-ahead automaton from lookahead-states / lookahead-final / lookahead lines.
std::optional<Dbta> read_lookahead(const std::vector<Line>& lines, const RankedAlphabet& input) {
  std::optional<Dbta> la;
  for (const auto& l : lines)
    if (l.key == "lookahead-states") {
      if (!la) la = Dbta(input);
      for (const auto& w : words(l.value)) {
        if (la->find_state(w)) throw FormatError("duplicate look-ahead state '" + w + "'", l.no);
        la->add_state(w);
      }
    }
  for (const auto& l : lines) {
    if (l.key != "lookahead" && l.key != "lookahead-final") continue;
    if (!la) throw FormatError("look-ahead used before 'lookahead-states'", l.no);
    if (l.key == "lookahead") {
      read_transition(*la, l);
    } else {
      for (const auto& w : words(l.value)) {
        auto q = la->find_state(w);
        if (!q) throw FormatError("unknown look-ahead state '" + w + "'", l.no);
        la->set_final(*q);
      }
    }
  }
  return la;
}

void write_lookahead(std::ostream& os, const Dbta& la) {
  auto names = printable_names(la);
  os << "lookahead-states: " << join(names) << "\n";
  std::vector<std::string> fin;
  for (State q : la.finals()) fin.push_back(names[q]);
  if (!fin.empty()) os << "lookahead-final: " << join(fin) << "\n";
  write_transitions(os, la, "lookahead");
}

std::optional<std::vector<State>> resolve_guard(const std::optional<std::vector<std::string>>& g,
                                                const std::optional<Dbta>& la, std::size_t no) {
  if (!g) return std::nullopt;
  if (!la) throw FormatError("guard without look-ahead automaton", no);
  std::vector<State> out;
  for (const auto& n : *g) {
    auto q = la->find_state(n);
    if (!q) throw FormatError("unknown look-ahead state '" + n + "'", no);
    out.push_back(*q);
  }
  return out;
}

std::string guard_text(const std::optional<std::vector<State>>& g, const Dbta* la) {
  if (!g) return "";
  auto names = printable_names(*la);
  std::string s = " <";
  for (std::size_t i = 0; i < g->size(); ++i) s += (i ? "," : "") + names[(*g)[i]];
  return s + ">";
}

void check_keys(const std::vector<Line>& lines, const std::set<std::string>& allowed) {
  for (const auto& l : lines)
    if (!allowed.count(l.key)) throw FormatError("unexpected key '" + l.key + "'", l.no);
}

std::string single(const std::vector<Line>& lines, const std::string& key, bool required = true) {
  std::optional<std::string> v;
  std::size_t no = 1;
  for (const auto& l : lines)
    if (l.key == key) {
      if (v) throw FormatError("duplicate '" + key + "'", l.no);
      v = l.value;
      no = l.no;
    }
  if (!v && required) throw FormatError("missing '" + key + ":'", lines.empty() ? 1 : lines.front().no);
  (void)no;
  return v.value_or("");
}

RankedAlphabet alphabet_lines(const std::vector<Line>& lines, const std::string& key) {
  RankedAlphabet a;
  for (const auto& l : lines)
    if (l.key == key) {
      RankedAlphabet part = at_line(l.no, [&] { return parse_alphabet(l.value); });
      a = at_line(l.no, [&] { return a.merged(part); });
    }
  return a;
}

std::vector<std::string> word_lines(const std::vector<Line>& lines, const std::string& key) {
  std::vector<std::string> out;
  for (const auto& l : lines)
    if (l.key == key)
      for (auto& w : words(l.value)) out.push_back(std::move(w));
  return out;
}

// ---------------------------------------------------------------------------

Document read_mtt(const std::vector<Line>& lines, bool dtop) {
  check_keys(lines, {"input", "output", "states", "initial", "axiom", "lookahead-states", "lookahead-final",
                     "lookahead", "rule"});
  RankedAlphabet in = alphabet_lines(lines, "input"), out = alphabet_lines(lines, "output");
  std::vector<std::pair<std::string, std::size_t>> states;
  for (const auto& l : lines)
    if (l.key == "states")
      for (const auto& w : words(l.value)) {
        RankedAlphabet one = at_line(l.no, [&] { return parse_alphabet(w); });
        const auto& [name, params] = *one.symbols().begin();
        if (dtop && params > 0) throw FormatError("dtop states have no parameters", l.no);
        states.emplace_back(name, params);
      }
  std::string axiom = single(lines, "axiom", false);
  if (!axiom.empty()) {
    if (!dtop) throw FormatError("'axiom' is only allowed in dtop documents", 1);
    for (const auto& l : lines)
      if (l.key == "initial" || l.key.starts_with("lookahead"))
        throw FormatError("axiom documents have no initial state or look-ahead", l.no);
    AxiomDtop a{in, out, {}, parse_term(axiom), {}};
    for (const auto& [q, p] : states) a.states.push_back(q);
    for (const auto& l : lines) {
      if (l.key != "rule") continue;
      auto [left, right] = arrow(l);
      auto [lhs, guard] = lhs_with_guard(left, l.no);
      if (guard) throw FormatError("axiom documents have no look-ahead", l.no);
      auto [q, sym] = rule_head(lhs, in, l.no);
      Tree rhs = at_line(l.no, [&] { return parse_term(right); });
      if (!a.rules.emplace(std::make_pair(q, sym), rhs).second) throw FormatError("duplicate rule", l.no);
    }
    return a;
  }
  Mtt m(in, out);
  for (const auto& [q, p] : states) at_line(1, [&] { m.add_state(q, p); });
  std::string init = single(lines, "initial");
  at_line(1, [&] { m.set_initial(init); });
  auto la = read_lookahead(lines, in);
  if (la) m.set_lookahead(*la);
  for (const auto& l : lines) {
    if (l.key != "rule") continue;
    auto [left, right] = arrow(l);
    auto [lhs, guard] = lhs_with_guard(left, l.no);
    std::size_t params = 0;
    auto [q, sym] = rule_head(lhs, in, l.no, &params);
    if (!m.is_state(q)) throw FormatError("unknown state '" + q + "'", l.no);
    if (m.params(q) != params) throw FormatError("wrong number of parameters for '" + q + "'", l.no);
    Tree rhs = at_line(l.no, [&] { return parse_term(right); });
    m.add_rule(q, sym, rhs, resolve_guard(guard, la, l.no));
  }
  return m;
}

Document read_butt(const std::vector<Line>& lines) {
  check_keys(lines, {"input", "output", "states", "final", "rule"});
  Butt b(alphabet_lines(lines, "input"), alphabet_lines(lines, "output"));
  for (const auto& l : lines)
    if (l.key == "states")
      for (const auto& w : words(l.value)) at_line(l.no, [&] { b.add_state(w); });
  for (const auto& l : lines)
    if (l.key == "final")
      for (const auto& w : words(l.value)) {
        auto q = b.find_state(w);
        if (!q) throw FormatError("unknown state '" + w + "'", l.no);
        b.set_final(*q);
      }
  for (const auto& l : lines) {
    if (l.key != "rule") continue;
    auto [left, right] = arrow(l);
    Tree t = at_line(l.no, [&] { return parse_term(left); });
    std::vector<State> kids;
    for (const Tree& c : t.children()) {
      auto q = b.find_state(c.label());
      if (!q || !c.is_leaf()) throw FormatError("unknown state '" + c.label() + "'", l.no);
      kids.push_back(*q);
    }
    Tree r = at_line(l.no, [&] { return parse_term(right); });
    auto target = b.find_state(r.label());
    if (!target || r.arity() != 1) throw FormatError("right-hand side must be state(output)", l.no);
    b.add_rule(t.label(), std::move(kids), *target, r.child(0));
  }
  return b;
}

Document read_dbta(const std::vector<Line>& lines) {
  check_keys(lines, {"alphabet", "states", "final", "transition"});
  Dbta a(alphabet_lines(lines, "alphabet"));
  for (const auto& w : word_lines(lines, "states")) {
    if (a.find_state(w)) throw FormatError("duplicate state '" + w + "'", 1);
    a.add_state(w);
  }
  for (const auto& l : lines) {
    if (l.key == "final") {
      for (const auto& w : words(l.value)) {
        auto q = a.find_state(w);
        if (!q) throw FormatError("unknown state '" + w + "'", l.no);
        a.set_final(*q);
      }
    } else if (l.key == "transition") {
      read_transition(a, l);
    }
  }
  return a;
}

Document read_dfa(const std::vector<Line>& lines) {
  check_keys(lines, {"letters", "states", "initial", "final", "transition"});
  Dfa a(word_lines(lines, "letters"));
  std::map<std::string, State> idx;
  for (const auto& w : word_lines(lines, "states")) idx[w] = a.add_state(w);
  auto find = [&](const std::string& w, std::size_t no) {
    auto it = idx.find(w);
    if (it == idx.end()) throw FormatError("unknown state '" + w + "'", no);
    return it->second;
  };
  a.set_initial(find(single(lines, "initial"), 1));
  for (const auto& l : lines) {
    if (l.key == "final") {
      for (const auto& w : words(l.value)) a.set_final(find(w, l.no));
    } else if (l.key == "transition") {
      auto [left, right] = arrow(l);
      auto ws = words(left);
      if (ws.size() != 2) throw FormatError("expected 'state letter -> state'", l.no);
      State from = find(ws[0], l.no), to = find(right, l.no);
      at_line(l.no, [&] { a.set_transition(from, ws[1], to); });
    }
  }
  return a;
}

Document read_cfg(const std::vector<Line>& lines) {
  check_keys(lines, {"terminals", "nonterminals", "start", "rule"});
  Cfg g;
  for (const auto& w : word_lines(lines, "terminals")) at_line(1, [&] { g.add_terminal(w); });
  g.start = single(lines, "start");
  at_line(1, [&] { g.add_nonterminal(g.start); });
  for (const auto& w : word_lines(lines, "nonterminals")) at_line(1, [&] { g.add_nonterminal(w); });
  for (const auto& l : lines) {
    if (l.key != "rule") continue;
    auto [left, right] = arrow(l);
    at_line(l.no, [&] { g.add(left, words(right)); });
  }
  return g;
}

Document read_ydt(const std::vector<Line>& lines) {
  check_keys(lines, {"input", "letters", "states", "initial", "lookahead-states", "lookahead-final", "lookahead",
                     "rule"});
  RankedAlphabet in = alphabet_lines(lines, "input");
  YdtFc m(in, word_lines(lines, "letters"));
  for (const auto& q : word_lines(lines, "states")) m.add_state(q);
  std::string init = single(lines, "initial");
  at_line(1, [&] { m.set_initial(init); });
  auto la = read_lookahead(lines, in);
  if (la) m.set_lookahead(*la);
  for (const auto& l : lines) {
    if (l.key != "rule") continue;
    auto [left, right] = arrow(l);
    auto [lhs, guard] = lhs_with_guard(left, l.no);
    std::size_t params = 0;
    auto [q, sym] = rule_head(lhs, in, l.no, &params);
    if (params) throw FormatError("ydt states have no parameters", l.no);
    YdtRule r{q, sym, resolve_guard(guard, la, l.no), {}};
    for (const auto& w : words(right)) {
      std::size_t open = w.find('(');
      if (open != std::string::npos && w.back() == ')') {
        auto i = variable_index(std::string_view(w).substr(open + 1, w.size() - open - 2), 'x');
        if (!i) throw FormatError("malformed call '" + w + "'", l.no);
        r.rhs.push_back({w.substr(0, open), *i});
      } else {
        r.rhs.push_back({w, 0});
      }
    }
    m.add_rule(std::move(r));
  }
  auto problems = validate(m);
  if (!problems.empty()) throw FormatError(problems.front(), 1);
  return m;
}

}  // namespace

RankedAlphabet parse_alphabet(std::string_view text) {
  RankedAlphabet a;
  for (const auto& w : words(text)) {
    std::size_t slash = w.rfind('/');
    std::string name = slash == std::string::npos ? w : w.substr(0, slash);
    std::size_t rank = 0;
    if (slash != std::string::npos) {
      try {
        std::size_t used = 0;
        rank = std::stoul(w.substr(slash + 1), &used);
        if (used != w.size() - slash - 1) throw std::invalid_argument(w);
      } catch (const std::exception&) {
        throw InvalidArgument("bad rank in '" + w + "'");
      }
    }
    a.add(name, rank);
  }
  return a;
}

std::string alphabet_text(const RankedAlphabet& a) {
  std::vector<std::string> parts;
  for (const auto& [name, rank] : a.symbols()) parts.push_back(name + "/" + std::to_string(rank));
  return join(parts);
}

Document parse_document(std::string_view text) {
  auto lines = split_lines(text);
  if (lines.empty() || lines.front().key != "kind") throw FormatError("document must start with 'kind:'", 1);
  std::string kind = lines.front().value;
  std::vector<Line> rest(lines.begin() + 1, lines.end());
  if (kind == "mtt" || kind == "dtop") return read_mtt(rest, kind == "dtop");
  if (kind == "butt") return read_butt(rest);
  if (kind == "dbta") return read_dbta(rest);
  if (kind == "dfa") return read_dfa(rest);
  if (kind == "cfg") return read_cfg(rest);
  if (kind == "ydt") return read_ydt(rest);
  throw FormatError("unknown kind '" + kind + "'", lines.front().no);
}

Document read_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open file", 0, path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_document(ss.str());
  } catch (const FormatError& e) {
    throw FormatError(e.detail(), e.line(), path);
  }
}

std::string kind_of(const Document& d) {
  struct V {
    std::string operator()(const Mtt& m) const { return m.is_dtop() ? "dtop" : "mtt"; }
    std::string operator()(const AxiomDtop&) const { return "dtop"; }
    std::string operator()(const Butt&) const { return "butt"; }
    std::string operator()(const Dbta&) const { return "dbta"; }
    std::string operator()(const Dfa&) const { return "dfa"; }
    std::string operator()(const Cfg&) const { return "cfg"; }
    std::string operator()(const YdtFc&) const { return "ydt"; }
  };
  return std::visit(V{}, d);
}

std::string to_text(const Document& d) {
  return std::visit([](const auto& v) { return to_text(v); }, d);
}

std::string to_text(const Mtt& m) {
  std::ostringstream os;
  os << "kind: " << (m.is_dtop() ? "dtop" : "mtt") << "\n";
  os << "input: " << alphabet_text(m.input()) << "\n";
  os << "output: " << alphabet_text(m.output()) << "\n";
  std::vector<std::string> states;
  for (std::size_t i = 0; i < m.num_states(); ++i) {
    const auto& q = m.state_name(i);
    states.push_back(m.params(q) ? q + "/" + std::to_string(m.params(q)) : q);
  }
  os << "states: " << join(states) << "\n";
  os << "initial: " << m.initial() << "\n";
  if (m.has_lookahead()) write_lookahead(os, m.lookahead());
  for (const auto& r : m.rules())
    os << "rule: " << lhs_text(r.state, r.symbol, m.input().rank_of(r.symbol), m.params(r.state))
       << guard_text(r.lookahead, m.has_lookahead() ? &m.lookahead() : nullptr) << " -> " << r.rhs.to_string()
       << "\n";
  return os.str();
}

std::string to_text(const AxiomDtop& a) {
  std::ostringstream os;
  os << "kind: dtop\n";
  os << "input: " << alphabet_text(a.input) << "\n";
  os << "output: " << alphabet_text(a.output) << "\n";
  os << "states: " << join(a.states) << "\n";
  os << "axiom: " << a.axiom.to_string() << "\n";
  for (const auto& q : a.states)
    for (const auto& [sym, rank] : a.input.symbols()) {
      auto it = a.rules.find({q, sym});
      if (it != a.rules.end()) os << "rule: " << lhs_text(q, sym, rank, 0) << " -> " << it->second.to_string() << "\n";
    }
  return os.str();
}

std::string to_text(const Butt& b) {
  std::ostringstream os;
  os << "kind: butt\n";
  os << "input: " << alphabet_text(b.input()) << "\n";
  os << "output: " << alphabet_text(b.output()) << "\n";
  std::vector<std::string> states, fin;
  for (State q = 0; q < b.num_states(); ++q) {
    states.push_back(b.state_name(q));
    if (b.is_final(q)) fin.push_back(b.state_name(q));
  }
  os << "states: " << join(states) << "\n";
  if (!fin.empty()) os << "final: " << join(fin) << "\n";
  for (const auto& r : b.rules()) {
    os << "rule: " << r.symbol;
    if (!r.children.empty()) {
      os << "(";
      for (std::size_t i = 0; i < r.children.size(); ++i) os << (i ? "," : "") << b.state_name(r.children[i]);
      os << ")";
    }
    os << " -> " << b.state_name(r.target) << "(" << r.rhs.to_string() << ")\n";
  }
  return os.str();
}

std::string to_text(const Dbta& a) {
  std::ostringstream os;
  auto names = printable_names(a);
  os << "kind: dbta\n";
  os << "alphabet: " << alphabet_text(a.alphabet()) << "\n";
  os << "states: " << join(names) << "\n";
  std::vector<std::string> fin;
  for (State q : a.finals()) fin.push_back(names[q]);
  if (!fin.empty()) os << "final: " << join(fin) << "\n";
  write_transitions(os, a, "transition");
  return os.str();
}

std::string to_text(const Dfa& a) {
  std::ostringstream os;
  os << "kind: dfa\n";
  os << "letters: " << join(a.letters()) << "\n";
  std::vector<std::string> states, fin;
  for (State q = 0; q < a.num_states(); ++q) {
    states.push_back(a.state_name(q));
    if (a.is_final(q)) fin.push_back(a.state_name(q));
  }
  os << "states: " << join(states) << "\n";
  os << "initial: " << a.state_name(a.initial()) << "\n";
  if (!fin.empty()) os << "final: " << join(fin) << "\n";
  for (State q = 0; q < a.num_states(); ++q)
    for (const auto& l : a.letters())
      if (auto t = a.next(q, l)) os << "transition: " << a.state_name(q) << " " << l << " -> " << a.state_name(*t) << "\n";
  return os.str();
}

std::string to_text(const Cfg& g) {
  std::ostringstream os;
  os << "kind: cfg\n";
  os << "terminals: " << join(g.terminals) << "\n";
  std::vector<std::string> others;
  for (const auto& n : g.nonterminals)
    if (n != g.start) others.push_back(n);
  os << "start: " << g.start << "\n";
  if (!others.empty()) os << "nonterminals: " << join(others) << "\n";
  for (const auto& p : g.productions) {
    os << "rule: " << p.lhs << " ->";
    for (const auto& s : p.rhs) os << " " << s;
    os << "\n";
  }
  return os.str();
}

std::string to_text(const YdtFc& m) {
  std::ostringstream os;
  os << "kind: ydt\n";
  os << "input: " << alphabet_text(m.input()) << "\n";
  os << "letters: " << join(m.letters()) << "\n";
  os << "states: " << join(m.states()) << "\n";
  os << "initial: " << m.initial() << "\n";
  if (m.has_lookahead()) write_lookahead(os, m.lookahead());
  for (const auto& r : m.rules()) {
    os << "rule: " << lhs_text(r.state, r.symbol, m.input().rank_of(r.symbol), 0)
       << guard_text(r.lookahead, m.has_lookahead() ? &m.lookahead() : nullptr) << " ->";
    for (const auto& it : r.rhs) {
      os << " " << it.name;
      if (it.is_call()) os << "(" << input_var(it.child) << ")";
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace tteq
