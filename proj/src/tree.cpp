#include "tteq/tree.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "tteq/error.hpp"

namespace tteq {

std::optional<std::size_t> variable_index(std::string_view label, char prefix) {
  if (label.size() < 2 || label[0] != prefix) return std::nullopt;
  std::size_t value = 0;
  for (std::size_t i = 1; i < label.size(); ++i) {
    char c = label[i];
    if (c < '0' || c > '9') return std::nullopt;
    if (i == 1 && c == '0' && label.size() > 2) return std::nullopt;
    value = value * 10 + static_cast<std::size_t>(c - '0');
    if (value > 1000000) return std::nullopt;
  }
  return value;
}

bool is_reserved_name(std::string_view l) { return is_hole(l) || is_input_var(l) || is_param(l); }

std::string input_var(std::size_t i) { return "x" + std::to_string(i); }
std::string param_var(std::size_t j) { return "y" + std::to_string(j); }

// ---------------------------------------------------------------------------
// RankedAlphabet

RankedAlphabet::RankedAlphabet(std::initializer_list<std::pair<const std::string, std::size_t>> symbols) {
  for (const auto& [name, rank] : symbols) add(name, rank);
}

void RankedAlphabet::add(const std::string& name, std::size_t rank) {
  if (name.empty()) throw InvalidArgument("empty symbol name");
  auto it = symbols_.find(name);
  if (it != symbols_.end()) {
    if (it->second != rank)
      throw AlphabetError("symbol '" + name + "' declared with ranks " + std::to_string(it->second) +
                            " and " + std::to_string(rank));
    return;
  }
  symbols_.emplace(name, rank);
}

std::optional<std::size_t> RankedAlphabet::rank(std::string_view name) const {
  auto it = symbols_.find(name);
  if (it == symbols_.end()) return std::nullopt;
  return it->second;
}

std::size_t RankedAlphabet::rank_of(std::string_view name) const {
  auto r = rank(name);
  if (!r) throw AlphabetError("unknown symbol '" + std::string(name) + "'");
  return *r;
}

std::vector<std::string> RankedAlphabet::names() const {
  std::vector<std::string> out;
  out.reserve(symbols_.size());
  for (const auto& [n, r] : symbols_) out.push_back(n);
  return out;
}

std::vector<std::string> RankedAlphabet::of_rank(std::size_t k) const {
  std::vector<std::string> out;
  for (const auto& [n, r] : symbols_)
    if (r == k) out.push_back(n);
  return out;
}

std::size_t RankedAlphabet::max_rank() const {
  std::size_t m = 0;
  for (const auto& [n, r] : symbols_) m = std::max(m, r);
  return m;
}

bool RankedAlphabet::is_monadic() const {
  return std::all_of(symbols_.begin(), symbols_.end(), [](const auto& e) { return e.second <= 1; });
}

RankedAlphabet RankedAlphabet::merged(const RankedAlphabet& other) const {
  RankedAlphabet out = *this;
  for (const auto& [n, r] : other.symbols_) out.add(n, r);
  return out;
}

std::string RankedAlphabet::to_string() const {
  std::string out;
  for (const auto& [n, r] : symbols_) {
    if (!out.empty()) out += ' ';
    out += n + ":" + std::to_string(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tree

namespace {

std::size_t hash_combine(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max() : a + b;
}

}  // namespace

Tree::Tree(std::string label, std::vector<Tree> children) {
  std::uint64_t size = 1;
  std::size_t height = 0;
  std::size_t h = std::hash<std::string>{}(label);
  for (const Tree& c : children) {
    size = saturating_add(size, c.size());
    height = std::max(height, c.height());
    h = hash_combine(h, c.hash());
  }
  h = hash_combine(h, children.size());
  node_ = std::make_shared<const Node>(Node{std::move(label), std::move(children), size, height + 1, h});
}

bool operator==(const Tree& a, const Tree& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.size() != b.size() || a.label() != b.label() || a.arity() != b.arity())
    return false;
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (!(a.child(i) == b.child(i))) return false;
  return true;
}

bool operator<(const Tree& a, const Tree& b) {
  if (a.node_ == b.node_) return false;
  if (a.size() != b.size()) return a.size() < b.size();
  if (a.label() != b.label()) return a.label() < b.label();
  for (std::size_t i = 0; i < std::min(a.arity(), b.arity()); ++i) {
    if (a.child(i) < b.child(i)) return true;
    if (b.child(i) < a.child(i)) return false;
  }
  return a.arity() < b.arity();
}

namespace {

void write_tree(std::string& out, const Tree& t) {
  out += t.label();
  if (t.is_leaf()) return;
  out += '(';
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (i) out += ',';
    write_tree(out, t.child(i));
  }
  out += ')';
}

}  // namespace

std::string Tree::to_string() const {
  std::string out;
  write_tree(out, *this);
  return out;
}

// ---------------------------------------------------------------------------
// Path

Path::Path(std::vector<std::size_t> steps) : steps_(std::move(steps)) {
  for (auto s : steps_)
    if (s == 0) throw InvalidArgument("path steps are 1-based");
}

Path Path::parse(std::string_view text) {
  std::vector<std::size_t> steps;
  if (text.empty() || text == "eps" || text == "ε") return Path{};
  std::size_t value = 0;
  bool have_digit = false;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '.') {
      if (!have_digit || value == 0) throw ParseError("malformed path '" + std::string(text) + "'", i);
      steps.push_back(value);
      value = 0;
      have_digit = false;
    } else if (text[i] >= '0' && text[i] <= '9') {
      value = value * 10 + static_cast<std::size_t>(text[i] - '0');
      have_digit = true;
    } else {
      throw ParseError("malformed path '" + std::string(text) + "'", i);
    }
  }
  return Path(std::move(steps));
}

Path Path::child(std::size_t i) const {
  auto s = steps_;
  s.push_back(i);
  return Path(std::move(s));
}

std::string Path::to_string() const {
  if (steps_.empty()) return "eps";
  std::string out;
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(steps_[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

bool is_name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '\'';
}

}  // namespace

void skip_space(std::string_view text, std::size_t& pos) {
  while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n' || text[pos] == '\r'))
    ++pos;
}

std::string parse_name(std::string_view text, std::size_t& pos) {
  skip_space(text, pos);
  std::string name;
  while (pos < text.size()) {
    char c = text[pos];
    if (is_name_char(c)) {
      name += c;
      ++pos;
    } else if (c == '<') {
      // Bracketed groups may contain commas, e.g. annotated symbols <a,p1,p2>.
      std::size_t depth = 0;
      std::size_t start = pos;
      do {
        if (pos >= text.size()) throw ParseError("unterminated '<' in name", start);
        char d = text[pos];
        if (d == '<') ++depth;
        else if (d == '>') --depth;
        else if (d != ',' && !is_name_char(d)) throw ParseError("invalid character in bracketed name", pos);
        name += d;
        ++pos;
      } while (depth > 0);
    } else {
      break;
    }
  }
  return name;
}

Tree parse_term_prefix(std::string_view text, std::size_t& pos) {
  std::size_t start = pos;
  skip_space(text, pos);
  std::size_t name_pos = pos;
  std::string name = parse_name(text, pos);
  if (name.empty()) throw ParseError("expected a symbol name", name_pos == text.size() ? name_pos : std::max(start, name_pos));
  skip_space(text, pos);
  std::vector<Tree> children;
  if (pos < text.size() && text[pos] == '(') {
    ++pos;
    skip_space(text, pos);
    if (pos < text.size() && text[pos] == ')') {
      ++pos;
    } else {
      while (true) {
        children.push_back(parse_term_prefix(text, pos));
        skip_space(text, pos);
        if (pos >= text.size()) throw ParseError("expected ',' or ')'", pos);
        if (text[pos] == ',') {
          ++pos;
          continue;
        }
        if (text[pos] == ')') {
          ++pos;
          break;
        }
        throw ParseError(std::string("unexpected character '") + text[pos] + "'", pos);
      }
    }
  }
  return Tree(std::move(name), std::move(children));
}

Tree parse_term(std::string_view text) {
  std::size_t pos = 0;
  Tree t = parse_term_prefix(text, pos);
  skip_space(text, pos);
  if (pos != text.size()) throw ParseError("trailing input after term", pos);
  return t;
}

namespace {

// Validates symbols while re-walking the source for positions.
void check_positions(std::string_view text, std::size_t& pos, const RankedAlphabet& alphabet) {
  skip_space(text, pos);
  std::size_t name_pos = pos;
  std::string name = parse_name(text, pos);
  auto rank = alphabet.rank(name);
  if (!rank) throw AlphabetError("unknown symbol '" + name + "' at position " + std::to_string(name_pos));
  skip_space(text, pos);
  std::size_t count = 0;
  if (pos < text.size() && text[pos] == '(') {
    ++pos;
    skip_space(text, pos);
    if (pos < text.size() && text[pos] == ')') {
      ++pos;
    } else {
      while (true) {
        check_positions(text, pos, alphabet);
        ++count;
        skip_space(text, pos);
        if (text[pos] == ',') {
          ++pos;
          continue;
        }
        ++pos;
        break;
      }
    }
  }
  if (count != *rank)
    throw ArityError("symbol '" + name + "' has rank " + std::to_string(*rank) + " but " + std::to_string(count) +
                         " children",
                     name_pos);
}

}  // namespace

Tree parse_tree(std::string_view text, const RankedAlphabet& alphabet) {
  Tree t = parse_term(text);
  std::size_t pos = 0;
  check_positions(text, pos, alphabet);
  return t;
}

void check_tree(const Tree& t, const RankedAlphabet& alphabet) {
  auto rank = alphabet.rank(t.label());
  if (!rank) throw AlphabetError("symbol '" + t.label() + "' is not in the alphabet");
  if (*rank != t.arity())
    throw AlphabetError("symbol '" + t.label() + "' has rank " + std::to_string(*rank) + " but " +
                        std::to_string(t.arity()) + " children");
  for (const Tree& c : t.children()) check_tree(c, alphabet);
}

bool conforms(const Tree& t, const RankedAlphabet& alphabet) {
  auto rank = alphabet.rank(t.label());
  if (!rank || *rank != t.arity()) return false;
  for (const Tree& c : t.children())
    if (!conforms(c, alphabet)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Substitution and addressing

namespace {

Tree substitute_rec(const Tree& t, const std::map<std::string, Tree, std::less<>>& bindings) {
  if (t.is_leaf()) {
    auto it = bindings.find(t.label());
    return it == bindings.end() ? t : it->second;
  }
  std::vector<Tree> kids;
  kids.reserve(t.arity());
  bool changed = false;
  for (const Tree& c : t.children()) {
    kids.push_back(substitute_rec(c, bindings));
    changed = changed || kids.back().identity() != c.identity();
  }
  return changed ? Tree(t.label(), std::move(kids)) : t;
}

}  // namespace

Tree substitute_leaves(const Tree& t, const std::map<std::string, Tree, std::less<>>& bindings) {
  // A bound symbol occurring as an inner node has rank > 0.
  std::function<void(const Tree&)> check_inner = [&](const Tree& n) {
    if (!n.is_leaf() && bindings.count(n.label()))
      throw InvalidArgument("cannot bind '" + n.label() + "': it has rank > 0");
    for (const Tree& c : n.children()) check_inner(c);
  };
  check_inner(t);
  return substitute_rec(t, bindings);
}

bool contains_path(const Tree& t, const Path& u) {
  const Tree* cur = &t;
  for (auto step : u.steps()) {
    if (step > cur->arity()) return false;
    cur = &cur->child(step - 1);
  }
  return true;
}

const Tree& subtree_at(const Tree& t, const Path& u) {
  const Tree* cur = &t;
  for (auto step : u.steps()) {
    if (step == 0 || step > cur->arity()) throw InvalidArgument("path " + u.to_string() + " is not a node");
    cur = &cur->child(step - 1);
  }
  return *cur;
}

const std::string& label_at(const Tree& t, const Path& u) { return subtree_at(t, u).label(); }

namespace {

Tree replace_rec(const Tree& t, const std::vector<std::size_t>& steps, std::size_t depth, const Tree& replacement) {
  if (depth == steps.size()) return replacement;
  std::size_t i = steps[depth];
  std::vector<Tree> kids(t.children().begin(), t.children().end());
  kids[i - 1] = replace_rec(t.child(i - 1), steps, depth + 1, replacement);
  return Tree(t.label(), std::move(kids));
}

}  // namespace

Tree replace_at(const Tree& t, const Path& u, const Tree& replacement) {
  if (!contains_path(t, u)) throw InvalidArgument("path " + u.to_string() + " is not a node");
  return replace_rec(t, u.steps(), 0, replacement);
}

TreeMetrics metrics(const Tree& t) { return {t.size(), t.height()}; }

namespace {

void collect_nodes(const Tree& t, const Path& here, std::vector<Path>& out) {
  out.push_back(here);
  for (std::size_t i = 0; i < t.arity(); ++i) collect_nodes(t.child(i), here.child(i + 1), out);
}

void collect_yield(const Tree& t, std::vector<std::string>& out) {
  if (t.is_leaf()) {
    out.push_back(t.label());
    return;
  }
  for (const Tree& c : t.children()) collect_yield(c, out);
}

}  // namespace

std::vector<Path> nodes(const Tree& t) {
  std::vector<Path> out;
  collect_nodes(t, Path{}, out);
  return out;
}

std::vector<std::string> yield(const Tree& t) {
  std::vector<std::string> out;
  collect_yield(t, out);
  return out;
}

Tree monadic_tree(std::span<const std::string> unary, const std::string& leaf) {
  Tree t = Tree::leaf(leaf);
  for (auto it = unary.rbegin(); it != unary.rend(); ++it) t = Tree(*it, {t});
  return t;
}

}  // namespace tteq
