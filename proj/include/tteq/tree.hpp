#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tteq {

// Reserved labels: the hole of a partial input and the axiom placeholder.
inline constexpr std::string_view kHole = "x";
inline constexpr std::string_view kAxiomVar = "x0";

// If `label` is `<prefix><digits>` with a positive number, returns the number.
std::optional<std::size_t> variable_index(std::string_view label, char prefix);
inline bool is_input_var(std::string_view l) { return variable_index(l, 'x').has_value(); }
inline bool is_param(std::string_view l) { return variable_index(l, 'y').has_value(); }
inline bool is_hole(std::string_view l) { return l == kHole; }
// Names that may never be declared as alphabet symbols.
bool is_reserved_name(std::string_view l);
std::string input_var(std::size_t i);
std::string param_var(std::size_t j);

class RankedAlphabet {
 public:
  using Map = std::map<std::string, std::size_t, std::less<>>;

  RankedAlphabet() = default;
  RankedAlphabet(std::initializer_list<std::pair<const std::string, std::size_t>> symbols);

  // Adds a symbol; re-adding with the same rank is a no-op, a different rank throws.
  void add(const std::string& name, std::size_t rank);
  bool contains(std::string_view name) const { return symbols_.find(name) != symbols_.end(); }
  std::optional<std::size_t> rank(std::string_view name) const;
  std::size_t rank_of(std::string_view name) const;

  const Map& symbols() const { return symbols_; }
  std::vector<std::string> names() const;
  std::vector<std::string> of_rank(std::size_t k) const;
  std::size_t size() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }
  std::size_t max_rank() const;
  // Only ranks 0 and 1.
  bool is_monadic() const;
  // Union; throws on rank conflicts.
  RankedAlphabet merged(const RankedAlphabet& other) const;

  std::string to_string() const;
  friend bool operator==(const RankedAlphabet&, const RankedAlphabet&) = default;

 private:
  Map symbols_;
};

// Immutable ordered ranked tree. Copies share structure.
class Tree {
 public:
  explicit Tree(std::string label, std::vector<Tree> children = {});
  static Tree leaf(std::string label) { return Tree(std::move(label)); }

  const std::string& label() const { return node_->label; }
  std::span<const Tree> children() const { return node_->children; }
  const Tree& child(std::size_t i) const { return node_->children.at(i); }
  std::size_t arity() const { return node_->children.size(); }
  bool is_leaf() const { return node_->children.empty(); }

  // Node count, saturating at UINT64_MAX.
  std::uint64_t size() const { return node_->size; }
  std::size_t height() const { return node_->height; }
  std::size_t hash() const { return node_->hash; }
  const void* identity() const { return node_.get(); }

  std::string to_string() const;

  friend bool operator==(const Tree& a, const Tree& b);
  friend bool operator!=(const Tree& a, const Tree& b) { return !(a == b); }
  // Total order: size, then label, then children lexicographically.
  friend bool operator<(const Tree& a, const Tree& b);

 private:
  struct Node {
    std::string label;
    std::vector<Tree> children;
    std::uint64_t size;
    std::size_t height;
    std::size_t hash;
  };
  std::shared_ptr<const Node> node_;
};

struct TreeHash {
  std::size_t operator()(const Tree& t) const { return t.hash(); }
};

// Dewey address with 1-based steps; the empty path is the root.
class Path {
 public:
  Path() = default;
  explicit Path(std::vector<std::size_t> steps);
  static Path parse(std::string_view text);

  const std::vector<std::size_t>& steps() const { return steps_; }
  bool is_root() const { return steps_.empty(); }
  std::size_t length() const { return steps_.size(); }
  Path child(std::size_t i) const;
  std::string to_string() const;

  friend auto operator<=>(const Path&, const Path&) = default;

 private:
  std::vector<std::size_t> steps_;
};

struct TreeMetrics {
  std::uint64_t size;
  std::size_t height;
  friend bool operator==(const TreeMetrics&, const TreeMetrics&) = default;
};

// Parses the term syntax `name` | `name(t1,...,tk)`; every symbol must be in
// `alphabet` with matching arity.
Tree parse_tree(std::string_view text, const RankedAlphabet& alphabet);
// Same syntax without alphabet checks.
Tree parse_term(std::string_view text);
// Parses one term starting at `pos`, advancing it past the term.
Tree parse_term_prefix(std::string_view text, std::size_t& pos);
// Parses a symbol name at `pos` (after skipping whitespace); empty if none.
std::string parse_name(std::string_view text, std::size_t& pos);
void skip_space(std::string_view text, std::size_t& pos);

// Checks every node against `alphabet`; throws AlphabetError.
void check_tree(const Tree& t, const RankedAlphabet& alphabet);
bool conforms(const Tree& t, const RankedAlphabet& alphabet);

// Replaces each leaf labeled by a bound symbol with its binding, simultaneously
// (replacements are not rescanned).
Tree substitute_leaves(const Tree& t, const std::map<std::string, Tree, std::less<>>& bindings);
bool contains_path(const Tree& t, const Path& u);
const Tree& subtree_at(const Tree& t, const Path& u);
const std::string& label_at(const Tree& t, const Path& u);
Tree replace_at(const Tree& t, const Path& u, const Tree& replacement);
TreeMetrics metrics(const Tree& t);
// V(t) in preorder.
std::vector<Path> nodes(const Tree& t);
// Leaf labels from left to right.
std::vector<std::string> yield(const Tree& t);

// Monadic trees a1(...an(leaf)...) <-> label sequences (leaf included).
Tree monadic_tree(std::span<const std::string> unary, const std::string& leaf);

}  // namespace tteq
