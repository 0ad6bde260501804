// Finite unranked ordered forests, contexts and shallow multicontexts.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace fo2dec {

using LabelId = std::uint32_t;

class TermError : public std::runtime_error {
 public:
  enum class Kind {
    Syntax,
    UnknownLabel,
    LabelKind,
    PortCount,
    PortAtRoot,
    PortHasSibling,
    ArityMismatch,
    NotPortNode,
    BadNodeRef,
    BadAlphabet,
  };

  TermError(Kind kind, std::string const& msg, std::size_t pos = 0)
      : std::runtime_error(msg), kind_(kind), pos_(pos) {}

  Kind kind() const noexcept { return kind_; }
  // Byte offset into the parsed text for Syntax errors.
  std::size_t position() const noexcept { return pos_; }

 private:
  Kind kind_;
  std::size_t pos_;
};

// A finite alphabet (A, B): A labels leaves, B labels inner nodes.
class Alphabet {
 public:
  Alphabet() = default;
  Alphabet(std::vector<std::string> leaves, std::vector<std::string> inners);

  std::optional<LabelId> leaf(std::string_view name) const;
  std::optional<LabelId> inner(std::string_view name) const;

  std::string const& leaf_name(LabelId id) const { return leaves_.at(id); }
  std::string const& inner_name(LabelId id) const { return inners_.at(id); }
  std::size_t leaf_count() const noexcept { return leaves_.size(); }
  std::size_t inner_count() const noexcept { return inners_.size(); }
  std::vector<std::string> const& leaves() const noexcept { return leaves_; }
  std::vector<std::string> const& inners() const noexcept { return inners_; }

  LabelId add_leaf(std::string name);

  bool operator==(Alphabet const& other) const {
    return leaves_ == other.leaves_ && inners_ == other.inners_;
  }

 private:
  std::vector<std::string> leaves_;
  std::vector<std::string> inners_;
  std::unordered_map<std::string, LabelId> leaf_index_;
  std::unordered_map<std::string, LabelId> inner_index_;
};

bool is_identifier(std::string_view s);

enum class NodeKind : std::uint8_t { Leaf, Inner, Port };

struct Node {
  NodeKind kind = NodeKind::Leaf;
  LabelId label = 0;
  std::vector<Node> children;

  bool operator==(Node const&) const = default;
  auto operator<=>(Node const&) const = default;
};

// Root-to-node child-index path, 0-based; the first index selects a root.
using NodeRef = std::vector<std::size_t>;

// A nonempty forest without ports.
class ForestTerm {
 public:
  ForestTerm() = default;
  explicit ForestTerm(std::vector<Node> trees);

  std::vector<Node> const& trees() const noexcept { return trees_; }
  std::size_t node_count() const;

  bool operator==(ForestTerm const&) const = default;
  auto operator<=>(ForestTerm const&) const = default;

 private:
  std::vector<Node> trees_;
};

// A forest with exactly one port leaf that is not a root and has no sibling.
class ContextTerm {
 public:
  ContextTerm() = default;
  explicit ContextTerm(std::vector<Node> trees);

  std::vector<Node> const& trees() const noexcept { return trees_; }
  NodeRef const& port() const noexcept { return port_; }
  // Ancestors of the port, root first.
  std::vector<NodeRef> backbone() const;

  bool operator==(ContextTerm const&) const = default;

 private:
  std::vector<Node> trees_;
  NodeRef port_;
};

ForestTerm parse_forest(std::string_view text, Alphabet const& alphabet);
ContextTerm parse_context(std::string_view text, Alphabet const& alphabet);

std::string print(ForestTerm const& f, Alphabet const& alphabet);
std::string print(ContextTerm const& c, Alphabet const& alphabet);
std::string print_trees(std::vector<Node> const& trees,
                        Alphabet const& alphabet);

ForestTerm compose(ContextTerm const& c, ForestTerm const& arg);
ContextTerm compose(ContextTerm const& c, ContextTerm const& arg);

Node const& resolve(std::vector<Node> const& trees, NodeRef const& ref);
// All nodes in document order (preorder, left to right).
std::vector<NodeRef> all_nodes(std::vector<Node> const& trees);

////////////////////////////////////////////////////////////////////////
// Shals
////////////////////////////////////////////////////////////////////////

using LetterId = std::uint32_t;

// A letter of the shal alphabet: a, b([]) or b(a).
struct ShalLetter {
  enum class Kind : std::uint8_t { Leaf, InnerPort, InnerLeaf };
  Kind kind = Kind::Leaf;
  LabelId inner = 0;  // unused for Leaf
  LabelId leaf = 0;   // unused for InnerPort

  bool operator==(ShalLetter const&) const = default;
};

// Interned letter table for an alphabet. Order: leaves, then b([]) for each
// inner label, then b(a) for each inner b and leaf a.
class ShalAlphabet {
 public:
  ShalAlphabet() = default;
  explicit ShalAlphabet(Alphabet const& alphabet);

  std::size_t size() const noexcept { return letters_.size(); }
  ShalLetter const& letter(LetterId id) const { return letters_.at(id); }
  LetterId leaf_letter(LabelId a) const { return a; }
  LetterId port_letter(LabelId b) const {
    return static_cast<LetterId>(n_leaves_ + b);
  }
  LetterId inner_leaf_letter(LabelId b, LabelId a) const {
    return static_cast<LetterId>(n_leaves_ + n_inners_ + b * n_leaves_ + a);
  }
  std::string name(LetterId id) const;
  std::optional<LetterId> find(std::string_view name) const;

  Alphabet const& alphabet() const noexcept { return alphabet_; }

 private:
  Alphabet alphabet_;
  std::size_t n_leaves_ = 0;
  std::size_t n_inners_ = 0;
  std::vector<ShalLetter> letters_;
};

using Shal = std::vector<LetterId>;

std::size_t shal_arity(Shal const& p, ShalAlphabet const& letters);
std::string print_shal(Shal const& p, ShalAlphabet const& letters);
// Accepts "+"-separated letters; the port may be written "[]" or "□".
Shal parse_shal(std::string_view text, ShalAlphabet const& letters);

struct ShalPosition {
  Shal shal;
  std::size_t index = 0;
};

// The shal of the row containing x, and x's index in that row.
ShalPosition shal_at(ForestTerm const& f, NodeRef const& x,
                     ShalAlphabet const& letters);

using PlugResult = std::variant<ForestTerm, ContextTerm>;

// Fills the ports of p left to right with the given forests. With keep set,
// the port under position keep stays open and the result is a context.
PlugResult shal_plug(Shal const& p, std::vector<ForestTerm> const& forests,
                     std::optional<std::size_t> keep,
                     ShalAlphabet const& letters);

// All shals of length 1..max_len over the given letters, length-lexicographic
// with respect to the order of `letters`.
std::vector<Shal> enumerate_shals(std::vector<LetterId> const& letters,
                                  std::size_t max_len);

}  // namespace fo2dec
