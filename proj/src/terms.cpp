#include "fo2dec/terms.hpp"

#include <algorithm>
#include <cctype>

namespace fo2dec {

namespace {

constexpr std::string_view kPortGlyph = "\xE2\x96\xA1";  // U+25A1

TermError kind_error(std::string const& msg) {
  return TermError(TermError::Kind::LabelKind, msg);
}

}  // namespace

bool is_identifier(std::string_view s) {
  if (s.empty()) {
    return false;
  }
  auto head = static_cast<unsigned char>(s.front());
  if (!(std::isalpha(head) || head == '_')) {
    return false;
  }
  return std::all_of(s.begin(), s.end(), [](char ch) {
    auto c = static_cast<unsigned char>(ch);
    return std::isalnum(c) || c == '_';
  });
}

////////////////////////////////////////////////////////////////////////
// Alphabet
////////////////////////////////////////////////////////////////////////

Alphabet::Alphabet(std::vector<std::string> leaves,
                   std::vector<std::string> inners) {
  if (leaves.empty() && inners.empty()) {
    throw TermError(TermError::Kind::BadAlphabet, "alphabet is empty");
  }
  for (auto& a : leaves) {
    add_leaf(std::move(a));
  }
  for (auto& b : inners) {
    if (!is_identifier(b)) {
      throw TermError(TermError::Kind::BadAlphabet,
                      "label is not an identifier: '" + b + "'");
    }
    if (leaf_index_.count(b) != 0 || inner_index_.count(b) != 0) {
      throw TermError(TermError::Kind::BadAlphabet,
                      "duplicate label '" + b + "'");
    }
    inner_index_.emplace(b, static_cast<LabelId>(inners_.size()));
    inners_.push_back(std::move(b));
  }
}

LabelId Alphabet::add_leaf(std::string name) {
  if (!is_identifier(name)) {
    throw TermError(TermError::Kind::BadAlphabet,
                    "label is not an identifier: '" + name + "'");
  }
  if (leaf_index_.count(name) != 0 || inner_index_.count(name) != 0) {
    throw TermError(TermError::Kind::BadAlphabet,
                    "duplicate label '" + name + "'");
  }
  auto id = static_cast<LabelId>(leaves_.size());
  leaf_index_.emplace(name, id);
  leaves_.push_back(std::move(name));
  return id;
}

std::optional<LabelId> Alphabet::leaf(std::string_view name) const {
  auto it = leaf_index_.find(std::string(name));
  if (it == leaf_index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::optional<LabelId> Alphabet::inner(std::string_view name) const {
  auto it = inner_index_.find(std::string(name));
  if (it == inner_index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

////////////////////////////////////////////////////////////////////////
// Term validation
////////////////////////////////////////////////////////////////////////

namespace {

void count_ports(std::vector<Node> const& trees, NodeRef& path,
                 std::vector<NodeRef>& found) {
  for (std::size_t i = 0; i < trees.size(); ++i) {
    path.push_back(i);
    Node const& n = trees[i];
    if (n.kind == NodeKind::Port) {
      found.push_back(path);
    } else if (n.kind == NodeKind::Inner) {
      if (n.children.empty()) {
        throw kind_error("inner node without children");
      }
      count_ports(n.children, path, found);
    } else if (!n.children.empty()) {
      throw kind_error("leaf node with children");
    }
    path.pop_back();
  }
}

std::size_t count_nodes(std::vector<Node> const& trees) {
  std::size_t total = 0;
  for (auto const& n : trees) {
    total += 1 + count_nodes(n.children);
  }
  return total;
}

}  // namespace

ForestTerm::ForestTerm(std::vector<Node> trees) : trees_(std::move(trees)) {
  if (trees_.empty()) {
    throw TermError(TermError::Kind::Syntax, "empty forest");
  }
  NodeRef path;
  std::vector<NodeRef> ports;
  count_ports(trees_, path, ports);
  if (!ports.empty()) {
    throw TermError(TermError::Kind::PortCount, "forest contains a port");
  }
}

std::size_t ForestTerm::node_count() const {
  return count_nodes(trees_);
}

ContextTerm::ContextTerm(std::vector<Node> trees) : trees_(std::move(trees)) {
  if (trees_.empty()) {
    throw TermError(TermError::Kind::Syntax, "empty context");
  }
  NodeRef path;
  std::vector<NodeRef> ports;
  count_ports(trees_, path, ports);
  if (ports.size() != 1) {
    throw TermError(TermError::Kind::PortCount,
                    "context must contain exactly one port, found "
                        + std::to_string(ports.size()));
  }
  port_ = ports.front();
  if (port_.size() == 1) {
    throw TermError(TermError::Kind::PortAtRoot, "the port is a root");
  }
  NodeRef parent(port_.begin(), port_.end() - 1);
  if (resolve(trees_, parent).children.size() != 1) {
    throw TermError(TermError::Kind::PortHasSibling,
                    "the port has a sibling");
  }
}

std::vector<NodeRef> ContextTerm::backbone() const {
  std::vector<NodeRef> result;
  for (std::size_t len = 1; len < port_.size(); ++len) {
    result.emplace_back(port_.begin(), port_.begin() + len);
  }
  return result;
}

Node const& resolve(std::vector<Node> const& trees, NodeRef const& ref) {
  if (ref.empty()) {
    throw TermError(TermError::Kind::BadNodeRef, "empty node reference");
  }
  std::vector<Node> const* level = &trees;
  Node const* node = nullptr;
  for (auto i : ref) {
    if (i >= level->size()) {
      throw TermError(TermError::Kind::BadNodeRef,
                      "node reference does not resolve");
    }
    node = &(*level)[i];
    level = &node->children;
  }
  return *node;
}

namespace {

void collect_nodes(std::vector<Node> const& trees, NodeRef& path,
                   std::vector<NodeRef>& out) {
  for (std::size_t i = 0; i < trees.size(); ++i) {
    path.push_back(i);
    out.push_back(path);
    collect_nodes(trees[i].children, path, out);
    path.pop_back();
  }
}

}  // namespace

std::vector<NodeRef> all_nodes(std::vector<Node> const& trees) {
  std::vector<NodeRef> out;
  NodeRef path;
  collect_nodes(trees, path, out);
  return out;
}

////////////////////////////////////////////////////////////////////////
// Parsing and printing
////////////////////////////////////////////////////////////////////////

namespace {

class Parser {
 public:
  Parser(std::string_view text, Alphabet const& alphabet, bool allow_port)
      : text_(text), alphabet_(alphabet), allow_port_(allow_port) {}

  std::vector<Node> parse() {
    auto trees = forest();
    skip_ws();
    if (pos_ != text_.size()) {
      fail("unexpected trailing input");
    }
    return trees;
  }

 private:
  [[noreturn]] void fail(std::string const& what) const {
    throw TermError(TermError::Kind::Syntax,
                    what + " at offset " + std::to_string(pos_), pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size()
           && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool eat(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  std::vector<Node> forest() {
    std::vector<Node> trees;
    trees.push_back(tree());
    while (eat("+")) {
      trees.push_back(tree());
    }
    return trees;
  }

  Node tree() {
    skip_ws();
    if (eat("[]") || eat(kPortGlyph)) {
      if (!allow_port_) {
        throw TermError(TermError::Kind::PortCount,
                        "port not allowed in a forest", pos_);
      }
      return Node{NodeKind::Port, 0, {}};
    }
    std::size_t start = pos_;
    while (pos_ < text_.size()
           && (std::isalnum(static_cast<unsigned char>(text_[pos_]))
               || text_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_) {
      fail("expected a label");
    }
    std::string_view name = text_.substr(start, pos_ - start);
    if (!is_identifier(name)) {
      pos_ = start;
      fail("malformed label '" + std::string(name) + "'");
    }
    bool has_children = eat("(");
    if (has_children) {
      auto b = alphabet_.inner(name);
      if (!b) {
        if (alphabet_.leaf(name)) {
          throw kind_error("leaf label '" + std::string(name)
                           + "' given children");
        }
        throw TermError(TermError::Kind::UnknownLabel,
                        "unknown label '" + std::string(name) + "'", start);
      }
      Node n{NodeKind::Inner, *b, forest()};
      if (!eat(")")) {
        fail("expected ')'");
      }
      return n;
    }
    auto a = alphabet_.leaf(name);
    if (!a) {
      if (alphabet_.inner(name)) {
        throw kind_error("inner label '" + std::string(name)
                         + "' used as a leaf");
      }
      throw TermError(TermError::Kind::UnknownLabel,
                      "unknown label '" + std::string(name) + "'", start);
    }
    return Node{NodeKind::Leaf, *a, {}};
  }

  std::string_view text_;
  Alphabet const& alphabet_;
  bool allow_port_;
  std::size_t pos_ = 0;
};

void print_node(Node const& n, Alphabet const& alphabet, std::string& out);

void print_list(std::vector<Node> const& trees, Alphabet const& alphabet,
                std::string& out) {
  for (std::size_t i = 0; i < trees.size(); ++i) {
    if (i != 0) {
      out += " + ";
    }
    print_node(trees[i], alphabet, out);
  }
}

void print_node(Node const& n, Alphabet const& alphabet, std::string& out) {
  switch (n.kind) {
    case NodeKind::Port:
      out += "[]";
      break;
    case NodeKind::Leaf:
      out += alphabet.leaf_name(n.label);
      break;
    case NodeKind::Inner:
      out += alphabet.inner_name(n.label);
      out += '(';
      print_list(n.children, alphabet, out);
      out += ')';
      break;
  }
}

}  // namespace

ForestTerm parse_forest(std::string_view text, Alphabet const& alphabet) {
  return ForestTerm(Parser(text, alphabet, false).parse());
}

ContextTerm parse_context(std::string_view text, Alphabet const& alphabet) {
  return ContextTerm(Parser(text, alphabet, true).parse());
}

std::string print_trees(std::vector<Node> const& trees,
                        Alphabet const& alphabet) {
  std::string out;
  print_list(trees, alphabet, out);
  return out;
}

std::string print(ForestTerm const& f, Alphabet const& alphabet) {
  return print_trees(f.trees(), alphabet);
}

std::string print(ContextTerm const& c, Alphabet const& alphabet) {
  return print_trees(c.trees(), alphabet);
}

////////////////////////////////////////////////////////////////////////
// Composition
////////////////////////////////////////////////////////////////////////

namespace {

Node& resolve_mut(std::vector<Node>& trees, NodeRef const& ref) {
  std::vector<Node>* level = &trees;
  Node* node = nullptr;
  for (auto i : ref) {
    node = &(*level)[i];
    level = &node->children;
  }
  return *node;
}

std::vector<Node> substitute(ContextTerm const& c,
                             std::vector<Node> const& arg) {
  std::vector<Node> trees = c.trees();
  NodeRef parent(c.port().begin(), c.port().end() - 1);
  resolve_mut(trees, parent).children = arg;
  return trees;
}

}  // namespace

ForestTerm compose(ContextTerm const& c, ForestTerm const& arg) {
  return ForestTerm(substitute(c, arg.trees()));
}

ContextTerm compose(ContextTerm const& c, ContextTerm const& arg) {
  return ContextTerm(substitute(c, arg.trees()));
}

////////////////////////////////////////////////////////////////////////
// Shals
////////////////////////////////////////////////////////////////////////

ShalAlphabet::ShalAlphabet(Alphabet const& alphabet)
    : alphabet_(alphabet),
      n_leaves_(alphabet.leaf_count()),
      n_inners_(alphabet.inner_count()) {
  for (LabelId a = 0; a < n_leaves_; ++a) {
    letters_.push_back({ShalLetter::Kind::Leaf, 0, a});
  }
  for (LabelId b = 0; b < n_inners_; ++b) {
    letters_.push_back({ShalLetter::Kind::InnerPort, b, 0});
  }
  for (LabelId b = 0; b < n_inners_; ++b) {
    for (LabelId a = 0; a < n_leaves_; ++a) {
      letters_.push_back({ShalLetter::Kind::InnerLeaf, b, a});
    }
  }
}

std::string ShalAlphabet::name(LetterId id) const {
  auto const& l = letter(id);
  switch (l.kind) {
    case ShalLetter::Kind::Leaf:
      return alphabet_.leaf_name(l.leaf);
    case ShalLetter::Kind::InnerPort:
      return alphabet_.inner_name(l.inner) + "([])";
    case ShalLetter::Kind::InnerLeaf:
      return alphabet_.inner_name(l.inner) + "(" + alphabet_.leaf_name(l.leaf)
             + ")";
  }
  return {};
}

std::optional<LetterId> ShalAlphabet::find(std::string_view text) const {
  std::string s;
  for (char ch : text) {
    if (!std::isspace(static_cast<unsigned char>(ch))) {
      s += ch;
    }
  }
  auto glyph = s.find(kPortGlyph);
  if (glyph != std::string::npos) {
    s.replace(glyph, kPortGlyph.size(), "[]");
  }
  for (LetterId id = 0; id < letters_.size(); ++id) {
    if (name(id) == s) {
      return id;
    }
  }
  return std::nullopt;
}

std::size_t shal_arity(Shal const& p, ShalAlphabet const& letters) {
  return static_cast<std::size_t>(
      std::count_if(p.begin(), p.end(), [&](LetterId c) {
        return letters.letter(c).kind == ShalLetter::Kind::InnerPort;
      }));
}

std::string print_shal(Shal const& p, ShalAlphabet const& letters) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i != 0) {
      out += " + ";
    }
    out += letters.name(p[i]);
  }
  return out;
}

Shal parse_shal(std::string_view text, ShalAlphabet const& letters) {
  Shal result;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto plus = text.find('+', start);
    auto piece = text.substr(start, plus == std::string_view::npos
                                        ? std::string_view::npos
                                        : plus - start);
    auto id = letters.find(piece);
    if (!id) {
      throw TermError(TermError::Kind::UnknownLabel,
                      "unknown shal letter '" + std::string(piece) + "'",
                      start);
    }
    result.push_back(*id);
    if (plus == std::string_view::npos) {
      break;
    }
    start = plus + 1;
  }
  return result;
}

ShalPosition shal_at(ForestTerm const& f, NodeRef const& x,
                     ShalAlphabet const& letters) {
  resolve(f.trees(), x);
  std::vector<Node> const* row = &f.trees();
  if (x.size() > 1) {
    row = &resolve(f.trees(), NodeRef(x.begin(), x.end() - 1)).children;
  }
  ShalPosition result;
  result.index = x.back();
  for (Node const& t : *row) {
    if (t.kind == NodeKind::Leaf) {
      result.shal.push_back(letters.leaf_letter(t.label));
    } else if (t.children.size() == 1
               && t.children.front().kind == NodeKind::Leaf) {
      result.shal.push_back(
          letters.inner_leaf_letter(t.label, t.children.front().label));
    } else {
      result.shal.push_back(letters.port_letter(t.label));
    }
  }
  return result;
}

PlugResult shal_plug(Shal const& p, std::vector<ForestTerm> const& forests,
                     std::optional<std::size_t> keep,
                     ShalAlphabet const& letters) {
  std::size_t arity = shal_arity(p, letters);
  if (keep) {
    if (*keep >= p.size()
        || letters.letter(p[*keep]).kind != ShalLetter::Kind::InnerPort) {
      throw TermError(TermError::Kind::NotPortNode,
                      "kept position is not a port-node");
    }
  }
  std::size_t expected = keep ? arity - 1 : arity;
  if (forests.size() != expected) {
    throw TermError(TermError::Kind::ArityMismatch,
                    "shal needs " + std::to_string(expected)
                        + " forests, got " + std::to_string(forests.size()));
  }
  std::vector<Node> trees;
  std::size_t next = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto const& l = letters.letter(p[i]);
    switch (l.kind) {
      case ShalLetter::Kind::Leaf:
        trees.push_back(Node{NodeKind::Leaf, l.leaf, {}});
        break;
      case ShalLetter::Kind::InnerLeaf:
        trees.push_back(Node{NodeKind::Inner, l.inner,
                             {Node{NodeKind::Leaf, l.leaf, {}}}});
        break;
      case ShalLetter::Kind::InnerPort:
        if (keep && *keep == i) {
          trees.push_back(Node{NodeKind::Inner, l.inner,
                               {Node{NodeKind::Port, 0, {}}}});
        } else {
          trees.push_back(
              Node{NodeKind::Inner, l.inner, forests[next++].trees()});
        }
        break;
    }
  }
  if (keep) {
    return ContextTerm(std::move(trees));
  }
  return ForestTerm(std::move(trees));
}

std::vector<Shal> enumerate_shals(std::vector<LetterId> const& letters,
                                  std::size_t max_len) {
  std::vector<Shal> out;
  if (letters.empty()) {
    return out;
  }
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<std::size_t> digits(len, 0);
    while (true) {
      Shal s(len);
      for (std::size_t i = 0; i < len; ++i) {
        s[i] = letters[digits[i]];
      }
      out.push_back(std::move(s));
      std::size_t i = len;
      while (i > 0) {
        --i;
        if (++digits[i] < letters.size()) {
          break;
        }
        digits[i] = 0;
        if (i == 0) {
          i = len + 1;
          break;
        }
      }
      if (i == len + 1) {
        break;
      }
    }
  }
  return out;
}

}  // namespace fo2dec
