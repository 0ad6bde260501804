#include "fo2dec/algebra.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace fo2dec {

FiniteSemigroup::FiniteSemigroup(std::vector<std::string> names,
                                 std::vector<Elem> table)
    : names_(std::move(names)), table_(std::move(table)) {
  if (table_.size() != names_.size() * names_.size()) {
    throw AlgebraError(AlgebraError::Kind::NotTotal,
                       "product table has wrong size");
  }
}

std::optional<Elem> FiniteSemigroup::find(std::string_view name) const {
  for (Elem e = 0; e < names_.size(); ++e) {
    if (names_[e] == name) {
      return e;
    }
  }
  return std::nullopt;
}

std::optional<std::array<Elem, 3>>
FiniteSemigroup::associativity_violation() const {
  auto n = static_cast<Elem>(size());
  for (Elem a = 0; a < n; ++a) {
    for (Elem b = 0; b < n; ++b) {
      Elem ab = mul(a, b);
      for (Elem c = 0; c < n; ++c) {
        if (mul(ab, c) != mul(a, mul(b, c))) {
          return std::array<Elem, 3>{a, b, c};
        }
      }
    }
  }
  return std::nullopt;
}

void validate(ForestMorphism const& m) {
  auto const& alg = m.algebra;
  auto nh = static_cast<Elem>(alg.H.size());
  auto nv = static_cast<Elem>(alg.V.size());
  if (nh == 0 || nv == 0) {
    throw AlgebraError(AlgebraError::Kind::NotTotal, "H and V must be nonempty");
  }
  if (auto t = alg.H.associativity_violation()) {
    throw AlgebraError(AlgebraError::Kind::Associativity,
                       "H is not associative",
                       {"H", alg.H.name((*t)[0]), alg.H.name((*t)[1]),
                        alg.H.name((*t)[2])});
  }
  if (auto t = alg.V.associativity_violation()) {
    throw AlgebraError(AlgebraError::Kind::Associativity,
                       "V is not associative",
                       {"V", alg.V.name((*t)[0]), alg.V.name((*t)[1]),
                        alg.V.name((*t)[2])});
  }
  for (Elem w = 0; w < nv; ++w) {
    for (Elem v = 0; v < nv; ++v) {
      for (Elem h = 0; h < nh; ++h) {
        if (alg.act(w, alg.act(v, h)) != alg.act(alg.times(w, v), h)) {
          throw AlgebraError(AlgebraError::Kind::ActionAxiom,
                             "w(vh) != (wv)h",
                             {alg.V.name(w), alg.V.name(v), alg.H.name(h)});
        }
      }
    }
  }
  for (Elem v = 0; v < nv; ++v) {
    for (Elem g = 0; g < nh; ++g) {
      for (Elem h = 0; h < nh; ++h) {
        if (alg.act(alg.ins_r(v, g), h) != alg.plus(alg.act(v, h), g)) {
          throw AlgebraError(AlgebraError::Kind::InsertAxiom,
                             "(v+g)h != vh+g",
                             {"insertR", alg.V.name(v), alg.H.name(g),
                              alg.H.name(h)});
        }
        if (alg.act(alg.ins_l(g, v), h) != alg.plus(g, alg.act(v, h))) {
          throw AlgebraError(AlgebraError::Kind::InsertAxiom,
                             "(g+v)h != g+vh",
                             {"insertL", alg.H.name(g), alg.V.name(v),
                              alg.H.name(h)});
        }
      }
    }
  }
  if (m.accepting.size() != nh) {
    throw AlgebraError(AlgebraError::Kind::BadAccept,
                       "accepting set does not match H");
  }
}

////////////////////////////////////////////////////////////////////////
// Presentation format
////////////////////////////////////////////////////////////////////////

namespace {

using Rows = std::vector<std::pair<std::size_t, std::vector<std::string>>>;

std::map<std::string, Rows> split_sections(std::string_view text) {
  std::map<std::string, Rows> sections;
  std::string current;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream words(line);
    std::vector<std::string> toks;
    for (std::string w; words >> w;) {
      toks.push_back(w);
    }
    if (toks.empty()) {
      continue;
    }
    if (toks.size() == 1 && toks[0].size() > 2 && toks[0].front() == '['
        && toks[0].back() == ']') {
      current = toks[0].substr(1, toks[0].size() - 2);
      if (sections.count(current) != 0) {
        throw AlgebraError(AlgebraError::Kind::Duplicate,
                           "section [" + current + "] appears twice");
      }
      sections[current];
      continue;
    }
    if (current.empty()) {
      throw AlgebraError(AlgebraError::Kind::Parse,
                         "line " + std::to_string(lineno)
                             + ": content outside a section");
    }
    sections[current].emplace_back(lineno, std::move(toks));
  }
  return sections;
}

std::vector<std::string> element_list(std::map<std::string, Rows> const& s,
                                      std::string const& name, bool required) {
  auto it = s.find(name);
  if (it == s.end()) {
    if (required) {
      throw AlgebraError(AlgebraError::Kind::Parse,
                         "missing section [" + name + "]");
    }
    return {};
  }
  std::vector<std::string> out;
  for (auto const& [line, toks] : it->second) {
    for (auto const& t : toks) {
      if (!is_identifier(t)) {
        throw AlgebraError(AlgebraError::Kind::Parse,
                           "line " + std::to_string(line)
                               + ": bad element name '" + t + "'");
      }
      out.push_back(t);
    }
  }
  return out;
}

Elem lookup(FiniteSemigroup const& s, std::string const& tok,
            std::size_t line, char const* sort) {
  auto e = s.find(tok);
  if (!e) {
    throw AlgebraError(AlgebraError::Kind::UnknownSymbol,
                       "line " + std::to_string(line) + ": '" + tok
                           + "' is not an element of " + sort,
                       {tok});
  }
  return *e;
}

// Fills a binary table from rows "x y -> z".
std::vector<Elem> binary_table(std::map<std::string, Rows> const& s,
                               std::string const& name,
                               FiniteSemigroup const& left,
                               char const* left_sort,
                               FiniteSemigroup const& right,
                               char const* right_sort,
                               FiniteSemigroup const& result,
                               char const* result_sort) {
  auto it = s.find(name);
  if (it == s.end()) {
    throw AlgebraError(AlgebraError::Kind::Parse,
                       "missing section [" + name + "]");
  }
  constexpr Elem kUnset = ~Elem{0};
  std::vector<Elem> table(left.size() * right.size(), kUnset);
  for (auto const& [line, toks] : it->second) {
    if (toks.size() != 4 || toks[2] != "->") {
      throw AlgebraError(AlgebraError::Kind::Parse,
                         "line " + std::to_string(line)
                             + ": expected 'x y -> z' in [" + name + "]");
    }
    Elem x = lookup(left, toks[0], line, left_sort);
    Elem y = lookup(right, toks[1], line, right_sort);
    Elem z = lookup(result, toks[3], line, result_sort);
    auto& cell = table[x * right.size() + y];
    if (cell != kUnset && cell != z) {
      throw AlgebraError(AlgebraError::Kind::Duplicate,
                         "line " + std::to_string(line) + ": conflicting entry",
                         {toks[0], toks[1]});
    }
    cell = z;
  }
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i] == kUnset) {
      auto x = static_cast<Elem>(i / right.size());
      auto y = static_cast<Elem>(i % right.size());
      throw AlgebraError(AlgebraError::Kind::NotTotal,
                         "[" + name + "] has no entry for "
                             + left.name(x) + " " + right.name(y),
                         {left.name(x), right.name(y)});
    }
  }
  return table;
}

std::vector<std::pair<std::string, std::string>> mapping_rows(
    std::map<std::string, Rows> const& s, std::string const& name) {
  std::vector<std::pair<std::string, std::string>> out;
  auto it = s.find(name);
  if (it == s.end()) {
    return out;
  }
  for (auto const& [line, toks] : it->second) {
    if (toks.size() != 3 || toks[1] != "->") {
      throw AlgebraError(AlgebraError::Kind::Parse,
                         "line " + std::to_string(line)
                             + ": expected 'x -> y' in [" + name + "]");
    }
    out.emplace_back(toks[0], toks[2]);
  }
  return out;
}

void check_distinct(std::vector<std::string> const& names, char const* sort) {
  std::vector<std::string> sorted = names;
  std::sort(sorted.begin(), sorted.end());
  auto dup = std::adjacent_find(sorted.begin(), sorted.end());
  if (dup != sorted.end()) {
    throw AlgebraError(AlgebraError::Kind::Duplicate,
                       std::string("duplicate element '") + *dup + "' in "
                           + sort,
                       {*dup});
  }
}

}  // namespace

ForestMorphism parse_morphism(std::string_view text) {
  auto sections = split_sections(text);
  auto h_names = element_list(sections, "H", true);
  auto v_names = element_list(sections, "V", true);
  check_distinct(h_names, "H");
  check_distinct(v_names, "V");
  if (h_names.empty() || v_names.empty()) {
    throw AlgebraError(AlgebraError::Kind::Parse, "H and V must be nonempty");
  }

  FiniteSemigroup h_names_only(h_names,
                               std::vector<Elem>(h_names.size() * h_names.size()));
  FiniteSemigroup v_names_only(v_names,
                               std::vector<Elem>(v_names.size() * v_names.size()));

  ForestMorphism m;
  auto& alg = m.algebra;
  alg.H = FiniteSemigroup(h_names,
                          binary_table(sections, "Hplus", h_names_only, "H",
                                       h_names_only, "H", h_names_only, "H"));
  alg.V = FiniteSemigroup(v_names,
                          binary_table(sections, "Vtimes", v_names_only, "V",
                                       v_names_only, "V", v_names_only, "V"));
  alg.action = binary_table(sections, "action", alg.V, "V", alg.H, "H", alg.H,
                            "H");
  alg.insert_l = binary_table(sections, "insertL", alg.H, "H", alg.V, "V",
                              alg.V, "V");
  alg.insert_r = binary_table(sections, "insertR", alg.V, "V", alg.H, "H",
                              alg.V, "V");

  auto leaves = mapping_rows(sections, "leaves");
  auto inners = mapping_rows(sections, "inners");
  std::vector<std::string> leaf_labels;
  std::vector<std::string> inner_labels;
  for (auto const& [a, h] : leaves) {
    leaf_labels.push_back(a);
    m.leaf_image.push_back(lookup(alg.H, h, 0, "H"));
  }
  for (auto const& [b, v] : inners) {
    inner_labels.push_back(b);
    m.inner_image.push_back(lookup(alg.V, v, 0, "V"));
  }
  try {
    m.alphabet = Alphabet(leaf_labels, inner_labels);
  } catch (TermError const& e) {
    throw AlgebraError(AlgebraError::Kind::Parse,
                       std::string("bad alphabet: ") + e.what());
  }

  m.accepting.assign(alg.H.size(), false);
  for (auto const& name : element_list(sections, "accept", false)) {
    auto e = alg.H.find(name);
    if (!e) {
      throw AlgebraError(AlgebraError::Kind::BadAccept,
                         "accepting element '" + name + "' is not in H",
                         {name});
    }
    m.accepting[*e] = true;
  }

  for (auto const& [name, rows] : sections) {
    static const std::vector<std::string> known = {
        "H",       "V",       "Hplus",  "Vtimes", "action",
        "insertL", "insertR", "leaves", "inners", "accept"};
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw AlgebraError(AlgebraError::Kind::Parse,
                         "unknown section [" + name + "]");
    }
  }

  validate(m);
  return m;
}

ForestMorphism load_morphism(std::filesystem::path const& file) {
  std::ifstream in(file);
  if (!in) {
    throw AlgebraError(AlgebraError::Kind::Parse,
                       "cannot open '" + file.string() + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_morphism(buf.str());
}

std::string write_morphism(ForestMorphism const& m) {
  auto const& alg = m.algebra;
  auto const& H = alg.H;
  auto const& V = alg.V;
  std::ostringstream out;
  auto list = [&](char const* title, std::vector<std::string> const& names) {
    out << '[' << title << "]\n";
    for (std::size_t i = 0; i < names.size(); ++i) {
      out << (i == 0 ? "" : " ") << names[i];
    }
    out << "\n\n";
  };
  list("H", H.names());
  list("V", V.names());
  out << "[Hplus]\n";
  for (Elem x = 0; x < H.size(); ++x) {
    for (Elem y = 0; y < H.size(); ++y) {
      out << H.name(x) << ' ' << H.name(y) << " -> "
          << H.name(alg.plus(x, y)) << '\n';
    }
  }
  out << "\n[Vtimes]\n";
  for (Elem x = 0; x < V.size(); ++x) {
    for (Elem y = 0; y < V.size(); ++y) {
      out << V.name(x) << ' ' << V.name(y) << " -> "
          << V.name(alg.times(x, y)) << '\n';
    }
  }
  out << "\n[action]\n";
  for (Elem v = 0; v < V.size(); ++v) {
    for (Elem h = 0; h < H.size(); ++h) {
      out << V.name(v) << ' ' << H.name(h) << " -> " << H.name(alg.act(v, h))
          << '\n';
    }
  }
  out << "\n[insertL]\n";
  for (Elem g = 0; g < H.size(); ++g) {
    for (Elem v = 0; v < V.size(); ++v) {
      out << H.name(g) << ' ' << V.name(v) << " -> "
          << V.name(alg.ins_l(g, v)) << '\n';
    }
  }
  out << "\n[insertR]\n";
  for (Elem v = 0; v < V.size(); ++v) {
    for (Elem g = 0; g < H.size(); ++g) {
      out << V.name(v) << ' ' << H.name(g) << " -> "
          << V.name(alg.ins_r(v, g)) << '\n';
    }
  }
  out << "\n[leaves]\n";
  for (LabelId a = 0; a < m.alphabet.leaf_count(); ++a) {
    out << m.alphabet.leaf_name(a) << " -> " << H.name(m.leaf_image[a])
        << '\n';
  }
  out << "\n[inners]\n";
  for (LabelId b = 0; b < m.alphabet.inner_count(); ++b) {
    out << m.alphabet.inner_name(b) << " -> " << V.name(m.inner_image[b])
        << '\n';
  }
  std::vector<std::string> acc;
  for (Elem h = 0; h < H.size(); ++h) {
    if (m.accepting[h]) {
      acc.push_back(H.name(h));
    }
  }
  out << '\n';
  list("accept", acc);
  return out.str();
}

////////////////////////////////////////////////////////////////////////
// Evaluation
////////////////////////////////////////////////////////////////////////

namespace {

Elem eval_tree(ForestMorphism const& m, Node const& n) {
  switch (n.kind) {
    case NodeKind::Leaf:
      return m.leaf_image.at(n.label);
    case NodeKind::Inner:
      return m.algebra.act(m.inner_image.at(n.label),
                           eval_trees(m, n.children));
    case NodeKind::Port:
      break;
  }
  throw TermError(TermError::Kind::PortCount, "port inside a forest");
}

bool contains_port(Node const& n) {
  if (n.kind == NodeKind::Port) {
    return true;
  }
  return std::any_of(n.children.begin(), n.children.end(), contains_port);
}

Elem eval_context_trees(ForestMorphism const& m,
                        std::vector<Node> const& trees);

Elem eval_context_tree(ForestMorphism const& m, Node const& n) {
  Elem vb = m.inner_image.at(n.label);
  if (n.children.size() == 1 && n.children.front().kind == NodeKind::Port) {
    return vb;
  }
  return m.algebra.times(vb, eval_context_trees(m, n.children));
}

Elem eval_context_trees(ForestMorphism const& m,
                        std::vector<Node> const& trees) {
  auto const& alg = m.algebra;
  std::size_t hole = trees.size();
  for (std::size_t i = 0; i < trees.size(); ++i) {
    if (contains_port(trees[i])) {
      hole = i;
      break;
    }
  }
  if (hole == trees.size()) {
    throw TermError(TermError::Kind::PortCount, "context without a port");
  }
  Elem v = eval_context_tree(m, trees[hole]);
  if (hole + 1 < trees.size()) {
    std::vector<Node> right(trees.begin() + static_cast<long>(hole) + 1,
                            trees.end());
    v = alg.ins_r(v, eval_trees(m, right));
  }
  if (hole > 0) {
    std::vector<Node> left(trees.begin(),
                           trees.begin() + static_cast<long>(hole));
    v = alg.ins_l(eval_trees(m, left), v);
  }
  return v;
}

}  // namespace

Elem eval_trees(ForestMorphism const& m, std::vector<Node> const& trees) {
  if (trees.empty()) {
    throw TermError(TermError::Kind::Syntax, "empty forest");
  }
  Elem acc = eval_tree(m, trees.front());
  for (std::size_t i = 1; i < trees.size(); ++i) {
    acc = m.algebra.plus(acc, eval_tree(m, trees[i]));
  }
  return acc;
}

Elem eval_forest(ForestMorphism const& m, ForestTerm const& f) {
  return eval_trees(m, f.trees());
}

Elem eval_context(ForestMorphism const& m, ContextTerm const& c) {
  return eval_context_trees(m, c.trees());
}

bool accepts(ForestMorphism const& m, ForestTerm const& f) {
  return m.accepting[eval_forest(m, f)];
}

////////////////////////////////////////////////////////////////////////
// Idempotent powers
////////////////////////////////////////////////////////////////////////

Elem power(FiniteSemigroup const& s, Elem x, unsigned n) {
  Elem acc = x;
  for (unsigned i = 1; i < n; ++i) {
    acc = s.mul(acc, x);
  }
  return acc;
}

OmegaData omega_data(FiniteSemigroup const& s) {
  OmegaData out;
  out.idempotent.resize(s.size());
  unsigned max_index = 1;
  unsigned period_lcm = 1;
  for (Elem x = 0; x < s.size(); ++x) {
    // powers[i] = x^(i+1); stop at the first repeat
    std::vector<Elem> powers{x};
    std::vector<int> seen(s.size(), -1);
    seen[x] = 0;
    unsigned index = 0;
    unsigned period = 0;
    while (true) {
      Elem next = s.mul(powers.back(), x);
      if (seen[next] >= 0) {
        index = static_cast<unsigned>(seen[next]) + 1;  // exponent of start
        period = static_cast<unsigned>(powers.size()) + 1 - index;
        break;
      }
      seen[next] = static_cast<int>(powers.size());
      powers.push_back(next);
    }
    unsigned m = period;
    while (m < index) {
      m += period;
    }
    out.idempotent[x] = powers[m - 1];
    max_index = std::max(max_index, index);
    period_lcm = std::lcm(period_lcm, period);
  }
  unsigned n = period_lcm;
  while (n < max_index) {
    n += period_lcm;
  }
  out.exponent = n;
  return out;
}

unsigned omega_exponent(FiniteSemigroup const& s) {
  return omega_data(s).exponent;
}

ForestMorphism leaf_completion(ForestMorphism const& m) {
  ForestMorphism out = m;
  auto const& H = m.algebra.H;
  for (Elem h = 0; h < H.size(); ++h) {
    std::string name = "h_" + H.name(h);
    while (out.alphabet.leaf(name) || out.alphabet.inner(name)) {
      name += '_';
    }
    out.alphabet.add_leaf(name);
    out.leaf_image.push_back(h);
  }
  return out;
}

}  // namespace fo2dec
