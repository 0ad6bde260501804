#include "fo2dec/games.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>

namespace fo2dec {

char const* variant_name(GameVariant v) {
  switch (v) {
    case GameVariant::FO2:
      return "fo2";
    case GameVariant::S:
      return "s";
    case GameVariant::SNEQ:
      return "sneq";
    case GameVariant::SUC:
      return "suc";
  }
  return "?";
}

std::optional<GameVariant> parse_variant(std::string_view s) {
  for (GameVariant v : {GameVariant::FO2, GameVariant::S, GameVariant::SNEQ,
                        GameVariant::SUC}) {
    if (s == variant_name(v)) {
      return v;
    }
  }
  return std::nullopt;
}

////////////////////////////////////////////////////////////////////////
// Formulas
////////////////////////////////////////////////////////////////////////

namespace {

struct OpName {
  EffFormula::Op op;
  char const* name;
};

constexpr OpName kOps[] = {
    {EffFormula::Op::Or, "or"},       {EffFormula::Op::And, "and"},
    {EffFormula::Op::Not, "not"},     {EffFormula::Op::EF, "EF"},
    {EffFormula::Op::Fup, "Fup"},     {EffFormula::Op::Fh, "Fh"},
    {EffFormula::Op::FhInv, "FhInv"}, {EffFormula::Op::S, "S"},
    {EffFormula::Op::Sneq, "Sneq"},   {EffFormula::Op::Xh, "Xh"},
    {EffFormula::Op::XhInv, "XhInv"},
};

char const* op_name(EffFormula::Op op) {
  for (auto const& o : kOps) {
    if (o.op == op) {
      return o.name;
    }
  }
  return "?";
}

bool is_modal(EffFormula::Op op) {
  return op != EffFormula::Op::Label && op != EffFormula::Op::Or
         && op != EffFormula::Op::And && op != EffFormula::Op::Not;
}

class FormulaParser {
 public:
  FormulaParser(std::string_view text, Alphabet const& alphabet)
      : text_(text), alphabet_(alphabet) {}

  EffFormula parse() {
    EffFormula f = formula();
    skip();
    if (pos_ != text_.size()) {
      fail("trailing input");
    }
    return f;
  }

 private:
  std::string_view text_;
  Alphabet const& alphabet_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(std::string const& msg) {
    throw TermError(TermError::Kind::Syntax,
                    "formula: " + msg + " at offset " + std::to_string(pos_),
                    pos_);
  }

  void skip() {
    while (pos_ < text_.size()
           && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool peek(char c) {
    skip();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) {
      fail(std::string("expected '") + c + "'");
    }
    ++pos_;
  }

  std::string ident() {
    skip();
    std::size_t start = pos_;
    while (pos_ < text_.size()
           && (std::isalnum(static_cast<unsigned char>(text_[pos_]))
               || text_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_) {
      fail("expected identifier");
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  EffFormula formula() {
    std::string name = ident();
    if (peek('(')) {
      EffFormula f;
      bool found = false;
      for (auto const& o : kOps) {
        if (name == o.name) {
          f.op = o.op;
          found = true;
        }
      }
      if (!found) {
        fail("unknown operator " + name);
      }
      expect('(');
      f.args.push_back(formula());
      while (peek(',')) {
        ++pos_;
        f.args.push_back(formula());
      }
      expect(')');
      bool nary = f.op == EffFormula::Op::And || f.op == EffFormula::Op::Or;
      if (!nary && f.args.size() != 1) {
        fail(name + " takes one argument");
      }
      return f;
    }
    EffFormula f;
    if (auto a = alphabet_.leaf(name)) {
      f.kind = NodeKind::Leaf;
      f.label = *a;
    } else if (auto b = alphabet_.inner(name)) {
      f.kind = NodeKind::Inner;
      f.label = *b;
    } else {
      throw TermError(TermError::Kind::UnknownLabel, "unknown label " + name);
    }
    return f;
  }
};

// Node arrays of a forest in all_nodes order.
struct Flat {
  std::vector<NodeKind> kind;
  std::vector<LabelId> label;
  std::vector<int> parent;
  std::vector<std::vector<int>> children;
  std::vector<int> row;        // row index of each node
  std::vector<int> row_index;  // position inside its row
  std::vector<std::vector<int>> rows;

  explicit Flat(std::vector<Node> const& trees) {
    rows.emplace_back();
    for (std::size_t i = 0; i < trees.size(); ++i) {
      int id = add(trees[i], -1, 0, i);  // may grow rows
      rows[0].push_back(id);
    }
  }

  std::size_t size() const { return kind.size(); }

 private:
  int add(Node const& n, int par, int r, std::size_t idx) {
    int id = static_cast<int>(kind.size());
    kind.push_back(n.kind);
    label.push_back(n.label);
    parent.push_back(par);
    children.emplace_back();
    row.push_back(r);
    row_index.push_back(static_cast<int>(idx));
    if (!n.children.empty()) {
      int cr = static_cast<int>(rows.size());
      rows.emplace_back();
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        int c = add(n.children[i], id, cr, i);
        rows[cr].push_back(c);
        children[id].push_back(c);
      }
    }
    return id;
  }
};

std::vector<bool> eval_flat(EffFormula const& f, Flat const& fl) {
  using Op = EffFormula::Op;
  std::size_t n = fl.size();
  std::vector<bool> out(n, false);
  if (f.op == Op::Label) {
    for (std::size_t x = 0; x < n; ++x) {
      out[x] = fl.kind[x] == f.kind && fl.label[x] == f.label;
    }
    return out;
  }
  std::vector<std::vector<bool>> sub;
  for (auto const& a : f.args) {
    sub.push_back(eval_flat(a, fl));
  }
  auto const& s = sub[0];
  switch (f.op) {
    case Op::Or:
    case Op::And:
      for (std::size_t x = 0; x < n; ++x) {
        bool v = f.op == Op::And;
        for (auto const& t : sub) {
          v = f.op == Op::And ? (v && t[x]) : (v || t[x]);
        }
        out[x] = v;
      }
      break;
    case Op::Not:
      for (std::size_t x = 0; x < n; ++x) {
        out[x] = !s[x];
      }
      break;
    case Op::EF: {
      // preorder: children after parents, so sweep backwards
      std::vector<bool> below(n, false);
      for (std::size_t x = n; x-- > 0;) {
        bool any = false;
        for (int c : fl.children[x]) {
          any = any || below[c];
        }
        out[x] = any;
        below[x] = any || s[x];
      }
      break;
    }
    case Op::Fup:
      for (std::size_t x = 0; x < n; ++x) {
        int p = fl.parent[x];
        out[x] = p >= 0 && (s[p] || out[p]);
      }
      break;
    default: {
      for (auto const& r : fl.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
          bool v = false;
          for (std::size_t j = 0; j < r.size(); ++j) {
            if (!s[r[j]]) {
              continue;
            }
            switch (f.op) {
              case Op::Fh:
                v = v || j > i;
                break;
              case Op::FhInv:
                v = v || j < i;
                break;
              case Op::S:
                v = true;
                break;
              case Op::Sneq:
                v = v || j != i;
                break;
              case Op::Xh:
                v = v || j == i + 1;
                break;
              case Op::XhInv:
                v = v || j + 1 == i;
                break;
              default:
                break;
            }
          }
          out[r[i]] = v;
        }
      }
    }
  }
  return out;
}

}  // namespace

EffFormula parse_formula(std::string_view text, Alphabet const& alphabet) {
  return FormulaParser(text, alphabet).parse();
}

std::string print(EffFormula const& f, Alphabet const& alphabet) {
  if (f.op == EffFormula::Op::Label) {
    return f.kind == NodeKind::Leaf ? alphabet.leaf_name(f.label)
                                    : alphabet.inner_name(f.label);
  }
  std::string out = op_name(f.op);
  out += "(";
  for (std::size_t i = 0; i < f.args.size(); ++i) {
    out += (i ? ", " : "") + print(f.args[i], alphabet);
  }
  return out + ")";
}

unsigned modal_depth(EffFormula const& f) {
  unsigned d = 0;
  for (auto const& a : f.args) {
    d = std::max(d, modal_depth(a));
  }
  return d + (is_modal(f.op) ? 1 : 0);
}

std::vector<bool> eval_eff_nodes(EffFormula const& f, ForestTerm const& s) {
  return eval_flat(f, Flat(s.trees()));
}

bool eval_eff(EffFormula const& f, ForestTerm const& s) {
  return eval_eff_nodes(f, s).at(0);
}

EffFormula random_formula(std::mt19937_64& rng, Alphabet const& alphabet,
                          unsigned depth, bool variants) {
  using Op = EffFormula::Op;
  std::size_t nl = alphabet.leaf_count();
  std::size_t ni = alphabet.inner_count();
  auto pick = [&](std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  };
  std::function<EffFormula(unsigned, unsigned)> gen =
      [&](unsigned d, unsigned size) -> EffFormula {
    std::size_t choice = pick(10);
    if (size <= 1 || choice < 3) {
      EffFormula f;
      std::size_t l = pick(nl + ni);
      if (l < nl) {
        f.kind = NodeKind::Leaf;
        f.label = static_cast<LabelId>(l);
      } else {
        f.kind = NodeKind::Inner;
        f.label = static_cast<LabelId>(l - nl);
      }
      return f;
    }
    if (choice < 6 || d == 0) {
      EffFormula f;
      std::size_t b = pick(3);
      f.op = b == 0 ? Op::Not : (b == 1 ? Op::And : Op::Or);
      f.args.push_back(gen(d, size / 2));
      if (f.op != Op::Not) {
        f.args.push_back(gen(d, size / 2));
      }
      return f;
    }
    static constexpr Op kBase[] = {Op::EF, Op::Fup, Op::Fh, Op::FhInv};
    static constexpr Op kAll[] = {Op::EF, Op::Fup, Op::Fh,   Op::FhInv,
                                  Op::S,  Op::Sneq, Op::Xh, Op::XhInv};
    EffFormula f;
    f.op = variants ? kAll[pick(8)] : kBase[pick(4)];
    f.args.push_back(gen(d - 1, size - 1));
    return f;
  };
  return gen(depth, 8);
}

ForestTerm random_forest(std::mt19937_64& rng, Alphabet const& alphabet,
                         std::size_t max_nodes) {
  std::size_t nl = alphabet.leaf_count();
  std::size_t ni = alphabet.inner_count();
  if (max_nodes == 0 || nl == 0) {
    throw std::invalid_argument("random_forest needs a leaf and a node");
  }
  auto coin = [&](double p) {
    return std::bernoulli_distribution(p)(rng);
  };
  std::size_t budget = std::uniform_int_distribution<std::size_t>(
      1, max_nodes)(rng);
  std::function<std::vector<Node>(std::size_t&)> forest =
      [&](std::size_t& left) -> std::vector<Node> {
    std::vector<Node> trees;
    do {
      Node n;
      --left;
      if (ni > 0 && left >= 1 && coin(0.5)) {
        n.kind = NodeKind::Inner;
        n.label = static_cast<LabelId>(
            std::uniform_int_distribution<std::size_t>(0, ni - 1)(rng));
        n.children = forest(left);
      } else {
        n.kind = NodeKind::Leaf;
        n.label = static_cast<LabelId>(
            std::uniform_int_distribution<std::size_t>(0, nl - 1)(rng));
      }
      trees.push_back(std::move(n));
    } while (left > 0 && coin(0.5));
    return trees;
  };
  return ForestTerm(forest(budget));
}

////////////////////////////////////////////////////////////////////////
// Word game
////////////////////////////////////////////////////////////////////////

namespace {

using Mask = std::uint64_t;

Mask below(std::size_t i) { return (Mask{1} << i) - 1; }
Mask all_of(std::size_t n) { return n == 64 ? ~Mask{0} : below(n); }
Mask above(std::size_t i, std::size_t n) {
  return all_of(n) & ~below(i + 1);
}

std::vector<Mask> transpose(std::vector<Mask> const& w, std::size_t cols) {
  std::vector<Mask> t(cols, 0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    for_bits(w[i], [&](unsigned j) { t[j] |= Mask{1} << i; });
  }
  return t;
}

void check_len(std::size_t n) {
  if (n == 0 || n > 64) {
    throw BudgetExceeded("game positions limited to 64 per side");
  }
}

}  // namespace

bool word_game_equiv(Shal const& p, Shal const& q, unsigned k) {
  check_len(p.size());
  check_len(q.size());
  std::size_t n = p.size();
  std::size_t m = q.size();
  std::vector<Mask> eq(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (p[i] == q[j]) {
        eq[i] |= Mask{1} << j;
      }
    }
  }
  std::vector<Mask> w = eq;
  for (unsigned r = 0; r < k; ++r) {
    auto wt = transpose(w, m);
    std::vector<Mask> next(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      for_bits(eq[i], [&](unsigned j) {
        bool ok = true;
        for (std::size_t i2 = 0; ok && i2 < n; ++i2) {
          if (i2 == i) {
            continue;
          }
          Mask resp = i2 < i ? below(j) : above(j, m);
          ok = (w[i2] & resp) != 0;
        }
        for (std::size_t j2 = 0; ok && j2 < m; ++j2) {
          if (j2 == j) {
            continue;
          }
          Mask resp = j2 < j ? below(i) : above(i, n);
          ok = (wt[j2] & resp) != 0;
        }
        if (ok) {
          next[i] |= Mask{1} << j;
        }
      });
    }
    if (next == w) {
      break;
    }
    w = std::move(next);
  }
  return (w[0] & 1u) != 0;
}

////////////////////////////////////////////////////////////////////////
// Relaxed game
////////////////////////////////////////////////////////////////////////

RelaxedGame::RelaxedGame(ForestMorphism const& m, ShalAlphabet const& letters,
                         HSet x, GameVariant variant)
    : m_(m), letters_(letters), variant_(variant) {
  blurred_.resize(letters.size(), false);
  for (LetterId c = 0; c < letters.size(); ++c) {
    auto const& l = letters.letter(c);
    blurred_[c] = l.kind == ShalLetter::Kind::InnerPort
                  || (l.kind == ShalLetter::Kind::InnerLeaf
                      && ((x >> m.leaf_image.at(l.leaf)) & 1u));
  }
}

bool RelaxedGame::consistent(LetterId c, LetterId d) const {
  if (c == d) {
    return true;
  }
  return blurred_[c] && blurred_[d]
         && letters_.letter(c).inner == letters_.letter(d).inner;
}

namespace {

// Positions Duplicator may answer with when Spoiler moved from a to a2 and
// her pebble sits at b in a row of length len.
Mask response(GameVariant v, std::size_t a, std::size_t a2, std::size_t b,
              std::size_t len) {
  switch (v) {
    case GameVariant::S:
      return all_of(len);
    case GameVariant::SNEQ:
      return all_of(len) & ~(Mask{1} << b);
    case GameVariant::FO2:
      return a2 < a ? below(b) : above(b, len);
    case GameVariant::SUC:
      if (a2 + 1 == a) {
        return b > 0 ? Mask{1} << (b - 1) : 0;
      }
      if (a2 == a + 1) {
        return b + 1 < len ? Mask{1} << (b + 1) : 0;
      }
      return a2 < a ? below(b) : above(b, len);
  }
  return 0;
}

bool spoiler_may(GameVariant v, std::size_t a, std::size_t a2) {
  return v == GameVariant::S || a != a2;
}

}  // namespace

std::vector<std::uint64_t> RelaxedGame::solve(Shal const& p, Shal const& q,
                                              std::optional<unsigned> k) const {
  check_len(p.size());
  check_len(q.size());
  std::size_t n = p.size();
  std::size_t m = q.size();
  std::vector<Mask> cons(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (consistent(p[i], q[j])) {
        cons[i] |= Mask{1} << j;
      }
    }
  }
  // port-nodes per inner label
  std::map<LabelId, Mask> ports_p;
  std::map<LabelId, Mask> ports_q;
  for (std::size_t i = 0; i < n; ++i) {
    auto const& l = letters_.letter(p[i]);
    if (l.kind == ShalLetter::Kind::InnerPort) {
      ports_p[l.inner] |= Mask{1} << i;
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    auto const& l = letters_.letter(q[j]);
    if (l.kind == ShalLetter::Kind::InnerPort) {
      ports_q[l.inner] |= Mask{1} << j;
    }
  }
  auto lookup = [](std::map<LabelId, Mask> const& mm, LabelId b) -> Mask {
    auto it = mm.find(b);
    return it == mm.end() ? 0 : it->second;
  };

  std::vector<Mask> w = cons;
  for (unsigned r = 0; !k || r < *k; ++r) {
    auto wt = transpose(w, m);
    std::vector<Mask> next(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      for_bits(w[i], [&](unsigned j) {
        bool ok = true;
        for (std::size_t i2 = 0; ok && i2 < n; ++i2) {
          if (spoiler_may(variant_, i, i2)) {
            ok = (w[i2] & response(variant_, i, i2, j, m)) != 0;
          }
        }
        for (std::size_t j2 = 0; ok && j2 < m; ++j2) {
          if (spoiler_may(variant_, j, j2)) {
            ok = (wt[j2] & response(variant_, j, j2, i, n)) != 0;
          }
        }
        if (ok && p[i] != q[j]) {
          auto const& lp = letters_.letter(p[i]);
          auto const& lq = letters_.letter(q[j]);
          bool trigger = lp.kind != ShalLetter::Kind::Leaf
                         && lq.kind != ShalLetter::Kind::Leaf
                         && lp.inner == lq.inner;
          if (trigger) {
            // Spoiler keeps one pebble, the other goes to a port-node
            ok = (lookup(ports_p, lp.inner) & wt[j]) != 0
                 && (lookup(ports_q, lq.inner) & w[i]) != 0;
          }
        }
        if (ok) {
          next[i] |= Mask{1} << j;
        }
      });
    }
    if (next == w) {
      break;
    }
    w = std::move(next);
  }
  return w;
}

bool RelaxedGame::equiv(Shal const& p, std::size_t x, Shal const& q,
                        std::size_t y, std::optional<unsigned> k) const {
  if (x >= p.size() || y >= q.size() || p[x] != q[y]) {
    return false;
  }
  LetterSet ap = 0;
  LetterSet aq = 0;
  for (LetterId c : p) {
    ap |= LetterSet{1} << c;
  }
  for (LetterId c : q) {
    aq |= LetterSet{1} << c;
  }
  if (ap != aq) {
    return false;
  }
  return (solve(p, q, k)[x] >> y) & 1u;
}

bool relaxed_game_equiv(Shal const& p, std::size_t x, Shal const& q,
                        std::size_t y, std::optional<unsigned> k, HSet x_set,
                        ForestMorphism const& m, ShalAlphabet const& letters,
                        GameVariant variant) {
  return RelaxedGame(m, letters, x_set, variant).equiv(p, x, q, y, k);
}

////////////////////////////////////////////////////////////////////////
// Forest game
////////////////////////////////////////////////////////////////////////

namespace {

struct ForestMasks {
  std::size_t n = 0;
  std::vector<NodeKind> kind;
  std::vector<LabelId> label;
  std::vector<Mask> desc, anc, left, right, next, prev;

  explicit ForestMasks(Flat const& f) : n(f.size()) {
    kind = f.kind;
    label = f.label;
    desc.assign(n, 0);
    anc.assign(n, 0);
    left.assign(n, 0);
    right.assign(n, 0);
    next.assign(n, 0);
    prev.assign(n, 0);
    for (std::size_t x = n; x-- > 0;) {
      for (int c : f.children[x]) {
        desc[x] |= desc[c] | (Mask{1} << c);
      }
    }
    for (std::size_t x = 0; x < n; ++x) {
      int p = f.parent[x];
      if (p >= 0) {
        anc[x] = anc[p] | (Mask{1} << p);
      }
    }
    for (auto const& r : f.rows) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        for (std::size_t j = 0; j < r.size(); ++j) {
          Mask bit = Mask{1} << r[j];
          if (j < i) {
            left[r[i]] |= bit;
          }
          if (j > i) {
            right[r[i]] |= bit;
          }
          if (j == i + 1) {
            next[r[i]] |= bit;
          }
          if (j + 1 == i) {
            prev[r[i]] |= bit;
          }
        }
      }
    }
  }

  Mask row(std::size_t x) const {
    return left[x] | right[x] | (Mask{1} << x);
  }
};

// Moves of one player: a list of (target set, adjacency set) per direction;
// the adjacency set is used by the successor variant only.
struct Dir {
  Mask target;
  Mask adjacent;
};

std::vector<Dir> directions(ForestMasks const& f, std::size_t x,
                            GameVariant v) {
  std::vector<Dir> d{{f.desc[x], 0}, {f.anc[x], 0}};
  switch (v) {
    case GameVariant::FO2:
      d.push_back({f.left[x], 0});
      d.push_back({f.right[x], 0});
      break;
    case GameVariant::SUC:
      d.push_back({f.left[x], f.prev[x]});
      d.push_back({f.right[x], f.next[x]});
      break;
    case GameVariant::S:
      d.push_back({f.row(x), 0});
      break;
    case GameVariant::SNEQ:
      d.push_back({f.left[x] | f.right[x], 0});
      break;
  }
  return d;
}

}  // namespace

bool forest_game_equiv(ForestTerm const& s, ForestTerm const& t, unsigned k,
                       GameVariant variant, std::size_t budget) {
  Flat fs(s.trees());
  Flat ft(t.trees());
  if (fs.size() > 64 || ft.size() > 64
      || fs.size() * ft.size() > budget) {
    throw BudgetExceeded("forest game: " + std::to_string(fs.size()) + " x "
                         + std::to_string(ft.size()) + " node pairs");
  }
  ForestMasks ms(fs);
  ForestMasks mt(ft);
  std::size_t n = ms.n;
  std::size_t m = mt.n;
  std::vector<Mask> cons(n, 0);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < m; ++y) {
      if (ms.kind[x] == mt.kind[y] && ms.label[x] == mt.label[y]) {
        cons[x] |= Mask{1} << y;
      }
    }
  }
  std::vector<std::vector<Dir>> ds(n);
  std::vector<std::vector<Dir>> dt(m);
  for (std::size_t x = 0; x < n; ++x) {
    ds[x] = directions(ms, x, variant);
  }
  for (std::size_t y = 0; y < m; ++y) {
    dt[y] = directions(mt, y, variant);
  }
  // Spoiler moves from a to some a2 in one structure; the answer must lie in
  // the same direction from b, and be adjacent iff a2 is (successor rule).
  auto survives = [&](std::vector<Dir> const& da, std::vector<Dir> const& db,
                      std::vector<Mask> const& win) {
    for (std::size_t d = 0; d < da.size(); ++d) {
      bool ok = true;
      for_bits(da[d].target, [&](unsigned a2) {
        if (!ok) {
          return;
        }
        Mask resp = db[d].target;
        if (variant == GameVariant::SUC && ((da[d].adjacent >> a2) & 1u)) {
          resp = db[d].adjacent;
        }
        ok = (win[a2] & resp) != 0;
      });
      if (!ok) {
        return false;
      }
    }
    return true;
  };
  std::vector<Mask> w = cons;
  for (unsigned r = 0; r < k; ++r) {
    auto wt = transpose(w, m);
    std::vector<Mask> next(n, 0);
    for (std::size_t x = 0; x < n; ++x) {
      for_bits(w[x], [&](unsigned y) {
        if (survives(ds[x], dt[y], w) && survives(dt[y], ds[x], wt)) {
          next[x] |= Mask{1} << y;
        }
      });
    }
    if (next == w) {
      break;
    }
    w = std::move(next);
  }
  return (w[0] & 1u) != 0;
}

////////////////////////////////////////////////////////////////////////
// Game configurations
////////////////////////////////////////////////////////////////////////

LetterSet alphabet_of(Shal const& p) {
  LetterSet a = 0;
  for (LetterId c : p) {
    a |= LetterSet{1} << c;
  }
  return a;
}

namespace {

std::vector<ProfileId> position_profiles(ProfileTable& table, Shal const& p) {
  std::vector<ProfileId> out;
  for (std::size_t x = 0; x < p.size(); ++x) {
    out.push_back(shal_profile(table, p, x));
  }
  return out;
}

}  // namespace

Configuration gk_configuration(ConfigSpace& space, Shal const& q, unsigned k,
                               HSet x, std::size_t len_bound,
                               GameVariant variant) {
  if (len_bound < q.size()) {
    throw std::invalid_argument("length bound below the shal length");
  }
  auto& table = space.profiles();
  RelaxedGame game(table.morphism(), table.letters(), x, variant);
  LetterSet aq = alphabet_of(q);
  std::vector<LetterId> ls;
  for_bits(aq, [&](unsigned c) { ls.push_back(c); });
  std::vector<std::vector<ProfileId>> members(q.size());
  for (auto const& p : enumerate_shals(ls, len_bound)) {
    if (alphabet_of(p) != aq) {
      continue;
    }
    auto win = game.solve(q, p, k);
    auto prof = position_profiles(table, p);
    for (std::size_t y = 0; y < q.size(); ++y) {
      for_bits(win[y], [&](unsigned x2) {
        if (p[x2] == q[y]) {
          members[y].push_back(prof[x2]);
        }
      });
    }
  }
  std::vector<SetId> fam;
  for (auto& mset : members) {
    fam.push_back(space.intern_set(std::move(mset)));
  }
  return space.make(std::move(fam));
}

GkUniverse::GkUniverse(ConfigSpace& space, unsigned k, HSet x,
                       std::size_t len_bound, GameVariant variant,
                       std::optional<LetterSet> letters) {
  std::vector<LetterId> ls;
  for (LetterId c = 0; c < space.profiles().letter_count(); ++c) {
    if (!letters || ((*letters >> c) & 1u)) {
      ls.push_back(c);
    }
  }
  shals_ = enumerate_shals(ls, len_bound);
  build(space, k, x, variant);
}

GkUniverse::GkUniverse(ConfigSpace& space, unsigned k, HSet x,
                       std::vector<Shal> shals, GameVariant variant)
    : shals_(std::move(shals)) {
  build(space, k, x, variant);
}

void GkUniverse::build(ConfigSpace& space, unsigned k, HSet x,
                       GameVariant variant) {
  auto& table = space.profiles();
  RelaxedGame game(table.morphism(), table.letters(), x, variant);
  std::size_t ns = shals_.size();
  linked_.assign(ns * ns, false);
  std::vector<std::vector<ProfileId>> prof(ns);
  std::map<LetterSet, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < ns; ++i) {
    prof[i] = position_profiles(table, shals_[i]);
    groups[alphabet_of(shals_[i])].push_back(i);
  }
  std::vector<std::vector<std::vector<ProfileId>>> members(ns);
  for (std::size_t i = 0; i < ns; ++i) {
    members[i].resize(shals_[i].size());
  }
  for (auto const& [alpha, idx] : groups) {
    for (std::size_t a = 0; a < idx.size(); ++a) {
      for (std::size_t b = a; b < idx.size(); ++b) {
        std::size_t i = idx[a];
        std::size_t j = idx[b];
        auto const& p = shals_[i];
        auto const& q = shals_[j];
        auto win = game.solve(p, q, k);
        for (std::size_t y = 0; y < p.size(); ++y) {
          for_bits(win[y], [&](unsigned z) {
            if (p[y] != q[z]) {
              return;
            }
            linked_[i * ns + j] = true;
            linked_[j * ns + i] = true;
            members[i][y].push_back(prof[j][z]);
            if (i != j) {
              members[j][z].push_back(prof[i][y]);
            }
          });
        }
      }
    }
  }
  sets_.resize(ns);
  for (std::size_t i = 0; i < ns; ++i) {
    for (auto& mset : members[i]) {
      sets_[i].push_back(space.intern_set(std::move(mset)));
    }
    configs_.push_back(space.make(sets_[i]));
  }
}

}  // namespace fo2dec
