#include <doctest.h>

#include <functional>
#include <random>
#include <set>

#include "fo2dec/games.hpp"
#include "support.hpp"

using namespace fo2dec;
using fo2dec::test::corpus;

namespace {

Shal word(std::string const& s) {
  Shal p;
  for (char c : s) p.push_back(static_cast<LetterId>(c - 'a'));
  return p;
}

bool only_ops(EffFormula const& f, std::set<EffFormula::Op> const& ops) {
  using Op = EffFormula::Op;
  if (f.op != Op::Label && f.op != Op::Or && f.op != Op::And
      && f.op != Op::Not && ops.count(f.op) == 0) {
    return false;
  }
  for (auto const& g : f.args) {
    if (!only_ops(g, ops)) return false;
  }
  return true;
}

std::set<EffFormula::Op> variant_ops(GameVariant v) {
  using Op = EffFormula::Op;
  switch (v) {
    case GameVariant::FO2:
      return {Op::EF, Op::Fup, Op::Fh, Op::FhInv};
    case GameVariant::S:
      return {Op::EF, Op::Fup, Op::S};
    case GameVariant::SNEQ:
      return {Op::EF, Op::Fup, Op::Sneq};
    case GameVariant::SUC:
      return {Op::EF, Op::Fup, Op::Fh, Op::FhInv, Op::Xh, Op::XhInv};
  }
  return {};
}

// Plain node model for hand-written two-variable sentences.
struct Flat {
  std::vector<NodeRef> nodes;
  std::vector<Node const*> at;
  explicit Flat(ForestTerm const& f) : nodes(all_nodes(f.trees())) {
    for (auto const& r : nodes) at.push_back(&resolve(f.trees(), r));
  }
  std::size_t size() const { return nodes.size(); }
  bool leaf(std::size_t x, LabelId a) const {
    return at[x]->kind == NodeKind::Leaf && at[x]->label == a;
  }
  bool inner(std::size_t x) const { return at[x]->kind == NodeKind::Inner; }
  bool desc(std::size_t y, std::size_t x) const {  // y strictly below x
    auto const& a = nodes[x];
    auto const& b = nodes[y];
    return b.size() > a.size() && std::equal(a.begin(), a.end(), b.begin());
  }
  bool next_sib(std::size_t y, std::size_t x) const {  // y right of x
    auto const& a = nodes[x];
    auto const& b = nodes[y];
    return a.size() == b.size()
           && std::equal(a.begin(), a.end() - 1, b.begin())
           && b.back() > a.back();
  }
  bool exists(std::function<bool(std::size_t)> const& p) const {
    for (std::size_t i = 0; i < size(); ++i)
      if (p(i)) return true;
    return false;
  }
  bool all(std::function<bool(std::size_t)> const& p) const {
    return !exists([&](std::size_t i) { return !p(i); });
  }
};

}  // namespace

TEST_CASE("formula evaluation") {
  Alphabet al({"a"}, {"b"});
  auto t = [&](std::string const& phi, std::string const& f) {
    return eval_eff(parse_formula(phi, al), parse_forest(f, al));
  };
  CHECK(t("a", "a"));
  CHECK(t("EF(a)", "b(a)"));
  CHECK_FALSE(t("EF(a)", "a + a"));
  CHECK(t("Fh(a)", "b(a) + a"));
  CHECK_FALSE(t("FhInv(a)", "b(a) + a"));
  CHECK(t("Xh(b)", "a + b(a)"));
  CHECK(t("S(b)", "b(a) + a"));
  CHECK_FALSE(t("Sneq(b)", "b(a) + a"));
  CHECK(t("not(Fup(a))", "a"));
  CHECK(modal_depth(parse_formula("and(EF(Fh(a)), not(b))", al)) == 2);
}

TEST_CASE("formula printing round trip") {
  Alphabet al({"a", "c"}, {"b"});
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    auto f = random_formula(rng, al, 3, true);
    CHECK(parse_formula(print(f, al), al) == f);
  }
}

TEST_CASE("FO2 sentences agree with their temporal translations") {
  Alphabet al({"a", "c"}, {"b"});
  LabelId a = *al.leaf("a");
  LabelId c = *al.leaf("c");
  // first root, then the sentences quantified over all nodes
  auto first_root = [](Flat const& f, std::size_t x) {
    return f.nodes[x] == NodeRef{0};
  };
  struct Pair {
    std::string eff;
    std::function<bool(Flat const&)> fo2;
  };
  std::vector<Pair> pairs = {
      {"or(a, EF(a), Fh(or(a, EF(a))))",
       [&](Flat const& f) {
         return f.exists([&](std::size_t x) { return f.leaf(x, a); });
       }},
      {"not(or(EF(and(a, Fh(c))), Fh(EF(and(a, Fh(c)))), Fh(and(a, Fh(c))),"
       " and(a, Fh(c))))",
       [&](Flat const& f) {
         return !f.exists([&](std::size_t x) {
           return f.leaf(x, a) && f.exists([&](std::size_t y) {
             return f.leaf(y, c) && f.next_sib(y, x);
           });
         });
       }},
      {"and(b, EF(c))",
       [&](Flat const& f) {
         return f.exists([&](std::size_t x) {
           return first_root(f, x) && f.inner(x) && f.exists([&](std::size_t y) {
             return f.leaf(y, c) && f.desc(y, x);
           });
         });
       }},
      {"not(FhInv(a))",
       [&](Flat const& f) {
         return f.all([&](std::size_t x) {
           return !first_root(f, x) || !f.exists([&](std::size_t y) {
             return f.leaf(y, a) && f.next_sib(x, y);
           });
         });
       }},
      {"or(c, Fh(c))",
       [&](Flat const& f) {
         return f.exists([&](std::size_t x) {
           return f.leaf(x, c) && f.nodes[x].size() == 1;
         });
       }},
  };
  std::mt19937_64 rng(21);
  for (auto const& p : pairs) {
    auto phi = parse_formula(p.eff, al);
    for (int i = 0; i < 300; ++i) {
      auto f = random_forest(rng, al, 10);
      CAPTURE(p.eff);
      CHECK(eval_eff(phi, f) == p.fo2(Flat(f)));
    }
  }
}

TEST_CASE("word games") {
  CHECK(word_game_equiv(word("aba"), word("aba"), 5));
  CHECK_FALSE(word_game_equiv(word("a"), word("aa"), 1));
  CHECK(word_game_equiv(word("aaa"), word("aaaa"), 1));
  CHECK_FALSE(word_game_equiv(word("aaa"), word("aaaa"), 4));
  for (auto const& g : fo2dec::test::kWordGames) {
    std::string what = std::string(g.p) + " / " + g.q;
    CAPTURE(what);
    CHECK(word_game_equiv(word(g.p), word(g.q), g.k) == g.equiv);
  }
}

TEST_CASE("forest games match the minimax oracle") {
  Alphabet al({"a", "c"}, {"b"});
  for (auto const& g : fo2dec::test::kForestGames) {
    std::string what = std::string(g.s) + " / " + g.t;
    CAPTURE(what);
    CHECK(forest_game_equiv(parse_forest(g.s, al), parse_forest(g.t, al), g.k)
          == g.equiv);
  }
}

TEST_CASE("forest game budget") {
  Alphabet al({"a"}, {"b"});
  auto f = parse_forest("b(a + a + a) + a", al);
  CHECK_THROWS_AS(forest_game_equiv(f, f, 2, GameVariant::FO2, 10),
                  BudgetExceeded);
}

TEST_CASE("games and formulas agree for every variant") {
  Alphabet al({"a", "c"}, {"b"});
  std::mt19937_64 rng(99);
  for (auto v : {GameVariant::FO2, GameVariant::S, GameVariant::SNEQ,
                 GameVariant::SUC}) {
    CAPTURE(variant_name(v));
    auto ops = variant_ops(v);
    std::vector<EffFormula> formulas;
    while (formulas.size() < 100) {
      auto f = random_formula(rng, al, 1 + rng() % 2, true);
      if (only_ops(f, ops)) formulas.push_back(std::move(f));
    }
    std::size_t equivalent = 0;
    for (int i = 0; i < 100; ++i) {
      auto s = random_forest(rng, al, 8);
      auto t = random_forest(rng, al, 8);
      for (unsigned k = 1; k <= 2; ++k) {
        if (!forest_game_equiv(s, t, k, v)) continue;
        ++equivalent;
        for (auto const& f : formulas) {
          if (modal_depth(f) <= k) CHECK(eval_eff(f, s) == eval_eff(f, t));
        }
      }
    }
    CHECK(equivalent > 0);
  }
}

TEST_CASE("b(a) against b(a + a)") {
  Alphabet al({"a"}, {"b"});
  auto s = parse_forest("b(a)", al);
  auto t = parse_forest("b(a + a)", al);
  bool eq = forest_game_equiv(s, t, 2);
  // all depth <= 2 formulas built from the atoms and one modality per level
  std::vector<std::string> atoms = {"a", "b"};
  std::vector<std::string> mods = {"EF", "Fup", "Fh", "FhInv"};
  std::vector<std::string> d1 = atoms;
  for (auto const& m : mods)
    for (auto const& x : atoms) d1.push_back(m + "(" + x + ")");
  bool agree = true;
  for (auto const& m : mods) {
    for (auto const& x : d1) {
      auto phi = parse_formula(m + "(" + x + ")", al);
      agree = agree && eval_eff(phi, s) == eval_eff(phi, t);
    }
  }
  // a + a has a following sibling two levels down
  CHECK_FALSE(agree);
  CHECK_FALSE(eq);
  CHECK(forest_game_equiv(s, t, 1));
}

TEST_CASE("relaxed game basics") {
  auto m = leaf_completion(corpus("alg_a"));
  ShalAlphabet ls(m.alphabet);
  HSet x = HSet{1} << *m.algebra.H.find("h1");
  RelaxedGame game(m, ls, x, GameVariant::FO2);
  auto p = parse_shal("b([])", ls);
  auto q = parse_shal("b(a)", ls);
  // zero rounds: blurred letters match
  CHECK((game.solve(p, q, 0)[0] & 1u) != 0);
  // one round: Spoiler keeps the pebble on b([]) and Duplicator finds no
  // b([]) in q; with ports on both sides she can answer
  CHECK((game.solve(p, q, 1)[0] & 1u) == 0);
  auto p2 = parse_shal("b([]) + b(a)", ls);
  auto q2 = parse_shal("b(a) + b([])", ls);
  CHECK((game.solve(p2, q2, 1)[0] & 1u) != 0);
  // different letter sets are never related
  CHECK_FALSE(game.equiv(p, 0, q, 0, 0));
  CHECK(game.blurred(*ls.find("b(a)")));
  CHECK_FALSE(game.blurred(*ls.find("b(c)")));
  CHECK(game.consistent(*ls.find("b([])"), *ls.find("b(a)")));
  CHECK_FALSE(game.consistent(*ls.find("b([])"), *ls.find("b(c)")));

  auto r = parse_shal("a + b([]) + b(a) + c", ls);
  for (unsigned k = 0; k < 5; ++k) CHECK(game.equiv(r, 2, r, 2, k));
}

TEST_CASE("relaxed game properties on random shals") {
  auto m = leaf_completion(corpus("alg_a"));
  ShalAlphabet ls(m.alphabet);
  std::vector<LetterId> pool = {*ls.find("a"), *ls.find("c"),
                                *ls.find("b([])"), *ls.find("b(a)"),
                                *ls.find("b(c)")};
  HSet x = HSet{1} << *m.algebra.H.find("h1");
  std::mt19937_64 rng(17);
  auto rand_shal = [&] {
    Shal s;
    std::size_t n = 1 + rng() % 5;
    for (std::size_t i = 0; i < n; ++i) s.push_back(pool[rng() % 3 + 2]);
    return s;
  };
  for (auto v : {GameVariant::FO2, GameVariant::S, GameVariant::SNEQ,
                 GameVariant::SUC}) {
    RelaxedGame g(m, ls, x, v);
    RelaxedGame exact(m, ls, 0, v);
    std::size_t tested = 0;
    for (int i = 0; i < 2000 && tested < 200; ++i) {
      auto p = rand_shal();
      auto q = rand_shal();
      auto r = rand_shal();
      unsigned k = rng() % 4;
      std::size_t xp = rng() % p.size();
      std::size_t xq = rng() % q.size();
      std::size_t xr = rng() % r.size();
      bool pq = g.equiv(p, xp, q, xq, k);
      bool qr = g.equiv(q, xq, r, xr, k);
      if (pq) {
        CHECK(g.equiv(q, xq, p, xp, k));
        if (k > 0) CHECK(g.equiv(p, xp, q, xq, k - 1));
      }
      if (pq && qr) {
        ++tested;
        CHECK(g.equiv(p, xp, r, xr, k));
      }
      // exact matching is harder to survive than blurred matching
      if (exact.equiv(p, xp, q, xq, k)) CHECK(pq);
    }
    CHECK(tested > 0);
  }
}

TEST_CASE("word game implies the relaxed game") {
  auto m = leaf_completion(corpus("alg_a"));
  ShalAlphabet ls(m.alphabet);
  HSet x = HSet{1} << *m.algebra.H.find("h1");
  RelaxedGame g(m, ls, x, GameVariant::FO2);
  std::mt19937_64 rng(23);
  std::vector<LetterId> pool = {*ls.find("a"), *ls.find("b([])"),
                                *ls.find("b(a)")};
  for (int i = 0; i < 300; ++i) {
    Shal p;
    Shal q;
    for (std::size_t j = 0, n = 1 + rng() % 6; j < n; ++j)
      p.push_back(pool[rng() % 3]);
    for (std::size_t j = 0, n = 1 + rng() % 6; j < n; ++j)
      q.push_back(pool[rng() % 3]);
    unsigned k = rng() % 4;
    if (word_game_equiv(p, q, k) && alphabet_of(p) == alphabet_of(q)) {
      CHECK(g.equiv(p, 0, q, 0, k));
    }
  }
}

TEST_CASE("game configurations against pairwise games") {
  auto m = leaf_completion(corpus("alg_a"));
  ProfileTable table(m);
  ConfigSpace space(table);
  auto const& ls = table.letters();
  HSet x = HSet{1} << *m.algebra.H.find("h1");
  std::vector<LetterId> letters = {*ls.find("a"), *ls.find("b([])"),
                                   *ls.find("b(a)")};
  std::size_t len = 3;
  auto all = enumerate_shals(letters, len);
  RelaxedGame game(m, ls, x, GameVariant::FO2);
  for (auto const& q : {parse_shal("a", ls), parse_shal("b([]) + a", ls),
                        parse_shal("b(a) + b([])", ls)}) {
    unsigned k = 2;
    // restrict the universe to the same three letters
    GkUniverse uni(space, k, x, len, GameVariant::FO2,
                   LetterSet{(1u << letters[0]) | (1u << letters[1])
                             | (1u << letters[2])});
    auto it = std::find(uni.shals().begin(), uni.shals().end(), q);
    REQUIRE(it != uni.shals().end());
    std::size_t qi = static_cast<std::size_t>(it - uni.shals().begin());
    for (std::size_t y = 0; y < q.size(); ++y) {
      std::set<ProfileId> expect;
      for (auto const& p : all) {
        for (std::size_t z = 0; z < p.size(); ++z) {
          if (p[z] == q[y] && game.equiv(q, y, p, z, k)) {
            expect.insert(shal_profile(table, p, z));
          }
        }
      }
      auto const& got = space.set(uni.position_set(qi, y));
      CHECK(std::set<ProfileId>(got.begin(), got.end()) == expect);
    }
  }
}

TEST_CASE("single leaf configuration and monotonicity") {
  auto m = leaf_completion(corpus("alg_a"));
  ProfileTable table(m);
  ConfigSpace space(table);
  auto const& ls = table.letters();
  auto q = parse_shal("a", ls);
  HSet x = HSet{1} << *m.algebra.H.find("h1");
  auto g1 = gk_configuration(space, q, 2, x, 1);
  REQUIRE(g1.family.size() == 1);
  CHECK(space.set(g1.family[0])
        == std::vector<ProfileId>{shal_profile(table, q, 0)});
  // every a-row has the same profile
  auto g3 = gk_configuration(space, q, 2, x, 3);
  CHECK(g3 == g1);

  auto r = parse_shal("b([]) + b(a)", ls);
  auto s2 = gk_configuration(space, r, 2, x, 2);
  auto s3 = gk_configuration(space, r, 2, x, 3);
  CHECK(space.leq(s2, s3));
  for (SetId a : s2.family) {
    auto const& small = space.set(a);
    bool covered = false;
    for (SetId b : s3.family) {
      auto const& big = space.set(b);
      covered = covered || std::includes(big.begin(), big.end(),
                                         small.begin(), small.end());
    }
    CHECK(covered);
  }
}
