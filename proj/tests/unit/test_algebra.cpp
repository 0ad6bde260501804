#include <doctest.h>

#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "fo2dec/games.hpp"
#include "support.hpp"

using namespace fo2dec;
using fo2dec::test::corpus;

namespace {

std::string corpus_text(std::string const& name) {
  std::ifstream in(fo2dec::test::corpus_dir() / (name + ".alg"));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string replace_once(std::string s, std::string const& from,
                         std::string const& to) {
  auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  return s.replace(pos, from.size(), to);
}

AlgebraError load_error(std::string const& text) {
  try {
    parse_morphism(text);
  } catch (AlgebraError const& e) {
    return e;
  }
  FAIL("morphism loaded although it is invalid");
  return AlgebraError(AlgebraError::Kind::Parse, "");
}

}  // namespace

TEST_CASE("corpus algebras load") {
  for (auto const& f : fo2dec::test::kAlgebraFacts) {
    std::string name = f.name;
    CAPTURE(name);
    auto m = corpus(f.name);
    CHECK(m.h_size() == f.h);
    CHECK(m.v_size() == f.v);
  }
  auto t = corpus("trivial");
  CHECK(t.h_size() == 1);
  CHECK(t.v_size() == 1);
}

TEST_CASE("mutated action table") {
  // v1 is h1 + b([]); sending h0 to h0 breaks (g + v)h = g + vh
  auto text = replace_once(corpus_text("alg_a"), "v1 h0 -> h1", "v1 h0 -> h0");
  auto e = load_error(text);
  CHECK((e.kind() == AlgebraError::Kind::ActionAxiom
         || e.kind() == AlgebraError::Kind::InsertAxiom));
  CHECK(!e.witness().empty());
}

TEST_CASE("mutated product table") {
  // S0 + S1 = S1 gives (S0 + S1) + S1 = M11 but S0 + (S1 + S1) = M01
  auto text = replace_once(corpus_text("alg_be_raw"), "S0 S1 -> M01",
                           "S0 S1 -> S1");
  auto e = load_error(text);
  CHECK(e.kind() == AlgebraError::Kind::Associativity);
  REQUIRE(e.witness().size() == 4);
  CHECK(e.witness()[0] == "H");
  // rebuild the mutated table and confirm the reported triple
  auto const& h = corpus("alg_be_raw").algebra.H;
  auto table = h.table();
  table[*h.find("S0") * h.size() + *h.find("S1")] = *h.find("S1");
  FiniteSemigroup mutated(h.names(), table);
  auto x = mutated.find(e.witness()[1]);
  auto y = mutated.find(e.witness()[2]);
  auto z = mutated.find(e.witness()[3]);
  REQUIRE((x && y && z));
  CHECK(mutated.mul(mutated.mul(*x, *y), *z)
        != mutated.mul(*x, mutated.mul(*y, *z)));
}

TEST_CASE("mutated insert table") {
  auto text =
      replace_once(corpus_text("alg_a"), "h1 v0 -> v1", "h1 v0 -> v0");
  auto e = load_error(text);
  CHECK(e.kind() == AlgebraError::Kind::InsertAxiom);
  CHECK(!e.witness().empty());
}

TEST_CASE("structural load errors") {
  auto base = corpus_text("alg_a");
  CHECK(load_error(replace_once(base, "h0 h0 -> h0\n", "")).kind()
        == AlgebraError::Kind::NotTotal);
  CHECK(load_error(replace_once(base, "h0 h0 -> h0", "h0 h0 -> h7")).kind()
        == AlgebraError::Kind::UnknownSymbol);
  CHECK(load_error(replace_once(base, "[accept]\nh1", "[accept]\nh9")).kind()
        == AlgebraError::Kind::BadAccept);
  CHECK(load_error("[H]\nh\n").kind() == AlgebraError::Kind::Parse);
}

TEST_CASE("evaluation on ALG_A") {
  auto m = corpus("alg_a");
  auto const& al = m.alphabet;
  auto h = [&](std::string const& t) {
    return m.algebra.H.name(eval_forest(m, parse_forest(t, al)));
  };
  auto v = [&](std::string const& t) {
    return m.algebra.V.name(eval_context(m, parse_context(t, al)));
  };
  CHECK(h("a") == "h1");
  CHECK(h("c + c") == "h0");
  CHECK(h("b(c + a)") == "h1");
  CHECK(v("b([])") == "v0");
  CHECK(v("a + b([])") == "v1");
  CHECK(v("b(b([]))") == "v0");

  // eval(C[s]) = eval(C) applied to eval(s)
  std::mt19937_64 rng(11);
  std::vector<std::string> ctxs = {"b([])", "a + b([])", "b(c) + b(b([]))",
                                   "c + b(b([]) ) + a"};
  for (int i = 0; i < 100; ++i) {
    auto c = parse_context(ctxs[rng() % ctxs.size()], al);
    auto s = random_forest(rng, al, 6);
    CHECK(eval_forest(m, compose(c, s))
          == m.algebra.act(eval_context(m, c), eval_forest(m, s)));
  }
}

TEST_CASE("membership agrees with the language definitions") {
  for (auto const& c : fo2dec::test::kMembership) {
    std::string what = std::string(c.algebra) + ": " + c.forest;
    CAPTURE(what);
    auto m = corpus(c.algebra);
    CHECK(accepts(m, parse_forest(c.forest, m.alphabet)) == c.member);
  }
}

TEST_CASE("idempotent exponent") {
  FiniteSemigroup one({"e"}, {0});
  CHECK(omega_exponent(one) == 1);
  FiniteSemigroup z3({"0", "1", "2"}, {0, 1, 2, 1, 2, 0, 2, 0, 1});
  CHECK(omega_exponent(z3) == 3);
  auto od = omega_data(z3);
  CHECK(od.idempotent == std::vector<Elem>{0, 0, 0});
  FiniteSemigroup band({"x", "y"}, {0, 0, 1, 1});  // left zero
  CHECK(omega_exponent(band) == 1);
  CHECK(power(z3, 1, 4) == 1);
}

TEST_CASE("leaf completion") {
  auto m = corpus("alg_a");
  auto c = leaf_completion(m);
  CHECK(c.alphabet.leaf_count() == m.alphabet.leaf_count() + m.h_size());
  auto l0 = c.alphabet.leaf("h_h0");
  auto l1 = c.alphabet.leaf("h_h1");
  REQUIRE(l0);
  REQUIRE(l1);
  CHECK(m.algebra.H.name(c.leaf_image[*l0]) == "h0");
  CHECK(m.algebra.H.name(c.leaf_image[*l1]) == "h1");
  CHECK(c.algebra == m.algebra);
}

TEST_CASE("write and parse round trip") {
  for (auto const& f : fo2dec::test::kAlgebraFacts) {
    auto m = corpus(f.name);
    auto back = parse_morphism(write_morphism(m));
    CHECK(back.algebra == m.algebra);
    CHECK(back.alphabet == m.alphabet);
    CHECK(back.leaf_image == m.leaf_image);
    CHECK(back.inner_image == m.inner_image);
    CHECK(back.accepting == m.accepting);
  }
}
