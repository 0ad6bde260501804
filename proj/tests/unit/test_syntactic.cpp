#include <doctest.h>

#include <random>

#include "fo2dec/games.hpp"
#include "fo2dec/syntactic.hpp"
#include "support.hpp"

using namespace fo2dec;
using fo2dec::test::corpus;

TEST_CASE("quotient sizes match the Myhill-Nerode oracle") {
  for (auto const& f : fo2dec::test::kAlgebraFacts) {
    std::string name = f.name;
    CAPTURE(name);
    auto q = syntactic_quotient(corpus(f.name)).quotient;
    CHECK(q.h_size() == f.quotient_h);
    CHECK(q.v_size() == f.quotient_v);
  }
}

TEST_CASE("quotient is idempotent") {
  for (auto const& f : fo2dec::test::kAlgebraFacts) {
    auto q = syntactic_quotient(corpus(f.name)).quotient;
    auto qq = syntactic_quotient(q);
    CHECK(qq.quotient.algebra == q.algebra);
    for (Elem h = 0; h < q.h_size(); ++h) CHECK(qq.h_class[h] == h);
    for (Elem v = 0; v < q.v_size(); ++v) CHECK(qq.v_class[v] == v);
  }
}

TEST_CASE("ALG_A is already syntactic") {
  auto m = corpus("alg_a");
  auto r = syntactic_quotient(m);
  CHECK(r.quotient.algebra == m.algebra);
  CHECK(r.h_class == std::vector<std::optional<Elem>>{0, 1});
  CHECK(r.v_class == std::vector<std::optional<Elem>>{0, 1});
}

TEST_CASE("Boolean evaluation quotient") {
  auto m = corpus("alg_be_raw");
  auto r = syntactic_quotient(m);
  auto const& H = m.algebra.H;
  // a forest of zeros behaves like a single zero tree
  CHECK(r.h_class[*H.find("M00")] == r.h_class[*H.find("S0")]);
  CHECK(r.h_class[*H.find("S0")] != r.h_class[*H.find("S1")]);
  CHECK(r.h_class[*H.find("M01")] != r.h_class[*H.find("M11")]);
  CHECK(r.quotient.h_size() == 4);
  CHECK(r.quotient.algebra.H.find("S0"));

  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    auto f = random_forest(rng, m.alphabet, 12);
    CHECK(accepts(m, f) == accepts(r.quotient, f));
    Elem h = eval_forest(m, f);
    CHECK(r.h_class[h] == eval_forest(r.quotient, f));
  }
}

TEST_CASE("elements outside the image are dropped") {
  // alg_a with only the c leaf: h1 is unreachable
  auto m = corpus("alg_a");
  Alphabet al({"c"}, {"b"});
  m.alphabet = al;
  m.leaf_image = {0};
  auto img = morphism_image(m);
  CHECK(img.h == std::vector<bool>{true, false});
  auto r = syntactic_quotient(m);
  CHECK(!r.h_class[1].has_value());
  CHECK(r.quotient.h_size() == 1);
}
