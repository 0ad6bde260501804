#include <doctest.h>

#include <random>
#include <set>

#include "fo2dec/profiles.hpp"
#include "fo2dec/validation.hpp"
#include "support.hpp"

using namespace fo2dec;
using fo2dec::test::corpus;

namespace {

struct AlgA {
  ForestMorphism m = leaf_completion(corpus("alg_a"));
  ProfileTable table{m};
  ShalAlphabet const& ls = table.letters();
  HSet h0 = HSet{1} << *m.algebra.H.find("h0");
  HSet h1 = HSet{1} << *m.algebra.H.find("h1");
  VSet v0 = VSet{1} << *m.algebra.V.find("v0");

  LetterId letter(char const* s) const { return *ls.find(s); }
  LetterSet set(std::initializer_list<char const*> names) const {
    LetterSet s = 0;
    for (auto n : names) s |= LetterSet{1} << letter(n);
    return s;
  }
  Profile const& of(char const* shal, std::size_t pos) {
    return table.get(shal_profile(table, parse_shal(shal, ls), pos));
  }
};

}  // namespace

TEST_CASE("letter profiles") {
  AlgA a;
  auto const& pa = a.of("a", 0);
  CHECK(pa.arity == 0);
  CHECK(pa.alphabet == a.set({"a"}));
  for (HSet g = 0; g < 4; ++g) {
    CHECK(pa.fh[g] == a.h1);
    CHECK(pa.fv[g] == 0);
  }

  auto const& pb = a.of("b([])", 0);
  CHECK(pb.arity == 1);
  CHECK(pb.alphabet == a.set({"b([])"}));
  for (HSet g = 0; g < 4; ++g) {
    CHECK(pb.fh[g] == g);  // v0 acts as the identity
    CHECK(pb.fv[g] == a.v0);
  }

  for (LetterId c = 0; c < a.ls.size(); ++c) {
    if (a.ls.letter(c).kind == ShalLetter::Kind::InnerLeaf) {
      auto const& p = a.table.get(a.table.letter(c));
      CHECK(p.arity == 0);
      for (VSet fv : p.fv) CHECK(fv == 0);
    }
  }
}

TEST_CASE("profile sums") {
  AlgA a;
  ProfileId pa = a.table.letter(a.letter("a"));
  ProfileId pc = a.table.letter(a.letter("c"));
  ProfileId pb = a.table.letter(a.letter("b([])"));
  auto const& s = a.table.get(a.table.sum(pa, pc, Keep::Left));
  CHECK(s.arity == 0);
  CHECK(s.alphabet == a.set({"a", "c"}));
  for (HSet g = 0; g < 4; ++g) {
    CHECK(s.fh[g] == a.h1);
    CHECK(s.fv[g] == 0);
  }
  auto lhs = a.table.sum(a.table.sum(pa, pb, Keep::Left), pc, Keep::Left);
  auto rhs = a.table.sum(pa, a.table.sum(pb, pc, Keep::Left), Keep::Left);
  CHECK(lhs == rhs);
}

TEST_CASE("sums agree with folding concatenations") {
  AlgA a;
  std::vector<LetterId> pool;
  for (LetterId c = 0; c < a.ls.size(); ++c) pool.push_back(c);
  std::mt19937_64 rng(31);
  auto rand_shal = [&] {
    Shal s;
    for (std::size_t i = 0, n = 1 + rng() % 3; i < n; ++i)
      s.push_back(pool[rng() % pool.size()]);
    return s;
  };
  for (int i = 0; i < 100; ++i) {
    Shal p = rand_shal();
    Shal q = rand_shal();
    std::size_t x = rng() % p.size();
    std::size_t y = rng() % q.size();
    Shal pq = p;
    pq.insert(pq.end(), q.begin(), q.end());
    auto l = a.table.sum(shal_profile(a.table, p, x),
                         shal_profile(a.table, q, y), Keep::Left);
    auto r = a.table.sum(shal_profile(a.table, p, x),
                         shal_profile(a.table, q, y), Keep::Right);
    CHECK(l == shal_profile(a.table, pq, x));
    CHECK(r == shal_profile(a.table, pq, p.size() + y));
  }
}

TEST_CASE("context mappings need the right number of fills") {
  AlgA a;
  CHECK(a.of("b([])", 0).fv[0] == a.v0);
  CHECK(a.of("b([]) + b([])", 0).fv[0] == 0);
  CHECK(a.of("b([]) + b([])", 1).fv[0] == 0);
  CHECK(a.of("b([]) + b([])", 0).arity == 2);
  CHECK(a.of("b([]) + b([]) + b([])", 0).arity == 2);
}

TEST_CASE("folded, semantic and plugged profiles agree") {
  auto m = leaf_completion(corpus("alg_a"));
  ShalAlphabet ls(m.alphabet);
  std::vector<LetterId> four = {*ls.find("a"), *ls.find("b([])"),
                                *ls.find("b(a)"), *ls.find("b(h_h0)")};
  auto r = validate_profiles(m, 3, four, true);
  CHECK(r.positions == 4 * 1 + 16 * 2 + 64 * 3);
  CHECK(r.ok());
  for (auto const& name : {"alg_par", "alg_first", "tiny1", "tiny2"}) {
    CAPTURE(name);
    auto r2 = validate_profiles(corpus(name), 3, std::nullopt, true);
    CHECK(r2.ok());
  }
  auto r3 = validate_profiles(corpus("alg_be"), 2, std::nullopt, true);
  CHECK(r3.ok());
}

TEST_CASE("profile closure") {
  AlgA a;
  auto only_a = all_profiles(a.table, a.set({"a"}));
  CHECK(only_a.complete);
  CHECK(only_a.total() == 1);
  auto const& ids = only_a.by_alphabet.at(a.set({"a"}));
  REQUIRE(ids.size() == 1);
  CHECK(ids[0] == a.table.letter(a.letter("a")));

  LetterSet all = (LetterSet{1} << a.ls.size()) - 1;
  auto ps = all_profiles(a.table, all);
  CHECK(ps.complete);
  for (auto const& [alpha, list] : ps.by_alphabet) {
    for (ProfileId p : list) {
      CHECK(a.table.get(p).arity <= 2);
      CHECK(a.table.get(p).alphabet == alpha);
    }
  }
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    ProfileTable fresh(a.m);
    auto again = all_profiles(fresh, all, 200000, seed);
    REQUIRE(again.total() == ps.total());
    for (auto const& [alpha, list] : ps.by_alphabet) {
      std::set<Profile> x;
      std::set<Profile> y;
      for (ProfileId p : list) x.insert(a.table.get(p));
      for (ProfileId p : again.by_alphabet.at(alpha)) y.insert(fresh.get(p));
      CHECK(x == y);
    }
  }
}

TEST_CASE("profile closure budget") {
  AlgA a;
  LetterSet all = (LetterSet{1} << a.ls.size()) - 1;
  auto ps = all_profiles(a.table, all, 5);
  CHECK_FALSE(ps.complete);
}

TEST_CASE("witness positions reproduce their profiles") {
  AlgA a;
  LetterSet all = (LetterSet{1} << a.ls.size()) - 1;
  all_profiles(a.table, all);
  for (ProfileId p = 0; p < a.table.size(); ++p) {
    auto const& w = a.table.witness_shal(p);
    auto pos = a.table.witness_pos(p);
    ProfileId again = shal_profile(a.table, w, pos);
    if (a.table.get(p) == a.table.get(again)) {
      CHECK(again == p);
    } else {
      // forest parts keep the witness of the port profile they come from
      CHECK(a.table.forest_part(again) == p);
    }
  }
}
