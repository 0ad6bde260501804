#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "fo2dec/saturation.hpp"
#include "fo2dec/validation.hpp"
#include "support.hpp"

using namespace fo2dec;
using fo2dec::test::corpus;

namespace {

struct Expected {
  char const* algebra;
  Logic logic;
  Outcome outcome;
  FailedCondition failed;
};

// Frozen from the decision procedure; identity outcomes agree with the
// table oracle in golden/oracle_values.inc.
constexpr Expected kVerdicts[] = {
    {"trivial", Logic::FO2, Outcome::Definable, FailedCondition::None},
    {"trivial", Logic::EFH, Outcome::Definable, FailedCondition::None},
    {"trivial", Logic::EFHS, Outcome::Definable, FailedCondition::None},
    {"trivial", Logic::FO2SUCC, Outcome::Inconclusive, FailedCondition::None},
    {"alg_a", Logic::FO2, Outcome::Definable, FailedCondition::None},
    {"alg_a", Logic::EFH, Outcome::Definable, FailedCondition::None},
    {"alg_a", Logic::EFHS, Outcome::Definable, FailedCondition::None},
    {"alg_a", Logic::FO2SUCC, Outcome::Inconclusive, FailedCondition::None},
    {"alg_par", Logic::FO2, Outcome::NotDefinable, FailedCondition::IdentityH},
    {"alg_par", Logic::EFH, Outcome::NotDefinable,
     FailedCondition::VariantIdentity},
    {"alg_par", Logic::FO2SUCC, Outcome::NotDefinable,
     FailedCondition::VariantIdentity},
    {"alg_first", Logic::FO2, Outcome::Definable, FailedCondition::None},
    {"alg_first", Logic::EFH, Outcome::NotDefinable,
     FailedCondition::VariantIdentity},
    {"alg_first", Logic::EFHS, Outcome::NotDefinable,
     FailedCondition::VariantIdentity},
    {"alg_first", Logic::FO2SUCC, Outcome::Inconclusive,
     FailedCondition::None},
    {"alg_be", Logic::FO2, Outcome::NotDefinable, FailedCondition::IdentityV},
    {"alg_be", Logic::EFH, Outcome::NotDefinable,
     FailedCondition::VariantIdentity},
    {"alg_be_raw", Logic::FO2, Outcome::NotDefinable,
     FailedCondition::IdentityV},
    {"tiny1", Logic::FO2, Outcome::NotDefinable, FailedCondition::IdentityV},
    {"tiny2", Logic::FO2, Outcome::Definable, FailedCondition::None},
    {"tiny2", Logic::EFHS, Outcome::NotDefinable,
     FailedCondition::VariantIdentity},
};

DecideOptions opts_for(Logic l) {
  DecideOptions o;
  o.logic = l;
  return o;
}

Shal random_shal(std::mt19937_64& rng, std::vector<LetterId> const& pool,
                 std::size_t max_len) {
  Shal s;
  for (std::size_t i = 0, n = 1 + rng() % max_len; i < n; ++i)
    s.push_back(pool[rng() % pool.size()]);
  return s;
}

}  // namespace

TEST_CASE("letter configurations") {
  auto m = leaf_completion(corpus("alg_a"));
  ProfileTable table(m);
  ConfigSpace space(table);
  auto init = initial_configs(space);
  CHECK(init.size() == table.letter_count());
  CHECK(init.size() == 9);
  for (LetterId c = 0; c < init.size(); ++c) {
    CHECK(init[c].alphabet == (LetterSet{1} << c));
    REQUIRE(init[c].family.size() == 1);
    CHECK(space.set(init[c].family[0]).size() == 1);
  }
}

TEST_CASE("fixpoint on the trivial algebra") {
  auto m = leaf_completion(corpus("trivial"));
  ProfileTable table(m);
  ConfigSpace space(table);
  auto st = sat_fixpoint(space, 1, SatOptions{});
  CHECK(st.complete);
  CHECK(st.elements.size() == st.derivations.size());
  CHECK(st.elements.size() == st.trace.size());
  CHECK_FALSE(find_violation(space, 1, st.elements, 3).has_value());
}

TEST_CASE("fixpoint is closed under sums and records derivations") {
  auto m = leaf_completion(corpus("alg_a"));
  ProfileTable table(m);
  ConfigSpace space(table);
  HSet all = table.sets().full_h();
  auto st = sat_fixpoint(space, all, SatOptions{});
  REQUIRE(st.complete);
  std::set<Configuration> in(st.elements.begin(), st.elements.end());
  for (std::size_t i = 0; i < st.elements.size(); ++i) {
    for (std::size_t j = 0; j < st.elements.size(); j += 7) {
      CHECK(in.count(space.sum(st.elements[i], st.elements[j])) == 1);
    }
    auto const& d = st.derivations[i];
    switch (d.rule) {
      case SatDerivation::Rule::Letter:
        CHECK(st.elements[i] == space.letter_config(d.letter));
        break;
      case SatDerivation::Rule::Sum:
        CHECK(st.elements[i] ==
              space.sum(st.elements[d.left], st.elements[d.right]));
        break;
      case SatDerivation::Rule::Padded: {
        auto u = space.sum(space.sum(space.omega(st.elements[d.left]),
                                     space.uplift(d.middle)),
                           space.omega(st.elements[d.right]));
        CHECK(st.elements[i] == u);
        break;
      }
    }
  }
  // ALG_A is definable: no X admits a violation
  for (HSet x = 1; x <= all; ++x) {
    auto sx = sat_fixpoint(space, x, SatOptions{});
    CHECK_FALSE(find_violation(space, x, sx.elements, 3).has_value());
  }
}

TEST_CASE("fixpoint budget") {
  auto m = leaf_completion(corpus("alg_a"));
  ProfileTable table(m);
  ConfigSpace space(table);
  SatOptions o;
  o.budget = 5;
  auto st = sat_fixpoint(space, table.sets().full_h(), o);
  CHECK_FALSE(st.complete);
  bool stopped = false;
  auto st2 = sat_fixpoint(space, table.sets().full_h(), SatOptions{},
                          [&](SatState const& s) {
                            stopped = s.elements.size() > 12;
                            return stopped;
                          });
  CHECK(stopped);
  CHECK_FALSE(st2.complete);
}

TEST_CASE("saturated context types") {
  auto m = leaf_completion(corpus("alg_a"));
  ProfileTable table(m);
  ConfigSpace space(table);
  auto const& alg = m.algebra;
  auto const& ls = table.letters();
  auto letter = [&](char const* n) { return space.letter_config(*ls.find(n)); };

  // a, c and b([]): both types are valid and only the identity context
  auto u = space.unite(space.unite(letter("a"), letter("c")), letter("b([])"));
  auto rep = space.validity(u);
  CHECK(rep.valid_h == table.sets().full_h());
  Elem v0 = *alg.V.find("v0");
  CHECK(rep.valid_v == (VSet{1} << v0));
  auto sat = saturated_elements(space, u, rep.valid_h);
  CHECK(sat.elements == (VSet{1} << v0));
  CHECK(sat.factorization[v0] == std::vector<Elem>{v0});

  // products of the reported factorizations, on random unions
  auto st = sat_fixpoint(space, table.sets().full_h(), SatOptions{});
  std::mt19937_64 rng(12);
  std::size_t checked = 0;
  for (int i = 0; i < 300; ++i) {
    Configuration w;
    for (int j = 0, n = 2 + static_cast<int>(rng() % 3); j < n; ++j)
      w = space.unite(w, st.elements[rng() % st.elements.size()]);
    auto r = space.validity(w);
    if (r.valid_h == 0) continue;
    auto s = saturated_elements(space, w, r.valid_h);
    for (Elem v = 0; v < alg.V.size(); ++v) {
      if (!((s.elements >> v) & 1u)) continue;
      ++checked;
      auto const& f = s.factorization[v];
      REQUIRE_FALSE(f.empty());
      Elem prod = f[0];
      for (std::size_t k = 1; k < f.size(); ++k) prod = alg.V.mul(prod, f[k]);
      CHECK(prod == v);
      for (Elem x : f) CHECK(((r.valid_v >> x) & 1u) == 1);
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("profile saturation finds the boolean-evaluation witness") {
  auto m = decision_morphism(corpus("alg_be"));
  ProfileTable table(m);
  auto r = check_profile_saturation(table, SatOptions{});
  REQUIRE(r.witness.has_value());
  CHECK(r.record.has_value());
  auto const& w = *r.witness;
  auto om = omega_data(m.algebra.V);
  Elem e = om.idempotent[w.v];
  CHECK(m.algebra.act(e, w.h1) != m.algebra.act(e, w.h2));
  CHECK(((w.x >> w.h1) & 1u) == 1);
  CHECK(((w.x >> w.h2) & 1u) == 1);

  auto a = decision_morphism(corpus("alg_a"));
  ProfileTable ta(a);
  CHECK_FALSE(check_profile_saturation(ta, SatOptions{}).witness.has_value());
}

TEST_CASE("corpus verdicts") {
  for (auto const& e : kVerdicts) {
    std::string name = e.algebra;
    CAPTURE(name);
    CAPTURE(logic_name(e.logic));
    auto m = corpus(e.algebra);
    auto v = decide(m, opts_for(e.logic));
    CHECK(v.outcome == e.outcome);
    CHECK(v.failed == e.failed);
    if (v.outcome == Outcome::NotDefinable) {
      auto r = verify(m, v);
      CHECK_MESSAGE(r.ok, r.message);
    }
    if (e.logic == Logic::FO2SUCC) {
      CHECK_FALSE(v.identities.empty());
    }
  }
}

TEST_CASE("boolean evaluation in all-conditions mode") {
  auto m = corpus("alg_be");
  auto o = opts_for(Logic::FO2);
  o.all_conditions = true;
  auto v = decide(m, o);
  CHECK(v.outcome == Outcome::NotDefinable);
  CHECK(v.failed == FailedCondition::IdentityV);
  REQUIRE(v.witness.has_value());
  auto r = verify(m, v);
  CHECK_MESSAGE(r.ok, r.message);

  // a tampered witness must not verify
  auto bad = v;
  bad.witness->h2 = bad.witness->h1;
  bad.identity_witness.reset();
  bad.failed = FailedCondition::Saturation;
  CHECK_FALSE(verify(m, bad).ok);
}

TEST_CASE("verify rejects a claimed identity failure that holds") {
  auto m = corpus("alg_a");
  auto v = decide(m, opts_for(Logic::FO2));
  REQUIRE(v.outcome == Outcome::Definable);
  auto par = decide(corpus("alg_par"), opts_for(Logic::FO2));
  REQUIRE(par.outcome == Outcome::NotDefinable);
  CHECK_FALSE(verify(m, par).ok);
}

TEST_CASE("pruning equivalent elements keeps the verdicts") {
  for (auto const& name : {"alg_a", "alg_first", "tiny2"}) {
    CAPTURE(name);
    auto m = corpus(name);
    auto plain = decide(m, opts_for(Logic::FO2));
    auto o = opts_for(Logic::FO2);
    o.sat.prune_leq = true;
    auto pruned = decide(m, o);
    CHECK(plain.outcome == pruned.outcome);
    CHECK(plain.failed == pruned.failed);
  }
  auto m = corpus("alg_be");
  auto o = opts_for(Logic::FO2);
  o.all_conditions = true;
  o.sat.prune_leq = true;
  auto v = decide(m, o);
  CHECK(v.witness.has_value());
  CHECK(verify(m, v).ok);
}

TEST_CASE("variant class keys match the unbounded variant games") {
  auto m = leaf_completion(corpus("alg_a"));
  ShalAlphabet ls(m.alphabet);
  std::vector<LetterId> pool;
  for (char const* n : {"a", "c", "b([])", "b(a)", "b(h_h1)"})
    pool.push_back(*ls.find(n));
  HSet h1 = HSet{1} << *m.algebra.H.find("h1");
  std::mt19937_64 rng(77);
  for (auto v : {GameVariant::S, GameVariant::SNEQ}) {
    CAPTURE(variant_name(v));
    for (HSet x : {HSet{0}, h1}) {
      RelaxedGame game(m, ls, x, v);
      std::size_t mismatches = 0;
      for (int i = 0; i < 400; ++i) {
        Shal p = random_shal(rng, pool, 4);
        Shal q = random_shal(rng, pool, 4);
        if (i % 3 == 0) {
          q = p;
          std::shuffle(q.begin(), q.end(), rng);
        }
        std::size_t px = rng() % p.size();
        std::size_t qy = rng() % q.size();
        bool same = variant_key(p, px, x, v, m, ls) ==
                    variant_key(q, qy, x, v, m, ls);
        if (same != game.equiv(p, px, q, qy, std::nullopt)) ++mismatches;
      }
      CHECK(mismatches == 0);
    }
  }
  LetterId a = *ls.find("a");
  auto key = [&](Shal const& p, GameVariant v) {
    return variant_key(p, 0, 0, v, m, ls);
  };
  // S only sees the letter set
  CHECK(key({a}, GameVariant::S) == key({a, a}, GameVariant::S));
  // SNEQ counts to two
  CHECK(key({a}, GameVariant::SNEQ) != key({a, a}, GameVariant::SNEQ));
  CHECK(key({a, a}, GameVariant::SNEQ) == key({a, a, a}, GameVariant::SNEQ));
}

TEST_CASE("sampled containment on the tiny morphisms") {
  SatOptions o;
  for (auto const& name : {"tiny1", "tiny2"}) {
    CAPTURE(name);
    auto rep = validate_prop_algo(corpus(name), 3u, 4, o);
    CHECK(rep.k == 3);
    CHECK(rep.ok());
    for (auto const& c : rep.cases) {
      CAPTURE(c.x_name);
      CHECK(c.sat_complete);
      CHECK(c.not_below == 0);
      CHECK(c.unverified == 0);
    }
  }
}
