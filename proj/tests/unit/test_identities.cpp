#include <doctest.h>

#include "fo2dec/identities.hpp"
#include "support.hpp"

using namespace fo2dec;
using fo2dec::test::corpus;

namespace {

std::string wit(IdentityReport const& r, std::string const& var) {
  for (auto const& [k, v] : r.witness) {
    if (k == var) return v;
  }
  return {};
}

FiniteSemigroup z2() { return FiniteSemigroup({"0", "1"}, {0, 1, 1, 0}); }

}  // namespace

TEST_CASE("corpus identities match the table oracle") {
  for (auto const& f : fo2dec::test::kAlgebraFacts) {
    std::string name = f.name;
    CAPTURE(name);
    auto m = corpus(f.name);
    auto eh = check_eqh(m.algebra.H);
    auto ev = check_eqv(m.algebra.V);
    CHECK(eh.holds == f.eqh);
    CHECK(ev.holds == f.eqv);
    CHECK(check_variant_identities(m.algebra.H, Logic::EFH).holds == f.efh);
    CHECK(check_variant_identities(m.algebra.H, Logic::EFHS).holds == f.efhs);
    CHECK(check_variant_identities(m.algebra.H, Logic::FO2SUCC).holds
          == f.succ);
    for (auto const& r : {eh, ev}) {
      if (!r.holds) {
        CHECK(witness_is_violation(r.identity == ev.identity ? m.algebra.V
                                                              : m.algebra.H,
                                   r));
      }
    }
  }
}

TEST_CASE("multiplicative identity on small semigroups") {
  CHECK(check_eqv(FiniteSemigroup({"e"}, {0})).holds);
  CHECK(check_eqv(corpus("alg_a").algebra.V).holds);
  auto r = check_eqv(z2());
  CHECK_FALSE(r.holds);
  CHECK(witness_is_violation(z2(), r));
  // (xy)^w = 0 forces y = 1
  CHECK(wit(r, "y") == "1");
}

TEST_CASE("additive identity") {
  CHECK(check_eqh(corpus("alg_a").algebra.H).holds);
  auto par = corpus("alg_par").algebra.H;
  auto r = check_eqh(par);
  CHECK_FALSE(r.holds);
  CHECK(r.identity == "w(h+g) + g + w(h+g) = w(h+g)");
  CHECK(witness_is_violation(par, r));
  CHECK(wit(r, "g") == "p1");
  // the h = g = 1 instance named for Z2 is a violation as well
  IdentityReport named = r;
  named.witness = {{"h", "p1"}, {"g", "p1"}};
  CHECK(witness_is_violation(par, named));
  CHECK(check_eqh(corpus("alg_be").algebra.H).holds);
}

TEST_CASE("variant identities") {
  CHECK(check_variant_identities(corpus("alg_a").algebra.H, Logic::EFH).holds);
  // counting to threshold two: 1 + 1 = 2, 2 + x = 2
  FiniteSemigroup sat({"1", "2"}, {1, 1, 1, 1});
  auto efh = check_variant_identities(sat, Logic::EFH);
  CHECK_FALSE(efh.holds);
  CHECK(efh.identity == "2h = h");
  CHECK(wit(efh, "h") == "1");
  CHECK(witness_is_violation(sat, efh));
  CHECK(check_variant_identities(sat, Logic::EFHS).holds);

  auto first = corpus("alg_first").algebra.H;
  auto c = check_variant_identities(first, Logic::EFH);
  CHECK_FALSE(c.holds);
  CHECK(c.identity == "f + g = g + f");
  CHECK(witness_is_violation(first, c));
  CHECK(c.lhs != c.rhs);
}

TEST_CASE("witness recheck rejects non-violations") {
  auto h = corpus("alg_a").algebra.H;
  IdentityReport r;
  r.identity = "w(h+g) + g + w(h+g) = w(h+g)";
  r.holds = false;
  r.witness = {{"h", "h0"}, {"g", "h1"}};
  CHECK_FALSE(witness_is_violation(h, r));
}

TEST_CASE("logic names") {
  for (auto l : {Logic::FO2, Logic::EFH, Logic::EFHS, Logic::FO2SUCC}) {
    CHECK(parse_logic(logic_name(l)) == l);
  }
  CHECK_FALSE(parse_logic("mso").has_value());
}
