#include <doctest.h>

#include "fo2dec/report.hpp"
#include "support.hpp"

using namespace fo2dec;
using fo2dec::test::corpus;

namespace {

Verdict run(char const* name, Logic l, bool all = false) {
  DecideOptions o;
  o.logic = l;
  o.all_conditions = all;
  return decide(corpus(name), o);
}

}  // namespace

TEST_CASE("verdict JSON round trip") {
  struct Run {
    char const* name;
    Logic logic;
    bool all;
  };
  for (auto const& r : {Run{"alg_a", Logic::FO2, false},
                        Run{"alg_par", Logic::FO2, false},
                        Run{"alg_first", Logic::EFH, false},
                        Run{"alg_be", Logic::FO2, true},
                        Run{"tiny2", Logic::FO2SUCC, false}}) {
    std::string name = r.name;
    CAPTURE(name);
    auto v = run(r.name, r.logic, r.all);
    auto j = verdict_to_json(v);
    auto back = verdict_from_json(j);
    CHECK(verdict_to_json(back) == j);
    CHECK(back.outcome == v.outcome);
    CHECK(back.failed == v.failed);
    CHECK(back.witness.has_value() == v.witness.has_value());
    // a parsed verdict verifies just like the original
    if (v.outcome == Outcome::NotDefinable) {
      CHECK(verify(corpus(r.name), back).ok);
    }
  }
}

TEST_CASE("verdicts checked against another algebra fail cleanly") {
  auto first = run("alg_first", Logic::EFH);
  auto r = verify(corpus("alg_par"), first);
  CHECK_FALSE(r.ok);
  CHECK_FALSE(r.message.empty());
  auto be = run("alg_be", Logic::FO2, true);
  CHECK_FALSE(verify(corpus("alg_a"), be).ok);
}

TEST_CASE("timings only on request") {
  auto v = run("alg_a", Logic::FO2);
  CHECK_FALSE(verdict_to_json(v).contains("timings"));
  CHECK(verdict_to_json(v, true).contains("timings"));
}

TEST_CASE("malformed verdicts are rejected") {
  CHECK_THROWS(verdict_from_json(nlohmann::json::parse("{}")));
  auto j = verdict_to_json(run("alg_par", Logic::FO2));
  j["outcome"] = "Maybe";
  CHECK_THROWS(verdict_from_json(j));
}

TEST_CASE("identity JSON round trip") {
  auto v = run("alg_par", Logic::FO2);
  REQUIRE(v.identity_witness.has_value());
  auto j = identity_to_json(*v.identity_witness);
  auto back = identity_from_json(j);
  CHECK(back.identity == v.identity_witness->identity);
  CHECK(back.witness == v.identity_witness->witness);
  CHECK(back.holds == v.identity_witness->holds);
}

TEST_CASE("text report") {
  auto t = verdict_text(run("alg_par", Logic::FO2));
  CHECK(t.find("NotDefinable") != std::string::npos);
  CHECK(t.find("IdentityH") != std::string::npos);
  auto d = verdict_text(run("alg_a", Logic::FO2));
  CHECK(d.find("Definable") != std::string::npos);
  CHECK(d.find("|H|=2") != std::string::npos);
}
