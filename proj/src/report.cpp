#include "fo2dec/report.hpp"

#include <sstream>
#include <stdexcept>

namespace fo2dec {

using nlohmann::json;

namespace {

Outcome parse_outcome(std::string const& s) {
  for (auto o : {Outcome::Definable, Outcome::NotDefinable,
                 Outcome::Inconclusive})
    if (s == outcome_name(o)) return o;
  throw std::runtime_error("unknown outcome '" + s + "'");
}

FailedCondition parse_condition(std::string const& s) {
  for (auto c : {FailedCondition::None, FailedCondition::IdentityH,
                 FailedCondition::IdentityV, FailedCondition::VariantIdentity,
                 FailedCondition::Saturation})
    if (s == condition_name(c)) return c;
  throw std::runtime_error("unknown failed condition '" + s + "'");
}

}  // namespace

json identity_to_json(IdentityReport const& r) {
  json vars = json::object();
  for (auto const& [k, val] : r.witness) vars[k] = val;
  json j = {{"identity", r.identity}, {"holds", r.holds}};
  if (!r.holds) {
    j["vars"] = vars;
    // element order of the assignment matters for re-checking
    json order = json::array();
    for (auto const& kv : r.witness) order.push_back(kv.first);
    j["varOrder"] = order;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
  }
  return j;
}

IdentityReport identity_from_json(json const& j) {
  IdentityReport r;
  r.identity = j.at("identity").get<std::string>();
  r.holds = j.at("holds").get<bool>();
  if (!r.holds) {
    auto const& vars = j.at("vars");
    if (j.contains("varOrder")) {
      for (auto const& k : j.at("varOrder"))
        r.witness.emplace_back(k.get<std::string>(),
                               vars.at(k.get<std::string>()).get<std::string>());
    } else {
      for (auto it = vars.begin(); it != vars.end(); ++it)
        r.witness.emplace_back(it.key(), it.value().get<std::string>());
    }
    r.lhs = j.value("lhs", "");
    r.rhs = j.value("rhs", "");
  }
  return r;
}

json verdict_to_json(Verdict const& v, bool with_timings) {
  json j;
  j["logic"] = logic_name(v.logic);
  j["outcome"] = outcome_name(v.outcome);
  j["failedCondition"] = v.failed == FailedCondition::None
                             ? json(nullptr)
                             : json(condition_name(v.failed));
  json ids = json::array();
  for (auto const& r : v.identities) ids.push_back(identity_to_json(r));
  j["identities"] = ids;
  if (v.identity_witness)
    j["identityWitness"] = identity_to_json(*v.identity_witness);
  if (v.witness) {
    auto const& w = *v.witness;
    json fam = json::array();
    for (auto const& member : w.family) {
      json mem = json::array();
      for (auto const& [shal, pos] : member)
        mem.push_back({{"shal", shal}, {"pos", pos}});
      fam.push_back(mem);
    }
    j["witness"] = {{"X", w.x},
                    {"family", fam},
                    {"configurationDump", w.configuration_dump},
                    {"factorization", w.factorization},
                    {"v", w.v},
                    {"h1", w.h1},
                    {"h2", w.h2}};
  }
  j["budgets"] = {{"satElements", v.budget},
                  {"maxUnion", v.max_union},
                  {"unionSearchExact", v.exact}};
  j["quotient"] = {{"H", v.quotient_h}, {"V", v.quotient_v}};
  j["notes"] = v.notes;
  if (with_timings) {
    json t = json::object();
    for (auto const& [k, s] : v.timings) t[k] = s;
    j["timings"] = t;
  }
  return j;
}

Verdict verdict_from_json(json const& j) {
  try {
    Verdict v;
    auto logic = parse_logic(j.at("logic").get<std::string>());
    if (!logic) throw std::runtime_error("unknown logic");
    v.logic = *logic;
    v.outcome = parse_outcome(j.at("outcome").get<std::string>());
    if (j.contains("failedCondition") && !j["failedCondition"].is_null())
      v.failed = parse_condition(j["failedCondition"].get<std::string>());
    if (j.contains("identities"))
      for (auto const& r : j["identities"])
        v.identities.push_back(identity_from_json(r));
    if (j.contains("identityWitness"))
      v.identity_witness = identity_from_json(j["identityWitness"]);
    if (j.contains("witness")) {
      auto const& wj = j["witness"];
      WitnessRecord w;
      w.x = wj.at("X").get<std::vector<std::string>>();
      for (auto const& mem : wj.at("family")) {
        std::vector<std::pair<std::string, std::size_t>> m;
        for (auto const& e : mem)
          m.emplace_back(e.at("shal").get<std::string>(),
                         e.at("pos").get<std::size_t>());
        w.family.push_back(std::move(m));
      }
      if (wj.contains("configurationDump"))
        w.configuration_dump =
            wj["configurationDump"].get<std::vector<std::string>>();
      w.factorization = wj.at("factorization").get<std::vector<std::string>>();
      w.v = wj.at("v").get<std::string>();
      w.h1 = wj.at("h1").get<std::string>();
      w.h2 = wj.at("h2").get<std::string>();
      v.witness = std::move(w);
    }
    if (j.contains("budgets")) {
      auto const& b = j["budgets"];
      v.budget = b.value("satElements", std::size_t{0});
      v.max_union = b.value("maxUnion", std::size_t{0});
      v.exact = b.value("unionSearchExact", true);
    }
    if (j.contains("quotient")) {
      v.quotient_h = j["quotient"].value("H", std::size_t{0});
      v.quotient_v = j["quotient"].value("V", std::size_t{0});
    }
    if (j.contains("notes"))
      v.notes = j["notes"].get<std::vector<std::string>>();
    return v;
  } catch (json::exception const& e) {
    throw std::runtime_error(std::string("malformed verdict: ") + e.what());
  }
}

std::string verdict_text(Verdict const& v) {
  std::ostringstream os;
  os << "logic: " << logic_name(v.logic) << "\n";
  os << "outcome: " << outcome_name(v.outcome);
  if (v.failed != FailedCondition::None)
    os << " (" << condition_name(v.failed) << ")";
  os << "\n";
  os << "syntactic algebra: |H|=" << v.quotient_h << " |V|=" << v.quotient_v
     << "\n";
  for (auto const& r : v.identities) {
    os << "identity " << r.identity << ": " << (r.holds ? "holds" : "fails");
    if (!r.holds) {
      os << " at";
      for (auto const& [k, val] : r.witness) os << " " << k << "=" << val;
      os << " (" << r.lhs << " != " << r.rhs << ")";
    }
    os << "\n";
  }
  if (v.witness) {
    auto const& w = *v.witness;
    os << "saturation witness:\n  X = {";
    for (std::size_t i = 0; i < w.x.size(); ++i)
      os << (i ? ", " : "") << w.x[i];
    os << "}\n  configuration: " << w.configuration_dump.size()
       << " members\n";
    // members with ports first; the JSON report has all of them
    std::size_t shown = 0, skipped = 0;
    for (auto const& member : w.configuration_dump) {
      bool port = member.find("\n  0 |") == std::string::npos;
      if (!port && shown >= 4) {
        ++skipped;
        continue;
      }
      os << "    " << member << "\n";
      ++shown;
    }
    if (skipped != 0)
      os << "    ... " << skipped << " more forest-only members\n";
    os << "  v = " << w.v << " =";
    for (auto const& f : w.factorization) os << " " << f;
    os << "\n  v^omega " << w.h1 << " != v^omega " << w.h2 << "\n";
  }
  if (v.outcome == Outcome::Definable)
    os << "bounds: sat budget " << v.budget << ", max union " << v.max_union
       << (v.exact ? " (union search exact)" : " (union search bounded)")
       << "\n";
  for (auto const& n : v.notes) os << "note: " << n << "\n";
  return os.str();
}

}  // namespace fo2dec
