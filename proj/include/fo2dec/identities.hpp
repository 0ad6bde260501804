// Equational conditions on the horizontal and vertical semigroups.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fo2dec/algebra.hpp"

namespace fo2dec {

enum class Logic { FO2, EFH, EFHS, FO2SUCC };

char const* logic_name(Logic l);
std::optional<Logic> parse_logic(std::string_view s);

struct IdentityReport {
  std::string identity;
  bool holds = true;
  // Variable assignment of a violation, as (variable, element name).
  std::vector<std::pair<std::string, std::string>> witness;
  std::string lhs;  // element names of both sides on the witness
  std::string rhs;
};

// (uv)^w v (uv)^w = (uv)^w, read multiplicatively.
IdentityReport check_eqv(FiniteSemigroup const& v);
// w(h+g) + g + w(h+g) = w(h+g), read additively.
IdentityReport check_eqh(FiniteSemigroup const& h);
// EFH: 2h=h and f+g=g+f. EFHS: 3h=2h and f+g=g+f. FO2SUCC: the identity
// over idempotents e. FO2 falls back to check_eqh.
IdentityReport check_variant_identities(FiniteSemigroup const& h, Logic l);

// Recomputes both sides of a reported witness; true if they differ.
bool witness_is_violation(FiniteSemigroup const& s, IdentityReport const& r);

}  // namespace fo2dec
