#include "fo2dec/identities.hpp"

namespace fo2dec {

char const* logic_name(Logic l) {
  switch (l) {
    case Logic::FO2:
      return "fo2";
    case Logic::EFH:
      return "efh";
    case Logic::EFHS:
      return "efhs";
    case Logic::FO2SUCC:
      return "fo2succ";
  }
  return "?";
}

std::optional<Logic> parse_logic(std::string_view s) {
  for (Logic l : {Logic::FO2, Logic::EFH, Logic::EFHS, Logic::FO2SUCC}) {
    if (s == logic_name(l)) {
      return l;
    }
  }
  return std::nullopt;
}

namespace {

constexpr char const* kEqName = "(xy)^w y (xy)^w = (xy)^w";
constexpr char const* kEqHName = "w(h+g) + g + w(h+g) = w(h+g)";
constexpr char const* kIdem = "2h = h";
constexpr char const* kThree = "3h = 2h";
constexpr char const* kComm = "f + g = g + f";
constexpr char const* kSucc = "w(e+h+e+g+e) + g + w(e+h+e+g+e) = w(e+h+e+g+e)";

Elem lookup(FiniteSemigroup const& s,
            std::vector<std::pair<std::string, std::string>> const& w,
            char const* var) {
  for (auto const& [k, v] : w) {
    if (k == var) {
      auto e = s.find(v);
      if (!e) {
        throw std::invalid_argument("unknown element " + v);
      }
      return *e;
    }
  }
  throw std::invalid_argument(std::string("witness lacks variable ") + var);
}

// Both sides of the named identity under the given assignment.
std::pair<Elem, Elem> sides(FiniteSemigroup const& s, OmegaData const& om,
                            std::string const& identity,
                            std::vector<std::pair<std::string, std::string>>
                                const& w) {
  if (identity == kEqName) {
    Elem x = lookup(s, w, "x");
    Elem y = lookup(s, w, "y");
    Elem e = om.idempotent[s.mul(x, y)];
    return {s.mul(s.mul(e, y), e), e};
  }
  if (identity == kEqHName) {
    Elem h = lookup(s, w, "h");
    Elem g = lookup(s, w, "g");
    Elem e = om.idempotent[s.mul(h, g)];
    return {s.mul(s.mul(e, g), e), e};
  }
  if (identity == kIdem) {
    Elem h = lookup(s, w, "h");
    return {s.mul(h, h), h};
  }
  if (identity == kThree) {
    Elem h = lookup(s, w, "h");
    Elem two = s.mul(h, h);
    return {s.mul(two, h), two};
  }
  if (identity == kComm) {
    Elem f = lookup(s, w, "f");
    Elem g = lookup(s, w, "g");
    return {s.mul(f, g), s.mul(g, f)};
  }
  if (identity == kSucc) {
    Elem e = lookup(s, w, "e");
    Elem h = lookup(s, w, "h");
    Elem g = lookup(s, w, "g");
    Elem z = s.mul(s.mul(s.mul(s.mul(e, h), e), g), e);
    Elem oz = om.idempotent[z];
    return {s.mul(s.mul(oz, g), oz), oz};
  }
  throw std::invalid_argument("unknown identity " + identity);
}

IdentityReport finish(FiniteSemigroup const& s, OmegaData const& om,
                      std::string identity,
                      std::vector<std::pair<std::string, std::string>> w) {
  IdentityReport r;
  r.identity = std::move(identity);
  auto [l, rr] = sides(s, om, r.identity, w);
  r.holds = false;
  r.witness = std::move(w);
  r.lhs = s.name(l);
  r.rhs = s.name(rr);
  return r;
}

IdentityReport check_generic(FiniteSemigroup const& s, char const* name,
                             char const* xv, char const* yv) {
  auto om = omega_data(s);
  for (Elem x = 0; x < s.size(); ++x) {
    for (Elem y = 0; y < s.size(); ++y) {
      Elem e = om.idempotent[s.mul(x, y)];
      if (s.mul(s.mul(e, y), e) != e) {
        return finish(s, om, name, {{xv, s.name(x)}, {yv, s.name(y)}});
      }
    }
  }
  return IdentityReport{name, true, {}, {}, {}};
}

std::optional<IdentityReport> check_commutative(FiniteSemigroup const& s,
                                                OmegaData const& om) {
  for (Elem f = 0; f < s.size(); ++f) {
    for (Elem g = 0; g < s.size(); ++g) {
      if (s.mul(f, g) != s.mul(g, f)) {
        return finish(s, om, kComm, {{"f", s.name(f)}, {"g", s.name(g)}});
      }
    }
  }
  return std::nullopt;
}

}  // namespace

IdentityReport check_eqv(FiniteSemigroup const& v) {
  return check_generic(v, kEqName, "x", "y");
}

IdentityReport check_eqh(FiniteSemigroup const& h) {
  return check_generic(h, kEqHName, "h", "g");
}

IdentityReport check_variant_identities(FiniteSemigroup const& s, Logic l) {
  auto om = omega_data(s);
  switch (l) {
    case Logic::FO2:
      return check_eqh(s);
    case Logic::EFH:
    case Logic::EFHS: {
      char const* first = l == Logic::EFH ? kIdem : kThree;
      for (Elem h = 0; h < s.size(); ++h) {
        Elem two = s.mul(h, h);
        bool ok = l == Logic::EFH ? two == h : s.mul(two, h) == two;
        if (!ok) {
          return finish(s, om, first, {{"h", s.name(h)}});
        }
      }
      if (auto r = check_commutative(s, om)) {
        return *r;
      }
      return IdentityReport{std::string(first) + " and " + kComm, true, {},
                            {}, {}};
    }
    case Logic::FO2SUCC:
      for (Elem e = 0; e < s.size(); ++e) {
        if (s.mul(e, e) != e) {
          continue;
        }
        for (Elem h = 0; h < s.size(); ++h) {
          for (Elem g = 0; g < s.size(); ++g) {
            Elem z = s.mul(s.mul(s.mul(s.mul(e, h), e), g), e);
            Elem oz = om.idempotent[z];
            if (s.mul(s.mul(oz, g), oz) != oz) {
              return finish(s, om, kSucc,
                            {{"e", s.name(e)},
                             {"h", s.name(h)},
                             {"g", s.name(g)}});
            }
          }
        }
      }
      return IdentityReport{kSucc, true, {}, {}, {}};
  }
  return {};
}

bool witness_is_violation(FiniteSemigroup const& s, IdentityReport const& r) {
  if (r.holds) {
    return false;
  }
  auto om = omega_data(s);
  auto [l, rr] = sides(s, om, r.identity, r.witness);
  return l != rr;
}

}  // namespace fo2dec
