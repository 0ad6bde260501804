#include "fo2dec/configurations.hpp"

#include <algorithm>
#include <sstream>

namespace fo2dec {

std::size_t ConfigurationHash::operator()(
    Configuration const& c) const noexcept {
  std::size_t h = std::hash<std::uint64_t>{}(c.alphabet);
  for (SetId s : c.family) {
    h = h * 1000003u ^ s;
  }
  return h;
}

std::size_t ConfigSpace::VecHash::operator()(
    std::vector<ProfileId> const& v) const noexcept {
  std::size_t h = v.size();
  for (ProfileId p : v) {
    h = h * 1000003u ^ p;
  }
  return h;
}

ValidityReport validity_of(ProfileTable const& table,
                           std::vector<ProfileId> const& profiles) {
  auto const& sa = table.sets();
  auto const& alg = table.morphism().algebra;
  ValidityReport r;
  HSet constants = 0;
  for (ProfileId id : profiles) {
    auto const& p = table.get(id);
    if (p.arity == 0) {
      constants |= p.fh[sa.full_h()];
    }
    if (p.arity == 2) {
      r.branching = true;
    }
  }
  HSet x = constants;
  while (true) {
    HSet next = x;
    for (ProfileId id : profiles) {
      auto const& p = table.get(id);
      if (p.arity > 0) {
        next |= p.fh[x];
      }
    }
    if (next == x) {
      break;
    }
    x = next;
  }
  r.valid_h = x;
  VSet gens = 0;
  for (ProfileId id : profiles) {
    gens |= table.get(id).fv[x];
  }
  r.valid_v = sa.closure(gens);

  // reach[h]: elements v h' = h for some v in W, plus h itself
  std::size_t nh = sa.h_size();
  std::vector<HSet> reach(nh, 0);
  for_bits(x, [&](unsigned h) {
    reach[h] = HSet{1} << h;
    for_bits(r.valid_v, [&](unsigned v) {
      reach[h] |= HSet{1} << alg.act(v, h);
    });
  });
  HSet top = x;
  for_bits(x, [&](unsigned h) { top &= reach[h]; });
  r.reduced = top == x;
  if (r.branching) {
    r.max_class = top;
  }
  return r;
}

bool label_equiv(LetterId c, LetterId d, LetterSet bs, HSet x,
                 ForestMorphism const& m, ShalAlphabet const& letters) {
  if (c == d) {
    return true;
  }
  auto const& lc = letters.letter(c);
  auto const& ld = letters.letter(d);
  auto blurred = [&](ShalLetter const& l) {
    if (l.kind == ShalLetter::Kind::InnerPort) {
      return true;
    }
    return l.kind == ShalLetter::Kind::InnerLeaf
           && ((x >> m.leaf_image.at(l.leaf)) & 1u);
  };
  if (!blurred(lc) || !blurred(ld) || lc.inner != ld.inner) {
    return false;
  }
  return (bs >> letters.port_letter(lc.inner)) & 1u;
}

bool is_x_approximation(LetterSet cs, LetterSet bs, HSet x,
                        ForestMorphism const& m, ShalAlphabet const& letters) {
  if ((cs & ~bs) != 0) {
    return false;
  }
  bool ok = true;
  for_bits(bs, [&](unsigned c) {
    if (!ok) {
      return;
    }
    bool found = false;
    for_bits(cs, [&](unsigned d) {
      found = found || label_equiv(c, d, bs, x, m, letters);
    });
    ok = found;
  });
  return ok;
}

////////////////////////////////////////////////////////////////////////
// ConfigSpace
////////////////////////////////////////////////////////////////////////

ConfigSpace::ConfigSpace(ProfileTable& table) : table_(table) {}

SetId ConfigSpace::intern_set(std::vector<ProfileId> s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  auto it = set_index_.find(s);
  if (it != set_index_.end()) {
    return it->second;
  }
  auto id = static_cast<SetId>(sets_.size());
  set_index_.emplace(s, id);
  sets_.push_back(std::move(s));
  return id;
}

SetId ConfigSpace::set_sum(SetId a, SetId b, Keep keep) {
  auto key = (std::uint64_t{a} << 32) | b;
  auto& memo = keep == Keep::Left ? sum_l_ : sum_r_;
  if (auto it = memo.find(key); it != memo.end()) {
    return it->second;
  }
  std::vector<ProfileId> out;
  // copies: interning below may reallocate sets_
  auto const sa = sets_[a];
  auto const sb = sets_[b];
  out.reserve(sa.size() * sb.size());
  for (ProfileId p : sa) {
    for (ProfileId q : sb) {
      out.push_back(table_.sum(p, q, keep));
    }
  }
  SetId id = intern_set(std::move(out));
  memo.emplace(key, id);
  return id;
}

Configuration ConfigSpace::make(std::vector<SetId> family) const {
  Configuration c;
  std::sort(family.begin(), family.end());
  family.erase(std::unique(family.begin(), family.end()), family.end());
  for (SetId s : family) {
    for (ProfileId p : sets_.at(s)) {
      c.alphabet |= table_.get(p).alphabet;
    }
  }
  c.family = std::move(family);
  return c;
}

Configuration ConfigSpace::letter_config(LetterId c) {
  return make({intern_set({table_.letter(c)})});
}

std::vector<ProfileId> ConfigSpace::profile_union(
    Configuration const& u) const {
  std::vector<ProfileId> out;
  for (SetId s : u.family) {
    out.insert(out.end(), sets_[s].begin(), sets_[s].end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Configuration ConfigSpace::unite(Configuration const& u,
                                 Configuration const& v) const {
  std::vector<SetId> fam = u.family;
  fam.insert(fam.end(), v.family.begin(), v.family.end());
  return make(std::move(fam));
}

Configuration ConfigSpace::sum(Configuration const& u,
                               Configuration const& v) {
  if (u.empty()) {
    return v;
  }
  if (v.empty()) {
    return u;
  }
  SetId uu = intern_set(profile_union(u));
  SetId vv = intern_set(profile_union(v));
  std::vector<SetId> fam;
  for (SetId s : u.family) {
    fam.push_back(set_sum(s, vv, Keep::Left));
  }
  for (SetId s : v.family) {
    fam.push_back(set_sum(uu, s, Keep::Right));
  }
  return make(std::move(fam));
}

bool ConfigSpace::leq(Configuration const& u, Configuration const& v) const {
  auto subset = [&](SetId a, SetId b) {
    auto const& x = sets_[a];
    auto const& y = sets_[b];
    return std::includes(y.begin(), y.end(), x.begin(), x.end());
  };
  for (SetId a : u.family) {
    if (std::none_of(v.family.begin(), v.family.end(),
                     [&](SetId b) { return subset(a, b); })) {
      return false;
    }
  }
  for (SetId b : v.family) {
    if (std::none_of(u.family.begin(), u.family.end(),
                     [&](SetId a) { return subset(a, b); })) {
      return false;
    }
  }
  return true;
}

Configuration ConfigSpace::omega(Configuration const& u,
                                 std::size_t max_steps) {
  if (auto it = omega_.find(u); it != omega_.end()) {
    return it->second;
  }
  // powers u^1, u^2, ... until the first repetition
  std::vector<Configuration> powers{u};
  std::unordered_map<Configuration, std::size_t, ConfigurationHash> seen;
  seen.emplace(u, 1);
  std::size_t index = 0;
  std::size_t period = 0;
  while (true) {
    if (powers.size() > max_steps) {
      throw BudgetExceeded("omega power of a configuration");
    }
    Configuration next = sum(powers.back(), u);
    std::size_t n = powers.size() + 1;
    if (auto it = seen.find(next); it != seen.end()) {
      index = it->second;
      period = n - it->second;
      break;
    }
    seen.emplace(next, n);
    powers.push_back(std::move(next));
  }
  std::size_t m = ((index + period - 1) / period) * period;
  Configuration out = powers[m - 1];
  omega_.emplace(u, out);
  return out;
}

std::vector<ProfileId> const& ConfigSpace::forest_closure(LetterSet bs,
                                                          std::size_t budget) {
  if (auto it = forests_.find(bs); it != forests_.end()) {
    return it->second;
  }
  std::vector<ProfileId> found;
  std::vector<bool> seen;
  auto add = [&](ProfileId id) {
    if (id >= seen.size()) {
      seen.resize(id + 1, false);
    }
    if (!seen[id]) {
      seen[id] = true;
      found.push_back(id);
    }
  };
  for_bits(bs, [&](unsigned c) { add(table_.forest_part(table_.letter(c))); });
  for (std::size_t i = 0; i < found.size(); ++i) {
    ProfileId u = found[i];
    for (std::size_t j = 0; j <= i; ++j) {
      ProfileId w = found[j];
      add(table_.sum(u, w, Keep::Left));
      add(table_.sum(w, u, Keep::Left));
    }
    if (found.size() > budget) {
      throw BudgetExceeded("forest closure of an alphabet");
    }
  }
  return forests_.emplace(bs, std::move(found)).first->second;
}

Configuration ConfigSpace::uplift(LetterSet bs, std::size_t budget) {
  if (auto it = uplift_.find(bs); it != uplift_.end()) {
    return it->second;
  }
  auto forests = forest_closure(bs, budget);
  std::vector<SetId> fam;
  for_bits(bs, [&](unsigned c) {
    ProfileId pc = table_.letter(c);
    std::vector<ProfileId> left{pc};
    for (ProfileId u : forests) {
      left.push_back(table_.sum(u, pc, Keep::Right));
    }
    std::sort(left.begin(), left.end());
    left.erase(std::unique(left.begin(), left.end()), left.end());
    std::vector<ProfileId> member;
    for (ProfileId l : left) {
      LetterSet al = table_.get(l).alphabet;
      if (al == bs) {
        member.push_back(l);
      }
      for (ProfileId w : forests) {
        if ((al | table_.get(w).alphabet) == bs) {
          member.push_back(table_.sum(l, w, Keep::Left));
        }
      }
    }
    if (member.size() > budget) {
      throw BudgetExceeded("uplift member");
    }
    fam.push_back(intern_set(std::move(member)));
  });
  Configuration out = make(std::move(fam));
  uplift_.emplace(bs, out);
  return out;
}

ValidityReport ConfigSpace::validity(Configuration const& u) const {
  return validity_of(table_, profile_union(u));
}

std::string ConfigSpace::dump_set(SetId id) const {
  std::ostringstream out;
  out << "{";
  bool first = true;
  for (ProfileId p : sets_.at(id)) {
    out << (first ? "" : ",") << p;
    first = false;
  }
  out << "}";
  return out.str();
}

std::string ConfigSpace::dump(Configuration const& u) const {
  std::ostringstream out;
  out << table_.letter_set_name(u.alphabet) << " [";
  bool first = true;
  for (SetId s : u.family) {
    out << (first ? "" : " ") << dump_set(s);
    first = false;
  }
  out << "]";
  return out.str();
}

}  // namespace fo2dec
