// The configuration semigroup over profile sets, its preorder, omega powers,
// uplift of alphabets, X-approximations and validity analysis.

#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fo2dec/profiles.hpp"

namespace fo2dec {

using SetId = std::uint32_t;

// A family of interned profile sets. Family sorted and deduplicated.
struct Configuration {
  LetterSet alphabet = 0;
  std::vector<SetId> family;

  bool empty() const noexcept { return family.empty(); }
  bool operator==(Configuration const&) const = default;
  auto operator<=>(Configuration const&) const = default;
};

struct ConfigurationHash {
  std::size_t operator()(Configuration const& c) const noexcept;
};

struct ValidityReport {
  HSet valid_h = 0;
  VSet valid_v = 0;  // product closure of the context mappings on valid_h
  bool branching = false;
  bool reduced = false;  // valid_h is one mutual-reachability class
  std::optional<HSet> max_class;  // present iff branching
};

// Validity of the union of the given profiles.
ValidityReport validity_of(ProfileTable const& table,
                           std::vector<ProfileId> const& profiles);

bool label_equiv(LetterId c, LetterId d, LetterSet bs, HSet x,
                 ForestMorphism const& m, ShalAlphabet const& letters);
bool is_x_approximation(LetterSet cs, LetterSet bs, HSet x,
                        ForestMorphism const& m, ShalAlphabet const& letters);

// Owns interned profile sets and the operations on configurations of one
// profile table.
class ConfigSpace {
 public:
  explicit ConfigSpace(ProfileTable& table);

  ProfileTable& profiles() noexcept { return table_; }
  ProfileTable const& profiles() const noexcept { return table_; }

  SetId intern_set(std::vector<ProfileId> s);
  std::vector<ProfileId> const& set(SetId id) const { return sets_.at(id); }
  std::size_t set_count() const noexcept { return sets_.size(); }
  // All-pairs sums.
  SetId set_sum(SetId a, SetId b, Keep keep);

  Configuration make(std::vector<SetId> family) const;
  Configuration letter_config(LetterId c);
  // The profiles occurring in any member.
  std::vector<ProfileId> profile_union(Configuration const& u) const;
  Configuration unite(Configuration const& u, Configuration const& v) const;

  Configuration sum(Configuration const& u, Configuration const& v);
  bool leq(Configuration const& u, Configuration const& v) const;
  // Idempotent power; throws BudgetExceeded after max_steps sums.
  Configuration omega(Configuration const& u, std::size_t max_steps = 4096);
  // One member per letter of bs: profiles of positions with that letter in
  // shals whose alphabet is exactly bs. Empty if bs is empty.
  Configuration uplift(LetterSet bs, std::size_t budget = 2000000);

  ValidityReport validity(Configuration const& u) const;

  std::string dump_set(SetId id) const;
  std::string dump(Configuration const& u) const;

 private:
  struct VecHash {
    std::size_t operator()(std::vector<ProfileId> const& v) const noexcept;
  };

  ProfileTable& table_;
  std::vector<std::vector<ProfileId>> sets_;
  std::unordered_map<std::vector<ProfileId>, SetId, VecHash> set_index_;
  std::unordered_map<std::uint64_t, SetId> sum_l_;
  std::unordered_map<std::uint64_t, SetId> sum_r_;
  std::unordered_map<Configuration, Configuration, ConfigurationHash> omega_;
  std::map<LetterSet, Configuration> uplift_;
  std::map<LetterSet, std::vector<ProfileId>> forests_;  // forest parts

  std::vector<ProfileId> const& forest_closure(LetterSet bs,
                                               std::size_t budget);
};

}  // namespace fo2dec
