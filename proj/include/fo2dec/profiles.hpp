// Profiles of shal positions and the profile semigroups +l / +r.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "fo2dec/algebra.hpp"
#include "fo2dec/terms.hpp"

namespace fo2dec {

using HSet = std::uint32_t;       // subset of H, |H| <= 10
using VSet = std::uint64_t;       // subset of V, |V| <= 64
using LetterSet = std::uint64_t;  // subset of shal letters, at most 64

constexpr std::size_t kMaxH = 10;
constexpr std::size_t kMaxV = 64;
constexpr std::size_t kMaxLetters = 64;

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline int popcount(std::uint64_t x) { return __builtin_popcountll(x); }

template <typename F>
void for_bits(std::uint64_t x, F&& f) {
  while (x != 0) {
    int i = __builtin_ctzll(x);
    f(static_cast<unsigned>(i));
    x &= x - 1;
  }
}

struct Profile {
  std::uint8_t arity = 0;  // clamped at 2
  LetterSet alphabet = 0;
  std::vector<HSet> fh;  // indexed by subset G of H
  std::vector<VSet> fv;

  bool operator==(Profile const&) const = default;
  auto operator<=>(Profile const&) const = default;
};

struct ProfileHash {
  std::size_t operator()(Profile const& p) const noexcept;
};

using ProfileId = std::uint32_t;

enum class Keep { Left, Right };

// Set-level operations of a forest algebra on subsets of H and V.
class SetAlgebra {
 public:
  explicit SetAlgebra(ForestAlgebra const& alg);

  std::size_t h_size() const noexcept { return nh_; }
  std::size_t v_size() const noexcept { return nv_; }
  HSet full_h() const noexcept { return static_cast<HSet>((1u << nh_) - 1); }
  std::size_t subsets() const noexcept { return std::size_t{1} << nh_; }

  HSet plus(HSet a, HSet b) const;
  HSet act(VSet v, HSet g) const;
  VSet ins_r(VSet v, HSet g) const;  // {v+g}
  VSet ins_l(HSet g, VSet v) const;  // {g+v}
  VSet times(VSet a, VSet b) const;
  // Least superset of gens closed under product.
  VSet closure(VSet gens) const;

  ForestAlgebra const& algebra() const noexcept { return alg_; }

 private:
  ForestAlgebra const& alg_;
  std::size_t nh_;
  std::size_t nv_;
  std::vector<HSet> plus_table_;  // (a << nh) | b when small
};

Profile letter_profile(LetterId c, ShalAlphabet const& letters,
                       ForestMorphism const& m, SetAlgebra const& sa);
Profile profile_sum(Profile const& u, Profile const& v, Keep keep,
                    SetAlgebra const& sa);

// Interning table for profiles of one morphism, with memoized sums and one
// witness position per profile.
class ProfileTable {
 public:
  explicit ProfileTable(ForestMorphism m);

  ForestMorphism const& morphism() const noexcept { return m_; }
  ShalAlphabet const& letters() const noexcept { return letters_; }
  SetAlgebra const& sets() const noexcept { return sa_; }
  std::size_t letter_count() const noexcept { return letters_.size(); }

  ProfileId intern(Profile p, Shal witness, std::size_t pos);
  Profile const& get(ProfileId id) const { return profiles_.at(id); }
  std::size_t size() const noexcept { return profiles_.size(); }

  ProfileId letter(LetterId c);
  ProfileId sum(ProfileId u, ProfileId v, Keep keep);
  // The same profile with the context mapping cleared (x not a port-node).
  ProfileId forest_part(ProfileId id);

  Shal const& witness_shal(ProfileId id) const { return witness_.at(id).first; }
  std::size_t witness_pos(ProfileId id) const {
    return witness_.at(id).second;
  }

  bool is_port(ProfileId id) const;  // some fv entry nonempty
  std::string dump(ProfileId id) const;
  std::string letter_set_name(LetterSet s) const;

 private:
  ForestMorphism m_;
  ShalAlphabet letters_;
  SetAlgebra sa_;
  std::vector<Profile> profiles_;
  std::vector<std::pair<Shal, std::size_t>> witness_;
  std::unordered_map<Profile, ProfileId, ProfileHash> index_;
  std::vector<std::optional<ProfileId>> letter_ids_;
  std::unordered_map<std::uint64_t, ProfileId> sum_l_;
  std::unordered_map<std::uint64_t, ProfileId> sum_r_;
  std::unordered_map<ProfileId, ProfileId> forest_part_;
};

// Left-to-right fold of letter profiles keeping position pos.
ProfileId shal_profile(ProfileTable& table, Shal const& p, std::size_t pos);

// Profile of (p, pos) computed from the algebra directly: runs over the
// trees of p and tracks reachable partial sums for each G, without using
// profile tables.
Profile semantic_profile(ForestMorphism const& m, ShalAlphabet const& letters,
                         Shal const& p, std::size_t pos);

// Profile of (p, pos) obtained by plugging concrete representative forests of
// each type into the ports and evaluating the resulting terms.
Profile plugged_profile(ForestMorphism const& m, ShalAlphabet const& letters,
                        Shal const& p, std::size_t pos);

// A small forest of each type reachable from the letters (nullopt if none).
std::vector<std::optional<ForestTerm>> representative_forests(
    ForestMorphism const& m);

struct ProfileSet {
  std::map<LetterSet, std::vector<ProfileId>> by_alphabet;
  bool complete = true;  // false if the budget cut the closure short
  std::size_t total() const;
};

// Least set of profiles over the letters in `restrict` containing the letter
// profiles and closed under +l and +r. A nonzero seed shuffles the worklist.
ProfileSet all_profiles(ProfileTable& table, LetterSet restrict,
                        std::size_t budget = 200000, std::uint64_t seed = 0);

}  // namespace fo2dec
