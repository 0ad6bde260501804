// Oracle cross-checks between the abstract machinery and term semantics.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fo2dec/saturation.hpp"

namespace fo2dec {

struct ProfileValidation {
  std::size_t positions = 0;
  std::size_t mismatches = 0;
  std::vector<std::string> counterexamples;  // first few only
  bool ok() const { return mismatches == 0; }
};

// Compares the folded profile, the semantic profile and (if `plugged`) the
// plug-in profile at every position of every shal of length <= max_len over
// the given letters (all letters if none given).
ProfileValidation validate_profiles(ForestMorphism const& m,
                                    std::size_t max_len,
                                    std::optional<std::vector<LetterId>> letters,
                                    bool plugged = true);

struct PropAlgoCase {
  HSet x = 0;
  std::string x_name;
  std::size_t sat_elements = 0;
  bool sat_complete = false;
  std::size_t shals = 0;
  std::size_t not_below = 0;   // game configurations outside the downset
  std::size_t by_derivation = 0;  // witnessed only by derivation shals
  std::size_t unverified = 0;     // Sat elements without any witness
  std::vector<std::string> counterexamples;
};

struct PropAlgoReport {
  unsigned k = 0;
  std::size_t len_bound = 0;
  std::vector<PropAlgoCase> cases;
  bool ok() const;
};

// The round count used for a morphism: 2|letters|^2 (profiles + 1), capped.
unsigned prop_algo_rounds(std::size_t letters, std::size_t profiles,
                          unsigned cap = 6);

// For every X: each game configuration of a shal of length <= len_bound
// lies below some Sat[X] element, and each Sat[X] element lies below the
// game configuration of some such shal. Elements without a short witness
// get a second chance: the shals spelled out by their derivation, with
// omega powers padded to at least k copies, must be pairwise linked and
// their combined game configuration must lie above the element. Runs on m
// as given.
PropAlgoReport validate_prop_algo(ForestMorphism const& m,
                                  std::optional<unsigned> k,
                                  std::size_t len_bound,
                                  SatOptions const& opts);

}  // namespace fo2dec
