// The Sat[X] fixpoint, saturated context types, profile saturation, the
// variant configurations and the top-level decision procedure.

#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fo2dec/configurations.hpp"
#include "fo2dec/games.hpp"
#include "fo2dec/identities.hpp"

namespace fo2dec {

struct SatOptions {
  std::size_t budget = 20000;  // cap on Sat elements per X
  std::size_t steps = 0;       // pair operations; 0 means 200 * budget
  std::size_t max_union = 3;   // seed size in the union search
  bool prune_leq = false;      // drop elements equivalent under the preorder
  std::uint64_t seed = 0;      // nonzero shuffles the worklists
};

// How an element of Sat[X] was first produced.
struct SatDerivation {
  enum class Rule { Letter, Sum, Padded };
  Rule rule = Rule::Letter;
  LetterId letter = 0;     // Letter
  std::size_t left = 0;    // Sum, Padded
  std::size_t right = 0;   // Sum, Padded
  LetterSet middle = 0;    // Padded: omega(left) + uplift(middle) + omega(right)
};

struct SatState {
  HSet x = 0;
  std::vector<Configuration> elements;
  std::vector<std::string> trace;  // rule that produced each element
  std::vector<SatDerivation> derivations;
  bool complete = false;           // closed under both rules
  unsigned generations = 0;
};

std::vector<Configuration> initial_configs(ConfigSpace& space);

// Called after every closure step with the current state; returning true
// stops the fixpoint early.
using SatObserver = std::function<bool(SatState const&)>;

// Least set containing the letter configurations closed under sums and
// under omega(U) + uplift(Bs) + omega(U') for X-approximating pairs. Stops
// with complete = false when the budget is hit or the observer asks to.
SatState sat_fixpoint(ConfigSpace& space, HSet x, SatOptions const& opts,
                      SatObserver const& observer = {});

struct SaturatedResult {
  VSet elements = 0;
  // One factorization over the valid context types per element.
  std::vector<std::vector<Elem>> factorization;  // indexed by element
};

// Context types v = v1...vn with all vj valid that meet every member
// without a non-port profile. validity(u).valid_h must equal x.
SaturatedResult saturated_elements(ConfigSpace const& space,
                                   Configuration const& u, HSet x);

struct SaturationWitness {
  HSet x = 0;
  Configuration configuration;
  std::vector<Elem> factorization;
  Elem v = 0;
  Elem h1 = 0;
  Elem h2 = 0;
};

struct UnionSearchStats {
  std::size_t candidates = 0;
  std::size_t signatures = 0;
  std::size_t seeds = 0;
  bool exact = true;  // all requirement signatures fit in one seed
};

// Looks for an X-compatible union of elements below the given ones with a
// saturated v such that v^omega separates two elements of X.
std::optional<SaturationWitness> find_violation(
    ConfigSpace& space, HSet x, std::vector<Configuration> const& elements,
    std::size_t max_union, UnionSearchStats* stats = nullptr);

// Cheap necessary conditions for a violation at X.
bool x_may_violate(ForestAlgebra const& alg, HSet x);

// Self-contained saturation witness: profiles are given by representative
// shal positions over the leaf-completed syntactic alphabet.
struct WitnessRecord {
  std::vector<std::string> x;
  std::vector<std::vector<std::pair<std::string, std::size_t>>> family;
  std::vector<std::string> configuration_dump;
  std::vector<std::string> factorization;
  std::string v;
  std::string h1;
  std::string h2;
};

struct SaturationResult {
  std::optional<SaturationWitness> witness;  // set ids are internal; see record
  std::optional<WitnessRecord> record;
  bool complete = true;  // every X checked exhaustively
  bool exact = true;     // union search never hit max_union
  std::size_t sat_elements = 0;
  std::vector<std::string> notes;
};

SaturationResult check_profile_saturation(ProfileTable& table,
                                          SatOptions const& opts,
                                          unsigned threads = 1);

// Relevant configurations of the variant games, one per class of shals.
// Variant S: alphabet and position label. Variant SNEQ: additionally the
// letter counts up to two, pooled over port and X-nodes of one inner label
// when the port letter occurs.
std::vector<Configuration> variant_relevant_configs(ConfigSpace& space,
                                                    HSet x, GameVariant v,
                                                    std::size_t budget);

// Class key of a shal position under the variant (used for oracle checks).
std::string variant_key(Shal const& p, std::size_t pos, HSet x,
                        GameVariant v, ForestMorphism const& m,
                        ShalAlphabet const& letters);

SaturationResult check_variant_saturation(ProfileTable& table, Logic logic,
                                          SatOptions const& opts);

////////////////////////////////////////////////////////////////////////
// Decision
////////////////////////////////////////////////////////////////////////

enum class Outcome { Definable, NotDefinable, Inconclusive };
enum class FailedCondition {
  None,
  IdentityH,
  IdentityV,
  VariantIdentity,
  Saturation
};

char const* outcome_name(Outcome o);
char const* condition_name(FailedCondition c);

struct Verdict {
  Outcome outcome = Outcome::Definable;
  FailedCondition failed = FailedCondition::None;
  Logic logic = Logic::FO2;
  std::vector<IdentityReport> identities;  // all identity checks run
  std::optional<IdentityReport> identity_witness;
  std::optional<WitnessRecord> witness;  // also set next to an identity
                                         // failure in all-conditions mode
  std::vector<std::string> notes;
  std::size_t budget = 0;
  std::size_t max_union = 0;
  bool exact = true;
  std::size_t quotient_h = 0;
  std::size_t quotient_v = 0;
  std::vector<std::pair<std::string, double>> timings;  // seconds
};

struct DecideOptions {
  Logic logic = Logic::FO2;
  SatOptions sat;
  unsigned threads = 1;
  // Keep going after a failed identity and attach any saturation witness.
  bool all_conditions = false;
};

// Syntactic quotient and leaf completion, as used by decide and verify.
ForestMorphism decision_morphism(ForestMorphism const& m);

Verdict decide(ForestMorphism const& m, DecideOptions const& opts);

WitnessRecord make_record(ProfileTable const& table, ConfigSpace const& space,
                          SaturationWitness const& w);

struct VerifyResult {
  bool ok = false;
  std::string message;
};

// Re-checks a verdict from scratch against the original morphism.
VerifyResult verify(ForestMorphism const& m, Verdict const& v);

}  // namespace fo2dec
