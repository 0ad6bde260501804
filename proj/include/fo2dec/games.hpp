// Oracle side: temporal formulas over forests, Ehrenfeucht-Fraisse games on
// words, shals and forests, and game-based configurations of shals.

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "fo2dec/configurations.hpp"
#include "fo2dec/terms.hpp"

namespace fo2dec {

enum class GameVariant { FO2, S, SNEQ, SUC };

char const* variant_name(GameVariant v);
std::optional<GameVariant> parse_variant(std::string_view s);

////////////////////////////////////////////////////////////////////////
// Formulas
////////////////////////////////////////////////////////////////////////

struct EffFormula {
  enum class Op {
    Label,
    Or,
    And,
    Not,
    EF,     // strict descendant
    Fup,    // strict ancestor
    Fh,     // strict following sibling
    FhInv,  // strict preceding sibling
    S,      // some sibling, the node itself included
    Sneq,   // some other sibling
    Xh,     // next sibling
    XhInv,  // previous sibling
  };
  Op op = Op::Label;
  NodeKind kind = NodeKind::Leaf;  // for Label
  LabelId label = 0;
  std::vector<EffFormula> args;

  bool operator==(EffFormula const&) const = default;
};

// Prefix syntax: label atoms, not(f), and(f, g, ...), or(f, g, ...),
// EF(f), Fup(f), Fh(f), FhInv(f), S(f), Sneq(f), Xh(f), XhInv(f).
EffFormula parse_formula(std::string_view text, Alphabet const& alphabet);
std::string print(EffFormula const& f, Alphabet const& alphabet);
unsigned modal_depth(EffFormula const& f);

// Truth at the first root of the forest.
bool eval_eff(EffFormula const& f, ForestTerm const& s);
// Truth at every node, in all_nodes order.
std::vector<bool> eval_eff_nodes(EffFormula const& f, ForestTerm const& s);

// Random formula with modal depth at most `depth`. With `variants` set the
// sibling modalities of the variant logics are drawn as well.
EffFormula random_formula(std::mt19937_64& rng, Alphabet const& alphabet,
                          unsigned depth, bool variants = false);
ForestTerm random_forest(std::mt19937_64& rng, Alphabet const& alphabet,
                         std::size_t max_nodes);

////////////////////////////////////////////////////////////////////////
// Games
////////////////////////////////////////////////////////////////////////

// k-round two-pebble game on p and q as words, pebbles starting at the
// first letters; moves go strictly left or right with exact labels.
bool word_game_equiv(Shal const& p, Shal const& q, unsigned k);

// Solver for the X-relaxed game on pairs of shals.
class RelaxedGame {
 public:
  RelaxedGame(ForestMorphism const& m, ShalAlphabet const& letters, HSet x,
              GameVariant variant);

  // Row i is the mask of positions j of q such that Duplicator survives k
  // rounds from (i, j); k = nullopt plays without a round limit. Does not
  // apply the alphabet and start-label conditions.
  std::vector<std::uint64_t> solve(Shal const& p, Shal const& q,
                                   std::optional<unsigned> k) const;
  // The full relation: same letter sets, same start letter, and a
  // Duplicator win.
  bool equiv(Shal const& p, std::size_t x, Shal const& q, std::size_t y,
             std::optional<unsigned> k) const;

  // Port-nodes and X-nodes.
  bool blurred(LetterId c) const { return blurred_.at(c); }
  bool consistent(LetterId c, LetterId d) const;

 private:
  ForestMorphism const& m_;
  ShalAlphabet const& letters_;
  GameVariant variant_;
  std::vector<bool> blurred_;
};

bool relaxed_game_equiv(Shal const& p, std::size_t x, Shal const& q,
                        std::size_t y, std::optional<unsigned> k, HSet x_set,
                        ForestMorphism const& m, ShalAlphabet const& letters,
                        GameVariant variant);

// k-round game on forests starting at the first roots, with moves to strict
// descendants, strict ancestors and siblings as allowed by the variant.
// Throws BudgetExceeded if the node-pair count exceeds the budget.
bool forest_game_equiv(ForestTerm const& s, ForestTerm const& t, unsigned k,
                       GameVariant variant = GameVariant::FO2,
                       std::size_t budget = std::size_t{1} << 20);

////////////////////////////////////////////////////////////////////////
// Game configurations
////////////////////////////////////////////////////////////////////////

// For every position y of q, the profiles of all (p', x') with |p'| <=
// len_bound and (q, y) game-equivalent to (p', x').
Configuration gk_configuration(ConfigSpace& space, Shal const& q, unsigned k,
                               HSet x, std::size_t len_bound,
                               GameVariant variant = GameVariant::FO2);

// Letters occurring in p.
LetterSet alphabet_of(Shal const& p);

// All shals up to a length bound with their game configurations, computed
// in one batch.
class GkUniverse {
 public:
  GkUniverse(ConfigSpace& space, unsigned k, HSet x, std::size_t len_bound,
             GameVariant variant = GameVariant::FO2,
             std::optional<LetterSet> letters = std::nullopt);
  // Game classes over the given shals only.
  GkUniverse(ConfigSpace& space, unsigned k, HSet x, std::vector<Shal> shals,
             GameVariant variant = GameVariant::FO2);

  std::vector<Shal> const& shals() const noexcept { return shals_; }
  Configuration const& config(std::size_t i) const { return configs_.at(i); }
  // Member set of position y of shal i.
  SetId position_set(std::size_t i, std::size_t y) const {
    return sets_.at(i).at(y);
  }
  // Some position of shal i is equivalent to some position of shal j.
  bool linked(std::size_t i, std::size_t j) const {
    return linked_.at(i * shals_.size() + j);
  }

 private:
  void build(ConfigSpace& space, unsigned k, HSet x, GameVariant variant);

  std::vector<Shal> shals_;
  std::vector<bool> linked_;
  std::vector<std::vector<SetId>> sets_;
  std::vector<Configuration> configs_;
};

}  // namespace fo2dec
