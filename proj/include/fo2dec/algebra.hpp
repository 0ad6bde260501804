// Finite forest algebras and morphisms from the free forest algebra.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fo2dec/terms.hpp"

namespace fo2dec {

using Elem = std::uint32_t;

class AlgebraError : public std::runtime_error {
 public:
  enum class Kind {
    Parse,
    NotTotal,
    Duplicate,
    UnknownSymbol,
    Associativity,
    ActionAxiom,
    InsertAxiom,
    BadAccept,
    TooLarge,
  };

  AlgebraError(Kind kind, std::string const& msg,
               std::vector<std::string> witness = {})
      : std::runtime_error(msg), kind_(kind), witness_(std::move(witness)) {}

  Kind kind() const noexcept { return kind_; }
  // Element names of the offending instance, e.g. {w, v, h}.
  std::vector<std::string> const& witness() const noexcept { return witness_; }

 private:
  Kind kind_;
  std::vector<std::string> witness_;
};

class FiniteSemigroup {
 public:
  FiniteSemigroup() = default;
  FiniteSemigroup(std::vector<std::string> names, std::vector<Elem> table);

  std::size_t size() const noexcept { return names_.size(); }
  Elem mul(Elem a, Elem b) const { return table_[a * names_.size() + b]; }
  std::string const& name(Elem e) const { return names_.at(e); }
  std::vector<std::string> const& names() const noexcept { return names_; }
  std::vector<Elem> const& table() const noexcept { return table_; }
  std::optional<Elem> find(std::string_view name) const;

  // Returns a violating triple if the operation is not associative.
  std::optional<std::array<Elem, 3>> associativity_violation() const;

  bool operator==(FiniteSemigroup const&) const = default;

 private:
  std::vector<std::string> names_;
  std::vector<Elem> table_;
};

struct ForestAlgebra {
  FiniteSemigroup H;  // written additively
  FiniteSemigroup V;  // written multiplicatively
  std::vector<Elem> action;    // |V| x |H|
  std::vector<Elem> insert_l;  // |H| x |V|: g + v
  std::vector<Elem> insert_r;  // |V| x |H|: v + g

  Elem plus(Elem h, Elem g) const { return H.mul(h, g); }
  Elem times(Elem v, Elem w) const { return V.mul(v, w); }
  Elem act(Elem v, Elem h) const { return action[v * H.size() + h]; }
  Elem ins_l(Elem g, Elem v) const { return insert_l[g * V.size() + v]; }
  Elem ins_r(Elem v, Elem g) const { return insert_r[v * H.size() + g]; }

  bool operator==(ForestAlgebra const&) const = default;
};

struct ForestMorphism {
  ForestAlgebra algebra;
  Alphabet alphabet;
  std::vector<Elem> leaf_image;   // indexed by leaf label
  std::vector<Elem> inner_image;  // indexed by inner label: type of b([])
  std::vector<bool> accepting;    // indexed by H element

  std::size_t h_size() const { return algebra.H.size(); }
  std::size_t v_size() const { return algebra.V.size(); }
};

// Exhaustively checks associativity, the action law and both insert laws.
void validate(ForestMorphism const& m);

ForestMorphism parse_morphism(std::string_view text);
ForestMorphism load_morphism(std::filesystem::path const& file);
std::string write_morphism(ForestMorphism const& m);

Elem eval_trees(ForestMorphism const& m, std::vector<Node> const& trees);
Elem eval_forest(ForestMorphism const& m, ForestTerm const& f);
Elem eval_context(ForestMorphism const& m, ContextTerm const& c);
bool accepts(ForestMorphism const& m, ForestTerm const& f);

struct OmegaData {
  unsigned exponent = 1;         // least n >= 1 with x^2n = x^n for all x
  std::vector<Elem> idempotent;  // x -> x^omega
};

OmegaData omega_data(FiniteSemigroup const& s);
unsigned omega_exponent(FiniteSemigroup const& s);
Elem power(FiniteSemigroup const& s, Elem x, unsigned n);

// Adds one fresh leaf per H element, mapped to that element. Fresh names are
// "h_<element>", suffixed with underscores when that clashes.
ForestMorphism leaf_completion(ForestMorphism const& m);

}  // namespace fo2dec
