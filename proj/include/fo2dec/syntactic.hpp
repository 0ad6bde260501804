// Syntactic forest algebra of the language recognized by a morphism.

#pragma once

#include <optional>
#include <vector>

#include "fo2dec/algebra.hpp"

namespace fo2dec {

struct SyntacticResult {
  ForestMorphism quotient;
  // Class of each original element; nullopt for elements outside the image
  // of the morphism.
  std::vector<std::optional<Elem>> h_class;
  std::vector<std::optional<Elem>> v_class;
  unsigned rounds = 0;  // refinement rounds until stable
};

// Restricts to the image subalgebra, then computes the coarsest congruence
// that is compatible with every operation and refines acceptance. Each class
// is named after its first member.
SyntacticResult syntactic_quotient(ForestMorphism const& m);

// Elements of H and V reachable from the letter images.
struct ImageSets {
  std::vector<bool> h;
  std::vector<bool> v;
};
ImageSets morphism_image(ForestMorphism const& m);

}  // namespace fo2dec
