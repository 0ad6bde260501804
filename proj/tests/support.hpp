// Shared helpers for the test binaries.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fo2dec/algebra.hpp"

namespace fo2dec::test {

inline std::filesystem::path corpus_dir() { return FO2DEC_CORPUS_DIR; }

inline ForestMorphism corpus(std::string const& name) {
  return load_morphism(corpus_dir() / (name + ".alg"));
}

struct AlgebraFacts {
  char const* name;
  std::size_t h;
  std::size_t v;
  std::size_t quotient_h;
  std::size_t quotient_v;
  bool eqh;
  bool eqv;
  bool efh;
  bool efhs;
  bool succ;
};

struct MembershipCase {
  char const* algebra;
  char const* forest;
  bool member;
};

struct WordGameCase {
  char const* p;
  char const* q;
  unsigned k;
  bool equiv;
};

struct ForestGameCase {
  char const* s;
  char const* t;
  unsigned k;
  bool equiv;
};

#include "golden/oracle_values.inc"

}  // namespace fo2dec::test
