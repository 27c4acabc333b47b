#pragma once

#include <string>
#include <vector>

#include "toric/fan.hpp"
#include "toric/zmat.hpp"

namespace toric {

// Result of testing a nonsingular lattice map against a fan: either the
// induced permutation of cone ids, or the first cone whose image escapes.
struct Compatibility {
  bool ok = false;
  std::vector<int> perm;  // perm[id-1] = image cone id (relint to relint)
  int offending_cone = 0;
};

Compatibility is_compatible(const Fan& fan, const ZMat& phi);

// phi = n * phi0 with content(phi0) = 1 and n = gcd of all entries.
std::pair<ZZ, ZMat> decompose_primitive(const ZMat& phi);

// The group of primitive fan-compatible maps found by extending ray
// bijections linearly. When the 1-cone rays do not span, the search space
// collapses and the scalar family {nI} is used instead (fallback).
struct SymmetryData {
  std::vector<ZMat> elements;                // canonical (row-major lex) order
  std::vector<ZZ> dets;
  std::vector<std::vector<int>> cone_perms;  // aligned with elements
  bool is_unimodular = true;
  bool splits = false;   // true when elements form a group in GL_d(Z) and rays span
  bool fallback = false; // rays do not span R^d; elements = {identity}
  int identity_index = -1;

  int order() const { return int(elements.size()); }
  std::vector<int> stabilizer(int cone_id) const;  // indices of elements fixing the cone
  int perm_of(int elem_index, int cone_id) const { return cone_perms[elem_index][cone_id - 1]; }
  std::string to_json_text() const;
};

SymmetryData enumerate_G(const Fan& fan, int max_rays = 8);

}  // namespace toric
