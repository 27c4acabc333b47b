#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "toric/spectral.hpp"

namespace toric {

bool is_prime_u64(std::uint64_t n);

// An element of Z[(Z/n)^rho]: sparse integer-coefficient function on the
// group, with exact (GMP) coefficients.
class GroupAlgebraElement {
 public:
  GroupAlgebraElement() = default;
  GroupAlgebraElement(std::int64_t n, int rho);
  static GroupAlgebraElement basis(std::int64_t n, int rho, IVec idx);
  static GroupAlgebraElement from_json_text(const std::string& text);
  std::string to_json_text() const;

  std::int64_t modulus() const { return n_; }
  int rank() const { return rho_; }
  const std::map<IVec, ZZ>& terms() const { return terms_; }
  std::size_t support_size() const { return terms_.size(); }

  void add_term(IVec idx, const ZZ& coeff);
  GroupAlgebraElement operator+(const GroupAlgebraElement& o) const;
  GroupAlgebraElement operator-(const GroupAlgebraElement& o) const;
  GroupAlgebraElement operator*(const GroupAlgebraElement& o) const;  // convolution
  GroupAlgebraElement pow(unsigned e) const;
  bool operator==(const GroupAlgebraElement& o) const;

 private:
  void check_same(const GroupAlgebraElement& o) const;
  std::int64_t n_ = 1;
  int rho_ = 0;
  std::map<IVec, ZZ> terms_;
};

// The N-action on the group algebra: linear extension of e_r -> e_{p r}.
GroupAlgebraElement frobenius_endo(std::int64_t p, const GroupAlgebraElement& a);

struct LiftCheck {
  bool ok = true;
  IVec witness_index;
  ZZ witness_coeff;
};
// a^p - frobenius_endo(p, a) must lie in p * Z[(Z/n)^rho].
LiftCheck check_frobenius_lift(std::int64_t p, const GroupAlgebraElement& a);

struct LevelCounts {
  ZZ additive;        // sum over cones of n^{d_k}
  ZZ multiplicative;  // product over cones of n^{d_k}
};
LevelCounts cyclotomic_level_count(const Fan& fan, std::int64_t n);

struct TransitionCheck {
  bool surjective = true;
  bool equivariant = true;
  std::int64_t points_checked = 0;
};
// The reduction from level t*n to level n (multiplication by t on the
// rational torsion labels), verified pointwise on the full finite level
// sets and against the quotient-level semigroup action (scalar maps, plus
// the symmetry group when provided).
TransitionCheck transition_map_check(const Fan& fan, std::int64_t n, std::int64_t t,
                                     const SymmetryData* sym = nullptr,
                                     std::int64_t enumeration_cap = 1 << 22);

// The homogeneous-coordinate presentation of projective-space level sets:
// classes in (Z/L)^{d+1} mod the diagonal, with transitions induced by
// raising coordinates to powers. Checks that the standard identification
// with (Z/L)^d commutes with both transitions.
bool projective_level_model_check(int d, std::int64_t n, std::int64_t t,
                                  std::int64_t enumeration_cap = 1 << 22);

struct FrobeniusSuite {
  bool ok = true;
  std::int64_t exhaustive_checked = 0;
  std::int64_t random_checked = 0;
  std::string witness;  // JSON of the failing (p, element), empty when clean
};
// Exhaustive lift check over all 1- and 2-term elements with coefficients
// in {-2,-1,1,2} for n <= n_max, rho <= rho_max and the given primes,
// followed by a battery of random larger elements.
FrobeniusSuite frobenius_suite(std::int64_t n_max, int rho_max, const std::vector<std::int64_t>& primes,
                               int random_trials, std::uint64_t seed);

}  // namespace toric
