#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "toric/fan.hpp"

namespace toric {

// A rational projective point in canonical form: coprime integer
// homogeneous coordinates, first nonzero coordinate positive.
struct ProjPoint {
  std::vector<ZZ> x;
  bool operator==(const ProjPoint& o) const { return x == o.x; }
  bool operator<(const ProjPoint& o) const { return x < o.x; }
  std::string str() const;
};

ProjPoint proj_point(std::vector<ZZ> coords);
ProjPoint proj_point(const std::vector<QQ>& coords);

struct HeightValue {
  ZZ H;      // max |x_i| on the canonical representative
  double h;  // log H, exact to double rounding
};
HeightValue height_proj(const ProjPoint& p);
HeightValue height_affine(const std::vector<QQ>& coords);  // the point (1 : x_1 : ... : x_d)

double log_of(const ZZ& z);

// A semigroup element of projective space in coordinate form: permute the
// homogeneous coordinates by tau, then raise them to the n-th power.
struct PdMap {
  std::int64_t n = 1;
  std::vector<int> tau;  // image position of each coordinate
};
ProjPoint apply_pd(const PdMap& m, const ProjPoint& p);
// Exact check of H(phi x) = H(x)^n.
bool height_scaling_holds(const PdMap& m, const ProjPoint& p);

// The coordinate permutation of a primitive symmetry matrix of the
// projective fan, read off from its action on the rays.
std::vector<int> coordinate_permutation(int d, const ZMat& phi0);

// All points of P^d(Q) with H <= max_H, canonical, lex-sorted.
std::vector<ProjPoint> enumerate_bounded_height(int d, std::int64_t max_H,
                                                std::int64_t cap = 5'000'000);

// Monomial family attached to a base point with nonzero rational
// coordinates x_0..x_l and a nontorsion alpha: the points
// (alpha^{k_0} x_0^{k'_0} : ... : alpha^{k_l} x_l^{k'_l}), with the
// alpha-exponents taken mod the diagonal (k_0 is normalized to 0).
struct MonomialPoint {
  QQ alpha;
  std::vector<QQ> coords;    // length d+1; zeros allowed and tracked
  std::vector<int> support;  // indices of the nonzero coordinates
  static MonomialPoint make(const QQ& alpha, std::vector<QQ> coords);
};

struct FamilyElement {
  IVec k;   // alpha exponents on the support, k[0] == 0
  IVec kp;  // coordinate exponents on the support
  ProjPoint point;
  ZZ H;
  double h;
};
// Enumerates all exponent tuples with sup norm <= radius, as a multiset:
// distinct tuples are reported even when they give one projective point.
void b_family_iter(const MonomialPoint& mp, std::int64_t radius,
                   const std::function<void(const FamilyElement&)>& fn);

struct HeightZeta {
  double value = 0;
  std::int64_t terms = 0;
  std::int64_t excluded_zero = 0;  // elements with h = 0, kept out of the sum
  double min_h = 0;                // smallest positive height seen
  double tail_bound = -1;          // rigorous bound when available, else -1
  std::string tail_note;
  std::string to_json_text(double beta) const;
};
HeightZeta height_zeta_family(const MonomialPoint& mp, double beta, std::int64_t radius);
HeightZeta height_zeta_points(const std::vector<ProjPoint>& pts, double beta);
// The geometric family (1 : b^k), k = 1..kmax, summed exactly.
HeightZeta height_zeta_geometric(const ZZ& b, std::int64_t kmax, double beta);

struct ScalingSuite {
  bool ok = true;
  int trials = 0;
  std::string counterexample;
};
// Random (phi, x) battery of the exact scaling law H(phi x) = H(x)^n on P^d.
ScalingSuite height_scaling_suite(int d, int trials, std::uint64_t seed);

// CSV stream of a monomial family: k, k', h, and H with the decimal
// representation elided once it exceeds the digit cap.
std::string family_csv(const MonomialPoint& mp, std::int64_t radius, int max_digits = 40);

}  // namespace toric
