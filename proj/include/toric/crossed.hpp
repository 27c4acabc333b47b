#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "toric/qsm.hpp"
#include "toric/spectral.hpp"

namespace toric {

enum class RepMode { Additive, Multiplicative };

// A compatible lattice map prepared for use on the truncated
// representation: its cone permutation, the induced quotient-level maps,
// and their exact inverses (as integer matrix / determinant pairs).
struct MapAction {
  ZMat phi;
  std::vector<int> perm;        // perm[index] = image cone id
  std::vector<int> perm_inv;    // perm_inv[index] = source cone id
  std::vector<Mat64> quotient;  // per cone index: N/N_k -> N/N_{perm(k)}
  std::vector<ZMat> inv_num;    // adjugate-style inverse numerators
  std::vector<ZZ> inv_den;      // matching determinants
  ZZ det_full;
  std::int64_t content_n = 1;

  static MapAction build(const Fan& fan, const ZMat& phi);
};

// Finite box truncation of the Hilbert space: for each cone, the quotient
// lattice points of sup-norm <= radius index basis vectors. Additive mode
// takes the disjoint union over cones, multiplicative mode the product.
class TruncatedRep {
 public:
  TruncatedRep(const Fan& fan, RepMode mode, std::int64_t radius,
               std::size_t basis_cap = std::size_t(1) << 22);

  const Fan& fan() const { return *fan_; }
  RepMode mode() const { return mode_; }
  std::int64_t radius() const { return radius_; }
  std::size_t basis_size() const { return basis_size_; }
  int num_cones() const { return int(box_sizes_.size()); }

  // Additive labels: (cone index, lattice point). Multiplicative labels:
  // one lattice point per cone.
  void each_additive(const std::function<void(int, const IVec&)>& fn) const;
  void each_multiplicative(const std::function<void(const std::vector<IVec>&)>& fn) const;

  std::size_t additive_index(int cone_index, const IVec& xi) const;
  std::size_t multiplicative_index(const std::vector<IVec>& xs) const;
  bool in_box(const IVec& xi) const;

 private:
  const Fan* fan_;
  RepMode mode_;
  std::int64_t radius_;
  std::vector<std::size_t> box_sizes_;   // per cone
  std::vector<std::size_t> offsets_;     // additive block offsets
  std::size_t basis_size_ = 0;
};

using Amplitudes = std::vector<std::complex<double>>;

// Diagonal phase action of the group-algebra generator e(r).
Amplitudes apply_e(const TruncatedRep& rep, const TorsionTuple& r, const Amplitudes& v);

struct MuResult {
  Amplitudes v;
  std::vector<std::size_t> out_of_box;  // source indices whose image left the box
};
MuResult apply_mu(const TruncatedRep& rep, const MapAction& act, const Amplitudes& v);
Amplitudes apply_mu_star(const TruncatedRep& rep, const MapAction& act, const Amplitudes& v);

// The action of the semigroup on torsion labels: the tuple r' with
// e(r') = mu* e(r) mu.
TorsionTuple act_on_torsion(const Fan& fan, const MapAction& act, const TorsionTuple& r);

struct RelationReport {
  std::string relation;
  double coverage = 0;      // asserted / basis size
  double max_deviation = 0;
  std::int64_t asserted = 0;
  std::int64_t excluded = 0;
  std::string counterexample;  // empty when clean
  std::string extra_json;      // relation-specific diagnostics
  std::string to_json_text() const;
};

// e(phi.r) = mu* e(r) mu, on every basis vector.
RelationReport check_conjugation(const TruncatedRep& rep, const MapAction& act, const TorsionTuple& r);

// mu e(r) mu* = (1/K) sum_{phi.s = r} e(s), with K the exact solution
// count; logs K against |det phi|^lambda and an annihilation witness.
RelationReport check_transfer(const TruncatedRep& rep, const MapAction& act, const TorsionTuple& r);

// e^{itH} mu e^{-itH} = g(phi)^{i lambda t} mu and e^{itH} e(r) e^{-itH} = e(r),
// with H the diagonal log-energy operator. lambda = 1 (additive) or the
// number of positive-rank cones (multiplicative).
RelationReport check_covariance(const TruncatedRep& rep, const MapAction& act, double t,
                                const EnergyLaw& law, const TorsionTuple& r);

// Solutions s of A^T s = r at torsion level: denominators and numerators.
std::vector<TorsionVec> torsion_preimages(const ZMat& a, const TorsionVec& r);

}  // namespace toric
