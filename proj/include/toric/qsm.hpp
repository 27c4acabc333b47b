#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "toric/spectral.hpp"

namespace toric {

// Riemann zeta for real beta >= 1.05, absolute error <= 1e-12, via the
// accelerated alternating (eta) series.
double riemann_zeta(double beta);

enum class PartitionMode { Additive, Multiplicative, Factored };
enum class IndexMonoid { Z, N };

std::string mode_name(PartitionMode m);

struct PartitionResult {
  double beta = 0;
  PartitionMode mode = PartitionMode::Additive;
  double value = 0;
  double tail_bound = 0;
  std::int64_t radius = 0;
  int m = 0;        // all cones
  int m_prime = 0;  // cones with positive quotient rank
  std::string to_json_text() const;
};

// Exact truncated spectral sums over sup-norm shells; deterministic
// summation order independent of the worker count.
PartitionResult partition(const Fan& fan, const EnergyLaw& law, const SymmetryData* sym, double beta,
                          std::int64_t radius, PartitionMode mode, int threads = 1);

// One shell-ordered lattice block: sum of term(xi) over 0 < |xi| <= radius
// in Z^dim (or the nonnegative orthant). Returns per-shell sums.
std::vector<double> shell_sums(int dim, std::int64_t radius, IndexMonoid monoid,
                               const std::function<double(const IVec&)>& term, int threads);

// Integral-comparison bound on the mass beyond the box, for energies with
// h(xi) >= kappa |xi|_inf^c. Throws on c*beta <= dim.
double spectral_tail_bound(int dim, double c, double beta, double kappa, std::int64_t radius,
                           IndexMonoid monoid);

// Torsion data: one rational vector mod 1 per cone, in the dual-basis
// coordinates of the cone's quotient lattice.
struct TorsionVec {
  std::int64_t den = 1;
  IVec num;  // reduced into [0, den)
  void reduce();
};
struct TorsionTuple {
  std::vector<TorsionVec> comps;  // ordered by cone id
};

TorsionTuple torsion_zero(const Fan& fan, std::int64_t den = 1);
TorsionTuple torsion_from_json_text(const Fan& fan, const std::string& text);
std::string torsion_to_json_text(const TorsionTuple& r);
TorsionTuple torsion_negate(const TorsionTuple& r);

// Unit action gamma on the torsion labels: componentwise multiplication by
// units mod the denominator. `units` has one entry per cone (or a single
// broadcast entry). Throws DomainError if some entry is not a unit.
TorsionTuple apply_symmetry(const TorsionTuple& r, const std::vector<std::int64_t>& units);

struct GibbsValue {
  std::complex<double> value;
  double normalization = 0;  // the truncated partition sum used
  double tail_bound = 0;     // shared bound for numerator and denominator truncation
  std::int64_t radius = 0;
  double beta = 0;
  std::string r_json;  // the torsion tuple evaluated
  std::string to_json_text() const;
};

GibbsValue gibbs_state(const Fan& fan, const EnergyLaw& law, const TorsionTuple& r, double beta,
                       std::int64_t radius, PartitionMode mode = PartitionMode::Additive,
                       int threads = 1);

struct ConvergenceInfo {
  double beta_g = 0;
  std::vector<std::pair<int, double>> per_cone;  // (cone id, d_k / c)
  double overall = 0;
  std::string to_json_text() const;
};
ConvergenceInfo convergence_threshold(const Fan& fan, const EnergyLaw& law);

// CSV sweep over beta: header "beta,value,tail_bound".
std::string sweep_csv(const Fan& fan, const EnergyLaw& law, const SymmetryData* sym, double beta_start,
                      double beta_stop, double beta_step, std::int64_t radius, PartitionMode mode,
                      int threads = 1);

// Disjoint tori with NormPower-type energies on Z^{d_j} (or N^{d_j}).
struct TorifiedComponent {
  int dim = 0;
  GramQ gram;  // ignored when dim == 0
};
PartitionResult torified_partition(const std::vector<TorifiedComponent>& comps, double c, double beta,
                                   std::int64_t radius, PartitionMode mode, IndexMonoid monoid,
                                   int threads = 1);

}  // namespace toric
