#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "toric/fan.hpp"
#include "toric/symmetry.hpp"

namespace toric {

// Small dense int64 matrix for evaluation-side quotient maps.
struct Mat64 {
  int rows = 0, cols = 0;
  std::vector<std::int64_t> a;
  Mat64() = default;
  Mat64(int r, int c) : rows(r), cols(c), a(size_t(r) * size_t(c)) {}
  std::int64_t& at(int i, int j) { return a[size_t(i) * cols + j]; }
  std::int64_t at(int i, int j) const { return a[size_t(i) * cols + j]; }
  IVec apply(const IVec& x) const;
  static Mat64 from_zmat(const ZMat& m);
};

std::int64_t gcd_abs(const IVec& v);  // 0 for the zero vector
std::int64_t sup_norm(const IVec& v);

// Rational symmetric Gram matrix Q = num / den.
struct GramQ {
  ZMat num;
  ZZ den = 1;
  bool positive_definite() const;
  // Exact quadratic form value as a rational, then converted.
  double eval(const IVec& xi) const;
  QQ eval_exact(const IVec& xi) const;
};

// Certified positive lower bound on the smallest eigenvalue: Gershgorin
// when it is positive, a deflated Jacobi estimate otherwise.
double gram_lambda_floor(const GramQ& q);

// Energy data on the quotient lattices: a scaling exponent c together with
// either per-cone Gram forms (h = q(xi)^{c/2}) or tables of base values on
// primitive vectors extended by h(n xi*) = n^c h(xi*).
class EnergyLaw {
 public:
  enum class Kind { OrbitTable, NormPower };

  struct Table {
    std::int64_t radius = 0;
    std::map<IVec, double> base;          // keyed by canonical orbit representative
    std::vector<Mat64> g1;                // stabilizer action on the quotient
    double kappa = 0;                     // growth floor over the stored box
    IVec canonical(const IVec& xi_prim) const;
  };

  static EnergyLaw norm_power(const Fan& fan, double c, std::map<int, GramQ> grams);
  static EnergyLaw norm_power_uniform(const Fan& fan, double c);
  static EnergyLaw orbit_table(const Fan& fan, const SymmetryData& sym, double c, std::int64_t radius,
                               const std::vector<std::tuple<int, IVec, double>>& entries);
  // Base values sampled from G1-invariant Gram forms; the table is
  // G-symmetric by construction.
  static EnergyLaw orbit_table_from_gram(const Fan& fan, const SymmetryData& sym, double c,
                                         std::int64_t radius, const std::map<int, GramQ>& grams);
  static EnergyLaw from_json_text(const Fan& fan, const SymmetryData* sym, const std::string& text);
  std::string to_json_text() const;

  Kind kind() const { return kind_; }
  double c() const { return c_; }
  std::int64_t table_radius() const { return radius_; }

  // h_k(xi) for xi != 0. Throws DomainError on the zero vector, on a cone
  // of quotient rank 0, or on an orbit-table query beyond the stored radius.
  double value(int cone_id, const IVec& xi) const;

  // kappa_k with h_k(xi) >= kappa_k * |xi|_inf^c for all xi covered by the
  // law (for orbit tables: over the stored box, and beyond it under the
  // declared growth floor).
  double growth_floor(int cone_id) const;

  const GramQ& gram(int cone_id) const;
  const Table& table(int cone_id) const;
  bool has_cone(int cone_id) const;

 private:
  Kind kind_ = Kind::NormPower;
  double c_ = 1.0;
  std::int64_t radius_ = 0;
  std::map<int, GramQ> grams_;
  std::map<int, Table> tables_;
};

// G1-orbits of primitive vectors in the quotient of one cone, within the
// sup-norm box of the given radius. Representatives are lex-minimal over
// the full orbit; `members` lists the in-box orbit elements.
struct PrimitiveOrbit {
  IVec rep;
  std::vector<IVec> members;
};
std::vector<PrimitiveOrbit> primitive_reps(const Fan& fan, const SymmetryData& sym, int cone_id,
                                           std::int64_t radius);

// Quotient-level matrix of element `elem` from cone k to its image cone.
Mat64 quotient_action(const Fan& fan, const SymmetryData& sym, int elem, int cone_id);

// Group-averaged G1-invariant Gram forms, one per cone of positive rank,
// consistent along G-orbits of cones.
std::map<int, GramQ> invariant_grams(const Fan& fan, const SymmetryData& sym);

struct TransportResult {
  bool consistent = true;
  std::string conflict;
  int checked = 0;
  std::optional<GramQ> derived_gram;
  std::vector<std::pair<IVec, double>> derived_table;
};
// Carries the energy data of cone `from` to cone `to` along symmetry
// element `elem` (whose permutation must map `from` to `to`), verifying
// consistency with the data already present on `to`.
TransportResult transport_h(const EnergyLaw& law, const Fan& fan, const SymmetryData& sym, int elem,
                            int from_id, int to_id);

struct CovarianceCheck {
  bool ok = true;
  int samples_checked = 0;
  std::string counterexample;
};
// Samples (n, phi0, xi) and verifies h_{pi(k)}((n phi0) xi) = n^c h_k(xi).
CovarianceCheck check_covariance_law(const EnergyLaw& law, const Fan& fan, const SymmetryData& sym,
                                     int samples, std::uint64_t seed);

// Machine-readable well-definedness report: carries each anchor cone's
// data to every cone in its symmetry orbit and records conflicts.
std::string transport_report_json(const EnergyLaw& law, const Fan& fan, const SymmetryData& sym);

}  // namespace toric
