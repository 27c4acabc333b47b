#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "toric/errors.hpp"
#include "toric/zmat.hpp"

namespace toric {

// A strongly convex rational polyhedral cone, given by primitive ray
// generators. Geometry (span equations, facet-type inequalities, face
// lattice) is derived once at fan load and reused by every membership test.
struct Cone {
  int id = 0;                       // 1-based, as in the input
  std::vector<ZVec> rays;           // declared generators
  int dim = 0;                      // rank of the ray span

  // Derived exact data (valid only when `pointed`):
  std::vector<ZVec> extreme_rays;   // canonical: primitive, lex-sorted
  ZMat span_eq;                     // rows: basis of {u : <u, ray> = 0} = perp lattice
  std::vector<ZVec> inequalities;   // valid inequalities within the span; relint
                                    // membership is strict positivity on all of them
  std::vector<std::vector<ZVec>> faces;  // every face as a canonical extreme-ray set

  bool rays_primitive = true;
  bool pointed = true;
};

struct Violation {
  std::string kind;    // "non_primitive_ray" | "zero_ray" | "duplicate_ray" |
                       // "lineality" | "missing_face" | "duplicate_cone" |
                       // "bad_intersection" | "empty_fan" | "bad_ids"
  int cone_id = 0;
  int other_id = 0;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

// Per-cone quotient data: N/N_k with a chosen basis, the projection onto it,
// an integral section, and the basis of the perp lattice normalized so that
// the duality pairing <perp_i, section(e_j)> is the identity matrix.
struct OrbitLattice {
  int cone_id = 0;
  int quotient_rank = 0;   // d_k
  ZMat perp_basis;         // d_k x d rows
  ZMat quotient_proj;      // d_k x d, surjective, kernel = N ∩ span(cone)
  ZMat section;            // d x d_k, quotient_proj * section = I
};

class Fan {
 public:
  Fan() = default;

  // Throws ParseError on malformed input (wrong ray length, non-integer
  // entries, ids not exactly 1..m). Semantic problems are reported by
  // validate(), never thrown here.
  static Fan from_json_text(const std::string& text);
  static Fan from_json_file(const std::string& path);

  // Construct directly from (rank, list of ray lists); ids assigned 1..m
  // in order. Used by tests and the built-in fan builders.
  static Fan from_rays(int rank, const std::vector<std::vector<ZVec>>& cones);

  int rank() const { return rank_; }
  int num_cones() const { return int(cones_.size()); }
  const Cone& cone(int id) const;            // 1-based id
  const std::vector<Cone>& cones() const { return cones_; }
  int zero_cone_id() const { return zero_cone_id_; }  // 0 if absent

  const ValidationReport& validate() const { return report_; }
  void require_valid() const;

  bool contains(int id, const ZVec& x) const;
  bool in_relint(int id, const ZVec& x) const;

  // The unique cone whose relative interior contains the image of the
  // relative interior of cone j under phi, decided on the exact sample
  // point phi(sum of extreme rays). nullopt if no cone contains it.
  // Throws DomainError for singular phi or an invalid fan.
  std::optional<int> relint_image_cone(const ZMat& phi, int j) const;

  const OrbitLattice& orbit(int id) const;
  const std::vector<OrbitLattice>& orbits() const;

  // Distinct primitive generators of all 1-dimensional cones, lex-sorted.
  std::vector<ZVec> ray_generators() const;

  std::string to_json_text() const;

 private:
  void derive_geometry();
  void run_validation();
  void build_orbits();

  int rank_ = 0;
  std::vector<Cone> cones_;
  std::map<int, int> id_to_index_;
  int zero_cone_id_ = 0;
  ValidationReport report_;
  std::vector<OrbitLattice> orbits_;   // parallel to cones_, only when valid
  bool orbits_built_ = false;
};

// Induced map N/N_from -> N/N_to of a lattice map psi with psi(N_from)
// contained in N_to (e.g. psi compatible and to = relint image of from).
ZMat induced_quotient_map(const OrbitLattice& from, const OrbitLattice& to, const ZMat& psi);

// Standard fans.
Fan make_torus_fan(int d);                    // single zero cone
Fan make_affine_fan(int d);                   // faces of the positive orthant
Fan make_projective_fan(int d);               // cones on proper subsets of {e0..ed}

}  // namespace toric
