#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "toric/fan.hpp"

using namespace toric;

namespace {

ZVec zv(std::initializer_list<long> xs) {
  ZVec v;
  for (long x : xs) v.emplace_back(x);
  return v;
}

ZMat scalar(int d, long n) {
  ZMat m = ZMat::identity(d);
  for (int i = 0; i < d; ++i) m(i, i) = n;
  return m;
}

bool has_violation(const ValidationReport& r, const std::string& kind) {
  for (const auto& v : r.violations)
    if (v.kind == kind) return true;
  return false;
}

}  // namespace

TEST_CASE("the projective line fan is valid with three cones") {
  Fan p1 = make_projective_fan(1);
  CHECK(p1.validate().ok());
  CHECK(p1.num_cones() == 3);
  CHECK(p1.zero_cone_id() != 0);
}

TEST_CASE("lineality is rejected") {
  Fan f = Fan::from_rays(1, {{}, {zv({1}), zv({-1})}});
  CHECK_FALSE(f.validate().ok());
  CHECK(has_violation(f.validate(), "lineality"));
}

TEST_CASE("missing faces are reported, not auto-completed") {
  Fan f = Fan::from_rays(1, {{zv({1})}});
  CHECK_FALSE(f.validate().ok());
  CHECK(has_violation(f.validate(), "missing_face"));
}

TEST_CASE("non-primitive and zero rays are reported") {
  Fan f = Fan::from_rays(2, {{}, {zv({2, 4})}});
  CHECK(has_violation(f.validate(), "non_primitive_ray"));
  Fan g = Fan::from_rays(2, {{}, {zv({0, 0})}});
  CHECK(has_violation(g.validate(), "zero_ray"));
}

TEST_CASE("bad pairwise intersections are reported") {
  // Two 2-cones overlapping in an interior ray.
  Fan f = Fan::from_rays(2, {{},
                             {zv({1, 0})},
                             {zv({0, 1})},
                             {zv({1, 1})},
                             {zv({1, -1})},
                             {zv({1, 0}), zv({0, 1})},
                             {zv({1, 1}), zv({1, -1})}});
  CHECK(has_violation(f.validate(), "bad_intersection"));
}

TEST_CASE("duplicate cones are reported") {
  Fan f = Fan::from_rays(1, {{}, {zv({1})}, {zv({1})}});
  CHECK(has_violation(f.validate(), "duplicate_cone"));
}

TEST_CASE("operations on invalid fans raise the dedicated error") {
  Fan f = Fan::from_rays(1, {{zv({1})}});
  CHECK_THROWS_AS(f.orbit(1), InvalidFanError);
  CHECK_THROWS_AS(f.relint_image_cone(ZMat::identity(1), 1), InvalidFanError);
}

TEST_CASE("malformed input is a hard error, not a validation entry") {
  CHECK_THROWS_AS(Fan::from_json_text("{\"rank\":2,\"cones\":[{\"id\":1,\"rays\":[[1]]}]}"), ParseError);
  CHECK_THROWS_AS(Fan::from_json_text("{\"rank\":1,\"cones\":[{\"id\":5,\"rays\":[]}]}"), ParseError);
  CHECK_THROWS_AS(Fan::from_json_text("not json"), ParseError);
}

TEST_CASE("json round trip preserves validity") {
  Fan p2 = make_projective_fan(2);
  Fan back = Fan::from_json_text(p2.to_json_text());
  CHECK(back.validate().ok());
  CHECK(back.num_cones() == p2.num_cones());
}

TEST_CASE("cone census: count by dimension reproduces m") {
  for (int d = 1; d <= 3; ++d) {
    Fan f = make_projective_fan(d);
    REQUIRE(f.validate().ok());
    int total = 0;
    for (const Cone& c : f.cones()) {
      CHECK(c.dim >= 0);
      CHECK(c.dim <= d);
      ++total;
    }
    CHECK(total == f.num_cones());
    CHECK(f.num_cones() == (1 << (d + 1)) - 1);
  }
}

TEST_CASE("orbit lattice ranks: zero cone d, full-dimensional cone 0") {
  Fan p1 = make_projective_fan(1);
  CHECK(p1.orbit(p1.zero_cone_id()).quotient_rank == 1);
  for (const Cone& c : p1.cones())
    if (c.dim == 1) CHECK(p1.orbit(c.id).quotient_rank == 0);

  Fan p2 = make_projective_fan(2);
  CHECK(p2.orbit(p2.zero_cone_id()).quotient_rank == 2);
  for (const Cone& c : p2.cones()) {
    if (c.dim == 1) CHECK(p2.orbit(c.id).quotient_rank == 1);  // Smith form of a single ray
    if (c.dim == 2) CHECK(p2.orbit(c.id).quotient_rank == 0);
  }
}

TEST_CASE("orbit lattice postconditions") {
  for (int d = 1; d <= 3; ++d) {
    Fan f = make_projective_fan(d);
    for (const auto& o : f.orbits()) {
      const Cone& c = f.cone(o.cone_id);
      CHECK(o.quotient_rank == d - c.dim);
      // Projection kills the span sublattice.
      for (const ZVec& r : c.extreme_rays) CHECK(is_zero(mul(o.quotient_proj, r)));
      if (o.quotient_rank > 0) {
        CHECK(o.quotient_proj * o.section == ZMat::identity(o.quotient_rank));
        // Dual basis: the pairing of perp rows with section columns is I.
        CHECK(o.perp_basis * o.section == ZMat::identity(o.quotient_rank));
        CHECK(o.perp_basis.rows() == o.quotient_rank);
        // Perp basis is orthogonal to the rays.
        for (const ZVec& r : c.extreme_rays)
          for (int i = 0; i < o.perp_basis.rows(); ++i) CHECK(dot(o.perp_basis.row(i), r) == 0);
      }
    }
  }
}

TEST_CASE("relint image examples") {
  Fan p1 = make_projective_fan(1);
  // Identity fixes every cone.
  for (const Cone& c : p1.cones()) CHECK(p1.relint_image_cone(ZMat::identity(1), c.id) == c.id);
  // Negation swaps the two rays.
  ZMat neg = scalar(1, -1);
  int pos_ray = 0, neg_ray = 0;
  for (const Cone& c : p1.cones()) {
    if (c.dim == 1 && c.extreme_rays[0] == zv({1})) pos_ray = c.id;
    if (c.dim == 1 && c.extreme_rays[0] == zv({-1})) neg_ray = c.id;
  }
  CHECK(p1.relint_image_cone(neg, pos_ray) == neg_ray);
  // Scaling fixes the origin.
  CHECK(p1.relint_image_cone(scalar(1, 2), p1.zero_cone_id()) == p1.zero_cone_id());
  // Singular maps are rejected.
  CHECK_THROWS_AS(p1.relint_image_cone(scalar(1, 0), 1), DomainError);
}

TEST_CASE("relint image escaping every cone") {
  Fan a1 = make_affine_fan(1);  // cones {0}, R>=0
  ZMat neg = scalar(1, -1);
  int ray_id = 0;
  for (const Cone& c : a1.cones())
    if (c.dim == 1) ray_id = c.id;
  CHECK_FALSE(a1.relint_image_cone(neg, ray_id).has_value());
}

TEST_CASE("relint image composes") {
  Fan p2 = make_projective_fan(2);
  std::vector<ZMat> maps;
  maps.push_back(scalar(2, 2));
  ZMat rot(2, 2);  // the order-3 symmetry of the projective plane fan
  rot(0, 0) = 0; rot(0, 1) = -1; rot(1, 0) = 1; rot(1, 1) = -1;
  maps.push_back(rot);
  maps.push_back(scalar(2, 3));
  for (const ZMat& a : maps)
    for (const ZMat& b : maps)
      for (const Cone& c : p2.cones()) {
        auto inner = p2.relint_image_cone(b, c.id);
        REQUIRE(inner.has_value());
        auto outer = p2.relint_image_cone(a, *inner);
        auto direct = p2.relint_image_cone(a * b, c.id);
        REQUIRE(outer.has_value());
        CHECK(direct == outer);
      }
}

TEST_CASE("membership uses exact arithmetic on sample fans") {
  Fan a2 = make_affine_fan(2);
  int quad = 0;
  for (const Cone& c : a2.cones())
    if (c.dim == 2) quad = c.id;
  CHECK(a2.contains(quad, zv({3, 5})));
  CHECK(a2.contains(quad, zv({0, 5})));
  CHECK_FALSE(a2.contains(quad, zv({-1, 5})));
  CHECK(a2.in_relint(quad, zv({1, 1})));
  CHECK_FALSE(a2.in_relint(quad, zv({0, 1})));
}
