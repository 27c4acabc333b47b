#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>
#include <random>

#include "toric/spectral.hpp"

using namespace toric;

namespace {

GramQ identity_gram(int n) { return GramQ{ZMat::identity(n), 1}; }

}  // namespace

TEST_CASE("norm power values") {
  Fan t1 = make_torus_fan(1);
  EnergyLaw law = EnergyLaw::norm_power_uniform(t1, 1.0);
  CHECK(law.value(1, {-3}) == doctest::Approx(3.0).epsilon(1e-15));

  Fan t2 = make_torus_fan(2);
  EnergyLaw law2 = EnergyLaw::norm_power_uniform(t2, 2.0);
  CHECK(law2.value(1, {1, 2}) == doctest::Approx(5.0).epsilon(1e-15));

  CHECK_THROWS_AS(law.value(1, {0}), DomainError);
}

TEST_CASE("orbit table scaling law") {
  Fan t1 = make_torus_fan(1);
  SymmetryData sym = enumerate_G(t1);
  EnergyLaw law = EnergyLaw::orbit_table(t1, sym, 1.0, 2, {{1, {1}, 1.0}, {1, {-1}, 1.0}});
  CHECK(law.value(1, {5}) == doctest::Approx(5.0));
  CHECK(law.value(1, {-4}) == doctest::Approx(4.0));
  CHECK_THROWS_AS(law.value(1, {0}), DomainError);
}

TEST_CASE("orbit table beyond radius is an error, never an extrapolation") {
  Fan t2 = make_torus_fan(2);
  SymmetryData sym = enumerate_G(t2);
  EnergyLaw law = EnergyLaw::orbit_table_from_gram(t2, sym, 1.0, 3, {{1, identity_gram(2)}});
  CHECK_NOTHROW(law.value(1, {6, 4}));        // primitive part (3,2) is stored
  CHECK_THROWS_AS(law.value(1, {5, 1}), DomainError);  // primitive, beyond radius 3
}

TEST_CASE("orbit tables reject G1-inconsistent values and non-primitive keys") {
  Fan p1 = make_projective_fan(1);
  SymmetryData sym = enumerate_G(p1);
  int zk = p1.zero_cone_id();
  // The stabilizer of the zero cone contains negation: +1 and -1 are one orbit.
  CHECK_THROWS_AS(EnergyLaw::orbit_table(p1, sym, 1.0, 1, {{zk, {1}, 1.0}, {zk, {-1}, 2.0}}), DomainError);
  CHECK_THROWS_AS(EnergyLaw::orbit_table(p1, sym, 1.0, 1, {{zk, {2}, 1.0}}), DomainError);
  // Missing coverage of some primitive vector within the radius.
  CHECK_THROWS_AS(EnergyLaw::orbit_table(p1, sym, 1.0, 1, {}), DomainError);
}

TEST_CASE("primitive representatives under the stabilizer") {
  Fan p1 = make_projective_fan(1);
  SymmetryData sym = enumerate_G(p1);
  auto orbits = primitive_reps(p1, sym, p1.zero_cone_id(), 3);
  REQUIRE(orbits.size() == 1);  // negation folds +-1 into one orbit
  CHECK(orbits[0].rep == IVec{-1});
  CHECK(orbits[0].members.size() == 2);

  Fan t2 = make_torus_fan(2);
  SymmetryData symt = enumerate_G(t2);
  auto o2 = primitive_reps(t2, symt, 1, 1);
  CHECK(o2.size() == 8);  // exhaustive gcd check, trivial stabilizer
  for (const auto& o : o2) CHECK(o.members.size() == 1);

  // Rank-0 quotients carry no primitive vectors.
  Fan a1 = make_affine_fan(1);
  SymmetryData syma = enumerate_G(a1);
  for (const Cone& c : a1.cones())
    if (c.dim == 1) CHECK(primitive_reps(a1, syma, c.id, 5).empty());
}

TEST_CASE("gcd is constant along symmetry orbits") {
  Fan p2 = make_projective_fan(2);
  SymmetryData sym = enumerate_G(p2);
  std::mt19937_64 rng(5);
  int zk = p2.zero_cone_id();
  for (int t = 0; t < 500; ++t) {
    IVec xi = {std::int64_t(rng() % 21) - 10, std::int64_t(rng() % 21) - 10};
    if (gcd_abs(xi) == 0) continue;
    for (int e = 0; e < sym.order(); ++e) {
      if (sym.perm_of(e, zk) != zk) continue;
      Mat64 a = quotient_action(p2, sym, e, zk);
      CHECK(gcd_abs(a.apply(xi)) == gcd_abs(xi));
    }
  }
}

TEST_CASE("transport consistency") {
  Fan p2 = make_projective_fan(2);
  SymmetryData sym = enumerate_G(p2);

  // Invariant grams transport consistently by construction.
  auto grams = invariant_grams(p2, sym);
  EnergyLaw law = EnergyLaw::norm_power(p2, 2.0, grams);
  for (int e = 0; e < sym.order(); ++e)
    for (const Cone& c : p2.cones()) {
      if (p2.orbit(c.id).quotient_rank == 0) continue;
      int to = sym.perm_of(e, c.id);
      TransportResult tr = transport_h(law, p2, sym, e, c.id, to);
      CHECK(tr.consistent);
    }

  // A table generated from the invariant grams is consistent too.
  EnergyLaw table = EnergyLaw::orbit_table_from_gram(p2, sym, 2.0, 4, grams);
  for (int e = 0; e < sym.order(); ++e) {
    int from = p2.zero_cone_id();
    TransportResult tr = transport_h(table, p2, sym, e, from, sym.perm_of(e, from));
    CHECK(tr.consistent);
    CHECK(tr.checked > 0);
  }

  // Mismatched grams across one orbit of ray cones are flagged.
  std::map<int, GramQ> broken = grams;
  for (const Cone& c : p2.cones())
    if (c.dim == 1) {
      broken[c.id].num(0, 0) = broken[c.id].num(0, 0) * 2;
      break;
    }
  EnergyLaw bad = EnergyLaw::norm_power(p2, 2.0, broken);
  bool conflict = false;
  for (int e = 0; e < sym.order() && !conflict; ++e)
    for (const Cone& c : p2.cones()) {
      if (c.dim != 1) continue;
      TransportResult tr = transport_h(bad, p2, sym, e, c.id, sym.perm_of(e, c.id));
      if (!tr.consistent) conflict = true;
    }
  CHECK(conflict);
}

TEST_CASE("covariance law sampling battery") {
  Fan p2 = make_projective_fan(2);
  SymmetryData sym = enumerate_G(p2);
  EnergyLaw np = EnergyLaw::norm_power(p2, 1.0, invariant_grams(p2, sym));
  CovarianceCheck c1 = check_covariance_law(np, p2, sym, 1500, 42);
  CHECK(c1.ok);
  CHECK(c1.samples_checked > 1000);

  EnergyLaw ot = EnergyLaw::orbit_table_from_gram(p2, sym, 1.0, 64, invariant_grams(p2, sym));
  CovarianceCheck c2 = check_covariance_law(ot, p2, sym, 1500, 43);
  CHECK(c2.ok);
  CHECK(c2.samples_checked > 1000);
}

TEST_CASE("homogeneity h(n xi) = n^c h(xi)") {
  Fan t2 = make_torus_fan(2);
  SymmetryData sym = enumerate_G(t2);
  EnergyLaw np = EnergyLaw::norm_power_uniform(t2, 1.7);
  EnergyLaw ot = EnergyLaw::orbit_table_from_gram(t2, sym, 1.7, 8, {{1, identity_gram(2)}});
  std::mt19937_64 rng(9);
  for (int t = 0; t < 300; ++t) {
    IVec xi = {std::int64_t(rng() % 9) - 4, std::int64_t(rng() % 9) - 4};
    if (gcd_abs(xi) == 0) xi[0] = 1;
    std::int64_t n = 1 + std::int64_t(rng() % 4);
    IVec nxi = {n * xi[0], n * xi[1]};
    for (const EnergyLaw* law : {&np, &ot}) {
      double lhs = law->value(1, nxi);
      double rhs = std::pow(double(n), 1.7) * law->value(1, xi);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("growth floors") {
  Fan t2 = make_torus_fan(2);
  SymmetryData sym = enumerate_G(t2);
  EnergyLaw np = EnergyLaw::norm_power_uniform(t2, 2.0);
  CHECK(np.growth_floor(1) == doctest::Approx(1.0));
  EnergyLaw ot = EnergyLaw::orbit_table_from_gram(t2, sym, 1.0, 6, {{1, identity_gram(2)}});
  double kappa = ot.growth_floor(1);
  CHECK(kappa > 0.99);  // |xi|_2 >= |xi|_inf
  CHECK(kappa <= 1.0 + 1e-12);

  GramQ off{ZMat(2, 2), 1};
  off.num(0, 0) = 2; off.num(0, 1) = 3; off.num(1, 0) = 3; off.num(1, 1) = 5;
  CHECK(off.positive_definite());
  double lam = gram_lambda_floor(off);
  CHECK(lam > 0);
  CHECK(lam < 0.2);  // true smallest eigenvalue is (7 - sqrt(45))/2 ~ 0.146

  GramQ bad{ZMat(2, 2), 1};
  bad.num(0, 0) = 1; bad.num(0, 1) = 2; bad.num(1, 0) = 2; bad.num(1, 1) = 1;
  CHECK_FALSE(bad.positive_definite());
}

TEST_CASE("law json round trip") {
  Fan p2 = make_projective_fan(2);
  SymmetryData sym = enumerate_G(p2);
  EnergyLaw np = EnergyLaw::norm_power(p2, 2.0, invariant_grams(p2, sym));
  EnergyLaw back = EnergyLaw::from_json_text(p2, &sym, np.to_json_text());
  CHECK(back.kind() == EnergyLaw::Kind::NormPower);
  CHECK(back.value(p2.zero_cone_id(), {1, 2}) == np.value(p2.zero_cone_id(), {1, 2}));

  EnergyLaw ot = EnergyLaw::orbit_table_from_gram(p2, sym, 1.0, 3, invariant_grams(p2, sym));
  EnergyLaw back2 = EnergyLaw::from_json_text(p2, &sym, ot.to_json_text());
  CHECK(back2.value(p2.zero_cone_id(), {2, 1}) == ot.value(p2.zero_cone_id(), {2, 1}));

  // Generator form: grams must be symmetry-invariant for the sampled
  // table to be well defined, so serialize the group-averaged ones.
  std::string grams_json;
  for (const auto& [cone_id, q] : invariant_grams(p2, sym)) {
    if (!grams_json.empty()) grams_json += ",";
    grams_json += "\"" + std::to_string(cone_id) + "\":[";
    for (int i = 0; i < q.num.rows(); ++i) {
      if (i) grams_json += ",";
      grams_json += "[";
      for (int j = 0; j < q.num.cols(); ++j)
        grams_json += (j ? "," : "") + q.num(i, j).get_str();
      grams_json += "]";
    }
    grams_json += "]";
  }
  EnergyLaw gen = EnergyLaw::from_json_text(
      p2, &sym,
      "{\"c\":1.0,\"kind\":\"orbit_table\",\"radius\":3,\"generator\":{\"grams\":{" + grams_json + "}}}");
  CHECK(gen.table_radius() == 3);
}
