#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "json.hpp"
#include "toric/crossed.hpp"

using namespace toric;

namespace {

ZMat scalar(int d, long n) {
  ZMat m = ZMat::identity(d);
  for (int i = 0; i < d; ++i) m(i, i) = n;
  return m;
}

double norm2(const Amplitudes& v) {
  double s = 0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

Amplitudes random_vec(const TruncatedRep& rep, std::mt19937_64& rng) {
  Amplitudes v(rep.basis_size());
  for (auto& z : v) z = {double(rng() % 100) / 50.0 - 1.0, double(rng() % 100) / 50.0 - 1.0};
  return v;
}

}  // namespace

TEST_CASE("basis sizes") {
  Fan p1 = make_projective_fan(1);
  TruncatedRep add(p1, RepMode::Additive, 2);
  CHECK(add.basis_size() == 5 + 1 + 1);
  TruncatedRep mul(p1, RepMode::Multiplicative, 2);
  CHECK(mul.basis_size() == 5);
  CHECK_THROWS_AS(TruncatedRep(make_torus_fan(2), RepMode::Additive, 5000), LimitError);
}

TEST_CASE("diagonal phase action") {
  Fan t1 = make_torus_fan(1);
  TruncatedRep rep(t1, RepMode::Additive, 5);
  std::mt19937_64 rng(2);
  Amplitudes v = random_vec(rep, rng);

  // r = 0 acts as the identity.
  Amplitudes v0 = apply_e(rep, torsion_zero(t1), v);
  CHECK(v0 == v);

  // r = 1/2 on xi = 3 gives the parity phase -1.
  TorsionTuple half = torsion_from_json_text(t1, "\"1/2\"");
  Amplitudes ones(rep.basis_size(), {1, 0});
  Amplitudes w = apply_e(rep, half, ones);
  CHECK(w[rep.additive_index(0, {3})].real() == doctest::Approx(-1.0));
  CHECK(w[rep.additive_index(0, {2})].real() == doctest::Approx(1.0));

  // Diagonal phases preserve the norm.
  CHECK(norm2(w) == doctest::Approx(norm2(ones)).epsilon(1e-14));
  CHECK(norm2(apply_e(rep, half, v)) == doctest::Approx(norm2(v)).epsilon(1e-14));
}

TEST_CASE("isometry relations of the shift operators") {
  Fan t1 = make_torus_fan(1);
  TruncatedRep rep(t1, RepMode::Additive, 12);
  MapAction two = MapAction::build(t1, scalar(1, 2));

  // mu* mu = 1 on vectors whose image stays in the box.
  Amplitudes v(rep.basis_size());
  v[rep.additive_index(0, {3})] = {1, 0};
  v[rep.additive_index(0, {-5})] = {0.5, -0.25};
  MuResult mv = apply_mu(rep, two, v);
  CHECK(mv.out_of_box.empty());
  Amplitudes back = apply_mu_star(rep, two, mv.v);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(back[i] - v[i]) < 1e-15);

  // mu*(eps_3) = 0 under doubling: 3 has no preimage.
  Amplitudes e3(rep.basis_size());
  e3[rep.additive_index(0, {3})] = {1, 0};
  Amplitudes star = apply_mu_star(rep, two, e3);
  CHECK(norm2(star) == 0.0);

  // Out-of-box images are flagged, not wrapped.
  Amplitudes far(rep.basis_size());
  far[rep.additive_index(0, {11})] = {1, 0};
  MuResult clipped = apply_mu(rep, two, far);
  CHECK(clipped.out_of_box.size() == 1);
  CHECK(norm2(clipped.v) == 0.0);
}

TEST_CASE("adjointness on in-box pairs") {
  Fan p1 = make_projective_fan(1);
  TruncatedRep rep(p1, RepMode::Additive, 6);
  MapAction act = MapAction::build(p1, scalar(1, 3));
  std::mt19937_64 rng(5);
  Amplitudes v = random_vec(rep, rng);
  // Support v inside the safe box so that mu(v) is fully represented.
  rep.each_additive([&](int k, const IVec& xi) {
    if (sup_norm(xi) > 2) v[rep.additive_index(k, xi)] = 0;
  });
  Amplitudes w = random_vec(rep, rng);
  MuResult mv = apply_mu(rep, act, v);
  REQUIRE(mv.out_of_box.empty());
  Amplitudes sw = apply_mu_star(rep, act, w);
  std::complex<double> lhs = 0, rhs = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    lhs += std::conj(sw[i]) * v[i];
    rhs += std::conj(w[i]) * mv.v[i];
  }
  CHECK(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("shift composition is multiplicative") {
  Fan p2 = make_projective_fan(2);
  SymmetryData sym = enumerate_G(p2);
  ZMat g = sym.elements[1];
  MapAction a2 = MapAction::build(p2, scalar(2, 2));
  MapAction ag = MapAction::build(p2, g);
  MapAction prod = MapAction::build(p2, scalar(2, 2) * g);
  TruncatedRep rep(p2, RepMode::Additive, 6);
  Amplitudes v(rep.basis_size());
  v[rep.additive_index(p2.zero_cone_id() - 1, {1, -2})] = {1, 0};
  Amplitudes lhs = apply_mu(rep, a2, apply_mu(rep, ag, v).v).v;
  Amplitudes rhs = apply_mu(rep, prod, v).v;
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(lhs[i] - rhs[i]) < 1e-15);

  // Cone permutations compose accordingly.
  for (int k = 0; k < p2.num_cones(); ++k) CHECK(prod.perm[k] == a2.perm[ag.perm[k] - 1]);
}

TEST_CASE("the semigroup action on torsion labels") {
  Fan t1 = make_torus_fan(1);
  MapAction three = MapAction::build(t1, scalar(1, 3));
  TorsionTuple r = torsion_from_json_text(t1, "\"1/3\"");
  TorsionTuple moved = act_on_torsion(t1, three, r);
  CHECK(moved.comps[0].num[0] == 0);  // 3 * 1/3 = 0 mod 1
}

TEST_CASE("torsion preimages: 3 s = 1/5 has solutions {1/15, 6/15, 11/15}") {
  ZMat a(1, 1);
  a(0, 0) = 3;
  TorsionVec r{5, {1}};
  auto sols = torsion_preimages(a, r);
  REQUIRE(sols.size() == 3);
  std::set<std::pair<std::int64_t, std::int64_t>> got;
  for (const auto& s : sols) got.insert({s.num[0], s.den});
  std::set<std::pair<std::int64_t, std::int64_t>> want = {{1, 15}, {6, 15}, {11, 15}};
  CHECK(got == want);
}

TEST_CASE("conjugation relation is exact") {
  Fan p1 = make_projective_fan(1);
  TruncatedRep rep(p1, RepMode::Additive, 10);
  TorsionTuple r = torsion_from_json_text(p1, "\"1/3\"");

  MapAction id = MapAction::build(p1, ZMat::identity(1));
  RelationReport rid = check_conjugation(rep, id, r);
  CHECK(rid.max_deviation == 0.0);
  CHECK(rid.coverage == 1.0);

  MapAction three = MapAction::build(p1, scalar(1, 3));
  RelationReport r3 = check_conjugation(rep, three, r);
  CHECK(r3.max_deviation == 0.0);

  // Random battery over both projective fans and both modes.
  Fan p2 = make_projective_fan(2);
  SymmetryData sym = enumerate_G(p2);
  TorsionTuple r2 = torsion_from_json_text(p2, "\"2/7\"");
  for (int e = 0; e < sym.order(); ++e) {
    ZMat phi = scalar(2, 2) * sym.elements[e];
    MapAction act = MapAction::build(p2, phi);
    TruncatedRep radd(p2, RepMode::Additive, 6);
    CHECK(check_conjugation(radd, act, r2).max_deviation == 0.0);
    TruncatedRep rmul(p2, RepMode::Multiplicative, 1);
    CHECK(check_conjugation(rmul, act, r2).max_deviation == 0.0);
  }
}

TEST_CASE("transfer relation: true normalization, det-power comparison, annihilation") {
  Fan t1 = make_torus_fan(1);
  TruncatedRep rep(t1, RepMode::Additive, 9);
  MapAction three = MapAction::build(t1, scalar(1, 3));
  TorsionTuple r = torsion_from_json_text(t1, "\"1/5\"");
  RelationReport rr = check_transfer(rep, three, r);
  CHECK(rr.max_deviation < 1e-12);
  CHECK(rr.coverage == 1.0);
  auto extra = nlohmann::json::parse(rr.extra_json);
  CHECK(extra["kernel_order_total"].get<double>() == 3.0);
  CHECK(extra["normalization_matches_det_power"].get<bool>() == true);
  CHECK_FALSE(extra["annihilation_witness"].is_null());

  // On the projective plane with 2I the naive det power undercounts the
  // kernel: 2^5 tuple solutions against |det| = 4. The identity still
  // holds with the exact normalization, and the report logs the gap.
  Fan p2 = make_projective_fan(2);
  TruncatedRep rep2(p2, RepMode::Additive, 5);
  MapAction two = MapAction::build(p2, scalar(2, 2));
  TorsionTuple r2 = torsion_from_json_text(p2, "\"1/3\"");
  RelationReport rr2 = check_transfer(rep2, two, r2);
  CHECK(rr2.max_deviation < 1e-12);
  auto extra2 = nlohmann::json::parse(rr2.extra_json);
  CHECK(extra2["kernel_order_total"].get<double>() == 32.0);
  CHECK(extra2["det_power_lambda"].get<double>() == 4.0);
  CHECK(extra2["normalization_matches_det_power"].get<bool>() == false);
}

TEST_CASE("covariance relation across a time sweep") {
  Fan p1 = make_projective_fan(1);
  EnergyLaw law = EnergyLaw::norm_power_uniform(p1, 1.0);
  TruncatedRep rep(p1, RepMode::Additive, 12);
  TorsionTuple r = torsion_from_json_text(p1, "\"1/4\"");
  MapAction two = MapAction::build(p1, scalar(1, 2));

  RelationReport r0 = check_covariance(rep, two, 0.0, law, r);
  CHECK(r0.max_deviation == 0.0);
  CHECK(r0.coverage > 0.5);

  for (double t = 0.1; t <= 1.05; t += 0.1) {
    RelationReport rt = check_covariance(rep, two, t, law, r);
    CHECK(rt.max_deviation <= 1e-12);
  }

  // Coverage grows toward 1 with the radius (only energy-less states are excluded).
  TruncatedRep small(p1, RepMode::Additive, 6);
  RelationReport c_small = check_covariance(small, two, 0.5, law, r);
  TruncatedRep big(p1, RepMode::Additive, 40);
  RelationReport c_big = check_covariance(big, two, 0.5, law, r);
  CHECK(c_big.coverage > c_small.coverage);
  CHECK(c_big.coverage > 0.95);
}

TEST_CASE("rank-3 quotients: relations on the projective 3-space at small radius") {
  Fan p3 = make_projective_fan(3);
  TruncatedRep rep(p3, RepMode::Additive, 2);
  MapAction two = MapAction::build(p3, scalar(3, 2));
  TorsionTuple r = torsion_from_json_text(p3, "\"1/3\"");
  CHECK(check_conjugation(rep, two, r).max_deviation == 0.0);
  RelationReport t = check_transfer(rep, two, r);
  CHECK(t.max_deviation < 1e-12);
  auto extra = nlohmann::json::parse(t.extra_json);
  // Kernel orders: 2^3 on the dense orbit, 2^2 on rays, 2 on 2-cones.
  CHECK(extra["kernel_order_total"].get<double>() ==
        doctest::Approx(std::pow(2.0, 3 + 4 * 2 + 6 * 1)));
  EnergyLaw law = EnergyLaw::norm_power_uniform(p3, 1.0);
  CHECK(check_covariance(rep, two, 0.3, law, r).max_deviation <= 1e-12);
}

TEST_CASE("mu mu* is the orthogonal projection onto the in-box range") {
  Fan t1 = make_torus_fan(1);
  TruncatedRep rep(t1, RepMode::Additive, 10);
  MapAction two = MapAction::build(t1, scalar(1, 2));
  std::mt19937_64 rng(31);
  Amplitudes v = random_vec(rep, rng);
  auto proj = [&](const Amplitudes& x) { return apply_mu(rep, two, apply_mu_star(rep, two, x)).v; };
  Amplitudes pv = proj(v);
  Amplitudes ppv = proj(pv);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(ppv[i] - pv[i]) < 1e-15);  // idempotent
  rep.each_additive([&](int k, const IVec& xi) {
    std::size_t i = rep.additive_index(k, xi);
    bool in_range = xi[0] % 2 == 0;
    CHECK(std::abs(pv[i] - (in_range ? v[i] : std::complex<double>(0, 0))) < 1e-15);
  });
}

TEST_CASE("diagonal observables satisfy the truncated equilibrium identities") {
  // The Gibbs functional of the truncated Hamiltonian, evaluated through
  // the operator stack: traces against e^{-beta H} over energy-carrying
  // basis vectors.
  Fan p1 = make_projective_fan(1);
  EnergyLaw law = EnergyLaw::norm_power_uniform(p1, 1.0);
  for (std::int64_t radius : {8L, 16L}) {
    TruncatedRep rep(p1, RepMode::Additive, radius);
    MapAction two = MapAction::build(p1, scalar(1, 2));
    TorsionTuple r = torsion_from_json_text(p1, "\"1/3\"");
    double beta = 2.0;

    auto weight = [&](int k, const IVec& xi) -> double {
      if (p1.orbits()[k].quotient_rank == 0 || gcd_abs(xi) == 0) return 0.0;
      return std::pow(law.value(k + 1, xi), -beta);
    };
    auto functional = [&](const std::function<Amplitudes(const Amplitudes&)>& op) {
      std::complex<double> num = 0;
      double den = 0;
      rep.each_additive([&](int k, const IVec& xi) {
        double w = weight(k, xi);
        if (w == 0) return;
        Amplitudes e(rep.basis_size());
        std::size_t i = rep.additive_index(k, xi);
        e[i] = {1, 0};
        num += op(e)[i] * w;
        den += w;
      });
      return num / den;
    };

    auto a_op = [&](const Amplitudes& v) { return apply_e(rep, r, v); };
    auto b_op = [&](const Amplitudes& v) { return apply_mu(rep, two, apply_mu_star(rep, two, v)).v; };
    std::complex<double> ab = functional([&](const Amplitudes& v) { return a_op(b_op(v)); });
    std::complex<double> ba = functional([&](const Amplitudes& v) { return b_op(a_op(v)); });
    CHECK(std::abs(ab - ba) < 1e-14);

    // Time invariance of the state on diagonal observables: conjugating
    // e(r) by e^{itH} leaves the functional unchanged, term by term.
    double t = 0.6;
    auto sigma_a = [&](const Amplitudes& v) {
      Amplitudes w = v;
      rep.each_additive([&](int k, const IVec& xi) {
        double e0 = weight(k, xi) > 0 ? std::log(law.value(k + 1, xi)) : 0.0;
        std::size_t i = rep.additive_index(k, xi);
        w[i] *= std::exp(std::complex<double>(0, -t * e0));
      });
      w = a_op(w);
      rep.each_additive([&](int k, const IVec& xi) {
        double e0 = weight(k, xi) > 0 ? std::log(law.value(k + 1, xi)) : 0.0;
        std::size_t i = rep.additive_index(k, xi);
        w[i] *= std::exp(std::complex<double>(0, t * e0));
      });
      return w;
    };
    std::complex<double> phi_a = functional(a_op);
    std::complex<double> phi_sigma_a = functional(sigma_a);
    CHECK(std::abs(phi_a - phi_sigma_a) < 1e-13);
  }
}

TEST_CASE("covariance in multiplicative mode uses the positive-rank exponent") {
  Fan p1 = make_projective_fan(1);
  EnergyLaw law = EnergyLaw::norm_power_uniform(p1, 1.0);
  TruncatedRep rep(p1, RepMode::Multiplicative, 6);
  MapAction three = MapAction::build(p1, scalar(1, 3));
  TorsionTuple r = torsion_from_json_text(p1, "\"1/2\"");
  RelationReport rr = check_covariance(rep, three, 0.7, law, r);
  CHECK(rr.max_deviation <= 1e-12);
  auto extra = nlohmann::json::parse(rr.extra_json);
  CHECK(extra["lambda_used"].get<double>() == 1.0);  // one positive-rank cone
  CHECK(extra["m_prime"].get<int>() == 1);
}
