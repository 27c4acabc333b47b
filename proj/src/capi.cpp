#include "toric_c.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "json.hpp"
#include "toric/crossed.hpp"
#include "toric/errors.hpp"
#include "toric/fan.hpp"
#include "toric/group_algebra.hpp"
#include "toric/heights.hpp"
#include "toric/qsm.hpp"
#include "toric/spectral.hpp"
#include "toric/symmetry.hpp"

using Json = nlohmann::ordered_json;

struct tve_fan {
  toric::Fan fan;
};
struct tve_symmetry {
  toric::SymmetryData sym;
};
struct tve_law {
  toric::EnergyLaw law;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
tve_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const toric::ParseError& e) {
    g_last_error = e.what();
    return TVE_E_PARSE;
  } catch (const toric::LimitError& e) {
    g_last_error = e.what();
    return TVE_E_LIMIT;
  } catch (const toric::InvalidFanError& e) {
    g_last_error = e.what();
    return TVE_E_INVALID;
  } catch (const toric::DomainError& e) {
    g_last_error = e.what();
    return TVE_E_DOMAIN;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TVE_E_INTERNAL;
  }
}

toric::ZMat zmat_from_json_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& e) {
    throw toric::ParseError(std::string("bad matrix JSON: ") + e.what());
  }
  if (!j.is_array() || j.empty()) throw toric::ParseError("matrix must be a nonempty array of rows");
  int rows = int(j.size());
  int cols = int(j[0].size());
  toric::ZMat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (int(j[i].size()) != cols) throw toric::ParseError("ragged matrix rows");
    for (int c = 0; c < cols; ++c) {
      if (!j[i][c].is_number_integer()) throw toric::ParseError("matrix entries must be integers");
      m(i, c) = toric::ZZ(j[i][c].get<long>());
    }
  }
  return m;
}

toric::PartitionMode mode_from(const char* mode) {
  std::string s = mode ? mode : "additive";
  if (s == "additive") return toric::PartitionMode::Additive;
  if (s == "multiplicative") return toric::PartitionMode::Multiplicative;
  if (s == "factored") return toric::PartitionMode::Factored;
  throw toric::ParseError("unknown mode: " + s);
}

toric::QQ qq_from_string(const std::string& s) {
  toric::QQ q;
  if (q.set_str(s, 10) != 0) throw toric::ParseError("bad rational: " + s);
  q.canonicalize();
  return q;
}

Json report_to_json(const toric::ValidationReport& r) {
  Json j;
  j["valid"] = r.ok();
  Json v = Json::array();
  for (const auto& x : r.violations) {
    Json e;
    e["kind"] = x.kind;
    e["cone"] = x.cone_id;
    if (x.other_id) e["other_cone"] = x.other_id;
    if (!x.detail.empty()) e["detail"] = x.detail;
    v.push_back(e);
  }
  j["violations"] = v;
  return j;
}

}  // namespace

extern "C" {

const char* tve_version(void) { return "0.1.0"; }

const char* tve_status_name(tve_status s) {
  switch (s) {
    case TVE_OK: return "ok";
    case TVE_E_PARSE: return "parse_error";
    case TVE_E_INVALID: return "invalid_fan";
    case TVE_E_DOMAIN: return "domain_error";
    case TVE_E_LIMIT: return "limit_exceeded";
    case TVE_E_CHECK: return "check_failed";
    case TVE_E_INTERNAL: return "internal_error";
  }
  return "?";
}

const char* tve_last_error(void) { return g_last_error.c_str(); }

void tve_string_free(char* s) { std::free(s); }

tve_status tve_fan_parse(const char* json, tve_fan** out) {
  return guarded([&]() {
    auto* f = new tve_fan{toric::Fan::from_json_text(json ? json : "")};
    *out = f;
    return TVE_OK;
  });
}

void tve_fan_free(tve_fan* fan) { delete fan; }

tve_status tve_fan_validate(const tve_fan* fan, char** report_json) {
  return guarded([&]() {
    const auto& r = fan->fan.validate();
    *report_json = dup_string(report_to_json(r).dump(2));
    if (!r.ok()) {
      g_last_error = "fan is not valid";
      return TVE_E_INVALID;
    }
    return TVE_OK;
  });
}

tve_status tve_fan_orbits(const tve_fan* fan, char** json) {
  return guarded([&]() {
    fan->fan.require_valid();
    Json j = Json::array();
    for (const auto& o : fan->fan.orbits()) {
      Json e;
      e["cone"] = o.cone_id;
      e["dim"] = fan->fan.cone(o.cone_id).dim;
      e["quotient_rank"] = o.quotient_rank;
      auto mat = [&](const toric::ZMat& m) {
        Json rows = Json::array();
        for (int i = 0; i < m.rows(); ++i) {
          Json row = Json::array();
          for (int c = 0; c < m.cols(); ++c) row.push_back(m(i, c).get_si());
          rows.push_back(row);
        }
        return rows;
      };
      e["perp_basis"] = mat(o.perp_basis);
      e["quotient_proj"] = mat(o.quotient_proj);
      e["section"] = mat(o.section);
      j.push_back(e);
    }
    *json = dup_string(j.dump(2));
    return TVE_OK;
  });
}

tve_status tve_fan_relint_image(const tve_fan* fan, const char* phi_json, int cone_id, int* image_out) {
  return guarded([&]() {
    toric::ZMat phi = zmat_from_json_text(phi_json ? phi_json : "");
    auto img = fan->fan.relint_image_cone(phi, cone_id);
    *image_out = img.value_or(0);
    return TVE_OK;
  });
}

tve_status tve_symmetry_compute(const tve_fan* fan, tve_symmetry** out) {
  return guarded([&]() {
    *out = new tve_symmetry{toric::enumerate_G(fan->fan)};
    return TVE_OK;
  });
}

void tve_symmetry_free(tve_symmetry* sym) { delete sym; }

tve_status tve_symmetry_json(const tve_symmetry* sym, char** json) {
  return guarded([&]() {
    *json = dup_string(sym->sym.to_json_text());
    return TVE_OK;
  });
}

tve_status tve_law_parse(const tve_fan* fan, const tve_symmetry* sym, const char* json, tve_law** out) {
  return guarded([&]() {
    *out = new tve_law{
        toric::EnergyLaw::from_json_text(fan->fan, sym ? &sym->sym : nullptr, json ? json : "")};
    return TVE_OK;
  });
}

void tve_law_free(tve_law* law) { delete law; }

tve_status tve_law_covariance_check(const tve_fan* fan, const tve_law* law, const tve_symmetry* sym,
                                    int samples, uint64_t seed, char** json) {
  return guarded([&]() {
    auto r = toric::check_covariance_law(law->law, fan->fan, sym->sym, samples, seed);
    Json j;
    j["ok"] = r.ok;
    j["samples_checked"] = r.samples_checked;
    j["counterexample"] = r.counterexample.empty() ? Json() : Json(r.counterexample);
    *json = dup_string(j.dump(2));
    return r.ok ? TVE_OK : TVE_E_CHECK;
  });
}

tve_status tve_law_transport_check(const tve_fan* fan, const tve_law* law, const tve_symmetry* sym,
                                   char** json) {
  return guarded([&]() {
    std::string report = toric::transport_report_json(law->law, fan->fan, sym->sym);
    *json = dup_string(Json::parse(report).dump(2));
    bool all_ok = report.find("\"consistent\":false") == std::string::npos;
    if (!all_ok) {
      g_last_error = "energy data is inconsistent along a symmetry orbit";
      return TVE_E_CHECK;
    }
    return TVE_OK;
  });
}

tve_status tve_spectrum(const tve_fan* fan, const tve_symmetry* sym, const tve_law* law, int64_t radius,
                        char** json) {
  return guarded([&]() {
    Json j;
    Json cones = Json::array();
    for (const auto& o : fan->fan.orbits()) {
      Json e;
      e["cone"] = o.cone_id;
      e["quotient_rank"] = o.quotient_rank;
      if (o.quotient_rank >= 1 && radius >= 1) {
        Json orbits = Json::array();
        for (const auto& po : toric::primitive_reps(fan->fan, sym->sym, o.cone_id, radius)) {
          Json oe;
          oe["rep"] = po.rep;
          oe["orbit_size_in_box"] = po.members.size();
          if (law) oe["h"] = law->law.value(o.cone_id, po.rep);
          orbits.push_back(oe);
        }
        e["primitive_orbits"] = orbits;
      }
      cones.push_back(e);
    }
    j["cones"] = cones;
    if (law) {
      auto ci = toric::convergence_threshold(fan->fan, law->law);
      j["convergence"] = Json::parse(ci.to_json_text());
    }
    *json = dup_string(j.dump(2));
    return TVE_OK;
  });
}

tve_status tve_partition(const tve_fan* fan, const tve_law* law, const tve_symmetry* sym, double beta,
                         int64_t radius, const char* mode, int threads, char** json) {
  return guarded([&]() {
    auto r = toric::partition(fan->fan, law->law, sym ? &sym->sym : nullptr, beta, radius,
                              mode_from(mode), threads);
    *json = dup_string(r.to_json_text());
    return TVE_OK;
  });
}

tve_status tve_partition_sweep_csv(const tve_fan* fan, const tve_law* law, const tve_symmetry* sym,
                                   double beta_start, double beta_stop, double beta_step, int64_t radius,
                                   const char* mode, int threads, char** csv) {
  return guarded([&]() {
    *csv = dup_string(toric::sweep_csv(fan->fan, law->law, sym ? &sym->sym : nullptr, beta_start,
                                       beta_stop, beta_step, radius, mode_from(mode), threads));
    return TVE_OK;
  });
}

tve_status tve_gibbs(const tve_fan* fan, const tve_law* law, const char* r_json, double beta,
                     int64_t radius, const char* mode, int threads, char** json) {
  return guarded([&]() {
    auto r = toric::torsion_from_json_text(fan->fan, r_json ? r_json : "\"0/1\"");
    auto g = toric::gibbs_state(fan->fan, law->law, r, beta, radius, mode_from(mode), threads);
    *json = dup_string(g.to_json_text());
    return TVE_OK;
  });
}

tve_status tve_riemann_zeta(double beta, double* out) {
  return guarded([&]() {
    *out = toric::riemann_zeta(beta);
    return TVE_OK;
  });
}

tve_status tve_relations(const tve_fan* fan, const char* phi_json, const char* r_json,
                         const tve_law* law, double time_t_param, int64_t radius, const char* mode,
                         char** json) {
  return guarded([&]() {
    toric::ZMat phi = zmat_from_json_text(phi_json ? phi_json : "");
    auto r = toric::torsion_from_json_text(fan->fan, r_json ? r_json : "\"0/1\"");
    std::string ms = mode ? mode : "additive";
    toric::RepMode rm = ms == "multiplicative" ? toric::RepMode::Multiplicative : toric::RepMode::Additive;
    toric::MapAction act = toric::MapAction::build(fan->fan, phi);
    toric::TruncatedRep rep(fan->fan, rm, radius);

    Json reports = Json::array();
    double worst = 0;
    auto add = [&](const toric::RelationReport& rr) {
      reports.push_back(Json::parse(rr.to_json_text()));
      worst = std::max(worst, rr.max_deviation);
    };
    add(toric::check_conjugation(rep, act, r));
    add(toric::check_transfer(rep, act, r));
    if (law) add(toric::check_covariance(rep, act, time_t_param, law->law, r));

    Json j;
    j["radius"] = radius;
    j["mode"] = ms;
    j["max_deviation"] = worst;
    j["reports"] = reports;
    *json = dup_string(j.dump(2));
    if (worst > 1e-12) {
      g_last_error = "a crossed-product relation exceeded the 1e-12 deviation budget";
      return TVE_E_CHECK;
    }
    return TVE_OK;
  });
}

tve_status tve_frobenius_suite(int64_t n_max, int rho_max, const char* primes_json, int random_trials,
                               uint64_t seed, char** json) {
  return guarded([&]() {
    std::vector<int64_t> primes = {2, 3};
    if (primes_json && *primes_json) {
      Json pj = Json::parse(primes_json);
      primes.clear();
      for (const auto& p : pj) primes.push_back(p.get<int64_t>());
    }
    auto r = toric::frobenius_suite(n_max, rho_max, primes, random_trials, seed);
    Json j;
    j["ok"] = r.ok;
    j["exhaustive_checked"] = r.exhaustive_checked;
    j["random_checked"] = r.random_checked;
    j["witness"] = r.witness.empty() ? Json() : Json::parse(r.witness);
    *json = dup_string(j.dump(2));
    return r.ok ? TVE_OK : TVE_E_CHECK;
  });
}

tve_status tve_levels(const tve_fan* fan, int64_t n, char** json) {
  return guarded([&]() {
    auto r = toric::cyclotomic_level_count(fan->fan, n);
    Json j;
    j["n"] = n;
    j["additive"] = r.additive.get_str();
    j["multiplicative"] = r.multiplicative.get_str();
    *json = dup_string(j.dump(2));
    return TVE_OK;
  });
}

tve_status tve_transition_check(const tve_fan* fan, const tve_symmetry* sym, int64_t n, int64_t t,
                                char** json) {
  return guarded([&]() {
    auto r = toric::transition_map_check(fan->fan, n, t, sym ? &sym->sym : nullptr);
    Json j;
    j["n"] = n;
    j["t"] = t;
    j["surjective"] = r.surjective;
    j["equivariant"] = r.equivariant;
    j["points_checked"] = r.points_checked;
    *json = dup_string(j.dump(2));
    return (r.surjective && r.equivariant) ? TVE_OK : TVE_E_CHECK;
  });
}

tve_status tve_height_point(const char* coords_json, int affine, char** json) {
  return guarded([&]() {
    Json cj = Json::parse(coords_json ? coords_json : "");
    std::vector<toric::QQ> coords;
    for (const auto& c : cj)
      coords.push_back(qq_from_string(c.is_string() ? c.get<std::string>() : c.dump()));
    toric::HeightValue hv;
    toric::ProjPoint p;
    if (affine) {
      hv = toric::height_affine(coords);
      std::vector<toric::QQ> full;
      full.emplace_back(1);
      for (auto& q : coords) full.push_back(q);
      p = toric::proj_point(full);
    } else {
      p = toric::proj_point(coords);
      hv = toric::height_proj(p);
    }
    Json j;
    j["point"] = p.str();
    j["H"] = hv.H.get_str();
    j["h"] = hv.h;
    *json = dup_string(j.dump(2));
    return TVE_OK;
  });
}

tve_status tve_height_enumerate(int d, int64_t max_height, char** json) {
  return guarded([&]() {
    auto pts = toric::enumerate_bounded_height(d, max_height);
    Json j;
    j["d"] = d;
    j["max_height"] = max_height;
    j["count"] = pts.size();
    Json arr = Json::array();
    for (const auto& p : pts) {
      Json pj = Json::array();
      for (const auto& c : p.x) pj.push_back(c.get_si());
      arr.push_back(pj);
    }
    j["points"] = arr;
    *json = dup_string(j.dump(2));
    return TVE_OK;
  });
}

tve_status tve_height_zeta(const char* spec_json, double beta, char** json) {
  return guarded([&]() {
    Json sj = Json::parse(spec_json ? spec_json : "");
    std::string kind = sj.at("kind").get<std::string>();
    toric::HeightZeta z;
    if (kind == "family") {
      std::vector<toric::QQ> coords;
      for (const auto& c : sj.at("coords"))
        coords.push_back(qq_from_string(c.is_string() ? c.get<std::string>() : c.dump()));
      auto mp = toric::MonomialPoint::make(qq_from_string(sj.at("alpha").get<std::string>()), coords);
      z = toric::height_zeta_family(mp, beta, sj.at("radius").get<int64_t>());
    } else if (kind == "geometric") {
      z = toric::height_zeta_geometric(toric::ZZ(sj.at("base").get<std::string>()),
                                       sj.at("kmax").get<int64_t>(), beta);
    } else if (kind == "bounded") {
      auto pts = toric::enumerate_bounded_height(sj.at("d").get<int>(), sj.at("max_height").get<int64_t>());
      z = toric::height_zeta_points(pts, beta);
    } else {
      throw toric::ParseError("unknown height-zeta kind: " + kind);
    }
    *json = dup_string(z.to_json_text(beta));
    return TVE_OK;
  });
}

tve_status tve_height_family_csv(const char* spec_json, char** csv) {
  return guarded([&]() {
    Json sj = Json::parse(spec_json ? spec_json : "");
    std::vector<toric::QQ> coords;
    for (const auto& c : sj.at("coords"))
      coords.push_back(qq_from_string(c.is_string() ? c.get<std::string>() : c.dump()));
    auto mp = toric::MonomialPoint::make(qq_from_string(sj.at("alpha").get<std::string>()), coords);
    int digits = sj.contains("max_digits") ? sj["max_digits"].get<int>() : 40;
    *csv = dup_string(toric::family_csv(mp, sj.at("radius").get<int64_t>(), digits));
    return TVE_OK;
  });
}

tve_status tve_height_scaling_suite(int d, int trials, uint64_t seed, char** json) {
  return guarded([&]() {
    auto r = toric::height_scaling_suite(d, trials, seed);
    Json j;
    j["ok"] = r.ok;
    j["trials"] = r.trials;
    j["counterexample"] = r.counterexample.empty() ? Json() : Json(r.counterexample);
    *json = dup_string(j.dump(2));
    return r.ok ? TVE_OK : TVE_E_CHECK;
  });
}

tve_status tve_torified(const char* spec_json, double beta, int64_t radius, const char* mode,
                        const char* monoid, int threads, char** json) {
  return guarded([&]() {
    Json sj = Json::parse(spec_json ? spec_json : "");
    double c = sj.at("c").get<double>();
    std::vector<toric::TorifiedComponent> comps;
    for (const auto& e : sj.at("components")) {
      toric::TorifiedComponent tc;
      tc.dim = e.at("dim").get<int>();
      if (tc.dim > 0) {
        if (e.contains("gram")) {
          int n = int(e["gram"].size());
          tc.gram.num = toric::ZMat(n, n);
          for (int i = 0; i < n; ++i)
            for (int jj = 0; jj < n; ++jj) tc.gram.num(i, jj) = toric::ZZ(e["gram"][i][jj].get<long>());
          if (e.contains("den")) tc.gram.den = toric::ZZ(e["den"].get<long>());
        } else {
          tc.gram.num = toric::ZMat::identity(tc.dim);
        }
      }
      comps.push_back(tc);
    }
    std::string ms = monoid ? monoid : "Z";
    toric::IndexMonoid im = ms == "N" ? toric::IndexMonoid::N : toric::IndexMonoid::Z;
    auto r = toric::torified_partition(comps, c, beta, radius, mode_from(mode), im, threads);
    *json = dup_string(r.to_json_text());
    return TVE_OK;
  });
}

}  // extern "C"
