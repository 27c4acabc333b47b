// Command-line front end. Talks to the engine exclusively through the C
// API in toric_c.h, the same surface an embedding application would use.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "toric_c.h"

namespace {

int status_to_exit(tve_status s) {
  switch (s) {
    case TVE_OK: return 0;
    case TVE_E_INVALID:
    case TVE_E_CHECK: return 1;
    default: return 2;
  }
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A law argument is either inline JSON or a path to a JSON file.
std::string law_text(const std::string& arg) {
  for (char c : arg) {
    if (isspace(c)) continue;
    return c == '{' ? arg : slurp(arg);
  }
  return arg;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::fputs(text.c_str(), stdout);
    if (!text.empty() && text.back() != '\n') std::fputc('\n', stdout);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    out << text;
  }
}

struct FanGuard {
  tve_fan* f = nullptr;
  ~FanGuard() { tve_fan_free(f); }
};
struct SymGuard {
  tve_symmetry* s = nullptr;
  ~SymGuard() { tve_symmetry_free(s); }
};
struct LawGuard {
  tve_law* l = nullptr;
  ~LawGuard() { tve_law_free(l); }
};
struct StrGuard {
  char* s = nullptr;
  ~StrGuard() { tve_string_free(s); }
};

int fail(tve_status s) {
  std::fprintf(stderr, "error (%s): %s\n", tve_status_name(s), tve_last_error());
  return status_to_exit(s);
}

// Loads and validates a fan; on validation failure the report is printed
// and the nonzero exit code propagates.
int load_fan(const std::string& path, FanGuard& fan, bool print_report = false) {
  tve_status s = tve_fan_parse(slurp(path).c_str(), &fan.f);
  if (s != TVE_OK) return fail(s);
  StrGuard report;
  s = tve_fan_validate(fan.f, &report.s);
  if (print_report || s != TVE_OK) emit(report.s ? report.s : "", "");
  if (s != TVE_OK) return status_to_exit(s);
  return -1;  // proceed
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"toric endomotive workbench"};
  app.set_version_flag("--version", tve_version());
  app.require_subcommand(1);

  std::string fan_path, law_arg, out_path, mode = "additive", monoid = "Z";
  std::string phi_json, r_json = "\"0/1\"", spec_json, coords_json, format = "json";
  double beta = 2.0, beta_start = 0, beta_stop = 0, beta_step = 0.5, time_t_param = 0.7;
  std::int64_t radius = 100, level_n = 2, transition_t = 0, max_height = 10, kmax = 0;
  std::int64_t nmax = 8, trials = 1000;
  int rhomax = 2, dim = 1, threads = 1;
  std::uint64_t seed = 1;
  bool affine = false;
  std::string primes = "[2,3]";

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_path, "write output to a file instead of stdout");
  };

  auto* validate = app.add_subcommand("validate", "validate a fan file and print the report");
  validate->add_option("--fan", fan_path, "fan JSON file")->required();
  add_common(validate);

  auto* orbits = app.add_subcommand("orbits", "per-cone quotient lattices and dual bases");
  orbits->add_option("--fan", fan_path)->required();
  add_common(orbits);

  auto* symmetries = app.add_subcommand("symmetries", "primitive compatible maps and cone permutations");
  symmetries->add_option("--fan", fan_path)->required();
  add_common(symmetries);

  auto* spectrum = app.add_subcommand("spectrum", "primitive orbit representatives and abscissae");
  spectrum->add_option("--fan", fan_path)->required();
  spectrum->add_option("--law", law_arg, "law JSON file or inline JSON");
  spectrum->add_option("--radius", radius);
  bool transport = false;
  spectrum->add_flag("--transport", transport, "also verify the law along symmetry orbits");
  add_common(spectrum);

  auto* zeta = app.add_subcommand("zeta", "truncated partition function with tail bound");
  zeta->add_option("--fan", fan_path)->required();
  zeta->add_option("--law", law_arg)->required();
  zeta->add_option("--beta", beta);
  zeta->add_option("--beta-start", beta_start);
  zeta->add_option("--beta-stop", beta_stop);
  zeta->add_option("--beta-step", beta_step);
  zeta->add_option("--radius", radius);
  zeta->add_option("--mode", mode, "additive | multiplicative | factored");
  zeta->add_option("--threads", threads);
  zeta->add_option("--format", format, "json | csv (csv for sweeps)");
  add_common(zeta);

  auto* gibbs = app.add_subcommand("gibbs", "equilibrium state value on a group-algebra generator");
  gibbs->add_option("--fan", fan_path)->required();
  gibbs->add_option("--law", law_arg)->required();
  gibbs->add_option("--r", r_json, "fraction (broadcast) or JSON array per cone");
  gibbs->add_option("--beta", beta);
  gibbs->add_option("--radius", radius);
  gibbs->add_option("--mode", mode);
  gibbs->add_option("--threads", threads);
  add_common(gibbs);

  auto* relations = app.add_subcommand("relations", "crossed-product identities on a finite truncation");
  relations->add_option("--fan", fan_path)->required();
  relations->add_option("--phi", phi_json, "matrix JSON, row-major")->required();
  relations->add_option("--r", r_json);
  relations->add_option("--law", law_arg, "adds the covariance check");
  relations->add_option("--time", time_t_param, "time parameter for the covariance check");
  relations->add_option("--radius", radius);
  relations->add_option("--mode", mode, "additive | multiplicative");
  add_common(relations);

  auto* frobenius = app.add_subcommand("frobenius", "Frobenius-lift verification battery");
  frobenius->add_option("--nmax", nmax);
  frobenius->add_option("--rhomax", rhomax);
  frobenius->add_option("--primes", primes, "JSON list");
  frobenius->add_option("--trials", trials, "random trials after the exhaustive grid");
  frobenius->add_option("--seed", seed);
  add_common(frobenius);

  auto* levels = app.add_subcommand("levels", "cyclotomic level counts and transition checks");
  levels->add_option("--fan", fan_path)->required();
  levels->add_option("--n", level_n)->required();
  levels->add_option("--transition", transition_t, "also check the level t*n -> n reduction");
  add_common(levels);

  auto* height = app.add_subcommand("height", "logarithmic heights of rational points");
  height->add_option("--coords", coords_json, "JSON array of integers/fractions");
  height->add_flag("--affine", affine, "embed as (1 : x)");
  height->add_option("--enumerate", dim, "enumerate P^d points of bounded height");
  height->add_option("--max-height", max_height);
  height->add_option("--scaling-suite", trials, "random exact scaling checks on P^2");
  height->add_option("--seed", seed);
  add_common(height);

  auto* hzeta = app.add_subcommand("height-zeta", "logarithmic height zeta sums");
  hzeta->add_option("--spec", spec_json,
                    "{\"kind\":\"family\"|\"geometric\"|\"bounded\", ...}")->required();
  hzeta->add_option("--beta", beta);
  hzeta->add_option("--format", format, "json | csv (csv streams the family elements)");
  add_common(hzeta);

  auto* torified = app.add_subcommand("torified", "partition functions of disjoint tori");
  torified->add_option("--spec", spec_json, "{\"c\":...,\"components\":[{\"dim\":...,\"gram\":...}]}")
      ->required();
  torified->add_option("--beta", beta);
  torified->add_option("--radius", radius);
  torified->add_option("--mode", mode);
  torified->add_option("--monoid", monoid, "Z | N");
  torified->add_option("--threads", threads);
  add_common(torified);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);  // prints usage or help text
    return rc == 0 ? 0 : 2;
  }

  try {
    if (validate->parsed()) {
      FanGuard fan;
      tve_status s = tve_fan_parse(slurp(fan_path).c_str(), &fan.f);
      if (s != TVE_OK) return fail(s);
      StrGuard report;
      s = tve_fan_validate(fan.f, &report.s);
      emit(report.s, out_path);
      return status_to_exit(s);
    }

    if (orbits->parsed()) {
      FanGuard fan;
      if (int rc = load_fan(fan_path, fan); rc >= 0) return rc;
      StrGuard js;
      tve_status s = tve_fan_orbits(fan.f, &js.s);
      if (s != TVE_OK) return fail(s);
      emit(js.s, out_path);
      return 0;
    }

    if (symmetries->parsed()) {
      FanGuard fan;
      if (int rc = load_fan(fan_path, fan); rc >= 0) return rc;
      SymGuard sym;
      tve_status s = tve_symmetry_compute(fan.f, &sym.s);
      if (s != TVE_OK) return fail(s);
      StrGuard js;
      s = tve_symmetry_json(sym.s, &js.s);
      if (s != TVE_OK) return fail(s);
      emit(js.s, out_path);
      return 0;
    }

    if (spectrum->parsed()) {
      FanGuard fan;
      if (int rc = load_fan(fan_path, fan); rc >= 0) return rc;
      SymGuard sym;
      if (tve_status s = tve_symmetry_compute(fan.f, &sym.s); s != TVE_OK) return fail(s);
      LawGuard law;
      if (!law_arg.empty())
        if (tve_status s = tve_law_parse(fan.f, sym.s, law_text(law_arg).c_str(), &law.l); s != TVE_OK)
          return fail(s);
      StrGuard js;
      tve_status s = tve_spectrum(fan.f, sym.s, law.l, radius, &js.s);
      if (s != TVE_OK) return fail(s);
      emit(js.s, out_path);
      if (transport && law.l) {
        StrGuard tj;
        tve_status s2 = tve_law_transport_check(fan.f, law.l, sym.s, &tj.s);
        if (tj.s) emit(tj.s, out_path);
        if (s2 != TVE_OK && s2 != TVE_E_CHECK) return fail(s2);
        return status_to_exit(s2);
      }
      return 0;
    }

    if (zeta->parsed()) {
      FanGuard fan;
      if (int rc = load_fan(fan_path, fan); rc >= 0) return rc;
      SymGuard sym;
      if (tve_status s = tve_symmetry_compute(fan.f, &sym.s); s != TVE_OK) return fail(s);
      LawGuard law;
      if (tve_status s = tve_law_parse(fan.f, sym.s, law_text(law_arg).c_str(), &law.l); s != TVE_OK)
        return fail(s);
      StrGuard js;
      bool sweep = zeta->count("--beta-start") && zeta->count("--beta-stop");
      tve_status s;
      if (sweep || format == "csv") {
        if (!sweep) {
          beta_start = beta;
          beta_stop = beta;
        }
        s = tve_partition_sweep_csv(fan.f, law.l, sym.s, beta_start, beta_stop, beta_step, radius,
                                    mode.c_str(), threads, &js.s);
      } else {
        s = tve_partition(fan.f, law.l, sym.s, beta, radius, mode.c_str(), threads, &js.s);
      }
      if (s != TVE_OK) return fail(s);
      emit(js.s, out_path);
      return 0;
    }

    if (gibbs->parsed()) {
      FanGuard fan;
      if (int rc = load_fan(fan_path, fan); rc >= 0) return rc;
      SymGuard sym;
      if (tve_status s = tve_symmetry_compute(fan.f, &sym.s); s != TVE_OK) return fail(s);
      LawGuard law;
      if (tve_status s = tve_law_parse(fan.f, sym.s, law_text(law_arg).c_str(), &law.l); s != TVE_OK)
        return fail(s);
      std::string r_arg = r_json;
      if (!r_arg.empty() && r_arg[0] != '"' && r_arg[0] != '[') r_arg = "\"" + r_arg + "\"";
      StrGuard js;
      tve_status s = tve_gibbs(fan.f, law.l, r_arg.c_str(), beta, radius, mode.c_str(), threads, &js.s);
      if (s != TVE_OK) return fail(s);
      emit(js.s, out_path);
      return 0;
    }

    if (relations->parsed()) {
      FanGuard fan;
      if (int rc = load_fan(fan_path, fan); rc >= 0) return rc;
      LawGuard law;
      if (!law_arg.empty()) {
        SymGuard sym;
        if (tve_status s = tve_symmetry_compute(fan.f, &sym.s); s != TVE_OK) return fail(s);
        if (tve_status s = tve_law_parse(fan.f, sym.s, law_text(law_arg).c_str(), &law.l); s != TVE_OK)
          return fail(s);
      }
      std::string r_arg = r_json;
      if (!r_arg.empty() && r_arg[0] != '"' && r_arg[0] != '[') r_arg = "\"" + r_arg + "\"";
      StrGuard js;
      tve_status s = tve_relations(fan.f, phi_json.c_str(), r_arg.c_str(), law.l, time_t_param, radius,
                                   mode.c_str(), &js.s);
      if (js.s) emit(js.s, out_path);
      if (s != TVE_OK && s != TVE_E_CHECK) return fail(s);
      return status_to_exit(s);
    }

    if (frobenius->parsed()) {
      StrGuard js;
      tve_status s = tve_frobenius_suite(nmax, rhomax, primes.c_str(), int(trials), seed, &js.s);
      if (js.s) emit(js.s, out_path);
      if (s != TVE_OK && s != TVE_E_CHECK) return fail(s);
      return status_to_exit(s);
    }

    if (levels->parsed()) {
      FanGuard fan;
      if (int rc = load_fan(fan_path, fan); rc >= 0) return rc;
      StrGuard js;
      tve_status s = tve_levels(fan.f, level_n, &js.s);
      if (s != TVE_OK) return fail(s);
      emit(js.s, out_path);
      if (levels->count("--transition")) {
        SymGuard sym;
        if (tve_status s2 = tve_symmetry_compute(fan.f, &sym.s); s2 != TVE_OK) return fail(s2);
        StrGuard tj;
        tve_status s2 = tve_transition_check(fan.f, sym.s, level_n, transition_t, &tj.s);
        if (tj.s) emit(tj.s, out_path);
        if (s2 != TVE_OK && s2 != TVE_E_CHECK) return fail(s2);
        return status_to_exit(s2);
      }
      return 0;
    }

    if (height->parsed()) {
      StrGuard js;
      tve_status s;
      if (height->count("--coords")) {
        s = tve_height_point(coords_json.c_str(), affine ? 1 : 0, &js.s);
      } else if (height->count("--enumerate")) {
        s = tve_height_enumerate(dim, max_height, &js.s);
      } else if (height->count("--scaling-suite")) {
        s = tve_height_scaling_suite(2, int(trials), seed, &js.s);
      } else {
        std::fprintf(stderr, "height: one of --coords, --enumerate, --scaling-suite is required\n");
        return 2;
      }
      if (js.s) emit(js.s, out_path);
      if (s != TVE_OK && s != TVE_E_CHECK) return fail(s);
      return status_to_exit(s);
    }

    if (hzeta->parsed()) {
      StrGuard js;
      tve_status s = format == "csv" ? tve_height_family_csv(spec_json.c_str(), &js.s)
                                     : tve_height_zeta(spec_json.c_str(), beta, &js.s);
      if (s != TVE_OK) return fail(s);
      emit(js.s, out_path);
      return 0;
    }

    if (torified->parsed()) {
      StrGuard js;
      tve_status s = tve_torified(spec_json.c_str(), beta, radius, mode.c_str(), monoid.c_str(), threads,
                                  &js.s);
      if (s != TVE_OK) return fail(s);
      emit(js.s, out_path);
      return 0;
    }
  } catch (const CLI::Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
