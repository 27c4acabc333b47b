#include "toric/qsm.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace toric {

namespace {
using Json = nlohmann::ordered_json;

constexpr double kPi = std::numbers::pi_v<double>;

std::string fmt(double x) {
  char buf[40];
  snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

double riemann_zeta(double beta) {
  if (!(beta >= 1.05 - 1e-12))
    throw DomainError("riemann_zeta requires beta >= 1.05");
  const double denom = 1.0 - std::pow(2.0, 1.0 - beta);
  const double lam = 3.0 + std::sqrt(8.0);
  int n = int(std::ceil(std::log(3.0 / (1e-13 * denom)) / std::log(lam)));
  n = std::clamp(n, 20, 64);
  // d_k of the accelerated alternating series, by term recurrence.
  long double term = 1.0L / n;  // i = 0
  long double acc = term;
  std::vector<long double> dk(n + 1);
  dk[0] = n * acc;
  for (int i = 1; i <= n; ++i) {
    term *= 4.0L * (n + i - 1) * (n - i + 1) / ((2.0L * i) * (2.0L * i - 1));
    acc += term;
    dk[i] = n * acc;
  }
  long double s = 0;
  int sign = 1;
  for (int k = 0; k < n; ++k) {
    s += sign * (dk[k] - dk[n]) * std::pow((long double)(k + 1), (long double)-beta);
    sign = -sign;
  }
  long double z = -s / (dk[n] * (long double)denom);
  return double(z);
}

std::string mode_name(PartitionMode m) {
  switch (m) {
    case PartitionMode::Additive: return "additive";
    case PartitionMode::Multiplicative: return "multiplicative";
    case PartitionMode::Factored: return "factored";
  }
  return "?";
}

std::string PartitionResult::to_json_text() const {
  Json j;
  j["beta"] = beta;
  j["mode"] = mode_name(mode);
  j["value"] = value;
  j["tail_bound"] = tail_bound;
  j["radius"] = radius;
  j["m"] = m;
  j["m_prime"] = m_prime;
  return j.dump();
}

namespace {

// Sup-norm shell |xi| = s in Z^dim: split on the first coordinate that
// attains +-s; earlier coordinates stay strictly inside.
template <typename Fn>
void for_shell_z(int dim, std::int64_t s, Fn&& fn) {
  IVec x(dim);
  std::function<void(int, int)> fill = [&](int pos, int pivot) {
    if (pos == dim) {
      fn(const_cast<const IVec&>(x));
      return;
    }
    std::int64_t lo, hi;
    if (pos < pivot) {
      lo = -(s - 1);
      hi = s - 1;
    } else if (pos == pivot) {
      x[pos] = -s;
      fill(pos + 1, pivot);
      x[pos] = s;
      fill(pos + 1, pivot);
      return;
    } else {
      lo = -s;
      hi = s;
    }
    for (std::int64_t v = lo; v <= hi; ++v) {
      x[pos] = v;
      fill(pos + 1, pivot);
    }
  };
  for (int pivot = 0; pivot < dim; ++pivot) fill(0, pivot);
}

// Shell max(xi) = s in N^dim (all coordinates >= 0).
template <typename Fn>
void for_shell_n(int dim, std::int64_t s, Fn&& fn) {
  IVec x(dim);
  std::function<void(int, int)> fill = [&](int pos, int pivot) {
    if (pos == dim) {
      fn(const_cast<const IVec&>(x));
      return;
    }
    if (pos == pivot) {
      x[pos] = s;
      fill(pos + 1, pivot);
      return;
    }
    std::int64_t lo = 0, hi = (pos < pivot) ? s - 1 : s;
    for (std::int64_t v = lo; v <= hi; ++v) {
      x[pos] = v;
      fill(pos + 1, pivot);
    }
  };
  for (int pivot = 0; pivot < dim; ++pivot) fill(0, pivot);
}

}  // namespace

std::vector<double> shell_sums(int dim, std::int64_t radius, IndexMonoid monoid,
                               const std::function<double(const IVec&)>& term, int threads) {
  std::vector<double> out(size_t(std::max<std::int64_t>(radius, 0)), 0.0);
  if (dim == 0 || radius < 1) return out;
  threads = std::max(1, threads);
  auto worker = [&](int w) {
    for (std::int64_t s = 1 + w; s <= radius; s += threads) {
      double acc = 0;
      if (monoid == IndexMonoid::Z)
        for_shell_z(dim, s, [&](const IVec& x) { acc += term(x); });
      else
        for_shell_n(dim, s, [&](const IVec& x) { acc += term(x); });
      out[size_t(s - 1)] = acc;
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::future<void>> futs;
    for (int w = 0; w < threads; ++w) futs.push_back(std::async(std::launch::async, worker, w));
    for (auto& f : futs) f.get();
  }
  return out;
}

double spectral_tail_bound(int dim, double c, double beta, double kappa, std::int64_t radius,
                           IndexMonoid monoid) {
  double a = c * beta - dim;
  if (!(a > 0)) throw DomainError("divergent spectral sum: c*beta <= quotient rank");
  // Shell cardinality constants: 2d*3^{d-1} over Z^d, d*2^{d-1} over N^d.
  double cd = monoid == IndexMonoid::N ? dim * std::pow(2.0, dim - 1) : 2.0 * dim * std::pow(3.0, dim - 1);
  return std::pow(kappa, -beta) * cd * std::pow(double(radius), -a) / a;
}

namespace {

double tail_bound_for(int dim, double c, double beta, double kappa, std::int64_t radius, bool monoid_n) {
  return spectral_tail_bound(dim, c, beta, kappa, radius, monoid_n ? IndexMonoid::N : IndexMonoid::Z);
}

struct BlockSum {
  double value = 0;
  double tail = 0;
};

BlockSum cone_block(const Fan& fan, const EnergyLaw& law, int cone_id, double beta, std::int64_t radius,
                    int threads) {
  const OrbitLattice& o = fan.orbit(cone_id);
  BlockSum b;
  if (o.quotient_rank == 0) return b;
  auto term = [&](const IVec& xi) { return std::pow(law.value(cone_id, xi), -beta); };
  auto shells = shell_sums(o.quotient_rank, radius, IndexMonoid::Z, term, threads);
  for (double s : shells) b.value += s;
  b.tail = tail_bound_for(o.quotient_rank, law.c(), beta, law.growth_floor(cone_id), radius, false);
  return b;
}

}  // namespace

PartitionResult partition(const Fan& fan, const EnergyLaw& law, const SymmetryData* sym, double beta,
                          std::int64_t radius, PartitionMode mode, int threads) {
  fan.require_valid();
  if (radius < 1) throw DomainError("radius must be >= 1");
  PartitionResult res;
  res.beta = beta;
  res.mode = mode;
  res.radius = radius;
  res.m = fan.num_cones();
  for (const auto& o : fan.orbits())
    if (o.quotient_rank >= 1) ++res.m_prime;

  if (mode == PartitionMode::Additive) {
    double v = 0, t = 0;
    for (const Cone& c : fan.cones()) {
      BlockSum b = cone_block(fan, law, c.id, beta, radius, threads);
      v += b.value;
      t += b.tail;
    }
    res.value = v;
    res.tail_bound = t;
    return res;
  }

  if (mode == PartitionMode::Multiplicative) {
    double prod = 1, prod_hi = 1;
    for (const Cone& c : fan.cones()) {
      if (fan.orbit(c.id).quotient_rank == 0) continue;  // empty spectrum: factor 1
      BlockSum b = cone_block(fan, law, c.id, beta, radius, threads);
      prod *= b.value;
      prod_hi *= b.value + b.tail;
    }
    res.value = prod;
    res.tail_bound = prod_hi - prod;
    return res;
  }

  // Factored: zeta(c*beta)^{m'} times the primitive-vector sums. Agrees
  // with the multiplicative mode within combined tails.
  if (law.kind() != EnergyLaw::Kind::OrbitTable)
    throw DomainError("the factored form needs an orbit-table law");
  // The scalar fallback family {nI} is the split case with trivial group.
  if (!sym || !(sym->splits || sym->fallback))
    throw DomainError("the factored form needs split symmetry data (S = N x G)");
  double zeta = riemann_zeta(law.c() * beta);
  double prod = 1, prod_hi = 1;
  for (const Cone& c : fan.cones()) {
    const OrbitLattice& o = fan.orbit(c.id);
    if (o.quotient_rank == 0) continue;
    std::int64_t reff = std::min<std::int64_t>(radius, law.table_radius());
    auto term = [&](const IVec& xi) {
      if (gcd_abs(xi) != 1) return 0.0;
      return std::pow(law.value(c.id, xi), -beta);
    };
    auto shells = shell_sums(o.quotient_rank, reff, IndexMonoid::Z, term, threads);
    double p = 0;
    for (double s : shells) p += s;
    double q = o.quotient_rank == 1
                   ? 0.0  // every primitive vector of Z^1 lies in any box
                   : tail_bound_for(o.quotient_rank, law.c(), beta, law.growth_floor(c.id), reff, false);
    prod *= p;
    prod_hi *= p + q;
  }
  double zpow = std::pow(zeta, res.m_prime);
  res.value = zpow * prod;
  res.tail_bound = zpow * (prod_hi - prod);
  if (res.m_prime > 0)  // certified zeta error, propagated through the power
    res.tail_bound += res.m_prime * std::pow(zeta, res.m_prime - 1) * 1e-12 * prod_hi;
  return res;
}

void TorsionVec::reduce() {
  if (den <= 0) throw DomainError("torsion denominator must be positive");
  for (auto& v : num) {
    v %= den;
    if (v < 0) v += den;
  }
}

TorsionTuple torsion_zero(const Fan& fan, std::int64_t den) {
  fan.require_valid();
  TorsionTuple r;
  for (const auto& o : fan.orbits()) {
    TorsionVec t;
    t.den = den;
    t.num.assign(o.quotient_rank, 0);
    r.comps.push_back(t);
  }
  return r;
}

TorsionTuple torsion_from_json_text(const Fan& fan, const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("bad torsion JSON: ") + e.what());
  }
  fan.require_valid();

  auto parse_frac = [](const std::string& s) -> std::pair<std::int64_t, std::int64_t> {
    auto slash = s.find('/');
    if (slash == std::string::npos) return {std::stoll(s), 1};
    return {std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1))};
  };

  TorsionTuple r = torsion_zero(fan);
  if (j.is_string()) {
    // One fraction, broadcast to every coordinate of every positive-rank cone.
    auto [num, den] = parse_frac(j.get<std::string>());
    for (auto& c : r.comps) {
      c.den = den;
      for (auto& v : c.num) v = num;
      c.reduce();
    }
    return r;
  }
  if (!j.is_array() || int(j.size()) != fan.num_cones())
    throw ParseError("torsion JSON must be a fraction string or one array per cone");
  for (int k = 0; k < fan.num_cones(); ++k) {
    const Json& cj = j[k];
    TorsionVec& tv = r.comps[k];
    if (int(cj.size()) != int(tv.num.size()))
      throw ParseError("torsion entry " + std::to_string(k + 1) + " has the wrong length");
    std::int64_t den = 1;
    std::vector<std::pair<std::int64_t, std::int64_t>> fr;
    for (const Json& e : cj) {
      auto f = parse_frac(e.get<std::string>());
      if (f.second <= 0) throw ParseError("torsion denominators must be positive");
      den = std::lcm(den, f.second);
      fr.push_back(f);
    }
    tv.den = den;
    for (size_t i = 0; i < fr.size(); ++i) tv.num[i] = fr[i].first * (den / fr[i].second);
    tv.reduce();
  }
  return r;
}

std::string torsion_to_json_text(const TorsionTuple& r) {
  Json j = Json::array();
  for (const auto& c : r.comps) {
    Json cj = Json::array();
    for (auto v : c.num) cj.push_back(std::to_string(v) + "/" + std::to_string(c.den));
    j.push_back(cj);
  }
  return j.dump();
}

TorsionTuple torsion_negate(const TorsionTuple& r) {
  TorsionTuple out = r;
  for (auto& c : out.comps) {
    for (auto& v : c.num) v = -v;
    c.reduce();
  }
  return out;
}

TorsionTuple apply_symmetry(const TorsionTuple& r, const std::vector<std::int64_t>& units) {
  if (units.empty()) throw DomainError("no unit given");
  TorsionTuple out = r;
  for (size_t k = 0; k < out.comps.size(); ++k) {
    std::int64_t u = units.size() == 1 ? units[0] : units.at(k);
    TorsionVec& c = out.comps[k];
    std::int64_t um = ((u % c.den) + c.den) % c.den;
    if (std::gcd(um == 0 ? c.den : um, c.den) != 1)
      throw DomainError("gamma = " + std::to_string(u) + " is not a unit mod " + std::to_string(c.den));
    for (auto& v : c.num) v = v * um;
    c.reduce();
  }
  return out;
}

std::string GibbsValue::to_json_text() const {
  Json j;
  j["beta"] = beta;
  j["r"] = r_json.empty() ? Json() : Json::parse(r_json);
  j["value_re"] = value.real();
  j["value_im"] = value.imag();
  j["normalization"] = normalization;
  j["tail_bound"] = tail_bound;
  j["radius"] = radius;
  return j.dump();
}

GibbsValue gibbs_state(const Fan& fan, const EnergyLaw& law, const TorsionTuple& r, double beta,
                       std::int64_t radius, PartitionMode mode, int threads) {
  fan.require_valid();
  if (int(r.comps.size()) != fan.num_cones()) throw DomainError("torsion tuple size mismatch");
  if (mode == PartitionMode::Factored) throw DomainError("gibbs_state supports additive or multiplicative mode");

  GibbsValue out;
  out.beta = beta;
  out.radius = radius;
  out.r_json = torsion_to_json_text(r);

  auto cone_complex = [&](int k_index) -> std::pair<std::vector<std::complex<double>>, double> {
    const Cone& c = fan.cones()[k_index];
    const OrbitLattice& o = fan.orbit(c.id);
    const TorsionVec& rk = r.comps[k_index];
    std::vector<std::complex<double>> shells_c(size_t(radius), {0, 0});
    if (o.quotient_rank == 0) return {shells_c, 0.0};
    // Re and Im parts accumulated as two deterministic shell sums.
    auto phase_index = [&](const IVec& xi) {
      std::int64_t acc = 0;
      for (size_t i = 0; i < xi.size(); ++i)
        acc = (acc + (rk.num[i] % rk.den) * (xi[i] % rk.den)) % rk.den;
      if (acc < 0) acc += rk.den;
      return acc;
    };
    auto term_re = [&](const IVec& xi) {
      double h = std::pow(law.value(c.id, xi), -beta);
      return h * std::cos(2 * kPi * double(phase_index(xi)) / double(rk.den));
    };
    auto term_im = [&](const IVec& xi) {
      double h = std::pow(law.value(c.id, xi), -beta);
      return h * std::sin(2 * kPi * double(phase_index(xi)) / double(rk.den));
    };
    auto sre = shell_sums(o.quotient_rank, radius, IndexMonoid::Z, term_re, threads);
    auto sim = shell_sums(o.quotient_rank, radius, IndexMonoid::Z, term_im, threads);
    for (std::int64_t s = 0; s < radius; ++s) shells_c[size_t(s)] = {sre[size_t(s)], sim[size_t(s)]};
    double tail = tail_bound_for(o.quotient_rank, law.c(), beta, law.growth_floor(c.id), radius, false);
    return {shells_c, tail};
  };

  if (mode == PartitionMode::Additive) {
    std::complex<double> num = 0;
    double den = 0, tail = 0;
    for (int k = 0; k < fan.num_cones(); ++k) {
      const Cone& c = fan.cones()[k];
      if (fan.orbit(c.id).quotient_rank == 0) continue;
      auto [shells_c, t] = cone_complex(k);
      // Per-cone subtotal first, so the r = 0 numerator reproduces the
      // normalization sum with identical floating-point steps.
      std::complex<double> nk = 0;
      for (const auto& z : shells_c) nk += z;
      num += nk;
      BlockSum b = cone_block(fan, law, c.id, beta, radius, threads);
      den += b.value;
      tail += t;
    }
    if (den == 0) throw DomainError("empty spectrum: nothing to normalize by");
    out.value = num / den;
    out.normalization = den;
    out.tail_bound = tail;
    return out;
  }

  std::complex<double> num = 1;
  double den = 1, tail_rel = 0;
  for (int k = 0; k < fan.num_cones(); ++k) {
    const Cone& c = fan.cones()[k];
    if (fan.orbit(c.id).quotient_rank == 0) continue;
    auto [shells_c, t] = cone_complex(k);
    std::complex<double> nk = 0;
    for (const auto& z : shells_c) nk += z;
    BlockSum b = cone_block(fan, law, c.id, beta, radius, threads);
    num *= nk;
    den *= b.value;
    tail_rel += t / std::max(b.value, 1e-300);
  }
  if (den == 0) throw DomainError("empty spectrum: nothing to normalize by");
  out.value = num / den;
  out.normalization = den;
  out.tail_bound = tail_rel * den;
  return out;
}

std::string ConvergenceInfo::to_json_text() const {
  Json j;
  j["beta_g"] = beta_g;
  Json pc = Json::array();
  for (auto& [k, v] : per_cone) {
    Json e;
    e["cone"] = k;
    e["abscissa"] = v;
    pc.push_back(e);
  }
  j["per_cone"] = pc;
  j["overall"] = overall;
  return j.dump();
}

ConvergenceInfo convergence_threshold(const Fan& fan, const EnergyLaw& law) {
  fan.require_valid();
  ConvergenceInfo out;
  out.beta_g = 1.0 / law.c();
  double overall = out.beta_g;
  for (const auto& o : fan.orbits()) {
    if (o.quotient_rank == 0) continue;
    double a = o.quotient_rank / law.c();
    out.per_cone.emplace_back(o.cone_id, a);
    overall = std::max(overall, a);
  }
  out.overall = overall;
  return out;
}

std::string sweep_csv(const Fan& fan, const EnergyLaw& law, const SymmetryData* sym, double beta_start,
                      double beta_stop, double beta_step, std::int64_t radius, PartitionMode mode,
                      int threads) {
  if (!(beta_step > 0)) throw DomainError("beta step must be positive");
  std::ostringstream os;
  os << "beta,value,tail_bound\n";
  int n = int(std::floor((beta_stop - beta_start) / beta_step + 1e-9));
  for (int i = 0; i <= n; ++i) {
    double beta = beta_start + i * beta_step;
    PartitionResult r = partition(fan, law, sym, beta, radius, mode, threads);
    os << fmt(beta) << "," << fmt(r.value) << "," << fmt(r.tail_bound) << "\n";
  }
  return os.str();
}

}  // namespace toric
