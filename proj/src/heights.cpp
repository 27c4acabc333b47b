#include "toric/heights.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"

namespace toric {

std::string ProjPoint::str() const {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < x.size(); ++i) os << (i ? ":" : "") << x[i].get_str();
  os << ")";
  return os.str();
}

ProjPoint proj_point(std::vector<ZZ> coords) {
  ZZ g = content(coords);
  if (g == 0) throw DomainError("projective point needs a nonzero coordinate");
  int lead = -1;
  for (size_t i = 0; i < coords.size(); ++i) {
    if (coords[i] != 0) {
      lead = int(i);
      break;
    }
  }
  if (coords[lead] < 0) g = -g;
  if (g != 1)
    for (auto& c : coords) c /= g;
  return {std::move(coords)};
}

ProjPoint proj_point(const std::vector<QQ>& coords) {
  ZZ l = 1;
  for (const QQ& q : coords) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den().get_mpz_t());
  std::vector<ZZ> ints;
  ints.reserve(coords.size());
  for (const QQ& q : coords) ints.push_back(q.get_num() * (l / q.get_den()));
  return proj_point(std::move(ints));
}

double log_of(const ZZ& z) {
  if (z <= 0) throw DomainError("log of a nonpositive integer");
  signed long exp2;
  double m = mpz_get_d_2exp(&exp2, z.get_mpz_t());
  return std::log(m) + double(exp2) * std::log(2.0);
}

HeightValue height_proj(const ProjPoint& p) {
  ZZ h = 0;
  for (const ZZ& c : p.x) {
    ZZ a = abs(c);
    if (a > h) h = a;
  }
  return {h, log_of(h)};
}

HeightValue height_affine(const std::vector<QQ>& coords) {
  std::vector<QQ> full;
  full.reserve(coords.size() + 1);
  full.emplace_back(1);
  for (const QQ& q : coords) full.push_back(q);
  return height_proj(proj_point(full));
}

ProjPoint apply_pd(const PdMap& m, const ProjPoint& p) {
  if (m.tau.size() != p.x.size()) throw DomainError("coordinate permutation size mismatch");
  if (m.n < 1) throw DomainError("the power part must be a positive integer");
  std::vector<ZZ> out(p.x.size());
  for (size_t i = 0; i < p.x.size(); ++i) {
    ZZ pw;
    mpz_pow_ui(pw.get_mpz_t(), p.x[i].get_mpz_t(), unsigned(m.n));
    out[m.tau[i]] = pw;
  }
  return proj_point(std::move(out));
}

bool height_scaling_holds(const PdMap& m, const ProjPoint& p) {
  HeightValue base = height_proj(p);
  HeightValue image = height_proj(apply_pd(m, p));
  ZZ expected;
  mpz_pow_ui(expected.get_mpz_t(), base.H.get_mpz_t(), unsigned(m.n));
  return image.H == expected;
}

std::vector<int> coordinate_permutation(int d, const ZMat& phi0) {
  // Rays of the projective fan: v_0 = -(e_1+...+e_d), v_i = e_i.
  std::vector<ZVec> gen(d + 1, ZVec(d));
  for (int i = 1; i <= d; ++i) gen[i][i - 1] = 1;
  for (int i = 0; i < d; ++i) gen[0][i] = -1;
  std::vector<int> tau(d + 1, -1);
  for (int i = 0; i <= d; ++i) {
    ZVec img = mul(phi0, gen[i]);
    int hit = -1;
    for (int j = 0; j <= d; ++j)
      if (img == gen[j]) {
        hit = j;
        break;
      }
    if (hit < 0) throw DomainError("matrix does not permute the projective fan rays");
    tau[i] = hit;
  }
  return tau;
}

namespace {

std::int64_t gcd_i64(const IVec& v) {
  std::int64_t g = 0;
  for (auto a : v) g = std::gcd(g, a < 0 ? -a : a);
  return g;
}

}  // namespace

std::vector<ProjPoint> enumerate_bounded_height(int d, std::int64_t max_H, std::int64_t cap) {
  if (max_H < 1) throw DomainError("height bound must be >= 1");
  double est = std::pow(double(2 * max_H + 1), d + 1);
  if (est > double(cap))
    throw LimitError("bounded-height enumeration would visit about " + std::to_string(std::int64_t(est)) +
                     " tuples, over the cap of " + std::to_string(cap));
  std::vector<ProjPoint> out;
  IVec x(d + 1, -max_H);
  while (true) {
    // Canonical representatives only: coprime, first nonzero positive.
    std::int64_t g = gcd_i64(x);
    if (g == 1) {
      int lead = 0;
      while (x[lead] == 0) ++lead;
      if (x[lead] > 0) {
        std::vector<ZZ> coords(d + 1);
        for (int i = 0; i <= d; ++i) coords[i] = ZZ((long)x[i]);
        out.push_back({std::move(coords)});
      }
    }
    int i = d;
    while (i >= 0 && x[i] == max_H) {
      x[i] = -max_H;
      --i;
    }
    if (i < 0) break;
    ++x[i];
  }
  std::sort(out.begin(), out.end());
  return out;
}

MonomialPoint MonomialPoint::make(const QQ& alpha, std::vector<QQ> coords) {
  if (alpha == 0 || alpha == 1 || alpha == -1)
    throw DomainError("alpha must be a nontorsion rational (not 0, 1, -1)");
  MonomialPoint mp;
  mp.alpha = alpha;
  mp.alpha.canonicalize();
  mp.coords = std::move(coords);
  for (size_t i = 0; i < mp.coords.size(); ++i) {
    mp.coords[i].canonicalize();
    if (mp.coords[i] != 0) mp.support.push_back(int(i));
  }
  if (mp.support.empty()) throw DomainError("base point needs a nonzero coordinate");
  return mp;
}

namespace {

QQ qq_pow(const QQ& q, std::int64_t e) {
  if (e == 0) return QQ(1);
  bool neg = e < 0;
  unsigned ue = unsigned(neg ? -e : e);
  ZZ num, den;
  mpz_pow_ui(num.get_mpz_t(), q.get_num().get_mpz_t(), ue);
  mpz_pow_ui(den.get_mpz_t(), q.get_den().get_mpz_t(), ue);
  if (neg) {
    if (num == 0) throw DomainError("negative power of zero");
    std::swap(num, den);
  }
  QQ r(num, den);
  r.canonicalize();
  return r;
}

}  // namespace

void b_family_iter(const MonomialPoint& mp, std::int64_t radius,
                   const std::function<void(const FamilyElement&)>& fn) {
  if (radius < 0) throw DomainError("radius must be >= 0");
  int l1 = int(mp.support.size());
  // Alpha exponents live in Z^{l+1} mod the diagonal: fix k[0] = 0.
  IVec k(l1, 0), kp(l1, -radius);
  std::function<void(int)> loop_kp = [&](int pos) {
    if (pos == l1) {
      std::vector<QQ> coords(mp.coords.size(), QQ(0));
      for (int i = 0; i < l1; ++i)
        coords[mp.support[i]] = qq_pow(mp.alpha, k[i]) * qq_pow(mp.coords[mp.support[i]], kp[i]);
      FamilyElement fe;
      fe.k = k;
      fe.kp = kp;
      fe.point = proj_point(coords);
      HeightValue hv = height_proj(fe.point);
      fe.H = hv.H;
      fe.h = hv.h;
      fn(fe);
      return;
    }
    for (kp[pos] = -radius; kp[pos] <= radius; ++kp[pos]) loop_kp(pos + 1);
  };
  std::function<void(int)> loop_k = [&](int pos) {
    if (pos == l1) {
      loop_kp(0);
      return;
    }
    for (k[pos] = -radius; k[pos] <= radius; ++k[pos]) loop_k(pos + 1);
  };
  loop_k(1);  // k[0] stays 0
}

std::string HeightZeta::to_json_text(double beta) const {
  nlohmann::ordered_json j;
  j["beta"] = beta;
  j["value"] = value;
  j["terms"] = terms;
  j["excluded_zero_height"] = excluded_zero;
  j["min_positive_h"] = min_h;
  if (tail_bound >= 0) j["tail_bound"] = tail_bound;
  j["tail_note"] = tail_note;
  return j.dump();
}

namespace {

void zeta_accumulate(HeightZeta& z, double h, double beta) {
  if (h <= 0) {
    ++z.excluded_zero;
    return;
  }
  z.value += std::pow(h, -beta);
  ++z.terms;
  if (z.min_h == 0 || h < z.min_h) z.min_h = h;
}

}  // namespace

HeightZeta height_zeta_family(const MonomialPoint& mp, double beta, std::int64_t radius) {
  HeightZeta z;
  b_family_iter(mp, radius, [&](const FamilyElement& fe) { zeta_accumulate(z, fe.h, beta); });
  z.tail_note = "multiset truncated at exponent radius " + std::to_string(radius) +
                "; heights grow linearly in the exponents, so the sum converges for beta above the "
                "lattice dimension of the exponent space";
  return z;
}

HeightZeta height_zeta_points(const std::vector<ProjPoint>& pts, double beta) {
  HeightZeta z;
  for (const ProjPoint& p : pts) zeta_accumulate(z, height_proj(p).h, beta);
  z.tail_bound = 0;
  z.tail_note = "complete sum over the given finite point set";
  return z;
}

HeightZeta height_zeta_geometric(const ZZ& b, std::int64_t kmax, double beta) {
  if (b <= 1) throw DomainError("geometric base must be an integer >= 2");
  HeightZeta z;
  double logb = log_of(b);
  for (std::int64_t k = 1; k <= kmax; ++k) zeta_accumulate(z, double(k) * logb, beta);
  if (beta > 1) {
    // sum_{k>K} (k log b)^{-beta} <= (log b)^{-beta} K^{1-beta} / (beta-1)
    z.tail_bound = std::pow(logb, -beta) * std::pow(double(kmax), 1.0 - beta) / (beta - 1.0);
    z.tail_note = "integral comparison beyond k = " + std::to_string(kmax);
  } else {
    z.tail_note = "divergent regime: beta <= 1";
  }
  return z;
}

std::string family_csv(const MonomialPoint& mp, std::int64_t radius, int max_digits) {
  std::ostringstream os;
  os << "k,kp,H,h\n";
  b_family_iter(mp, radius, [&](const FamilyElement& fe) {
    auto joined = [](const IVec& v) {
      std::string s;
      for (size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
      return s;
    };
    std::string hstr = fe.H.get_str();
    if (int(hstr.size()) > max_digits)
      hstr = "10^" + std::to_string(hstr.size() - 1) + "-scale";  // digits elided
    char hbuf[32];
    snprintf(hbuf, sizeof hbuf, "%.17g", fe.h);
    os << joined(fe.k) << "," << joined(fe.kp) << "," << hstr << "," << hbuf << "\n";
  });
  return os.str();
}

ScalingSuite height_scaling_suite(int d, int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ScalingSuite out;
  for (int t = 0; t < trials; ++t) {
    std::vector<ZZ> coords(d + 1);
    bool nonzero = false;
    for (int i = 0; i <= d; ++i) {
      coords[i] = ZZ(long(rng() % 41)) - 20;
      if (coords[i] != 0) nonzero = true;
    }
    if (!nonzero) coords[0] = 1;
    ProjPoint p = proj_point(coords);
    PdMap m;
    m.n = 1 + std::int64_t(rng() % 5);
    m.tau.resize(d + 1);
    for (int i = 0; i <= d; ++i) m.tau[i] = i;
    for (int i = d; i > 0; --i) std::swap(m.tau[i], m.tau[rng() % (i + 1)]);
    ++out.trials;
    if (!height_scaling_holds(m, p)) {
      out.ok = false;
      out.counterexample = "n=" + std::to_string(m.n) + ", x=" + p.str();
      return out;
    }
  }
  return out;
}

}  // namespace toric
