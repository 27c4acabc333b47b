#include "toric/crossed.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace toric {

namespace {

constexpr double kPi = std::numbers::pi_v<double>;

// Exact phase fractions mod 1.
struct Frac {
  std::int64_t num = 0;
  std::int64_t den = 1;
  void reduce() {
    num %= den;
    if (num < 0) num += den;
    std::int64_t g = std::gcd(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
};

Frac pairing(const IVec& xi, const TorsionVec& r) {
  Frac f;
  f.den = r.den;
  std::int64_t acc = 0;
  for (size_t i = 0; i < xi.size(); ++i) acc = (acc + (xi[i] % r.den) * r.num[i]) % r.den;
  f.num = acc;
  f.reduce();
  return f;
}

Frac frac_add(const Frac& a, const Frac& b) {
  Frac f;
  f.den = std::lcm(a.den, b.den);
  f.num = a.num * (f.den / a.den) + b.num * (f.den / b.den);
  f.reduce();
  return f;
}

std::complex<double> phase(const Frac& f) {
  if (f.num == 0) return {1.0, 0.0};
  double th = 2.0 * kPi * double(f.num) / double(f.den);
  return {std::cos(th), std::sin(th)};
}

std::int64_t inv_mod(std::int64_t a, std::int64_t m) {
  std::int64_t t = 0, nt = 1, r = m, nr = ((a % m) + m) % m;
  while (nr != 0) {
    std::int64_t q = r / nr;
    std::swap(t -= q * nt, nt);
    std::swap(r -= q * nr, nr);
  }
  if (r != 1) throw DomainError("modular inverse does not exist");
  return ((t % m) + m) % m;
}

}  // namespace

MapAction MapAction::build(const Fan& fan, const ZMat& phi) {
  fan.require_valid();
  Compatibility comp = is_compatible(fan, phi);
  if (!comp.ok)
    throw DomainError("map is not fan-compatible (offending cone " + std::to_string(comp.offending_cone) + ")");
  MapAction act;
  act.phi = phi;
  act.perm = comp.perm;
  act.perm_inv.assign(comp.perm.size(), 0);
  for (size_t i = 0; i < comp.perm.size(); ++i) act.perm_inv[comp.perm[i] - 1] = int(i) + 1;
  act.det_full = det(phi);
  act.content_n = to_i64(content(phi));
  for (const Cone& c : fan.cones()) {
    const OrbitLattice& from = fan.orbit(c.id);
    const OrbitLattice& to = fan.orbit(comp.perm[c.id - 1]);
    ZMat a = induced_quotient_map(from, to, phi);
    act.quotient.push_back(Mat64::from_zmat(a));
    int n = a.rows();
    ZZ dt = n ? det(a) : ZZ(1);
    if (n && dt == 0) throw DomainError("quotient action is singular");
    ZMat invn(n, n);
    for (int j = 0; j < n; ++j) {
      QVec e(n);
      e[j] = 1;
      auto x = solve_rational(a, e);
      if (!x) throw DomainError("quotient action is singular");
      for (int i = 0; i < n; ++i) {
        QQ scaled = (*x)[i] * QQ(dt);
        if (scaled.get_den() != 1) throw DomainError("quotient inverse is not of cofactor form");
        invn(i, j) = scaled.get_num();
      }
    }
    act.inv_num.push_back(invn);
    act.inv_den.push_back(dt);
  }
  return act;
}

TruncatedRep::TruncatedRep(const Fan& fan, RepMode mode, std::int64_t radius, std::size_t basis_cap)
    : fan_(&fan), mode_(mode), radius_(radius) {
  fan.require_valid();
  if (radius < 0) throw DomainError("radius must be >= 0");
  std::size_t total_add = 0;
  double total_mul = 1;
  for (const auto& o : fan.orbits()) {
    std::size_t side = std::size_t(2 * radius + 1);
    std::size_t n = 1;
    for (int i = 0; i < o.quotient_rank; ++i) {
      if (n > basis_cap / side + 1) throw LimitError("truncated basis exceeds the configured cap");
      n *= side;
    }
    box_sizes_.push_back(n);
    offsets_.push_back(total_add);
    total_add += n;
    total_mul *= double(n);
  }
  basis_size_ = mode == RepMode::Additive ? total_add : std::size_t(total_mul);
  if (mode == RepMode::Multiplicative) {
    if (total_mul > double(basis_cap)) throw LimitError("truncated basis exceeds the configured cap");
    std::size_t n = 1;
    for (std::size_t s : box_sizes_) n *= s;
    basis_size_ = n;
  } else if (basis_size_ > basis_cap) {
    throw LimitError("truncated basis exceeds the configured cap");
  }
}

namespace {

void each_box(int dim, std::int64_t radius, const std::function<void(const IVec&)>& fn) {
  IVec x(dim, -radius);
  if (dim == 0) {
    fn(x);
    return;
  }
  while (true) {
    fn(x);
    int i = dim - 1;
    while (i >= 0 && x[i] == radius) {
      x[i] = -radius;
      --i;
    }
    if (i < 0) break;
    ++x[i];
  }
}

}  // namespace

void TruncatedRep::each_additive(const std::function<void(int, const IVec&)>& fn) const {
  for (int k = 0; k < num_cones(); ++k) {
    int dk = fan_->orbits()[k].quotient_rank;
    each_box(dk, radius_, [&](const IVec& xi) { fn(k, xi); });
  }
}

void TruncatedRep::each_multiplicative(const std::function<void(const std::vector<IVec>&)>& fn) const {
  int m = num_cones();
  std::vector<IVec> xs(m);
  for (int k = 0; k < m; ++k) xs[k].assign(fan_->orbits()[k].quotient_rank, -radius_);
  std::function<void(int)> rec = [&](int k) {
    if (k == m) {
      fn(xs);
      return;
    }
    int dk = fan_->orbits()[k].quotient_rank;
    each_box(dk, radius_, [&](const IVec& xi) {
      xs[k] = xi;
      rec(k + 1);
    });
  };
  rec(0);
}

bool TruncatedRep::in_box(const IVec& xi) const { return sup_norm(xi) <= radius_; }

std::size_t TruncatedRep::additive_index(int cone_index, const IVec& xi) const {
  std::size_t side = std::size_t(2 * radius_ + 1);
  std::size_t idx = 0;
  for (auto v : xi) idx = idx * side + std::size_t(v + radius_);
  return offsets_[cone_index] + idx;
}

std::size_t TruncatedRep::multiplicative_index(const std::vector<IVec>& xs) const {
  std::size_t side = std::size_t(2 * radius_ + 1);
  std::size_t idx = 0;
  for (int k = 0; k < num_cones(); ++k) {
    std::size_t local = 0;
    for (auto v : xs[k]) local = local * side + std::size_t(v + radius_);
    idx = idx * box_sizes_[k] + local;
  }
  return idx;
}

Amplitudes apply_e(const TruncatedRep& rep, const TorsionTuple& r, const Amplitudes& v) {
  if (v.size() != rep.basis_size()) throw DomainError("amplitude vector size mismatch");
  Amplitudes out(v.size());
  if (rep.mode() == RepMode::Additive) {
    rep.each_additive([&](int k, const IVec& xi) {
      std::size_t i = rep.additive_index(k, xi);
      out[i] = phase(pairing(xi, r.comps[k])) * v[i];
    });
  } else {
    rep.each_multiplicative([&](const std::vector<IVec>& xs) {
      Frac f;
      for (int k = 0; k < rep.num_cones(); ++k) f = frac_add(f, pairing(xs[k], r.comps[k]));
      std::size_t i = rep.multiplicative_index(xs);
      out[i] = phase(f) * v[i];
    });
  }
  return out;
}

MuResult apply_mu(const TruncatedRep& rep, const MapAction& act, const Amplitudes& v) {
  if (v.size() != rep.basis_size()) throw DomainError("amplitude vector size mismatch");
  MuResult res;
  res.v.assign(v.size(), {0, 0});
  if (rep.mode() == RepMode::Additive) {
    rep.each_additive([&](int k, const IVec& xi) {
      std::size_t i = rep.additive_index(k, xi);
      if (v[i] == std::complex<double>(0, 0)) return;
      IVec img = act.quotient[k].apply(xi);
      if (!rep.in_box(img)) {
        res.out_of_box.push_back(i);
        return;
      }
      res.v[rep.additive_index(act.perm[k] - 1, img)] += v[i];
    });
  } else {
    rep.each_multiplicative([&](const std::vector<IVec>& xs) {
      std::size_t i = rep.multiplicative_index(xs);
      if (v[i] == std::complex<double>(0, 0)) return;
      std::vector<IVec> ys(rep.num_cones());
      for (int k = 0; k < rep.num_cones(); ++k) {
        IVec img = act.quotient[k].apply(xs[k]);
        if (!rep.in_box(img)) {
          res.out_of_box.push_back(i);
          return;
        }
        ys[act.perm[k] - 1] = img;
      }
      res.v[rep.multiplicative_index(ys)] += v[i];
    });
  }
  return res;
}

namespace {

// Integral preimage of xi under the quotient map with inverse num/den.
std::optional<IVec> preimage(const ZMat& inv_num, const ZZ& inv_den, const IVec& xi) {
  int n = inv_num.rows();
  IVec out(n);
  for (int i = 0; i < n; ++i) {
    ZZ acc = 0;
    for (int j = 0; j < n; ++j) acc += inv_num(i, j) * ZZ((long)xi[j]);
    if (acc % inv_den != 0) return std::nullopt;
    out[i] = to_i64(acc / inv_den);
  }
  return out;
}

}  // namespace

Amplitudes apply_mu_star(const TruncatedRep& rep, const MapAction& act, const Amplitudes& v) {
  if (v.size() != rep.basis_size()) throw DomainError("amplitude vector size mismatch");
  Amplitudes out(v.size());
  if (rep.mode() == RepMode::Additive) {
    rep.each_additive([&](int k, const IVec& xi) {
      std::size_t i = rep.additive_index(k, xi);
      if (v[i] == std::complex<double>(0, 0)) return;
      int j = act.perm_inv[k] - 1;  // source cone index
      auto eta = preimage(act.inv_num[j], act.inv_den[j], xi);
      if (!eta || !rep.in_box(*eta)) return;
      out[rep.additive_index(j, *eta)] += v[i];
    });
  } else {
    rep.each_multiplicative([&](const std::vector<IVec>& xs) {
      std::size_t i = rep.multiplicative_index(xs);
      if (v[i] == std::complex<double>(0, 0)) return;
      std::vector<IVec> ys(rep.num_cones());
      for (int k = 0; k < rep.num_cones(); ++k) {
        int j = act.perm_inv[k] - 1;
        auto eta = preimage(act.inv_num[j], act.inv_den[j], xs[k]);
        if (!eta || !rep.in_box(*eta)) return;
        ys[j] = *eta;
      }
      out[rep.multiplicative_index(ys)] += v[i];
    });
  }
  return out;
}

TorsionTuple act_on_torsion(const Fan& fan, const MapAction& act, const TorsionTuple& r) {
  TorsionTuple out = r;
  for (int k = 0; k < fan.num_cones(); ++k) {
    int target = act.perm[k] - 1;
    const TorsionVec& src = r.comps[target];
    const Mat64& a = act.quotient[k];
    TorsionVec t;
    t.den = src.den;
    t.num.assign(a.cols, 0);
    for (int i = 0; i < a.cols; ++i) {
      std::int64_t acc = 0;
      for (int j = 0; j < a.rows; ++j) acc = (acc + (a.at(j, i) % src.den) * src.num[j]) % src.den;
      t.num[i] = acc;
    }
    t.reduce();
    out.comps[k] = t;
  }
  return out;
}

std::vector<TorsionVec> torsion_preimages(const ZMat& a, const TorsionVec& r) {
  int n = a.rows();
  if (n == 0) return {TorsionVec{1, {}}};
  ZMat at = a.transposed();
  ZMat s, u, v;
  snf(at, s, u, v);
  std::int64_t adet = 1;
  for (int i = 0; i < n; ++i) adet *= to_i64(s(i, i));
  if (adet == 0) throw DomainError("singular quotient action");
  std::int64_t L = r.den * adet;

  // Right-hand side at level L: c = (L/den) * num, then y solves S y = U c (mod L).
  IVec c(n);
  for (int i = 0; i < n; ++i) c[i] = (L / r.den) * r.num[i];
  IVec uc(n, 0);
  for (int i = 0; i < n; ++i) {
    std::int64_t acc = 0;
    for (int j = 0; j < n; ++j) acc = (acc + ((to_i64(u(i, j)) % L) * (c[j] % L))) % L;
    uc[i] = ((acc % L) + L) % L;
  }
  std::vector<std::vector<std::int64_t>> per_coord(n);
  for (int i = 0; i < n; ++i) {
    std::int64_t sii = to_i64(s(i, i));
    std::int64_t g = std::gcd(sii, L);
    if (uc[i] % g != 0) return {};
    std::int64_t m = L / g;
    std::int64_t y0 = (inv_mod(sii / g, m) % m) * ((uc[i] / g) % m) % m;
    for (std::int64_t t = 0; t < g; ++t) per_coord[i].push_back((y0 + t * m) % L);
  }
  std::vector<TorsionVec> out;
  IVec y(n);
  std::function<void(int)> rec = [&](int i) {
    if (i == n) {
      TorsionVec tv;
      tv.den = L;
      tv.num.assign(n, 0);
      for (int row = 0; row < n; ++row) {
        std::int64_t acc = 0;
        for (int col = 0; col < n; ++col) acc = (acc + (to_i64(v(row, col)) % L) * y[col]) % L;
        tv.num[row] = acc;
      }
      tv.reduce();
      out.push_back(tv);
      return;
    }
    for (std::int64_t val : per_coord[i]) {
      y[i] = val;
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

std::string RelationReport::to_json_text() const {
  nlohmann::ordered_json j;
  j["relation"] = relation;
  j["coverage"] = coverage;
  j["max_deviation"] = max_deviation;
  j["asserted"] = asserted;
  j["excluded"] = excluded;
  j["counterexample"] = counterexample.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(counterexample);
  if (!extra_json.empty()) j["extra"] = nlohmann::ordered_json::parse(extra_json);
  return j.dump();
}

namespace {

std::string label_str(int cone_id, const IVec& xi) {
  std::ostringstream os;
  os << "cone " << cone_id << ", xi=(";
  for (size_t i = 0; i < xi.size(); ++i) os << (i ? "," : "") << xi[i];
  os << ")";
  return os.str();
}

}  // namespace

RelationReport check_conjugation(const TruncatedRep& rep, const MapAction& act, const TorsionTuple& r) {
  const Fan& fan = rep.fan();
  TorsionTuple rp = act_on_torsion(fan, act, r);
  RelationReport rr;
  rr.relation = "conjugation";
  auto record = [&](const Frac& lhs, const Frac& rhs, const std::string& where) {
    double dev = std::abs(phase(lhs) - phase(rhs));
    ++rr.asserted;
    if (dev > rr.max_deviation) {
      rr.max_deviation = dev;
      if (dev > 1e-12) rr.counterexample = where;
    }
  };
  if (rep.mode() == RepMode::Additive) {
    rep.each_additive([&](int k, const IVec& xi) {
      Frac lhs = pairing(xi, rp.comps[k]);
      Frac rhs = pairing(act.quotient[k].apply(xi), r.comps[act.perm[k] - 1]);
      record(lhs, rhs, label_str(k + 1, xi));
    });
  } else {
    rep.each_multiplicative([&](const std::vector<IVec>& xs) {
      Frac lhs, rhs;
      for (int k = 0; k < rep.num_cones(); ++k) {
        lhs = frac_add(lhs, pairing(xs[k], rp.comps[k]));
        rhs = frac_add(rhs, pairing(act.quotient[k].apply(xs[k]), r.comps[act.perm[k] - 1]));
      }
      record(lhs, rhs, "tuple basis vector");
    });
  }
  rr.coverage = rep.basis_size() ? double(rr.asserted) / double(rep.basis_size()) : 1.0;
  return rr;
}

RelationReport check_transfer(const TruncatedRep& rep, const MapAction& act, const TorsionTuple& r) {
  const Fan& fan = rep.fan();
  RelationReport rr;
  rr.relation = "transfer";
  int m = fan.num_cones();

  // Per target slot: solutions of A^T s = r_source at torsion level.
  std::vector<std::vector<TorsionVec>> sols(m);
  std::vector<std::int64_t> kernel_orders(m, 1);
  double kernel_total = 1;
  for (int k = 0; k < m; ++k) {
    int j = act.perm_inv[k] - 1;  // source slot feeding target k
    const Mat64& a64 = act.quotient[j];
    ZMat a(a64.rows, a64.cols);
    for (int i = 0; i < a64.rows; ++i)
      for (int jj = 0; jj < a64.cols; ++jj) a(i, jj) = a64.at(i, jj);
    sols[k] = torsion_preimages(a, r.comps[j]);
    if (sols[k].empty()) throw DomainError("torsion preimage enumeration came back empty");
    kernel_orders[k] = std::int64_t(sols[k].size());
    kernel_total *= double(sols[k].size());
  }

  std::string annihilation_witness;
  auto slot_values = [&](int k, const IVec& xi) -> std::pair<std::complex<double>, std::complex<double>> {
    // (LHS, RHS) coefficients of the diagonal entry at (cone k, xi).
    int j = act.perm_inv[k] - 1;
    std::complex<double> lhs(0, 0);
    auto eta = preimage(act.inv_num[j], act.inv_den[j], xi);
    if (eta) lhs = phase(pairing(*eta, r.comps[j]));
    std::complex<double> rhs(0, 0);
    for (const TorsionVec& s : sols[k]) rhs += phase(pairing(xi, s));
    rhs /= double(sols[k].size());
    if (!eta && annihilation_witness.empty() && sols[k].size() > 1 && std::abs(rhs) <= 1e-12)
      annihilation_witness = label_str(k + 1, xi);
    return {lhs, rhs};
  };

  if (rep.mode() == RepMode::Additive) {
    rep.each_additive([&](int k, const IVec& xi) {
      auto [lhs, rhs] = slot_values(k, xi);
      double dev = std::abs(lhs - rhs);
      ++rr.asserted;
      if (dev > rr.max_deviation) {
        rr.max_deviation = dev;
        if (dev > 1e-12) rr.counterexample = label_str(k + 1, xi);
      }
    });
  } else {
    rep.each_multiplicative([&](const std::vector<IVec>& xs) {
      std::complex<double> lhs(1, 0), rhs(1, 0);
      for (int k = 0; k < rep.num_cones(); ++k) {
        auto [l, rh] = slot_values(k, xs[k]);
        lhs *= l;
        rhs *= rh;
      }
      double dev = std::abs(lhs - rhs);
      ++rr.asserted;
      if (dev > rr.max_deviation) {
        rr.max_deviation = dev;
        if (dev > 1e-12) rr.counterexample = "tuple basis vector";
      }
    });
  }
  rr.coverage = rep.basis_size() ? double(rr.asserted) / double(rep.basis_size()) : 1.0;

  double lambda = rep.mode() == RepMode::Additive ? 1.0 : double(m);
  double det_power = std::pow(std::abs(act.det_full.get_d()), lambda);
  nlohmann::ordered_json extra;
  extra["kernel_orders"] = kernel_orders;
  extra["kernel_order_total"] = kernel_total;
  extra["det_power_lambda"] = det_power;
  extra["normalization_matches_det_power"] = std::abs(kernel_total - det_power) < 0.5;
  extra["annihilation_witness"] =
      annihilation_witness.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(annihilation_witness);
  rr.extra_json = extra.dump();
  return rr;
}

RelationReport check_covariance(const TruncatedRep& rep, const MapAction& act, double t,
                                const EnergyLaw& law, const TorsionTuple& r) {
  const Fan& fan = rep.fan();
  RelationReport rr;
  rr.relation = "covariance";
  int m_prime = 0;
  for (const auto& o : fan.orbits())
    if (o.quotient_rank >= 1) ++m_prime;
  double lambda = rep.mode() == RepMode::Additive ? 1.0 : double(m_prime);
  double g_log = law.c() * std::log(double(act.content_n));
  std::complex<double> rhs = std::exp(std::complex<double>(0, t * lambda * g_log));

  auto energy = [&](int k, const IVec& xi) -> std::optional<double> {
    if (fan.orbits()[k].quotient_rank == 0) return std::nullopt;
    if (gcd_abs(xi) == 0) return std::nullopt;
    try {
      return std::log(law.value(k + 1, xi));
    } catch (const DomainError&) {
      return std::nullopt;
    }
  };

  if (rep.mode() == RepMode::Additive) {
    rep.each_additive([&](int k, const IVec& xi) {
      auto e0 = energy(k, xi);
      if (!e0) {
        ++rr.excluded;
        return;
      }
      IVec img = act.quotient[k].apply(xi);
      auto e1 = energy(act.perm[k] - 1, img);
      if (!e1) {
        ++rr.excluded;
        return;
      }
      std::complex<double> lhs = std::exp(std::complex<double>(0, t * (*e1 - *e0)));
      // e(r)-invariance on the same vector: diagonal operators commute with H.
      std::complex<double> ph = phase(pairing(xi, r.comps[k]));
      std::complex<double> er_dev =
          std::exp(std::complex<double>(0, t * *e0)) * ph * std::exp(std::complex<double>(0, -t * *e0)) - ph;
      double dev = std::max(std::abs(lhs - rhs), std::abs(er_dev));
      ++rr.asserted;
      if (dev > rr.max_deviation) {
        rr.max_deviation = dev;
        if (dev > 1e-12) rr.counterexample = label_str(k + 1, xi);
      }
    });
  } else {
    rep.each_multiplicative([&](const std::vector<IVec>& xs) {
      double de = 0;
      bool ok = true;
      for (int k = 0; k < rep.num_cones() && ok; ++k) {
        if (fan.orbits()[k].quotient_rank == 0) continue;
        auto e0 = energy(k, xs[k]);
        auto e1 = e0 ? energy(act.perm[k] - 1, act.quotient[k].apply(xs[k])) : std::nullopt;
        if (!e0 || !e1) {
          ok = false;
          break;
        }
        de += *e1 - *e0;
      }
      if (!ok) {
        ++rr.excluded;
        return;
      }
      std::complex<double> lhs = std::exp(std::complex<double>(0, t * de));
      double dev = std::abs(lhs - rhs);
      ++rr.asserted;
      if (dev > rr.max_deviation) {
        rr.max_deviation = dev;
        if (dev > 1e-12) rr.counterexample = "tuple basis vector";
      }
    });
  }
  rr.coverage = rep.basis_size() ? double(rr.asserted) / double(rep.basis_size()) : 1.0;
  nlohmann::ordered_json extra;
  extra["lambda_used"] = lambda;
  extra["m_prime"] = m_prime;
  extra["g_value"] = std::pow(double(act.content_n), law.c());
  rr.extra_json = extra.dump();
  return rr;
}

}  // namespace toric
