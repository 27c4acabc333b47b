#include "toric/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"

namespace toric {

namespace {
using Json = nlohmann::ordered_json;

void enumerate_box(int dim, std::int64_t radius, const std::function<void(const IVec&)>& fn) {
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

IVec Mat64::apply(const IVec& x) const {
  IVec y(rows, 0);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) y[i] += at(i, j) * x[j];
  return y;
}

Mat64 Mat64::from_zmat(const ZMat& m) {
  Mat64 out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out.at(i, j) = to_i64(m(i, j));
  return out;
}

std::int64_t gcd_abs(const IVec& v) {
  std::int64_t g = 0;
  for (auto x : v) g = std::gcd(g, x < 0 ? -x : x);
  return g;
}

std::int64_t sup_norm(const IVec& v) {
  std::int64_t m = 0;
  for (auto x : v) m = std::max(m, x < 0 ? -x : x);
  return m;
}

bool GramQ::positive_definite() const {
  if (num.rows() != num.cols() || den <= 0) return false;
  for (int i = 0; i < num.rows(); ++i)
    for (int j = i + 1; j < num.cols(); ++j)
      if (num(i, j) != num(j, i)) return false;
  // Sylvester: all leading principal minors positive.
  for (int k = 1; k <= num.rows(); ++k) {
    ZMat sub(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) sub(i, j) = num(i, j);
    if (det(sub) <= 0) return false;
  }
  return true;
}

QQ GramQ::eval_exact(const IVec& xi) const {
  ZZ acc = 0;
  for (int i = 0; i < num.rows(); ++i)
    for (int j = 0; j < num.cols(); ++j) acc += num(i, j) * ZZ(xi[i]) * ZZ(xi[j]);
  QQ q(acc, den);
  q.canonicalize();
  return q;
}

double GramQ::eval(const IVec& xi) const { return eval_exact(xi).get_d(); }

IVec EnergyLaw::Table::canonical(const IVec& xi_prim) const {
  IVec best = xi_prim;
  for (const Mat64& m : g1) best = std::min(best, m.apply(xi_prim));
  return best;
}

EnergyLaw EnergyLaw::norm_power(const Fan& fan, double c, std::map<int, GramQ> grams) {
  fan.require_valid();
  if (!(c > 0)) throw DomainError("scaling exponent c must be positive");
  EnergyLaw law;
  law.kind_ = Kind::NormPower;
  law.c_ = c;
  for (const auto& o : fan.orbits()) {
    if (o.quotient_rank == 0) continue;
    auto it = grams.find(o.cone_id);
    if (it == grams.end()) {
      GramQ g;
      g.num = ZMat::identity(o.quotient_rank);
      grams[o.cone_id] = g;
      it = grams.find(o.cone_id);
    }
    if (it->second.num.rows() != o.quotient_rank)
      throw DomainError("Gram size mismatch on cone " + std::to_string(o.cone_id));
    if (!it->second.positive_definite())
      throw DomainError("Gram on cone " + std::to_string(o.cone_id) + " is not positive definite");
  }
  law.grams_ = std::move(grams);
  return law;
}

EnergyLaw EnergyLaw::norm_power_uniform(const Fan& fan, double c) {
  return norm_power(fan, c, {});
}

namespace {

std::vector<Mat64> stabilizer_mats(const Fan& fan, const SymmetryData& sym, int cone_id) {
  std::vector<Mat64> out;
  const OrbitLattice& o = fan.orbit(cone_id);
  for (int idx : sym.stabilizer(cone_id))
    out.push_back(Mat64::from_zmat(induced_quotient_map(o, o, sym.elements[idx])));
  return out;
}

}  // namespace

EnergyLaw EnergyLaw::orbit_table(const Fan& fan, const SymmetryData& sym, double c, std::int64_t radius,
                                 const std::vector<std::tuple<int, IVec, double>>& entries) {
  fan.require_valid();
  if (!(c > 0)) throw DomainError("scaling exponent c must be positive");
  if (radius < 1) throw DomainError("orbit table radius must be >= 1");
  EnergyLaw law;
  law.kind_ = Kind::OrbitTable;
  law.c_ = c;
  law.radius_ = radius;
  for (const auto& o : fan.orbits()) {
    if (o.quotient_rank == 0) continue;
    Table t;
    t.radius = radius;
    t.g1 = stabilizer_mats(fan, sym, o.cone_id);
    law.tables_[o.cone_id] = std::move(t);
  }
  for (const auto& [cone_id, xi, val] : entries) {
    auto it = law.tables_.find(cone_id);
    if (it == law.tables_.end()) throw DomainError("orbit table entry on rank-0 cone " + std::to_string(cone_id));
    if (gcd_abs(xi) != 1) throw DomainError("orbit table entry is not a primitive vector");
    if (!(val > 0)) throw DomainError("energy values must be strictly positive");
    IVec key = it->second.canonical(xi);
    auto [pos, fresh] = it->second.base.emplace(key, val);
    if (!fresh && pos->second != val)
      throw DomainError("conflicting values on one orbit (cone " + std::to_string(cone_id) + ")");
  }
  // Completeness within the stored radius, plus the growth floor.
  for (auto& [cone_id, t] : law.tables_) {
    int dk = fan.orbit(cone_id).quotient_rank;
    double kappa = std::numeric_limits<double>::infinity();
    bool any = false;
    enumerate_box(dk, radius, [&](const IVec& xi) {
      if (gcd_abs(xi) != 1) return;
      any = true;
      auto it = t.base.find(t.canonical(xi));
      if (it == t.base.end())
        throw DomainError("orbit table on cone " + std::to_string(cone_id) + " misses primitive vector " +
                          [&] {
                            std::ostringstream os;
                            for (auto v : xi) os << v << " ";
                            return os.str();
                          }());
      kappa = std::min(kappa, it->second / std::pow(double(sup_norm(xi)), law.c_));
    });
    t.kappa = any ? kappa : 0.0;
  }
  return law;
}

EnergyLaw EnergyLaw::orbit_table_from_gram(const Fan& fan, const SymmetryData& sym, double c,
                                           std::int64_t radius, const std::map<int, GramQ>& grams) {
  fan.require_valid();
  std::vector<std::tuple<int, IVec, double>> entries;
  for (const auto& o : fan.orbits()) {
    if (o.quotient_rank == 0) continue;
    auto it = grams.find(o.cone_id);
    if (it == grams.end()) throw DomainError("missing Gram for cone " + std::to_string(o.cone_id));
    enumerate_box(o.quotient_rank, radius, [&](const IVec& xi) {
      if (gcd_abs(xi) != 1) return;
      entries.emplace_back(o.cone_id, xi, std::pow(it->second.eval(xi), c / 2.0));
    });
  }
  return orbit_table(fan, sym, c, radius, entries);
}

double EnergyLaw::value(int cone_id, const IVec& xi) const {
  std::int64_t g = gcd_abs(xi);
  if (g == 0) throw DomainError("the zero vector carries no energy state");
  if (kind_ == Kind::NormPower) {
    auto it = grams_.find(cone_id);
    if (it == grams_.end()) throw DomainError("no energy data on cone " + std::to_string(cone_id));
    return std::pow(it->second.eval(xi), c_ / 2.0);
  }
  auto it = tables_.find(cone_id);
  if (it == tables_.end()) throw DomainError("no energy data on cone " + std::to_string(cone_id));
  IVec prim(xi.size());
  for (size_t i = 0; i < xi.size(); ++i) prim[i] = xi[i] / g;
  if (sup_norm(prim) > it->second.radius)
    throw DomainError("orbit table query beyond stored radius on cone " + std::to_string(cone_id));
  auto val = it->second.base.find(it->second.canonical(prim));
  if (val == it->second.base.end())
    throw DomainError("orbit table has no value for this vector");
  return std::pow(double(g), c_) * val->second;
}

double gram_lambda_floor(const GramQ& q) {
  int n = q.num.rows();
  QQ gersh;
  bool first = true;
  for (int i = 0; i < n; ++i) {
    ZZ off = 0;
    for (int j = 0; j < n; ++j)
      if (j != i) off += abs(q.num(i, j));
    QQ row(q.num(i, i) - off, q.den);
    row.canonicalize();
    if (first || row < gersh) gersh = row;
    first = false;
  }
  double lam;
  if (gersh > 0) {
    lam = gersh.get_d();
  } else {
    // Jacobi sweep eigenvalue estimate, deflated for safety.
    std::vector<std::vector<double>> a(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a[i][j] = QQ(q.num(i, j), q.den).get_d();
    for (int sweep = 0; sweep < 64; ++sweep) {
      for (int p = 0; p < n; ++p)
        for (int r = p + 1; r < n; ++r) {
          if (std::abs(a[p][r]) < 1e-300) continue;
          double theta = 0.5 * std::atan2(2 * a[p][r], a[r][r] - a[p][p]);
          double cth = std::cos(theta), sth = std::sin(theta);
          for (int k = 0; k < n; ++k) {
            double akp = a[k][p], akr = a[k][r];
            a[k][p] = cth * akp - sth * akr;
            a[k][r] = sth * akp + cth * akr;
          }
          for (int k = 0; k < n; ++k) {
            double apk = a[p][k], ark = a[r][k];
            a[p][k] = cth * apk - sth * ark;
            a[r][k] = sth * apk + cth * ark;
          }
        }
    }
    lam = a[0][0];
    for (int i = 1; i < n; ++i) lam = std::min(lam, a[i][i]);
    lam *= 0.999;
  }
  if (!(lam > 0)) throw DomainError("could not certify a positive growth floor");
  return lam;
}

double EnergyLaw::growth_floor(int cone_id) const {
  if (kind_ == Kind::OrbitTable) {
    auto it = tables_.find(cone_id);
    if (it == tables_.end()) throw DomainError("no energy data on cone " + std::to_string(cone_id));
    return it->second.kappa;
  }
  auto it = grams_.find(cone_id);
  if (it == grams_.end()) throw DomainError("no energy data on cone " + std::to_string(cone_id));
  return std::pow(gram_lambda_floor(it->second), c_ / 2.0);
}

const GramQ& EnergyLaw::gram(int cone_id) const {
  auto it = grams_.find(cone_id);
  if (it == grams_.end()) throw DomainError("no Gram on cone " + std::to_string(cone_id));
  return it->second;
}

const EnergyLaw::Table& EnergyLaw::table(int cone_id) const {
  auto it = tables_.find(cone_id);
  if (it == tables_.end()) throw DomainError("no table on cone " + std::to_string(cone_id));
  return it->second;
}

bool EnergyLaw::has_cone(int cone_id) const {
  return kind_ == Kind::NormPower ? grams_.count(cone_id) > 0 : tables_.count(cone_id) > 0;
}

EnergyLaw EnergyLaw::from_json_text(const Fan& fan, const SymmetryData* sym, const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("bad law JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("c") || !j.contains("kind"))
    throw ParseError("law JSON needs 'c' and 'kind'");
  double c = j["c"].get<double>();
  std::string kind = j["kind"].get<std::string>();

  auto parse_grams = [&](const Json& gj) {
    std::map<int, GramQ> grams;
    for (auto it = gj.begin(); it != gj.end(); ++it) {
      int cone_id = std::stoi(it.key());
      const Json& entry = it.value();
      GramQ g;
      const Json& numj = entry.is_object() ? entry.at("num") : entry;
      int n = int(numj.size());
      g.num = ZMat(n, n);
      for (int r = 0; r < n; ++r)
        for (int cc = 0; cc < n; ++cc) g.num(r, cc) = ZZ(numj[r][cc].get<long>());
      if (entry.is_object() && entry.contains("den")) g.den = ZZ(entry["den"].get<long>());
      grams[cone_id] = g;
    }
    return grams;
  };

  if (kind == "norm_power") {
    std::map<int, GramQ> grams;
    if (j.contains("grams")) grams = parse_grams(j["grams"]);
    return norm_power(fan, c, std::move(grams));
  }
  if (kind == "orbit_table") {
    if (!sym) throw DomainError("orbit table laws require symmetry data");
    std::int64_t radius = j.at("radius").get<std::int64_t>();
    if (j.contains("generator")) {
      std::map<int, GramQ> grams = parse_grams(j["generator"].at("grams"));
      return orbit_table_from_gram(fan, *sym, c, radius, grams);
    }
    std::vector<std::tuple<int, IVec, double>> entries;
    for (const Json& e : j.at("entries")) {
      IVec xi;
      for (const Json& v : e.at("xi")) xi.push_back(v.get<std::int64_t>());
      entries.emplace_back(e.at("cone").get<int>(), xi, e.at("value").get<double>());
    }
    return orbit_table(fan, *sym, c, radius, entries);
  }
  throw ParseError("unknown law kind: " + kind);
}

std::string EnergyLaw::to_json_text() const {
  Json j;
  j["c"] = c_;
  if (kind_ == Kind::NormPower) {
    j["kind"] = "norm_power";
    Json g = Json::object();
    for (const auto& [cone_id, q] : grams_) {
      Json e;
      Json num = Json::array();
      for (int r = 0; r < q.num.rows(); ++r) {
        Json row = Json::array();
        for (int c2 = 0; c2 < q.num.cols(); ++c2) row.push_back(q.num(r, c2).get_si());
        num.push_back(row);
      }
      e["num"] = num;
      e["den"] = q.den.get_si();
      g[std::to_string(cone_id)] = e;
    }
    j["grams"] = g;
  } else {
    j["kind"] = "orbit_table";
    j["radius"] = radius_;
    Json entries = Json::array();
    for (const auto& [cone_id, t] : tables_) {
      for (const auto& [xi, val] : t.base) {
        Json e;
        e["cone"] = cone_id;
        e["xi"] = xi;
        e["value"] = val;
        entries.push_back(e);
      }
    }
    j["entries"] = entries;
  }
  return j.dump(2);
}

std::vector<PrimitiveOrbit> primitive_reps(const Fan& fan, const SymmetryData& sym, int cone_id,
                                           std::int64_t radius) {
  fan.require_valid();
  const OrbitLattice& o = fan.orbit(cone_id);
  std::vector<PrimitiveOrbit> out;
  if (o.quotient_rank == 0) return out;
  std::vector<Mat64> g1 = stabilizer_mats(fan, sym, cone_id);
  std::map<IVec, std::vector<IVec>> orbits;
  enumerate_box(o.quotient_rank, radius, [&](const IVec& xi) {
    if (gcd_abs(xi) != 1) return;
    IVec best = xi;
    for (const Mat64& m : g1) best = std::min(best, m.apply(xi));
    orbits[best].push_back(xi);
  });
  for (auto& [rep, members] : orbits) out.push_back({rep, std::move(members)});
  return out;
}

Mat64 quotient_action(const Fan& fan, const SymmetryData& sym, int elem, int cone_id) {
  const OrbitLattice& from = fan.orbit(cone_id);
  const OrbitLattice& to = fan.orbit(sym.perm_of(elem, cone_id));
  return Mat64::from_zmat(induced_quotient_map(from, to, sym.elements[elem]));
}

std::map<int, GramQ> invariant_grams(const Fan& fan, const SymmetryData& sym) {
  fan.require_valid();
  std::map<int, GramQ> out;
  std::set<int> done;
  for (const auto& o : fan.orbits()) {
    if (o.quotient_rank == 0 || done.count(o.cone_id)) continue;
    // Anchor: average A^T A over the stabilizer.
    ZMat q(o.quotient_rank, o.quotient_rank);
    for (int idx : sym.stabilizer(o.cone_id)) {
      ZMat a = induced_quotient_map(o, o, sym.elements[idx]);
      ZMat ata = a.transposed() * a;
      for (int i = 0; i < q.rows(); ++i)
        for (int j = 0; j < q.cols(); ++j) q(i, j) += ata(i, j);
    }
    GramQ anchor{q, 1};
    out[o.cone_id] = anchor;
    done.insert(o.cone_id);
    // Transport along the G-orbit of the cone.
    for (int e = 0; e < sym.order(); ++e) {
      int target = sym.perm_of(e, o.cone_id);
      if (done.count(target)) continue;
      ZMat a = induced_quotient_map(o, fan.orbit(target), sym.elements[e]);
      auto ainv = inverse_unimodular(a);
      if (!ainv) throw DomainError("quotient action is not unimodular");
      GramQ g{ainv->transposed() * anchor.num * *ainv, anchor.den};
      out[target] = g;
      done.insert(target);
    }
  }
  return out;
}

TransportResult transport_h(const EnergyLaw& law, const Fan& fan, const SymmetryData& sym, int elem,
                            int from_id, int to_id) {
  fan.require_valid();
  if (sym.perm_of(elem, from_id) != to_id)
    throw DomainError("symmetry element does not map the source cone to the target cone");
  const OrbitLattice& from = fan.orbit(from_id);
  const OrbitLattice& to = fan.orbit(to_id);
  if (from.quotient_rank == 0)
    throw DomainError("transport is defined only on cones of positive quotient rank");
  ZMat a = induced_quotient_map(from, to, sym.elements[elem]);
  TransportResult res;

  if (law.kind() == EnergyLaw::Kind::NormPower) {
    auto ainv = inverse_unimodular(a);
    if (!ainv) throw DomainError("quotient action is not unimodular");
    const GramQ& qf = law.gram(from_id);
    GramQ derived{ainv->transposed() * qf.num * *ainv, qf.den};
    const GramQ& qt = law.gram(to_id);
    // Compare as rationals: den_t * num_d == den_d * num_t.
    ZMat lhs = derived.num, rhs = qt.num;
    bool equal = lhs.rows() == rhs.rows();
    if (equal)
      for (int i = 0; i < lhs.rows() && equal; ++i)
        for (int j = 0; j < lhs.cols() && equal; ++j)
          equal = (qt.den * lhs(i, j) == derived.den * rhs(i, j));
    res.consistent = equal;
    if (!equal) res.conflict = "transported Gram differs from the Gram stored on the target cone";
    res.derived_gram = derived;
    res.checked = 1;
    return res;
  }

  Mat64 a64 = Mat64::from_zmat(a);
  const auto& tf = law.table(from_id);
  const auto& tt = law.table(to_id);
  std::map<IVec, double> derived;
  enumerate_box(from.quotient_rank, tf.radius, [&](const IVec& xi) {
    if (gcd_abs(xi) != 1) return;
    auto vf = tf.base.find(tf.canonical(xi));
    if (vf == tf.base.end()) return;
    IVec img = tt.canonical(a64.apply(xi));
    auto [pos, fresh] = derived.emplace(img, vf->second);
    if (!fresh && pos->second != vf->second) {
      res.consistent = false;
      res.conflict = "source orbit values collide under transport";
    }
    auto vt = tt.base.find(img);
    ++res.checked;
    if (vt != tt.base.end() && vt->second != vf->second && res.consistent) {
      res.consistent = false;
      std::ostringstream os;
      os << "value mismatch on target cone " << to_id << ": " << vt->second << " vs " << vf->second;
      res.conflict = os.str();
    }
  });
  for (auto& kv : derived) res.derived_table.emplace_back(kv.first, kv.second);
  return res;
}

std::string transport_report_json(const EnergyLaw& law, const Fan& fan, const SymmetryData& sym) {
  fan.require_valid();
  Json out = Json::array();
  std::set<int> seen;
  for (const auto& o : fan.orbits()) {
    if (o.quotient_rank == 0 || seen.count(o.cone_id)) continue;
    Json entry;
    entry["anchor"] = o.cone_id;
    Json targets = Json::array();
    seen.insert(o.cone_id);
    for (int e = 0; e < sym.order(); ++e) {
      int target = sym.perm_of(e, o.cone_id);
      if (seen.count(target)) continue;
      seen.insert(target);
      TransportResult tr = transport_h(law, fan, sym, e, o.cone_id, target);
      Json tj;
      tj["cone"] = target;
      tj["element"] = e;
      tj["consistent"] = tr.consistent;
      tj["checked"] = tr.checked;
      tj["conflict"] = tr.conflict.empty() ? Json() : Json(tr.conflict);
      targets.push_back(tj);
    }
    entry["targets"] = targets;
    out.push_back(entry);
  }
  return out.dump();
}

CovarianceCheck check_covariance_law(const EnergyLaw& law, const Fan& fan, const SymmetryData& sym,
                                     int samples, std::uint64_t seed) {
  fan.require_valid();
  if (!sym.splits)
    throw DomainError("covariance sampling requires split symmetry data (S = N x G)");
  std::mt19937_64 rng(seed);
  std::vector<int> positive_rank;
  for (const auto& o : fan.orbits())
    if (o.quotient_rank >= 1) positive_rank.push_back(o.cone_id);
  if (positive_rank.empty()) return {true, 0, ""};

  CovarianceCheck out;
  for (int s = 0; s < samples; ++s) {
    int k = positive_rank[rng() % positive_rank.size()];
    int dk = fan.orbit(k).quotient_rank;
    IVec xi(dk);
    bool zero = true;
    for (int i = 0; i < dk; ++i) {
      xi[i] = std::int64_t(rng() % 5) - 2;
      if (xi[i]) zero = false;
    }
    if (zero) xi[rng() % dk] = 1;
    int n = 1 + int(rng() % 3);
    int e = int(rng() % sym.order());
    int target = sym.perm_of(e, k);
    Mat64 a = quotient_action(fan, sym, e, k);
    IVec img = a.apply(xi);
    for (auto& v : img) v *= n;
    double lhs, rhs;
    try {
      lhs = law.value(target, img);
      rhs = std::pow(double(n), law.c()) * law.value(k, xi);
    } catch (const DomainError&) {
      continue;  // sample escaped the stored radius
    }
    ++out.samples_checked;
    double den = std::max(std::abs(lhs), std::abs(rhs));
    if (std::abs(lhs - rhs) > 1e-12 * den) {
      out.ok = false;
      std::ostringstream os;
      os << "cone " << k << " -> " << target << ", n=" << n << ", elem=" << e << ": " << lhs << " vs " << rhs;
      out.counterexample = os.str();
      return out;
    }
  }
  return out;
}

}  // namespace toric
