#include "toric/fan.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace toric {

namespace {

using Json = nlohmann::ordered_json;

// Unique rational solution of (cols as columns) * lambda = rhs, if the
// system is consistent and has full column rank.
std::optional<QVec> solve_unique(const std::vector<ZVec>& cols, const ZVec& rhs) {
  int m = int(rhs.size());
  int k = int(cols.size());
  std::vector<QVec> a(m, QVec(k + 1));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < k; ++j) a[i][j] = QQ(cols[j][i]);
    a[i][k] = QQ(rhs[i]);
  }
  int r = 0;
  for (int c = 0; c < k && r < m; ++c) {
    int p = -1;
    for (int i = r; i < m; ++i)
      if (a[i][c] != 0) {
        p = i;
        break;
      }
    if (p < 0) return std::nullopt;  // rank-deficient: solution not unique
    std::swap(a[r], a[p]);
    QQ inv = 1 / a[r][c];
    for (int j = c; j <= k; ++j) a[r][j] *= inv;
    for (int i = 0; i < m; ++i) {
      if (i == r || a[i][c] == 0) continue;
      QQ f = a[i][c];
      for (int j = c; j <= k; ++j) a[i][j] -= f * a[r][j];
    }
    ++r;
  }
  if (r < k) return std::nullopt;
  for (int i = r; i < m; ++i)
    if (a[i][k] != 0) return std::nullopt;  // inconsistent
  QVec x(k);
  for (int i = 0; i < k; ++i) x[i] = a[i][k];
  return x;
}

void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx(k);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == k) {
      fn(idx);
      return;
    }
    for (int i = start; i <= n - (k - depth); ++i) {
      idx[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  if (k >= 0 && k <= n) rec(0, 0);
}

// x in cone(gens), decided by conic Caratheodory over all independent
// subsets of size <= rank. Exact; used only during geometry derivation.
bool cone_member(const ZVec& x, const std::vector<ZVec>& gens, int rank) {
  if (is_zero(x)) return true;
  for (int k = 1; k <= std::min<int>(rank, int(gens.size())); ++k) {
    bool found = false;
    for_each_subset(int(gens.size()), k, [&](const std::vector<int>& idx) {
      if (found) return;
      std::vector<ZVec> sub;
      for (int i : idx) sub.push_back(gens[i]);
      auto sol = solve_unique(sub, x);
      if (!sol) return;
      for (const QQ& q : *sol)
        if (q < 0) return;
      found = true;
    });
    if (found) return true;
  }
  return false;
}

// Nontrivial nonnegative combination of the rays summing to zero exists
// iff the cone contains a line.
bool has_lineality(const std::vector<ZVec>& rays, int d) {
  int t = int(rays.size());
  if (t == 0) return false;
  ZVec rhs(d + 1);
  rhs[d] = 1;
  std::vector<ZVec> cols(t, ZVec(d + 1));
  for (int j = 0; j < t; ++j) {
    for (int i = 0; i < d; ++i) cols[j][i] = rays[j][i];
    cols[j][d] = 1;
  }
  int rk = rank_of(ZMat::from_columns(rays));
  bool feasible = false;
  for (int k = 1; k <= std::min(t, rk + 1) && !feasible; ++k) {
    for_each_subset(t, k, [&](const std::vector<int>& idx) {
      if (feasible) return;
      std::vector<ZVec> sub;
      for (int i : idx) sub.push_back(cols[i]);
      auto sol = solve_unique(sub, rhs);
      if (!sol) return;
      for (const QQ& q : *sol)
        if (q < 0) return;
      feasible = true;
    });
  }
  return feasible;
}

struct Geom {
  int dim = 0;
  std::vector<ZVec> xrays;
  ZMat span_eq;
  std::vector<ZVec> ineqs;
};

// Derives span equations, extreme rays and the inequality set of a pointed
// cone. Rays must be nonzero; duplicates are tolerated.
Geom derive_geom(std::vector<ZVec> rays, int d) {
  Geom g;
  std::sort(rays.begin(), rays.end());
  rays.erase(std::unique(rays.begin(), rays.end()), rays.end());
  ZMat r_cols = ZMat::from_columns(rays);
  if (rays.empty()) r_cols = ZMat(d, 0);
  g.span_eq = kernel_basis(r_cols.empty() ? ZMat(0, d) : r_cols.transposed()).transposed();
  if (g.span_eq.cols() == 0) g.span_eq = ZMat(g.span_eq.rows(), d);
  g.dim = d - g.span_eq.rows();

  int rk = g.dim;
  for (const ZVec& r : rays) {
    std::vector<ZVec> others;
    for (const ZVec& o : rays)
      if (o != r) others.push_back(o);
    if (!cone_member(r, others, rk)) g.xrays.push_back(r);
  }
  std::sort(g.xrays.begin(), g.xrays.end());

  if (g.dim >= 1) {
    std::set<ZVec> seen;
    int s = g.dim;
    for_each_subset(int(g.xrays.size()), s - 1, [&](const std::vector<int>& idx) {
      std::vector<ZVec> stacked_rows;
      for (int i = 0; i < g.span_eq.rows(); ++i) stacked_rows.push_back(g.span_eq.row(i));
      for (int i : idx) stacked_rows.push_back(g.xrays[i]);
      ZMat stacked = stacked_rows.empty() ? ZMat(0, d) : ZMat::from_rows(stacked_rows);
      ZMat k = kernel_basis(stacked);
      if (k.cols() != 1) return;
      ZVec w = primitive_part(k.col(0));
      bool pos = false, neg = false;
      for (const ZVec& r : g.xrays) {
        int c = sgn(dot(w, r));
        if (c > 0) pos = true;
        if (c < 0) neg = true;
      }
      if (pos && neg) return;
      if (neg) w = negated(w);
      if (!pos && !neg) return;  // orthogonal to the whole cone: impossible for w != 0 in span
      if (seen.insert(w).second) g.ineqs.push_back(w);
    });
    std::sort(g.ineqs.begin(), g.ineqs.end());
  }
  return g;
}

void collect_faces(const std::vector<ZVec>& xrays, int d, std::set<std::vector<ZVec>>& out) {
  if (out.count(xrays)) return;
  out.insert(xrays);
  if (xrays.empty()) return;
  Geom g = derive_geom(xrays, d);
  for (const ZVec& w : g.ineqs) {
    std::vector<ZVec> sub;
    for (const ZVec& r : g.xrays)
      if (dot(w, r) == 0) sub.push_back(r);
    std::sort(sub.begin(), sub.end());
    collect_faces(sub, d, out);
  }
}

// Extreme rays of cone_a ∩ cone_b, canonical. Both cones must be pointed.
std::vector<ZVec> intersection_rays(const Cone& a, const Cone& b, int d) {
  std::vector<ZVec> eq_rows;
  for (int i = 0; i < a.span_eq.rows(); ++i) eq_rows.push_back(a.span_eq.row(i));
  for (int i = 0; i < b.span_eq.rows(); ++i) eq_rows.push_back(b.span_eq.row(i));
  ZMat eqs = eq_rows.empty() ? ZMat(0, d) : ZMat::from_rows(eq_rows);
  ZMat e = kernel_basis(eqs);
  int s0 = e.cols();
  std::vector<ZVec> result;
  if (s0 == 0) return result;

  std::vector<ZVec> brows;
  auto add_restricted = [&](const std::vector<ZVec>& ws) {
    for (const ZVec& w : ws) {
      ZVec wr(s0);
      for (int j = 0; j < s0; ++j) wr[j] = dot(w, e.col(j));
      if (!is_zero(wr)) brows.push_back(wr);
    }
  };
  add_restricted(a.inequalities);
  add_restricted(b.inequalities);
  std::sort(brows.begin(), brows.end());
  brows.erase(std::unique(brows.begin(), brows.end()), brows.end());

  std::set<ZVec> found;
  for_each_subset(int(brows.size()), s0 - 1, [&](const std::vector<int>& idx) {
    ZMat sub(int(idx.size()), s0);
    for (size_t i = 0; i < idx.size(); ++i)
      for (int j = 0; j < s0; ++j) sub(int(i), j) = brows[idx[i]][j];
    ZMat k = kernel_basis(idx.empty() ? ZMat(0, s0) : sub);
    if (k.cols() != 1) return;
    ZVec y = primitive_part(k.col(0));
    bool pos_ok = true, neg_ok = true;
    for (const ZVec& row : brows) {
      int c = sgn(dot(row, y));
      if (c < 0) pos_ok = false;
      if (c > 0) neg_ok = false;
    }
    if (pos_ok) found.insert(y);
    if (neg_ok && !pos_ok) found.insert(negated(y));
  });

  for (const ZVec& y : found) {
    ZVec x(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < s0; ++j) x[i] += e(i, j) * y[j];
    result.push_back(primitive_part(x));
  }
  std::sort(result.begin(), result.end());
  result.erase(std::unique(result.begin(), result.end()), result.end());
  return result;
}

}  // namespace

std::string ValidationReport::summary() const {
  if (violations.empty()) return "valid";
  std::ostringstream os;
  for (const auto& v : violations) {
    os << v.kind << " (cone " << v.cone_id;
    if (v.other_id) os << ", cone " << v.other_id;
    os << ")";
    if (!v.detail.empty()) os << ": " << v.detail;
    os << "\n";
  }
  return os.str();
}

Fan Fan::from_json_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("bad fan JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("rank") || !j.contains("cones"))
    throw ParseError("fan JSON must be an object with 'rank' and 'cones'");
  if (!j["rank"].is_number_integer() || j["rank"].get<int>() <= 0)
    throw ParseError("'rank' must be a positive integer");
  int d = j["rank"].get<int>();
  if (!j["cones"].is_array()) throw ParseError("'cones' must be an array");

  Fan fan;
  fan.rank_ = d;
  std::set<int> ids;
  for (const auto& cj : j["cones"]) {
    if (!cj.is_object() || !cj.contains("id") || !cj.contains("rays"))
      throw ParseError("each cone needs 'id' and 'rays'");
    Cone c;
    c.id = cj["id"].get<int>();
    if (!ids.insert(c.id).second) throw ParseError("duplicate cone id " + std::to_string(c.id));
    if (!cj["rays"].is_array()) throw ParseError("'rays' must be an array");
    for (const auto& rj : cj["rays"]) {
      if (!rj.is_array() || int(rj.size()) != d)
        throw ParseError("ray of cone " + std::to_string(c.id) + " must have length " + std::to_string(d));
      ZVec ray(d);
      for (int i = 0; i < d; ++i) {
        if (!rj[i].is_number_integer()) throw ParseError("ray entries must be integers");
        ray[i] = ZZ(rj[i].get<long>());
      }
      c.rays.push_back(ray);
    }
    fan.cones_.push_back(std::move(c));
  }
  int m = int(fan.cones_.size());
  for (int k = 1; k <= m; ++k)
    if (!ids.count(k)) throw ParseError("cone ids must be exactly 1.." + std::to_string(m));
  // Store in id order so that cone index is always id - 1.
  std::sort(fan.cones_.begin(), fan.cones_.end(), [](const Cone& a, const Cone& b) { return a.id < b.id; });
  for (int i = 0; i < m; ++i) fan.id_to_index_[fan.cones_[i].id] = i;
  fan.derive_geometry();
  fan.run_validation();
  return fan;
}

Fan Fan::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open fan file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

Fan Fan::from_rays(int rank, const std::vector<std::vector<ZVec>>& cones) {
  Fan fan;
  fan.rank_ = rank;
  for (size_t i = 0; i < cones.size(); ++i) {
    Cone c;
    c.id = int(i) + 1;
    c.rays = cones[i];
    fan.cones_.push_back(std::move(c));
    fan.id_to_index_[int(i) + 1] = int(i);
  }
  fan.derive_geometry();
  fan.run_validation();
  return fan;
}

const Cone& Fan::cone(int id) const {
  auto it = id_to_index_.find(id);
  if (it == id_to_index_.end()) throw DomainError("no cone with id " + std::to_string(id));
  return cones_[it->second];
}

void Fan::require_valid() const {
  if (!report_.ok()) throw InvalidFanError("fan is not valid: " + report_.summary());
}

void Fan::derive_geometry() {
  for (Cone& c : cones_) {
    std::vector<ZVec> clean;
    for (const ZVec& r : c.rays) {
      if (is_zero(r)) continue;
      if (content(r) != 1) c.rays_primitive = false;
      clean.push_back(r);
    }
    if (has_lineality(clean, rank_)) {
      c.pointed = false;
      c.dim = rank_of(clean.empty() ? ZMat(rank_, 0) : ZMat::from_columns(clean));
      continue;
    }
    Geom g = derive_geom(clean, rank_);
    c.dim = g.dim;
    c.extreme_rays = g.xrays;
    c.span_eq = g.span_eq;
    c.inequalities = g.ineqs;
    std::set<std::vector<ZVec>> faces;
    collect_faces(c.extreme_rays, rank_, faces);
    c.faces.assign(faces.begin(), faces.end());
    if (c.extreme_rays.empty()) zero_cone_id_ = c.id;
  }
}

void Fan::run_validation() {
  auto& out = report_.violations;
  out.clear();
  if (cones_.empty()) {
    out.push_back({"empty_fan", 0, 0, "a fan must contain at least the zero cone"});
    return;
  }
  for (const Cone& c : cones_) {
    std::set<ZVec> seen;
    for (const ZVec& r : c.rays) {
      if (is_zero(r)) {
        out.push_back({"zero_ray", c.id, 0, ""});
        continue;
      }
      if (content(r) != 1) out.push_back({"non_primitive_ray", c.id, 0, to_string(r)});
      if (!seen.insert(r).second) out.push_back({"duplicate_ray", c.id, 0, to_string(r)});
    }
    if (!c.pointed) out.push_back({"lineality", c.id, 0, "cone contains a line"});
  }

  std::map<std::vector<ZVec>, int> by_rays;
  for (const Cone& c : cones_) {
    if (!c.pointed) continue;
    auto [it, fresh] = by_rays.emplace(c.extreme_rays, c.id);
    if (!fresh) out.push_back({"duplicate_cone", c.id, it->second, "same cone listed twice"});
  }
  for (const Cone& c : cones_) {
    if (!c.pointed) continue;
    for (const auto& f : c.faces) {
      if (f == c.extreme_rays) continue;
      if (!by_rays.count(f)) {
        std::string d = f.empty() ? "zero cone" : ("face with rays " + to_string(f[0]) + (f.size() > 1 ? ",..." : ""));
        out.push_back({"missing_face", c.id, 0, d});
      }
    }
  }
  for (size_t i = 0; i < cones_.size(); ++i) {
    for (size_t j = i + 1; j < cones_.size(); ++j) {
      const Cone& a = cones_[i];
      const Cone& b = cones_[j];
      if (!a.pointed || !b.pointed) continue;
      std::vector<ZVec> inter = intersection_rays(a, b, rank_);
      auto is_face_of = [&](const Cone& c) {
        return std::find(c.faces.begin(), c.faces.end(), inter) != c.faces.end();
      };
      if (!is_face_of(a) || !is_face_of(b))
        out.push_back({"bad_intersection", a.id, b.id, "intersection is not a common face"});
    }
  }
  if (report_.ok()) build_orbits();
}

bool Fan::contains(int id, const ZVec& x) const {
  const Cone& c = cone(id);
  if (!c.pointed) throw DomainError("membership in a non-pointed cone");
  for (int i = 0; i < c.span_eq.rows(); ++i)
    if (dot(c.span_eq.row(i), x) != 0) return false;
  for (const ZVec& w : c.inequalities)
    if (dot(w, x) < 0) return false;
  return true;
}

bool Fan::in_relint(int id, const ZVec& x) const {
  const Cone& c = cone(id);
  if (!c.pointed) throw DomainError("membership in a non-pointed cone");
  for (int i = 0; i < c.span_eq.rows(); ++i)
    if (dot(c.span_eq.row(i), x) != 0) return false;
  for (const ZVec& w : c.inequalities)
    if (dot(w, x) <= 0) return false;
  return true;
}

std::optional<int> Fan::relint_image_cone(const ZMat& phi, int j) const {
  require_valid();
  if (det(phi) == 0) throw DomainError("singular lattice map");
  const Cone& c = cone(j);
  ZVec sample(rank_);
  for (const ZVec& r : c.extreme_rays)
    for (int i = 0; i < rank_; ++i) sample[i] += r[i];
  ZVec img = mul(phi, sample);
  std::optional<int> hit;
  for (const Cone& k : cones_) {
    if (!in_relint(k.id, img)) continue;
    if (hit) throw DomainError("relative interiors overlap; fan is inconsistent");
    hit = k.id;
  }
  return hit;
}

void Fan::build_orbits() {
  orbits_.clear();
  for (const Cone& c : cones_) {
    OrbitLattice o;
    o.cone_id = c.id;
    int d = rank_;
    // Perp lattice: integer kernel of the transposed ray matrix.
    ZMat r_cols = c.extreme_rays.empty() ? ZMat(d, 0) : ZMat::from_columns(c.extreme_rays);
    ZMat perp0 = kernel_basis(r_cols.empty() ? ZMat(0, d) : r_cols.transposed()).transposed();
    if (perp0.cols() == 0) perp0 = ZMat(perp0.rows(), d);
    o.quotient_rank = perp0.rows();

    // N_k = N ∩ span(cone) = kernel of the perp equations.
    ZMat nk = kernel_basis(perp0.rows() ? perp0 : ZMat(0, d));
    ZMat s, u, v;
    snf(nk.cols() ? nk : ZMat(d, 0), s, u, v);
    for (int i = 0; i < std::min(s.rows(), s.cols()); ++i)
      if (s(i, i) != 1) throw DomainError("orbit lattice: non-saturated span sublattice");
    int span_dim = nk.cols();
    ZMat p0(o.quotient_rank, d);
    for (int i = 0; i < o.quotient_rank; ++i)
      for (int jj = 0; jj < d; ++jj) p0(i, jj) = u(span_dim + i, jj);
    o.quotient_proj = hnf_rows(p0);
    o.section = o.quotient_rank ? right_inverse(o.quotient_proj) : ZMat(d, 0);

    if (o.quotient_rank) {
      ZMat pairing = perp0 * o.section;
      auto inv = inverse_unimodular(pairing);
      if (!inv) throw DomainError("orbit lattice: duality pairing is not unimodular");
      o.perp_basis = *inv * perp0;
    } else {
      o.perp_basis = ZMat(0, d);
    }
    orbits_.push_back(std::move(o));
  }
  orbits_built_ = true;
}

const OrbitLattice& Fan::orbit(int id) const {
  require_valid();
  auto it = id_to_index_.find(id);
  if (it == id_to_index_.end()) throw DomainError("no cone with id " + std::to_string(id));
  return orbits_[it->second];
}

const std::vector<OrbitLattice>& Fan::orbits() const {
  require_valid();
  return orbits_;
}

std::vector<ZVec> Fan::ray_generators() const {
  std::vector<ZVec> gens;
  for (const Cone& c : cones_)
    if (c.pointed && c.dim == 1) gens.push_back(c.extreme_rays[0]);
  std::sort(gens.begin(), gens.end());
  gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
  return gens;
}

std::string Fan::to_json_text() const {
  Json j;
  j["rank"] = rank_;
  j["cones"] = Json::array();
  for (const Cone& c : cones_) {
    Json cj;
    cj["id"] = c.id;
    cj["rays"] = Json::array();
    for (const ZVec& r : c.rays) {
      Json rj = Json::array();
      for (const ZZ& x : r) rj.push_back(x.get_si());
      cj["rays"].push_back(rj);
    }
    j["cones"].push_back(cj);
  }
  return j.dump(2);
}

ZMat induced_quotient_map(const OrbitLattice& from, const OrbitLattice& to, const ZMat& psi) {
  return to.quotient_proj * psi * from.section;
}

Fan make_torus_fan(int d) { return Fan::from_rays(d, {{}}); }

Fan make_affine_fan(int d) {
  // All faces of cone(e_1..e_d): one cone per subset of the basis.
  std::vector<std::vector<ZVec>> cones;
  for (int mask = 0; mask < (1 << d); ++mask) {
    std::vector<ZVec> rays;
    for (int i = 0; i < d; ++i)
      if (mask & (1 << i)) {
        ZVec e(d);
        e[i] = 1;
        rays.push_back(e);
      }
    cones.push_back(rays);
  }
  return Fan::from_rays(d, cones);
}

Fan make_projective_fan(int d) {
  std::vector<ZVec> gen(d + 1, ZVec(d));
  for (int i = 1; i <= d; ++i) gen[i][i - 1] = 1;
  for (int i = 0; i < d; ++i) gen[0][i] = -1;
  std::vector<std::vector<ZVec>> cones;
  for (int mask = 0; mask < (1 << (d + 1)); ++mask) {
    if (mask == (1 << (d + 1)) - 1) continue;  // proper subsets only
    std::vector<ZVec> rays;
    for (int i = 0; i <= d; ++i)
      if (mask & (1 << i)) rays.push_back(gen[i]);
    cones.push_back(rays);
  }
  return Fan::from_rays(d, cones);
}

}  // namespace toric
