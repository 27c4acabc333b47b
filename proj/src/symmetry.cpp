#include "toric/symmetry.hpp"

#include <algorithm>
#include <numeric>

#include "json.hpp"

namespace toric {

Compatibility is_compatible(const Fan& fan, const ZMat& phi) {
  fan.require_valid();
  if (det(phi) == 0) throw DomainError("singular lattice map is not admissible");
  int m = fan.num_cones();
  Compatibility out;
  out.perm.assign(m, 0);
  for (const Cone& c : fan.cones()) {
    auto k = fan.relint_image_cone(phi, c.id);
    if (!k) {
      out.offending_cone = c.id;
      return out;
    }
    for (const ZVec& r : c.extreme_rays) {
      if (!fan.contains(*k, mul(phi, r))) {
        out.offending_cone = c.id;
        return out;
      }
    }
    out.perm[c.id - 1] = *k;
  }
  std::vector<int> seen(m, 0);
  for (int v : out.perm) {
    if (seen[v - 1]++) {
      out.offending_cone = v;
      return out;
    }
  }
  out.ok = true;
  return out;
}

std::pair<ZZ, ZMat> decompose_primitive(const ZMat& phi) {
  if (det(phi) == 0) throw DomainError("singular lattice map is not admissible");
  ZZ n = content(phi);
  ZMat p0(phi.rows(), phi.cols());
  for (int i = 0; i < phi.rows(); ++i)
    for (int j = 0; j < phi.cols(); ++j) p0(i, j) = phi(i, j) / n;
  return {n, p0};
}

std::vector<int> SymmetryData::stabilizer(int cone_id) const {
  std::vector<int> out;
  for (int i = 0; i < order(); ++i)
    if (cone_perms[i][cone_id - 1] == cone_id) out.push_back(i);
  return out;
}

std::string SymmetryData::to_json_text() const {
  nlohmann::ordered_json j;
  j["order"] = order();
  j["is_unimodular"] = is_unimodular;
  j["splits"] = splits;
  j["fallback"] = fallback;
  j["elements"] = nlohmann::ordered_json::array();
  for (int i = 0; i < order(); ++i) {
    nlohmann::ordered_json e;
    auto mat = nlohmann::ordered_json::array();
    for (int r = 0; r < elements[i].rows(); ++r) {
      auto row = nlohmann::ordered_json::array();
      for (int c = 0; c < elements[i].cols(); ++c) row.push_back(elements[i](r, c).get_si());
      mat.push_back(row);
    }
    e["matrix"] = mat;
    e["det"] = dets[i].get_si();
    e["cone_perm"] = cone_perms[i];
    j["elements"].push_back(e);
  }
  return j.dump(2);
}

SymmetryData enumerate_G(const Fan& fan, int max_rays) {
  fan.require_valid();
  int d = fan.rank();
  SymmetryData out;
  std::vector<ZVec> rays = fan.ray_generators();
  int t = int(rays.size());

  ZMat all = rays.empty() ? ZMat(d, 0) : ZMat::from_columns(rays);
  if (rank_of(all) < d) {
    out.fallback = true;
    out.splits = false;
    out.is_unimodular = true;
    out.elements.push_back(ZMat::identity(d));
    out.dets.push_back(1);
    std::vector<int> id_perm(fan.num_cones());
    std::iota(id_perm.begin(), id_perm.end(), 1);
    out.cone_perms.push_back(id_perm);
    out.identity_index = 0;
    return out;
  }
  if (t > max_rays)
    throw LimitError("symmetry enumeration over " + std::to_string(t) + " rays exceeds the cap of " +
                     std::to_string(max_rays));

  // Spanning subset used to pin a candidate map from a ray bijection.
  std::vector<int> span_idx;
  {
    std::vector<ZVec> picked;
    for (int i = 0; i < t && int(picked.size()) < d; ++i) {
      picked.push_back(rays[i]);
      if (rank_of(ZMat::from_columns(picked)) < int(picked.size()))
        picked.pop_back();
      else
        span_idx.push_back(i);
    }
  }
  ZMat base(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) base(i, j) = rays[span_idx[j]][i];

  std::vector<std::pair<ZMat, std::vector<int>>> found;
  std::vector<int> tau(t);
  std::iota(tau.begin(), tau.end(), 0);
  do {
    ZMat target(d, d);
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < d; ++i) target(i, j) = rays[tau[span_idx[j]]][i];
    auto phi = solve_left_integer(base, target);
    if (!phi) continue;
    bool all_match = true;
    for (int i = 0; i < t && all_match; ++i)
      all_match = (mul(*phi, rays[i]) == rays[tau[i]]);
    if (!all_match) continue;
    if (content(*phi) != 1) continue;
    Compatibility comp = is_compatible(fan, *phi);
    if (!comp.ok) continue;
    found.emplace_back(*phi, comp.perm);
  } while (std::next_permutation(tau.begin(), tau.end()));

  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
    for (int i = 0; i < a.first.rows(); ++i)
      for (int j = 0; j < a.first.cols(); ++j) {
        int c = cmp(a.first(i, j), b.first(i, j));
        if (c) return c < 0;
      }
    return false;
  });

  ZMat id = ZMat::identity(d);
  for (size_t i = 0; i < found.size(); ++i) {
    out.elements.push_back(found[i].first);
    out.cone_perms.push_back(found[i].second);
    ZZ dt = det(found[i].first);
    out.dets.push_back(dt);
    if (dt != 1 && dt != -1) out.is_unimodular = false;
    if (found[i].first == id) out.identity_index = int(i);
  }
  if (out.identity_index < 0) throw DomainError("symmetry enumeration lost the identity map");
  // Distinct elements must induce distinct cone permutations.
  for (size_t i = 0; i < out.cone_perms.size(); ++i)
    for (size_t j = i + 1; j < out.cone_perms.size(); ++j)
      if (out.cone_perms[i] == out.cone_perms[j])
        throw DomainError("two primitive maps induce the same cone permutation");
  out.splits = out.is_unimodular;
  return out;
}

}  // namespace toric
