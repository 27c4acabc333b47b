#include "toric/group_algebra.hpp"

#include <functional>
#include <numeric>

#include <random>

#include "json.hpp"

namespace toric {

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p = 2; p * p <= n; ++p)
    if (n % p == 0) return false;
  return true;
}

GroupAlgebraElement::GroupAlgebraElement(std::int64_t n, int rho) : n_(n), rho_(rho) {
  if (n < 1 || rho < 0) throw DomainError("group algebra needs n >= 1, rho >= 0");
}

GroupAlgebraElement GroupAlgebraElement::basis(std::int64_t n, int rho, IVec idx) {
  GroupAlgebraElement e(n, rho);
  e.add_term(std::move(idx), 1);
  return e;
}

void GroupAlgebraElement::add_term(IVec idx, const ZZ& coeff) {
  if (int(idx.size()) != rho_) throw DomainError("index length mismatch");
  for (auto& v : idx) {
    v %= n_;
    if (v < 0) v += n_;
  }
  ZZ& c = terms_[idx];
  c += coeff;
  if (c == 0) terms_.erase(idx);
}

void GroupAlgebraElement::check_same(const GroupAlgebraElement& o) const {
  if (n_ != o.n_ || rho_ != o.rho_) throw DomainError("group mismatch");
}

GroupAlgebraElement GroupAlgebraElement::operator+(const GroupAlgebraElement& o) const {
  check_same(o);
  GroupAlgebraElement r = *this;
  for (const auto& [i, c] : o.terms_) r.add_term(i, c);
  return r;
}

GroupAlgebraElement GroupAlgebraElement::operator-(const GroupAlgebraElement& o) const {
  check_same(o);
  GroupAlgebraElement r = *this;
  for (const auto& [i, c] : o.terms_) r.add_term(i, -c);
  return r;
}

GroupAlgebraElement GroupAlgebraElement::operator*(const GroupAlgebraElement& o) const {
  check_same(o);
  GroupAlgebraElement r(n_, rho_);
  for (const auto& [i, ci] : terms_)
    for (const auto& [j, cj] : o.terms_) {
      IVec k(rho_);
      for (int t = 0; t < rho_; ++t) k[t] = (i[t] + j[t]) % n_;
      r.add_term(std::move(k), ci * cj);
    }
  return r;
}

GroupAlgebraElement GroupAlgebraElement::pow(unsigned e) const {
  GroupAlgebraElement acc = basis(n_, rho_, IVec(rho_, 0));
  GroupAlgebraElement b = *this;
  while (e) {
    if (e & 1) acc = acc * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return acc;
}

bool GroupAlgebraElement::operator==(const GroupAlgebraElement& o) const {
  return n_ == o.n_ && rho_ == o.rho_ && terms_ == o.terms_;
}

GroupAlgebraElement GroupAlgebraElement::from_json_text(const std::string& text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("bad element JSON: ") + e.what());
  }
  GroupAlgebraElement out(j.at("n").get<std::int64_t>(), j.at("rho").get<int>());
  for (const auto& t : j.at("terms")) {
    IVec idx;
    for (const auto& v : t.at(0)) idx.push_back(v.get<std::int64_t>());
    ZZ c;
    if (t.at(1).is_string())
      c = ZZ(t.at(1).get<std::string>());
    else
      c = ZZ(t.at(1).get<long>());
    out.add_term(std::move(idx), c);
  }
  return out;
}

std::string GroupAlgebraElement::to_json_text() const {
  nlohmann::ordered_json j;
  j["n"] = n_;
  j["rho"] = rho_;
  auto terms = nlohmann::ordered_json::array();
  for (const auto& [i, c] : terms_) {
    nlohmann::ordered_json t = nlohmann::ordered_json::array();
    t.push_back(i);
    if (c.fits_slong_p())
      t.push_back(c.get_si());
    else
      t.push_back(c.get_str());
    terms.push_back(t);
  }
  j["terms"] = terms;
  return j.dump();
}

GroupAlgebraElement frobenius_endo(std::int64_t p, const GroupAlgebraElement& a) {
  GroupAlgebraElement r(a.modulus(), a.rank());
  for (const auto& [i, c] : a.terms()) {
    IVec k(i.size());
    for (size_t t = 0; t < i.size(); ++t) k[t] = (i[t] * (p % a.modulus())) % a.modulus();
    r.add_term(std::move(k), c);
  }
  return r;
}

LiftCheck check_frobenius_lift(std::int64_t p, const GroupAlgebraElement& a) {
  if (!is_prime_u64(std::uint64_t(p))) throw DomainError("Frobenius lift check needs a prime");
  GroupAlgebraElement diff = a.pow(unsigned(p)) - frobenius_endo(p, a);
  LiftCheck out;
  for (const auto& [i, c] : diff.terms()) {
    if (c % p != 0) {
      out.ok = false;
      out.witness_index = i;
      out.witness_coeff = c;
      return out;
    }
  }
  return out;
}

LevelCounts cyclotomic_level_count(const Fan& fan, std::int64_t n) {
  fan.require_valid();
  if (n < 1) throw DomainError("level must be >= 1");
  LevelCounts out;
  out.additive = 0;
  out.multiplicative = 1;
  for (const auto& o : fan.orbits()) {
    ZZ cnt;
    mpz_ui_pow_ui(cnt.get_mpz_t(), unsigned(n), unsigned(o.quotient_rank));
    out.additive += cnt;
    out.multiplicative *= cnt;
  }
  return out;
}

namespace {

void each_level_vec(int dim, std::int64_t level, const std::function<void(const IVec&)>& fn) {
  IVec x(dim, 0);
  if (dim == 0) {
    fn(x);
    return;
  }
  while (true) {
    fn(x);
    int i = dim - 1;
    while (i >= 0 && x[i] == level - 1) {
      x[i] = 0;
      --i;
    }
    if (i < 0) break;
    ++x[i];
  }
}

double ipow(double b, int e) {
  double r = 1;
  while (e-- > 0) r *= b;
  return r;
}

}  // namespace

TransitionCheck transition_map_check(const Fan& fan, std::int64_t n, std::int64_t t,
                                     const SymmetryData* sym, std::int64_t enumeration_cap) {
  fan.require_valid();
  if (n < 1 || t < 1) throw DomainError("levels must be >= 1");
  std::int64_t big = n * t;
  TransitionCheck out;

  for (const auto& o : fan.orbits()) {
    int dk = o.quotient_rank;
    if (ipow(double(big), dk) > double(enumeration_cap))
      throw LimitError("level set too large to enumerate");

    // Label actions to test equivariance against: the doubling map, plus
    // the quotient actions of the symmetry group when provided.
    std::vector<Mat64> actions;
    {
      Mat64 two(dk, dk);
      for (int i = 0; i < dk; ++i) two.at(i, i) = 2;
      actions.push_back(two);
    }
    if (sym)
      for (int e = 0; e < sym->order(); ++e) {
        if (sym->perm_of(e, o.cone_id) != o.cone_id) continue;
        ZMat a = induced_quotient_map(o, o, sym->elements[e]);
        actions.push_back(Mat64::from_zmat(a.transposed()));
      }

    std::vector<char> image(std::size_t(ipow(double(n), dk)), 0);
    auto index_mod_n = [&](const IVec& x) {
      std::size_t idx = 0;
      for (auto v : x) idx = idx * std::size_t(n) + std::size_t(((v % n) + n) % n);
      return idx;
    };
    // Transition: x mod big |-> (t*x)/big = x/n on the torsion side,
    // i.e. reduction of the label vector mod n.
    each_level_vec(dk, big, [&](const IVec& x) {
      ++out.points_checked;
      image[index_mod_n(x)] = 1;
      for (const Mat64& a : actions) {
        IVec moved = a.apply(x);
        IVec lhs(x.size()), rhs = a.apply(x);  // reduce-then-act vs act-then-reduce
        for (size_t i = 0; i < x.size(); ++i) lhs[i] = ((moved[i] % n) + n) % n;
        IVec xr(x.size());
        for (size_t i = 0; i < x.size(); ++i) xr[i] = ((x[i] % n) + n) % n;
        rhs = a.apply(xr);
        for (size_t i = 0; i < x.size(); ++i) rhs[i] = ((rhs[i] % n) + n) % n;
        if (lhs != rhs) out.equivariant = false;
      }
    });
    for (char c : image)
      if (!c) out.surjective = false;
  }
  return out;
}

FrobeniusSuite frobenius_suite(std::int64_t n_max, int rho_max, const std::vector<std::int64_t>& primes,
                               int random_trials, std::uint64_t seed) {
  FrobeniusSuite out;
  const std::int64_t coeffs[] = {-2, -1, 1, 2};
  auto fail = [&](std::int64_t p, const GroupAlgebraElement& a) {
    out.ok = false;
    out.witness = "{\"p\":" + std::to_string(p) + ",\"element\":" + a.to_json_text() + "}";
  };

  for (std::int64_t n = 2; n <= n_max && out.ok; ++n) {
    for (int rho = 1; rho <= rho_max && out.ok; ++rho) {
      std::vector<IVec> indices;
      each_level_vec(rho, n, [&](const IVec& x) { indices.push_back(x); });
      for (std::int64_t p : primes) {
        for (size_t i = 0; i < indices.size() && out.ok; ++i) {
          for (std::int64_t c1 : coeffs) {
            GroupAlgebraElement a(n, rho);
            a.add_term(indices[i], c1);
            ++out.exhaustive_checked;
            if (!check_frobenius_lift(p, a).ok) {
              fail(p, a);
              break;
            }
            for (size_t j = i + 1; j < indices.size() && out.ok; ++j)
              for (std::int64_t c2 : coeffs) {
                GroupAlgebraElement b = a;
                b.add_term(indices[j], c2);
                ++out.exhaustive_checked;
                if (!check_frobenius_lift(p, b).ok) {
                  fail(p, b);
                  break;
                }
              }
          }
        }
      }
    }
  }

  std::mt19937_64 rng(seed);
  const std::int64_t random_primes[] = {2, 3, 5};
  while (out.random_checked < random_trials && out.ok) {
    std::int64_t n = 2 + std::int64_t(rng() % 11);  // up to 12
    int rho = 1 + int(rng() % 2);
    GroupAlgebraElement a(n, rho);
    int support = 1 + int(rng() % 6);
    for (int s = 0; s < support; ++s) {
      IVec idx(rho);
      for (int i = 0; i < rho; ++i) idx[i] = std::int64_t(rng() % n);
      std::int64_t c = std::int64_t(rng() % 11) - 5;
      if (c == 0) c = 1;
      a.add_term(std::move(idx), c);
    }
    if (a.support_size() == 0) continue;  // coefficients may cancel
    std::int64_t p = random_primes[rng() % 3];
    ++out.random_checked;
    if (!check_frobenius_lift(p, a).ok) fail(p, a);
  }
  return out;
}

bool projective_level_model_check(int d, std::int64_t n, std::int64_t t, std::int64_t enumeration_cap) {
  if (d < 1 || n < 1 || t < 1) throw DomainError("bad parameters");
  std::int64_t big = n * t;
  if (ipow(double(big), d + 1) > double(enumeration_cap)) throw LimitError("level set too large to enumerate");

  // Class representative of (a_0..a_d) mod the diagonal: subtract a_0.
  auto iso = [&](const IVec& a, std::int64_t level) {
    IVec x(d);
    for (int i = 0; i < d; ++i) x[i] = ((a[i + 1] - a[0]) % level + level) % level;
    return x;
  };
  bool ok = true;
  each_level_vec(d + 1, big, [&](const IVec& a) {
    // Down the coordinate model: labels reduce mod n (the t-th power map
    // on the root-of-unity coordinates), then pass to the class.
    IVec a_red(d + 1);
    for (int i = 0; i <= d; ++i) a_red[i] = ((a[i] % n) + n) % n;
    IVec lhs = iso(a_red, n);
    // Down the lattice model: apply iso at level big, then reduce mod n.
    IVec x = iso(a, big);
    IVec rhs(d);
    for (int i = 0; i < d; ++i) rhs[i] = ((x[i] % n) + n) % n;
    if (lhs != rhs) ok = false;
  });
  // Surjectivity of the class map onto level-n classes.
  std::vector<char> seen(std::size_t(ipow(double(n), d)), 0);
  each_level_vec(d + 1, big, [&](const IVec& a) {
    IVec x = iso(a, big);
    std::size_t idx = 0;
    for (auto v : x) idx = idx * std::size_t(n) + std::size_t(((v % n) + n) % n);
    seen[idx] = 1;
  });
  for (char c : seen)
    if (!c) ok = false;
  return ok;
}

}  // namespace toric
