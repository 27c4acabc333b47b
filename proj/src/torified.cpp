#include <cmath>

#include "toric/qsm.hpp"

namespace toric {

PartitionResult torified_partition(const std::vector<TorifiedComponent>& comps, double c, double beta,
                                   std::int64_t radius, PartitionMode mode, IndexMonoid monoid,
                                   int threads) {
  if (!(c > 0)) throw DomainError("scaling exponent c must be positive");
  if (radius < 1) throw DomainError("radius must be >= 1");
  if (mode == PartitionMode::Factored)
    throw DomainError("torified systems support additive or multiplicative mode");

  PartitionResult res;
  res.beta = beta;
  res.mode = mode;
  res.radius = radius;
  res.m = int(comps.size());

  double sum = 0, sum_tail = 0, prod = 1, prod_hi = 1;
  for (const auto& comp : comps) {
    if (comp.dim == 0) continue;  // a point: empty spectrum
    ++res.m_prime;
    if (comp.gram.num.rows() != comp.dim) throw DomainError("Gram size mismatch in torified component");
    if (!comp.gram.positive_definite()) throw DomainError("torified Gram is not positive definite");
    auto term = [&](const IVec& xi) { return std::pow(comp.gram.eval(xi), -c * beta / 2.0); };
    auto shells = shell_sums(comp.dim, radius, monoid, term, threads);
    double v = 0;
    for (double s : shells) v += s;
    double kappa = std::pow(gram_lambda_floor(comp.gram), c / 2.0);
    double t = spectral_tail_bound(comp.dim, c, beta, kappa, radius, monoid);
    sum += v;
    sum_tail += t;
    prod *= v;
    prod_hi *= v + t;
  }
  if (mode == PartitionMode::Additive) {
    res.value = sum;
    res.tail_bound = sum_tail;
  } else {
    res.value = prod;
    res.tail_bound = prod_hi - prod;
  }
  return res;
}

}  // namespace toric
