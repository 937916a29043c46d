#include "dcollapse/collapse_contraction.hpp"

#include <algorithm>
#include <cmath>

#include "dcollapse/errors.hpp"

namespace dcollapse {

ProductGaussian product_gaussian(const GaussianPacket& p1, const GaussianPacket& p2) {
  ProductGaussian out{};
  for (std::size_t i = 0; i < 3; ++i) {
    const double s1 = p1.sigma()[i];
    const double s2 = p2.sigma()[i];
    const double c1 = p1.center()[i];
    const double c2 = p2.center()[i];
    const double v1 = s1 * s1;
    const double v2 = s2 * s2;
    const double w1 = v2 / (v1 + v2);  // weight of c1
    const double narrow = std::min(s1, s2);
    const double ratio = narrow / std::max(s1, s2);
    const double sigma = narrow / std::sqrt(1.0 + ratio * ratio);
    const double center = c1 * w1 + c2 * (1.0 - w1);
    out.sigma[i] = std::min({sigma, s1, s2});
    out.center[i] = std::clamp(center, std::min(c1, c2), std::max(c1, c2));
  }
  return out;
}

ContractionResult apply_collapse(const GaussianPacket& p1, const GaussianPacket& p2, double t,
                                 const CriterionOutcome& outcome) {
  if (!outcome.fires()) {
    throw ContractViolation("apply_collapse called for a pair whose criterion did not fire");
  }
  if (p1.time() != t || p2.time() != t) {
    throw ContractViolation("apply_collapse called with packets not evolved to the collapse time");
  }
  const ProductGaussian product = product_gaussian(p1, p2);
  auto contract = [&](const GaussianPacket& p) {
    return GaussianPacket::create(product.center, product.sigma, p.velocity(), p.mass(), p.alpha(),
                                  t);
  };
  return ContractionResult{contract(p1), contract(p2), product.center, product.sigma};
}

Vec3 damped_contraction(const Vec3& sigma_old, const Vec3& sigma_product, double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("damping exponent must lie in (0, 1]");
  Vec3 out{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(sigma_product[i] > 0.0) || sigma_product[i] > sigma_old[i]) {
      throw DomainError("contracted width must lie in (0, sigma_old]");
    }
    const double damped =
        eta == 1.0 ? sigma_product[i] : sigma_old[i] * std::pow(sigma_product[i] / sigma_old[i], eta);
    out[i] = std::clamp(damped, sigma_product[i], sigma_old[i]);
  }
  return out;
}

}  // namespace dcollapse
