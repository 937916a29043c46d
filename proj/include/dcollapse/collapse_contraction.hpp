#pragma once

#include "dcollapse/core_model.hpp"
#include "dcollapse/overlap_criterion.hpp"

namespace dcollapse {

/// Mean and standard deviation of the Gaussian |psi1||psi2| (up to norm).
struct ProductGaussian {
  Vec3 center;
  Vec3 sigma;
};

/// Per axis: sigma_p^2 = s1^2 s2^2 / (s1^2 + s2^2),
///           c_p = (c1 s2^2 + c2 s1^2) / (s1^2 + s2^2).
/// Results are clamped so sigma_p <= min(s1, s2) and c_p lies between the
/// input centers even under rounding.
ProductGaussian product_gaussian(const GaussianPacket& p1, const GaussianPacket& p2);

struct ContractionResult {
  GaussianPacket contracted_1;
  GaussianPacket contracted_2;
  Vec3 overlap_center;
  Vec3 overlap_sigma;
};

/// Contracts both packets onto the overlap Gaussian at time t. Each output
/// keeps its own mass, velocity, and phase constant and gets t_ref = t.
/// `outcome` must be the fired criterion for this pair, and both packets must
/// be at time t; otherwise ContractViolation.
ContractionResult apply_collapse(const GaussianPacket& p1, const GaussianPacket& p2, double t,
                                 const CriterionOutcome& outcome);

/// Width after a damped contraction: sigma_old (sigma_p / sigma_old)^eta per
/// axis. eta = 1 gives the full contraction.
Vec3 damped_contraction(const Vec3& sigma_old, const Vec3& sigma_product, double eta);

}  // namespace dcollapse
