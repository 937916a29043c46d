#pragma once

#include <cstddef>
#include <utility>

#include "dcollapse/core_model.hpp"

namespace dcollapse {

struct CriterionOutcome {
  bool phase_ok = false;
  bool amplitude_ok = false;
  double overlap = 0.0;         // integral of |psi1||psi2|, unsquared
  double alpha_min = 0.0;       // rad
  double phase_distance = 0.0;  // rad, circular, in [0, pi]

  bool fires() const noexcept { return phase_ok && amplitude_ok; }

  bool operator==(const CriterionOutcome&) const = default;
};

/// Closed-form integral of |psi1| |psi2| over R^3 (not squared).
double overlap_integral(const GaussianPacket& p1, const GaussianPacket& p2);

struct QuadratureOptions {
  double axis_tolerance = 1e-13;  // absolute error target per axis
  std::size_t max_intervals = 20000;
};

/// Adaptive Gauss-Kronrod evaluation of the same integral, one axis at a time
/// over [min center - 10 sigma_max, max center + 10 sigma_max]. Serves as an
/// independent check of overlap_integral. Throws NumericalError if an axis
/// does not reach the tolerance within the interval cap.
double overlap_integral_quadrature(const GaussianPacket& p1, const GaussianPacket& p2,
                                   const QuadratureOptions& options = {});

struct PhaseCheck {
  bool ok;
  double distance;
};

struct AmplitudeCheck {
  bool ok;
  double alpha_min;
};

/// |alpha1 - alpha2| <= alpha_s / 2 with the distance taken on the circle.
PhaseCheck phase_criterion(double alpha1, double alpha2,
                           const PhysicalConstants& constants = kCodata2018);

/// overlap^2 >= min(alpha1, alpha2) / (2 pi)
AmplitudeCheck amplitude_criterion(double overlap, double alpha1, double alpha2);

/// Both clauses for two packets at the same instant. Throws ContractViolation
/// if the packets are not time-aligned.
CriterionOutcome evaluate_criterion(const GaussianPacket& p1, const GaussianPacket& p2,
                                    const PhysicalConstants& constants = kCodata2018);

}  // namespace dcollapse
