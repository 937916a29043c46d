#include "dcollapse/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dcollapse/errors.hpp"

namespace dcollapse {

namespace {

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError(std::string(what) + " must be positive and finite, got " +
                      std::to_string(value));
  }
}

}  // namespace

double wrap_phase(double alpha) {
  if (!std::isfinite(alpha)) throw DomainError("phase constant must be finite");
  double r = std::fmod(alpha, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a value just below a multiple of 2 pi can round up to 2 pi.
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double min_component(const Vec3& v) { return std::min({v[0], v[1], v[2]}); }

bool all_finite(const Vec3& v) {
  return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
}

GaussianPacket GaussianPacket::create(const Vec3& center, const Vec3& sigma,
                                      const Vec3& velocity, double mass, double alpha,
                                      double t0) {
  if (!all_finite(center)) throw DomainError("packet center must be finite");
  if (!all_finite(velocity)) throw DomainError("packet velocity must be finite");
  for (double s : sigma) require_positive(s, "packet width");
  require_positive(mass, "packet mass");
  if (!std::isfinite(t0)) throw DomainError("packet time must be finite");

  GaussianPacket p;
  p.center_ = center;
  p.sigma_ = sigma;
  p.waist_ = sigma;
  p.velocity_ = velocity;
  p.mass_ = mass;
  p.alpha_ = wrap_phase(alpha);
  p.t_ref_ = t0;
  p.time_ = t0;
  return p;
}

GaussianPacket GaussianPacket::with_alpha(double alpha) const {
  GaussianPacket p = *this;
  p.alpha_ = wrap_phase(alpha);
  return p;
}

void ObjectSpec::validate() const {
  require_positive(mass, "object mass");
  require_positive(internal_radius, "object internal radius");
  if (!(v0 >= 0.0) || !std::isfinite(v0)) throw DomainError("object v0 must be non-negative");
  if (n_clusters < 1) throw DomainError("object must have at least one cluster");
  if (cluster_alphas.size() != n_clusters) {
    throw DomainError("object has " + std::to_string(n_clusters) + " clusters but " +
                      std::to_string(cluster_alphas.size()) + " cluster phase constants");
  }
  for (double a : cluster_alphas) {
    if (!(a >= 0.0 && a < kTwoPi)) throw DomainError("cluster phase constant outside [0, 2pi)");
  }
}

double de_broglie_wavelength(double mass, double v0, const PhysicalConstants& constants) {
  require_positive(mass, "mass");
  require_positive(v0, "v0");
  return constants.h / (mass * v0);
}

double spreading_velocity(double diameter, double mass, const PhysicalConstants& constants) {
  require_positive(diameter, "diameter");
  require_positive(mass, "mass");
  return constants.hbar / (diameter * mass);
}

double spreading_velocity_via_lambda(double lambda, double v0, double diameter) {
  require_positive(lambda, "wavelength");
  require_positive(v0, "v0");
  require_positive(diameter, "diameter");
  return lambda * v0 / (kTwoPi * diameter);
}

GaussianPacket evolve_free(const GaussianPacket& packet, double t,
                           const PhysicalConstants& constants) {
  if (!std::isfinite(t)) throw DomainError("evolution time must be finite");
  if (t < packet.t_ref_) {
    throw DomainError("cannot evolve backwards: t = " + std::to_string(t) +
                      " < t_ref = " + std::to_string(packet.t_ref_));
  }
  GaussianPacket out = packet;
  const double dt_ref = t - packet.t_ref_;
  const double dt = t - packet.time_;
  for (std::size_t i = 0; i < 3; ++i) {
    const double s0 = packet.waist_[i];
    const double x = constants.hbar * dt_ref / (2.0 * packet.mass_ * s0 * s0);
    out.sigma_[i] = s0 * std::sqrt(1.0 + x * x);
    out.center_[i] = packet.center_[i] + packet.velocity_[i] * dt;
  }
  out.time_ = t;
  return out;
}

double spreading_parameter(const GaussianPacket& packet, double t,
                           const PhysicalConstants& constants) {
  if (t < packet.t_ref()) throw DomainError("spreading parameter requested before t_ref");
  const double dt = t - packet.t_ref();
  const double s0 = std::max({packet.waist()[0], packet.waist()[1], packet.waist()[2]});
  return constants.hbar * dt / (2.0 * packet.mass() * s0 * s0);
}

bool asymptotic_regime_check(const GaussianPacket& packet, double t,
                             const PhysicalConstants& constants) {
  return spreading_parameter(packet, t, constants) > kAsymptoticRegimeThreshold;
}

}  // namespace dcollapse
