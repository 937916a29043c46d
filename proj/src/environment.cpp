#include "dcollapse/environment.hpp"

#include <cmath>
#include <numbers>

#include "dcollapse/errors.hpp"

namespace dcollapse {

namespace {

constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr double kInv53 = 1.0 / 9007199254740992.0;  // 2^-53

}  // namespace

std::uint64_t RngState::next_u64() noexcept {
  ++position_;
  return splitmix64(seed_ + position_ * kGoldenGamma);
}

double RngState::next_uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * kInv53;
}

double RngState::next_uniform_open_zero() noexcept {
  return static_cast<double>((next_u64() >> 11) + 1) * kInv53;
}

double RngState::next_exponential(double rate) noexcept {
  return -std::log(next_uniform_open_zero()) / rate;
}

double RngState::next_normal() noexcept {
  const double u1 = next_uniform_open_zero();
  const double u2 = next_uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::pair<double, RngState> draw_phase(RngState rng) {
  const double alpha = wrap_phase(kTwoPi * rng.next_uniform());
  return {alpha, rng};
}

void EnvironmentSpec::validate() const {
  if (!(collision_rate >= 0.0) || !std::isfinite(collision_rate)) {
    throw DomainError("collision rate must be non-negative and finite");
  }
  for (double s : env_sigma) {
    if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("environment width must be positive");
  }
  if (!(env_sigma_jitter >= 0.0 && env_sigma_jitter < 1.0)) {
    throw DomainError("environment width jitter must lie in [0, 1)");
  }
  if (!(impact_spread >= 0.0) || !std::isfinite(impact_spread)) {
    throw DomainError("impact spread must be non-negative");
  }
  if (!(particle_mass > 0.0) || !std::isfinite(particle_mass)) {
    throw DomainError("environment particle mass must be positive");
  }
}

std::pair<std::optional<CollisionEvent>, RngState> next_collision(
    RngState rng, const EnvironmentSpec& spec, double t_now, const GaussianPacket& object,
    std::uint64_t sequence_index, const PhysicalConstants& constants) {
  if (spec.collision_rate == 0.0) return {std::nullopt, rng};
  if (!(spec.collision_rate > 0.0)) throw DomainError("collision rate must be non-negative");

  // Fixed layout of positions: 1 exponential, 3 normals (2 each), 3 jitters, 1 phase.
  const RngState start = rng;
  const double time = t_now + rng.next_exponential(spec.collision_rate);
  const GaussianPacket at_event = evolve_free(object, time, constants);

  Vec3 center = at_event.center();
  for (double& c : center) {
    if (spec.impact_spread > 0.0) {
      c += spec.impact_spread * rng.next_normal();
    } else {
      rng.skip(2);
    }
  }
  Vec3 sigma = spec.match_object_width ? at_event.sigma() : spec.env_sigma;
  for (double& s : sigma) {
    const double u = rng.next_uniform();
    if (!spec.match_object_width && spec.env_sigma_jitter > 0.0) {
      s *= 1.0 + spec.env_sigma_jitter * (2.0 * u - 1.0);
    }
  }
  const auto [alpha, after] = draw_phase(rng);
  rng = after;
  if (rng.position() - start.position() != kDrawsPerCollision) {
    throw ContractViolation("collision draw consumed an unexpected number of positions");
  }

  CollisionEvent event{
      time, GaussianPacket::create(center, sigma, Vec3{}, spec.particle_mass, alpha, time),
      sequence_index};
  return {event, rng};
}

}  // namespace dcollapse
