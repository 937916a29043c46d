#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "dcollapse/core_model.hpp"

namespace dcollapse {

/// Counter-based generator: the value at a position is SplitMix64's output
/// for state seed + (position + 1) * golden gamma. Equal (seed, position)
/// means equal next value.
class RngState {
 public:
  constexpr explicit RngState(std::uint64_t seed = 0, std::uint64_t position = 0) noexcept
      : seed_(seed), position_(position) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t position() const noexcept { return position_; }

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1), 53 random bits.
  double next_uniform() noexcept;
  /// Uniform on (0, 1].
  double next_uniform_open_zero() noexcept;
  double next_exponential(double rate) noexcept;
  /// Standard normal by Box-Muller; always consumes two positions.
  double next_normal() noexcept;

  void skip(std::uint64_t n) noexcept { position_ += n; }

  bool operator==(const RngState&) const = default;

 private:
  std::uint64_t seed_;
  std::uint64_t position_;
};

std::pair<double, RngState> draw_phase(RngState rng);

struct EnvironmentSpec {
  double collision_rate = 0.0;  // 1/s
  Vec3 env_sigma{};             // m
  double env_sigma_jitter = 0.0;
  double impact_spread = 0.0;  // m, per-axis std of the collision point offset
  double particle_mass = 4.65e-26;  // kg; env packets are never propagated
  /// When set, environment packets take the object's current widths and the
  /// template is ignored.
  bool match_object_width = false;

  void validate() const;

  bool operator==(const EnvironmentSpec&) const = default;
};

struct CollisionEvent {
  double time;
  GaussianPacket env_packet;
  std::uint64_t sequence_index;
};

/// Positions consumed by one next_collision draw, whatever the environment settings.
inline constexpr std::uint64_t kDrawsPerCollision = 11;

/// Draws the next encounter of a homogeneous Poisson stream. The environment
/// packet is centered on the object's center at the event time plus a
/// Gaussian offset. Returns nullopt (and the unchanged rng) when the rate is
/// zero.
std::pair<std::optional<CollisionEvent>, RngState> next_collision(
    RngState rng, const EnvironmentSpec& spec, double t_now, const GaussianPacket& object,
    std::uint64_t sequence_index, const PhysicalConstants& constants = kCodata2018);

}  // namespace dcollapse
