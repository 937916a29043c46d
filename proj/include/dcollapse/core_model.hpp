#pragma once

#include <array>
#include <cstddef>
#include <numbers>
#include <vector>

namespace dcollapse {

using Vec3 = std::array<double, 3>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct PhysicalConstants {
  double hbar;     // J s
  double h;        // J s
  double alpha_s;  // fine-structure constant

  /// CODATA 2018. h is exact in the SI; hbar is derived from it so that
  /// h == 2 pi hbar holds to rounding.
  static constexpr PhysicalConstants codata2018() {
    constexpr double h = 6.62607015e-34;
    return PhysicalConstants{h / kTwoPi, h, 7.2973525693e-3};
  }
};

inline constexpr PhysicalConstants kCodata2018 = PhysicalConstants::codata2018();

/// Reduces an angle to its representative in [0, 2 pi).
double wrap_phase(double alpha);

double min_component(const Vec3& v);
bool all_finite(const Vec3& v);

/// Parametric center-of-mass wavepacket with axis-separable Gaussian modulus
///
///   |psi(r)| = prod_axis (2 pi sigma^2)^(-1/4) exp(-(r - c)^2 / (4 sigma^2)),
///
/// so sigma is the per-axis standard deviation of |psi|^2. A packet is a
/// snapshot at time `time()`; its free evolution is fixed by the waist (the
/// width at `t_ref()`, the time of the last contraction or creation).
class GaussianPacket {
 public:
  /// Packet whose waist is at `t0`. Throws DomainError for non-positive or
  /// non-finite widths, non-positive mass, or non-finite inputs. The phase
  /// is stored reduced modulo 2 pi.
  static GaussianPacket create(const Vec3& center, const Vec3& sigma, const Vec3& velocity,
                               double mass, double alpha, double t0 = 0.0);

  const Vec3& center() const noexcept { return center_; }
  const Vec3& sigma() const noexcept { return sigma_; }
  const Vec3& waist() const noexcept { return waist_; }
  const Vec3& velocity() const noexcept { return velocity_; }
  double mass() const noexcept { return mass_; }
  double alpha() const noexcept { return alpha_; }
  double t_ref() const noexcept { return t_ref_; }
  double time() const noexcept { return time_; }

  double min_sigma() const noexcept { return min_component(sigma_); }

  GaussianPacket with_alpha(double alpha) const;

  bool operator==(const GaussianPacket&) const = default;

 private:
  friend GaussianPacket evolve_free(const GaussianPacket&, double, const PhysicalConstants&);

  GaussianPacket() = default;

  Vec3 center_{};
  Vec3 sigma_{};
  Vec3 waist_{};
  Vec3 velocity_{};
  double mass_ = 0.0;
  double alpha_ = 0.0;
  double t_ref_ = 0.0;
  double time_ = 0.0;
};

struct ObjectSpec {
  double mass = 0.0;             // kg
  double internal_radius = 0.0;  // m, half-width of the internal function's support
  double v0 = 0.0;               // m/s
  std::size_t n_clusters = 1;
  std::vector<double> cluster_alphas;  // rad, one per cluster

  /// Throws DomainError naming the first broken invariant.
  void validate() const;

  bool operator==(const ObjectSpec&) const = default;
};

/// lambda = h / (m v0)
double de_broglie_wavelength(double mass, double v0,
                             const PhysicalConstants& constants = kCodata2018);

/// v_S = hbar / (d m0), with d the minimum diameter at the start of spreading.
double spreading_velocity(double diameter, double mass,
                          const PhysicalConstants& constants = kCodata2018);

/// v_S = lambda v0 / (2 pi d)
double spreading_velocity_via_lambda(double lambda, double v0, double diameter);

/// Exact free evolution to time t >= t_ref. Widths follow
/// sigma(t) = sigma0 sqrt(1 + (hbar dt / (2 m sigma0^2))^2), dt = t - t_ref;
/// the center drifts with the packet velocity.
GaussianPacket evolve_free(const GaussianPacket& packet, double t,
                           const PhysicalConstants& constants = kCodata2018);

/// Smallest per-axis value of hbar dt / (2 m sigma0^2).
double spreading_parameter(const GaussianPacket& packet, double t,
                           const PhysicalConstants& constants = kCodata2018);

inline constexpr double kAsymptoticRegimeThreshold = 10.0;

/// True when the linear spreading law is a valid approximation at time t,
/// i.e. spreading_parameter exceeds kAsymptoticRegimeThreshold on every axis.
bool asymptotic_regime_check(const GaussianPacket& packet, double t,
                             const PhysicalConstants& constants = kCodata2018);

}  // namespace dcollapse
