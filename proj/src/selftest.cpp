#include "dcollapse/selftest.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "dcollapse/core_model.hpp"
#include "dcollapse/environment.hpp"
#include "dcollapse/overlap_criterion.hpp"

namespace dcollapse {

namespace {

double log_uniform(RngState& rng, double lo, double hi) {
  return lo * std::pow(hi / lo, rng.next_uniform());
}

GaussianPacket random_packet(RngState& rng) {
  Vec3 sigma{};
  Vec3 center{};
  for (std::size_t i = 0; i < 3; ++i) {
    sigma[i] = log_uniform(rng, 1e-10, 1e-6);
    center[i] = 2e-6 * rng.next_normal();
  }
  return GaussianPacket::create(center, sigma, Vec3{}, 1e-20, kTwoPi * rng.next_uniform());
}

void report(std::ostream& out, bool ok, const std::string& name, const std::string& detail) {
  out << (ok ? "PASS " : "FAIL ") << name << "  " << detail << '\n';
}

}  // namespace

bool run_selftest(std::ostream& out) {
  bool all = true;

  {
    RngState rng(20190731);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const GaussianPacket a = random_packet(rng);
      GaussianPacket b = random_packet(rng);
      // Keep roughly half the pairs overlapping appreciably.
      if (k % 2 == 0) {
        b = GaussianPacket::create(a.center(), b.sigma(), Vec3{}, 1e-20, b.alpha());
      }
      worst = std::max(worst, std::abs(overlap_integral(a, b) - overlap_integral_quadrature(a, b)));
    }
    const bool ok = worst <= 1e-8;
    all = all && ok;
    report(out, ok, "overlap_analytic_vs_quadrature", "max |diff| = " + std::to_string(worst));
  }

  {
    RngState rng(7);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const GaussianPacket p = random_packet(rng);
      worst = std::max(worst, std::abs(overlap_integral_quadrature(p, p) - 1.0));
    }
    const bool ok = worst <= 1e-8;
    all = all && ok;
    report(out, ok, "normalization_quadrature", "max |norm - 1| = " + std::to_string(worst));
  }

  {
    RngState rng(11);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
      const double m = log_uniform(rng, 1e-30, 1.0);
      const double v0 = log_uniform(rng, 1e-3, 1e4);
      const double d = log_uniform(rng, 1e-12, 1e-2);
      const double direct = spreading_velocity(d, m);
      const double via = spreading_velocity_via_lambda(de_broglie_wavelength(m, v0), v0, d);
      worst = std::max(worst, std::abs(direct - via) / direct);
    }
    const bool ok = worst <= 1e-12;
    all = all && ok;
    report(out, ok, "spreading_velocity_two_routes", "max rel diff = " + std::to_string(worst));
  }

  {
    RngState rng(3);
    const std::uint64_t n = 1'000'000;
    std::uint64_t fired = 0;
    for (std::uint64_t k = 0; k < n; ++k) {
      const double a1 = wrap_phase(kTwoPi * rng.next_uniform());
      const double a2 = wrap_phase(kTwoPi * rng.next_uniform());
      if (phase_criterion(a1, a2).ok && amplitude_criterion(1.0, a1, a2).ok) ++fired;
    }
    const double p = kCodata2018.alpha_s / kTwoPi;
    const double sd = std::sqrt(static_cast<double>(n) * p * (1.0 - p));
    const double z = (static_cast<double>(fired) - static_cast<double>(n) * p) / sd;
    const bool ok = std::abs(z) <= 4.0;
    all = all && ok;
    report(out, ok, "phase_acceptance_statistics",
           "fraction = " + std::to_string(static_cast<double>(fired) / static_cast<double>(n)) +
               ", expected " + std::to_string(p) + ", z = " + std::to_string(z));
  }

  return all;
}

}  // namespace dcollapse
