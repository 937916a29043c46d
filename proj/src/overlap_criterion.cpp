#include "dcollapse/overlap_criterion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "dcollapse/errors.hpp"

namespace dcollapse {

double overlap_integral(const GaussianPacket& p1, const GaussianPacket& p2) {
  double result = 1.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double s1 = p1.sigma()[i];
    const double s2 = p2.sigma()[i];
    const double sum_sq = s1 * s1 + s2 * s2;
    const double d = p1.center()[i] - p2.center()[i];
    // 2 s1 s2 / (s1^2 + s2^2) written to survive widths near the underflow end.
    const double r = std::min(s1, s2) / std::max(s1, s2);
    const double width_factor = std::sqrt(2.0 * r / (1.0 + r * r));
    result *= width_factor * std::exp(-d * d / (4.0 * sum_sq));
  }
  return std::min(result, 1.0);
}

namespace {

// 15-point Kronrod rule with its embedded 7-point Gauss rule (QUADPACK qk15).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment kronrod15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double pair = f(c - dx) + f(c + dx);
    kronrod += kWgk[j] * pair;
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  return Segment{a, b, kronrod * h, std::abs((kronrod - gauss) * h)};
}

// One axis, in units of the larger width: centers 0 and `offset`, widths w1, w2 <= 1.
double axis_overlap_quadrature(double offset, double w1, double w2,
                               const QuadratureOptions& options, std::size_t axis) {
  const double amplitude = 1.0 / std::sqrt(2.0 * std::numbers::pi * w1 * w2);
  auto integrand = [&](double u) {
    const double a = u / w1;
    const double b = (u - offset) / w2;
    return amplitude * std::exp(-0.25 * (a * a + b * b));
  };

  const double lo = std::min(0.0, offset) - 10.0;
  const double hi = std::max(0.0, offset) + 10.0;
  std::vector<double> cuts = {lo, hi};
  for (const auto& [center, width] : {std::pair{0.0, w1}, std::pair{offset, w2}}) {
    for (double k : {0.0, 1.0, 2.0, 4.0, 8.0}) {
      for (double sign : {-1.0, 1.0}) {
        const double x = center + sign * k * width;
        if (x > lo && x < hi) cuts.push_back(x);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Segment> work;
  double total = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Segment s = kronrod15(integrand, cuts[i], cuts[i + 1]);
    total += s.value;
    error += s.error;
    work.push(s);
  }
  while (error > options.axis_tolerance) {
    if (work.size() >= options.max_intervals) {
      std::ostringstream msg;
      msg << "overlap quadrature did not converge on axis " << axis << ": error estimate "
          << error << " > " << options.axis_tolerance << " after " << work.size()
          << " intervals (offset " << offset << ", widths " << w1 << ", " << w2 << ")";
      throw NumericalError(msg.str());
    }
    const Segment worst = work.top();
    work.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Segment left = kronrod15(integrand, worst.a, mid);
    const Segment right = kronrod15(integrand, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    work.push(left);
    work.push(right);
  }
  return total;
}

}  // namespace

double overlap_integral_quadrature(const GaussianPacket& p1, const GaussianPacket& p2,
                                   const QuadratureOptions& options) {
  double result = 1.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double scale = std::max(p1.sigma()[i], p2.sigma()[i]);
    const double offset = (p2.center()[i] - p1.center()[i]) / scale;
    result *= axis_overlap_quadrature(offset, p1.sigma()[i] / scale, p2.sigma()[i] / scale,
                                      options, i);
  }
  return result;
}

namespace {

void require_phase(double alpha, const char* name) {
  if (!(alpha >= 0.0 && alpha < kTwoPi)) {
    throw DomainError(std::string(name) + " = " + std::to_string(alpha) +
                      " is outside [0, 2pi)");
  }
}

}  // namespace

PhaseCheck phase_criterion(double alpha1, double alpha2, const PhysicalConstants& constants) {
  require_phase(alpha1, "alpha1");
  require_phase(alpha2, "alpha2");
  const double d = std::abs(alpha1 - alpha2);
  const double distance = std::min(d, kTwoPi - d);
  return PhaseCheck{distance <= 0.5 * constants.alpha_s, distance};
}

AmplitudeCheck amplitude_criterion(double overlap, double alpha1, double alpha2) {
  if (!(overlap >= 0.0 && overlap <= 1.0)) {
    throw DomainError("overlap " + std::to_string(overlap) + " is outside [0, 1]");
  }
  require_phase(alpha1, "alpha1");
  require_phase(alpha2, "alpha2");
  const double alpha_min = std::min(alpha1, alpha2);
  return AmplitudeCheck{overlap * overlap >= alpha_min / kTwoPi, alpha_min};
}

CriterionOutcome evaluate_criterion(const GaussianPacket& p1, const GaussianPacket& p2,
                                    const PhysicalConstants& constants) {
  if (p1.time() != p2.time()) {
    throw ContractViolation("criterion evaluated on packets at different times");
  }
  const double overlap = overlap_integral(p1, p2);
  const PhaseCheck phase = phase_criterion(p1.alpha(), p2.alpha(), constants);
  const AmplitudeCheck amplitude = amplitude_criterion(overlap, p1.alpha(), p2.alpha());
  return CriterionOutcome{phase.ok, amplitude.ok, overlap, amplitude.alpha_min, phase.distance};
}

}  // namespace dcollapse
