#include "halfspace/fourier.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace halfspace {

namespace {

double trapezoid_coefficient(const StripSampler& f, std::span<const double> xp, int mode,
                             TrigKind kind, int q) {
  // Composite trapezoid with explicit endpoint samples; the sampler need not
  // be periodic (the coefficient equations integrate the raw restriction to
  // one period).
  const double h = kTwoPi / q;
  double acc = 0.0;
  for (int k = 0; k <= q; ++k) {
    const double xn = h * k;
    const double trig = kind == TrigKind::cosine ? std::cos(mode * xn) : std::sin(mode * xn);
    const double w = (k == 0 || k == q) ? 0.5 : 1.0;
    acc += w * f(xp, xn) * trig;
  }
  return acc * h / kPi;
}

std::string point_text(std::span<const double> p) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ")";
  return os.str();
}

}  // namespace

CoefficientMeasurement analyze_mode(const StripSampler& f, int mode, TrigKind kind,
                                    const std::vector<std::vector<double>>& xprime_points,
                                    int resolution) {
  if (mode < 0) throw std::invalid_argument("mode must be >= 0");
  if (kind == TrigKind::sine && mode < 1) throw std::invalid_argument("sine mode must be >= 1");
  if (resolution < 4) throw std::invalid_argument("quadrature resolution must be >= 4");
  if (resolution < 2 * mode + 2)
    throw std::invalid_argument("quadrature resolution must be >= 2*mode + 2");

  CoefficientMeasurement out;
  out.mode = mode;
  out.kind = kind;
  out.resolution = resolution;
  out.values.resize(xprime_points.size());

  const int half = resolution / 2;
  const bool half_ok = half >= 4 && half >= 2 * mode + 2 && resolution % 2 == 0;
  double err = 0.0;
  for (std::size_t i = 0; i < xprime_points.size(); ++i) {
    const auto& xp = xprime_points[i];
    out.values[i] = trapezoid_coefficient(f, xp, mode, kind, resolution);
    if (half_ok) {
      const double coarse = trapezoid_coefficient(f, xp, mode, kind, half);
      err = std::max(err, std::abs(out.values[i] - coarse));
    }
  }
  out.error_estimate = err;
  return out;
}

AuditReport coefficient_audit(const StripSampler& u, int max_mode,
                              const std::vector<std::vector<double>>& xprime_points,
                              int resolution, double tau_zero) {
  if (max_mode < 2) throw std::invalid_argument("audit needs max_mode >= 2");

  AuditReport report;
  report.max_mode = max_mode;
  report.tau_zero = tau_zero;

  for (int m = 2; m <= max_mode; ++m)
    report.sine_coefficients.push_back(
        analyze_mode(u, m, TrigKind::sine, xprime_points, resolution));

  auto values = [&](int m) -> const std::vector<double>& {
    return report.sine_coefficients[static_cast<std::size_t>(m - 2)].values;
  };

  // (i) b_m <= tau for every m >= 2.
  AuditCheck sign_check;
  sign_check.id = "sine-coefficients-nonpositive";
  for (int m = 2; m <= max_mode && sign_check.pass; ++m) {
    const auto& v = values(m);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] > tau_zero) {
        sign_check.pass = false;
        sign_check.witness_mode = m;
        sign_check.witness_point = xprime_points[i];
        sign_check.witness_value = v[i];
        sign_check.detail = "b_" + std::to_string(m) + " = " + std::to_string(v[i]) + " > tau at " +
                            point_text(xprime_points[i]);
        break;
      }
    }
  }
  if (sign_check.pass) sign_check.detail = "all sampled b_m <= tau for m >= 2";
  report.checks.push_back(sign_check);

  // (ii) b_n / n >= b_m / m - tau for n > m >= 2.
  AuditCheck mono_check;
  mono_check.id = "scaled-sine-monotonicity";
  for (int m = 2; m <= max_mode && mono_check.pass; ++m) {
    for (int n = m + 1; n <= max_mode && mono_check.pass; ++n) {
      const auto& vm = values(m);
      const auto& vn = values(n);
      for (std::size_t i = 0; i < vm.size(); ++i) {
        const double gap = vn[i] / n - vm[i] / m;
        if (gap < -tau_zero) {
          mono_check.pass = false;
          mono_check.witness_mode = m;
          mono_check.witness_mode2 = n;
          mono_check.witness_point = xprime_points[i];
          mono_check.witness_value = gap;
          mono_check.detail = "b_" + std::to_string(n) + "/" + std::to_string(n) + " < b_" +
                              std::to_string(m) + "/" + std::to_string(m) + " by " +
                              std::to_string(-gap) + " at " + point_text(xprime_points[i]);
          break;
        }
      }
    }
  }
  if (mono_check.pass) mono_check.detail = "b_n/n >= b_m/m holds on the sampled grid";
  report.checks.push_back(mono_check);

  // (iii) dichotomy evidence: per mode, identically zero or strictly negative.
  AuditCheck dicho_check;
  dicho_check.id = "per-mode-dichotomy";
  for (int m = 2; m <= max_mode; ++m) {
    const auto& v = values(m);
    bool all_zero = true, all_negative = true;
    std::size_t witness = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (std::abs(v[i]) > tau_zero) all_zero = false;
      if (v[i] >= -tau_zero) {
        if (all_negative) witness = i;
        all_negative = false;
      }
    }
    std::string label;
    if (all_zero)
      label = "identically zero within tau";
    else if (all_negative)
      label = "strictly negative on the sample";
    else {
      label = "mixed (dichotomy evidence fails)";
      if (dicho_check.pass) {
        dicho_check.pass = false;
        dicho_check.witness_mode = m;
        dicho_check.witness_point = xprime_points[witness];
        dicho_check.detail = "b_" + std::to_string(m) +
                             " is neither identically zero nor strictly negative on the sample";
      }
    }
    report.mode_dichotomy.push_back("m=" + std::to_string(m) + ": " + label);
  }
  if (dicho_check.pass) dicho_check.detail = "each sampled mode is identically zero or strictly negative";
  report.checks.push_back(dicho_check);

  report.all_pass = sign_check.pass && mono_check.pass && dicho_check.pass;
  return report;
}

}  // namespace halfspace
