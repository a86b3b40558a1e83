#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "halfspace/grid.hpp"

namespace halfspace {

/// Point sampler over the strip: f(x', xN).
using StripSampler = std::function<double(std::span<const double> xprime, double xn)>;

enum class TrigKind { cosine, sine };

struct CoefficientMeasurement {
  int mode = 0;
  TrigKind kind = TrigKind::cosine;
  std::vector<double> values;  // one per x' point
  int resolution = 0;          // quadrature points per period
  double error_estimate = 0.0; // |value_Q - value_{Q/2}| sup over points
};

/// (1/pi) * integral over [0, 2pi] of f * cos(m xN) (or sin) by composite
/// trapezoid on a uniform grid; spectrally exact for trigonometric
/// polynomials of degree < Q/2. Requires Q >= 4 and Q >= 2*mode + 2.
CoefficientMeasurement analyze_mode(const StripSampler& f, int mode, TrigKind kind,
                                    const std::vector<std::vector<double>>& xprime_points,
                                    int resolution);

struct AuditCheck {
  std::string id;
  bool pass = true;
  std::string detail;
  int witness_mode = 0;
  int witness_mode2 = 0;
  std::vector<double> witness_point;
  double witness_value = 0.0;
};

struct AuditReport {
  int max_mode = 0;
  double tau_zero = 0.0;
  std::vector<CoefficientMeasurement> sine_coefficients;  // modes 2..max_mode
  std::vector<std::string> mode_dichotomy;                // per mode 2..max_mode
  std::vector<AuditCheck> checks;                         // (i), (ii), (iii)
  bool all_pass = true;
};

/// Audits the measured sine coefficients of a sampled field against the
/// necessary conditions for solutions of the model problem:
///  (i)  b_m <= tau for m >= 2,
///  (ii) b_n/n >= b_m/m - tau for n > m >= 2,
///  (iii) per mode, either b_m < -tau everywhere sampled or |b_m| <= tau
///        everywhere sampled (dichotomy evidence, not proof).
AuditReport coefficient_audit(const StripSampler& u, int max_mode,
                              const std::vector<std::vector<double>>& xprime_points,
                              int resolution, double tau_zero);

}  // namespace halfspace
