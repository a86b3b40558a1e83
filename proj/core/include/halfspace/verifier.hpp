#pragma once

#include <optional>
#include <string>
#include <vector>

#include "halfspace/coefficient_system.hpp"
#include "halfspace/fourier.hpp"
#include "halfspace/problem.hpp"

namespace halfspace {

/// Mode-wise PDE residual of a candidate series: for each mode,
/// -div'(A grad' coeff) + (m^2 - 1) coeff + g_coeff, plus the affine channel.
/// The sup is taken over the verification box times K periods.
struct ResidualReport {
  TrigSeries residual;  // Expr-valued coefficients; literal zeros dropped
  double sup = 0.0;
  std::vector<double> witness;  // (x', xN)
};

ResidualReport residual(const TrigSeries& u, const ProblemSpec& spec);

/// Minimum of a candidate over the strip grid plus the first scan-order point
/// (x' outer, xN ascending) whose value drops below -tau_zero.
struct ScanResult {
  double min_value = 0.0;
  std::vector<double> min_point;
  bool has_violation = false;
  std::vector<double> first_violation_point;
  double first_violation_value = 0.0;
};

ScanResult nonnegativity_scan(const TrigSeries& u, const ProblemSpec& spec);

struct TraceReport {
  double u_0_sup = 0.0;      // sup |u(., 0)|
  double uN_0_sup = 0.0;     // sup |u_N(., 0)|
  double u_2pi_sup = 0.0;    // sup |u(., 2pi)|
  double uN_2pi_sup = 0.0;   // sup |u_N(., 2pi)|
};

TraceReport trace_check(const TrigSeries& u, const ProblemSpec& spec);

/// Finite-difference cross-check on a truncated box with Dirichlet data taken
/// from the candidate (manufactured-solution methodology). Validates
/// consistency of the candidate, not uniqueness.
struct OracleResult {
  double sup_error = 0.0;
  double R = 0.0;             // possibly adjusted by the resonance guard
  double h = 0.0;
  int unknowns = 0;
  double sigma_min_estimate = 0.0;
  std::string note;
};

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

OracleResult oracle_solve(const ProblemSpec& spec, const TrigSeries& candidate, double R,
                          double h);

/// Smooth radial cutoff: 1 on [0, R], 0 outside [2R, inf), built from the
/// standard exp(-1/t) bridge. The measured constant is sup |phi_R'| * R.
struct CutoffProfile {
  double radius = 1.0;
  std::vector<double> points;
  std::vector<double> phi;
  std::vector<double> grad;  // |phi_R'|
  double gradient_bound_constant = 0.0;
};

CutoffProfile cutoff_profile(double R, int points_per_unit = 64);

double cutoff_value(double t);       // phi(t) on the reference interval
double cutoff_derivative(double t);  // phi'(t)

/// Energy inequality check for a one-variable subsolution of -v'' + lambda v <= 0:
///   integral_{B_R} (v+)^2  <=  C / (lambda R^2) * integral_{B_2R} (v+)^2,
/// with C derived from the implementation's cutoff constant.
struct CaccioppoliReport {
  bool hypothesis_met = true;
  std::string hypothesis_detail;
  double constant = 0.0;
  struct Row {
    double R = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
  };
  std::vector<Row> rows;
  bool all_hold = false;
};

CaccioppoliReport caccioppoli_check(const Expr& v, double lambda, const std::vector<double>& radii,
                                    double tau_zero = 1e-9);

/// Doubling data: samples of a nonnegative nondecreasing I at R, 2R, 4R, ...
struct DoublingWitness {
  double R0 = 1.0;
  double theta = 0.25;
  double gamma = 1.0;
  double C = 1.0;
  std::vector<std::pair<double, double>> samples;  // (R, I(R)), doubling radii
};

struct DoublingConclusion {
  bool vanishes = false;
  int k = 0;  // iterations of the bound needed to fall below tau
  std::string failed_premise;  // empty when both premises hold
  double witness_R = 0.0;
};

/// Requires theta < 2^-gamma (contract). Verifies both premises on the
/// samples; when they hold, iterates I(R) <= C (theta 2^gamma)^k R^gamma and
/// reports the k at which the bound drops below tau_zero.
DoublingConclusion doubling_check(const DoublingWitness& w, double tau_zero = 1e-9);

struct VerificationReport {
  double residual_sup = 0.0;
  std::vector<double> residual_witness;
  TraceReport traces;
  ScanResult scan;
  std::vector<double> strip_bounds;  // max |u| over box x [0, 2pi k], k = 1..K
  std::optional<double> oracle_sup_error;
  std::optional<double> oracle_convergence_ratio;  // err(2h) / err(h)
  std::string oracle_note;
  std::optional<AuditReport> audit;
  bool pass = false;
};

/// Full verification of a candidate: residual, boundary traces,
/// nonnegativity, strip bounds, coefficient audit, and (optionally) the
/// finite-difference oracle with a convergence probe.
VerificationReport verify_candidate(const ProblemSpec& spec, const TrigSeries& u,
                                    bool run_oracle);

}  // namespace halfspace
