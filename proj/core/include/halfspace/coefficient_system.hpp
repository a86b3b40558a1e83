#pragma once

#include <optional>
#include <string>
#include <vector>

#include "halfspace/expr.hpp"
#include "halfspace/fourier.hpp"
#include "halfspace/problem.hpp"

namespace halfspace {

/// Applies the reduced divergence-form operator div'(A grad' e) exactly:
/// sum_i d_i ( sum_j a_ij d_j e ). For N = 2 this is (A * e')'.
Expr apply_div_form(const DiffusionMatrix& A, const Expr& e);

/// Fourier coefficient of the source's restriction to one period, with the
/// affine part folded in: an affine term p(x')*xN contributes 2*pi*p to the
/// m = 0 cosine coefficient and -2*p/m to each sine coefficient.
Expr effective_cos_coeff(const TrigSeries& g, int m);
Expr effective_sin_coeff(const TrigSeries& g, int m);

enum class TraceStatus { unknown, proven_zero };

/// One exact equation satisfied by a solution's Fourier coefficient:
///   div'(A grad' a_m) = lambda * a_m + source + trace,
/// with lambda = m^2 - 1.  Cosine equations carry the flux trace
/// (1/pi)(u_N(.,0) - u_N(.,2pi)); sine equations carry (m/pi) u(.,2pi).
struct CoefficientEquation {
  int mode = 0;
  TrigKind kind = TrigKind::cosine;
  int lambda = -1;  // m^2 - 1
  Expr source;      // c_m or d_m (effective)
  TraceStatus trace_status = TraceStatus::unknown;
  std::string trace_rule;  // why the trace vanishes, when proven
};

std::vector<CoefficientEquation> build_system(const ProblemSpec& spec, int max_mode);

/// Boundary identities that collapse the coefficient system. Setting the
/// zero trace at xN = 2pi without the zero normal trace there is rejected:
/// nonnegativity makes every (x', 2pi) a minimum point.
struct TraceAssumption {
  bool u_2pi_zero = false;
  bool uN_0_zero = false;
  bool uN_2pi_zero = false;
  std::string rule;

  static TraceAssumption make(bool u_2pi, bool uN_0, bool uN_2pi, std::string rule);
  bool all() const { return u_2pi_zero && uN_0_zero && uN_2pi_zero; }
};

struct SignProfile {
  double min = 0.0;
  double max = 0.0;
  std::vector<double> argmin;
  std::vector<double> argmax;
  bool identically_zero = false;
  bool nonnegative = false;
  bool nonpositive = false;
};

SignProfile sign_profile(const Expr& e, const GridSpec& grid, double tau_zero);

struct DischargeResult {
  std::vector<CoefficientEquation> system;
  TraceAssumption traces;
  bool nonexistence = false;
  std::string rule_id;  // R-D1-POS or R-C1-POS when nonexistence
  std::string detail;
  std::vector<std::string> obstructions;
  std::optional<SignProfile> d1;
  std::optional<SignProfile> c1;
};

/// Orders the discharge d1-then-c1: a nonnegative, not identically zero d1
/// (then c1) certifies non-existence; identically zero coefficients prove the
/// corresponding traces zero. Sign-indefinite evidence leaves traces unknown.
/// For N >= 4 nothing is discharged unless the spec asserts the zero traces.
DischargeResult discharge_traces(std::vector<CoefficientEquation> system,
                                 const ProblemSpec& spec);

}  // namespace halfspace
