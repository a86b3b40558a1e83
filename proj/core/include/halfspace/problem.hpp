#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "halfspace/expr.hpp"
#include "halfspace/grid.hpp"

namespace halfspace {

/// The (N-1)x(N-1) block of the diffusion matrix; the full NxN matrix is
/// block diagonal with lower-right entry 1 and is never stored. Entries are
/// symmetric by construction.
struct DiffusionMatrix {
  int dim = 1;                // N - 1
  std::vector<Expr> entries;  // dim*dim, row-major

  static DiffusionMatrix identity(int dim);
  static DiffusionMatrix scalar(Expr a);  // N = 2
  static DiffusionMatrix from_entries(int dim, std::vector<Expr> entries);

  const Expr& entry(int i, int j) const;
  bool literal_identity() const;
  bool literal_constant() const;  // every entry a literal constant
};

/// Finite Fourier series in x_N with Expr-valued coefficients. The m = 0 slot
/// stores a0 and synthesis applies the conventional factor 1/2. The optional
/// affine part represents an extra p(x') * x_N term.
struct TrigSeries {
  std::map<int, Expr> cos_coeffs;  // m >= 0
  std::map<int, Expr> sin_coeffs;  // m >= 1
  std::optional<Expr> affine_xn;

  int max_mode() const;
  bool trig_empty() const;
  bool has_affine() const;
  Expr cos_coeff(int m) const;  // literal 0 when absent
  Expr sin_coeff(int m) const;

  void set_cos(int m, Expr e);  // drops literal zeros
  void set_sin(int m, Expr e);
  void set_affine(Expr e);

  double evaluate(std::span<const double> xprime, double xn) const;
  TrigSeries derivative_xn(int order = 1) const;
  std::string to_string() const;
};

TrigSeries scale_series(const TrigSeries& s, double factor);
TrigSeries add_series(const TrigSeries& a, const TrigSeries& b);

struct Tolerances {
  double zero = 1e-9;  // sign / zero decisions
  double res = 1e-8;   // residual pass threshold
  double pd = 1e-9;    // positive definiteness margin
};

struct OracleConfig {
  double R = 4.0;
  double h = kTwoPi / 128.0;
};

struct VerificationConfig {
  Box box;             // x' box; defaults to [-4,4]^(N-1)
  int grid = 257;      // points per x' axis
  int periods = 2;     // K, strip period count for multi-period checks
  int xn_per_period = 64;  // x_N sampling density for scans
  OracleConfig oracle;
};

struct ProblemSpec {
  int dimension = 2;  // N
  DiffusionMatrix diffusion;
  TrigSeries source;  // g
  Tolerances tol;
  VerificationConfig verification;
  bool assume_passo_base = false;  // caller-asserted zero traces (N >= 4 path)

  GridSpec xprime_grid() const;
  GridSpec xprime_grid(int points_per_axis) const;
  /// Per-axis resolution shrunk so the total point count stays within budget
  /// (keeps higher-dimensional sampling affordable; never below 5 per axis).
  GridSpec xprime_grid_capped(int preferred, std::size_t budget) const;
};

/// Fills dimension-dependent defaults (box, oracle mesh) that cannot be
/// chosen before N is known.
void apply_default_verification(ProblemSpec& spec);

struct Finding {
  std::string code;
  std::string message;
  std::vector<double> point;
  bool fatal = false;
};

/// Sampled admissibility checks: symmetry, positive definiteness of the
/// quadratic form on a probe set, entry boundedness on the verification box,
/// variable-index ranges. Empty result means admissible.
std::vector<Finding> validate_spec(const ProblemSpec& spec);

bool has_fatal(const std::vector<Finding>& findings);

struct FamilySolution {
  TrigSeries base;
  TrigSeries direction;
  double param_lo = -1.0;
  double param_hi = 1.0;
  double sampled_lo = 0.0;  // widest sampled-nonnegative parameter interval
  double sampled_hi = 0.0;
  std::string completeness = "known family, completeness unknown";
};

}  // namespace halfspace
