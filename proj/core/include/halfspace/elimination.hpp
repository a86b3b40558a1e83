#pragma once

#include <optional>
#include <string>
#include <vector>

#include "halfspace/coefficient_system.hpp"
#include "halfspace/problem.hpp"

namespace halfspace {

/// A coefficient expressed in terms of source data and one free parameter:
/// base(x') + slope * p, where p is a1 for cosine coefficients and b1 for
/// sine coefficients. Slopes are exact rationals carried as doubles.
struct ParamCoefficient {
  Expr base;
  double slope = 0.0;
};

/// Working data of the iterative elimination. Each chain keeps the identity
///   sum_{j >= r} alpha_j * coeff_{mode_j}(x') = P_r(x') + Q_r * p
/// and peels one unknown per round; substitutions are stored in triangular
/// order and combined lazily (grid evaluation only, no eager expansion).
struct EliminationState {
  int dimension = 2;
  DiffusionMatrix diffusion;
  TrigSeries source;
  std::vector<int> cos_modes;  // I1, ascending, all >= 2
  std::vector<int> sin_modes;  // I2, ascending, all >= 2
  int cos_rounds = 0;
  int sin_rounds = 0;
  // Filled by the chains: mode -> coefficient in terms of the free parameter.
  std::vector<std::pair<int, ParamCoefficient>> cos_substitutions;  // includes mode 0
  std::vector<std::pair<int, ParamCoefficient>> sin_substitutions;
  bool cos_done = false;
  bool sin_done = false;
};

/// Preconditions: traces discharged (handled by the caller), c1 = d1 = 0,
/// no affine part, and either N = 2 or N = 3 with constant diffusion entries.
/// Throws std::invalid_argument when violated; throws UnsupportedElimination
/// for the N = 3 variable-coefficient fallback.
class UnsupportedElimination : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

EliminationState make_elimination_state(const ProblemSpec& spec);

/// Derives a0 and every a_{m_j} as ParamCoefficients in a1. Exactly
/// k1 + 2 symbolic rounds.
void eliminate_cos_chain(EliminationState& state);

/// Derives every b_{n_j} as ParamCoefficients in b1; the seed identity is
/// b1 + sum n_j b_{n_j} = 0 from u_N(., 0) = 0. With I2 empty, b1 = 0.
void eliminate_sin_chain(EliminationState& state);

struct ParameterResult {
  enum class Status { determined, inconsistent, free_parameter };
  Status status = Status::determined;
  double a1 = 0.0;
  double b1 = 0.0;
  bool a1_free = false;
  bool b1_free = false;
  // Inconsistency certificate:
  std::string detail;
  int witness_mode = 0;
  TrigKind witness_kind = TrigKind::cosine;
  std::vector<double> witness_point;
  double witness_value = 0.0;
};

/// Imposes the PDE on the substituted expansion: every mode residual is
/// linear in (a1, b1); the induced system is solved from sampled residual
/// coefficients and re-verified on the sample set. Inconsistency needs a
/// residual above 10 * tau_res at some witness point.
ParameterResult determine_parameters(const EliminationState& state, const ProblemSpec& spec);

/// Builds the candidate series from the recorded substitutions at given
/// parameter values.
TrigSeries assemble_candidate(const EliminationState& state, double a1, double b1);

/// Residual coefficient of one mode under the substitutions, still linear in
/// the chain parameter (used by determine_parameters and by tests).
ParamCoefficient substituted_residual(const EliminationState& state, int mode, TrigKind kind);

}  // namespace halfspace
