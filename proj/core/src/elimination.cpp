#include "halfspace/elimination.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace halfspace {

namespace {

struct ChainIdentity {
  std::vector<double> alpha;  // entries for j >= r are live
  Expr P;
  double Q = 0.0;
};

constexpr double kExactIntegerLimit = 4.503599627370496e15;  // 2^52

void check_alpha_magnitude(double a) {
  if (std::abs(a) >= kExactIntegerLimit)
    throw std::invalid_argument("elimination divisors exceed the exact-integer range");
}

/// Runs one chain: seed identity sum_j alpha_j * coeff_j = P + Q * p, then
/// alternately applies the reduced operator and substitutes the coefficient
/// equations, peeling one unknown per round.
std::vector<std::pair<int, ParamCoefficient>> run_chain(
    const DiffusionMatrix& A, const std::vector<int>& modes,
    const std::vector<Expr>& sources, std::vector<double> alpha0, Expr P0, double Q0,
    int* rounds) {
  const std::size_t k = modes.size();
  std::vector<ChainIdentity> ids;
  ids.push_back({std::move(alpha0), std::move(P0), Q0});

  for (std::size_t r = 0; r + 1 < k; ++r) {
    const ChainIdentity& cur = ids.back();
    const int m_r = modes[r];
    const double lam_r = static_cast<double>(m_r) * m_r - 1.0;

    Expr next_p = apply_div_form(A, cur.P);
    for (std::size_t j = r; j < k; ++j)
      next_p = next_p - Expr::constant(cur.alpha[j]) * sources[j];
    next_p = (next_p - Expr::constant(lam_r) * cur.P).simplified();

    ChainIdentity next;
    next.alpha.assign(k, 0.0);
    for (std::size_t j = r + 1; j < k; ++j) {
      const double mj2 = static_cast<double>(modes[j]) * modes[j];
      const double mr2 = static_cast<double>(m_r) * m_r;
      next.alpha[j] = cur.alpha[j] * (mj2 - mr2);
      check_alpha_magnitude(next.alpha[j]);
    }
    next.P = std::move(next_p);
    next.Q = -lam_r * cur.Q;
    ids.push_back(std::move(next));
    ++(*rounds);
  }

  // Triangular back-substitution, last unknown first.
  std::vector<ParamCoefficient> coeffs(k);
  for (std::size_t ri = k; ri-- > 0;) {
    const ChainIdentity& id = ids[ri];
    Expr base = id.P;
    double slope = id.Q;
    for (std::size_t j = ri + 1; j < k; ++j) {
      base = base - Expr::constant(id.alpha[j]) * coeffs[j].base;
      slope -= id.alpha[j] * coeffs[j].slope;
    }
    const double inv = 1.0 / id.alpha[ri];
    coeffs[ri].base = (Expr::constant(inv) * base).simplified();
    coeffs[ri].slope = inv * slope;
  }
  ++(*rounds);  // solving the last identity closes the chain

  std::vector<std::pair<int, ParamCoefficient>> out;
  for (std::size_t j = 0; j < k; ++j) out.emplace_back(modes[j], std::move(coeffs[j]));
  return out;
}

std::vector<std::vector<double>> generic_points(const ProblemSpec& spec, int extra) {
  const GridSpec grid = spec.xprime_grid();
  const int nvars = spec.dimension - 1;
  std::vector<std::vector<double>> pts;
  const double fracs[3] = {0.3183, 0.5641, 0.8071};
  for (double t : fracs) {
    std::vector<double> p(static_cast<std::size_t>(nvars));
    for (int a = 0; a < nvars; ++a) {
      const auto& ax = grid.box.axes[static_cast<std::size_t>(a)];
      double f = t + 0.137 * a;
      f -= std::floor(f);
      p[static_cast<std::size_t>(a)] = ax[0] + (ax[1] - ax[0]) * f;
    }
    pts.push_back(std::move(p));
  }
  std::mt19937 rng(73459123u);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  for (int i = 0; i < extra; ++i) {
    std::vector<double> p(static_cast<std::size_t>(nvars));
    for (int a = 0; a < nvars; ++a) {
      const auto& ax = grid.box.axes[static_cast<std::size_t>(a)];
      p[static_cast<std::size_t>(a)] = ax[0] + (ax[1] - ax[0]) * unit(rng);
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

}  // namespace

EliminationState make_elimination_state(const ProblemSpec& spec) {
  if (spec.source.has_affine())
    throw std::invalid_argument("elimination does not handle affine sources");
  if (!effective_cos_coeff(spec.source, 1).is_literal_zero() ||
      !effective_sin_coeff(spec.source, 1).is_literal_zero())
    throw std::invalid_argument("elimination requires c1 = d1 = 0");
  if (spec.dimension == 3) {
    if (!spec.diffusion.literal_constant())
      throw UnsupportedElimination(
          "N = 3 elimination is supported for constant diffusion entries only");
  } else if (spec.dimension != 2) {
    throw UnsupportedElimination("elimination is supported for N = 2 or 3");
  }

  EliminationState st;
  st.dimension = spec.dimension;
  st.diffusion = spec.diffusion;
  st.source = spec.source;
  for (const auto& [m, coeff] : spec.source.cos_coeffs)
    if (m >= 2) st.cos_modes.push_back(m);
  for (const auto& [m, coeff] : spec.source.sin_coeffs)
    if (m >= 2) st.sin_modes.push_back(m);
  return st;
}

void eliminate_cos_chain(EliminationState& state) {
  const std::size_t k1 = state.cos_modes.size();
  state.cos_rounds = 0;
  state.cos_substitutions.clear();

  // Round 1: u(., 0) = 0 gives a0 = -2 a1 - 2 sum a_{m_j}.
  ++state.cos_rounds;

  if (k1 == 0) {
    state.cos_substitutions.emplace_back(0, ParamCoefficient{Expr::constant(0.0), -2.0});
    ++state.cos_rounds;  // the m = 0 equation becomes the constraint on a1
    state.cos_done = true;
    return;
  }

  // Round 2: substituting into the m = 0 equation yields the seed identity
  //   sum_j m_j^2 a_{m_j} = -a1 - f,   f = c0/2 + sum_j c_{m_j}.
  std::vector<Expr> sources;
  Expr f = Expr::constant(0.5) * state.source.cos_coeff(0);
  std::vector<double> alpha(k1);
  for (std::size_t j = 0; j < k1; ++j) {
    const int m = state.cos_modes[j];
    sources.push_back(state.source.cos_coeff(m));
    f = f + sources.back();
    alpha[j] = static_cast<double>(m) * m;
  }
  f = f.simplified();
  ++state.cos_rounds;

  state.cos_substitutions = run_chain(state.diffusion, state.cos_modes, sources,
                                      std::move(alpha), (-f).simplified(), -1.0,
                                      &state.cos_rounds);

  // Recover a0 from the boundary identity.
  Expr a0_base = Expr::constant(0.0);
  double a0_slope = -2.0;
  for (const auto& [m, pc] : state.cos_substitutions) {
    a0_base = a0_base - Expr::constant(2.0) * pc.base;
    a0_slope -= 2.0 * pc.slope;
  }
  state.cos_substitutions.emplace_back(0, ParamCoefficient{a0_base.simplified(), a0_slope});
  state.cos_done = true;
}

void eliminate_sin_chain(EliminationState& state) {
  const std::size_t k2 = state.sin_modes.size();
  state.sin_rounds = 0;
  state.sin_substitutions.clear();

  // Seed identity from u_N(., 0) = 0: b1 + sum_j n_j b_{n_j} = 0.
  ++state.sin_rounds;
  if (k2 == 0) {
    // b1 = 0 directly.
    state.sin_done = true;
    return;
  }

  std::vector<Expr> sources;
  std::vector<double> alpha(k2);
  for (std::size_t j = 0; j < k2; ++j) {
    const int n = state.sin_modes[j];
    sources.push_back(state.source.sin_coeff(n));
    alpha[j] = static_cast<double>(n);
  }
  ++state.sin_rounds;

  state.sin_substitutions = run_chain(state.diffusion, state.sin_modes, sources,
                                      std::move(alpha), Expr::constant(0.0), -1.0,
                                      &state.sin_rounds);
  state.sin_done = true;
}

ParamCoefficient substituted_residual(const EliminationState& state, int mode, TrigKind kind) {
  const auto& subs = kind == TrigKind::cosine ? state.cos_substitutions : state.sin_substitutions;
  const double lambda = static_cast<double>(mode) * mode - 1.0;
  const Expr source = kind == TrigKind::cosine ? state.source.cos_coeff(mode)
                                               : state.source.sin_coeff(mode);
  if (mode == 1) return {source.simplified(), 0.0};  // lambda = 0; the mode-1 slot is the parameter

  for (const auto& [m, pc] : subs) {
    if (m != mode) continue;
    const Expr base =
        (Expr::constant(-1.0) * apply_div_form(state.diffusion, pc.base) +
         Expr::constant(lambda) * pc.base + source)
            .simplified();
    return {base, lambda * pc.slope};
  }
  return {source.simplified(), 0.0};  // coefficient absent from the expansion
}

namespace {

struct LinearSolve {
  bool has_constraint = false;
  double value = 0.0;
  bool consistent = true;
  std::string detail;
  int witness_mode = 0;
  std::vector<double> witness_point;
  double witness_value = 0.0;
};

LinearSolve solve_parameter(const EliminationState& state, TrigKind kind,
                            const std::vector<int>& modes_to_check,
                            const std::vector<std::vector<double>>& base_points,
                            const std::vector<std::vector<double>>& extra_points,
                            double tau_res) {
  LinearSolve out;
  struct Row {
    int mode;
    ParamCoefficient pc;
  };
  std::vector<Row> rows;
  for (int m : modes_to_check) rows.push_back({m, substituted_residual(state, m, kind)});

  double num = 0.0, den = 0.0;
  for (const auto& row : rows) {
    if (std::abs(row.pc.slope) < 1e-12) continue;
    for (const auto& pt : base_points) {
      const double b = row.pc.base.eval(pt);
      num += -b * row.pc.slope;
      den += row.pc.slope * row.pc.slope;
    }
  }

  if (den > 0.0) {
    out.has_constraint = true;
    out.value = num / den;
  } else {
    // No equation mentions the parameter on the base points; re-test before
    // declaring it free.
    for (const auto& row : rows) {
      if (std::abs(row.pc.slope) >= 1e-12) out.has_constraint = true;
    }
    if (!out.has_constraint) out.value = 0.0;
  }

  const double limit = 10.0 * tau_res;
  auto check_points = [&](const std::vector<std::vector<double>>& pts) {
    for (const auto& row : rows) {
      for (const auto& pt : pts) {
        const double r = row.pc.base.eval(pt) + row.pc.slope * out.value;
        if (std::abs(r) > limit && std::abs(r) > std::abs(out.witness_value)) {
          out.consistent = false;
          out.witness_mode = row.mode;
          out.witness_point = pt;
          out.witness_value = r;
        }
      }
    }
  };
  check_points(base_points);
  check_points(extra_points);
  if (!out.consistent) {
    std::ostringstream os;
    os << (kind == TrigKind::cosine ? "cosine" : "sine") << " mode " << out.witness_mode
       << " residual " << out.witness_value << " after parameter substitution";
    out.detail = os.str();
  }
  return out;
}

}  // namespace

ParameterResult determine_parameters(const EliminationState& state, const ProblemSpec& spec) {
  if (!state.cos_done || !state.sin_done)
    throw std::logic_error("run both elimination chains before determining parameters");

  const auto base_points = generic_points(spec, 0);
  const auto extra_points = generic_points(spec, 10);

  std::vector<int> cos_modes = {0};
  for (int m : state.cos_modes) cos_modes.push_back(m);
  const LinearSolve a1 =
      solve_parameter(state, TrigKind::cosine, cos_modes, base_points, extra_points, spec.tol.res);

  ParameterResult out;
  if (!a1.consistent) {
    out.status = ParameterResult::Status::inconsistent;
    out.detail = a1.detail;
    out.witness_mode = a1.witness_mode;
    out.witness_kind = TrigKind::cosine;
    out.witness_point = a1.witness_point;
    out.witness_value = a1.witness_value;
    return out;
  }
  out.a1 = a1.has_constraint ? a1.value : 0.0;
  out.a1_free = !a1.has_constraint;

  if (state.sin_modes.empty()) {
    out.b1 = 0.0;  // forced by u_N(., 0) = 0
  } else {
    const LinearSolve b1 = solve_parameter(state, TrigKind::sine, state.sin_modes, base_points,
                                           extra_points, spec.tol.res);
    if (!b1.consistent) {
      out.status = ParameterResult::Status::inconsistent;
      out.detail = b1.detail;
      out.witness_mode = b1.witness_mode;
      out.witness_kind = TrigKind::sine;
      out.witness_point = b1.witness_point;
      out.witness_value = b1.witness_value;
      return out;
    }
    out.b1 = b1.has_constraint ? b1.value : 0.0;
    out.b1_free = !b1.has_constraint;
  }

  out.status = (out.a1_free || out.b1_free) ? ParameterResult::Status::free_parameter
                                            : ParameterResult::Status::determined;
  return out;
}

TrigSeries assemble_candidate(const EliminationState& state, double a1, double b1) {
  TrigSeries u;
  for (const auto& [m, pc] : state.cos_substitutions)
    u.set_cos(m, (pc.base + Expr::constant(pc.slope * a1)).simplified());
  u.set_cos(1, u.cos_coeff(1) + Expr::constant(a1));
  for (const auto& [m, pc] : state.sin_substitutions)
    u.set_sin(m, (pc.base + Expr::constant(pc.slope * b1)).simplified());
  if (b1 != 0.0) u.set_sin(1, u.sin_coeff(1) + Expr::constant(b1));
  return u;
}

}  // namespace halfspace
