#include "halfspace/coefficient_system.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace halfspace {

Expr apply_div_form(const DiffusionMatrix& A, const Expr& e) {
  Expr acc = Expr::constant(0.0);
  for (int i = 0; i < A.dim; ++i) {
    Expr flux = Expr::constant(0.0);
    for (int j = 0; j < A.dim; ++j) flux = flux + A.entry(i, j) * e.derivative(j);
    acc = acc + flux.derivative(i);
  }
  return acc.simplified();
}

Expr effective_cos_coeff(const TrigSeries& g, int m) {
  Expr c = g.cos_coeff(m);
  if (g.affine_xn && m == 0) c = c + Expr::constant(kTwoPi) * *g.affine_xn;
  return c.simplified();
}

Expr effective_sin_coeff(const TrigSeries& g, int m) {
  Expr d = g.sin_coeff(m);
  if (g.affine_xn && m >= 1) d = d - Expr::constant(2.0 / m) * *g.affine_xn;
  return d.simplified();
}

std::vector<CoefficientEquation> build_system(const ProblemSpec& spec, int max_mode) {
  if (max_mode < 0) throw std::invalid_argument("max_mode must be >= 0");
  if (!spec.source.has_affine() && spec.source.max_mode() > max_mode)
    throw std::invalid_argument("source has modes above max_mode");
  std::vector<CoefficientEquation> system;
  for (int m = 0; m <= max_mode; ++m) {
    CoefficientEquation eq;
    eq.mode = m;
    eq.kind = TrigKind::cosine;
    eq.lambda = m * m - 1;
    eq.source = effective_cos_coeff(spec.source, m);
    system.push_back(std::move(eq));
  }
  for (int m = 1; m <= max_mode; ++m) {
    CoefficientEquation eq;
    eq.mode = m;
    eq.kind = TrigKind::sine;
    eq.lambda = m * m - 1;
    eq.source = effective_sin_coeff(spec.source, m);
    system.push_back(std::move(eq));
  }
  return system;
}

TraceAssumption TraceAssumption::make(bool u_2pi, bool uN_0, bool uN_2pi, std::string rule) {
  if (u_2pi && !uN_2pi)
    throw std::invalid_argument(
        "u(.,2pi) = 0 together with nonnegativity forces u_N(.,2pi) = 0; "
        "setting the first without the third is inconsistent");
  TraceAssumption t;
  t.u_2pi_zero = u_2pi;
  t.uN_0_zero = uN_0;
  t.uN_2pi_zero = uN_2pi;
  t.rule = std::move(rule);
  return t;
}

SignProfile sign_profile(const Expr& e, const GridSpec& grid, double tau_zero) {
  SignProfile s;
  if (auto lit = e.simplified().literal_constant()) {
    s.min = s.max = *lit;
    s.argmin = s.argmax = grid.point(0);
  } else {
    const auto prof = sample_expr(e, grid);
    s.min = prof.min_value;
    s.max = prof.max_value;
    s.argmin = prof.argmin;
    s.argmax = prof.argmax;
  }
  s.identically_zero = std::abs(s.min) <= tau_zero && std::abs(s.max) <= tau_zero;
  s.nonnegative = s.min >= -tau_zero;
  s.nonpositive = s.max <= tau_zero;
  return s;
}

namespace {

void mark_traces(std::vector<CoefficientEquation>& system, const TraceAssumption& traces) {
  for (auto& eq : system) {
    if (eq.kind == TrigKind::cosine) {
      if (traces.uN_0_zero && traces.uN_2pi_zero) {
        eq.trace_status = TraceStatus::proven_zero;
        eq.trace_rule = traces.rule;
      }
    } else if (traces.u_2pi_zero) {
      eq.trace_status = TraceStatus::proven_zero;
      eq.trace_rule = traces.rule;
    }
  }
}

}  // namespace

DischargeResult discharge_traces(std::vector<CoefficientEquation> system,
                                 const ProblemSpec& spec) {
  DischargeResult out;
  out.system = std::move(system);
  out.traces = TraceAssumption{};

  if (spec.assume_passo_base) {
    out.traces = TraceAssumption::make(true, true, true, "asserted zero traces");
    mark_traces(out.system, out.traces);
    return out;
  }
  if (spec.dimension > 3) {
    out.obstructions.push_back(
        "dimension >= 4: trace discharge needs the zero-trace assertion");
    return out;
  }

  const GridSpec grid = spec.xprime_grid_capped(spec.verification.grid, 66049);
  const double tau = spec.tol.zero;

  const Expr d1 = effective_sin_coeff(spec.source, 1);
  out.d1 = sign_profile(d1, grid, tau);

  if (out.d1->identically_zero) {
    out.traces = TraceAssumption::make(true, false, true,
                                       "d1 = 0: zero traces at xN = 2pi");
  } else if (out.d1->nonnegative) {
    out.nonexistence = true;
    out.rule_id = "R-D1-POS";
    std::ostringstream os;
    os << "d1 >= 0 on the sampled grid and d1 not identically zero (max " << out.d1->max << ")";
    out.detail = os.str();
    return out;
  } else if (out.d1->nonpositive) {
    out.obstructions.push_back("d1 is negative: the zero-trace argument does not apply");
    return out;
  } else {
    out.obstructions.push_back("sign-indefinite d1");
    return out;
  }

  const Expr c1 = effective_cos_coeff(spec.source, 1);
  out.c1 = sign_profile(c1, grid, tau);

  if (out.c1->identically_zero) {
    out.traces = TraceAssumption::make(true, true, true,
                                       "c1 = d1 = 0: all boundary traces vanish");
  } else if (out.c1->nonnegative) {
    out.nonexistence = true;
    out.rule_id = "R-C1-POS";
    std::ostringstream os;
    os << "d1 = 0, c1 >= 0 on the sampled grid and c1 not identically zero (max " << out.c1->max
       << ")";
    out.detail = os.str();
    return out;
  } else if (out.c1->nonpositive) {
    out.obstructions.push_back("c1 is negative: u_N(.,0) stays unknown");
  } else {
    out.obstructions.push_back("sign-indefinite c1");
  }

  mark_traces(out.system, out.traces);
  return out;
}

}  // namespace halfspace
