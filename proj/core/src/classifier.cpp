#include "halfspace/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace halfspace {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::NonExistence:
      return "NonExistence";
    case Verdict::Unique:
      return "Unique";
    case Verdict::Family:
      return "Family";
    case Verdict::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

ClassificationError::ClassificationError(const std::string& message,
                                         std::vector<Finding> findings)
    : std::runtime_error(message), findings_(std::move(findings)) {}

TrigSeries construct_series_1d(const TrigSeries& g) {
  if (g.has_affine())
    throw std::invalid_argument("1-D construction needs an xN-only trigonometric source");
  auto constant_of = [](const Expr& e, const std::string& what) {
    const auto v = e.simplified().literal_constant();
    if (!v) throw std::invalid_argument(what + " is not a recognized constant");
    return *v;
  };
  if (constant_of(g.cos_coeff(1), "c1") != 0.0 || constant_of(g.sin_coeff(1), "d1") != 0.0)
    throw std::invalid_argument("1-D construction requires c1 = d1 = 0");

  const double c0 = constant_of(g.cos_coeff(0), "c0");
  double a1 = -0.5 * c0;
  double b1 = 0.0;
  TrigSeries u;
  for (const auto& [m, coeff] : g.cos_coeffs) {
    if (m < 2) continue;
    const double cm = constant_of(coeff, "c" + std::to_string(m));
    const double lam = static_cast<double>(m) * m - 1.0;
    a1 += cm / lam;
    u.set_cos(m, Expr::constant(-cm / lam));
  }
  for (const auto& [m, coeff] : g.sin_coeffs) {
    if (m < 2) continue;
    const double dm = constant_of(coeff, "d" + std::to_string(m));
    const double lam = static_cast<double>(m) * m - 1.0;
    b1 += m * dm / lam;
    u.set_sin(m, Expr::constant(-dm / lam));
  }
  u.set_cos(0, Expr::constant(c0));
  u.set_cos(1, Expr::constant(a1));
  u.set_sin(1, Expr::constant(b1));
  return u;
}

namespace {

struct StripRange {
  double min = 0.0;
  double max = 0.0;
  std::vector<double> argmin, argmax;
};

StripRange sample_source_on_strip(const ProblemSpec& spec) {
  GridSpec grid = spec.xprime_grid_capped(std::min(spec.verification.grid, 129), 66049);
  grid.box.axes.push_back({0.0, kTwoPi * spec.verification.periods});
  grid.resolution.push_back(spec.verification.xn_per_period * spec.verification.periods + 1);
  const int nvars = spec.dimension - 1;
  StripRange r;
  bool first = true;
  const std::size_t n = grid.point_count();
  for (std::size_t i = 0; i < n; ++i) {
    const auto pt = grid.point(i);
    const double v = spec.source.evaluate(
        std::span<const double>(pt.data(), static_cast<std::size_t>(nvars)), pt.back());
    if (first || v < r.min) {
      r.min = v;
      r.argmin = pt;
    }
    if (first || v > r.max) {
      r.max = v;
      r.argmax = pt;
    }
    first = false;
  }
  return r;
}

bool all_coeffs_literal(const TrigSeries& g) {
  for (const auto& [m, coeff] : g.cos_coeffs)
    if (!coeff.simplified().literal_constant()) return false;
  for (const auto& [m, coeff] : g.sin_coeffs)
    if (!coeff.simplified().literal_constant()) return false;
  return true;
}

std::string witness_text(const std::vector<double>& p) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ")";
  return os.str();
}

Classification finish_unique(Classification out, const ProblemSpec& spec, TrigSeries payload,
                             const char* rule, const std::string& citation) {
  out.verification = verify_candidate(spec, payload, /*run_oracle=*/false);
  if (!out.verification->pass) {
    // A determined candidate that fails its own verification is never
    // reported as Unique.
    out.verdict = Verdict::Inconclusive;
    out.rule_id = rules::inconclusive;
    out.citation = "no classification rule applies at the available evidence level";
    out.obstructions.push_back(std::string("candidate from ") + rule +
                               " failed internal verification (residual sup " +
                               std::to_string(out.verification->residual_sup) + ")");
    return out;
  }
  out.verdict = Verdict::Unique;
  out.rule_id = rule;
  out.citation = citation;
  out.evidence.residual_sup = out.verification->residual_sup;
  out.evidence.scan = out.verification->scan;
  out.unique_solution = std::move(payload);
  return out;
}

}  // namespace

Classification classify(const ProblemSpec& spec_in) {
  ProblemSpec spec = spec_in;
  apply_default_verification(spec);

  auto findings = validate_spec(spec);
  if (has_fatal(findings)) {
    const std::string message = "problem spec is not admissible: " + findings.front().message;
    throw ClassificationError(message, std::move(findings));
  }

  Classification out;
  Evidence& ev = out.evidence;
  for (const auto& f : findings) ev.notes.push_back("finding [" + f.code + "]: " + f.message);

  const TrigSeries& g = spec.source;
  const GridSpec grid = spec.xprime_grid_capped(spec.verification.grid, 66049);
  const double tau = spec.tol.zero;
  const int N = spec.dimension;

  const bool asserted = spec.assume_passo_base;
  const bool identity_A = spec.diffusion.literal_identity();
  const bool liouville_ok = N <= 3 || (asserted && identity_A);
  if (asserted)
    ev.notes.push_back("zero traces u(.,2pi) = 0 and u_N(.,0) = 0 asserted by the caller");
  if (N >= 4 && asserted && !identity_A)
    out.obstructions.push_back(
        "dimension >= 4 with variable coefficients: mode-1 constancy is unavailable even under "
        "the zero-trace assertion");

  ev.c0 = sign_profile(effective_cos_coeff(g, 0), grid, tau);
  ev.c1 = sign_profile(effective_cos_coeff(g, 1), grid, tau);
  ev.d1 = sign_profile(effective_sin_coeff(g, 1), grid, tau);

  const bool only_c0 = !g.has_affine() && g.sin_coeffs.empty() &&
                       (g.cos_coeffs.empty() ||
                        (g.cos_coeffs.size() == 1 && g.cos_coeffs.begin()->first == 0));
  const bool c0_constant = ev.c0->max - ev.c0->min <= tau;

  if (liouville_ok && only_c0 && c0_constant) {
    // Constant source alternative.
    const auto lit = g.cos_coeff(0).simplified().literal_constant();
    const double theta = 0.5 * (lit ? *lit : 0.5 * (ev.c0->min + ev.c0->max));
    if (!lit) ev.notes.push_back("c0 is constant at sampling tolerance; using the sampled value");
    std::ostringstream cite;
    if (theta >= -tau) {
      cite << "constant source theta = " << theta
           << " >= 0: the unique strip-bounded nonnegative solution is theta*(1 - cos(xN))";
      TrigSeries payload;
      payload.set_cos(0, Expr::constant(2.0 * theta));
      payload.set_cos(1, Expr::constant(-theta));
      return finish_unique(std::move(out), spec, std::move(payload), rules::theta_nonneg,
                           cite.str());
    }
    cite << "constant source theta = " << theta
         << " < 0: no strip-bounded nonnegative solution exists";
    out.verdict = Verdict::NonExistence;
    out.rule_id = rules::theta_neg;
    out.citation = cite.str();
    ev.notes.push_back("the forced candidate theta*(1 - cos(xN)) is negative for theta < 0");
    return out;
  }

  if (liouville_ok && only_c0 && !c0_constant) {
    out.verdict = Verdict::NonExistence;
    out.rule_id = rules::g_xprime;
    out.citation =
        "a source depending on x' only must be constant for a strip-bounded nonnegative "
        "solution to exist";
    ev.notes.push_back("c0 varies from " + std::to_string(ev.c0->min) + " at " +
                       witness_text(ev.c0->argmin) + " to " + std::to_string(ev.c0->max) +
                       " at " + witness_text(ev.c0->argmax));
    return out;
  }

  // Trace discharge, ordered d1 then c1.
  DischargeResult discharge =
      discharge_traces(build_system(spec, std::max(1, g.max_mode())), spec);
  ev.traces = discharge.traces;
  if (discharge.d1) ev.d1 = discharge.d1;
  if (discharge.c1) ev.c1 = discharge.c1;
  for (const auto& obs : discharge.obstructions) out.obstructions.push_back(obs);

  if (liouville_ok && discharge.nonexistence) {
    out.verdict = Verdict::NonExistence;
    out.rule_id = discharge.rule_id;
    out.citation = discharge.rule_id == std::string(rules::d1_pos)
                       ? "d1 >= 0 with d1 not identically zero rules out strip-bounded "
                         "nonnegative solutions"
                       : "d1 = 0 and c1 >= 0 with c1 not identically zero rule out "
                         "strip-bounded nonnegative solutions";
    ev.notes.push_back(discharge.detail);
    return out;
  }

  // Maximum-principle certificate: a nonpositive non-constant source forces
  // strict positivity, contradicting the zero trace at xN = 2pi that a
  // nonnegative d1 provides.
  if (liouville_ok && (asserted || (ev.d1 && ev.d1->identically_zero))) {
    const StripRange gr = sample_source_on_strip(spec);
    if (gr.max <= tau && gr.max - gr.min > tau) {
      out.verdict = Verdict::NonExistence;
      out.rule_id = rules::max_principle;
      out.citation =
          "a nonpositive, non-constant source forces any nonnegative solution to be strictly "
          "positive, contradicting the zero trace at xN = 2pi required by d1 >= 0";
      ev.notes.push_back("sampled source maximum " + std::to_string(gr.max) + " at " +
                         witness_text(gr.argmax) + ", minimum " + std::to_string(gr.min) +
                         " at " + witness_text(gr.argmin));
      return out;
    }
  }

  const bool traces_ok = discharge.traces.all();

  // xN-only source with c1 = d1 = 0: the unique 1-D candidate decides.
  if (liouville_ok && traces_ok && !g.has_affine() && all_coeffs_literal(g) &&
      g.cos_coeff(1).simplified().is_literal_zero() &&
      g.sin_coeff(1).simplified().is_literal_zero()) {
    TrigSeries candidate = construct_series_1d(g);
    const ScanResult scan = nonnegativity_scan(candidate, spec);
    if (scan.min_value >= -tau) {
      return finish_unique(std::move(out), spec, std::move(candidate), rules::series_1d,
                           "xN-only source with c1 = d1 = 0: any strip-bounded nonnegative "
                           "solution equals the unique 1-D series candidate");
    }
    out.verdict = Verdict::NonExistence;
    out.rule_id = rules::series_1d;
    out.citation =
        "xN-only source with c1 = d1 = 0: the forced 1-D candidate takes negative values, so "
        "no strip-bounded nonnegative solution exists";
    ev.scan = scan;
    ev.notes.push_back("forced candidate " + candidate.to_string() + " reaches " +
                       std::to_string(scan.min_value) + " at " + witness_text(scan.min_point));
    return out;
  }

  // Lone-mode patterns with a non-constant coefficient.
  if (N <= 3 && traces_ok && !g.has_affine()) {
    struct Slot {
      int mode;
      bool is_cos;
      const Expr* coeff;
    };
    std::vector<Slot> slots;
    for (const auto& [m, coeff] : g.cos_coeffs) slots.push_back({m, true, &coeff});
    for (const auto& [m, coeff] : g.sin_coeffs)
      if (m >= 2) slots.push_back({m, false, &coeff});
    auto nonconstant = [&](const Expr& e) {
      const SignProfile p = sign_profile(e, grid, tau);
      return p.max - p.min > tau;
    };

    if (slots.size() == 1 && slots[0].mode >= 2 && nonconstant(*slots[0].coeff)) {
      out.verdict = Verdict::NonExistence;
      out.rule_id = rules::teo10;
      out.citation =
          "a single-mode source f(x')*cos(m xN) or f(x')*sin(m xN) with m >= 2 and f not "
          "identically zero admits no strip-bounded nonnegative solution";
      ev.notes.push_back(std::string(slots[0].is_cos ? "cosine" : "sine") + " coefficient of mode " +
                         std::to_string(slots[0].mode) + " is non-constant on the sampled grid");
      return out;
    }

    int sin_count = 0, cos_count = 0;
    const Slot* lone_sin = nullptr;
    const Slot* lone_cos = nullptr;
    for (const auto& s : slots) {
      if (s.is_cos) {
        ++cos_count;
        lone_cos = &s;
      } else {
        ++sin_count;
        lone_sin = &s;
      }
    }
    const bool form_a = sin_count == 1 && lone_sin->mode >= 2 && nonconstant(*lone_sin->coeff);
    const bool form_b = cos_count == 1 && lone_cos->mode != 1 && nonconstant(*lone_cos->coeff);
    if (form_a || form_b) {
      const Slot* lone = form_a ? lone_sin : lone_cos;
      out.verdict = Verdict::NonExistence;
      out.rule_id = rules::teo11;
      out.citation =
          "a lone sine (resp. cosine) mode with non-constant coefficient alongside an arbitrary "
          "cosine (resp. sine) group admits no strip-bounded nonnegative solution";
      ev.notes.push_back(std::string(lone->is_cos ? "cosine" : "sine") + " coefficient of mode " +
                         std::to_string(lone->mode) +
                         " is non-constant and alone in its group on the sampled grid");
      return out;
    }
  }

  // Iterative elimination for general finite-mode sources.
  if (liouville_ok && traces_ok && !g.has_affine()) {
    bool supported = true;
    try {
      EliminationState state = make_elimination_state(spec);
      eliminate_cos_chain(state);
      eliminate_sin_chain(state);
      const ParameterResult params = determine_parameters(state, spec);

      if (params.status == ParameterResult::Status::inconsistent) {
        out.verdict = Verdict::NonExistence;
        out.rule_id = rules::elimination;
        out.citation =
            "back-substituting the eliminated coefficients leaves a residual no parameter choice "
            "can cancel: the expansion admits no solution";
        ev.notes.push_back("inconsistency certificate: " + params.detail + " at " +
                           witness_text(params.witness_point));
        return out;
      }
      if (params.status == ParameterResult::Status::determined) {
        TrigSeries candidate = assemble_candidate(state, params.a1, params.b1);
        const ScanResult scan = nonnegativity_scan(candidate, spec);
        std::ostringstream cite;
        cite << "iterative elimination determines every coefficient; the PDE fixes a1 = "
             << params.a1 << " and b1 = " << params.b1;
        if (scan.min_value >= -tau) {
          ev.notes.push_back("elimination rounds: cos " + std::to_string(state.cos_rounds) +
                             ", sin " + std::to_string(state.sin_rounds));
          return finish_unique(std::move(out), spec, std::move(candidate), rules::elimination,
                               cite.str());
        }
        out.verdict = Verdict::NonExistence;
        out.rule_id = rules::elimination;
        out.citation = cite.str() + "; the forced candidate takes negative values";
        ev.scan = scan;
        ev.notes.push_back("forced candidate reaches " + std::to_string(scan.min_value) +
                           " at " + witness_text(scan.min_point));
        return out;
      }
      // Free parameter after re-testing: a one-parameter family.
      if (params.a1_free != params.b1_free) {
        TrigSeries base = assemble_candidate(state, params.a1_free ? 0.0 : params.a1,
                                             params.b1_free ? 0.0 : params.b1);
        TrigSeries direction;
        if (params.a1_free) {
          for (const auto& [m, pc] : state.cos_substitutions)
            direction.set_cos(m, Expr::constant(pc.slope));
          direction.set_cos(1, Expr::constant(1.0));
        } else {
          for (const auto& [m, pc] : state.sin_substitutions)
            direction.set_sin(m, Expr::constant(pc.slope));
          direction.set_sin(1, Expr::constant(1.0));
        }
        FamilySolution fam;
        fam.base = std::move(base);
        fam.direction = std::move(direction);
        fam.param_lo = -1.0;
        fam.param_hi = 1.0;
        out.verdict = Verdict::Family;
        out.rule_id = rules::elimination;
        out.citation =
            "elimination leaves one parameter undetermined: a one-parameter family of candidates "
            "solves the equation";
        out.family = std::move(fam);
        out.verification = verify_candidate(spec, out.family->base, false);
        return out;
      }
      out.obstructions.push_back("elimination left two free parameters; outside the classified cases");
      supported = false;
    } catch (const UnsupportedElimination& e) {
      out.obstructions.push_back(std::string("elimination unavailable: ") + e.what());
      supported = false;
    } catch (const std::invalid_argument& e) {
      out.obstructions.push_back(std::string("elimination preconditions not met: ") + e.what());
      supported = false;
    }
    (void)supported;
  }

  // Known family: g = lambda * xN.
  if (g.has_affine() && g.trig_empty()) {
    const auto lam = g.affine_xn->simplified().literal_constant();
    if (lam && *lam > tau) {
      const double lambda = *lam;
      FamilySolution fam;
      fam.base.set_affine(Expr::constant(lambda));
      fam.direction.set_sin(1, Expr::constant(1.0));
      fam.param_lo = -lambda;
      fam.param_hi = lambda;

      // Verified range endpoints, then the widest sampled-nonnegative interval.
      auto member = [&](double A) {
        return add_series(fam.base, scale_series(fam.direction, A));
      };
      bool members_ok = true;
      for (double A : {-lambda, 0.0, lambda}) {
        const TrigSeries u = member(A);
        if (residual(u, spec).sup > spec.tol.res ||
            nonnegativity_scan(u, spec).min_value < -tau)
          members_ok = false;
      }
      if (members_ok) {
        const double step = lambda / 20.0;
        double lo = 0.0;
        while (lo - step >= -3.0 * lambda &&
               nonnegativity_scan(member(lo - step), spec).min_value >= -tau)
          lo -= step;
        double hi = 0.0;
        while (hi + step <= 6.0 * lambda &&
               nonnegativity_scan(member(hi + step), spec).min_value >= -tau)
          hi += step;
        fam.sampled_lo = lo;
        fam.sampled_hi = hi;

        out.verdict = Verdict::Family;
        out.rule_id = rules::family_xn;
        out.citation = "the source lambda*xN admits the one-parameter family lambda*xN + "
                       "A*sin(xN); the guaranteed range is |A| <= lambda, exhaustiveness unknown";
        out.verification = verify_candidate(spec, member(lambda), false);
        ev.residual_sup = out.verification->residual_sup;
        ev.notes.push_back("residual is identically zero for every sampled parameter value");
        ev.notes.push_back("widest sampled-nonnegative parameter interval: [" +
                           std::to_string(lo) + ", " + std::to_string(hi) + "]");
        out.family = std::move(fam);
        return out;
      }
      out.obstructions.push_back("affine family candidates failed verification");
    } else if (lam && *lam < -tau) {
      out.obstructions.push_back(
          "negative affine slope: no nonnegative member of the known family exists");
    } else if (!lam) {
      out.obstructions.push_back("affine coefficient is not a recognized constant");
    }
  } else if (g.has_affine()) {
    out.obstructions.push_back(
        "source mixes an affine part with trigonometric modes; outside the classified cases");
  }

  if (!liouville_ok)
    out.obstructions.push_back(
        "dimension >= 4: classification needs the zero-trace assertion and identity diffusion");

  out.verdict = Verdict::Inconclusive;
  out.rule_id = rules::inconclusive;
  out.citation = "no classification rule applies at the available evidence level";
  if (out.obstructions.empty())
    out.obstructions.push_back("undischarged boundary traces or unclassified source shape");
  ev.notes.push_back(
      "coefficient sign profiles for c1 and d1 are attached; the audit command checks any "
      "candidate field against the necessary sine-coefficient conditions");
  return out;
}

}  // namespace halfspace
