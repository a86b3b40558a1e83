// Acceptance suite: one pass/fail line per criterion. Every tolerance is
// pinned here, in code. Exit status is nonzero when any criterion fails.

#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "halfspace/classifier.hpp"
#include "halfspace/elimination.hpp"
#include "halfspace/report_io.hpp"
#include "halfspace/verifier.hpp"

using namespace halfspace;

namespace {

int criteria_failed = 0;

void criterion(int number, const std::string& description, const std::function<bool()>& body) {
  bool ok = false;
  std::string error;
  try {
    ok = body();
  } catch (const std::exception& e) {
    error = e.what();
  }
  std::printf("criterion %2d: %s  %s%s\n", number, ok ? "PASS" : "FAIL", description.c_str(),
              error.empty() ? "" : ("  [" + error + "]").c_str());
  std::fflush(stdout);
  if (!ok) ++criteria_failed;
}

ProblemSpec spec_for(TrigSeries g, int dimension = 2) {
  ProblemSpec spec;
  spec.dimension = dimension;
  spec.diffusion = DiffusionMatrix::identity(dimension - 1);
  spec.source = std::move(g);
  apply_default_verification(spec);
  return spec;
}

TrigSeries constant_source(double theta) {
  TrigSeries g;
  g.set_cos(0, Expr::constant(2.0 * theta));
  return g;
}

TrigSeries arctan_source() {
  TrigSeries g;
  g.set_cos(0, parse_expr("4/(1+x1^2)^2 - 8*x1/(1+x1^2)^2*atan(x1) + 2*atan(x1)^2", 1));
  g.set_cos(2, parse_expr("-2/(1+x1^2)^2 + 4*x1/(1+x1^2)^2*atan(x1) + 3*atan(x1)^2", 1));
  return g;
}

double coeff(const TrigSeries& s, int m, bool cosine) {
  const std::vector<double> xp(4, 0.0);
  const std::span<const double> pt(xp.data(), 3);
  return cosine ? s.cos_coeff(m).eval(pt) : s.sin_coeff(m).eval(pt);
}

// Sup of |payload - reference| over an (x' grid) x (xN grid) box.
double sup_difference(const TrigSeries& u, int nvars,
                      const std::function<double(double)>& reference, int xp_res, int xn_res) {
  GridSpec xp = GridSpec::uniform(Box::cube(nvars, -4.0, 4.0), xp_res);
  double sup = 0.0;
  for (std::size_t i = 0; i < xp.point_count(); ++i) {
    const auto pt = xp.point(i);
    for (int j = 0; j < xn_res; ++j) {
      const double xn = 4.0 * kPi * j / (xn_res - 1);
      sup = std::max(sup, std::abs(u.evaluate(pt, xn) - reference(xn)));
    }
  }
  return sup;
}

bool expect_rule(const TrigSeries& g, const char* rule, std::string& err) {
  const Classification c = classify(spec_for(g));
  if (c.verdict == Verdict::Unique) {
    err += std::string(" false Unique for rule ") + rule + ";";
    return false;
  }
  if (c.verdict != Verdict::NonExistence || c.rule_id != rule) {
    err += std::string(" expected ") + rule + " got " + c.rule_id + " (" +
           to_string(c.verdict) + ");";
    return false;
  }
  return true;
}

}  // namespace

int main() {
  std::printf("halfspace acceptance suite\n");

  criterion(1, "model problem: unique payload 1 - cos(xN) in N = 2 and N = 3", [] {
    const Classification c2 = classify(spec_for(constant_source(1.0), 2));
    if (c2.verdict != Verdict::Unique || c2.rule_id != rules::theta_nonneg) return false;
    const double sup2 = sup_difference(*c2.unique_solution, 1,
                                       [](double xn) { return 1.0 - std::cos(xn); }, 257, 257);
    if (sup2 > 1e-12) return false;

    const Classification c3 = classify(spec_for(constant_source(1.0), 3));
    if (c3.verdict != Verdict::Unique) return false;
    const double sup3 = sup_difference(*c3.unique_solution, 2,
                                       [](double xn) { return 1.0 - std::cos(xn); }, 65, 257);
    return sup3 <= 1e-12;
  });

  criterion(2, "divergence-form invariance: verdict and payload unchanged, residual <= 1e-10", [] {
    ProblemSpec s2 = spec_for(constant_source(1.0), 2);
    s2.diffusion = DiffusionMatrix::scalar(parse_expr("1 + 0.5*sin(x1)", 1));
    const Classification c2 = classify(s2);
    if (c2.verdict != Verdict::Unique) return false;
    if (coeff(*c2.unique_solution, 0, true) != 2.0) return false;
    if (coeff(*c2.unique_solution, 1, true) != -1.0) return false;
    if (residual(*c2.unique_solution, s2).sup > 1e-10) return false;

    ProblemSpec s3 = spec_for(constant_source(1.0), 3);
    s3.diffusion = DiffusionMatrix::from_entries(
        2, {Expr::constant(1.2), Expr::constant(0.0), Expr::constant(0.0), Expr::constant(0.8)});
    const Classification c3 = classify(s3);
    if (c3.verdict != Verdict::Unique) return false;
    if (coeff(*c3.unique_solution, 0, true) != 2.0) return false;
    if (coeff(*c3.unique_solution, 1, true) != -1.0) return false;
    return residual(*c3.unique_solution, s3).sup <= 1e-10;
  });

  criterion(3, "non-existence suite fires the expected rules with zero false Uniques", [] {
    std::string err;
    bool ok = true;

    ok &= expect_rule(constant_source(-0.5), rules::theta_neg, err);

    TrigSeries gx;
    gx.set_cos(0, parse_expr("2*atan(x1)", 1));
    ok &= expect_rule(gx, rules::g_xprime, err);

    TrigSeries gs;
    gs.set_sin(1, Expr::constant(1.0));
    ok &= expect_rule(gs, rules::d1_pos, err);

    TrigSeries gc;
    gc.set_cos(1, Expr::constant(1.0));
    ok &= expect_rule(gc, rules::c1_pos, err);

    TrigSeries g3c2;
    g3c2.set_cos(2, Expr::constant(3.0));
    ok &= expect_rule(g3c2, rules::series_1d, err);

    TrigSeries gs5;
    gs5.set_sin(5, Expr::constant(1.0));
    ok &= expect_rule(gs5, rules::series_1d, err);

    TrigSeries teo;
    teo.set_cos(2, parse_expr("sin(3*x1)", 1));
    ok &= expect_rule(teo, rules::teo10, err);

    TrigSeries mp;
    mp.set_cos(0, Expr::constant(-2.0));
    mp.set_cos(1, Expr::constant(-1.0));
    ok &= expect_rule(mp, rules::max_principle, err);

    if (!ok) std::printf("              %s\n", err.c_str());
    return ok;
  });

  criterion(4, "1-D series: g = 1/3 + cos(2 xN) gives exactly (1/3)(1 - cos(2 xN))", [] {
    TrigSeries g;
    g.set_cos(0, Expr::constant(2.0 / 3.0));
    g.set_cos(2, Expr::constant(1.0));
    const ProblemSpec spec = spec_for(g);
    const Classification c = classify(spec);
    if (c.verdict != Verdict::Unique || c.rule_id != rules::series_1d) return false;
    const TrigSeries& u = *c.unique_solution;
    if (coeff(u, 0, true) != 2.0 / 3.0) return false;
    if (coeff(u, 1, true) != 0.0) return false;
    if (coeff(u, 2, true) != -1.0 / 3.0) return false;
    return residual(u, spec).sup == 0.0;
  });

  criterion(5, "family g = xN: residual 0 at A in {-1,0,1}; scan rejects A = -1.5", [] {
    TrigSeries g;
    g.set_affine(Expr::constant(1.0));
    const ProblemSpec spec = spec_for(g);
    const Classification c = classify(spec);
    if (c.verdict != Verdict::Family || c.rule_id != rules::family_xn) return false;
    if (c.family->param_lo != -1.0 || c.family->param_hi != 1.0) return false;

    for (double A : {-1.0, 0.0, 1.0}) {
      const TrigSeries u = add_series(c.family->base, scale_series(c.family->direction, A));
      if (residual(u, spec).sup != 0.0) return false;
      if (nonnegativity_scan(u, spec).min_value < -spec.tol.zero) return false;
    }

    const TrigSeries bad = add_series(c.family->base, scale_series(c.family->direction, -1.5));
    const ScanResult scan = nonnegativity_scan(bad, spec);
    if (!scan.has_violation) return false;
    const double xn = scan.first_violation_point.back();
    const double val = scan.first_violation_value;
    return std::abs(xn - 0.1) <= 0.1 * 0.1 + 1e-12 + 0.01 &&  // xN near 0.1 (10%)
           std::abs(val - (-0.0497)) <= 0.1 * 0.0497;
  });

  criterion(6, "elimination worked example and the inconsistent variant", [] {
    const ProblemSpec spec = spec_for(arctan_source());
    EliminationState st = make_elimination_state(spec);
    eliminate_cos_chain(st);
    eliminate_sin_chain(st);

    const ParamCoefficient* a2 = nullptr;
    const ParamCoefficient* a0 = nullptr;
    for (const auto& [m, pc] : st.cos_substitutions) {
      if (m == 2) a2 = &pc;
      if (m == 0) a0 = &pc;
    }
    if (!a2 || !a0) return false;
    if (std::abs(a2->slope - (-0.25)) > 1e-14) return false;
    if (std::abs(a0->slope - (-1.5)) > 1e-14) return false;
    std::mt19937 rng(31415);
    std::uniform_real_distribution<double> xs(-4.0, 4.0);
    for (int i = 0; i < 20; ++i) {
      const double x = xs(rng);
      const double pt[1] = {x};
      const double at2 = std::pow(std::atan(x), 2);
      if (std::abs(a2->base.eval(pt) - (-at2)) > 1e-10) return false;
      if (std::abs(a0->base.eval(pt) - 2.0 * at2) > 1e-10) return false;
    }

    const ParameterResult params = determine_parameters(st, spec);
    if (params.status != ParameterResult::Status::determined) return false;
    if (std::abs(params.a1) > 1e-9 || std::abs(params.b1) > 1e-9) return false;
    const TrigSeries u = assemble_candidate(st, params.a1, params.b1);
    if (residual(u, spec).sup > 1e-9) return false;

    TrigSeries bad;
    bad.set_cos(0, parse_expr("2*cos(2*x1)", 1));
    bad.set_cos(2, parse_expr("sin(3*x1)", 1));
    const Classification c = classify(spec_for(bad));
    return c.verdict == Verdict::NonExistence && c.rule_id == rules::elimination;
  });

  criterion(7, "oracle convergence ratios in [3.2, 4.8] for the model and arctan payloads", [] {
    const double h1 = kTwoPi / 128.0, h2 = kTwoPi / 256.0;

    const ProblemSpec model = spec_for(constant_source(1.0));
    TrigSeries u;
    u.set_cos(0, Expr::constant(2.0));
    u.set_cos(1, Expr::constant(-1.0));
    const double e1 = oracle_solve(model, u, 4.0, h1).sup_error;
    const double e2 = oracle_solve(model, u, 4.0, h2).sup_error;
    const double r_model = e1 / e2;
    if (r_model < 3.2 || r_model > 4.8) return false;

    const ProblemSpec at = spec_for(arctan_source());
    const Classification c = classify(at);
    if (c.verdict != Verdict::Unique) return false;
    const double a1 = oracle_solve(at, *c.unique_solution, 4.0, h1).sup_error;
    const double a2 = oracle_solve(at, *c.unique_solution, 4.0, h2).sup_error;
    const double r_at = a1 / a2;
    return r_at >= 3.2 && r_at <= 4.8;
  });

  criterion(8, "fourier engine: degree-8 round-trip <= 1e-12 at Q = 64; Parseval <= 1e-10", [] {
    std::mt19937 rng(8899);
    std::uniform_real_distribution<double> cdist(-2.0, 2.0);
    TrigSeries s;
    for (int m = 0; m <= 8; ++m) s.set_cos(m, Expr::constant(cdist(rng)));
    for (int m = 1; m <= 8; ++m) s.set_sin(m, Expr::constant(cdist(rng)));
    const StripSampler f = [&s](std::span<const double> xp, double xn) {
      return s.evaluate(xp, xn);
    };
    const std::vector<std::vector<double>> pts = {{0.0}};
    const std::vector<double> xp;
    for (int m = 0; m <= 8; ++m) {
      const double got = analyze_mode(f, m, TrigKind::cosine, pts, 64).values[0];
      if (std::abs(got - s.cos_coeff(m).eval(xp)) > 1e-12) return false;
      if (m >= 1) {
        const double gs = analyze_mode(f, m, TrigKind::sine, pts, 64).values[0];
        if (std::abs(gs - s.sin_coeff(m).eval(xp)) > 1e-12) return false;
      }
    }
    const StripSampler f2 = [&f](std::span<const double> x, double xn) {
      const double v = f(x, xn);
      return v * v;
    };
    double sum = 0.5 * std::pow(s.cos_coeff(0).eval(xp), 2);
    for (int m = 1; m <= 8; ++m)
      sum += std::pow(s.cos_coeff(m).eval(xp), 2) + std::pow(s.sin_coeff(m).eval(xp), 2);
    const double integral = analyze_mode(f2, 0, TrigKind::cosine, pts, 128).values[0];
    return std::abs(integral - sum) <= 1e-10;
  });

  criterion(9, "energy machinery: cutoff stability, caccioppoli, doubling", [] {
    double first = 0.0;
    for (double R : {1.0, 2.0, 4.0, 8.0}) {
      const double c = cutoff_profile(R).gradient_bound_constant;
      if (first == 0.0)
        first = c;
      else if (std::abs(c - first) / first >= 0.05)
        return false;
    }

    const Expr cosh3 =
        parse_expr("(exp(1.7320508075688772*x1) + exp(-1.7320508075688772*x1))/2", 1);
    const auto cac = caccioppoli_check(cosh3, 3.0, {1.0, 2.0, 4.0});
    if (!cac.hypothesis_met || !cac.all_hold) return false;

    DoublingWitness power;
    power.R0 = 1.0;
    power.theta = 0.2;
    power.gamma = 2.0;
    power.C = 5.0;
    for (double R : {1.0, 2.0, 4.0, 8.0}) power.samples.push_back({R, R * R});
    if (doubling_check(power).vanishes) return false;
    if (doubling_check(power).failed_premise != "I(R) <= theta * I(2R) fails") return false;

    DoublingWitness zero = power;
    zero.samples.clear();
    for (double R : {1.0, 2.0, 4.0, 8.0}) zero.samples.push_back({R, 0.0});
    const auto z = doubling_check(zero);
    return z.vanishes && z.k == 0;
  });

  criterion(10, "linearity: 2*(g=1) + 3*(g=1/3+cos 2xN) solves to 2u1 + 3u2 exactly", [] {
    TrigSeries g2;
    g2.set_cos(0, Expr::constant(2.0 / 3.0));
    g2.set_cos(2, Expr::constant(1.0));
    const Classification c1 = classify(spec_for(constant_source(1.0)));
    const Classification c2 = classify(spec_for(g2));
    if (c1.verdict != Verdict::Unique || c2.verdict != Verdict::Unique) return false;

    const TrigSeries combined_g =
        add_series(scale_series(constant_source(1.0), 2.0), scale_series(g2, 3.0));
    const Classification cc = classify(spec_for(combined_g));
    if (cc.verdict != Verdict::Unique) return false;

    const TrigSeries expected =
        add_series(scale_series(*c1.unique_solution, 2.0), scale_series(*c2.unique_solution, 3.0));
    for (int m = 0; m <= 2; ++m) {
      if (std::abs(coeff(*cc.unique_solution, m, true) - coeff(expected, m, true)) > 1e-12)
        return false;
      if (m >= 1 &&
          std::abs(coeff(*cc.unique_solution, m, false) - coeff(expected, m, false)) > 1e-12)
        return false;
    }
    return true;
  });

  if (criteria_failed) {
    std::printf("%d criterion(s) FAILED\n", criteria_failed);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
