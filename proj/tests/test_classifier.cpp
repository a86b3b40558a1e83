#include <cmath>

#include "doctest.h"
#include "halfspace/classifier.hpp"

using namespace halfspace;

namespace {

ProblemSpec spec_for(TrigSeries g, int dimension = 2) {
  ProblemSpec spec;
  spec.dimension = dimension;
  spec.diffusion = DiffusionMatrix::identity(dimension - 1);
  spec.source = std::move(g);
  spec.verification.grid = 65;
  apply_default_verification(spec);
  return spec;
}

TrigSeries constant_source(double theta) {
  TrigSeries g;
  g.set_cos(0, Expr::constant(2.0 * theta));
  return g;
}

double coeff(const TrigSeries& s, int m, bool cosine) {
  const std::vector<double> xp = {0.0};
  return cosine ? s.cos_coeff(m).eval(xp) : s.sin_coeff(m).eval(xp);
}

}  // namespace

TEST_SUITE_BEGIN("classifier");

TEST_CASE("construct_series_1d: documented cases") {
  // g = 1 gives 1 - cos xN.
  const TrigSeries u1 = construct_series_1d(constant_source(1.0));
  CHECK(coeff(u1, 0, true) == 2.0);
  CHECK(coeff(u1, 1, true) == -1.0);
  CHECK(u1.sin_coeffs.empty());

  // g = 1/3 + cos 2xN gives (1/3)(1 - cos 2xN).
  TrigSeries g2;
  g2.set_cos(0, Expr::constant(2.0 / 3.0));
  g2.set_cos(2, Expr::constant(1.0));
  const TrigSeries u2 = construct_series_1d(g2);
  CHECK(coeff(u2, 0, true) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(coeff(u2, 1, true) == 0.0);
  CHECK(coeff(u2, 2, true) == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));

  // g = sin 2xN gives (2 sin xN - sin 2xN)/3, which dips negative.
  TrigSeries g3;
  g3.set_sin(2, Expr::constant(1.0));
  const TrigSeries u3 = construct_series_1d(g3);
  CHECK(coeff(u3, 1, false) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(coeff(u3, 2, false) == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("construct_series_1d satisfies both boundary conditions identically") {
  TrigSeries g;
  g.set_cos(0, Expr::constant(1.4));
  g.set_cos(3, Expr::constant(-0.6));
  g.set_sin(2, Expr::constant(0.8));
  g.set_sin(5, Expr::constant(-0.3));
  const TrigSeries u = construct_series_1d(g);
  const TrigSeries du = u.derivative_xn(1);
  const std::vector<double> xp = {0.0};
  CHECK(std::abs(u.evaluate(xp, 0.0)) <= 1e-14);
  CHECK(std::abs(u.evaluate(xp, kTwoPi)) <= 1e-13);
  CHECK(std::abs(du.evaluate(xp, 0.0)) <= 1e-14);
  CHECK(std::abs(du.evaluate(xp, kTwoPi)) <= 1e-13);
}

TEST_CASE("construct_series_1d contract violations") {
  TrigSeries bad;
  bad.set_sin(1, Expr::constant(1.0));
  CHECK_THROWS_AS(construct_series_1d(bad), std::invalid_argument);
  TrigSeries nonconst;
  nonconst.set_cos(0, parse_expr("x1", 1));
  CHECK_THROWS_AS(construct_series_1d(nonconst), std::invalid_argument);
}

TEST_CASE("theta = 1: Unique with payload 1 - cos xN") {
  const Classification c = classify(spec_for(constant_source(1.0)));
  REQUIRE(c.verdict == Verdict::Unique);
  CHECK(c.rule_id == rules::theta_nonneg);
  REQUIRE(c.unique_solution.has_value());
  CHECK(coeff(*c.unique_solution, 0, true) == 2.0);
  CHECK(coeff(*c.unique_solution, 1, true) == -1.0);
  REQUIRE(c.verification.has_value());
  CHECK(c.verification->pass);
  CHECK(c.verification->residual_sup == 0.0);
}

TEST_CASE("theta = -0.5: NonExistence") {
  const Classification c = classify(spec_for(constant_source(-0.5)));
  CHECK(c.verdict == Verdict::NonExistence);
  CHECK(c.rule_id == rules::theta_neg);
}

TEST_CASE("theta = 0: Unique zero solution") {
  const Classification c = classify(spec_for(constant_source(0.0)));
  REQUIRE(c.verdict == Verdict::Unique);
  REQUIRE(c.unique_solution.has_value());
  CHECK(c.unique_solution->trig_empty());
}

TEST_CASE("g = atan(x1): NonExistence because g depends on x' and is not constant") {
  TrigSeries g;
  g.set_cos(0, parse_expr("2*atan(x1)", 1));
  const Classification c = classify(spec_for(g));
  CHECK(c.verdict == Verdict::NonExistence);
  CHECK(c.rule_id == rules::g_xprime);
}

TEST_CASE("g = sin xN and g = cos xN: sign obstructions at mode 1") {
  TrigSeries gs;
  gs.set_sin(1, Expr::constant(1.0));
  const Classification cs = classify(spec_for(gs));
  CHECK(cs.verdict == Verdict::NonExistence);
  CHECK(cs.rule_id == rules::d1_pos);

  TrigSeries gc;
  gc.set_cos(1, Expr::constant(1.0));
  const Classification cc = classify(spec_for(gc));
  CHECK(cc.verdict == Verdict::NonExistence);
  CHECK(cc.rule_id == rules::c1_pos);
}

TEST_CASE("g = -1 - cos xN: maximum-principle certificate") {
  TrigSeries g;
  g.set_cos(0, Expr::constant(-2.0));
  g.set_cos(1, Expr::constant(-1.0));
  const Classification c = classify(spec_for(g));
  CHECK(c.verdict == Verdict::NonExistence);
  CHECK(c.rule_id == rules::max_principle);
}

TEST_CASE("g = 1/3 + cos 2xN: Unique via the 1-D series") {
  TrigSeries g;
  g.set_cos(0, Expr::constant(2.0 / 3.0));
  g.set_cos(2, Expr::constant(1.0));
  const Classification c = classify(spec_for(g));
  REQUIRE(c.verdict == Verdict::Unique);
  CHECK(c.rule_id == rules::series_1d);
  REQUIRE(c.unique_solution.has_value());
  CHECK(coeff(*c.unique_solution, 0, true) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(coeff(*c.unique_solution, 2, true) == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
  CHECK(c.verification->residual_sup == 0.0);
}

TEST_CASE("g = 3 cos 2xN and g = sin 5xN: 1-D candidate negativity") {
  TrigSeries g1;
  g1.set_cos(2, Expr::constant(3.0));
  const Classification c1 = classify(spec_for(g1));
  CHECK(c1.verdict == Verdict::NonExistence);
  CHECK(c1.rule_id == rules::series_1d);
  REQUIRE(c1.evidence.scan.has_value());
  CHECK(c1.evidence.scan->min_value < -0.5);

  TrigSeries g2;
  g2.set_sin(5, Expr::constant(1.0));
  const Classification c2 = classify(spec_for(g2));
  CHECK(c2.verdict == Verdict::NonExistence);
  CHECK(c2.rule_id == rules::series_1d);
}

TEST_CASE("g = sin(3x1) cos(2xN): lone non-constant mode") {
  TrigSeries g;
  g.set_cos(2, parse_expr("sin(3*x1)", 1));
  const Classification c = classify(spec_for(g));
  CHECK(c.verdict == Verdict::NonExistence);
  CHECK(c.rule_id == rules::teo10);
}

TEST_CASE("lone non-constant coefficient inside a group: teo11 patterns") {
  // Form A: cosine group plus exactly one sine mode with non-constant d.
  TrigSeries ga;
  ga.set_cos(0, Expr::constant(2.0));
  ga.set_cos(2, Expr::constant(1.0));
  ga.set_sin(2, parse_expr("sin(3*x1)", 1));
  const Classification ca = classify(spec_for(ga));
  CHECK(ca.verdict == Verdict::NonExistence);
  CHECK(ca.rule_id == rules::teo11);

  // Form B with the zeroth cosine mode: c0 non-constant plus a sine mode.
  TrigSeries gb;
  gb.set_cos(0, parse_expr("2*atan(x1)", 1));
  gb.set_sin(2, Expr::constant(1.0));
  const Classification cb = classify(spec_for(gb));
  CHECK(cb.verdict == Verdict::NonExistence);
  CHECK(cb.rule_id == rules::teo11);
}

TEST_CASE("arctan worked example: Unique via elimination") {
  TrigSeries g;
  g.set_cos(0, parse_expr("4/(1+x1^2)^2 - 8*x1/(1+x1^2)^2*atan(x1) + 2*atan(x1)^2", 1));
  g.set_cos(2, parse_expr("-2/(1+x1^2)^2 + 4*x1/(1+x1^2)^2*atan(x1) + 3*atan(x1)^2", 1));
  const Classification c = classify(spec_for(g));
  REQUIRE(c.verdict == Verdict::Unique);
  CHECK(c.rule_id == rules::elimination);
  REQUIRE(c.unique_solution.has_value());
  for (double x : {-1.0, 0.0, 0.8}) {
    const std::vector<double> xp = {x};
    const double at2 = std::pow(std::atan(x), 2);
    CHECK(c.unique_solution->evaluate(xp, kPi / 2) ==
          doctest::Approx(at2 * 2.0).epsilon(1e-10));
  }
}

TEST_CASE("cos(2x) + sin(3x) cos(2y): inconsistency certificate via elimination") {
  TrigSeries g;
  g.set_cos(0, parse_expr("2*cos(2*x1)", 1));
  g.set_cos(2, parse_expr("sin(3*x1)", 1));
  const Classification c = classify(spec_for(g));
  CHECK(c.verdict == Verdict::NonExistence);
  CHECK(c.rule_id == rules::elimination);
  bool has_certificate = false;
  for (const auto& n : c.evidence.notes)
    has_certificate = has_certificate || n.find("inconsistency certificate") != std::string::npos;
  CHECK(has_certificate);
}

TEST_CASE("g = xN: the one-parameter family") {
  TrigSeries g;
  g.set_affine(Expr::constant(1.0));
  const Classification c = classify(spec_for(g));
  REQUIRE(c.verdict == Verdict::Family);
  CHECK(c.rule_id == rules::family_xn);
  REQUIRE(c.family.has_value());
  CHECK(c.family->param_lo == -1.0);
  CHECK(c.family->param_hi == 1.0);
  CHECK(c.family->completeness.find("unknown") != std::string::npos);
  // Sampled evidence widens the interval on the right (up to about 3pi/2).
  CHECK(c.family->sampled_lo == doctest::Approx(-1.0).epsilon(0.06));
  CHECK(c.family->sampled_hi > 1.5);
}

TEST_CASE("g = -xN: d1 = 2 > 0 rules it out") {
  TrigSeries g;
  g.set_affine(Expr::constant(-1.0));
  const Classification c = classify(spec_for(g));
  CHECK(c.verdict == Verdict::NonExistence);
  CHECK(c.rule_id == rules::d1_pos);
}

TEST_CASE("mixed affine and trig source is Inconclusive") {
  TrigSeries g;
  g.set_affine(Expr::constant(1.0));
  g.set_cos(2, Expr::constant(1.0));
  const Classification c = classify(spec_for(g));
  CHECK(c.verdict == Verdict::Inconclusive);
  CHECK_FALSE(c.obstructions.empty());
}

TEST_CASE("g = -sin xN: sign-indefinite pipeline ends Inconclusive") {
  TrigSeries g;
  g.set_sin(1, Expr::constant(-1.0));
  const Classification c = classify(spec_for(g));
  CHECK(c.verdict == Verdict::Inconclusive);
  bool d1_noted = false;
  for (const auto& o : c.obstructions) d1_noted = d1_noted || o.find("d1") != std::string::npos;
  CHECK(d1_noted);
}

TEST_CASE("verdict is invariant under admissible diffusion blocks") {
  TrigSeries g = constant_source(1.0);
  ProblemSpec identity = spec_for(g);
  ProblemSpec scalar = spec_for(g);
  scalar.diffusion = DiffusionMatrix::scalar(parse_expr("1 + 0.5*sin(x1)", 1));
  const Classification a = classify(identity);
  const Classification b = classify(scalar);
  REQUIRE(a.verdict == Verdict::Unique);
  REQUIRE(b.verdict == Verdict::Unique);
  CHECK(coeff(*a.unique_solution, 0, true) == coeff(*b.unique_solution, 0, true));
  CHECK(coeff(*a.unique_solution, 1, true) == coeff(*b.unique_solution, 1, true));
  CHECK(b.verification->residual_sup <= 1e-10);
}

TEST_CASE("scaling: classify(lambda g) scales the payload for lambda > 0") {
  const double lambda = 2.5;
  TrigSeries g;
  g.set_cos(0, Expr::constant(2.0 / 3.0));
  g.set_cos(2, Expr::constant(1.0));
  const Classification base = classify(spec_for(g));
  const Classification scaled = classify(spec_for(scale_series(g, lambda)));
  REQUIRE(base.verdict == Verdict::Unique);
  REQUIRE(scaled.verdict == Verdict::Unique);
  for (int m : {0, 1, 2})
    CHECK(coeff(*scaled.unique_solution, m, true) ==
          doctest::Approx(lambda * coeff(*base.unique_solution, m, true)).epsilon(1e-12));
}

TEST_CASE("non-elliptic spec aborts with the finding") {
  ProblemSpec spec = spec_for(constant_source(1.0));
  spec.diffusion = DiffusionMatrix::scalar(parse_expr("sin(x1)", 1));
  CHECK_THROWS_AS(classify(spec), ClassificationError);
}

TEST_CASE("N = 5 is Inconclusive without the zero-trace assertion") {
  const Classification c = classify(spec_for(constant_source(1.0), 5));
  CHECK(c.verdict == Verdict::Inconclusive);
  CHECK(c.rule_id == rules::inconclusive);
  CHECK_FALSE(c.obstructions.empty());
}

TEST_CASE("N = 5 with asserted zero traces recovers the model verdict") {
  ProblemSpec spec = spec_for(constant_source(1.0), 5);
  spec.assume_passo_base = true;
  spec.verification.grid = 9;  // keep the 4-variable grids small
  const Classification c = classify(spec);
  REQUIRE(c.verdict == Verdict::Unique);
  CHECK(c.rule_id == rules::theta_nonneg);
  CHECK(coeff(*c.unique_solution, 1, true) == -1.0);
  bool note_found = false;
  for (const auto& n : c.evidence.notes)
    note_found = note_found || n.find("asserted") != std::string::npos;
  CHECK(note_found);
}

TEST_CASE("N = 5 asserted but variable diffusion stays Inconclusive") {
  ProblemSpec spec = spec_for(constant_source(1.0), 5);
  spec.assume_passo_base = true;
  spec.verification.grid = 5;
  std::vector<Expr> entries;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      entries.push_back(i == j ? parse_expr("1 + 0.1*sin(x1)", 4) : Expr::constant(0.0));
  spec.diffusion = DiffusionMatrix::from_entries(4, std::move(entries));
  const Classification c = classify(spec);
  CHECK(c.verdict == Verdict::Inconclusive);
}

TEST_CASE("every NonExistence verdict carries evidence") {
  std::vector<TrigSeries> sources;
  sources.push_back(constant_source(-0.5));
  {
    TrigSeries g;
    g.set_sin(1, Expr::constant(1.0));
    sources.push_back(g);
  }
  {
    TrigSeries g;
    g.set_cos(2, parse_expr("sin(3*x1)", 1));
    sources.push_back(g);
  }
  for (const auto& g : sources) {
    const Classification c = classify(spec_for(g));
    REQUIRE(c.verdict == Verdict::NonExistence);
    CHECK((!c.evidence.notes.empty() || c.evidence.scan.has_value()));
  }
}

TEST_SUITE_END();
