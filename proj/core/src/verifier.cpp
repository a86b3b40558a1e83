#include "halfspace/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace halfspace {

namespace {

GridSpec strip_grid(const ProblemSpec& spec) {
  GridSpec xp = spec.xprime_grid_capped(spec.verification.grid, 66049);
  GridSpec g = xp;
  g.box.axes.push_back({0.0, kTwoPi * spec.verification.periods});
  g.resolution.push_back(spec.verification.xn_per_period * spec.verification.periods + 1);
  return g;
}

}  // namespace

ResidualReport residual(const TrigSeries& u, const ProblemSpec& spec) {
  const TrigSeries& g = spec.source;
  ResidualReport report;

  const int max_mode = std::max(u.max_mode(), g.max_mode());
  for (int m = 0; m <= max_mode; ++m) {
    const Expr a = u.cos_coeff(m);
    const Expr lambda = Expr::constant(static_cast<double>(m) * m - 1.0);
    const Expr r = (Expr::constant(-1.0) * apply_div_form(spec.diffusion, a) + lambda * a +
                    g.cos_coeff(m))
                       .simplified();
    report.residual.set_cos(m, r);
    if (m >= 1) {
      const Expr b = u.sin_coeff(m);
      const Expr rs = (Expr::constant(-1.0) * apply_div_form(spec.diffusion, b) + lambda * b +
                       g.sin_coeff(m))
                          .simplified();
      report.residual.set_sin(m, rs);
    }
  }
  {
    const Expr pu = u.affine_xn ? *u.affine_xn : Expr::constant(0.0);
    const Expr pg = g.affine_xn ? *g.affine_xn : Expr::constant(0.0);
    const Expr ra = (Expr::constant(-1.0) * apply_div_form(spec.diffusion, pu) -
                     pu + pg)
                        .simplified();
    report.residual.set_affine(ra);
  }

  if (report.residual.trig_empty() && !report.residual.has_affine()) {
    report.sup = 0.0;
    report.witness.assign(static_cast<std::size_t>(spec.dimension), 0.0);
    return report;
  }

  const GridSpec grid = strip_grid(spec);
  const std::size_t n = grid.point_count();
  const int nvars = spec.dimension - 1;

  struct Worst {
    double sup = -1.0;
    std::size_t index = 0;
  };
  const std::size_t chunks = std::max<std::size_t>(parallel_chunk_count(n), 1);
  std::vector<Worst> partial(chunks);
  parallel_for_chunked(n, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    Worst w;
    std::vector<double> pt;
    std::vector<int> idx;
    for (std::size_t i = begin; i < end; ++i) {
      grid.decompose(i, idx);
      pt.resize(static_cast<std::size_t>(grid.dim()));
      for (int a = 0; a < grid.dim(); ++a)
        pt[static_cast<std::size_t>(a)] = grid.coord(a, idx[static_cast<std::size_t>(a)]);
      const double xn = pt.back();
      const double v = std::abs(report.residual.evaluate(
          std::span<const double>(pt.data(), static_cast<std::size_t>(nvars)), xn));
      if (v > w.sup || (v == w.sup && i < w.index)) {
        w.sup = v;
        w.index = i;
      }
    }
    partial[chunk] = w;
  });
  Worst total = partial[0];
  for (const auto& w : partial)
    if (w.sup > total.sup || (w.sup == total.sup && w.index < total.index)) total = w;
  report.sup = std::max(total.sup, 0.0);
  report.witness = grid.point(total.index);
  return report;
}

ScanResult nonnegativity_scan(const TrigSeries& u, const ProblemSpec& spec) {
  const GridSpec grid = strip_grid(spec);
  const std::size_t n = grid.point_count();
  const int nvars = spec.dimension - 1;
  const double tau = spec.tol.zero;

  struct Acc {
    double min = std::numeric_limits<double>::infinity();
    std::size_t imin = 0;
    std::size_t first_violation = std::numeric_limits<std::size_t>::max();
    double violation_value = 0.0;
  };
  const std::size_t chunks = std::max<std::size_t>(parallel_chunk_count(n), 1);
  std::vector<Acc> partial(chunks);
  parallel_for_chunked(n, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    Acc acc;
    std::vector<double> pt;
    std::vector<int> idx;
    for (std::size_t i = begin; i < end; ++i) {
      grid.decompose(i, idx);
      pt.resize(static_cast<std::size_t>(grid.dim()));
      for (int a = 0; a < grid.dim(); ++a)
        pt[static_cast<std::size_t>(a)] = grid.coord(a, idx[static_cast<std::size_t>(a)]);
      const double v = u.evaluate(
          std::span<const double>(pt.data(), static_cast<std::size_t>(nvars)), pt.back());
      if (v < acc.min || (v == acc.min && i < acc.imin)) {
        acc.min = v;
        acc.imin = i;
      }
      if (v < -tau && i < acc.first_violation) {
        acc.first_violation = i;
        acc.violation_value = v;
      }
    }
    partial[chunk] = acc;
  });

  Acc total = partial[0];
  for (const auto& acc : partial) {
    if (acc.min < total.min || (acc.min == total.min && acc.imin < total.imin)) {
      total.min = acc.min;
      total.imin = acc.imin;
    }
    if (acc.first_violation < total.first_violation) {
      total.first_violation = acc.first_violation;
      total.violation_value = acc.violation_value;
    }
  }

  ScanResult out;
  out.min_value = total.min;
  out.min_point = grid.point(total.imin);
  out.has_violation = total.first_violation != std::numeric_limits<std::size_t>::max();
  if (out.has_violation) {
    out.first_violation_point = grid.point(total.first_violation);
    out.first_violation_value = total.violation_value;
  }
  return out;
}

TraceReport trace_check(const TrigSeries& u, const ProblemSpec& spec) {
  const GridSpec grid = spec.xprime_grid_capped(spec.verification.grid, 66049);
  const TrigSeries du = u.derivative_xn(1);
  TraceReport rep;
  const std::size_t n = grid.point_count();
  for (std::size_t i = 0; i < n; ++i) {
    const auto pt = grid.point(i);
    rep.u_0_sup = std::max(rep.u_0_sup, std::abs(u.evaluate(pt, 0.0)));
    rep.uN_0_sup = std::max(rep.uN_0_sup, std::abs(du.evaluate(pt, 0.0)));
    rep.u_2pi_sup = std::max(rep.u_2pi_sup, std::abs(u.evaluate(pt, kTwoPi)));
    rep.uN_2pi_sup = std::max(rep.uN_2pi_sup, std::abs(du.evaluate(pt, kTwoPi)));
  }
  return rep;
}

// ---- cutoff and energy machinery ----

namespace {

double bridge(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

double bridge_derivative(double s) {
  return s > 0.0 ? std::exp(-1.0 / s) / (s * s) : 0.0;
}

}  // namespace

double cutoff_value(double t) {
  if (t <= 1.0) return 1.0;
  if (t >= 2.0) return 0.0;
  const double p = bridge(2.0 - t);
  const double q = bridge(t - 1.0);
  return p / (p + q);
}

double cutoff_derivative(double t) {
  if (t <= 1.0 || t >= 2.0) return 0.0;
  const double p = bridge(2.0 - t);
  const double q = bridge(t - 1.0);
  const double dp = -bridge_derivative(2.0 - t);
  const double dq = bridge_derivative(t - 1.0);
  const double denom = (p + q) * (p + q);
  return (dp * q - p * dq) / denom;
}

CutoffProfile cutoff_profile(double R, int points_per_unit) {
  if (R <= 0) throw std::invalid_argument("cutoff radius must be positive");
  if (points_per_unit < 8) throw std::invalid_argument("cutoff profile needs >= 8 points per unit");
  CutoffProfile prof;
  prof.radius = R;
  const double extent = 2.0 * R;
  const int n = static_cast<int>(std::ceil(extent * points_per_unit)) + 1;
  prof.points.resize(static_cast<std::size_t>(n));
  prof.phi.resize(static_cast<std::size_t>(n));
  prof.grad.resize(static_cast<std::size_t>(n));
  double sup = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = extent * i / (n - 1);
    const double t = x / R;
    prof.points[static_cast<std::size_t>(i)] = x;
    prof.phi[static_cast<std::size_t>(i)] = cutoff_value(t);
    const double g = std::abs(cutoff_derivative(t)) / R;
    prof.grad[static_cast<std::size_t>(i)] = g;
    sup = std::max(sup, g);
  }
  prof.gradient_bound_constant = sup * R;
  return prof;
}

namespace {

// Composite Simpson over [a, b]; resolution is forced to an even interval count.
double simpson(const std::function<double(double)>& f, double a, double b, int intervals) {
  if (intervals % 2 != 0) ++intervals;
  const double h = (b - a) / intervals;
  double acc = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) acc += f(a + h * i) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

int intervals_for(double a, double b, int per_unit) {
  const int n = static_cast<int>(std::ceil((b - a) * per_unit));
  return std::max(n + (n % 2), 64);
}

}  // namespace

CaccioppoliReport caccioppoli_check(const Expr& v, double lambda, const std::vector<double>& radii,
                                    double tau_zero) {
  if (lambda <= 0) throw std::invalid_argument("lambda must be positive");
  if (radii.empty()) throw std::invalid_argument("radius set must be nonempty");
  if (v.max_variable_index() > 0)
    throw std::invalid_argument("caccioppoli_check takes a one-variable expression");

  CaccioppoliReport rep;
  const double Rmax = *std::max_element(radii.begin(), radii.end());

  // Subsolution check -v'' + lambda v <= 0 on the sampled closure of B_{2Rmax},
  // with a scale-aware tolerance.
  const Expr vpp = v.derivative(0).derivative(0).simplified();
  const int samples = 512;
  for (int i = 0; i <= samples; ++i) {
    const double x = -2.0 * Rmax + 4.0 * Rmax * i / samples;
    const double pt[1] = {x};
    const double vv = v.eval(pt);
    const double dd = vpp.eval(pt);
    const double slack = tau_zero * (1.0 + std::abs(dd) + lambda * std::abs(vv));
    if (-dd + lambda * vv > slack) {
      rep.hypothesis_met = false;
      rep.hypothesis_detail = "-v'' + lambda v = " + std::to_string(-dd + lambda * vv) +
                              " > 0 at x = " + std::to_string(x);
      return rep;
    }
  }
  rep.hypothesis_detail = "sampled subsolution check passed";

  // Constant from the cutoff test-function argument with epsilon = 1/4:
  // C = 2 * C_eps * C_phi^2, C_eps = 2.
  const double c_phi = cutoff_profile(1.0).gradient_bound_constant;
  rep.constant = 4.0 * c_phi * c_phi;

  auto vplus_sq = [&](double x) {
    const double pt[1] = {x};
    const double val = v.eval(pt);
    const double plus = val > 0.0 ? val : 0.0;
    return plus * plus;
  };

  rep.all_hold = true;
  for (double R : radii) {
    CaccioppoliReport::Row row;
    row.R = R;
    row.lhs = simpson(vplus_sq, -R, R, intervals_for(-R, R, 64));
    const double outer = simpson(vplus_sq, -2 * R, 2 * R, intervals_for(-2 * R, 2 * R, 64));
    row.rhs = rep.constant / (lambda * R * R) * outer;
    row.holds = row.lhs <= row.rhs * (1.0 + 1e-12) + tau_zero;
    rep.all_hold = rep.all_hold && row.holds;
    rep.rows.push_back(row);
  }
  return rep;
}

DoublingConclusion doubling_check(const DoublingWitness& w, double tau_zero) {
  if (w.theta <= 0 || w.gamma <= 0 || w.C <= 0 || w.R0 <= 0)
    throw std::invalid_argument("doubling parameters must be positive");
  if (w.theta >= std::pow(2.0, -w.gamma))
    throw std::invalid_argument("doubling requires theta < 2^-gamma");
  if (w.samples.size() < 2) throw std::invalid_argument("need samples at R, 2R, ...");

  DoublingConclusion out;
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    const auto& [R, I] = w.samples[i];
    if (I < -tau_zero) {
      out.failed_premise = "I must be nonnegative";
      out.witness_R = R;
      return out;
    }
    if (i + 1 < w.samples.size()) {
      const auto& [R2, I2] = w.samples[i + 1];
      if (I > w.theta * I2 + tau_zero) {
        out.failed_premise = "I(R) <= theta * I(2R) fails";
        out.witness_R = R;
        return out;
      }
      (void)R2;
    }
    if (I > w.C * std::pow(R, w.gamma) + tau_zero) {
      out.failed_premise = "I(R) <= C R^gamma fails";
      out.witness_R = R;
      return out;
    }
  }

  // Both premises hold on the samples; the iterated bound
  // I(R) <= C (theta 2^gamma)^k R^gamma forces I below tau.
  out.vanishes = true;
  double measured_sup = 0.0;
  for (const auto& [R, I] : w.samples) measured_sup = std::max(measured_sup, I);
  if (measured_sup <= tau_zero) {
    out.k = 0;
    return out;
  }
  const double rate = w.theta * std::pow(2.0, w.gamma);  // < 1
  double bound = w.C * std::pow(w.samples.front().first, w.gamma);
  int k = 0;
  while (bound > tau_zero && k < 100000) {
    bound *= rate;
    ++k;
  }
  out.k = k;
  return out;
}

VerificationReport verify_candidate(const ProblemSpec& spec, const TrigSeries& u,
                                    bool run_oracle) {
  VerificationReport rep;

  const ResidualReport res = residual(u, spec);
  rep.residual_sup = res.sup;
  rep.residual_witness = res.witness;
  rep.traces = trace_check(u, spec);
  rep.scan = nonnegativity_scan(u, spec);

  // Strip bound per period: max |u| over box x [0, 2pi k], nondecreasing in k.
  const GridSpec xp = spec.xprime_grid_capped(std::min(spec.verification.grid, 65), 4900);
  const int K = spec.verification.periods;
  const int per = spec.verification.xn_per_period;
  std::vector<double> segment(static_cast<std::size_t>(K), 0.0);
  for (std::size_t i = 0; i < xp.point_count(); ++i) {
    const auto pt = xp.point(i);
    for (int k = 1; k <= K; ++k) {
      double& seg = segment[static_cast<std::size_t>(k - 1)];
      for (int j = (k - 1) * per; j <= k * per; ++j)
        seg = std::max(seg, std::abs(u.evaluate(pt, kTwoPi * j / per)));
    }
  }
  rep.strip_bounds.resize(static_cast<std::size_t>(K));
  double running = 0.0;
  for (int k = 1; k <= K; ++k) {
    running = std::max(running, segment[static_cast<std::size_t>(k - 1)]);
    rep.strip_bounds[static_cast<std::size_t>(k - 1)] = running;
  }

  // Audit the candidate's own sine spectrum at a few x' points.
  {
    std::vector<std::vector<double>> pts;
    const GridSpec coarse = spec.xprime_grid(5);
    for (std::size_t i = 0; i < coarse.point_count(); ++i) pts.push_back(coarse.point(i));
    const int M = std::max(4, u.max_mode() + 2);
    StripSampler sampler = [&u](std::span<const double> x, double xn) {
      return u.evaluate(x, xn);
    };
    rep.audit = coefficient_audit(sampler, M, pts, std::max(64, 4 * M), spec.tol.zero);
  }

  if (run_oracle) {
    const double R = spec.verification.oracle.R;
    const double h = spec.verification.oracle.h;
    const OracleResult fine = oracle_solve(spec, u, R, h);
    rep.oracle_sup_error = fine.sup_error;
    rep.oracle_note = fine.note;
    if (fine.sup_error > 1e-13) {
      const OracleResult coarse = oracle_solve(spec, u, R, 2.0 * h);
      if (coarse.sup_error > 0)
        rep.oracle_convergence_ratio = coarse.sup_error / fine.sup_error;
    } else {
      rep.oracle_note += rep.oracle_note.empty() ? "" : "; ";
      rep.oracle_note += "discrete error at machine precision, ratio not measurable";
    }
  }

  rep.pass = rep.residual_sup <= spec.tol.res && rep.scan.min_value >= -spec.tol.zero &&
             rep.traces.u_0_sup <= spec.tol.zero;
  return rep;
}

}  // namespace halfspace
