#include "halfspace/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace halfspace {

DiffusionMatrix DiffusionMatrix::identity(int dim) {
  DiffusionMatrix m;
  m.dim = dim;
  m.entries.reserve(static_cast<std::size_t>(dim * dim));
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m.entries.push_back(Expr::constant(i == j ? 1.0 : 0.0));
  return m;
}

DiffusionMatrix DiffusionMatrix::scalar(Expr a) {
  DiffusionMatrix m;
  m.dim = 1;
  m.entries.push_back(std::move(a));
  return m;
}

DiffusionMatrix DiffusionMatrix::from_entries(int dim, std::vector<Expr> entries) {
  if (dim < 1) throw std::invalid_argument("diffusion block dimension must be >= 1");
  if (entries.size() != static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim))
    throw std::invalid_argument("diffusion matrix entry count mismatch");
  DiffusionMatrix m;
  m.dim = dim;
  m.entries = std::move(entries);
  // Symmetry by construction: mirror the upper triangle.
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j)
      m.entries[static_cast<std::size_t>(j * dim + i)] =
          m.entries[static_cast<std::size_t>(i * dim + j)];
  return m;
}

const Expr& DiffusionMatrix::entry(int i, int j) const {
  return entries[static_cast<std::size_t>(i * dim + j)];
}

bool DiffusionMatrix::literal_identity() const {
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      if (!entry(i, j).is_literal(i == j ? 1.0 : 0.0)) return false;
  return true;
}

bool DiffusionMatrix::literal_constant() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const Expr& e) { return e.literal_constant().has_value(); });
}

int TrigSeries::max_mode() const {
  int m = 0;
  if (!cos_coeffs.empty()) m = std::max(m, cos_coeffs.rbegin()->first);
  if (!sin_coeffs.empty()) m = std::max(m, sin_coeffs.rbegin()->first);
  return m;
}

bool TrigSeries::trig_empty() const { return cos_coeffs.empty() && sin_coeffs.empty(); }

bool TrigSeries::has_affine() const { return affine_xn.has_value(); }

Expr TrigSeries::cos_coeff(int m) const {
  auto it = cos_coeffs.find(m);
  return it == cos_coeffs.end() ? Expr::constant(0.0) : it->second;
}

Expr TrigSeries::sin_coeff(int m) const {
  auto it = sin_coeffs.find(m);
  return it == sin_coeffs.end() ? Expr::constant(0.0) : it->second;
}

void TrigSeries::set_cos(int m, Expr e) {
  if (m < 0) throw std::invalid_argument("cosine mode must be >= 0");
  if (e.is_literal_zero())
    cos_coeffs.erase(m);
  else
    cos_coeffs.insert_or_assign(m, std::move(e));
}

void TrigSeries::set_sin(int m, Expr e) {
  if (m < 1) throw std::invalid_argument("sine mode must be >= 1");
  if (e.is_literal_zero())
    sin_coeffs.erase(m);
  else
    sin_coeffs.insert_or_assign(m, std::move(e));
}

void TrigSeries::set_affine(Expr e) {
  if (e.is_literal_zero())
    affine_xn.reset();
  else
    affine_xn = std::move(e);
}

double TrigSeries::evaluate(std::span<const double> xprime, double xn) const {
  double acc = 0.0;
  for (const auto& [m, coeff] : cos_coeffs) {
    const double c = coeff.eval(xprime);
    acc += m == 0 ? 0.5 * c : c * std::cos(m * xn);
  }
  for (const auto& [m, coeff] : sin_coeffs) acc += coeff.eval(xprime) * std::sin(m * xn);
  if (affine_xn) acc += affine_xn->eval(xprime) * xn;
  return acc;
}

TrigSeries TrigSeries::derivative_xn(int order) const {
  if (order < 1 || order > 2) throw std::invalid_argument("derivative order must be 1 or 2");
  TrigSeries d;
  if (order == 1) {
    // d/dxN: a_m cos -> -m a_m sin, b_m sin -> m b_m cos, p*xN -> p.
    for (const auto& [m, coeff] : cos_coeffs)
      if (m >= 1) d.set_sin(m, Expr::constant(-static_cast<double>(m)) * coeff);
    for (const auto& [m, coeff] : sin_coeffs)
      d.set_cos(m, Expr::constant(static_cast<double>(m)) * coeff);
    if (affine_xn) d.set_cos(0, d.cos_coeff(0) + Expr::constant(2.0) * *affine_xn);
    return d;
  }
  // Second order: mode-wise multiplication by -m^2; the affine part vanishes.
  for (const auto& [m, coeff] : cos_coeffs)
    if (m >= 1) d.set_cos(m, Expr::constant(-static_cast<double>(m) * m) * coeff);
  for (const auto& [m, coeff] : sin_coeffs)
    d.set_sin(m, Expr::constant(-static_cast<double>(m) * m) * coeff);
  return d;
}

namespace {

void append_term(std::string& out, const Expr& coeff, const std::string& trig) {
  const Expr c = coeff.simplified();
  const auto lit = c.literal_constant();
  std::string piece;
  bool negative = false;
  if (lit) {
    if (*lit == 0.0) return;
    double v = *lit;
    if (v < 0) {
      negative = true;
      v = -v;
    }
    if (trig.empty())
      piece = Expr::constant(v).to_string();
    else if (v == 1.0)
      piece = trig;
    else
      piece = Expr::constant(v).to_string() + "*" + trig;
  } else {
    piece = "(" + c.to_string() + ")";
    if (!trig.empty()) piece += "*" + trig;
  }
  if (out.empty())
    out = negative ? "-" + piece : piece;
  else
    out += (negative ? " - " : " + ") + piece;
}

std::string mode_arg(int m) { return m == 1 ? "xN" : std::to_string(m) + "*xN"; }

}  // namespace

std::string TrigSeries::to_string() const {
  std::string out;
  if (auto it = cos_coeffs.find(0); it != cos_coeffs.end())
    append_term(out, Expr::constant(0.5) * it->second, "");
  for (const auto& [m, coeff] : cos_coeffs)
    if (m >= 1) append_term(out, coeff, "cos(" + mode_arg(m) + ")");
  for (const auto& [m, coeff] : sin_coeffs) append_term(out, coeff, "sin(" + mode_arg(m) + ")");
  if (affine_xn) append_term(out, *affine_xn, "xN");
  return out.empty() ? "0" : out;
}

TrigSeries scale_series(const TrigSeries& s, double factor) {
  TrigSeries out;
  const Expr f = Expr::constant(factor);
  for (const auto& [m, coeff] : s.cos_coeffs) out.set_cos(m, (f * coeff).simplified());
  for (const auto& [m, coeff] : s.sin_coeffs) out.set_sin(m, (f * coeff).simplified());
  if (s.affine_xn) out.set_affine((f * *s.affine_xn).simplified());
  return out;
}

TrigSeries add_series(const TrigSeries& a, const TrigSeries& b) {
  TrigSeries out = a;
  for (const auto& [m, coeff] : b.cos_coeffs) out.set_cos(m, (out.cos_coeff(m) + coeff).simplified());
  for (const auto& [m, coeff] : b.sin_coeffs) out.set_sin(m, (out.sin_coeff(m) + coeff).simplified());
  if (b.affine_xn) {
    const Expr base = a.affine_xn ? *a.affine_xn : Expr::constant(0.0);
    out.set_affine((base + *b.affine_xn).simplified());
  }
  return out;
}

GridSpec ProblemSpec::xprime_grid() const { return xprime_grid(verification.grid); }

GridSpec ProblemSpec::xprime_grid(int points_per_axis) const {
  Box box = verification.box;
  const int nvars = dimension - 1;
  if (box.dim() != nvars) box = Box::cube(nvars, -4.0, 4.0);
  return GridSpec::uniform(box, points_per_axis);
}

GridSpec ProblemSpec::xprime_grid_capped(int preferred, std::size_t budget) const {
  const int nvars = dimension - 1;
  auto total = [&](int r) {
    double t = 1.0;
    for (int a = 0; a < nvars; ++a) t *= r;
    return t;
  };
  int res = std::max(5, preferred);
  if (total(res) > static_cast<double>(budget)) {
    res = std::max(
        5, static_cast<int>(std::llround(std::pow(static_cast<double>(budget), 1.0 / nvars))));
    while (res > 5 && total(res) > static_cast<double>(budget)) --res;
    while (total(res + 1) <= static_cast<double>(budget) && res + 1 <= preferred) ++res;
  }
  return xprime_grid(std::min(res, std::max(5, preferred)));
}

void apply_default_verification(ProblemSpec& spec) {
  const int nvars = spec.dimension - 1;
  if (spec.verification.box.dim() != nvars) spec.verification.box = Box::cube(nvars, -4.0, 4.0);
  if (spec.dimension >= 3 && spec.verification.oracle.R == 4.0 &&
      spec.verification.oracle.h == kTwoPi / 128.0) {
    // Keep the 3-D oracle inside the modest-box budget.
    spec.verification.oracle.R = 2.0;
    spec.verification.oracle.h = kTwoPi / 24.0;
  }
}

bool has_fatal(const std::vector<Finding>& findings) {
  return std::any_of(findings.begin(), findings.end(), [](const Finding& f) { return f.fatal; });
}

namespace {

std::vector<std::vector<double>> probe_directions(int dim) {
  std::vector<std::vector<double>> probes;
  for (int i = 0; i < dim; ++i) {
    std::vector<double> e(static_cast<std::size_t>(dim), 0.0);
    e[static_cast<std::size_t>(i)] = 1.0;
    probes.push_back(std::move(e));
  }
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      std::vector<double> p(static_cast<std::size_t>(dim), 0.0);
      p[static_cast<std::size_t>(i)] = inv_sqrt2;
      p[static_cast<std::size_t>(j)] = inv_sqrt2;
      probes.push_back(p);
      p[static_cast<std::size_t>(j)] = -inv_sqrt2;
      probes.push_back(p);
    }
  return probes;
}

std::string point_text(const std::vector<double>& p) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ")";
  return os.str();
}

}  // namespace

std::vector<Finding> validate_spec(const ProblemSpec& spec) {
  std::vector<Finding> findings;
  const int nvars = spec.dimension - 1;

  if (spec.dimension < 2)
    findings.push_back({"dimension", "dimension must be >= 2", {}, true});
  if (spec.tol.zero <= 0 || spec.tol.res <= 0 || spec.tol.pd <= 0)
    findings.push_back({"tolerances", "tolerances must be positive", {}, true});
  if (spec.diffusion.dim != nvars)
    findings.push_back({"diffusion-dim", "diffusion block must be (N-1)x(N-1)", {}, true});
  if (!findings.empty() && has_fatal(findings)) return findings;

  auto check_vars = [&](const Expr& e, const std::string& where) {
    if (e.max_variable_index() >= nvars)
      findings.push_back({"variable-range",
                          where + " references x" + std::to_string(e.max_variable_index() + 1) +
                              " but only x1..x" + std::to_string(nvars) + " exist",
                          {},
                          true});
  };
  for (int i = 0; i < spec.diffusion.dim; ++i)
    for (int j = 0; j < spec.diffusion.dim; ++j)
      check_vars(spec.diffusion.entry(i, j),
                 "diffusion entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
  for (const auto& [m, coeff] : spec.source.cos_coeffs)
    check_vars(coeff, "source cosine coefficient " + std::to_string(m));
  for (const auto& [m, coeff] : spec.source.sin_coeffs)
    check_vars(coeff, "source sine coefficient " + std::to_string(m));
  if (spec.source.affine_xn) check_vars(*spec.source.affine_xn, "source affine coefficient");
  if (has_fatal(findings)) return findings;

  // Coarse grid keeps validation cheap; sign decisions elsewhere use the full grid.
  const GridSpec grid =
      spec.xprime_grid_capped(std::min(spec.verification.grid, 65), 4900);

  // Entry boundedness on the box: flag non-finite samples.
  for (int i = 0; i < spec.diffusion.dim; ++i) {
    for (int j = i; j < spec.diffusion.dim; ++j) {
      try {
        const auto prof = sample_expr(spec.diffusion.entry(i, j), grid);
        if (!std::isfinite(prof.min_value) || !std::isfinite(prof.max_value))
          findings.push_back({"boundedness",
                              "diffusion entry (" + std::to_string(i + 1) + "," +
                                  std::to_string(j + 1) + ") is not finite on the box",
                              prof.argmax,
                              true});
      } catch (const EvalError& err) {
        findings.push_back({"evaluation",
                            "diffusion entry (" + std::to_string(i + 1) + "," +
                                std::to_string(j + 1) + "): " + err.what(),
                            err.point(),
                            true});
      }
    }
  }

  // Sampled positive definiteness over a fixed probe set.
  const auto probes = probe_directions(spec.diffusion.dim);
  const std::size_t npts = grid.point_count();
  double worst = std::numeric_limits<double>::infinity();
  std::vector<double> worst_point;
  try {
    for (std::size_t flat = 0; flat < npts; ++flat) {
      const auto pt = grid.point(flat);
      for (const auto& xi : probes) {
        double q = 0.0;
        for (int i = 0; i < spec.diffusion.dim; ++i)
          for (int j = 0; j < spec.diffusion.dim; ++j)
            q += spec.diffusion.entry(i, j).eval(pt) * xi[static_cast<std::size_t>(i)] *
                 xi[static_cast<std::size_t>(j)];
        if (q < worst) {
          worst = q;
          worst_point = pt;
        }
      }
    }
    if (worst <= spec.tol.pd)
      findings.push_back({"positive-definiteness",
                          "quadratic form drops to " + std::to_string(worst) +
                              " at sampled point " + point_text(worst_point),
                          worst_point,
                          true});
  } catch (const EvalError& err) {
    findings.push_back({"evaluation", std::string("diffusion evaluation failed: ") + err.what(),
                        err.point(), true});
  }

  // Source coefficients must evaluate on the box.
  auto check_eval = [&](const Expr& e, const std::string& where) {
    try {
      (void)sample_expr(e, grid);
    } catch (const EvalError& err) {
      findings.push_back({"evaluation", where + ": " + err.what(), err.point(), true});
    }
  };
  for (const auto& [m, coeff] : spec.source.cos_coeffs)
    check_eval(coeff, "source cosine coefficient " + std::to_string(m));
  for (const auto& [m, coeff] : spec.source.sin_coeffs)
    check_eval(coeff, "source sine coefficient " + std::to_string(m));
  if (spec.source.affine_xn) check_eval(*spec.source.affine_xn, "source affine coefficient");

  return findings;
}

}  // namespace halfspace
