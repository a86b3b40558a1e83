#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "halfspace/verifier.hpp"

namespace halfspace {

namespace {

constexpr int kMaxUnknowns3d = 64 * 64 * 64;

using Triplets = std::vector<Eigen::Triplet<double>>;

struct Mesh2d {
  double R, hx, hy;
  int nx, ny;  // interval counts
  double x(int i) const { return -R + hx * i; }
  double y(int j) const { return hy * j; }
  int unknowns() const { return (nx - 1) * (ny - 1); }
  int index(int i, int j) const { return (i - 1) * (ny - 1) + (j - 1); }
  bool interior(int i, int j) const { return i >= 1 && i <= nx - 1 && j >= 1 && j <= ny - 1; }
};

struct Mesh3d {
  double R, hx, hz;
  int nx, nz;
  double x(int i) const { return -R + hx * i; }
  double z(int k) const { return hz * k; }
  int unknowns() const { return (nx - 1) * (nx - 1) * (nz - 1); }
  int index(int i, int j, int k) const {
    return ((i - 1) * (nx - 1) + (j - 1)) * (nz - 1) + (k - 1);
  }
  bool interior(int i, int j, int k) const {
    return i >= 1 && i <= nx - 1 && j >= 1 && j <= nx - 1 && k >= 1 && k <= nz - 1;
  }
};

double estimate_sigma_min(const Eigen::SparseLU<Eigen::SparseMatrix<double>>& lu, int n) {
  // Inverse power iteration: grows |A^-1 v|, so 1/|A^-1 v| estimates the
  // smallest eigenvalue magnitude. A heuristic guard, not a rigorous bound.
  std::mt19937 rng(20240901u);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = unit(rng);
  v.normalize();
  double growth = 1.0;
  for (int it = 0; it < 6; ++it) {
    Eigen::VectorXd w = lu.solve(v);
    const double norm = w.norm();
    if (!std::isfinite(norm) || norm == 0.0) return 0.0;
    growth = norm;
    v = w / norm;
  }
  return 1.0 / growth;
}

struct SolveAttempt {
  bool ok = false;
  double sup_error = 0.0;
  double sigma_min = 0.0;
  int unknowns = 0;
};

SolveAttempt solve_2d(const ProblemSpec& spec, const TrigSeries& candidate, double R, double h) {
  const auto& A = spec.diffusion;
  Mesh2d m;
  m.R = R;
  m.nx = std::max(4, static_cast<int>(std::lround(2.0 * R / h)));
  m.ny = std::max(4, static_cast<int>(std::lround(kTwoPi / h)));
  m.hx = 2.0 * R / m.nx;
  m.hy = kTwoPi / m.ny;

  const int n = m.unknowns();
  auto boundary = [&](int i, int j) {
    const double pt[1] = {m.x(i)};
    return candidate.evaluate(pt, m.y(j));
  };
  auto a_at = [&](double x) {
    const double pt[1] = {x};
    return A.entry(0, 0).eval(pt);
  };
  auto g_at = [&](int i, int j) {
    const double pt[1] = {m.x(i)};
    return spec.source.evaluate(pt, m.y(j));
  };

  // (A u_x)_x + u_yy + u = g with Dirichlet data from the candidate.
  Triplets trips;
  trips.reserve(static_cast<std::size_t>(n) * 5);
  Eigen::VectorXd rhs(n);
  for (int i = 1; i <= m.nx - 1; ++i) {
    const double aw = a_at(m.x(i) - 0.5 * m.hx);
    const double ae = a_at(m.x(i) + 0.5 * m.hx);
    for (int j = 1; j <= m.ny - 1; ++j) {
      const int row = m.index(i, j);
      double diag = -(aw + ae) / (m.hx * m.hx) - 2.0 / (m.hy * m.hy) + 1.0;
      double b = g_at(i, j);
      auto couple = [&](int ii, int jj, double coeff) {
        if (m.interior(ii, jj))
          trips.emplace_back(row, m.index(ii, jj), coeff);
        else
          b -= coeff * boundary(ii, jj);
      };
      trips.emplace_back(row, row, diag);
      couple(i - 1, j, aw / (m.hx * m.hx));
      couple(i + 1, j, ae / (m.hx * m.hx));
      couple(i, j - 1, 1.0 / (m.hy * m.hy));
      couple(i, j + 1, 1.0 / (m.hy * m.hy));
      rhs[row] = b;
    }
  }

  Eigen::SparseMatrix<double> mat(n, n);
  mat.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(mat);
  SolveAttempt attempt;
  attempt.unknowns = n;
  if (lu.info() != Eigen::Success) return attempt;
  attempt.sigma_min = estimate_sigma_min(lu, n);
  if (attempt.sigma_min < 1e-8) return attempt;

  const Eigen::VectorXd sol = lu.solve(rhs);
  double sup = 0.0;
  for (int i = 1; i <= m.nx - 1; ++i)
    for (int j = 1; j <= m.ny - 1; ++j)
      sup = std::max(sup, std::abs(sol[m.index(i, j)] - boundary(i, j)));
  attempt.sup_error = sup;
  attempt.ok = true;
  return attempt;
}

SolveAttempt solve_3d(const ProblemSpec& spec, const TrigSeries& candidate, double R, double h) {
  const auto& A = spec.diffusion;
  Mesh3d m;
  m.R = R;
  m.nx = std::max(4, static_cast<int>(std::lround(2.0 * R / h)));
  m.nz = std::max(4, static_cast<int>(std::lround(kTwoPi / h)));
  m.hx = 2.0 * R / m.nx;
  m.hz = kTwoPi / m.nz;

  const int n = m.unknowns();
  if (n > kMaxUnknowns3d)
    throw OracleError("3-D oracle mesh exceeds the size budget (" + std::to_string(n) +
                      " unknowns); increase h or decrease R");

  auto value = [&](int i, int j, int k) {
    const double pt[2] = {m.x(i), m.x(j)};
    return candidate.evaluate(pt, m.z(k));
  };
  auto entry = [&](int r, int c, double x1, double x2) {
    const double pt[2] = {x1, x2};
    return A.entry(r, c).eval(pt);
  };
  auto g_at = [&](int i, int j, int k) {
    const double pt[2] = {m.x(i), m.x(j)};
    return spec.source.evaluate(pt, m.z(k));
  };

  const double hx2 = m.hx * m.hx;
  const double hz2 = m.hz * m.hz;

  // Stencil assembled per row into a dense map over neighbor offsets.
  Triplets trips;
  trips.reserve(static_cast<std::size_t>(n) * 11);
  Eigen::VectorXd rhs(n);

  for (int i = 1; i <= m.nx - 1; ++i) {
    for (int j = 1; j <= m.nx - 1; ++j) {
      const double x1 = m.x(i), x2 = m.x(j);
      const double a11e = entry(0, 0, x1 + 0.5 * m.hx, x2);
      const double a11w = entry(0, 0, x1 - 0.5 * m.hx, x2);
      const double a22n = entry(1, 1, x1, x2 + 0.5 * m.hx);
      const double a22s = entry(1, 1, x1, x2 - 0.5 * m.hx);
      const double a12e = entry(0, 1, x1 + 0.5 * m.hx, x2);
      const double a12w = entry(0, 1, x1 - 0.5 * m.hx, x2);
      const double a12n = entry(0, 1, x1, x2 + 0.5 * m.hx);
      const double a12s = entry(0, 1, x1, x2 - 0.5 * m.hx);
      for (int k = 1; k <= m.nz - 1; ++k) {
        const int row = m.index(i, j, k);
        double b = g_at(i, j, k);
        std::vector<std::pair<std::array<int, 3>, double>> stencil;
        auto add = [&](int di, int dj, int dk, double coeff) {
          if (coeff == 0.0) return;
          stencil.push_back({{i + di, j + dj, k + dk}, coeff});
        };
        // d1(a11 d1 u) + d2(a22 d2 u), conservative flux form.
        add(1, 0, 0, a11e / hx2);
        add(-1, 0, 0, a11w / hx2);
        add(0, 1, 0, a22n / hx2);
        add(0, -1, 0, a22s / hx2);
        add(0, 0, 0, -(a11e + a11w + a22n + a22s) / hx2);
        // Mixed terms d1(a12 d2 u) + d2(a12 d1 u): midpoint flux with the
        // transverse derivative averaged from adjacent centered differences.
        const double q = 1.0 / (4.0 * hx2);
        add(1, 1, 0, (a12e + a12n) * q);
        add(-1, -1, 0, (a12w + a12s) * q);
        add(1, -1, 0, -(a12e + a12s) * q);
        add(-1, 1, 0, -(a12w + a12n) * q);
        // z direction and reaction.
        add(0, 0, 1, 1.0 / hz2);
        add(0, 0, -1, 1.0 / hz2);
        add(0, 0, 0, -2.0 / hz2 + 1.0);

        for (const auto& [off, coeff] : stencil) {
          if (m.interior(off[0], off[1], off[2]))
            trips.emplace_back(row, m.index(off[0], off[1], off[2]), coeff);
          else
            b -= coeff * value(off[0], off[1], off[2]);
        }
        rhs[row] = b;
      }
    }
  }

  Eigen::SparseMatrix<double> mat(n, n);
  mat.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(mat);
  SolveAttempt attempt;
  attempt.unknowns = n;
  if (lu.info() != Eigen::Success) return attempt;
  attempt.sigma_min = estimate_sigma_min(lu, n);
  if (attempt.sigma_min < 1e-8) return attempt;

  const Eigen::VectorXd sol = lu.solve(rhs);
  double sup = 0.0;
  for (int i = 1; i <= m.nx - 1; ++i)
    for (int j = 1; j <= m.nx - 1; ++j)
      for (int k = 1; k <= m.nz - 1; ++k)
        sup = std::max(sup, std::abs(sol[m.index(i, j, k)] - value(i, j, k)));
  attempt.sup_error = sup;
  attempt.ok = true;
  return attempt;
}

}  // namespace

OracleResult oracle_solve(const ProblemSpec& spec, const TrigSeries& candidate, double R,
                          double h) {
  if (spec.dimension != 2 && spec.dimension != 3)
    throw OracleError("finite-difference oracle supports N = 2 or 3");
  if (R <= 0 || h <= 0) throw OracleError("oracle requires positive R and h");
  const int max_mode = std::max(candidate.max_mode(), spec.source.max_mode());
  if (max_mode > 0 && h > kTwoPi / (8.0 * max_mode))
    throw OracleError("oracle mesh too coarse for mode " + std::to_string(max_mode) +
                      "; need h <= 2*pi/(8*M)");

  OracleResult out;
  out.h = h;
  double r_try = R;
  for (int attempt_no = 0; attempt_no < 2; ++attempt_no) {
    const SolveAttempt attempt = spec.dimension == 2 ? solve_2d(spec, candidate, r_try, h)
                                                     : solve_3d(spec, candidate, r_try, h);
    if (attempt.ok) {
      out.sup_error = attempt.sup_error;
      out.R = r_try;
      out.unknowns = attempt.unknowns;
      out.sigma_min_estimate = attempt.sigma_min;
      if (attempt_no > 0)
        out.note = "resonance guard: R adjusted by 10% to avoid a near-singular system";
      return out;
    }
    r_try *= 1.1;  // near-singular discrete operator: perturb the box and retry
  }
  throw OracleError(
      "discrete system is near-singular (eigenvalue 1 resonance); change the oracle half-width R");
}

}  // namespace halfspace
