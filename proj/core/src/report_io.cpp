#include "halfspace/report_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

#include "json.hpp"

namespace halfspace {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

ordered_json point_json(const std::vector<double>& p) {
  ordered_json a = ordered_json::array();
  for (double v : p) a.push_back(v);
  return a;
}

ordered_json series_json(const TrigSeries& s) {
  ordered_json j;
  ordered_json c = ordered_json::object();
  for (const auto& [m, coeff] : s.cos_coeffs) c[std::to_string(m)] = coeff.to_string();
  ordered_json d = ordered_json::object();
  for (const auto& [m, coeff] : s.sin_coeffs) d[std::to_string(m)] = coeff.to_string();
  j["c"] = c;
  j["d"] = d;
  j["affine_xn"] = s.affine_xn ? ordered_json(s.affine_xn->to_string()) : ordered_json(nullptr);
  j["printed"] = s.to_string();
  return j;
}

ordered_json sign_profile_json(const SignProfile& p) {
  ordered_json j;
  j["min"] = p.min;
  j["max"] = p.max;
  j["argmin"] = point_json(p.argmin);
  j["argmax"] = point_json(p.argmax);
  j["identically_zero"] = p.identically_zero;
  j["nonnegative"] = p.nonnegative;
  j["nonpositive"] = p.nonpositive;
  return j;
}

ordered_json scan_json(const ScanResult& s) {
  ordered_json j;
  j["min_value"] = s.min_value;
  j["min_point"] = point_json(s.min_point);
  j["has_violation"] = s.has_violation;
  if (s.has_violation) {
    j["first_violation_point"] = point_json(s.first_violation_point);
    j["first_violation_value"] = s.first_violation_value;
  }
  return j;
}

ordered_json traces_json(const TraceAssumption& t) {
  ordered_json j;
  j["u_2pi_zero"] = t.u_2pi_zero;
  j["uN_0_zero"] = t.uN_0_zero;
  j["uN_2pi_zero"] = t.uN_2pi_zero;
  j["rule"] = t.rule;
  return j;
}

ordered_json evidence_json(const Evidence& ev) {
  ordered_json j;
  if (ev.c0) j["c0"] = sign_profile_json(*ev.c0);
  if (ev.c1) j["c1"] = sign_profile_json(*ev.c1);
  if (ev.d1) j["d1"] = sign_profile_json(*ev.d1);
  if (ev.residual_sup) j["residual_sup"] = *ev.residual_sup;
  if (ev.scan) j["scan"] = scan_json(*ev.scan);
  if (ev.traces) j["traces"] = traces_json(*ev.traces);
  ordered_json notes = ordered_json::array();
  for (const auto& n : ev.notes) notes.push_back(n);
  j["notes"] = notes;
  return j;
}

ordered_json audit_json_obj(const AuditReport& rep) {
  ordered_json j;
  j["max_mode"] = rep.max_mode;
  j["tau_zero"] = rep.tau_zero;
  ordered_json checks = ordered_json::array();
  for (const auto& c : rep.checks) {
    ordered_json cj;
    cj["id"] = c.id;
    cj["pass"] = c.pass;
    cj["detail"] = c.detail;
    if (!c.pass) {
      cj["witness_mode"] = c.witness_mode;
      if (c.witness_mode2 > 0) cj["witness_mode2"] = c.witness_mode2;
      cj["witness_point"] = point_json(c.witness_point);
      cj["witness_value"] = c.witness_value;
    }
    checks.push_back(cj);
  }
  j["checks"] = checks;
  ordered_json dich = ordered_json::array();
  for (const auto& s : rep.mode_dichotomy) dich.push_back(s);
  j["mode_dichotomy"] = dich;
  j["all_pass"] = rep.all_pass;
  return j;
}

ordered_json verification_json_obj(const VerificationReport& rep) {
  ordered_json j;
  j["residual_sup"] = rep.residual_sup;
  j["residual_witness"] = point_json(rep.residual_witness);
  ordered_json tr;
  tr["u_at_0_sup"] = rep.traces.u_0_sup;
  tr["uN_at_0_sup"] = rep.traces.uN_0_sup;
  tr["u_at_2pi_sup"] = rep.traces.u_2pi_sup;
  tr["uN_at_2pi_sup"] = rep.traces.uN_2pi_sup;
  j["boundary"] = tr;
  j["nonnegativity"] = scan_json(rep.scan);
  ordered_json sb = ordered_json::array();
  for (double b : rep.strip_bounds) sb.push_back(b);
  j["strip_bounds"] = sb;
  if (rep.oracle_sup_error) j["oracle_sup_error"] = *rep.oracle_sup_error;
  if (rep.oracle_convergence_ratio) j["oracle_convergence_ratio"] = *rep.oracle_convergence_ratio;
  if (!rep.oracle_note.empty()) j["oracle_note"] = rep.oracle_note;
  if (rep.audit) j["audit"] = audit_json_obj(*rep.audit);
  j["pass"] = rep.pass;
  return j;
}

ordered_json classification_json_obj(const Classification& c, const std::string& command) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["command"] = command;
  j["verdict"] = to_string(c.verdict);
  j["rule_id"] = c.rule_id;
  j["citation"] = c.citation;
  if (c.unique_solution) j["payload"] = series_json(*c.unique_solution);
  if (c.family) {
    ordered_json f;
    f["base"] = series_json(c.family->base);
    f["direction"] = series_json(c.family->direction);
    f["param_range"] = ordered_json::array({c.family->param_lo, c.family->param_hi});
    f["sampled_nonnegative_range"] =
        ordered_json::array({c.family->sampled_lo, c.family->sampled_hi});
    f["completeness"] = c.family->completeness;
    j["family"] = f;
  }
  ordered_json obs = ordered_json::array();
  for (const auto& o : c.obstructions) obs.push_back(o);
  j["obstructions"] = obs;
  j["evidence"] = evidence_json(c.evidence);
  if (c.verification) j["verification"] = verification_json_obj(*c.verification);
  return j;
}

}  // namespace

std::string classification_to_json(const Classification& c, const std::string& command) {
  return classification_json_obj(c, command).dump(2) + "\n";
}

std::string classification_to_text(const Classification& c) {
  std::ostringstream os;
  os << "verdict: " << to_string(c.verdict) << "\n";
  os << "rule:    " << c.rule_id << "\n";
  os << "basis:   " << c.citation << "\n";
  if (c.unique_solution) os << "payload: " << c.unique_solution->to_string() << "\n";
  if (c.family) {
    os << "family:  base " << c.family->base.to_string() << ", direction "
       << c.family->direction.to_string() << ", A in [" << fmt(c.family->param_lo) << ", "
       << fmt(c.family->param_hi) << "] (" << c.family->completeness << ")\n";
    os << "         sampled-nonnegative A in [" << fmt(c.family->sampled_lo) << ", "
       << fmt(c.family->sampled_hi) << "]\n";
  }
  for (const auto& o : c.obstructions) os << "obstruction: " << o << "\n";
  for (const auto& n : c.evidence.notes) os << "note: " << n << "\n";
  if (c.verification)
    os << "internal verification: " << (c.verification->pass ? "pass" : "FAIL")
       << " (residual sup " << fmt(c.verification->residual_sup) << ", min "
       << fmt(c.verification->scan.min_value) << ")\n";
  return os.str();
}

std::string verification_to_json(const VerificationReport& rep, const Classification& c) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["command"] = "verify";
  j["verdict"] = to_string(c.verdict);
  j["rule_id"] = c.rule_id;
  j["report"] = verification_json_obj(rep);
  return j.dump(2) + "\n";
}

std::string verification_to_text(const VerificationReport& rep, const Classification& c) {
  std::ostringstream os;
  os << "verdict: " << to_string(c.verdict) << " (" << c.rule_id << ")\n";
  os << "residual sup:      " << fmt(rep.residual_sup) << "\n";
  os << "boundary sups:     u(.,0) " << fmt(rep.traces.u_0_sup) << ", uN(.,0) "
     << fmt(rep.traces.uN_0_sup) << ", u(.,2pi) " << fmt(rep.traces.u_2pi_sup) << ", uN(.,2pi) "
     << fmt(rep.traces.uN_2pi_sup) << "\n";
  os << "nonnegativity min: " << fmt(rep.scan.min_value) << "\n";
  os << "strip bounds:      ";
  for (std::size_t k = 0; k < rep.strip_bounds.size(); ++k)
    os << (k ? ", " : "") << "K=" << (k + 1) << ": " << fmt(rep.strip_bounds[k]);
  os << "\n";
  if (rep.oracle_sup_error) os << "oracle sup error:  " << fmt(*rep.oracle_sup_error) << "\n";
  if (rep.oracle_convergence_ratio)
    os << "oracle ratio:      " << fmt(*rep.oracle_convergence_ratio) << "\n";
  if (!rep.oracle_note.empty()) os << "oracle note:       " << rep.oracle_note << "\n";
  if (rep.audit) os << "coefficient audit: " << (rep.audit->all_pass ? "pass" : "FAIL") << "\n";
  os << "overall: " << (rep.pass ? "pass" : "FAIL") << "\n";
  return os.str();
}

std::string audit_to_json(const AuditReport& rep) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["command"] = "audit";
  j["audit"] = audit_json_obj(rep);
  return j.dump(2) + "\n";
}

std::string audit_to_text(const AuditReport& rep) {
  std::ostringstream os;
  for (const auto& c : rep.checks)
    os << c.id << ": " << (c.pass ? "pass" : "FAIL") << " - " << c.detail << "\n";
  for (const auto& s : rep.mode_dichotomy) os << s << "\n";
  os << "overall: " << (rep.all_pass ? "pass" : "FAIL") << "\n";
  return os.str();
}

std::string oracle_to_json(const OracleResult& fine, const OracleResult* half_step) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["command"] = "oracle";
  ordered_json f;
  f["sup_error"] = fine.sup_error;
  f["R"] = fine.R;
  f["h"] = fine.h;
  f["unknowns"] = fine.unknowns;
  f["sigma_min_estimate"] = fine.sigma_min_estimate;
  if (!fine.note.empty()) f["note"] = fine.note;
  j["solve"] = f;
  if (half_step) {
    ordered_json g;
    g["sup_error"] = half_step->sup_error;
    g["h"] = half_step->h;
    g["unknowns"] = half_step->unknowns;
    j["half_step"] = g;
    if (half_step->sup_error > 0)
      j["convergence_ratio"] = fine.sup_error / half_step->sup_error;
  }
  return j.dump(2) + "\n";
}

std::string series_field_csv(const TrigSeries& u, const ProblemSpec& spec) {
  const int nvars = spec.dimension - 1;
  const int xp_res = spec.dimension == 2 ? spec.verification.grid
                                         : std::min(spec.verification.grid, 65);
  const GridSpec xp = spec.xprime_grid_capped(xp_res, 66049);
  const int per = spec.verification.xn_per_period;
  const int K = spec.verification.periods;
  const int nxn = per * K;

  std::ostringstream os;
  for (int a = 0; a < nvars; ++a) os << "x" << (a + 1) << ",";
  os << "xN,value\n";
  const std::size_t npts = xp.point_count();
  for (std::size_t i = 0; i < npts; ++i) {
    const auto pt = xp.point(i);
    for (int j = 0; j <= nxn; ++j) {
      const double xn = kTwoPi * j / per;
      for (double v : pt) os << fmt(v) << ",";
      os << fmt(xn) << "," << fmt(u.evaluate(pt, xn)) << "\n";
    }
  }
  return os.str();
}

// ---- spec parsing ----

namespace {

[[noreturn]] void spec_fail(const std::string& msg) { throw SpecError("problem spec: " + msg); }

Expr parse_field_expr(const std::string& text, int n_vars, const std::string& where) {
  try {
    return parse_expr(text, n_vars);
  } catch (const ParseError& e) {
    spec_fail(where + ": " + e.what());
  }
}

}  // namespace

ProblemSpec parse_problem_spec(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const std::exception& e) {
    spec_fail(std::string("invalid JSON: ") + e.what());
  }

  if (!j.contains("schema_version") || j["schema_version"] != kSpecSchemaVersion)
    spec_fail(std::string("schema_version must be \"") + kSpecSchemaVersion + "\"");
  if (!j.contains("dimension") || !j["dimension"].is_number_integer())
    spec_fail("dimension (integer >= 2) is required");

  ProblemSpec spec;
  spec.dimension = j["dimension"].get<int>();
  if (spec.dimension < 2) spec_fail("dimension must be >= 2");
  const int nvars = spec.dimension - 1;

  // Diffusion matrix.
  if (!j.contains("A") || (j["A"].is_object() && j["A"].value("kind", "identity") == "identity")) {
    spec.diffusion = DiffusionMatrix::identity(nvars);
  } else {
    const auto& A = j["A"];
    const std::string kind = A.value("kind", "");
    if (kind == "scalar_expr") {
      if (nvars != 1) spec_fail("A.kind scalar_expr requires dimension 2");
      if (!A.contains("expr")) spec_fail("A.expr is required for scalar_expr");
      spec.diffusion =
          DiffusionMatrix::scalar(parse_field_expr(A["expr"].get<std::string>(), nvars, "A.expr"));
    } else if (kind == "matrix_expr") {
      if (!A.contains("entries") || !A["entries"].is_array() ||
          A["entries"].size() != static_cast<std::size_t>(nvars))
        spec_fail("A.entries must be an (N-1)x(N-1) array of expression strings");
      std::vector<Expr> entries;
      for (int i = 0; i < nvars; ++i) {
        const auto& row = A["entries"][static_cast<std::size_t>(i)];
        if (!row.is_array() || row.size() != static_cast<std::size_t>(nvars))
          spec_fail("A.entries must be an (N-1)x(N-1) array of expression strings");
        for (int jj = 0; jj < nvars; ++jj)
          entries.push_back(parse_field_expr(row[static_cast<std::size_t>(jj)].get<std::string>(),
                                             nvars,
                                             "A.entries[" + std::to_string(i) + "][" +
                                                 std::to_string(jj) + "]"));
      }
      for (int i = 0; i < nvars; ++i)
        for (int jj = i + 1; jj < nvars; ++jj)
          if (!entries[static_cast<std::size_t>(i * nvars + jj)].structurally_equal(
                  entries[static_cast<std::size_t>(jj * nvars + i)]))
            spec_fail("A.entries must be symmetric (entry (" + std::to_string(i + 1) + "," +
                      std::to_string(jj + 1) + ") differs from its mirror)");
      spec.diffusion = DiffusionMatrix::from_entries(nvars, std::move(entries));
    } else {
      spec_fail("A.kind must be identity, scalar_expr or matrix_expr");
    }
  }

  // Source.
  if (!j.contains("g") || !j["g"].is_object()) spec_fail("g is required");
  const auto& gj = j["g"];
  auto parse_mode = [&](const std::string& key) {
    int mode = -1;
    try {
      mode = std::stoi(key);
    } catch (...) {
      spec_fail("g coefficient keys must be integer modes, got \"" + key + "\"");
    }
    if (mode > 64) spec_fail("source modes above 64 are not supported");
    return mode;
  };
  if (gj.contains("c")) {
    for (const auto& [key, val] : gj["c"].items()) {
      const int m = parse_mode(key);
      if (m < 0) spec_fail("cosine modes must be >= 0");
      spec.source.set_cos(m, parse_field_expr(val.get<std::string>(), nvars, "g.c[" + key + "]"));
    }
  }
  if (gj.contains("d")) {
    for (const auto& [key, val] : gj["d"].items()) {
      const int m = parse_mode(key);
      if (m < 1) spec_fail("sine modes must be >= 1");
      spec.source.set_sin(m, parse_field_expr(val.get<std::string>(), nvars, "g.d[" + key + "]"));
    }
  }
  if (gj.contains("affine_xn") && !gj["affine_xn"].is_null())
    spec.source.set_affine(
        parse_field_expr(gj["affine_xn"].get<std::string>(), nvars, "g.affine_xn"));

  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    spec.tol.zero = t.value("zero", spec.tol.zero);
    spec.tol.res = t.value("res", spec.tol.res);
    spec.tol.pd = t.value("pd", spec.tol.pd);
    if (spec.tol.zero <= 0 || spec.tol.res <= 0 || spec.tol.pd <= 0)
      spec_fail("tolerances must be positive");
  }

  if (j.contains("verification")) {
    const auto& v = j["verification"];
    if (v.contains("box")) {
      const auto& b = v["box"];
      if (!b.is_array() || b.size() != static_cast<std::size_t>(nvars))
        spec_fail("verification.box must list one [lo, hi] pair per x' axis");
      Box box;
      for (const auto& ax : b) {
        if (!ax.is_array() || ax.size() != 2) spec_fail("verification.box axes must be [lo, hi]");
        const double lo = ax[0].get<double>(), hi = ax[1].get<double>();
        if (!(lo < hi)) spec_fail("verification.box axes must satisfy lo < hi");
        box.axes.push_back({lo, hi});
      }
      spec.verification.box = box;
    }
    spec.verification.grid = v.value("grid", spec.verification.grid);
    spec.verification.periods = v.value("periods", spec.verification.periods);
    spec.verification.xn_per_period = v.value("xn_per_period", spec.verification.xn_per_period);
    if (v.contains("oracle")) {
      spec.verification.oracle.R = v["oracle"].value("R", spec.verification.oracle.R);
      spec.verification.oracle.h = v["oracle"].value("h", spec.verification.oracle.h);
    }
    if (spec.verification.grid < 2 || spec.verification.periods < 1 ||
        spec.verification.xn_per_period < 8 || spec.verification.oracle.R <= 0 ||
        spec.verification.oracle.h <= 0)
      spec_fail("verification parameters must be positive (grid >= 2, xn_per_period >= 8)");
  }

  if (j.contains("assumptions"))
    spec.assume_passo_base = j["assumptions"].value("passo_base", false);

  apply_default_verification(spec);
  return spec;
}

ProblemSpec load_problem_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) spec_fail("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem_spec(buf.str());
}

// ---- field CSV loading ----

StripSampler SampledField::sampler() const {
  // Nearest-sample lookup; the audit evaluates exactly on the stored grid.
  auto self = std::make_shared<SampledField>(*this);
  return [self](std::span<const double> xp, double xn) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < self->xprime_points.size(); ++i) {
      double d = 0.0;
      for (std::size_t a = 0; a < xp.size() && a < self->xprime_points[i].size(); ++a) {
        const double diff = self->xprime_points[i][a] - xp[a];
        d += diff * diff;
      }
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    const double h = self->xn_points[1] - self->xn_points[0];
    long k = std::llround((xn - self->xn_points.front()) / h);
    k = std::clamp<long>(k, 0, static_cast<long>(self->xn_points.size()) - 1);
    return self->values[best][static_cast<std::size_t>(k)];
  };
}

SampledField load_field_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) spec_fail("cannot open field CSV '" + path + "'");
  std::string header;
  if (!std::getline(in, header)) spec_fail("field CSV is empty");
  int ncols = 1;
  for (char ch : header) ncols += ch == ',';
  const int nvars = ncols - 2;
  if (nvars < 1 || nvars > 2) spec_fail("field CSV must have columns x1[,x2],xN,value");

  std::map<std::vector<double>, std::map<double, double>> rows;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<double> cols;
    std::string cell;
    while (std::getline(ls, cell, ',')) cols.push_back(std::stod(cell));
    if (cols.size() != static_cast<std::size_t>(ncols))
      spec_fail("field CSV row " + std::to_string(lineno) + " has wrong column count");
    std::vector<double> xp(cols.begin(), cols.begin() + nvars);
    rows[xp][cols[static_cast<std::size_t>(nvars)]] = cols.back();
  }
  if (rows.empty()) spec_fail("field CSV has no data rows");

  SampledField field;
  const auto& first = rows.begin()->second;
  for (const auto& [xn, v] : first) field.xn_points.push_back(xn);
  if (field.xn_points.size() < 5) spec_fail("field CSV needs at least 5 xN samples");
  const double h = field.xn_points[1] - field.xn_points[0];
  for (std::size_t k = 1; k < field.xn_points.size(); ++k)
    if (std::abs(field.xn_points[k] - field.xn_points[k - 1] - h) > 1e-9 * (1.0 + std::abs(h)))
      spec_fail("field CSV xN samples must be uniformly spaced");
  const double span = field.xn_points.back() - field.xn_points.front();
  const double periods = span / kTwoPi;
  if (std::abs(periods - std::llround(periods)) > 1e-6)
    spec_fail("field CSV must cover whole periods in xN (span a multiple of 2*pi)");
  field.quadrature_resolution = static_cast<int>(std::llround(kTwoPi / h));

  for (const auto& [xp, col] : rows) {
    if (col.size() != first.size()) spec_fail("field CSV xN grids differ between x' points");
    field.xprime_points.push_back(xp);
    std::vector<double> vals;
    for (const auto& [xn, v] : col) vals.push_back(v);
    field.values.push_back(std::move(vals));
  }
  return field;
}

}  // namespace halfspace
