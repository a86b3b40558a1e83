#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "halfspace/report_io.hpp"

namespace {

using namespace halfspace;

struct CommonOptions {
  std::string spec_path;
  std::string out_path;
  std::string format = "json";
  std::optional<double> tol_zero, tol_res, oracle_R, oracle_h;
  std::optional<int> grid, periods;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("spec", opt.spec_path, "problem spec JSON file")->required();
  cmd->add_option("--out", opt.out_path, "write the report here instead of stdout");
  cmd->add_option("--format", opt.format, "json, csv or text")
      ->check(CLI::IsMember({"json", "csv", "text"}));
  cmd->add_option("--tol-zero", opt.tol_zero, "sign/zero tolerance override");
  cmd->add_option("--tol-res", opt.tol_res, "residual tolerance override");
  cmd->add_option("--grid", opt.grid, "x' grid points per axis");
  cmd->add_option("--periods", opt.periods, "strip period count K");
  cmd->add_option("--oracle-R", opt.oracle_R, "oracle half-width R");
  cmd->add_option("--oracle-h", opt.oracle_h, "oracle mesh size h");
}

ProblemSpec load_with_overrides(const CommonOptions& opt) {
  ProblemSpec spec = load_problem_spec(opt.spec_path);
  if (opt.tol_zero) {
    if (*opt.tol_zero <= 0) throw SpecError("--tol-zero must be positive");
    spec.tol.zero = *opt.tol_zero;
  }
  if (opt.tol_res) {
    if (*opt.tol_res <= 0) throw SpecError("--tol-res must be positive");
    spec.tol.res = *opt.tol_res;
  }
  if (opt.grid) {
    if (*opt.grid < 2) throw SpecError("--grid must be >= 2");
    spec.verification.grid = *opt.grid;
  }
  if (opt.periods) {
    if (*opt.periods < 1) throw SpecError("--periods must be >= 1");
    spec.verification.periods = *opt.periods;
  }
  if (opt.oracle_R) {
    if (*opt.oracle_R <= 0) throw SpecError("--oracle-R must be positive");
    spec.verification.oracle.R = *opt.oracle_R;
  }
  if (opt.oracle_h) {
    if (*opt.oracle_h <= 0) throw SpecError("--oracle-h must be positive");
    spec.verification.oracle.h = *opt.oracle_h;
  }
  return spec;
}

void emit(const CommonOptions& opt, const std::string& content) {
  if (opt.out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(opt.out_path, std::ios::binary);
  if (!out) throw SpecError("cannot write '" + opt.out_path + "'");
  out << content;
}

void emit_to(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SpecError("cannot write '" + path + "'");
  out << content;
}

int exit_code_for(const Classification& c) {
  return c.verdict == Verdict::NonExistence ? 2 : 0;
}

int run_classify(const CommonOptions& opt) {
  const ProblemSpec spec = load_with_overrides(opt);
  const Classification c = classify(spec);
  emit(opt, opt.format == "text" ? classification_to_text(c)
                                 : classification_to_json(c, "classify"));
  return exit_code_for(c);
}

int run_solve(const CommonOptions& opt) {
  const ProblemSpec spec = load_with_overrides(opt);
  const Classification c = classify(spec);
  const TrigSeries* payload = nullptr;
  if (c.unique_solution) payload = &*c.unique_solution;

  if (opt.format == "csv") {
    if (!payload) throw SpecError("no unique payload to dump (verdict " + to_string(c.verdict) + ")");
    emit(opt, series_field_csv(*payload, spec));
    return 0;
  }
  emit(opt, opt.format == "text" ? classification_to_text(c)
                                 : classification_to_json(c, "solve"));
  if (payload && !opt.out_path.empty())
    emit_to(opt.out_path + ".field.csv", series_field_csv(*payload, spec));
  return exit_code_for(c);
}

int run_verify(const CommonOptions& opt) {
  const ProblemSpec spec = load_with_overrides(opt);
  const Classification c = classify(spec);
  if (!c.unique_solution && !c.family) {
    emit(opt, opt.format == "text" ? classification_to_text(c)
                                   : classification_to_json(c, "verify"));
    return exit_code_for(c);
  }
  const TrigSeries u = c.unique_solution ? *c.unique_solution : c.family->base;
  const VerificationReport rep = verify_candidate(spec, u, /*run_oracle=*/true);
  emit(opt, opt.format == "text" ? verification_to_text(rep, c) : verification_to_json(rep, c));
  return rep.pass ? 0 : 1;
}

int run_audit(const CommonOptions& opt, const std::string& field_path) {
  const ProblemSpec spec = load_with_overrides(opt);
  AuditReport report;
  std::vector<std::vector<double>> pts;
  if (!field_path.empty()) {
    const SampledField field = load_field_csv(field_path);
    const int max_mode = std::max(2, std::min(8, field.quadrature_resolution / 2 - 1));
    report = coefficient_audit(field.sampler(), max_mode, field.xprime_points,
                               field.quadrature_resolution, spec.tol.zero);
  } else {
    const Classification c = classify(spec);
    if (!c.unique_solution && !c.family)
      throw SpecError("audit needs --field or a spec whose verdict carries a payload");
    const TrigSeries u = c.unique_solution ? *c.unique_solution : c.family->base;
    const GridSpec coarse = spec.xprime_grid(5);
    for (std::size_t i = 0; i < coarse.point_count(); ++i) pts.push_back(coarse.point(i));
    const int max_mode = std::max(4, u.max_mode() + 2);
    report = coefficient_audit(
        [&u](std::span<const double> xp, double xn) { return u.evaluate(xp, xn); }, max_mode,
        pts, std::max(64, 4 * max_mode), spec.tol.zero);
  }
  emit(opt, opt.format == "text" ? audit_to_text(report) : audit_to_json(report));
  return report.all_pass ? 0 : 1;
}

int run_oracle(const CommonOptions& opt) {
  const ProblemSpec spec = load_with_overrides(opt);
  const Classification c = classify(spec);
  if (!c.unique_solution && !c.family)
    throw SpecError("oracle needs a spec whose verdict carries a payload (verdict " +
                    to_string(c.verdict) + ")");
  const TrigSeries u = c.unique_solution ? *c.unique_solution : c.family->base;
  const double R = spec.verification.oracle.R;
  const double h = spec.verification.oracle.h;
  const OracleResult fine = oracle_solve(spec, u, R, h);
  OracleResult coarse;
  bool have_coarse = false;
  if (fine.sup_error > 1e-13) {
    coarse = oracle_solve(spec, u, R, 2.0 * h);
    have_coarse = true;
  }
  emit(opt, oracle_to_json(fine, have_coarse ? &coarse : nullptr));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"halfspace: classify, solve and verify nonnegative solutions of "
               "-div(A(x') grad u) = u - g on the half-space with zero boundary data"};
  app.require_subcommand(1);

  CommonOptions classify_opt, solve_opt, verify_opt, audit_opt, oracle_opt;
  std::string audit_field;

  add_common(app.add_subcommand("classify", "emit a classification document"), classify_opt);
  add_common(app.add_subcommand("solve", "classify and dump the payload series and field"),
             solve_opt);
  add_common(app.add_subcommand("verify", "run the full verification report"), verify_opt);
  auto* audit_cmd = app.add_subcommand("audit", "coefficient audit of a sampled field");
  add_common(audit_cmd, audit_opt);
  audit_cmd->add_option("--field", audit_field,
                        "field CSV (x1[,x2],xN,value); defaults to the classified payload");
  add_common(app.add_subcommand("oracle", "finite-difference cross-check of the payload"),
             oracle_opt);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("classify")) return run_classify(classify_opt);
    if (app.got_subcommand("solve")) return run_solve(solve_opt);
    if (app.got_subcommand("verify")) return run_verify(verify_opt);
    if (app.got_subcommand("audit")) return run_audit(audit_opt, audit_field);
    if (app.got_subcommand("oracle")) return run_oracle(oracle_opt);
  } catch (const ClassificationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    for (const auto& f : e.findings())
      std::cerr << "  finding [" << f.code << "]: " << f.message << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
