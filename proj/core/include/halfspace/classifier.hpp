#pragma once

#include <optional>
#include <string>
#include <vector>

#include "halfspace/coefficient_system.hpp"
#include "halfspace/elimination.hpp"
#include "halfspace/problem.hpp"
#include "halfspace/verifier.hpp"

namespace halfspace {

enum class Verdict { NonExistence, Unique, Family, Inconclusive };

std::string to_string(Verdict v);

/// Stable rule identifiers; part of the versioned output contract.
namespace rules {
inline constexpr const char* theta_nonneg = "R-THETA-NONNEG";
inline constexpr const char* theta_neg = "R-THETA-NEG";
inline constexpr const char* g_xprime = "R-G-XPRIME";
inline constexpr const char* d1_pos = "R-D1-POS";
inline constexpr const char* c1_pos = "R-C1-POS";
inline constexpr const char* series_1d = "R-SERIES-1D";
inline constexpr const char* teo10 = "R-TEO10";
inline constexpr const char* teo11 = "R-TEO11";
inline constexpr const char* elimination = "R-ELIM";
inline constexpr const char* max_principle = "R-MAXPRIN";
inline constexpr const char* family_xn = "R-FAMILY-XN";
inline constexpr const char* inconclusive = "R-INCONCLUSIVE";
}  // namespace rules

struct Evidence {
  std::optional<SignProfile> c0;
  std::optional<SignProfile> c1;
  std::optional<SignProfile> d1;
  std::optional<double> residual_sup;
  std::optional<ScanResult> scan;
  std::optional<TraceAssumption> traces;
  std::vector<std::string> notes;  // assumptions, certificates, sampled facts
};

struct Classification {
  Verdict verdict = Verdict::Inconclusive;
  std::string rule_id;
  std::string citation;  // self-contained statement of the applied rule
  std::optional<TrigSeries> unique_solution;
  std::optional<FamilySolution> family;
  std::vector<std::string> obstructions;
  Evidence evidence;
  std::optional<VerificationReport> verification;  // internal re-verification
};

/// Fatal validation findings abort classification with this error.
class ClassificationError : public std::runtime_error {
 public:
  ClassificationError(const std::string& message, std::vector<Finding> findings);
  const std::vector<Finding>& findings() const { return findings_; }

 private:
  std::vector<Finding> findings_;
};

/// Unique candidate for an xN-only source with c1 = d1 = 0 and constant
/// coefficients:
///   a0 = c0,  a1 = -c0/2 + sum_{m>=2} c_m/(m^2-1),  b1 = sum m d_m/(m^2-1),
///   a_m = -c_m/(m^2-1),  b_m = -d_m/(m^2-1)  (m >= 2).
/// Satisfies u(0) = u(2pi) = 0 and u'(0) = u'(2pi) = 0 identically.
TrigSeries construct_series_1d(const TrigSeries& g);

/// The decision tree. Verdict priority: validation, constant source, x'-only
/// source, trace discharge (d1 then c1), maximum-principle certificate, 1-D
/// series with nonnegativity, lone-mode patterns, elimination, the known
/// affine family, Inconclusive.
Classification classify(const ProblemSpec& spec);

}  // namespace halfspace
