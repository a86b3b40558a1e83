#pragma once

#include <stdexcept>
#include <string>

#include "halfspace/classifier.hpp"
#include "halfspace/verifier.hpp"

namespace halfspace {

inline constexpr const char* kSpecSchemaVersion = "halfspace-spec/1";
inline constexpr const char* kReportSchemaVersion = "halfspace-report/1";

class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses the JSON problem-spec format; see docs/formats.md.
ProblemSpec parse_problem_spec(const std::string& json_text);
ProblemSpec load_problem_spec(const std::string& path);

/// Report documents. All serialization is deterministic: fixed key order and
/// shortest round-trip float formatting.
std::string classification_to_json(const Classification& c, const std::string& command);
std::string classification_to_text(const Classification& c);
std::string verification_to_json(const VerificationReport& rep, const Classification& c);
std::string verification_to_text(const VerificationReport& rep, const Classification& c);
std::string audit_to_json(const AuditReport& rep);
std::string audit_to_text(const AuditReport& rep);
std::string oracle_to_json(const OracleResult& fine, const OracleResult* half_step);

/// Series sample dump: header `x1[,x2],xN,value`, row-major with xN fastest.
std::string series_field_csv(const TrigSeries& u, const ProblemSpec& spec);

/// Reads a field dump in the series_field_csv layout back into a sampler
/// usable by the coefficient audit. The grid must be regular and cover whole
/// periods in xN.
struct SampledField {
  std::vector<std::vector<double>> xprime_points;
  std::vector<double> xn_points;                // ascending, uniform
  std::vector<std::vector<double>> values;      // [point][xn index]
  int quadrature_resolution = 0;                // points per period
  StripSampler sampler() const;
};

SampledField load_field_csv(const std::string& path);

}  // namespace halfspace
